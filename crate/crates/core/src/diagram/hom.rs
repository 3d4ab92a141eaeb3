use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::module::{same_shape, DiagramModule};
use super::DiagramError;
use crate::fgab::{
    GroupHom, HomEquation, HomOutcome, HomSystem, HomTerm, HomUnknown, PresentedGroup,
};
use crate::intlin::{solve_linear, InfeasibilityCertificate, IntMatrix, LinearOutcome};

/// A family of group homomorphisms `src(v) → dst(v)`, one per vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagramHom {
    src: DiagramModule,
    dst: DiagramModule,
    components: Vec<IntMatrix>,
}

impl DiagramHom {
    /// Checks shapes and sizes; naturality is checked by [`verify_hom`].
    pub fn new(
        src: DiagramModule,
        dst: DiagramModule,
        components: Vec<IntMatrix>,
    ) -> Result<Self, DiagramError> {
        if !same_shape(src.shape(), dst.shape()) || src.variance() != dst.variance() {
            return Err(DiagramError::ShapeMismatch);
        }
        if components.len() != src.groups().len() {
            return Err(DiagramError::Shape(format!(
                "{} components for {} vertices",
                components.len(),
                src.groups().len()
            )));
        }
        for (v, c) in components.iter().enumerate() {
            let want = (dst.group(v).generators(), src.group(v).generators());
            if c.shape() != want {
                return Err(DiagramError::Shape(format!(
                    "component at {} is {}x{}, expected {}x{}",
                    src.shape().vertex_label(v),
                    c.rows(),
                    c.cols(),
                    want.0,
                    want.1
                )));
            }
        }
        Ok(DiagramHom {
            src,
            dst,
            components,
        })
    }

    pub fn identity(m: &DiagramModule) -> Self {
        let components = m
            .groups()
            .iter()
            .map(|g| IntMatrix::identity(g.generators()))
            .collect();
        DiagramHom {
            src: m.clone(),
            dst: m.clone(),
            components,
        }
    }

    pub fn src(&self) -> &DiagramModule {
        &self.src
    }

    pub fn dst(&self) -> &DiagramModule {
        &self.dst
    }

    pub fn components(&self) -> &[IntMatrix] {
        &self.components
    }

    pub fn component(&self, v: usize) -> GroupHom {
        GroupHom::new(
            self.src.group(v).clone(),
            self.dst.group(v).clone(),
            self.components[v].clone(),
        )
        .expect("sizes are checked on construction")
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &DiagramHom) -> Result<DiagramHom, DiagramError> {
        if inner.dst != self.src {
            return Err(DiagramError::ShapeMismatch);
        }
        let components = self
            .components
            .iter()
            .zip(&inner.components)
            .map(|(a, b)| a * b)
            .collect();
        DiagramHom::new(inner.src.clone(), self.dst.clone(), components)
    }

    /// Whether every component is bijective.
    pub fn is_isomorphism(&self) -> bool {
        (0..self.components.len()).all(|v| self.component(v).is_isomorphism())
    }

    /// Vertices whose component is not injective.
    pub fn non_injective(&self) -> Vec<usize> {
        (0..self.components.len())
            .filter(|&v| !self.component(v).is_injective())
            .collect()
    }

    /// Vertices whose component is not surjective.
    pub fn non_surjective(&self) -> Vec<usize> {
        (0..self.components.len())
            .filter(|&v| !self.component(v).is_surjective())
            .collect()
    }

    /// Vertexwise cokernel with the arrow matrices of the target.
    pub fn cokernel(&self) -> DiagramModule {
        let groups = (0..self.components.len())
            .map(|v| self.component(v).cokernel().group)
            .collect();
        DiagramModule::from_parts_unchecked(
            self.dst.shape().clone(),
            self.dst.variance(),
            groups,
            self.dst.maps().to_vec(),
            None,
        )
    }

    /// Vertexwise kernel with the induced arrow maps, and its inclusion.
    pub fn kernel(&self) -> Result<DiagramHom, DiagramError> {
        let subs: Vec<_> = (0..self.components.len())
            .map(|v| self.component(v).kernel())
            .collect();
        let groups: Vec<PresentedGroup> = subs.iter().map(|s| s.group.clone()).collect();
        let mut maps = Vec::with_capacity(self.src.maps().len());
        for a in 0..self.src.maps().len() {
            let (from, to) = self.src.map_ends(a);
            let image = self.src.map(a) * subs[from].inclusion.matrix();
            let incl = subs[to].inclusion.matrix();
            let stacked = IntMatrix::hstack(incl.rows(), &[incl, self.src.group(to).relations()]);
            let lift = match solve_linear(&stacked, &image)? {
                LinearOutcome::Solution(s) => s
                    .particular
                    .select_rows(&(0..incl.cols()).collect::<Vec<_>>()),
                LinearOutcome::Infeasible(_) => {
                    return Err(DiagramError::ExtensionInconsistent(alloc::vec![format!(
                        "{} does not preserve the kernel",
                        self.src.shape().arrow_label(a)
                    )]))
                }
            };
            maps.push(lift);
        }
        let module =
            DiagramModule::new(self.src.shape().clone(), self.src.variance(), groups, maps)?;
        let components = subs
            .into_iter()
            .map(|s| s.inclusion.into_matrix())
            .collect();
        DiagramHom::new(module, self.src.clone(), components)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NaturalityFailure {
    pub arrow: usize,
    pub label: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NaturalityReport {
    /// Vertices whose component is not a well-defined group homomorphism.
    pub ill_defined: Vec<String>,
    /// Arrows whose square does not commute.
    pub failures: Vec<NaturalityFailure>,
}

impl NaturalityReport {
    pub fn holds(&self) -> bool {
        self.ill_defined.is_empty() && self.failures.is_empty()
    }
}

/// Well-definedness of every component and commutativity of every square.
pub fn verify_hom(h: &DiagramHom) -> NaturalityReport {
    let shape = h.src.shape();
    let mut report = NaturalityReport::default();
    for v in 0..h.components.len() {
        if !h.component(v).is_well_defined() {
            report.ill_defined.push(shape.vertex_label(v));
        }
    }
    for a in 0..shape.arrows().len() {
        let (from, to) = h.src.map_ends(a);
        let lhs = h.dst.map(a) * &h.components[from];
        let rhs = &h.components[to] * h.src.map(a);
        if !h.dst.group(to).is_zero_element(&(&lhs - &rhs)) {
            report.failures.push(NaturalityFailure {
                arrow: a,
                label: shape.arrow_label(a),
            });
        }
    }
    report
}

#[derive(Clone, Debug)]
pub enum HomSolveOutcome {
    /// A natural transformation extending the pins, and which components are
    /// the same in every such extension.
    Solved { hom: DiagramHom, forced: Vec<bool> },
    Infeasible {
        /// Arrow whose square already fails on its own, if one does.
        arrow: Option<usize>,
        column: Option<usize>,
        certificate: InfeasibilityCertificate,
    },
}

impl HomSolveOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, HomSolveOutcome::Solved { .. })
    }
}

impl fmt::Display for HomSolveOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HomSolveOutcome::Solved { forced, .. } => {
                write!(
                    f,
                    "feasible; {} of {} components forced",
                    forced.iter().filter(|x| **x).count(),
                    forced.len()
                )
            }
            HomSolveOutcome::Infeasible {
                arrow,
                column,
                certificate,
            } => {
                write!(f, "infeasible: {certificate}")?;
                if let (Some(a), Some(c)) = (arrow, column) {
                    write!(f, "; arrow #{a}, generator {c}")?;
                }
                Ok(())
            }
        }
    }
}

/// Searches for a natural transformation `src → dst` whose components at the
/// pinned vertices are the given matrices.
pub fn solve_hom(
    src: &DiagramModule,
    dst: &DiagramModule,
    pins: &BTreeMap<usize, IntMatrix>,
) -> Result<HomSolveOutcome, DiagramError> {
    if !same_shape(src.shape(), dst.shape()) || src.variance() != dst.variance() {
        return Err(DiagramError::ShapeMismatch);
    }
    let shape = src.shape();
    let nv = shape.vertices().len();
    for (&v, m) in pins {
        if v >= nv {
            return Err(DiagramError::BadPin(format!("vertex #{v} does not exist")));
        }
        let label = shape.vertex_label(v);
        let g = GroupHom::new(src.group(v).clone(), dst.group(v).clone(), m.clone())
            .map_err(|_| DiagramError::BadPin(format!("{label} has the wrong size")))?;
        if !g.is_well_defined() {
            return Err(DiagramError::BadPin(format!("{label} is not well defined")));
        }
    }
    let mut unknown_of = alloc::vec![None; nv];
    let mut system = HomSystem::default();
    for v in 0..nv {
        if !pins.contains_key(&v) {
            unknown_of[v] = Some(system.unknowns.len());
            system.unknowns.push(HomUnknown {
                dom: src.group(v).clone(),
                cod: dst.group(v).clone(),
            });
        }
    }
    // dst(a) X_from - X_to src(a) = 0 in dst(to), one equation per arrow.
    for a in 0..shape.arrows().len() {
        let (from, to) = src.map_ends(a);
        let cols = src.group(from).generators();
        let target = dst.group(to).clone();
        let mut rhs = IntMatrix::zeros(target.generators(), cols);
        let mut terms = Vec::new();
        match unknown_of[from] {
            Some(u) => terms.push(HomTerm {
                left: dst.map(a).clone(),
                unknown: u,
                right: IntMatrix::identity(cols),
            }),
            None => rhs = &rhs - &(dst.map(a) * &pins[&from]),
        }
        match unknown_of[to] {
            Some(u) => terms.push(HomTerm {
                left: -&IntMatrix::identity(target.generators()),
                unknown: u,
                right: src.map(a).clone(),
            }),
            None => rhs = &rhs + &(&pins[&to] * src.map(a)),
        }
        system.equations.push(HomEquation { target, terms, rhs });
    }
    match system.solve()? {
        HomOutcome::Solved(sol) => {
            let mut components = Vec::with_capacity(nv);
            let mut forced = Vec::with_capacity(nv);
            for v in 0..nv {
                match unknown_of[v] {
                    Some(u) => {
                        components.push(sol.values[u].clone());
                        forced.push(sol.is_forced(&system, u));
                    }
                    None => {
                        components.push(pins[&v].clone());
                        forced.push(true);
                    }
                }
            }
            let hom = DiagramHom::new(src.clone(), dst.clone(), components)?;
            Ok(HomSolveOutcome::Solved { hom, forced })
        }
        HomOutcome::Infeasible(inf) => Ok(HomSolveOutcome::Infeasible {
            arrow: inf.culprit.as_ref().map(|c| c.equation),
            column: inf.culprit.as_ref().map(|c| c.column),
            certificate: inf
                .culprit
                .map(|c| c.certificate)
                .unwrap_or(inf.certificate),
        }),
    }
}
