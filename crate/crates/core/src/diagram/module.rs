use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use super::ops::Provenance;
use super::shape::{ArrowKind, DiagramShape, RelationRhs};
use super::DiagramError;
use crate::fgab::{homology, FgabError, GroupHom, InvariantFactors, PresentedGroup};
use crate::intlin::IntMatrix;

/// Whether arrow maps run along the arrows or against them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variance {
    Covariant,
    Contravariant,
}

impl Variance {
    pub fn flip(self) -> Self {
        match self {
            Variance::Covariant => Variance::Contravariant,
            Variance::Contravariant => Variance::Covariant,
        }
    }
}

/// A presented group on every vertex of a shape and a matrix on every arrow.
///
/// For a covariant module the matrix of arrow `a: v → w` maps the generators
/// of `v` into `w`; for a contravariant one it maps `w` into `v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagramModule {
    shape: Arc<DiagramShape>,
    variance: Variance,
    groups: Vec<PresentedGroup>,
    maps: Vec<IntMatrix>,
    provenance: Option<Provenance>,
}

impl DiagramModule {
    /// Checks sizes; use [`validate_module`] for well-definedness and relations.
    pub fn new(
        shape: Arc<DiagramShape>,
        variance: Variance,
        groups: Vec<PresentedGroup>,
        maps: Vec<IntMatrix>,
    ) -> Result<Self, DiagramError> {
        if groups.len() != shape.vertices().len() || maps.len() != shape.arrows().len() {
            return Err(DiagramError::Shape(format!(
                "module has {} groups and {} maps for {} vertices and {} arrows",
                groups.len(),
                maps.len(),
                shape.vertices().len(),
                shape.arrows().len()
            )));
        }
        let m = DiagramModule {
            shape,
            variance,
            groups,
            maps,
            provenance: None,
        };
        for a in 0..m.maps.len() {
            let (from, to) = m.map_ends(a);
            let want = (m.groups[to].generators(), m.groups[from].generators());
            if m.maps[a].shape() != want {
                return Err(DiagramError::Shape(format!(
                    "{} is {}x{}, expected {}x{}",
                    m.shape.arrow_label(a),
                    m.maps[a].rows(),
                    m.maps[a].cols(),
                    want.0,
                    want.1
                )));
            }
        }
        Ok(m)
    }

    /// All groups trivial, all maps zero.
    pub fn zero(shape: Arc<DiagramShape>, variance: Variance) -> Self {
        let groups = alloc::vec![PresentedGroup::trivial(); shape.vertices().len()];
        let maps = alloc::vec![IntMatrix::zeros(0, 0); shape.arrows().len()];
        DiagramModule {
            shape,
            variance,
            groups,
            maps,
            provenance: None,
        }
    }

    pub fn with_provenance(mut self, p: Provenance) -> Self {
        self.provenance = Some(p);
        self
    }

    pub fn shape(&self) -> &Arc<DiagramShape> {
        &self.shape
    }

    pub fn variance(&self) -> Variance {
        self.variance
    }

    pub fn groups(&self) -> &[PresentedGroup] {
        &self.groups
    }

    pub fn group(&self, v: usize) -> &PresentedGroup {
        &self.groups[v]
    }

    pub fn maps(&self) -> &[IntMatrix] {
        &self.maps
    }

    pub fn map(&self, a: usize) -> &IntMatrix {
        &self.maps[a]
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    /// `(from, to)` vertices of the matrix of arrow `a`.
    pub fn map_ends(&self, a: usize) -> (usize, usize) {
        let ar = &self.shape.arrows()[a];
        match self.variance {
            Variance::Covariant => (ar.src, ar.dst),
            Variance::Contravariant => (ar.dst, ar.src),
        }
    }

    pub fn arrow_hom(&self, a: usize) -> GroupHom {
        let (from, to) = self.map_ends(a);
        GroupHom::new(
            self.groups[from].clone(),
            self.groups[to].clone(),
            self.maps[a].clone(),
        )
        .expect("sizes are checked on construction")
    }

    /// Matrix of a path given in composite order (first arrow applied last).
    pub fn path_matrix(&self, path: &[usize]) -> Result<IntMatrix, DiagramError> {
        let Some(&last) = path.last() else {
            return Err(DiagramError::Shape("empty path".into()));
        };
        let arrows = self.shape.arrows();
        for w in path.windows(2) {
            if arrows[w[0]].src != arrows[w[1]].dst {
                return Err(DiagramError::Shape(format!(
                    "{} is not a path",
                    self.shape.path_label(path)
                )));
            }
        }
        let mut m = self.maps[last].clone();
        for &a in path.iter().rev().skip(1) {
            m = match self.variance {
                Variance::Covariant => &self.maps[a] * &m,
                Variance::Contravariant => &m * &self.maps[a],
            };
        }
        Ok(m)
    }

    /// Matrix of a path, or the identity on `at` for the empty path.
    pub fn path_matrix_or_identity(
        &self,
        path: &[usize],
        at: usize,
    ) -> Result<IntMatrix, DiagramError> {
        if path.is_empty() {
            Ok(IntMatrix::identity(self.groups[at].generators()))
        } else {
            self.path_matrix(path)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.groups.iter().all(PresentedGroup::is_trivial)
    }

    /// Invariant factors at every vertex, in vertex order.
    pub fn invariants(&self) -> Vec<InvariantFactors> {
        self.groups
            .iter()
            .map(PresentedGroup::invariant_factors)
            .collect()
    }

    /// Vertexwise direct sum; generators of earlier summands come first.
    pub fn direct_sum(parts: &[&DiagramModule]) -> Result<DiagramModule, DiagramError> {
        let first = parts
            .first()
            .ok_or_else(|| DiagramError::Shape("empty direct sum".into()))?;
        if parts
            .iter()
            .any(|p| !same_shape(&p.shape, &first.shape) || p.variance != first.variance)
        {
            return Err(DiagramError::ShapeMismatch);
        }
        let nv = first.shape.vertices().len();
        let groups = (0..nv)
            .map(|v| {
                let gs: Vec<&PresentedGroup> = parts.iter().map(|p| &p.groups[v]).collect();
                PresentedGroup::direct_sum(&gs).group
            })
            .collect();
        let maps = (0..first.maps.len())
            .map(|a| {
                let ms: Vec<&IntMatrix> = parts.iter().map(|p| &p.maps[a]).collect();
                IntMatrix::block_diag(&ms)
            })
            .collect();
        DiagramModule::new(first.shape.clone(), first.variance, groups, maps)
    }

    /// Replaces the presentation at each vertex through a change of generators:
    /// `basis[v]` has as columns the old coordinates of the new generators and
    /// must be invertible. Used to normalize signs of generators.
    pub fn change_generators(&self, basis: &[IntMatrix]) -> Result<DiagramModule, DiagramError> {
        let mut inv = Vec::with_capacity(basis.len());
        for (v, b) in basis.iter().enumerate() {
            let n = self.groups[v].generators();
            if b.shape() != (n, n) {
                return Err(DiagramError::BadPin(format!(
                    "basis change at {} has the wrong size",
                    self.shape.vertex_label(v)
                )));
            }
            let i = crate::intlin::solve_linear(b, &IntMatrix::identity(n))?
                .solution()
                .filter(|s| s.homogeneous.cols() == 0)
                .ok_or_else(|| {
                    DiagramError::BadPin(format!(
                        "basis change at {} is not invertible",
                        self.shape.vertex_label(v)
                    ))
                })?;
            inv.push(i.particular);
        }
        let groups = self
            .groups
            .iter()
            .zip(&inv)
            .map(|(g, i)| PresentedGroup::new(i * g.relations()))
            .collect();
        let maps = (0..self.maps.len())
            .map(|a| {
                let (from, to) = self.map_ends(a);
                &(&inv[to] * &self.maps[a]) * &basis[from]
            })
            .collect();
        DiagramModule::new(self.shape.clone(), self.variance, groups, maps)
    }

    pub(crate) fn from_parts_unchecked(
        shape: Arc<DiagramShape>,
        variance: Variance,
        groups: Vec<PresentedGroup>,
        maps: Vec<IntMatrix>,
        provenance: Option<Provenance>,
    ) -> Self {
        DiagramModule {
            shape,
            variance,
            groups,
            maps,
            provenance,
        }
    }
}

pub(crate) fn same_shape(a: &Arc<DiagramShape>, b: &Arc<DiagramShape>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModuleIssue {
    IllDefined { arrow: String },
    RelationFails { relation: String },
}

impl fmt::Display for ModuleIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModuleIssue::IllDefined { arrow } => write!(f, "{arrow} does not respect relations"),
            ModuleIssue::RelationFails { relation } => write!(f, "relation fails: {relation}"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ModuleReport {
    pub issues: Vec<ModuleIssue>,
}

impl ModuleReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }
}

/// Checks that every arrow map is well defined and every shape relation holds.
pub fn validate_module(m: &DiagramModule) -> ModuleReport {
    let mut issues = Vec::new();
    for a in 0..m.maps.len() {
        if !m.arrow_hom(a).is_well_defined() {
            issues.push(ModuleIssue::IllDefined {
                arrow: m.shape.arrow_label(a),
            });
        }
    }
    for rel in m.shape.relations() {
        let lhs = m.path_matrix(&rel.lhs).expect("shape relations are paths");
        let diff = match &rel.rhs {
            RelationRhs::Zero => lhs,
            RelationRhs::Path(p) => &lhs - &m.path_matrix(p).expect("shape relations are paths"),
        };
        let ar = &m.shape.arrows()[rel.lhs[0]];
        let target = match m.variance {
            Variance::Covariant => ar.dst,
            Variance::Contravariant => m.shape.arrows()[*rel.lhs.last().expect("nonempty")].src,
        };
        if !m.groups[target].is_zero_element(&diff) {
            issues.push(ModuleIssue::RelationFails {
                relation: m.shape.relation_label(rel),
            });
        }
    }
    ModuleReport { issues }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExactnessFailure {
    /// The two maps through the vertex do not compose to zero.
    NotAComplex { sequence: String, vertex: String },
    /// Nonzero homology at the vertex.
    Homology {
        sequence: String,
        vertex: String,
        homology: InvariantFactors,
    },
}

impl fmt::Display for ExactnessFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactnessFailure::NotAComplex { sequence, vertex } => {
                write!(f, "{sequence}: composite through {vertex} is nonzero")
            }
            ExactnessFailure::Homology {
                sequence,
                vertex,
                homology,
            } => {
                write!(f, "{sequence}: homology {homology} at {vertex}")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExactnessReport {
    pub checked: usize,
    pub failures: Vec<ExactnessFailure>,
}

impl ExactnessReport {
    pub fn is_exact(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Exactness at all six positions of every sequence of the shape.
pub fn check_six_term_exact(m: &DiagramModule) -> Result<ExactnessReport, DiagramError> {
    if m.variance != Variance::Covariant {
        return Err(DiagramError::Shape(
            "exactness is checked on covariant modules".into(),
        ));
    }
    let mut report = ExactnessReport::default();
    for seq in m.shape.sequences() {
        let label = m.shape.sequence_label(seq);
        for k in 0..6 {
            let f = m.arrow_hom(seq.arrows[(k + 5) % 6]);
            let g = m.arrow_hom(seq.arrows[k]);
            let vertex = m.shape.vertex_label(m.shape.arrows()[seq.arrows[k]].src);
            report.checked += 1;
            match homology(&f, &g) {
                Ok(h) if h.is_trivial() => {}
                Ok(h) => report.failures.push(ExactnessFailure::Homology {
                    sequence: label.clone(),
                    vertex,
                    homology: h.invariant_factors(),
                }),
                Err(FgabError::NotAComplex) => {
                    report.failures.push(ExactnessFailure::NotAComplex {
                        sequence: label.clone(),
                        vertex,
                    })
                }
                Err(e) => return Err(e.into()),
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RrzReport {
    pub checked: usize,
    /// Labels of boundary maps from degree 0 that are not zero.
    pub nonzero: Vec<String>,
}

impl RrzReport {
    pub fn holds(&self) -> bool {
        self.nonzero.is_empty()
    }
}

/// Whether every boundary map out of degree 0 vanishes.
pub fn check_rrz_like(m: &DiagramModule) -> RrzReport {
    let mut report = RrzReport::default();
    for (a, ar) in m.shape.arrows().iter().enumerate() {
        if ar.kind == ArrowKind::Delta && m.shape.vertices()[ar.src].degree == 0 {
            report.checked += 1;
            if !m.arrow_hom(a).is_zero() {
                report.nonzero.push(m.shape.arrow_label(a));
            }
        }
    }
    report
}
