use std::sync::Arc;

use filtk_core::diagram::{
    attach_corner_paths, check_rrz_like, check_six_term_exact, co_extend_to_corner,
    extend_from_corner, point_module, tensor_with_group, verify_hom, ArrowKind, DiagramModule,
    DiagramShape, RelationRhs, Variance,
};
use filtk_core::fgab::PresentedGroup;
use filtk_core::finspace::FiniteSpace;
use filtk_core::intlin::IntMatrix;
use serde::Serialize;

use super::CaseError;
use crate::formats::VarianceDto;
use crate::resources::{self, StepKind, SupportTableDto};

#[derive(Clone, Debug, Serialize)]
pub struct VertexCheck {
    pub vertex: String,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityCheck {
    pub relation: String,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct StepReport {
    pub corner: String,
    pub kind: StepKind,
    /// Group at the corner before the step.
    pub corner_group: String,
    /// Injectivity (mono) or surjectivity (epi) at the listed vertices.
    pub checked: Vec<VertexCheck>,
    /// Vertices outside the list where the component also fails.
    pub other_failures: Vec<String>,
    pub identities: Vec<IdentityCheck>,
    pub natural: bool,
    pub exact: bool,
    pub rrz_like: bool,
    pub corner_vanishes: bool,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PseudocircleReport {
    pub steps: Vec<StepReport>,
    pub vanishing: Vec<VertexCheck>,
    pub passed: bool,
}

/// The module generated at `x̃` in the given degree by the K-theory of a
/// point at `x`.
pub fn projective_at(
    shape: &Arc<DiagramShape>,
    x: usize,
    degree: u8,
) -> Result<DiagramModule, CaseError> {
    let corner = shape
        .carrier_vertex_of(shape.space().smallest_open(x), degree)
        .ok_or_else(|| {
            CaseError::Data(format!(
                "shape lacks the neighbourhood of point {}",
                shape.space().label(x)
            ))
        })?;
    Ok(attach_corner_paths(
        point_module(shape.clone(), x, degree)?,
        corner,
        false,
    )?)
}

/// The same point module, read as cogenerated by `corner`.
pub fn injective_at(
    shape: &Arc<DiagramShape>,
    x: usize,
    corner: usize,
) -> Result<DiagramModule, CaseError> {
    let degree = shape.vertices()[corner].degree;
    Ok(attach_corner_paths(
        point_module(shape.clone(), x, degree)?,
        corner,
        true,
    )?)
}

/// `Z` on the listed carriers in one degree, `1` along every `i` and `r`
/// arrow between two of them.
pub fn support_table_module(
    shape: &Arc<DiagramShape>,
    t: &SupportTableDto,
) -> Result<DiagramModule, CaseError> {
    let mut on = vec![false; shape.vertices().len()];
    for name in &t.support {
        let c = shape
            .space()
            .parse_carrier(name)
            .map_err(|e| CaseError::Data(e.to_string()))?;
        let v = shape
            .carrier_vertex_of(c, t.degree)
            .ok_or_else(|| CaseError::Data(format!("no vertex {name}_{}", t.degree)))?;
        on[v] = true;
    }
    let groups: Vec<PresentedGroup> = on
        .iter()
        .map(|&b| PresentedGroup::free(usize::from(b)))
        .collect();
    let variance = match t.variance {
        VarianceDto::Covariant => Variance::Covariant,
        VarianceDto::Contravariant => Variance::Contravariant,
    };
    let maps = shape
        .arrows()
        .iter()
        .map(|ar| {
            let (from, to) = match variance {
                Variance::Covariant => (ar.src, ar.dst),
                Variance::Contravariant => (ar.dst, ar.src),
            };
            if on[from] && on[to] && ar.kind != ArrowKind::Delta {
                IntMatrix::identity(1)
            } else {
                IntMatrix::zeros(usize::from(on[to]), usize::from(on[from]))
            }
        })
        .collect();
    Ok(DiagramModule::new(shape.clone(), variance, groups, maps)?)
}

fn precondition(m: &DiagramModule) -> Result<(), CaseError> {
    if *m.shape().space() != FiniteSpace::s21() {
        return Err(CaseError::Precondition(vec![
            "module does not live over the pseudo-circle".into(),
        ]));
    }
    let exact = check_six_term_exact(m)?;
    let rrz = check_rrz_like(m);
    let mut why: Vec<String> = exact.failures.iter().map(|f| f.to_string()).collect();
    why.extend(rrz.nonzero.iter().map(|a| format!("{a} is not zero")));
    if why.is_empty() {
        Ok(())
    } else {
        Err(CaseError::Precondition(why))
    }
}

/// Runs the reduction chain: each step maps a module built from one corner
/// group into (or onto) the current module and replaces it by the cokernel
/// (or kernel), until eight groups vanish.
pub fn verify_pseudocircle_steps(m: &DiagramModule) -> Result<PseudocircleReport, CaseError> {
    precondition(m)?;
    let plan = resources::s21_tables();
    let shape = m.shape().clone();
    let space = shape.space().clone();
    let mut current = m.clone();
    let mut steps = Vec::new();
    for step in &plan.steps {
        let c = shape.parse_vertex(&step.corner)?;
        let x = space
            .point(&step.point)
            .map_err(|e| CaseError::Data(e.to_string()))?;
        let degree = shape.vertices()[c].degree;
        let g = current.group(c).clone();
        let id = IntMatrix::identity(g.generators());
        let (h, next) = match step.kind {
            StepKind::Mono => {
                let p = projective_at(&shape, x, degree)?;
                if p.provenance().map(|p| p.corner) != Some(c) {
                    return Err(CaseError::Data(format!(
                        "{} is not the neighbourhood corner of point {}",
                        step.corner, step.point
                    )));
                }
                let h = extend_from_corner(&tensor_with_group(&p, &g), &current, &id)?;
                let next = h.cokernel();
                (h, next)
            }
            StepKind::Epi => {
                let q = injective_at(&shape, x, c)?;
                let h = co_extend_to_corner(&current, &tensor_with_group(&q, &g), &id)?;
                let next = h.kernel()?.src().clone();
                (h, next)
            }
        };
        let bad = match step.kind {
            StepKind::Mono => h.non_injective(),
            StepKind::Epi => h.non_surjective(),
        };
        let mut checked = Vec::new();
        for label in &step.checked {
            let v = shape.parse_vertex(label)?;
            checked.push(VertexCheck {
                vertex: label.clone(),
                holds: !bad.contains(&v),
            });
        }
        let listed: Vec<usize> = step
            .checked
            .iter()
            .map(|l| shape.parse_vertex(l))
            .collect::<Result<_, _>>()?;
        let other_failures = bad
            .iter()
            .filter(|v| !listed.contains(v))
            .map(|&v| shape.vertex_label(v))
            .collect();
        let mut identities = Vec::new();
        for text in &step.identities {
            let rel = shape.parse_relation(text)?;
            let lhs = current.path_matrix(&rel.lhs)?;
            let rhs = match &rel.rhs {
                RelationRhs::Path(p) => current.path_matrix(p)?,
                RelationRhs::Zero => IntMatrix::zeros(lhs.rows(), lhs.cols()),
            };
            let target = shape.arrows()[rel.lhs[0]].dst;
            identities.push(IdentityCheck {
                relation: text.clone(),
                holds: current.group(target).is_zero_element(&(&lhs - &rhs)),
            });
        }
        let natural = verify_hom(&h).holds();
        let exact = check_six_term_exact(&next)?.is_exact();
        let rrz_like = check_rrz_like(&next).holds();
        let corner_vanishes = next.group(c).is_trivial();
        let passed = bad.is_empty()
            && identities.iter().all(|i| i.holds)
            && natural
            && exact
            && rrz_like
            && corner_vanishes;
        steps.push(StepReport {
            corner: step.corner.clone(),
            kind: step.kind,
            corner_group: g.to_string(),
            checked,
            other_failures,
            identities,
            natural,
            exact,
            rrz_like,
            corner_vanishes,
            passed,
        });
        current = next;
    }
    let vanishing: Vec<VertexCheck> = plan
        .vanishing
        .iter()
        .map(|l| {
            Ok(VertexCheck {
                vertex: l.clone(),
                holds: current.group(shape.parse_vertex(l)?).is_trivial(),
            })
        })
        .collect::<Result<_, CaseError>>()?;
    let passed = steps.iter().all(|s| s.passed) && vanishing.iter().all(|v| v.holds);
    Ok(PseudocircleReport {
        steps,
        vanishing,
        passed,
    })
}
