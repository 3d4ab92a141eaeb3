use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::module::{DiagramModule, Variance};
use super::shape::ArrowKind;
use super::DiagramError;
use crate::fgab::{is_exact_at, GroupHom, PresentedGroup};
use crate::finspace::{FiniteSpace, PointSet};
use crate::intlin::IntMatrix;

/// Data at one point `x`: `K0` of its smallest open neighbourhood `x̃`, of
/// the punctured neighbourhood `x̃ ∖ {x}` (summed over its components), and
/// `K1` of the point itself.
#[derive(Clone, Debug)]
pub struct ReducedPoint {
    pub point: usize,
    pub neighbourhood: PointSet,
    pub components: Vec<PointSet>,
    pub k0_neighbourhood: PresentedGroup,
    pub k0_punctured: PresentedGroup,
    pub k1_point: PresentedGroup,
    /// Boundary map `K1(x) → K0(x̃ ∖ x)`.
    pub boundary: GroupHom,
    /// Inclusion-induced `K0(x̃ ∖ x) → K0(x̃)`.
    pub inclusion: GroupHom,
}

/// `K0(ỹ) → K0(x̃ ∖ x)` for an arrow `y → x`.
#[derive(Clone, Debug)]
pub struct ReducedArrow {
    pub from: usize,
    pub to: usize,
    pub map: GroupHom,
}

#[derive(Clone, Debug)]
pub struct ReducedInvariant {
    pub space: FiniteSpace,
    pub points: Vec<ReducedPoint>,
    pub arrows: Vec<ReducedArrow>,
}

impl ReducedInvariant {
    fn arrow(&self, y: usize, x: usize) -> &ReducedArrow {
        self.arrows
            .iter()
            .find(|a| a.from == y && a.to == x)
            .expect("arrow of the space")
    }

    /// `K0(z̃) → K0(z̃')` for an arrow `z → z'`.
    pub fn step(&self, z: usize, z2: usize) -> GroupHom {
        self.points[z2]
            .inclusion
            .compose(&self.arrow(z, z2).map)
            .expect("composable by construction")
    }
}

/// Extracts the reduced invariant from a covariant module on a shape that
/// contains the needed carriers and arrows.
pub fn reduced_from_full(m: &DiagramModule) -> Result<ReducedInvariant, DiagramError> {
    if m.variance() != Variance::Covariant {
        return Err(DiagramError::Shape(
            "reduced invariant needs a covariant module".into(),
        ));
    }
    let shape = m.shape();
    let space = shape.space();
    let vertex = |c: PointSet, d: u8| {
        shape
            .carrier_vertex_of(c, d)
            .ok_or_else(|| DiagramError::MissingVertex(format!("{}_{d}", space.carrier_name(c))))
    };
    let i_path = |from: usize, to: usize| -> Result<IntMatrix, DiagramError> {
        let p = shape.find_path(from, to, &[ArrowKind::I]).ok_or_else(|| {
            DiagramError::MissingArrow(format!(
                "i:{}>{}",
                shape.vertex_label(from),
                shape.vertex_label(to)
            ))
        })?;
        m.path_matrix_or_identity(&p, from)
    };
    let mut points = Vec::with_capacity(space.len());
    for x in 0..space.len() {
        let nb = space.smallest_open(x);
        let punctured = nb.minus(PointSet::singleton(x));
        let components = space.components(punctured);
        let nb0 = vertex(nb, 0)?;
        let x1 = vertex(PointSet::singleton(x), 1)?;
        let mut comp_groups = Vec::new();
        let mut deltas = Vec::new();
        let mut incls = Vec::new();
        for &c in &components {
            let c0 = vertex(c, 0)?;
            comp_groups.push(m.group(c0).clone());
            let d = shape.arrow(ArrowKind::Delta, x1, c0).ok_or_else(|| {
                DiagramError::MissingArrow(format!(
                    "d:{}>{}",
                    shape.vertex_label(x1),
                    shape.vertex_label(c0)
                ))
            })?;
            deltas.push(m.map(d).clone());
            incls.push(i_path(c0, nb0)?);
        }
        let refs: Vec<&PresentedGroup> = comp_groups.iter().collect();
        let k0_punctured = PresentedGroup::direct_sum(&refs).group;
        let k1_point = m.group(x1).clone();
        let k0_neighbourhood = m.group(nb0).clone();
        let drefs: Vec<&IntMatrix> = deltas.iter().collect();
        let irefs: Vec<&IntMatrix> = incls.iter().collect();
        let boundary = GroupHom::new(
            k1_point.clone(),
            k0_punctured.clone(),
            IntMatrix::vstack(k1_point.generators(), &drefs),
        )?;
        let inclusion = GroupHom::new(
            k0_punctured.clone(),
            k0_neighbourhood.clone(),
            IntMatrix::hstack(k0_neighbourhood.generators(), &irefs),
        )?;
        points.push(ReducedPoint {
            point: x,
            neighbourhood: nb,
            components,
            k0_neighbourhood,
            k0_punctured,
            k1_point,
            boundary,
            inclusion,
        });
    }
    let mut arrows = Vec::new();
    for (y, x) in space.arrows() {
        let px = &points[x];
        let ny = space.smallest_open(y);
        let slot = px
            .components
            .iter()
            .position(|c| ny.is_subset(*c))
            .ok_or_else(|| {
                DiagramError::Shape(format!(
                    "neighbourhood of {} escapes the punctured one",
                    space.label(y)
                ))
            })?;
        let to_comp = i_path(vertex(ny, 0)?, vertex(px.components[slot], 0)?)?;
        let mut blocks = Vec::new();
        for (k, &c) in px.components.iter().enumerate() {
            if k == slot {
                blocks.push(to_comp.clone());
            } else {
                blocks.push(IntMatrix::zeros(
                    m.group(vertex(c, 0)?).generators(),
                    to_comp.cols(),
                ));
            }
        }
        let brefs: Vec<&IntMatrix> = blocks.iter().collect();
        let map = GroupHom::new(
            points[y].k0_neighbourhood.clone(),
            px.k0_punctured.clone(),
            IntMatrix::vstack(to_comp.cols(), &brefs),
        )?;
        arrows.push(ReducedArrow {
            from: y,
            to: x,
            map,
        });
    }
    Ok(ReducedInvariant {
        space: space.clone(),
        points,
        arrows,
    })
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RModuleReport {
    pub checked: usize,
    pub failures: Vec<String>,
}

impl RModuleReport {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

/// At every point: exactness of `K1(x) → K0(x̃ ∖ x) → K0(x̃)`, and of
/// `⊕ K0(s̃) → ⊕_{y→x} K0(ỹ) → K0(x̃ ∖ x) → 0`, where the left sum runs over
/// pairs of distinct paths into `x` from a common source `s`, mapped to the
/// difference of the two path composites.
pub fn check_exact_r_module(r: &ReducedInvariant) -> Result<RModuleReport, DiagramError> {
    let mut report = RModuleReport::default();
    let n = r.points.len();
    let space_arrows: Vec<(usize, usize)> = r.arrows.iter().map(|a| (a.from, a.to)).collect();
    for x in 0..n {
        let px = &r.points[x];
        report.checked += 1;
        if !is_exact_at(&px.boundary, &px.inclusion)? {
            report.failures.push(format!(
                "point {}: boundary and inclusion are not exact",
                r.space.label(x)
            ));
        }
        let ins: Vec<usize> = space_arrows
            .iter()
            .filter(|(_, t)| *t == x)
            .map(|(y, _)| *y)
            .collect();
        let in_groups: Vec<&PresentedGroup> =
            ins.iter().map(|&y| &r.points[y].k0_neighbourhood).collect();
        let sum = PresentedGroup::direct_sum(&in_groups);
        let blocks: Vec<&IntMatrix> = ins.iter().map(|&y| r.arrow(y, x).map.matrix()).collect();
        let total = GroupHom::new(
            sum.group.clone(),
            px.k0_punctured.clone(),
            IntMatrix::hstack(px.k0_punctured.generators(), &blocks),
        )?;
        report.checked += 1;
        if !total.is_surjective() {
            report.failures.push(format!(
                "point {}: incoming neighbourhoods do not cover the punctured one",
                r.space.label(x)
            ));
        }
        let pairs = r.space.distinct_path_pairs(x);
        let mut sources = Vec::new();
        let mut cols = Vec::new();
        for pair in &pairs {
            let (s, p, q) = (&pair.source, &pair.first, &pair.second);
            let mut col = IntMatrix::zeros(
                sum.group.generators(),
                r.points[*s].k0_neighbourhood.generators(),
            );
            for (path, sign) in [(p, 1i32), (q, -1i32)] {
                let y = path[path.len() - 2];
                let slot = ins
                    .iter()
                    .position(|&z| z == y)
                    .expect("penultimate point has an arrow into x");
                let mut g = GroupHom::identity(&r.points[*s].k0_neighbourhood);
                for w in path[..path.len() - 1].windows(2) {
                    g = r.step(w[0], w[1]).compose(&g)?;
                }
                let contribution = sum.injections[slot].matrix() * g.matrix();
                col = if sign > 0 {
                    &col + &contribution
                } else {
                    &col - &contribution
                };
            }
            sources.push(&r.points[*s].k0_neighbourhood);
            cols.push(col);
        }
        let crefs: Vec<&IntMatrix> = cols.iter().collect();
        let relation = GroupHom::new(
            PresentedGroup::direct_sum(&sources).group,
            sum.group.clone(),
            IntMatrix::hstack(sum.group.generators(), &crefs),
        )?;
        report.checked += 1;
        if !is_exact_at(&relation, &total)? {
            report.failures.push(format!(
                "point {}: path relations do not account for the kernel",
                r.space.label(x)
            ));
        }
    }
    Ok(report)
}

/// Colimit of the neighbourhood groups: `⊕_x K0(x̃)` modulo `g ~ step(g)` for
/// every arrow `y → x`.
pub fn unit_group(r: &ReducedInvariant) -> Result<PresentedGroup, DiagramError> {
    let groups: Vec<&PresentedGroup> = r.points.iter().map(|p| &p.k0_neighbourhood).collect();
    let sum = PresentedGroup::direct_sum(&groups);
    let mut cols = Vec::new();
    let mut doms = Vec::new();
    for a in &r.arrows {
        let step = r.step(a.from, a.to);
        let m = &(sum.injections[a.to].matrix() * step.matrix()) - sum.injections[a.from].matrix();
        cols.push(m);
        doms.push(&r.points[a.from].k0_neighbourhood);
    }
    let crefs: Vec<&IntMatrix> = cols.iter().collect();
    let rel = GroupHom::new(
        PresentedGroup::direct_sum(&doms).group,
        sum.group.clone(),
        IntMatrix::hstack(sum.group.generators(), &crefs),
    )?;
    Ok(rel.cokernel().group)
}
