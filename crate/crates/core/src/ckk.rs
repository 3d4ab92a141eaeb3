//! Filtered K-theory of Cuntz–Krieger algebras given by block matrices over a
//! finite space.
//!
//! An edge from a coordinate in block `x` to one in block `y` (a positive
//! entry `A[x, y]`) forces every open set containing `x` to contain `y`, so
//! open sets are the hereditary sets of blocks. For a locally closed `Y`,
//! with `B_Y = I - A_Yᵗ` on the coordinates of `Y`, the groups are
//! `K0(Y) = coker B_Y` and `K1(Y) = ker B_Y`.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diagram::{ArrowKind, DiagramError, DiagramModule, DiagramShape, Variance};
use crate::fgab::PresentedGroup;
use crate::finspace::{FiniteSpace, PointSet};
use crate::intlin::{lattice_basis, nullspace, solve_linear, IntMatrix, LinearOutcome};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CkkError {
    NotSquare {
        rows: usize,
        cols: usize,
    },
    BlockSizes(String),
    /// An entry links block `from` to block `to` although some open set
    /// contains `from` but not `to`.
    Forbidden {
        from: String,
        to: String,
    },
    /// A nonzero block above the diagonal in the declared block order.
    NotLowerTriangular {
        from: String,
        to: String,
    },
    NotAdmissible(Vec<String>),
    Diagram(DiagramError),
}

impl fmt::Display for CkkError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CkkError::NotSquare { rows, cols } => write!(f, "matrix is {rows}x{cols}, not square"),
            CkkError::BlockSizes(s) => write!(f, "block structure: {s}"),
            CkkError::Forbidden { from, to } => {
                write!(
                    f,
                    "nonzero block from {from} to {to} is not allowed by the open sets"
                )
            }
            CkkError::NotLowerTriangular { from, to } => {
                write!(
                    f,
                    "block from {from} to {to} lies above the diagonal of the declared order"
                )
            }
            CkkError::NotAdmissible(v) => write!(f, "matrix is not admissible: {}", v.join("; ")),
            CkkError::Diagram(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for CkkError {}

impl From<DiagramError> for CkkError {
    fn from(e: DiagramError) -> Self {
        CkkError::Diagram(e)
    }
}

/// A square nonnegative integer matrix cut into blocks indexed by the
/// points of a finite space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockMatrix {
    space: FiniteSpace,
    /// Point of each block, in matrix order.
    order: Vec<usize>,
    sizes: Vec<usize>,
    matrix: IntMatrix,
}

impl BlockMatrix {
    /// `order[k]` is the point owning the `k`-th diagonal block, of size `sizes[k]`.
    pub fn new(
        space: FiniteSpace,
        order: Vec<usize>,
        sizes: Vec<usize>,
        matrix: IntMatrix,
    ) -> Result<Self, CkkError> {
        if !matrix.is_square() {
            return Err(CkkError::NotSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        let mut seen = vec![false; space.len()];
        for &p in &order {
            if p >= space.len() || core::mem::replace(&mut seen[p], true) {
                return Err(CkkError::BlockSizes(
                    "each point must own exactly one block".into(),
                ));
            }
        }
        if seen.iter().any(|s| !s) || sizes.len() != order.len() {
            return Err(CkkError::BlockSizes(
                "each point must own exactly one block".into(),
            ));
        }
        if sizes.contains(&0) || sizes.iter().sum::<usize>() != matrix.rows() {
            return Err(CkkError::BlockSizes(format!(
                "block sizes {sizes:?} do not add up to {}",
                matrix.rows()
            )));
        }
        let bm = BlockMatrix {
            space,
            order,
            sizes,
            matrix,
        };
        for (bx, &x) in bm.order.iter().enumerate() {
            let allowed = bm.space.smallest_open(x);
            for (by, &y) in bm.order.iter().enumerate() {
                if bm.block(bx, by).is_zero() {
                    continue;
                }
                let (from, to) = (bm.space.label(x).into(), bm.space.label(y).into());
                if !allowed.contains(y) {
                    return Err(CkkError::Forbidden { from, to });
                }
                if by > bx {
                    return Err(CkkError::NotLowerTriangular { from, to });
                }
            }
        }
        Ok(bm)
    }

    /// Points ordered so that smaller neighbourhoods come first, which makes
    /// every admissible matrix block-lower-triangular.
    pub fn triangular_order(space: &FiniteSpace) -> Vec<usize> {
        let mut order: Vec<usize> = (0..space.len()).collect();
        order.sort_by_key(|&x| (space.smallest_open(x).len(), x));
        order
    }

    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    fn offset(&self, block: usize) -> usize {
        self.sizes[..block].iter().sum()
    }

    fn block(&self, bx: usize, by: usize) -> IntMatrix {
        let (r, c) = (self.offset(bx), self.offset(by));
        self.matrix
            .submatrix(r..r + self.sizes[bx], c..c + self.sizes[by])
    }

    fn block_of_point(&self, x: usize) -> usize {
        self.order
            .iter()
            .position(|&p| p == x)
            .expect("every point owns a block")
    }

    /// Matrix coordinates belonging to the points of `carrier`, in matrix order.
    pub fn coordinates(&self, carrier: PointSet) -> Vec<usize> {
        let mut out = Vec::new();
        for (b, &p) in self.order.iter().enumerate() {
            if carrier.contains(p) {
                let o = self.offset(b);
                out.extend(o..o + self.sizes[b]);
            }
        }
        out
    }

    /// `I - A_Yᵗ` on the coordinates of `carrier`.
    pub fn boundary_matrix(&self, carrier: PointSet) -> IntMatrix {
        let idx = self.coordinates(carrier);
        let a = self.matrix.select_rows(&idx).select_cols(&idx);
        &IntMatrix::identity(idx.len()) - &a.transpose()
    }

    /// Conditions making the algebra a tight, purely infinite algebra over
    /// the space; returns the violated ones.
    pub fn admissibility_issues(&self) -> Vec<String> {
        let mut issues = Vec::new();
        if self.matrix.entries().iter().any(Signed::is_negative) {
            issues.push("negative entry".into());
        }
        for (bx, &x) in self.order.iter().enumerate() {
            let d = self.block(bx, bx);
            if !strongly_connected(&d) {
                issues.push(format!("block {} is reducible", self.space.label(x)));
            }
            if is_permutation(&d) {
                issues.push(format!(
                    "block {} is a permutation matrix",
                    self.space.label(x)
                ));
            }
            for y in self.space.specialization_arrows(x) {
                if self.block(bx, self.block_of_point(y)).is_zero() {
                    issues.push(format!(
                        "block from {} to {} is zero",
                        self.space.label(x),
                        self.space.label(y)
                    ));
                }
            }
        }
        issues
    }

    pub fn check_admissible(&self) -> Result<(), CkkError> {
        let issues = self.admissibility_issues();
        if issues.is_empty() {
            Ok(())
        } else {
            Err(CkkError::NotAdmissible(issues))
        }
    }
}

fn strongly_connected(m: &IntMatrix) -> bool {
    let n = m.rows();
    let reach = |forward: bool| {
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(i) = stack.pop() {
            for j in 0..n {
                let e = if forward { m.get(i, j) } else { m.get(j, i) };
                if !seen[j] && e.is_positive() {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen.into_iter().all(|s| s)
    };
    n > 0 && reach(true) && reach(false)
}

fn is_permutation(m: &IntMatrix) -> bool {
    let n = m.rows();
    m.entries().iter().all(|e| e.is_zero() || e.is_one())
        && (0..n).all(|i| m.row(i).iter().filter(|e| e.is_one()).count() == 1)
        && (0..n).all(|j| (0..n).filter(|&i| m.get(i, j).is_one()).count() == 1)
}

/// `K0` and `K1` of one locally closed subset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubquotientK {
    pub carrier: PointSet,
    /// Matrix coordinates of the carrier.
    pub coordinates: Vec<usize>,
    pub boundary: IntMatrix,
    pub k0: PresentedGroup,
    /// Columns form a basis of `ker B_Y`; `K1` is free on them.
    pub k1_basis: IntMatrix,
}

impl SubquotientK {
    pub fn k1(&self) -> PresentedGroup {
        PresentedGroup::free(self.k1_basis.cols())
    }
}

pub fn subquotient_k(a: &BlockMatrix, carrier: PointSet) -> SubquotientK {
    let boundary = a.boundary_matrix(carrier);
    let k1_basis = lattice_basis(&nullspace(&boundary));
    SubquotientK {
        carrier,
        coordinates: a.coordinates(carrier),
        k0: PresentedGroup::new(boundary.clone()),
        boundary,
        k1_basis,
    }
}

/// `M` with `M[i, j] = 1` when `sub[j] == sup[i]`: coordinates of `sub` inside `sup`.
fn inclusion_matrix(sub: &[usize], sup: &[usize]) -> IntMatrix {
    let mut m = IntMatrix::zeros(sup.len(), sub.len());
    for (j, c) in sub.iter().enumerate() {
        let i = sup
            .iter()
            .position(|d| d == c)
            .expect("subset of coordinates");
        m.set(i, j, 1);
    }
    m
}

fn express(basis: &IntMatrix, vectors: &IntMatrix) -> IntMatrix {
    match solve_linear(basis, vectors).expect("matching row counts") {
        LinearOutcome::Solution(s) => s.particular,
        LinearOutcome::Infeasible(_) => unreachable!("kernel vectors lie in the kernel lattice"),
    }
}

/// The full filtered K-theory of `a` as a module on `shape`.
///
/// Vertices must carry locally closed sets and arrows must be of kind
/// `i`, `r` or `δ`. The boundary map out of degree 0 is zero.
pub fn filtered_k(a: &BlockMatrix, shape: Arc<DiagramShape>) -> Result<DiagramModule, CkkError> {
    if shape.space() != a.space() {
        return Err(DiagramError::ShapeMismatch.into());
    }
    let mut cache: Vec<(PointSet, SubquotientK)> = Vec::new();
    let mut get = |c: PointSet| -> SubquotientK {
        if let Some((_, k)) = cache.iter().find(|(d, _)| *d == c) {
            return k.clone();
        }
        let k = subquotient_k(a, c);
        cache.push((c, k.clone()));
        k
    };
    let carrier = |v: usize| {
        shape.vertices()[v].carrier.ok_or_else(|| {
            CkkError::Diagram(DiagramError::Shape(format!(
                "{} has no carrier",
                shape.vertex_label(v)
            )))
        })
    };
    let mut groups = Vec::with_capacity(shape.vertices().len());
    for (v, spec) in shape.vertices().iter().enumerate() {
        let k = get(carrier(v)?);
        groups.push(if spec.degree == 0 { k.k0 } else { k.k1() });
    }
    let mut maps = Vec::with_capacity(shape.arrows().len());
    for ar in shape.arrows() {
        let (s, t) = (get(carrier(ar.src)?), get(carrier(ar.dst)?));
        let ds = shape.vertices()[ar.src].degree;
        let m = match (ar.kind, ds) {
            (ArrowKind::I, 0) => inclusion_matrix(&s.coordinates, &t.coordinates),
            (ArrowKind::I, _) => express(
                &t.k1_basis,
                &(&inclusion_matrix(&s.coordinates, &t.coordinates) * &s.k1_basis),
            ),
            (ArrowKind::R, 0) => inclusion_matrix(&t.coordinates, &s.coordinates).transpose(),
            (ArrowKind::R, _) => express(
                &t.k1_basis,
                &(&inclusion_matrix(&t.coordinates, &s.coordinates).transpose() * &s.k1_basis),
            ),
            (ArrowKind::Delta, 0) => IntMatrix::zeros(t.k1_basis.cols(), s.coordinates.len()),
            (ArrowKind::Delta, _) => {
                let whole = s.carrier.union(t.carrier);
                let y = get(whole);
                let q_idx: Vec<usize> = s
                    .coordinates
                    .iter()
                    .map(|c| y.coordinates.iter().position(|d| d == c).expect("in Y"))
                    .collect();
                let u_idx: Vec<usize> = t
                    .coordinates
                    .iter()
                    .map(|c| y.coordinates.iter().position(|d| d == c).expect("in Y"))
                    .collect();
                &y.boundary.select_rows(&u_idx).select_cols(&q_idx) * &s.k1_basis
            }
            (ArrowKind::Aux, _) => {
                return Err(DiagramError::Shape(
                    "auxiliary arrows have no K-theoretic meaning".into(),
                )
                .into())
            }
        };
        maps.push(m);
    }
    Ok(DiagramModule::new(
        shape,
        Variance::Covariant,
        groups,
        maps,
    )?)
}

/// Parameters of [`realize_space_random`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RandomMatrixParams {
    pub max_block: usize,
    pub max_total: usize,
    pub max_entry: u32,
}

impl Default for RandomMatrixParams {
    fn default() -> Self {
        RandomMatrixParams {
            max_block: 2,
            max_total: 12,
            max_entry: 3,
        }
    }
}

/// A random admissible block matrix over `space`, reproducible from `seed`.
pub fn realize_space_random(
    space: &FiniteSpace,
    seed: u64,
    params: RandomMatrixParams,
) -> BlockMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = space.len();
    let budget = params.max_total.max(n);
    let mut sizes = vec![1usize; n];
    let mut total = n;
    for s in sizes.iter_mut() {
        let want = rng.gen_range(1..=params.max_block.max(1));
        let extra = (want - 1).min(budget - total);
        *s += extra;
        total += extra;
    }
    let order = BlockMatrix::triangular_order(space);
    let mut offsets = vec![0usize; n];
    let mut at = 0;
    for &x in &order {
        offsets[x] = at;
        at += sizes[x];
    }
    let max = params.max_entry.max(2);
    let mut m = IntMatrix::zeros(total, total);
    for x in 0..n {
        let nb = space.smallest_open(x);
        let arrows = space.specialization_arrows(x);
        for y in nb.iter() {
            let (r0, c0) = (offsets[x], offsets[y]);
            if y == x {
                for i in 0..sizes[x] {
                    for j in 0..sizes[x] {
                        let lo = if i == j { 2 } else { 1 };
                        m.set(r0 + i, c0 + j, BigInt::from(rng.gen_range(lo..=max)));
                    }
                }
            } else {
                for i in 0..sizes[x] {
                    for j in 0..sizes[y] {
                        m.set(r0 + i, c0 + j, BigInt::from(rng.gen_range(0..max)));
                    }
                }
                if arrows.contains(&y) {
                    let (i, j) = (rng.gen_range(0..sizes[x]), rng.gen_range(0..sizes[y]));
                    if m.get(r0 + i, c0 + j).is_zero() {
                        m.set(r0 + i, c0 + j, 1);
                    }
                }
            }
        }
    }
    let sizes = order.iter().map(|&x| sizes[x]).collect();
    BlockMatrix::new(space.clone(), order, sizes, m).expect("entries respect the open sets")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{check_rrz_like, check_six_term_exact, validate_module};
    use alloc::string::ToString;

    fn paper_like() -> BlockMatrix {
        let space = FiniteSpace::csp();
        let p = |l: &str| space.point(l).unwrap();
        let order = vec![p("4"), p("2"), p("3"), p("1")];
        let m = IntMatrix::from_rows(&[
            vec![3, 0, 0, 0, 0],
            vec![2, 3, 0, 0, 0],
            vec![2, 0, 3, 0, 0],
            vec![2, 1, 1, 2, 1],
            vec![0, 0, 0, 1, 2],
        ]);
        BlockMatrix::new(space, order, vec![1, 1, 1, 2], m).unwrap()
    }

    #[test]
    fn block_structure_is_enforced() {
        let a = paper_like();
        assert!(a.check_admissible().is_ok());
        let mut bad = a.matrix().clone();
        bad.set(0, 1, 1);
        let e = BlockMatrix::new(
            a.space().clone(),
            a.order().to_vec(),
            a.sizes().to_vec(),
            bad,
        )
        .unwrap_err();
        assert!(matches!(e, CkkError::Forbidden { .. }));
        let reversed: Vec<usize> = a.order().iter().rev().copied().collect();
        let flipped = IntMatrix::from_rows(&[
            vec![2, 1, 0, 0, 0],
            vec![1, 2, 0, 0, 0],
            vec![1, 1, 3, 0, 0],
            vec![1, 1, 0, 3, 0],
            vec![0, 0, 0, 0, 3],
        ])
        .transpose();
        let e =
            BlockMatrix::new(a.space().clone(), reversed, vec![2, 1, 1, 1], flipped).unwrap_err();
        assert!(matches!(e, CkkError::NotLowerTriangular { .. }));
    }

    #[test]
    fn one_point_unimodular_case() {
        let space = FiniteSpace::discrete(1);
        let a = BlockMatrix::new(
            space.clone(),
            vec![0],
            vec![1],
            IntMatrix::from_rows(&[vec![2]]),
        )
        .unwrap();
        let k = subquotient_k(&a, space.full());
        assert!(k.k0.is_trivial());
        assert_eq!(k.k1_basis.cols(), 0);
    }

    #[test]
    fn discrete_blocks_decouple() {
        let space = FiniteSpace::discrete(2);
        let m = IntMatrix::from_rows(&[vec![3, 0], vec![0, 5]]);
        let a = BlockMatrix::new(space.clone(), vec![0, 1], vec![1, 1], m).unwrap();
        let whole = subquotient_k(&a, space.full());
        assert_eq!(whole.k0.invariant_factors().to_string(), "Z_2+Z_4");
        let shape = Arc::new(DiagramShape::standard("two", space.clone()));
        let fk = filtered_k(&a, shape.clone()).unwrap();
        let v = |l: &str| shape.parse_vertex(l).unwrap();
        assert_eq!(fk.group(v("1_0")).invariant_factors().to_string(), "Z_2");
        assert_eq!(fk.group(v("2_0")).invariant_factors().to_string(), "Z_4");
    }

    #[test]
    fn whole_space_groups() {
        let a = paper_like();
        let k = subquotient_k(&a, a.space().full());
        assert_eq!(k.k0.invariant_factors().to_string(), "Z_2^2+Z");
        assert_eq!(k.k1_basis.cols(), 1);
    }

    #[test]
    fn filtered_k_is_exact_and_rrz() {
        let a = paper_like();
        let shape = Arc::new(DiagramShape::standard("csp", a.space().clone()));
        let m = filtered_k(&a, shape).unwrap();
        assert!(validate_module(&m).is_valid());
        assert!(check_six_term_exact(&m).unwrap().is_exact());
        assert!(check_rrz_like(&m).holds());
    }

    #[test]
    fn random_matrices_are_admissible() {
        for seed in 0..20 {
            let a = realize_space_random(&FiniteSpace::s21(), seed, RandomMatrixParams::default());
            assert!(
                a.check_admissible().is_ok(),
                "seed {seed}: {:?}",
                a.admissibility_issues()
            );
            assert!(a.matrix().rows() <= 12);
        }
    }
}
