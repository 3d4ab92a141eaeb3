//! Finite abelian groups checked by enumerating their elements.
//!
//! Each test group is `⊕ Z/n_i` in canonical coordinates, handed to the
//! library through a random unimodular change of generators `W` and of
//! relations `V`: relations `W · diag(n) · V`, and an element with
//! canonical coordinates `c` is `W c` in the presentation.
#![allow(clippy::needless_range_loop)]

use std::collections::BTreeSet;

use filtk_core::fgab::{
    homology, is_exact_at, GroupHom, HomEquation, HomOutcome, HomSystem, HomTerm, HomUnknown,
    InvariantFactors, PresentedGroup,
};
use filtk_core::intlin::IntMatrix;
use filtk_core::BigInt;
use proptest::prelude::*;

type Mat = Vec<Vec<i64>>;

fn identity(n: usize) -> Mat {
    (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect()
}

fn mul(a: &Mat, b: &Mat, inner: usize) -> Mat {
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|r| {
            (0..cols)
                .map(|j| (0..inner).map(|k| r[k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

fn to_int(m: &Mat, cols: usize) -> IntMatrix {
    IntMatrix::from_rows_with_cols(cols, m)
}

/// A unimodular matrix and its inverse from a list of elementary moves.
fn unimodular(n: usize, moves: &[(usize, usize, i64)]) -> (Mat, Mat) {
    let (mut w, mut winv) = (identity(n), identity(n));
    for &(i, j, c) in moves {
        let (i, j) = (i % n.max(1), j % n.max(1));
        if n == 0 || i == j {
            continue;
        }
        // w <- (I + c e_ij) w ; winv <- winv (I - c e_ij)
        for k in 0..n {
            w[i][k] += c * w[j][k];
        }
        for r in 0..n {
            winv[r][j] -= c * winv[r][i];
        }
    }
    (w, winv)
}

#[derive(Clone, Debug)]
struct TestGroup {
    orders: Vec<i64>,
    w: Mat,
    winv: Mat,
    group: PresentedGroup,
}

impl TestGroup {
    fn new(
        orders: Vec<i64>,
        gen_moves: &[(usize, usize, i64)],
        rel_moves: &[(usize, usize, i64)],
    ) -> Self {
        let n = orders.len();
        let (w, winv) = unimodular(n, gen_moves);
        let (v, _) = unimodular(n, rel_moves);
        let d: Mat = (0..n)
            .map(|i| (0..n).map(|j| if i == j { orders[i] } else { 0 }).collect())
            .collect();
        let rel = mul(&mul(&w, &d, n), &v, n);
        TestGroup {
            orders,
            w,
            winv,
            group: PresentedGroup::new(to_int(&rel, n)),
        }
    }

    fn size(&self) -> usize {
        self.orders.len()
    }

    fn elements(&self) -> Vec<Vec<i64>> {
        let mut out = vec![vec![]];
        for &n in &self.orders {
            out = out
                .into_iter()
                .flat_map(|p| (0..n).map(move |x| [p.clone(), vec![x]].concat()))
                .collect();
        }
        out
    }

    fn reduce(&self, c: &[i64]) -> Vec<i64> {
        c.iter()
            .zip(&self.orders)
            .map(|(x, n)| x.rem_euclid(*n))
            .collect()
    }

    fn order(&self) -> usize {
        self.orders.iter().product::<i64>() as usize
    }

    /// Invariant factors from prime-power decomposition, without Smith form.
    fn expected_invariants(&self) -> InvariantFactors {
        let mut powers: Vec<(i64, Vec<i64>)> = Vec::new();
        for &n in &self.orders {
            let mut m = n;
            let mut p = 2;
            while m > 1 {
                let mut q = 1;
                while m % p == 0 {
                    m /= p;
                    q *= p;
                }
                if q > 1 {
                    match powers.iter_mut().find(|(pp, _)| *pp == p) {
                        Some((_, v)) => v.push(q),
                        None => powers.push((p, vec![q])),
                    }
                }
                p += 1;
            }
        }
        for (_, v) in powers.iter_mut() {
            v.sort_unstable_by(|a, b| b.cmp(a));
        }
        let len = powers.iter().map(|(_, v)| v.len()).max().unwrap_or(0);
        let mut factors: Vec<i64> = (0..len)
            .map(|k| {
                powers
                    .iter()
                    .map(|(_, v)| v.get(k).copied().unwrap_or(1))
                    .product()
            })
            .collect();
        factors.reverse();
        InvariantFactors::new(0, factors.into_iter().map(BigInt::from).collect())
    }
}

/// A homomorphism given in canonical coordinates, made well defined by
/// scaling each entry into the allowed multiples.
#[derive(Clone, Debug)]
struct TestHom {
    canonical: Mat,
}

impl TestHom {
    fn new(dom: &TestGroup, cod: &TestGroup, raw: &[i64]) -> Self {
        let mut k = 0;
        let canonical = (0..cod.size())
            .map(|i| {
                (0..dom.size())
                    .map(|j| {
                        let n = cod.orders[i];
                        let step = n / gcd(n, dom.orders[j]);
                        let x = raw.get(k).copied().unwrap_or(0);
                        k += 1;
                        (x * step).rem_euclid(n)
                    })
                    .collect()
            })
            .collect();
        TestHom { canonical }
    }

    fn apply(&self, cod: &TestGroup, c: &[i64]) -> Vec<i64> {
        let v: Vec<i64> = self
            .canonical
            .iter()
            .map(|r| r.iter().zip(c).map(|(a, b)| a * b).sum())
            .collect();
        cod.reduce(&v)
    }

    fn presented(&self, dom: &TestGroup, cod: &TestGroup) -> GroupHom {
        let m = mul(
            &mul(&cod.w, &self.canonical, cod.size()),
            &dom.winv,
            dom.size(),
        );
        GroupHom::new(dom.group.clone(), cod.group.clone(), to_int(&m, dom.size())).unwrap()
    }

    fn image(&self, dom: &TestGroup, cod: &TestGroup) -> BTreeSet<Vec<i64>> {
        dom.elements().iter().map(|c| self.apply(cod, c)).collect()
    }

    fn kernel(&self, dom: &TestGroup, cod: &TestGroup) -> BTreeSet<Vec<i64>> {
        dom.elements()
            .into_iter()
            .filter(|c| self.apply(cod, c).iter().all(|x| *x == 0))
            .collect()
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn moves() -> impl Strategy<Value = Vec<(usize, usize, i64)>> {
    prop::collection::vec((0usize..4, 0usize..4, -2i64..=2), 0..6)
}

fn group() -> impl Strategy<Value = TestGroup> {
    (
        prop::collection::vec(prop::sample::select(vec![1i64, 2, 3, 4, 6]), 1..=3),
        moves(),
        moves(),
    )
        .prop_filter("order at most 200", |(o, _, _)| {
            o.iter().product::<i64>() <= 200
        })
        .prop_map(|(o, g, r)| TestGroup::new(o, &g, &r))
}

fn triple() -> impl Strategy<Value = (TestGroup, TestGroup, TestGroup, Vec<i64>, Vec<i64>)> {
    (
        group(),
        group(),
        group(),
        prop::collection::vec(-3i64..=3, 9),
        prop::collection::vec(-3i64..=3, 9),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(250))]

    #[test]
    fn invariants_survive_presentation_changes(g in group()) {
        prop_assert_eq!(g.group.invariant_factors(), g.expected_invariants());
    }

    #[test]
    fn direct_sum_merges_invariants(a in group(), b in group()) {
        let sum = PresentedGroup::direct_sum(&[&a.group, &b.group]).group;
        let both = TestGroup::new([a.orders.clone(), b.orders.clone()].concat(), &[], &[]);
        prop_assert_eq!(sum.invariant_factors(), both.expected_invariants());
        prop_assert_eq!(a.group.invariant_factors().merge(&b.group.invariant_factors()), both.expected_invariants());
    }

    #[test]
    fn kernel_image_cokernel_orders((a, b, _c, rf, _rg) in triple()) {
        let f = TestHom::new(&a, &b, &rf);
        let h = f.presented(&a, &b);
        prop_assert!(h.is_well_defined());
        let im = f.image(&a, &b).len();
        let ker = f.kernel(&a, &b).len();
        let order = |g: &PresentedGroup| g.invariant_factors().order().map(|o| o.to_string());
        prop_assert_eq!(order(&h.image().group), Some(im.to_string()));
        prop_assert_eq!(order(&h.kernel().group), Some(ker.to_string()));
        prop_assert_eq!(order(&h.cokernel().group), Some((b.order() / im).to_string()));
        prop_assert_eq!(h.is_injective(), ker == 1);
        prop_assert_eq!(h.is_surjective(), im == b.order());
    }

    #[test]
    fn exactness_matches_enumeration((a, b, c, rf, rg) in triple(), split in any::<bool>()) {
        prop_assume!(!split || a.order() * c.order() <= 200);
        let (a, b, c, f, g) = if split {
            // Z/p -> Z/p + Z/q -> Z/q, dressed with the random presentations.
            let a2 = TestGroup::new(a.orders.clone(), &[], &[]);
            let b2 = TestGroup::new([a.orders.clone(), c.orders.clone()].concat(), &[(0, 1, rf[0])], &[(1, 0, rg[0])]);
            let c2 = c.clone();
            let (na, nc) = (a.size(), c.size());
            let f = TestHom { canonical: (0..na + nc).map(|i| (0..na).map(|j| i64::from(i == j)).collect()).collect() };
            let g = TestHom { canonical: (0..nc).map(|i| (0..na + nc).map(|j| i64::from(j == na + i)).collect()).collect() };
            (a2, b2, c2, f, g)
        } else {
            let f = TestHom::new(&a, &b, &rf);
            let g = TestHom::new(&b, &c, &rg);
            (a, b, c, f, g)
        };
        let im = f.image(&a, &b);
        let ker = g.kernel(&b, &c);
        let complex = im.is_subset(&ker);
        let exact = im == ker;
        let (fp, gp) = (f.presented(&a, &b), g.presented(&b, &c));
        prop_assert_eq!(is_exact_at(&fp, &gp).unwrap(), exact);
        if complex {
            let h = homology(&fp, &gp).unwrap();
            prop_assert_eq!(h.invariant_factors().order().map(|o| o.to_string()), Some((ker.len() / im.len()).to_string()));
        }
        if split {
            prop_assert!(exact);
        }
    }

    #[test]
    fn hom_solving_agrees_with_search((a, b, c, rf, rg) in triple(), shift in any::<bool>()) {
        // Unknown X: a -> b with g X = r, where r is g X0 or a perturbation of it.
        let x0 = TestHom::new(&a, &b, &rf);
        let g = TestHom::new(&b, &c, &rg);
        let mut r = TestHom { canonical: mul(&g.canonical, &x0.canonical, b.size()) };
        if shift {
            let bump = TestHom::new(&a, &c, &[1, 0, 1, 1, 0, 0, 1, 0, 1]);
            for (row, brow) in r.canonical.iter_mut().zip(&bump.canonical) {
                for (x, y) in row.iter_mut().zip(brow) {
                    *x += y;
                }
            }
        }
        let gp = g.presented(&b, &c);
        let rp = r.presented(&a, &c);
        let system = HomSystem {
            unknowns: vec![HomUnknown { dom: a.group.clone(), cod: b.group.clone() }],
            equations: vec![HomEquation {
                target: c.group.clone(),
                terms: vec![HomTerm { left: gp.matrix().clone(), unknown: 0, right: IntMatrix::identity(a.size()) }],
                rhs: rp.matrix().clone(),
            }],
        };
        // Exhaustive search over all homomorphisms a -> b in canonical coordinates.
        let choices: Vec<i64> = (0..b.size()).flat_map(|i| (0..a.size()).map(move |j| (i, j))).map(|(i, j)| gcd(b.orders[i], a.orders[j])).collect();
        let mut found = false;
        let mut idx = vec![0i64; choices.len()];
        'search: loop {
            let x = TestHom::new(&a, &b, &idx);
            let ok = a.elements().iter().all(|e| g.apply(&c, &x.apply(&b, e)) == r.apply(&c, e));
            if ok { found = true; break 'search; }
            let mut k = 0;
            loop {
                if k == idx.len() { break 'search; }
                idx[k] += 1;
                if idx[k] < choices[k] { break; }
                idx[k] = 0;
                k += 1;
            }
        }
        match system.solve().unwrap() {
            HomOutcome::Solved(sol) => {
                prop_assert!(found);
                let xh = GroupHom::new(a.group.clone(), b.group.clone(), sol.values[0].clone()).unwrap();
                prop_assert!(xh.is_well_defined());
                let lhs = gp.compose(&xh).unwrap();
                prop_assert!(lhs.equals(&rp));
            }
            HomOutcome::Infeasible(_) => prop_assert!(!found),
        }
    }
}
