use std::collections::BTreeMap;
use std::sync::Arc;

use filtk_core::ckk::{filtered_k, realize_space_random, subquotient_k, RandomMatrixParams};
use filtk_core::diagram::{
    check_exact_r_module, check_rrz_like, check_six_term_exact, dualize, reduced_from_full,
    solve_hom, suspend, tensor_with_group, unit_group, validate_module, DiagramHom, DiagramModule,
    DiagramShape, HomSolveOutcome, Variance,
};
use filtk_core::fgab::PresentedGroup;
use filtk_core::finspace::{FiniteSpace, PointSet};
use filtk_core::intlin::IntMatrix;
use proptest::prelude::*;

/// Locally closed connected subsets found by trying every open/closed
/// intersection and every split into two relatively open pieces.
fn brute_lc_connected(space: &FiniteSpace) -> Vec<PointSet> {
    let n = space.len();
    let full = (1u64 << n) - 1;
    let opens: Vec<u64> = space.opens().iter().map(|o| o.0).collect();
    let closed: Vec<u64> = opens.iter().map(|o| full & !o).collect();
    let mut out = Vec::new();
    for s in 1..=full {
        let lc = opens.iter().any(|u| closed.iter().any(|c| u & c == s));
        let split = opens.iter().any(|u| {
            let a = u & s;
            a != 0 && a != s && opens.iter().any(|v| v & s == s & !a)
        });
        if lc && !split {
            out.push(PointSet(s));
        }
    }
    out
}

fn brute_pairs(space: &FiniteSpace) -> Vec<(PointSet, PointSet)> {
    let lc = brute_lc_connected(space);
    let opens: Vec<u64> = space.opens().iter().map(|o| o.0).collect();
    let mut out = Vec::new();
    for &y in &lc {
        for &u in &lc {
            let relatively_open = opens.iter().any(|o| o & y.0 == u.0);
            let q = PointSet(y.0 & !u.0);
            if u != y && u.0 & !y.0 == 0 && relatively_open && lc.contains(&q) {
                out.push((y, u));
            }
        }
    }
    out
}

#[test]
fn standard_shapes_match_enumeration() {
    for (space, carriers, pairs) in [(FiniteSpace::csp(), 11, 12), (FiniteSpace::s21(), 13, 16)] {
        let shape = DiagramShape::standard("s", space.clone());
        let lc = brute_lc_connected(&space);
        assert_eq!(lc.len(), carriers);
        assert_eq!(shape.vertices().len(), 2 * carriers);
        let mut want = brute_pairs(&space);
        let mut got: Vec<_> = shape
            .sequences()
            .iter()
            .map(|s| (s.whole, s.ideal))
            .collect();
        want.sort();
        got.sort();
        assert_eq!(got, want);
        assert_eq!(got.len(), pairs);
        assert_eq!(shape.arrows().len(), 6 * pairs);
    }
}

#[test]
fn arrow_labels_round_trip() {
    let shape = DiagramShape::standard("csp", FiniteSpace::csp());
    for a in 0..shape.arrows().len() {
        assert_eq!(shape.parse_arrow(&shape.arrow_label(a)).unwrap(), a);
    }
    assert_eq!(
        shape.parse_arrow("r:1234_1>321_1"),
        shape.parse_arrow("r:1234_1>123_1")
    );
    assert!(shape.parse_arrow("r:1234_1>14_1").is_err());
}

fn space_strategy() -> impl Strategy<Value = FiniteSpace> {
    prop_oneof![
        Just(FiniteSpace::csp()),
        Just(FiniteSpace::s21()),
        Just(FiniteSpace::chain(3))
    ]
}

fn random_module(space: &FiniteSpace, seed: u64) -> DiagramModule {
    let shape = Arc::new(DiagramShape::standard("s", space.clone()));
    let a = realize_space_random(space, seed, RandomMatrixParams::default());
    filtered_k(&a, shape).unwrap()
}

fn free_module(space: &FiniteSpace, ranks: &[usize], entries: &[i64]) -> DiagramModule {
    let shape = Arc::new(DiagramShape::standard("s", space.clone()));
    let groups: Vec<PresentedGroup> = (0..shape.vertices().len())
        .map(|v| PresentedGroup::free(ranks[v % ranks.len()]))
        .collect();
    let mut k = 0;
    let maps = shape
        .arrows()
        .iter()
        .map(|ar| {
            let (r, c) = (groups[ar.dst].generators(), groups[ar.src].generators());
            let mut m = IntMatrix::zeros(r, c);
            for i in 0..r {
                for j in 0..c {
                    m.set(i, j, entries[k % entries.len()]);
                    k += 1;
                }
            }
            m
        })
        .collect();
    DiagramModule::new(shape, Variance::Covariant, groups, maps).unwrap()
}

proptest! {
    // Structural suites: at least 100 seeded cases each.
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn suspension_is_an_involution_preserving_exactness(space in space_strategy(), seed in any::<u64>()) {
        let m = random_module(&space, seed);
        let s = suspend(&m).unwrap();
        prop_assert!(check_six_term_exact(&s).unwrap().is_exact());
        prop_assert_eq!(suspend(&s).unwrap(), m);
    }

    #[test]
    fn tensoring_with_z_changes_nothing(space in space_strategy(), seed in any::<u64>()) {
        let m = random_module(&space, seed);
        let t = tensor_with_group(&m, &PresentedGroup::free(1));
        prop_assert_eq!(t.maps(), m.maps());
        for (a, b) in t.groups().iter().zip(m.groups()) {
            prop_assert_eq!(a.invariant_factors(), b.invariant_factors());
        }
    }

    #[test]
    fn double_dual_is_identity(ranks in prop::collection::vec(0usize..3, 1..4), entries in prop::collection::vec(-3i64..=3, 1..20)) {
        let m = free_module(&FiniteSpace::csp(), &ranks, &entries);
        let d = dualize(&m).unwrap();
        prop_assert_eq!(d.variance(), Variance::Contravariant);
        prop_assert_eq!(dualize(&d).unwrap(), m);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn filtered_k_is_exact_and_rrz(space in space_strategy(), seed in any::<u64>()) {
        let m = random_module(&space, seed);
        prop_assert!(validate_module(&m).is_valid());
        prop_assert!(check_six_term_exact(&m).unwrap().is_exact());
        prop_assert!(check_rrz_like(&m).holds());
    }

    #[test]
    fn tensoring_with_finite_cyclic_stays_valid(seed in any::<u64>(), n in 2i64..6) {
        let m = random_module(&FiniteSpace::csp(), seed);
        let t = tensor_with_group(&m, &PresentedGroup::cyclic(n));
        prop_assert!(validate_module(&t).is_valid());
    }

    #[test]
    fn reduced_invariant_is_exact_and_glues_to_k0(space in prop_oneof![Just(FiniteSpace::csp()), Just(FiniteSpace::s21())], seed in any::<u64>()) {
        let a = realize_space_random(&space, seed, RandomMatrixParams::default());
        let shape = Arc::new(DiagramShape::standard("s", space.clone()));
        let m = filtered_k(&a, shape).unwrap();
        let r = reduced_from_full(&m).unwrap();
        let report = check_exact_r_module(&r).unwrap();
        prop_assert!(report.holds(), "{:?}", report.failures);
        let whole = subquotient_k(&a, space.full());
        prop_assert_eq!(unit_group(&r).unwrap().invariant_factors(), whole.k0.invariant_factors());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn identity_is_the_forced_extension_of_its_pins(seed in any::<u64>()) {
        let m = random_module(&FiniteSpace::csp(), seed);
        let pins: BTreeMap<usize, IntMatrix> =
            (0..m.groups().len()).step_by(3).map(|v| (v, IntMatrix::identity(m.group(v).generators()))).collect();
        match solve_hom(&m, &m, &pins).unwrap() {
            HomSolveOutcome::Solved { hom, .. } => {
                prop_assert!(filtk_core::diagram::verify_hom(&hom).holds());
            }
            HomSolveOutcome::Infeasible { .. } => prop_assert!(false, "identity pins must extend"),
        }
        let id = DiagramHom::identity(&m);
        prop_assert!(id.is_isomorphism());
        prop_assert!(id.cokernel().is_zero());
        prop_assert!(id.kernel().unwrap().src().is_zero());
    }
}

#[test]
fn wrong_pins_are_reported_with_an_arrow() {
    let space = FiniteSpace::csp();
    let p = |l: &str| space.point(l).unwrap();
    let a = filtk_core::ckk::BlockMatrix::new(
        space.clone(),
        vec![p("4"), p("2"), p("3"), p("1")],
        vec![1, 1, 1, 2],
        IntMatrix::from_rows(&[
            vec![3, 0, 0, 0, 0],
            vec![2, 3, 0, 0, 0],
            vec![2, 0, 3, 0, 0],
            vec![2, 1, 1, 2, 1],
            vec![0, 0, 0, 1, 2],
        ]),
    )
    .unwrap();
    let m = filtered_k(&a, Arc::new(DiagramShape::standard("csp", space.clone()))).unwrap();
    let shape = m.shape().clone();
    let v = shape.parse_vertex("1234_1").unwrap();
    let n = m.group(v).generators();
    assert!(n > 0);
    let mut pins = BTreeMap::new();
    pins.insert(v, IntMatrix::identity(n));
    for w in 0..m.groups().len() {
        if w != v {
            let k = m.group(w).generators();
            pins.insert(w, IntMatrix::zeros(k, k));
        }
    }
    match solve_hom(&m, &m, &pins).unwrap() {
        HomSolveOutcome::Infeasible { arrow, .. } => {
            let a = arrow.expect("a single square fails");
            let ar = &shape.arrows()[a];
            assert!(ar.src == v || ar.dst == v);
        }
        HomSolveOutcome::Solved { .. } => panic!("identity next to zero cannot be natural"),
    }
}
