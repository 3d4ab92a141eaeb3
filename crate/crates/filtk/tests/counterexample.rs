use std::collections::BTreeMap;

use filtk::caselib::{
    verify_counterexample, verify_counterexample_with, CounterexampleOptions, CspCase,
};
use filtk::ckk::{filtered_k, realize_space_random, RandomMatrixParams};
use filtk::diagram::{
    check_six_term_exact, reduced_from_full, solve_hom, suspend, tensor_with_group, unit_group,
    HomSolveOutcome,
};
use filtk::fgab::PresentedGroup;
use filtk::finspace::FiniteSpace;
use filtk::intlin::IntMatrix;
use filtk::resources;
use proptest::prelude::*;

#[test]
fn automorphism_does_not_lift() {
    let r = verify_counterexample(CounterexampleOptions::default()).unwrap();
    assert!(r.passed, "{:#?}", r.stages);
    assert_eq!(r.stages.len(), 5);
    assert_eq!(r.lifts, Some(false));
    let c = r.certificate.expect("certificate");
    assert!(c.matches_transcription);
    assert!(c.unsolvable_for_any_integer_matrix);
    assert_eq!(c.equation.as_deref(), Some("B(0,2,0)ᵗ = (1,2,0)ᵗ"));
    assert_eq!(c.generator, Some(1));
    assert!(
        c.arrow.as_deref().is_some_and(|a| a.starts_with("c:")),
        "{:?}",
        c.arrow
    );
}

#[test]
fn identity_lifts() {
    let r = verify_counterexample(CounterexampleOptions {
        alpha_identity: true,
        ..Default::default()
    })
    .unwrap();
    assert!(r.passed);
    assert_eq!(r.lifts, Some(true));
    assert!(r.certificate.is_none());
}

#[test]
fn mirrored_labels_give_the_same_verdict() {
    // The space and the matrix are both symmetric under exchanging 2 and 3.
    let r = verify_counterexample(CounterexampleOptions {
        swap_middle_blocks: true,
        ..Default::default()
    })
    .unwrap();
    assert!(r.passed);
    assert_eq!(r.lifts, Some(false));
}

#[test]
fn corrupted_table_fails_at_the_vertex() {
    let mut case = CspCase::embedded();
    let v = case.shape.parse_vertex("24_0").unwrap();
    case.table_m.groups[v] = PresentedGroup::cyclic(4);
    case.table_m.literals[v] = "Z_4".into();
    let r = verify_counterexample_with(&case, CounterexampleOptions::default()).unwrap();
    assert!(!r.passed);
    assert_eq!(r.stages.len(), 1);
    assert!(
        r.stages[0]
            .details
            .iter()
            .any(|d| d.starts_with("FAIL 24_0")),
        "{:?}",
        r.stages[0].details
    );
}

#[test]
fn dropping_the_top_component_breaks_naturality() {
    let mut case = CspCase::embedded();
    case.alpha.components.remove("1234_1");
    let r = verify_counterexample_with(&case, CounterexampleOptions::default()).unwrap();
    assert!(!r.passed);
    assert_eq!(r.stages.len(), 3);
    let d = &r.stages[2].details;
    assert!(
        d.iter()
            .any(|l| l.starts_with("FAIL") && l.contains("r:1234_1>123_1")),
        "{d:?}"
    );
}

#[test]
fn p_is_exact_after_suspension_and_torsion() {
    let p = resources::csp_table_p().to_module().unwrap();
    let sp = suspend(&p).unwrap();
    assert!(check_six_term_exact(&sp).unwrap().is_exact());
    let shape = p.shape();
    for v in 0..p.groups().len() {
        let w = shape.degree_partner(v).unwrap();
        assert_eq!(
            sp.group(w).invariant_factors(),
            p.group(v).invariant_factors()
        );
    }
    let p2 = tensor_with_group(&p, &PresentedGroup::cyclic(2));
    assert!(check_six_term_exact(&p2).unwrap().is_exact());
}

#[test]
fn reduced_invariants_of_the_tables() {
    let m = filtered_k(&resources::csp_matrix(), resources::csp_shape()).unwrap();
    let r = reduced_from_full(&m).unwrap();
    let space = FiniteSpace::csp();
    let k1: Vec<String> = ["1", "2", "3", "4"]
        .iter()
        .map(|x| {
            r.points[space.point(x).unwrap()]
                .k1_point
                .invariant_factors()
                .to_string()
        })
        .collect();
    assert_eq!(k1, ["Z", "0", "0", "0"]);
    assert_eq!(
        unit_group(&r).unwrap().invariant_factors().to_string(),
        "Z_2^2+Z"
    );

    let p = resources::csp_table_p().to_module().unwrap();
    let rp = reduced_from_full(&p).unwrap();
    assert_eq!(
        rp.points[space.point("4").unwrap()]
            .k0_neighbourhood
            .invariant_factors()
            .to_string(),
        "Z"
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Homomorphisms out of `P` are determined by, and exist for, any value at `234_1`.
    #[test]
    fn p_represents_evaluation_at_234(seed in any::<u64>(), coords in prop::collection::vec(-5i64..=5, 24)) {
        let p = resources::csp_table_p().to_module().unwrap();
        let a = realize_space_random(&FiniteSpace::csp(), seed, RandomMatrixParams::default());
        let m = filtered_k(&a, resources::csp_shape()).unwrap();
        let v = p.shape().parse_vertex("234_1").unwrap();
        let n = m.group(v).generators();
        let x = IntMatrix::column(&coords[..n]);
        let pins = BTreeMap::from([(v, x)]);
        match solve_hom(&p, &m, &pins).unwrap() {
            HomSolveOutcome::Solved { forced, .. } => prop_assert!(forced.iter().all(|f| *f)),
            HomSolveOutcome::Infeasible { .. } => prop_assert!(false, "no extension from 234_1"),
        }
    }
}
