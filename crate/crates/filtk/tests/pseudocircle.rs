use filtk::caselib::{
    injective_at, projective_at, support_table_module, verify_pseudocircle_steps, CaseError,
};
use filtk::ckk::{filtered_k, realize_space_random, RandomMatrixParams};
use filtk::diagram::{
    check_six_term_exact, co_extend_to_corner, dualize, point_module, tensor_with_group,
    DiagramModule, Variance,
};
use filtk::fgab::PresentedGroup;
use filtk::finspace::FiniteSpace;
use filtk::intlin::IntMatrix;
use filtk::resources;
use proptest::prelude::*;

fn random_s21(seed: u64) -> DiagramModule {
    let a = realize_space_random(&FiniteSpace::s21(), seed, RandomMatrixParams::default());
    filtered_k(&a, resources::s21_shape()).unwrap()
}

#[test]
fn tabulated_projective_and_injective_are_dual() {
    let shape = resources::s21_shape();
    let plan = resources::s21_tables();
    let sp3 = support_table_module(&shape, &plan.tables["SP_3"]).unwrap();
    let sq = support_table_module(&shape, &plan.tables["SQ_123"]).unwrap();
    assert_eq!(sq.variance(), Variance::Contravariant);
    assert_eq!(dualize(&sq).unwrap(), sp3);
    let three = shape.space().point("3").unwrap();
    let pm = point_module(shape.clone(), three, 1).unwrap();
    assert_eq!(pm.groups(), sp3.groups());
    assert_eq!(pm.maps(), sp3.maps());
    let p = projective_at(&shape, three, 1).unwrap();
    assert_eq!(
        p.provenance().unwrap().corner,
        shape.parse_vertex("3_1").unwrap()
    );
}

#[test]
fn injectives_at_the_epi_corners_receive_maps() {
    let shape = resources::s21_shape();
    let m = random_s21(11);
    for (corner, point) in [("123_0", "3"), ("124_0", "4")] {
        let c = shape.parse_vertex(corner).unwrap();
        let x = shape.space().point(point).unwrap();
        let q = injective_at(&shape, x, c).unwrap();
        assert!(check_six_term_exact(&q).unwrap().is_exact());
        let g = m.group(c).clone();
        let id = IntMatrix::identity(g.generators());
        let h = co_extend_to_corner(&m, &tensor_with_group(&q, &g), &id).unwrap();
        assert!(h.component(c).is_isomorphism());
    }
}

#[test]
fn zero_module_passes() {
    let z = DiagramModule::zero(resources::s21_shape(), Variance::Covariant);
    let r = verify_pseudocircle_steps(&z).unwrap();
    assert!(r.passed);
    assert!(r.steps.iter().all(|s| s.corner_group == "0"));
}

#[test]
fn non_rrz_modules_are_rejected() {
    let shape = resources::s21_shape();
    let from = shape.parse_vertex("1_0").unwrap();
    let to = shape.parse_vertex("3_1").unwrap();
    let groups: Vec<PresentedGroup> = (0..shape.vertices().len())
        .map(|v| PresentedGroup::free(usize::from(v == from || v == to)))
        .collect();
    let maps = shape
        .arrows()
        .iter()
        .map(|a| {
            let (r, c) = (groups[a.dst].generators(), groups[a.src].generators());
            if a.src == from && a.dst == to {
                IntMatrix::identity(1)
            } else {
                IntMatrix::zeros(r, c)
            }
        })
        .collect();
    let m = DiagramModule::new(shape.clone(), Variance::Covariant, groups, maps).unwrap();
    match verify_pseudocircle_steps(&m) {
        Err(CaseError::Precondition(why)) => {
            assert!(
                why.iter()
                    .any(|w| w.starts_with("d:") && w.contains("not zero")),
                "{why:?}"
            )
        }
        other => panic!("expected a precondition failure, got {other:?}"),
    }
}

#[test]
fn csp_modules_are_rejected() {
    let m = filtered_k(&resources::csp_matrix(), resources::csp_shape()).unwrap();
    assert!(matches!(
        verify_pseudocircle_steps(&m),
        Err(CaseError::Precondition(_))
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn random_realizations_reduce_to_zero(seed in any::<u64>()) {
        let r = verify_pseudocircle_steps(&random_s21(seed)).unwrap();
        prop_assert!(r.passed, "{:#?}", r);
        prop_assert!(r.steps.iter().all(|s| s.other_failures.is_empty()));
        prop_assert!(r.steps.iter().flat_map(|s| &s.identities).all(|i| i.holds));
    }
}
