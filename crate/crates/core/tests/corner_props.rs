use std::collections::BTreeMap;
use std::sync::Arc;

use filtk_core::ckk::{filtered_k, realize_space_random, BlockMatrix, RandomMatrixParams};
use filtk_core::diagram::{
    attach_corner_paths, check_exact_r_module, check_rrz_like, check_six_term_exact,
    co_extend_to_corner, extend_from_corner, point_module, reduced_from_full, solve_hom,
    tensor_with_group, validate_module, verify_hom, DiagramModule, DiagramShape, HomSolveOutcome,
};
use filtk_core::fgab::{GroupHom, PresentedGroup};
use filtk_core::finspace::FiniteSpace;
use filtk_core::intlin::IntMatrix;
use proptest::prelude::*;

fn shape_of(space: &FiniteSpace) -> Arc<DiagramShape> {
    Arc::new(DiagramShape::standard("s", space.clone()))
}

fn random_module(shape: &Arc<DiagramShape>, seed: u64) -> DiagramModule {
    let a = realize_space_random(shape.space(), seed, RandomMatrixParams::default());
    filtered_k(&a, shape.clone()).unwrap()
}

/// The projective generated at the smallest open neighbourhood of `x`.
fn projective(shape: &Arc<DiagramShape>, x: usize, degree: u8) -> DiagramModule {
    let corner = shape
        .carrier_vertex_of(shape.space().smallest_open(x), degree)
        .unwrap();
    attach_corner_paths(
        point_module(shape.clone(), x, degree).unwrap(),
        corner,
        false,
    )
    .unwrap()
}

/// The injective cogenerated at the point `x` itself.
fn injective(shape: &Arc<DiagramShape>, x: usize, degree: u8) -> DiagramModule {
    let corner = shape
        .carrier_vertex_of(filtk_core::finspace::PointSet::singleton(x), degree)
        .unwrap();
    attach_corner_paths(
        point_module(shape.clone(), x, degree).unwrap(),
        corner,
        true,
    )
    .unwrap()
}

fn paper_like() -> BlockMatrix {
    let space = FiniteSpace::csp();
    let p = |l: &str| space.point(l).unwrap();
    BlockMatrix::new(
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
    .unwrap()
}

#[test]
fn point_modules_are_exact_with_the_expected_support() {
    for space in [FiniteSpace::csp(), FiniteSpace::s21()] {
        let shape = shape_of(&space);
        for x in 0..space.len() {
            for d in 0..2 {
                let m = point_module(shape.clone(), x, d).unwrap();
                assert!(validate_module(&m).is_valid());
                assert!(check_six_term_exact(&m).unwrap().is_exact());
                assert!(check_rrz_like(&m).holds());
            }
        }
    }
    let shape = shape_of(&FiniteSpace::s21());
    let support = |m: &DiagramModule| -> Vec<String> {
        let mut v: Vec<String> = (0..m.groups().len())
            .filter(|&v| m.group(v).generators() > 0)
            .map(|v| shape.vertex_label(v))
            .collect();
        v.sort();
        v
    };
    let p3 = projective(&shape, shape.space().point("3").unwrap(), 1);
    assert_eq!(
        support(&p3),
        ["1234_1", "123_1", "134_1", "13_1", "234_1", "23_1", "3_1"]
    );
    let p134 = projective(&shape, shape.space().point("1").unwrap(), 1);
    assert_eq!(
        p134.provenance().unwrap().corner,
        shape.parse_vertex("134_1").unwrap()
    );
    assert_eq!(
        support(&p134),
        ["1234_1", "123_1", "124_1", "134_1", "13_1", "14_1", "1_1"]
    );
}

#[test]
fn injectives_read_their_corner() {
    let shape = shape_of(&FiniteSpace::s21());
    let q = injective(&shape, shape.space().point("1").unwrap(), 0);
    assert_eq!(
        q.provenance().unwrap().corner,
        shape.parse_vertex("1_0").unwrap()
    );
    let m = random_module(&shape, 7);
    let corner = shape.parse_vertex("1_0").unwrap();
    let g = m.group(corner).clone();
    let l = tensor_with_group(&q, &g);
    let h = co_extend_to_corner(&m, &l, &IntMatrix::identity(g.generators())).unwrap();
    assert!(verify_hom(&h).holds());
}

fn zeroed(m: &DiagramModule, a: usize) -> DiagramModule {
    let mut maps = m.maps().to_vec();
    maps[a] = IntMatrix::zeros(maps[a].rows(), maps[a].cols());
    DiagramModule::new(m.shape().clone(), m.variance(), m.groups().to_vec(), maps).unwrap()
}

#[test]
fn corrupted_maps_are_caught() {
    let a = paper_like();
    let m = filtered_k(&a, shape_of(a.space())).unwrap();
    let mut mutated = 0;
    for arrow in 0..m.maps().len() {
        if m.arrow_hom(arrow).is_zero() {
            continue;
        }
        mutated += 1;
        let bad = zeroed(&m, arrow);
        let caught =
            !validate_module(&bad).is_valid() || !check_six_term_exact(&bad).unwrap().is_exact();
        assert!(
            caught,
            "zeroing {} went unnoticed",
            m.shape().arrow_label(arrow)
        );
    }
    assert!(mutated > 10);
}

#[test]
fn corrupted_reduced_data_is_reported() {
    let a = paper_like();
    let m = filtered_k(&a, shape_of(a.space())).unwrap();
    let r = reduced_from_full(&m).unwrap();
    assert!(check_exact_r_module(&r).unwrap().holds());
    let x = a.space().point("1").unwrap();
    let mut bad = r.clone();
    let b = &bad.points[x].boundary;
    bad.points[x].boundary = GroupHom::zero(b.dom(), b.cod());
    let report = check_exact_r_module(&bad).unwrap();
    assert!(!report.holds());
    assert!(
        report.failures.iter().any(|f| f.contains("point 1")),
        "{:?}",
        report.failures
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn corner_extension_is_unique(seed in any::<u64>(), x in 0usize..4, degree in 0u8..2) {
        let shape = shape_of(&FiniteSpace::s21());
        let m = random_module(&shape, seed);
        let p = projective(&shape, x, degree);
        let corner = p.provenance().unwrap().corner;
        let g = m.group(corner).clone();
        let k = tensor_with_group(&p, &g);
        let h = extend_from_corner(&k, &m, &IntMatrix::identity(g.generators())).unwrap();
        prop_assert!(verify_hom(&h).holds());
        // Any other extension differs by a natural map vanishing at the corner.
        let mut pins = BTreeMap::new();
        pins.insert(corner, IntMatrix::zeros(g.generators(), g.generators()));
        match solve_hom(&k, &m, &pins).unwrap() {
            HomSolveOutcome::Solved { hom, forced } => {
                prop_assert!(forced.iter().all(|f| *f));
                for v in 0..m.groups().len() {
                    prop_assert!(hom.component(v).is_zero());
                }
            }
            HomSolveOutcome::Infeasible { .. } => prop_assert!(false, "the zero map always exists"),
        }
    }

    #[test]
    fn corner_extensions_compose(seed in any::<u64>(), x in 0usize..4, scale in -3i64..=3, coords in prop::collection::vec(-4i64..=4, 8)) {
        let shape = shape_of(&FiniteSpace::s21());
        let m = random_module(&shape, seed);
        let p = projective(&shape, x, 1);
        let corner = p.provenance().unwrap().corner;
        let n = m.group(corner).generators();
        let v = IntMatrix::column(&coords[..n.min(coords.len())]);
        prop_assume!(v.rows() == n);
        let inner = extend_from_corner(&p, &p, &IntMatrix::from_rows(&[vec![scale]])).unwrap();
        let outer = extend_from_corner(&p, &m, &v).unwrap();
        let both = outer.compose(&inner).unwrap();
        prop_assert!(verify_hom(&both).holds());
        let direct = extend_from_corner(&p, &m, &v.scale(&scale.into())).unwrap();
        for w in 0..m.groups().len() {
            prop_assert!(both.component(w).equals(&direct.component(w)));
        }
    }

    #[test]
    fn tensoring_with_free_groups_multiplies(seed in any::<u64>(), k in 0usize..4) {
        let shape = shape_of(&FiniteSpace::csp());
        let m = random_module(&shape, seed);
        let t = tensor_with_group(&m, &PresentedGroup::free(k));
        prop_assert!(validate_module(&t).is_valid());
        for (a, b) in t.groups().iter().zip(m.groups()) {
            let mut want = filtk_core::fgab::InvariantFactors::new(0, vec![]);
            for _ in 0..k {
                want = want.merge(&b.invariant_factors());
            }
            prop_assert_eq!(a.invariant_factors(), want);
        }
    }

    #[test]
    fn projectives_tensored_with_groups_stay_exact(x in 0usize..4, degree in 0u8..2, n in 0i64..8, s21 in any::<bool>()) {
        let space = if s21 { FiniteSpace::s21() } else { FiniteSpace::csp() };
        let shape = shape_of(&space);
        let t = tensor_with_group(&point_module(shape, x, degree).unwrap(), &PresentedGroup::cyclic(n));
        prop_assert!(validate_module(&t).is_valid());
        prop_assert!(check_six_term_exact(&t).unwrap().is_exact());
    }
}
