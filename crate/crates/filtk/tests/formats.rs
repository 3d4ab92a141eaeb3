use filtk::ckk::{filtered_k, realize_space_random, RandomMatrixParams};
use filtk::fgab::{InvariantFactors, PresentedGroup};
use filtk::finspace::FiniteSpace;
use filtk::formats::{
    block_matrix_from_dto, block_matrix_to_dto, dump_module, group_literal, load_module,
    parse_group_literal, parse_json, shape_from_dto, shape_to_dto, to_json_pretty, BlockMatrixDto,
    ShapeDto,
};
use filtk::intlin::IntMatrix;
use filtk::resources;
use filtk::BigInt;
use proptest::prelude::*;

fn random_module(s21: bool, seed: u64) -> filtk::diagram::DiagramModule {
    let (space, shape) = if s21 {
        (FiniteSpace::s21(), resources::s21_shape())
    } else {
        (FiniteSpace::csp(), resources::csp_shape())
    };
    filtered_k(
        &realize_space_random(&space, seed, RandomMatrixParams::default()),
        shape,
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn modules_survive_a_dump_and_load(seed in any::<u64>(), s21 in any::<bool>()) {
        let m = random_module(s21, seed);
        let text = dump_module(&m);
        let back = load_module(&text).unwrap();
        prop_assert_eq!(&back, &m);
        prop_assert_eq!(dump_module(&back), text);
    }

    #[test]
    fn group_literals_round_trip(free in 0usize..4, torsion in prop::collection::vec(2i64..30, 0..4)) {
        let mut t: Vec<i64> = Vec::new();
        // Build a divisibility chain from the raw draws.
        for x in torsion {
            t.push(t.last().map_or(x, |p| p * (x % 4 + 1)));
        }
        let inv = InvariantFactors::new(free, t.into_iter().map(BigInt::from).collect());
        let g = PresentedGroup::from_invariants(&inv);
        let lit = group_literal(&g).unwrap();
        prop_assert_eq!(parse_group_literal(&lit).unwrap().invariant_factors(), inv);
    }

    #[test]
    fn block_matrices_round_trip(seed in any::<u64>()) {
        let a = realize_space_random(&FiniteSpace::csp(), seed, RandomMatrixParams::default());
        let dto = block_matrix_to_dto(&a);
        let text = to_json_pretty(&dto);
        let back: BlockMatrixDto = parse_json(&text).unwrap();
        prop_assert_eq!(block_matrix_from_dto(&back, "$").unwrap(), a);
    }
}

#[test]
fn literals_keep_the_written_order() {
    let g = parse_group_literal("Z+Z_2").unwrap();
    assert_eq!(g.invariant_factors().to_string(), "Z_2+Z");
    assert_eq!(g.generators(), 2);
    assert!(g.is_zero_element(&IntMatrix::column(&[0, 2])));
    assert!(!g.is_zero_element(&IntMatrix::column(&[2, 0])));
    assert!(
        parse_group_literal("Z⊕Z_3^2")
            .unwrap()
            .invariant_factors()
            .to_string()
            == "Z_3^2+Z"
    );
    assert!(parse_group_literal("0").unwrap().is_trivial());
    for bad in ["", "Z_", "Z_1x", "Q", "Z^", "Z_2+"] {
        assert!(parse_group_literal(bad).is_err(), "{bad:?} accepted");
    }
}

#[test]
fn shapes_round_trip() {
    for shape in [resources::csp_shape(), resources::s21_shape()] {
        let dto = shape_to_dto(&shape);
        let back: ShapeDto = parse_json(&to_json_pretty(&dto)).unwrap();
        assert_eq!(&shape_from_dto(&back, "$").unwrap(), shape.as_ref());
    }
}

fn module_error(text: &str) -> String {
    load_module(text).unwrap_err().to_string()
}

#[test]
fn schema_errors_name_the_offending_field() {
    let good = dump_module(&random_module(false, 7));
    let mut v: serde_json::Value = serde_json::from_str(&good).unwrap();

    let mut unknown = v.clone();
    unknown["colour"] = "red".into();
    let e = module_error(&unknown.to_string());
    assert!(e.contains("colour"), "{e}");

    let mut literal = v.clone();
    literal["groups"]["1_0"] = "Z_x".into();
    let e = module_error(&literal.to_string());
    assert!(e.contains("groups.1_0"), "{e}");

    let mut missing = v.clone();
    missing["groups"].as_object_mut().unwrap().remove("4_1");
    let e = module_error(&missing.to_string());
    assert!(e.contains("4_1"), "{e}");

    let mut vertex = v.clone();
    vertex["groups"]["5_0"] = "Z".into();
    let e = module_error(&vertex.to_string());
    assert!(e.contains("5_0"), "{e}");

    let mut arrow = v.clone();
    arrow["maps"]["i:1_0>2_0"] = serde_json::json!([[1]]);
    let e = module_error(&arrow.to_string());
    assert!(e.contains("i:1_0>2_0"), "{e}");

    let mut size = v.clone();
    size["maps"]["r:1234_1>123_1"] = serde_json::json!([[1, 2, 3, 4, 5, 6, 7]]);
    let e = module_error(&size.to_string());
    assert!(e.contains("r:1234_1>123_1"), "{e}");

    let mut format = v.clone();
    format["format"] = "filtk-module/9".into();
    let e = module_error(&format.to_string());
    assert!(e.contains("format"), "{e}");

    v["shape"] = "nowhere".into();
    let e = module_error(&v.to_string());
    assert!(e.contains("shape"), "{e}");
}

#[test]
fn big_entries_are_strings() {
    let big = BigInt::from(i64::MAX) * BigInt::from(4);
    let m = IntMatrix::from_rows(&[vec![big.clone(), BigInt::from(-3)]]);
    let text = serde_json::to_string(&filtk::formats::matrix_to_dto(&m)).unwrap();
    assert_eq!(text, format!("[[\"{big}\",-3]]"));
    let back =
        filtk::formats::matrix_from_dto(&parse_json(&text).unwrap(), Some((1, 2)), "$").unwrap();
    assert_eq!(back, m);
}
