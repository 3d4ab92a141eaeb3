use std::collections::BTreeSet;

use filtk::diagram::{check_rrz_like, check_six_term_exact, validate_module, DiagramShape};
use filtk::finspace::{FiniteSpace, PointSet};
use filtk::resources;
use sha2::{Digest, Sha256};

#[test]
fn embedded_files_match_their_checksums() {
    let listed: Vec<(&str, &str)> = resources::SHA256SUMS
        .lines()
        .map(|l| {
            let (hash, name) = l.split_once("  ").expect("sha256sum line");
            (name, hash)
        })
        .collect();
    assert_eq!(listed.len(), resources::FILES.len());
    for (name, text) in resources::FILES {
        let want = listed
            .iter()
            .find(|(n, _)| n == name)
            .unwrap_or_else(|| panic!("{name} not listed"))
            .1;
        let got: String = Sha256::digest(text.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect();
        assert_eq!(got, want, "{name}");
    }
}

/// All pairs `(Y, U)` with `Y` connected and locally closed, `U` a
/// relatively open subset, and both `U` and `Y ∖ U` non-empty and connected,
/// found by enumerating subsets.
fn pairs_by_enumeration(space: &FiniteSpace) -> BTreeSet<(PointSet, PointSet)> {
    let n = space.len();
    let subsets: Vec<PointSet> = (1u32..(1 << n))
        .map(|b| PointSet::from_points((0..n).filter(|i| b >> i & 1 == 1)))
        .collect();
    let opens: Vec<PointSet> = space.opens().to_vec();
    let lc = |s: PointSet| {
        opens
            .iter()
            .any(|o| opens.iter().any(|p| p.is_subset(*o) && o.minus(*p) == s))
    };
    let mut out = BTreeSet::new();
    for &y in &subsets {
        if !lc(y) || !space.is_connected_subset(y) {
            continue;
        }
        for &u in &subsets {
            let q = y.minus(u);
            let rel_open = opens.iter().any(|o| o.intersection(y) == u);
            if u.is_subset(y)
                && !q.is_empty()
                && rel_open
                && space.is_connected_subset(u)
                && space.is_connected_subset(q)
            {
                out.insert((y, u));
            }
        }
    }
    out
}

fn pairs(shape: &DiagramShape) -> BTreeSet<(PointSet, PointSet)> {
    shape
        .sequences()
        .iter()
        .map(|s| (s.whole, s.ideal))
        .collect()
}

#[test]
fn embedded_shapes_carry_every_pair() {
    for (shape, space, carriers, count) in [
        (resources::csp_shape(), FiniteSpace::csp(), 11, 12),
        (resources::s21_shape(), FiniteSpace::s21(), 13, 16),
    ] {
        assert_eq!(shape.space(), &space);
        let found = pairs_by_enumeration(&space);
        assert_eq!(found.len(), count);
        assert_eq!(pairs(&shape), found);
        assert_eq!(pairs(&DiagramShape::standard("x", space.clone())), found);
        assert_eq!(shape.vertices().len(), 2 * carriers);
        assert_eq!(shape.arrows().len(), 6 * count);
    }
}

#[test]
fn csp_tables_are_exact_modules() {
    let m = resources::csp_table_m();
    let p = resources::csp_table_p();
    assert_eq!(m.pinned.len(), 4);
    assert_eq!(p.pinned.len(), 4);
    let p = p.to_module().unwrap();
    assert!(validate_module(&p).is_valid());
    assert!(check_six_term_exact(&p).unwrap().is_exact());
    assert!(check_rrz_like(&p).holds());
    let shape = resources::csp_shape();
    let support: Vec<String> = (0..p.groups().len())
        .filter(|&v| !p.group(v).is_trivial())
        .map(|v| shape.vertex_label(v))
        .collect();
    assert_eq!(
        support,
        ["2_1", "3_1", "4_0", "12_1", "13_1", "123_1", "234_1", "1234_1"]
    );
}

#[test]
fn s21_plan_refers_to_real_vertices() {
    let plan = resources::s21_tables();
    let shape = resources::s21_shape();
    assert_eq!(plan.steps.len(), 8);
    assert_eq!(plan.vanishing.len(), 8);
    for s in &plan.steps {
        shape.parse_vertex(&s.corner).unwrap();
        for c in &s.checked {
            shape.parse_vertex(c).unwrap();
        }
        for r in &s.identities {
            shape.parse_relation(r).unwrap();
        }
    }
    assert_eq!(shape.relations().len(), 8);
}
