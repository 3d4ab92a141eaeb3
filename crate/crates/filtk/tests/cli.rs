use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use filtk::formats::{load_module, table_from_dto, TableDto};
use filtk::resources;
use serde_json::{json, Value};

fn filtk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_filtk"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("data/v1")
        .join(name)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &tempfile::TempDir, name: &str, v: &Value) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, v.to_string()).unwrap();
    p.to_str().unwrap().to_string()
}

fn module_file(dir: &tempfile::TempDir) -> String {
    let a = data("csp_matrix_A.json");
    let out = dir.path().join("m.json");
    let o = filtk(&[
        "--json",
        "ck-k",
        "--space",
        "CSP",
        "--matrix",
        a.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&out).unwrap(), stdout(&o));
    out.to_str().unwrap().to_string()
}

#[test]
fn ck_k_matches_the_table() {
    let dir = tempfile::tempdir().unwrap();
    let m = load_module(&std::fs::read_to_string(module_file(&dir)).unwrap()).unwrap();
    let table = table_from_dto(
        &serde_json::from_str::<TableDto>(resources::file("csp_table_M.json")).unwrap(),
        "$",
    )
    .unwrap();
    for (v, g) in table.groups.iter().enumerate() {
        assert_eq!(m.group(v).invariant_factors(), g.invariant_factors());
    }
}

#[test]
fn json_output_is_deterministic() {
    let a = data("csp_matrix_A.json");
    let one = stdout(&filtk(&["--json", "ck-k", "--matrix", a.to_str().unwrap()]));
    let two = stdout(&filtk(&["--json", "ck-k", "--matrix", a.to_str().unwrap()]));
    assert_eq!(one, two);
    let seeds = [
        "--json",
        "verify-pseudocircle",
        "--seed",
        "3",
        "--count",
        "2",
    ];
    assert_eq!(stdout(&filtk(&seeds)), stdout(&filtk(&seeds)));
}

#[test]
fn module_checks() {
    let dir = tempfile::tempdir().unwrap();
    let m = module_file(&dir);
    for verb in ["check-exact", "check-rrz", "reduced"] {
        let o = filtk(&["--json", verb, "--module", &m]);
        assert_eq!(o.status.code(), Some(0), "{verb}");
    }
    let o = filtk(&["--json", "unit-group", "--module", &m]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["unit_group"], "Z_2^2+Z");
    let o = filtk(&["--json", "reduced", "--module", &m]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let k1: Vec<&str> = v["points"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["k1_point"].as_str().unwrap())
        .collect();
    assert_eq!(k1, ["Z", "0", "0", "0"]);
}

#[test]
fn broken_module_fails_exactness() {
    let dir = tempfile::tempdir().unwrap();
    let mut v: Value =
        serde_json::from_str(&std::fs::read_to_string(module_file(&dir)).unwrap()).unwrap();
    v["maps"]["r:1234_1>123_1"] = json!([[0]]);
    let m = write(&dir, "broken.json", &v);
    let o = filtk(&["--json", "check-exact", "--module", &m]);
    assert_eq!(o.status.code(), Some(1));
    let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["exact"], false);
    assert!(!r["failures"].as_array().unwrap().is_empty());
}

#[test]
fn homs_verify_and_solve() {
    let dir = tempfile::tempdir().unwrap();
    let m = module_file(&dir);
    let o = filtk(&[
        "--json",
        "solve-hom",
        "--module",
        &m,
        "--pins",
        &write(&dir, "pins.json", &json!({"components": {"1234_1": [[1]]}})),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let r: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["feasible"], true);
    let hom = write(&dir, "hom.json", &r["components"]);
    let o = filtk(&["--json", "verify-hom", "--module", &m, "--hom", &hom]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["natural"], true);

    let zero = write(&dir, "zero.json", &json!({"components": {"1234_1": [[1]]}}));
    let o = filtk(&["--json", "verify-hom", "--module", &m, "--hom", &zero]);
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["natural"], false);
}

#[test]
fn counterexample_exit_codes() {
    let o = filtk(&["verify-counterexample"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("B(0,2,0)ᵗ = (1,2,0)ᵗ"));
    let o = filtk(&["--json", "verify-counterexample", "--alpha-identity"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["lifts"], true);
}

#[test]
fn pseudocircle_by_seed_and_module() {
    let o = filtk(&["verify-pseudocircle", "--seed", "0", "--count", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let dir = tempfile::tempdir().unwrap();
    let m = module_file(&dir);
    let o = filtk(&["verify-pseudocircle", "--module", &m]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("precondition"));
}

#[test]
fn snf_and_shapes() {
    let dir = tempfile::tempdir().unwrap();
    let o = filtk(&[
        "--json",
        "snf",
        "--in",
        &write(
            &dir,
            "a.json",
            &json!({"matrix": [[2, 4, 4], [-6, 6, 12], [10, -4, -16]]}),
        ),
    ]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["invariant_factors"], json!(["2", "6", "12"]));
    let o = filtk(&["--json", "dump-shape", "--space", "S21"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["carriers"].as_array().unwrap().len(), 13);
}

#[test]
fn input_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = filtk(&["check-exact", "--module", "/nonexistent/m.json"]);
    assert_eq!(o.status.code(), Some(2));
    let bad = write(
        &dir,
        "bad.json",
        &json!({"shape": "CSP", "groups": {"1_0": "Z_q"}}),
    );
    let o = filtk(&["check-exact", "--module", &bad]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.starts_with("error: ") && err.contains("1_0"), "{err}");
    let o = filtk(&["dump-shape", "--space", "Torus"]);
    assert_eq!(o.status.code(), Some(2));
}
