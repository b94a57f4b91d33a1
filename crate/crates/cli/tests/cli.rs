use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn surfgw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_surfgw"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_of(args: &[&str]) -> Value {
    let out = surfgw(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("surfgw-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn delta_series() {
    let v = json_of(&["series", "delta", "--q-order", "5"]);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["series"]["valuation"], 1);
    assert_eq!(
        v["series"]["coefficients"],
        serde_json::json!(["1", "-24", "252", "-1472"])
    );
}

#[test]
fn yau_zaslow_invariant() {
    let v = json_of(&[
        "invariant",
        "point-hodge",
        "--surface",
        "k3",
        "--genus",
        "0",
        "--points",
        "0",
        "--h",
        "1",
        "--div",
        "1",
    ]);
    assert_eq!(v["value"], "24");
}

#[test]
fn multiple_cover_rational_value() {
    let v = json_of(&[
        "mcf",
        "point-hodge",
        "--surface",
        "k3",
        "--genus",
        "0",
        "--points",
        "0",
        "--h",
        "0",
        "--div",
        "2",
    ]);
    assert_eq!(v["value"], "1/8");
    assert_eq!(v["summands"].as_array().unwrap().len(), 2);
    assert_eq!(v["summands"][0]["effective"], false);
}

#[test]
fn negative_h_is_accepted() {
    let v = json_of(&[
        "invariant",
        "point-hodge",
        "--surface",
        "k3",
        "--genus",
        "0",
        "--points",
        "0",
        "--h",
        "-1",
    ]);
    assert_eq!(v["value"], "0");
}

#[test]
fn general_transform_and_csv() {
    let out = surfgw(&[
        "--format",
        "csv",
        "mcf",
        "general",
        "--surface",
        "k3",
        "--genus",
        "2",
        "--h",
        "2",
        "--div",
        "2",
        "--degrees",
        "2,2",
        "--values",
        "1:5,2:7",
    ]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "value\n229\n");
}

#[test]
fn fractional_exponent_is_a_math_error() {
    let out = surfgw(&[
        "mcf",
        "general",
        "--surface",
        "abelian",
        "--genus",
        "1",
        "--h",
        "2",
        "--div",
        "2",
        "--degrees",
        "1/2",
        "--values",
        "1:1,2:1",
    ]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("exponent"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(surfgw(&["series", "eisenstein"]).status.code(), Some(2));
    assert_eq!(
        surfgw(&["invariant", "point-hodge", "--surface", "k3"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        surfgw(&[
            "invariant",
            "point-hodge",
            "--surface",
            "k3",
            "--genus",
            "0",
            "--points",
            "0",
            "--h",
            "0",
            "--div",
            "3"
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        surfgw(&["series", "theta", "--z-order", "0"]).status.code(),
        Some(2)
    );
}

#[test]
fn batch_queries_keep_input_order() {
    let path = temp_file(
        "batch.json",
        r#"[{"surface":"k3","genus":0,"points":0,"h":2},
            {"surface":"abelian","genus":1,"points":1,"h":1},
            {"surface":"k3","genus":0,"points":0,"h":0,"div":2}]"#,
    );
    let v = json_of(&["mcf", "point-hodge", "--batch", path.to_str().unwrap()]);
    let values: Vec<&str> = v["results"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["value"].as_str().unwrap())
        .collect();
    assert_eq!(values, ["324", "1", "1/8"]);
    let csv = surfgw(&[
        "--format",
        "csv",
        "invariant",
        "point-hodge",
        "--batch",
        path.to_str().unwrap(),
    ]);
    // the third query is imprimitive
    assert_eq!(csv.status.code(), Some(2));
}

#[test]
fn output_is_deterministic() {
    let args = [
        "series",
        "phi2",
        "--m",
        "1",
        "--n",
        "2",
        "--z-order",
        "4",
        "--q-order",
        "3",
    ];
    assert_eq!(surfgw(&args).stdout, surfgw(&args).stdout);
}

#[test]
fn s_methods_agree_through_the_cli() {
    let a = json_of(&[
        "series",
        "s",
        "--method",
        "log-derivative",
        "--z-order",
        "6",
        "--q-order",
        "4",
    ]);
    let b = json_of(&[
        "series",
        "s",
        "--method",
        "divisor-sum",
        "--z-order",
        "6",
        "--q-order",
        "4",
    ]);
    assert_eq!(a["series"], b["series"]);
}

#[test]
fn dr_vertex_is_labelled_conjectural() {
    let path = temp_file(
        "dr.json",
        r#"{"legs":[{"a":1,"gamma":{"s":1},"degree":1},
                    {"a":-1,"gamma":{"rank":1,"n":"1/2"},"degree":0}],
            "beta":{"h":1}, "z_order":4}"#,
    );
    let v = json_of(&["dr-vertex", "--query", path.to_str().unwrap()]);
    assert_eq!(v["metadata"]["status"], "conjectural");
    assert_eq!(v["series"]["variables"], serde_json::json!(["z"]));
    assert!(v["invariants"]
        .as_array()
        .unwrap()
        .iter()
        .all(|i| i["value"] == "0"));

    let bad = temp_file(
        "dr-bad.json",
        r#"{"legs":[{"a":1,"gamma":{},"degree":0}],"beta":{"h":1},"z_order":4}"#,
    );
    assert_eq!(
        surfgw(&["dr-vertex", "--query", bad.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn pt_transform_both_forms() {
    let path = temp_file(
        "pt.json",
        r#"{"r":2, "nu":{"1":0,"2":3}, "convention":"coefficient",
            "primitive":{"1":{"lo":0,"hi":4,"coeffs":[10,11,12,13]},
                         "2":{"lo":0,"coeffs":[20,21,22]}}}"#,
    );
    let v = json_of(&["pt-transform", "--input", path.to_str().unwrap()]);
    let coeffs = v["coefficients"].as_array().unwrap();
    let at = |ch3: i64| {
        coeffs.iter().find(|c| c["ch3"] == ch3).unwrap()["invariant"]
            .as_str()
            .unwrap()
            .to_string()
    };
    assert_eq!(at(2), (12 - 8 * 21).to_string());
    assert_eq!(at(3), "13");
    assert_eq!(at(0), (10 + 8 * 20).to_string());

    let uniform = temp_file(
        "pt-uniform.json",
        r#"{"r":2, "nu_from":{"partition":"(1:p)","descendents":[{"a":2,"degree":2}]}, "convention":"series",
            "primitive":{"1":{"lo":0,"coeffs":[1,1,1,1]},"2":{"lo":0,"coeffs":[1,1]}}}"#,
    );
    let v = json_of(&["pt-transform", "--input", uniform.to_str().unwrap()]);
    // deg(lambda) = 2, one (a = 2, deg 2) descendent, n = 1: nu = 2 + 2 - 2 - 1 = 1
    assert_eq!(v["nu"]["2"], 1);
    // series coefficient of p^2: 1 + 2^1 * 1
    let c2 = v["coefficients"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["ch3"] == 2)
        .unwrap();
    assert_eq!(c2["series_coefficient"], "3");
}

#[test]
fn verify_passes() {
    let out = surfgw(&["verify"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["passed"], true);
}
