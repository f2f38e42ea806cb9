use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

use curvespec::bounds::{durfee_curve_check, givental_check, givental_r};
use curvespec::expr::parse_expr;
use curvespec::formulas::spec_from_resolution;
use curvespec::graph::ResolutionGraph;
use curvespec::rational::rat;

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "data", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_curvespec")).args(args).output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn ok(args: &[&str]) -> String {
    let (code, out, err) = run(args);
    assert_eq!(code, 0, "{args:?}: {err}");
    out
}

#[test]
fn spec_of_ordinary_point() {
    let out = ok(&["spec", "--type", "ord(4)"]);
    assert_eq!(
        out,
        "1*t^(-1/2) + 2*t^(-1/4) + 3*t^(0) + 2*t^(1/4) + 1*t^(1/2)\nmu = 9\nalpha_max = 1/2\n"
    );
    let lib = parse_expr("ord(4)").unwrap().spectrum().unwrap();
    assert_eq!(out.lines().next().unwrap(), lib.to_string());
}

#[test]
fn spec_of_cusp_graph_and_json() {
    let out = ok(&["spec", "--graph", &data("cusp.json")]);
    assert!(out.starts_with("1*t^(-1/6) + 1*t^(1/6)\nmu = 2\n"));
    let v: Value = serde_json::from_str(&ok(&["--json", "spec", "--graph", &data("cusp.json")])).unwrap();
    assert_eq!(v["mu"], 2);
    assert_eq!(v["alpha_max"], "1/6");
    assert_eq!(v["terms"][0]["value"], "-1/6");
    assert_eq!(v["terms"][0]["coeff"], 1);
}

#[test]
fn spec_of_a_combination() {
    let out = ok(&["spec", "--type", "2*basic(2,2) - ord(4)"]);
    assert!(out.contains("mu = 13"));
}

#[test]
fn identities() {
    assert_eq!(ok(&["check", "eq1", "--parts", "chain(2,2);chain(2,2)"]), "residual: 0\n");
    assert!(ok(&["check", "ring26", "--q", "2", "--q2", "3"]).ends_with("residual: 0\n"));
    let out = ok(&["check", "swap", "--graph", &data("ord4.json"), "--pivot", "1", "--detach", "germs=2"]);
    assert!(out.contains("residual: 0\n"));
    let out = ok(&["check", "swap", "--graph", &data("tacnode2.json"), "--pivot", "1", "--detach", "children=2"]);
    assert!(out.starts_with("degree = 2\n"));
    assert!(out.contains("residual: 0\n"));
    assert!(!out.contains("spp residual: 0"));
}

#[test]
fn spp_witness() {
    let out = ok(&["check", "spp-additivity", "--max-m", "4"]);
    assert!(out.starts_with("witness: (4,0[(6,2[])(6,2[])]) at vertex 1\n"));
}

#[test]
fn bounds_reports() {
    assert_eq!(ok(&["bounds", "durfee-curve", "--type", "ord(3)", "--alpha", "0"]), "10 > 6 OK\n");
    let s = parse_expr("ord(3)").unwrap().spectrum().unwrap();
    assert_eq!(durfee_curve_check(&s, 3, &rat(0, 1)).unwrap().render(), "10 > 6 OK");

    assert_eq!(ok(&["bounds", "givental", "--graph", &data("cusp.json")]), "r=2, k=1, no pairs, OK\n");
    let g = ResolutionGraph::from_json(&std::fs::read_to_string(data("cusp.json")).unwrap()).unwrap();
    let rep = givental_check(&spec_from_resolution(&g).unwrap(), givental_r(&g)).unwrap();
    assert_eq!(rep.render(), "r=2, k=1, no pairs, OK");
}

#[test]
fn newton_bound_exit_status() {
    let (code, out, _) = run(&["bounds", "durfee-newton", "--diagram", &data("fermat3.json"), "--alpha", "0", "--scale", "4"]);
    // 12·11/2 lattice points against μ/2 = 121/2
    assert_eq!((code, out.as_str()), (1, "121/2 > 66 FAILS\n"));
    let out = ok(&["bounds", "durfee-newton", "--diagram", &data("fermat12.json"), "--alpha", "1/2", "--onset", "3"]);
    assert_eq!(out, "onset t = 1\n");
}

#[test]
fn decomposition() {
    assert_eq!(
        ok(&["decompose", "--graph", &data("tacnode2.json")]),
        "2*chain(2,2) - ord(4)\n= 2*basic(2,2) - ord(4)\n"
    );
    assert_eq!(ok(&["decompose", "--type", "chain(0,0,1)"]), "basic(0,2) + basic(0,3) - basic(2,2)\n");
}

#[test]
fn independence_fails_at_six() {
    let (code, out, _) = run(&["independence", "--dmax", "6"]);
    assert_eq!(code, 1);
    assert!(out.contains("D=5 count=6 rank=6\nD=6 count=9 rank=8\n"));
}

#[test]
fn input_errors_exit_two() {
    let (code, _, err) = run(&["spec", "--type", "ord(4) + bsic(2,2)"]);
    assert_eq!(code, 2);
    assert!(err.contains("1:10"));
    assert_eq!(run(&["bounds", "durfee-curve", "--type", "ord(3)", "--alpha", "1/x"]).0, 2);
    assert_eq!(run(&["spec", "--graph", "/nonexistent.json"]).0, 2);
    assert_eq!(run(&["spec"]).0, 2);
    assert_eq!(run(&["check", "swap", "--graph", &data("cusp.json"), "--pivot", "99"]).0, 2);
}

#[test]
fn output_is_stable() {
    let args = ["--json", "spec", "--type", "chain(2,1,1)", "--recover"];
    assert_eq!(ok(&args), ok(&args));
}
