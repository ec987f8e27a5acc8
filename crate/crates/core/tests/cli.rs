use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;
use vak::cli::{parse_problem, process, run_command, PlotFormat, RunOptions};
use vak::VakError;

fn fixtures() -> Vec<PathBuf> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let mut v: Vec<PathBuf> = std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).filter(|p| p.extension().is_some_and(|e| e == "json")).collect();
    v.sort();
    v
}

fn fixture(name: &str) -> String {
    std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(format!("{name}.json"))).unwrap()
}

fn vak(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_vak")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap(), String::from_utf8(out.stderr).unwrap())
}

fn run(name: &str) -> Value {
    let doc = parse_problem(&fixture(name)).unwrap();
    let r = run_command(&doc, &RunOptions::default()).unwrap();
    serde_json::from_str(&r.to_json()).unwrap()
}

fn schema_errors(text: &str) -> Vec<(String, String)> {
    match parse_problem(text) {
        Err(VakError::SchemaViolation(list)) => list,
        other => panic!("expected a schema violation, got {other:?}"),
    }
}

#[test]
fn every_fixture_runs_through_the_binary() {
    let dir = tempfile::tempdir().unwrap();
    let files = fixtures();
    assert!(files.len() >= 20);
    for f in files {
        let doc: Value = serde_json::from_str(&std::fs::read_to_string(&f).unwrap()).unwrap();
        let cmd = doc["query"]["command"].as_str().unwrap();
        let out = dir.path().join("r.json");
        let (code, _, err) = vak(&[cmd, "--in", f.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        assert_eq!(code, 0, "{}: {err}", f.display());
        let report: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
        assert_eq!(report["command"], cmd);
        assert!(report["reproducibility"]["library_version"].is_string());
    }
}

#[test]
fn canonical_serialization_round_trips() {
    for f in fixtures() {
        let doc = parse_problem(&std::fs::read_to_string(&f).unwrap()).unwrap();
        let again = parse_problem(&doc.to_json()).unwrap();
        assert_eq!(doc, again, "{}", f.display());
        assert_eq!(doc.to_json(), again.to_json());
    }
}

#[test]
fn minimal_document_parses() {
    let text = r#"{"schema_version": 1, "sets": [{"name": "K", "dim": 1, "pieces": [{"A": [[-1]], "b": [0]}]}],
                  "query": {"command": "cone", "set": "K", "point": {"x": [0]}}}"#;
    let doc = parse_problem(text).unwrap();
    assert_eq!(doc.sets.len(), 1);
    let r = run_command(&doc, &RunOptions::default()).unwrap();
    assert_eq!(r.route, "exact-polyhedral");
}

#[test]
fn missing_dim_is_reported_by_pointer() {
    let text = r#"{"schema_version": 1, "sets": [{"name": "K", "pieces": []}],
                  "query": {"command": "cone", "set": "K", "point": {"x": [0]}}}"#;
    let errs = schema_errors(text);
    assert!(errs.iter().any(|(p, _)| p == "/sets/0/dim"), "{errs:?}");
}

#[test]
fn all_errors_are_collected() {
    let text = r#"{"sets": [{"name": "K", "dim": 2, "pieces": [{"A": [[1]], "b": [0]}]}, {"name": "K", "dim": "x", "pieces": []}],
                  "maps": [{"name": "S", "n": 1, "m": 1, "kind": "wavy"}],
                  "query": {"command": "sideways", "set": "Q", "point": {"x": ["a"]}, "params": {"rho": -1}}}"#;
    let errs = schema_errors(text);
    let pointers: Vec<&str> = errs.iter().map(|(p, _)| p.as_str()).collect();
    for want in ["/schema_version", "/sets/0/pieces/0/A/0", "/sets/1/dim", "/maps/0/kind", "/query/command", "/query/params/rho"] {
        assert!(pointers.contains(&want), "{want} missing from {pointers:?}");
    }
}

#[test]
fn dimension_mismatches_are_schema_errors() {
    let text = r#"{"schema_version": 1, "sets": [{"name": "X", "dim": 2, "pieces": []}],
                  "maps": [{"name": "S", "kind": "affine", "n": 1, "m": 1, "matrix": [[1]]}],
                  "query": {"command": "projcode", "maps": ["S"], "restriction": "X", "point": {"x": [0, 0], "u": [0]}}}"#;
    let errs = schema_errors(text);
    let pointers: Vec<&str> = errs.iter().map(|(p, _)| p.as_str()).collect();
    assert!(pointers.contains(&"/query/restriction") && pointers.contains(&"/query/point/x"), "{pointers:?}");
}

#[test]
fn axis_switch_projcode_report() {
    let r = run("axis_switch");
    let map = &r["result"]["map"];
    // exact generators of R×{0} at u* = 0
    assert_eq!(map["graph"]["pieces"].as_array().unwrap().len(), 1);
    assert_eq!(map["graph"]["pieces"][0]["lineality"], serde_json::json!([["0", "0", "1", "0"]]));
    assert_eq!(map["graph"]["pieces"][0]["rays"], serde_json::json!([]));
    assert_eq!(map["zero_at_zero"], false);
    let chart = run("axis_switch_chart");
    assert_eq!(chart["route"], "manifold-fixed-point");
    assert_eq!(chart["result"]["fixed_point_forms"]["agree"], true);
    assert_eq!(chart["result"]["map"]["graph"], map["graph"]);
}

#[test]
fn tanh_sigmoid_criterion_reports() {
    for (name, want) in [("tanh", 1.0), ("sigmoid", 0.5)] {
        let r = run(name);
        assert_eq!(r["result"]["lipschitz_like"], true);
        let m = r["result"]["modulus"].as_f64().unwrap();
        assert!((m - want).abs() <= 0.05, "{name}: {m}");
        let o = r["result"]["oracle_estimate"].as_f64().unwrap();
        assert!(o <= want * 1.05 && o >= want * 0.85, "{name}: {o}");
    }
}

#[test]
fn batteries_return_equal_booleans() {
    for (name, value) in [("battery_convex", true), ("axis_switch_battery", false)] {
        let r = run(name);
        let checks = r["result"]["checks"].as_object().unwrap();
        assert_eq!(checks.len(), 5);
        assert!(checks.values().all(|b| b.as_bool() == Some(value)), "{name}: {checks:?}");
    }
}

#[test]
fn sum_fixtures_through_the_cli() {
    let two = run("sum_two_map");
    for rule in ["rule_1", "rule_2"] {
        assert_eq!(two["result"][rule]["cq_holds"], true);
        assert_eq!(two["result"][rule]["lhs_generators"], two["result"][rule]["rhs_generators"]);
    }
    let boundary = run("sum_boundary");
    assert_eq!(boundary["result"]["rule_1"]["cq_holds"], true);
    assert_eq!(boundary["result"]["rule_2"]["cq_holds"], false);
}

#[test]
fn infinite_values_are_spelled_out() {
    let r = run("cone_outernorm");
    assert_eq!(r["result"]["outer_norm"]["finite"], false);
    assert_eq!(r["result"]["outer_norm"]["value"], "inf");
    let r = run("axis_switch_criterion");
    assert_eq!(r["result"]["modulus"], "inf");
}

#[test]
fn reports_are_byte_identical_for_a_fixed_seed() {
    let doc = parse_problem(&fixture("tanh_projcode")).unwrap();
    let opts = RunOptions { seed: Some(7), exact: false };
    let a = run_command(&doc, &opts).unwrap().to_json();
    let b = run_command(&doc, &opts).unwrap().to_json();
    assert_eq!(a, b);
    let v: Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["reproducibility"]["seed"], 7);
    assert_eq!(v["reproducibility"]["sampling"]["seed"], 7);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let fx = |n: &str| Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(format!("{n}.json")).to_str().unwrap().to_string();
    let out = dir.path().join("r.json");
    let out = out.to_str().unwrap();

    // command line disagrees with the document
    let (code, _, _) = vak(&["cone", "--in", &fx("axis_switch"), "--out", out]);
    assert_eq!(code, 2);
    let err: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(err["error"]["code"], "SchemaViolation");
    assert_eq!(err["error"]["details"][0]["pointer"], "/query/command");

    // the reference point is off the graph
    let mut doc: Value = serde_json::from_str(&fixture("axis_switch")).unwrap();
    doc["query"]["point"] = serde_json::json!({ "x": [1, 1], "u": [5, 5] });
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, doc.to_string()).unwrap();
    let (code, _, _) = vak(&["projcode", "--in", bad.to_str().unwrap(), "--out", out]);
    assert_eq!(code, 3);
    let err: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(err["error"]["code"], "PointNotOnGraph");

    // the sampled criterion warns; --strict escalates
    let (code, _, _) = vak(&["criterion", "--in", &fx("tanh"), "--out", out]);
    assert_eq!(code, 0);
    let (code, _, stderr) = vak(&["criterion", "--in", &fx("tanh"), "--out", out, "--strict"]);
    assert_eq!(code, 4, "{stderr}");
    // the report is still written
    let report: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert!(!report["warnings"].as_array().unwrap().is_empty());

    // unreadable JSON
    std::fs::write(&bad, "{").unwrap();
    let (code, stdout, _) = vak(&["projcode", "--in", bad.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(stdout.contains("SchemaViolation"));
}

#[test]
fn exact_flag_switches_arithmetic() {
    let mut doc = parse_problem(&fixture("axis_switch")).unwrap();
    doc.query.exact = false;
    let float: Value = serde_json::from_str(&run_command(&doc, &RunOptions::default()).unwrap().to_json()).unwrap();
    assert!(float["result"]["map"]["graph"]["pieces"][0]["lineality"][0][2].is_f64());
    let exact: Value = serde_json::from_str(&run_command(&doc, &RunOptions { seed: None, exact: true }).unwrap().to_json()).unwrap();
    assert_eq!(exact["result"]["map"]["graph"]["pieces"][0]["lineality"][0][2], "1");
    assert_eq!(exact["reproducibility"]["exact"], true);
}

#[test]
fn plot_output() {
    // tanh: two series, the u*-axis ray and the diagonal ray
    let p = process(&fixture("tanh_projcode"), None, &RunOptions::default(), false, Some(PlotFormat::Json));
    assert_eq!(p.code, 0);
    let plot: Value = serde_json::from_str(p.plot.as_deref().unwrap()).unwrap();
    let series = plot["series"].as_array().unwrap();
    assert_eq!(series.len(), 2);
    for s in series {
        assert_eq!(s["points"].as_array().unwrap().len(), 2);
    }
    // 4-dimensional graph cannot be plotted
    let p = process(&fixture("axis_switch"), None, &RunOptions::default(), false, Some(PlotFormat::Csv));
    assert_eq!(p.code, 3);
    assert!(p.json.contains("DimensionTooHigh"));
    // the cone of a planar set, as CSV
    let p = process(&fixture("orthant_cone"), None, &RunOptions::default(), false, Some(PlotFormat::Csv));
    let csv = p.plot.unwrap();
    assert!(csv.starts_with("label,piece,point,c1,c2\n"));
    assert!(csv.lines().count() > 3);
}

#[test]
fn plot_of_an_empty_cone_is_a_header() {
    let text = r#"{"schema_version": 1, "maps": [{"name": "S", "kind": "polyhedral", "n": 1, "m": 1, "pieces": [{"C": [[1, 0]], "d": [0]}]}],
                  "query": {"command": "projcode", "maps": ["S"], "point": {"x": [0], "u": [0]}}}"#;
    let p = process(text, None, &RunOptions::default(), false, Some(PlotFormat::Csv));
    assert_eq!(p.code, 0, "{}", p.json);
    // vertical line: D*S(0|0)(u*) = R for u* = 0, the graph is the x*-axis
    assert!(p.plot.unwrap().lines().count() >= 2);
    let empty = vak::cli::plot_data(&[("k".into(), vak::ConeUnion::<f64>::empty(2))]).unwrap();
    assert!(empty.series.is_empty());
}

#[test]
fn batch_mode_isolates_documents() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("broken.json");
    std::fs::write(&bad, r#"{"schema_version": 1}"#).unwrap();
    let a = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/axis_switch.json");
    let b = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/sum_two_map.json");
    let out = dir.path().join("reports");
    let (code, _, _) = vak(&["batch", "--in", a.to_str().unwrap(), "--in", b.to_str().unwrap(), "--in", bad.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code, 2);
    for stem in ["axis_switch", "sum_two_map"] {
        let r: Value = serde_json::from_str(&std::fs::read_to_string(out.join(format!("{stem}.report.json"))).unwrap()).unwrap();
        assert!(r["result"].is_object());
    }
    let r: Value = serde_json::from_str(&std::fs::read_to_string(out.join("broken.report.json")).unwrap()).unwrap();
    assert_eq!(r["error"]["details"][0]["pointer"], "/query");
}
