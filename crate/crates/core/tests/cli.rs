use std::path::{Path, PathBuf};

use loopnet::cli::{run_from, spec::PosetSpec};
use serde_json::Value;
use tempfile::TempDir;

fn write_fixture(dir: &Path, name: &str) -> PathBuf {
    let path = dir.join(format!("{name}.json"));
    let spec = PosetSpec::fixture(name).unwrap();
    std::fs::write(&path, serde_json::to_string(&spec).unwrap()).unwrap();
    path
}

/// Runs the CLI and returns the exit code and the report written to disk.
fn run(dir: &Path, args: &[&str]) -> (i32, Value, String) {
    let out = dir.join("report.json");
    let mut argv = vec!["loopnet".to_string(), "--output".to_string(), out.display().to_string()];
    argv.extend(args.iter().map(|s| s.to_string()));
    let code = run_from(argv);
    let text = std::fs::read_to_string(&out).unwrap();
    (code, serde_json::from_str(&text).unwrap(), text)
}

#[test]
fn validate_fixtures() {
    let dir = TempDir::new().unwrap();
    for name in ["diamond", "twotowers", "minkowski", "circle12", "causalset7", "swap"] {
        let path = write_fixture(dir.path(), name);
        let (code, report, _) = run(dir.path(), &["validate", path.to_str().unwrap()]);
        assert_eq!(code, 0, "{name}");
        assert_eq!(report["status"], "pass");
        assert_eq!(report["results"]["violations"], Value::Array(vec![]));
        assert_eq!(report["schemaVersion"], "loopnet-report/1");
        assert_eq!(report["inputDigest"].as_str().unwrap().len(), 64);
    }
}

#[test]
fn fixture_specs_rebuild_the_fixtures() {
    let pairs = [
        ("diamond", loopnet::fixtures::diamond()),
        ("twotowers", loopnet::fixtures::two_towers()),
        ("minkowski", loopnet::fixtures::minkowski()),
        ("circle12", loopnet::fixtures::circle12()),
        ("causalset7", loopnet::fixtures::causal_set7()),
        ("swap", loopnet::fixtures::swap().0),
    ];
    for (name, p) in pairs {
        let spec = PosetSpec::fixture(name).unwrap();
        let json = serde_json::to_string(&spec).unwrap();
        let (q, act) = serde_json::from_str::<PosetSpec>(&json).unwrap().build().unwrap();
        assert_eq!(q.labels(), p.labels(), "{name}");
        assert!(p.elements().all(|a| p.elements().all(|b| p.leq(a, b) == q.leq(a, b) && p.perp(a, b) == q.perp(a, b))));
        let expected = match name {
            "twotowers" => 2,
            "minkowski" => 4,
            "circle12" => 12,
            "swap" => 2,
            _ => 1,
        };
        assert_eq!(act.order(), expected, "{name}");
    }
}

#[test]
fn malformed_input_is_an_error_object() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"kind": "explicit", "elements": ["a"], "order": [["a", "b"]], "perp": []}"#).unwrap();
    let (code, report, _) = run(dir.path(), &["validate", bad.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert_eq!(report["error"]["kind"], "UnknownElement");
    let (code, report, _) = run(dir.path(), &["validate", "/nonexistent.json"]);
    assert_eq!(code, 1);
    assert_eq!(report["error"]["kind"], "Parse");
    let (code, report, _) = run(dir.path(), &["--loop-cap", "0", "word", "reduce", ""]);
    assert_eq!(code, 1);
    assert_eq!(report["error"]["kind"], "InvalidRange");
}

#[test]
fn words() {
    let dir = TempDir::new().unwrap();
    let (code, report, _) = run(dir.path(), &["word", "reduce", "(o;x,y) ~(o;x,y)"]);
    assert_eq!(code, 0);
    assert_eq!(report["results"]["word"], "");
    assert_eq!(report["results"]["length"], 0);
    let (_, report, _) = run(dir.path(), &["word", "loop", "(o;x,y) (o;y,x)"]);
    assert_eq!(report["results"]["base"], "x");
    let (_, report, _) = run(dir.path(), &["word", "path", "(o;x,y)"]);
    assert_eq!((report["results"]["start"].as_str(), report["results"]["end"].as_str()), (Some("y"), Some("x")));
    let towers = write_fixture(dir.path(), "twotowers");
    let t = towers.to_str().unwrap();
    let (p, q) = ("(o1b;x1,y1) (o1a;y1,x1)", "(o2b;x2,y2) (o2a;y2,x2)");
    let pq = format!("{p} {q}");
    let qp = format!("{q} {p}");
    let (code, report, _) = run(dir.path(), &["word", "--poset", t, "equal", &pq, &qp]);
    assert_eq!(code, 0);
    assert_eq!(report["results"]["verdict"], "equal");
    // p p' against p' p is beyond the abelianization and the certificate search
    let pp = "(o1a;y1,x1) (O1;x1,o1a) (O1;o1a,y1)";
    let (code, report, _) = run(dir.path(), &["word", "--poset", t, "equal", &format!("{p} {pp}"), &format!("{pp} {p}")]);
    assert_eq!(report["results"]["verdict"], "unknown");
    assert_eq!(code, 2);
}

#[test]
fn net_and_frames() {
    let dir = TempDir::new().unwrap();
    let towers = write_fixture(dir.path(), "twotowers");
    let (code, report, _) = run(dir.path(), &["--loop-cap", "3", "net", towers.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(report["results"]["summary"]["causality"], true);
    let swap = write_fixture(dir.path(), "swap");
    let (code, report, _) = run(dir.path(), &["pathframe", swap.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert_eq!(report["results"]["verdict"], "obstructed");
    let mink = write_fixture(dir.path(), "minkowski");
    let (code, report, _) = run(dir.path(), &["pathframe", mink.to_str().unwrap(), "--order", "descending"]);
    assert_eq!(code, 0);
    assert_eq!(report["results"]["covariant"], true);
    assert_eq!(report["results"]["frames"].as_array().unwrap().len(), 36);
}

#[test]
fn matrix_connection_and_gauge() {
    let dir = TempDir::new().unwrap();
    let towers = write_fixture(dir.path(), "twotowers");
    let t = towers.to_str().unwrap();
    let (code, report, first) = run(dir.path(), &["connection-check", t, "--components", "O1 O2"]);
    assert_eq!(code, 0, "{report}");
    assert!(report["results"]["causalityChecks"].as_u64().unwrap() > 0);
    let (_, _, second) = run(dir.path(), &["connection-check", t, "--components", "O1 O2"]);
    assert_eq!(first, second);
    let (code, report, _) = run(dir.path(), &["gauge-apply", t, "--components", "O1 O2"]);
    assert_eq!(code, 0, "{report}");
    assert!(report["results"]["valuesChangedByFrame"].as_u64().unwrap() > 0);
    let (code, report, _) = run(dir.path(), &["connection-check", t, "--components", "O1"]);
    assert_eq!(code, 1);
    assert_eq!(report["error"]["kind"], "InvalidRange");
}

#[test]
fn field_certificates() {
    let dir = TempDir::new().unwrap();
    let mink = write_fixture(dir.path(), "minkowski");
    let m = mink.to_str().unwrap();
    let field = dir.path().join("field.json");
    std::fs::write(&field, r#"{"mass": 1.0, "cutoff": 40.0, "nodes": 16, "mcSamples": 200000, "seed": 12648430}"#).unwrap();
    let f = field.to_str().unwrap();
    let (code, report, first) = run(dir.path(), &["certify", "nontrivial", m, f]);
    assert_eq!(code, 0, "{report}");
    let r = &report["results"];
    assert!(r["certificate"]["direct"].as_f64().unwrap() > 0.0);
    assert!(r["certificate"]["relErr"].as_f64().unwrap() < 1e-4);
    assert_eq!(r["control"]["direct"], 0.0);
    assert_eq!(report["field"]["mcSamples"], 200000);
    let (_, _, second) = run(dir.path(), &["certify", "nontrivial", m, f]);
    assert_eq!(first, second);
    let (code, report, _) = run(dir.path(), &["certify", "nonflat", m, f]);
    assert_eq!(code, 0, "{report}");
    assert_eq!(report["results"]["reproducible"], true);
    let (code, report, _) =
        run(dir.path(), &["holonomy", m, f, "(b[0,0];x[0,0],y[0,0]) (a[0,0];y[0,0],x[0,0])"]);
    assert_eq!(code, 0);
    assert_eq!(report["results"]["isLoop"], true);
    assert_eq!(report["results"]["holonomy"]["function"].as_array().unwrap().len(), 2);
    let csv = dir.path().join("em.csv");
    let (code, report, _) =
        run(dir.path(), &["em-transform", f, "--atom", "0,0,0,0,1", "--csv", csv.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(report["results"]["relChange"].as_f64().unwrap() < 1e-8);
    let lines = std::fs::read_to_string(&csv).unwrap().lines().count();
    assert_eq!(lines as u64, report["results"]["momenta"].as_u64().unwrap() + 1);
}

#[test]
fn weyl_connection_on_a_scope() {
    let dir = TempDir::new().unwrap();
    let mink = write_fixture(dir.path(), "minkowski");
    let field = dir.path().join("field.json");
    std::fs::write(&field, "{}").unwrap();
    let site = "x[0,0] y[0,0] a[0,0] b[0,0]";
    let args = [mink.to_str().unwrap(), "--backend", "weyl", "--field", field.to_str().unwrap(), "--bases", site, "--supports", site];
    let mut check = vec!["connection-check"];
    check.extend(args);
    let (code, report, _) = run(dir.path(), &check);
    assert_eq!(code, 0, "{report}");
    let mut gauge = vec!["gauge-apply"];
    gauge.extend(args);
    let (code, report, _) = run(dir.path(), &gauge);
    assert_eq!(code, 0, "{report}");
    assert!(report["results"]["loopsChecked"].as_u64().unwrap() > 0);
}

#[test]
fn causality_certificate() {
    let dir = TempDir::new().unwrap();
    let towers = write_fixture(dir.path(), "twotowers");
    let (code, report, _) = run(dir.path(), &["--loop-cap", "2", "certify", "causality", towers.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(report["results"]["unequal"], 0);
    assert!(report["results"]["equal"].as_u64().unwrap() > 0);
}
