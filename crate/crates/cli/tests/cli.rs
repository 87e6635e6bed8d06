use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hodge-inertia"))
}

fn instance(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../instances").join(name)
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hodge-inertia-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn run(args: &[&str]) -> (i32, String, String) {
    let Output { status, stdout, stderr } = bin().args(args).output().unwrap();
    (
        status.code().unwrap(),
        String::from_utf8(stdout).unwrap(),
        String::from_utf8(stderr).unwrap(),
    )
}

fn analyze_json(name: &str) -> (i32, serde_json::Value) {
    let path = instance(name);
    let (code, out, err) = run(&["analyze", "--input", path.to_str().unwrap(), "--format", "json"]);
    assert!(err.is_empty(), "{err}");
    (code, serde_json::from_str(&out).unwrap())
}

fn vertices(rep: &serde_json::Value, name: &str) -> Vec<(String, String)> {
    let poly = rep["polygons"].as_array().unwrap().iter().find(|p| p["name"] == name).unwrap();
    poly["vertices"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| (v[0].as_str().unwrap().to_string(), v[1].as_str().unwrap().to_string()))
        .collect()
}

fn pts(v: &[(&str, &str)]) -> Vec<(String, String)> {
    v.iter().map(|(x, y)| (x.to_string(), y.to_string())).collect()
}

#[test]
fn family_slope_table() {
    let cases = [
        ("family_pi.toml", "0", [("1", "1")], [("1", "1/2")]),
        ("family_x.toml", "inf", [("1", "0")], [("1", "0")]),
        ("family_x_plus_pi.toml", "1/2", [("1", "1/2")], [("1", "0")]),
    ];
    for (file, v, inertia_mid, hodge_mid) in cases {
        let (code, rep) = analyze_json(file);
        assert_eq!(code, 0, "{file}");
        assert_eq!(rep["elements"]["v"], v, "{file}");
        let mid = |m: [(&str, &str); 1]| pts(&[("0", "0"), m[0], ("2", "2")]);
        assert_eq!(vertices(&rep, "inertia"), mid(inertia_mid), "{file}");
        assert_eq!(vertices(&rep, "Hodge(M/pM)"), mid(hodge_mid), "{file}");
    }
}

#[test]
fn pseudo_module_report() {
    let (code, rep) = analyze_json("pseudo.toml");
    assert_eq!(code, 0);
    assert_eq!(vertices(&rep, "Hodge(M/pM)"), pts(&[("0", "0"), ("1", "2"), ("2", "4")]));
    assert_eq!(vertices(&rep, "Newton"), pts(&[("0", "0"), ("1", "1"), ("2", "4")]));
    assert!(rep["verdicts"].as_array().unwrap().iter().any(|v| v["name"].as_str().unwrap().contains("strictly below")));
}

#[test]
fn identity_matrix_exponents() {
    let path = scratch("identity.toml");
    std::fs::write(
        &path,
        "mode = \"matrix\"\n[ring]\np = 7\n[matrix]\ncarrier = \"witt\"\nentries = [[\"1\", \"0\"], [\"0\", \"1\"]]\n",
    )
    .unwrap();
    let (code, out, _) = run(&["analyze", "--input", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.contains("exponents = [0, 0]"), "{out}");
}

#[test]
fn sweep_records_row_errors() {
    let path = instance("sweep.toml");
    let (code, out, _) = run(&["sweep", "--input", path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(code, 1);
    let table: serde_json::Value = serde_json::from_str(&out).unwrap();
    let rows = table["rows"].as_array().unwrap();
    let v: Vec<_> = rows.iter().map(|r| r["v"].clone()).collect();
    assert_eq!(v, vec![serde_json::json!("0"), "inf".into(), "1/2".into(), serde_json::Value::Null]);
    assert!(rows[3]["error"].as_str().unwrap().contains("Q_p"));
    assert_eq!(table["summary"]["ok"], 3);
    assert_eq!(table["summary"]["errors"], 1);
}

#[test]
fn json_report_round_trips_through_render() {
    let json = scratch("report.json");
    let input = instance("family_x_plus_pi.toml");
    let (code, _, _) = run(&[
        "analyze",
        "--input",
        input.to_str().unwrap(),
        "--format",
        "json",
        "--out",
        json.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let (code, again, _) = run(&["render", "--input", json.to_str().unwrap(), "--format", "json"]);
    assert_eq!(code, 0);
    assert_eq!(again, std::fs::read_to_string(&json).unwrap());
    let (code, svg, _) = run(&["render", "--input", json.to_str().unwrap(), "--format", "svg"]);
    assert_eq!(code, 0);
    assert_eq!(svg.matches("<path").count(), 4);
}

#[test]
fn exit_codes() {
    let (code, _, err) = run(&["analyze", "--input", "/nonexistent/instance.toml"]);
    assert_eq!(code, 2);
    assert!(err.starts_with("error: reading"), "{err}");

    let bad = scratch("bad.toml");
    std::fs::write(&bad, "mode = \"family\"\n[ring]\np = 7\n[family]\nn1 = 1\nn2 = 1\nL = \"pi +\"\n").unwrap();
    let (code, _, err) = run(&["analyze", "--input", bad.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("family.L"), "{err}");

    // A report with a failing verdict re-renders with status 1.
    let failing = scratch("failing.json");
    std::fs::write(
        &failing,
        r#"{"mode":"family","polygons":[],"verdicts":[{"name":"x","holds":false,"evidence":"k=1: 1 <= 0"}],"elements":{},"warnings":[]}"#,
    )
    .unwrap();
    let (code, out, _) = run(&["render", "--input", failing.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(out.contains("[FAIL] x :: k=1: 1 <= 0"));

    let (code, _, _) = run(&["frobnicate"]);
    assert_eq!(code, 2);
}
