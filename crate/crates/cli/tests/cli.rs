use std::path::Path;
use std::process::{Command, Output};

fn conflab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conflab")).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const NECK: &str = r#"{"kind": "neck", "h": [1.05, 0.97, 1.01], "L": 20, "L_bar": 2}"#;
const SPHERE: &str = r#"{"kind": "chart", "dim": 4, "extents": [9, 9, 9, 9], "spacing": [0.75, 0.75, 0.75, 0.75],
    "periodic": [false, false, false, false], "generator": "round_sphere_sinh"}"#;

#[test]
fn ywpicture_csv_carries_exact_header() {
    let out = conflab(&["ywpicture", "--name", "K3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("corner: (0, 768π²)"), "{text}");
    assert!(text.lines().any(|l| !l.starts_with('#')));
}

#[test]
fn ywpicture_writes_svg() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("k3.svg");
    let out = conflab(&["ywpicture", "--name", "CP2", "--svg", svg.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(std::fs::read_to_string(svg).unwrap().starts_with("<svg"));
}

#[test]
fn dial_lands_in_the_window() {
    let out = conflab(&["dial", "--kappa", "1.0", "--eps", "0.1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let total = v["total"].as_f64().unwrap();
    assert!((1.0..=1.1).contains(&total), "{total}");
    assert_eq!(v["certificate"]["yamabe_ok"], true);
}

#[test]
fn neck_reports_oracle_residuals() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "neck.json", NECK);
    let csv = dir.path().join("profile.csv");
    let out = conflab(&["neck", "--input", &spec, "--csv", csv.to_str().unwrap()]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["max_residual"].as_f64().unwrap() <= v["tolerance"].as_f64().unwrap());
    assert!(std::fs::read_to_string(csv).unwrap().starts_with("t,a,b,c,R_slice,R_product"));
}

#[test]
fn schema_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"kind": "neck", "h": [1, 1], "L": 1, "L_bar": 1}"#);
    assert_eq!(conflab(&["neck", "--input", &bad]).status.code(), Some(2));
    let sphere = write(dir.path(), "s.json", SPHERE);
    assert_eq!(conflab(&["curvature", "--input", &sphere, "--resolution", "3"]).status.code(), Some(2));
    assert_eq!(conflab(&["neck", "--input", &sphere]).status.code(), Some(2));
    assert_eq!(conflab(&["ywpicture", "--name", "RP4"]).status.code(), Some(2));
    let guard = write(dir.path(), "g.json", r#"{"kind": "neck", "h": [1.8, 1, 1], "L": 10, "L_bar": 1}"#);
    assert_eq!(conflab(&["neck", "--input", &guard]).status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_conflab"))
        .args(["ywpicture", "--name", "S4"])
        .env("CONFLAB_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn infeasible_certificate_exits_3() {
    let out = conflab(&["dial", "--kappa", "1.0", "--eps", "1e-9"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn exact_overflow_exits_4() {
    let out = conflab(&["ywpicture", "--name", "CH2_quotient(9223372036854775807)"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn neck_without_oracle_points_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "neck.json", r#"{"kind": "neck", "h": [1.4, 0.6, 1.2], "L": 2, "L_bar": 1}"#);
    assert_eq!(conflab(&["neck", "--input", &spec, "--resolution", "5"]).status.code(), Some(2));
}

#[test]
fn curvature_csv_has_one_row_per_interior_node() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "s.json", SPHERE);
    let out = conflab(&["curvature", "--input", &spec]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 1 + 5usize.pow(4));
}

#[test]
fn yamabe_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "s.json", SPHERE);
    let run = |threads: Option<&str>, name: &str| {
        let csv = dir.path().join(name);
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_conflab"));
        cmd.args(["yamabe", "--input", &spec, "--seed", "11", "--csv", csv.to_str().unwrap()]);
        if let Some(t) = threads {
            cmd.env("CONFLAB_THREADS", t);
        }
        let out = cmd.output().unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        (out.stdout, std::fs::read(csv).unwrap())
    };
    let a = run(None, "a.csv");
    let b = run(None, "b.csv");
    let c = run(Some("1"), "c.csv");
    assert_eq!(a, b);
    assert_eq!(a, c);
}

#[test]
fn verify_quick_passes() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("verify.json");
    let out = conflab(&["verify", "--quick", "--out", json.to_str().unwrap()]);
    let table = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{table}");
    assert!(table.contains("0 failed"));
    let rows: Vec<serde_json::Value> = serde_json::from_str(&std::fs::read_to_string(json).unwrap()).unwrap();
    assert!(rows.iter().all(|r| r["pass"] == true));
}
