use std::process::{Command, Output};

fn g2f(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_g2f")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("json report")
}

#[test]
fn heisenberg_homology_example() {
    let out = g2f(&["model", "heisenberg", "--B", "2,0,0;0,2,0;0,0,-4", "--homology"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["schemaVersion"], 1);
    assert_eq!(v["data"]["flags"]["dOmega"], 0.0);
    assert_eq!(v["data"]["flags"]["dTheta"], 0.0);
    assert_eq!(v["data"]["homology"]["group"], "Z^4 + Z/2 + Z/2 + Z/4");
}

#[test]
fn seeded_runs_are_byte_identical() {
    for args in [
        &["scan", "anisotropic", "--samples", "2000", "--seed", "11"][..],
        &["verify", "fueter", "--seed", "5", "--samples", "50"][..],
        &["energy", "--seed", "3", "--samples", "10", "--grid", "4"][..],
        &["verify", "fm", "--seed", "2", "--samples", "40"][..],
    ] {
        let a = g2f(args);
        let b = g2f(args);
        assert_eq!(a.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&a.stdout));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
    let c = g2f(&["scan", "anisotropic", "--samples", "2000", "--seed", "12"]);
    let a = g2f(&["scan", "anisotropic", "--samples", "2000", "--seed", "11"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn exit_codes() {
    assert_eq!(g2f(&["verify", "algebra", "--seed", "7", "--profile", "fast"]).status.code(), Some(0));
    // 2φ is not a calibration
    let doubled = "+2·dx{123} +2·dx{145} +2·dx{167} +2·dx{246} -2·dx{257} -2·dx{347} -2·dx{356}";
    let out = g2f(&["scan", "semical", "--form", doubled, "--samples", "200", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["pass"], false);
    assert_eq!(g2f(&["nonsense"]).status.code(), Some(2));
    assert_eq!(g2f(&["verify", "algebra", "--bogus-flag"]).status.code(), Some(2));
    assert_eq!(g2f(&["scan", "anisotropic"]).status.code(), Some(2));
    assert_eq!(g2f(&["model", "heisenberg", "--B", "1,0,0;0,0,0;0,0,0", "--homology"]).status.code(), Some(2));
    assert_eq!(g2f(&["verify", "models", "--format", "csv"]).status.code(), Some(2));
}

#[test]
fn sweep_csv_and_out_file() {
    let out = g2f(&["fm", "sweep", "--format", "csv", "--count", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("r,rawResidual,normalizedResidual"));
    assert_eq!(text.lines().count(), 6);
    let path = std::env::temp_dir().join(format!("g2f-report-{}.json", std::process::id()));
    let out = g2f(&["solve", "affine", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["data"]["descendsToTorus"], true);
    std::fs::remove_file(path).ok();
}

#[test]
fn solutions_are_fueter() {
    for args in [
        &["solve", "flat-harmonic"][..],
        &["solve", "flat-harmonic", "--harmonic", "newton"][..],
        &["solve", "su2", "--seed", "4", "--samples", "20"][..],
    ] {
        let out = g2f(args);
        assert_eq!(out.status.code(), Some(0), "{args:?}");
    }
}
