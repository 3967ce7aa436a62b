use std::fs;
use std::path::PathBuf;
use std::process::Command;

fn timebin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_timebin"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    dir.join(name)
}

fn program(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("programs").join(name)
}

#[test]
fn run_writes_json() {
    let out = scratch("hom.json");
    let status = timebin()
        .arg("run")
        .arg(program("hom.tbl"))
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap();
    for key in ["distribution", "success_probability", "norm_trace", "schema"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn run_with_shots_is_seeded() {
    let go = || {
        timebin()
            .arg("run")
            .arg(program("hom_partial.tbl"))
            .args(["--shots", "500", "--seed", "4"])
            .output()
            .unwrap()
    };
    let (a, b) = (go(), go());
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    let total: u64 = v["samples"]["counts"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["shots"].as_u64().unwrap())
        .sum();
    assert_eq!(total, 500);
}

#[test]
fn truth_table_csv_is_ideal_permutation() {
    let out = timebin()
        .args([
            "truth-table",
            "--gate",
            "cphase-postselected",
            "--basis-in",
            "HV,AD",
            "--basis-out",
            "HV,AD",
        ])
        .args(["--alpha", "1.0"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("input,HA,HD,VA,VD"));
    let expected = [
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, 1.0, 0.0],
    ];
    for (line, row) in lines.zip(expected) {
        let values: Vec<f64> = line.split(',').skip(1).map(|x| x.parse().unwrap()).collect();
        for (v, e) in values.iter().zip(row) {
            assert!((v - e).abs() < 1e-12, "{line}");
        }
    }
}

#[test]
fn fit_alpha_round_trips_simulated_tables() {
    let tables = timebin::analysis::simulate_tables(0.91).unwrap();
    let path = scratch("tables.json");
    fs::write(&path, serde_json::to_string(&tables).unwrap()).unwrap();
    let out = timebin()
        .arg("fit-alpha")
        .arg("--measured")
        .arg(&path)
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["alpha"].as_f64(), Some(0.91));
    assert_eq!(v["l1_distance"].as_f64(), Some(0.0));

    let out = timebin().arg("fidelity").arg("--measured").arg(&path).output().unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["nonclassical"].as_bool(), Some(true));
}

#[test]
fn demos_run() {
    for gate in timebin::gates::GATE_NAMES {
        let out = timebin().args(["demo", gate]).output().unwrap();
        assert!(out.status.success(), "{gate}");
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert!(v["success_probability"].as_f64().unwrap() > 0.0);
    }
}

#[test]
fn exit_codes() {
    assert_eq!(timebin().arg("frobnicate").output().unwrap().status.code(), Some(2));
    assert_eq!(
        timebin()
            .args(["truth-table", "--basis-in", "XY,HV"])
            .output()
            .unwrap()
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        timebin()
            .args(["fidelity", "--alpha", "1.5"])
            .output()
            .unwrap()
            .status
            .code(),
        Some(1)
    );
    let bad = scratch("bad.tbl");
    fs::write(&bad, "MODES bins=1\nWOBBLE bin=1\n").unwrap();
    let out = timebin().arg("run").arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}
