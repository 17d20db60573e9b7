use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn freeboundary(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_freeboundary"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("FREEBOUND_OUT")
        .output()
        .unwrap()
}

fn report(dir: &Path) -> Value {
    let mut v: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap();
    v.as_object_mut().unwrap().remove("timestamp");
    v
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ok = freeboundary(
        &[
            "verify",
            "--surface",
            "critical-catenoid",
            "--grid",
            "16x16",
        ],
        dir.path(),
    );
    assert_eq!(
        ok.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&ok.stderr)
    );
    let bad = freeboundary(
        &[
            "verify",
            "--surface",
            "noncritical-catenoid:0.9",
            "--grid",
            "16x16",
        ],
        dir.path(),
    );
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("FAIL"));
    // report never asserts
    let rep = freeboundary(
        &[
            "report",
            "--surface",
            "noncritical-catenoid:0.9",
            "--grid",
            "16x16",
        ],
        dir.path(),
    );
    assert_eq!(rep.status.code(), Some(0));
    let usage = freeboundary(&["verify", "--grid", "4x4"], dir.path());
    assert_eq!(usage.status.code(), Some(2));
    let unknown = freeboundary(&["verify", "--surface", "torus"], dir.path());
    assert_eq!(unknown.status.code(), Some(2));
}

#[test]
fn extension_mesh_has_one_group_per_piece() {
    let dir = tempfile::tempdir().unwrap();
    let o = freeboundary(
        &[
            "extend", "--steps", "8", "--grid", "16x8", "--export", "obj,csv",
        ],
        dir.path(),
    );
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let obj = std::fs::read_to_string(dir.path().join("mesh.obj")).unwrap();
    assert_eq!(obj.lines().filter(|l| l.starts_with("o ")).count(), 9);
    let csv = std::fs::read_to_string(dir.path().join("grid.csv")).unwrap();
    assert!(csv.starts_with("x,y,X,Y,psi1,psi2,psi3"));
    let r = report(dir.path());
    assert_eq!(r["bounds"], serde_json::json!([-7, 9]));
}

#[test]
fn reports_do_not_depend_on_threads() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = [
        "verify",
        "--surface",
        "critical-catenoid",
        "--grid",
        "16x16",
        "--steps",
        "4",
    ];
    let one: Vec<&str> = args.iter().copied().chain(["--threads", "1"]).collect();
    let four: Vec<&str> = args.iter().copied().chain(["--threads", "4"]).collect();
    assert_eq!(freeboundary(&one, a.path()).status.code(), Some(0));
    assert_eq!(freeboundary(&four, b.path()).status.code(), Some(0));
    assert_eq!(report(a.path()), report(b.path()));
    let raw = std::fs::read_to_string(a.path().join("report.json")).unwrap();
    assert!(raw.contains("e-"), "floats are written in exponent form");
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "# run settings\nsurface = noncritical-catenoid:0.9\ngrid = 16x16\nsteps = 2\n",
    )
    .unwrap();
    let cfg_arg = cfg.to_str().unwrap();
    let from_file = freeboundary(&["verify", "--config", cfg_arg], dir.path());
    assert_eq!(from_file.status.code(), Some(1));
    let overridden = freeboundary(
        &[
            "verify",
            "--config",
            cfg_arg,
            "--surface",
            "critical-catenoid",
        ],
        dir.path(),
    );
    assert_eq!(overridden.status.code(), Some(0));
    assert_eq!(report(dir.path())["surface"], "critical-catenoid");
    std::fs::write(&cfg, "grid = 16\n").unwrap();
    assert_eq!(
        freeboundary(&["verify", "--config", cfg_arg], dir.path())
            .status
            .code(),
        Some(2)
    );
}
