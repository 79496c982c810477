use std::fs;
use std::path::PathBuf;
use std::process::Command;

const CFG: &str = r#"{
    "trap": {"depth_d": 2.0, "width_a": 1.0, "mass_m": 0.5},
    "bath": {"g_tilde": 1.0, "n_eps": 24, "n_k": 24},
    "grid": {"t_f": 1.0, "n_t": 48},
    "protocol": "acqudit_linear",
    "bc": {"kind": "velocity", "vf_c": 1.5},
    "sweep": [0.5, 1.0]
}"#;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_acqudit"))
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("acqudit_cli_{name}_{}", std::process::id()));
    let _ = fs::remove_dir_all(&d);
    fs::create_dir_all(&d).unwrap();
    d
}

#[test]
fn validate_passes() {
    let out = bin().arg("validate").output().unwrap();
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "{text}");
    assert!(text.lines().count() >= 8 && !text.contains("FAIL"));
}

#[test]
fn solve_sweep_kernels_write_outputs() {
    let d = scratch("run");
    let cfg = d.join("cfg.json");
    fs::write(&cfg, CFG).unwrap();
    let run = |sub: &str, dir: &str| {
        bin().args([sub, "--config", cfg.to_str().unwrap(), "--out", d.join(dir).to_str().unwrap(), "--jobs", "2"])
            .status()
            .unwrap()
    };
    assert!(run("solve", "solve").success());
    assert!(d.join("solve/trajectory.csv").exists());
    assert!(run("sweep", "sweep").success());
    assert!(d.join("sweep/trajectory_001.csv").exists());
    assert!(d.join("sweep/manifest.json").exists());
    assert!(run("compare", "cmp").success());
    assert_eq!(
        fs::read(d.join("sweep/comparison.csv")).unwrap(),
        fs::read(d.join("cmp/comparison.csv")).unwrap()
    );
    assert!(run("kernels", "k").success());
    assert!(d.join("k/kernels.csv").exists() && d.join("k/tables.csv").exists());
    fs::remove_dir_all(&d).unwrap();
}

#[test]
fn exit_codes() {
    let d = scratch("codes");
    let bad = d.join("bad.json");
    fs::write(&bad, CFG.replace("\"n_t\": 48", "\"n_t\": 5")).unwrap();
    let out = bin().args(["solve", "--config", bad.to_str().unwrap(), "--out", d.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("grid.n_t"));

    let missing = bin().args(["solve", "--config", "/nonexistent.json"]).output().unwrap();
    assert_eq!(missing.status.code(), Some(1));

    // three Neumann terms cannot reach 1e-15
    let tight = d.join("tight.json");
    fs::write(&tight, CFG.replace("\"protocol\"", "\"solver\": {\"series_terms\": 3},\n    \"protocol\"")).unwrap();
    let out = bin()
        .args(["solve", "--config", tight.to_str().unwrap(), "--out", d.to_str().unwrap(), "--tol", "1e-15"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    fs::remove_dir_all(&d).unwrap();
}

#[test]
fn shipped_configs_parse() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut n = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let p = entry.unwrap().path();
        acqudit_core::RunConfig::load(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()));
        n += 1;
    }
    assert!(n >= 10);
}
