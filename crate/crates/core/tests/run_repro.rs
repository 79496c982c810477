use acqudit_core::config::RunConfig;
use acqudit_core::run::{kernels_to_dir, run_to_dir};
use std::fs;
use std::path::PathBuf;

const CFG: &str = r#"{
    "trap": {"depth_D": 2.0, "width_a": 1.0, "mass_m": 0.5},
    "bath": {"g_tilde": 1.0, "n_eps": 24, "n_k": 24},
    "grid": {"t_f": 1.0, "n_t": 48},
    "protocol": "acqudit_linear",
    "bc": {"kind": "velocity", "vf_c": 1.5},
    "sweep": [0.5, 1.0, 2.0]
}"#;

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("acqudit_{name}_{}", std::process::id()));
    let _ = fs::remove_dir_all(&d);
    d
}

fn read_all(dir: &PathBuf) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

#[test]
fn sweep_outputs_are_byte_identical() {
    let cfg = RunConfig::from_json(CFG).unwrap();
    let (a, b) = (scratch("a"), scratch("b"));
    run_to_dir("sweep", &cfg, &a).unwrap();
    run_to_dir("sweep", &cfg, &b).unwrap();
    let (fa, fb) = (read_all(&a), read_all(&b));
    let names: Vec<_> = fa.iter().map(|f| f.0.as_str()).collect();
    assert_eq!(
        names,
        ["comparison.csv", "manifest.json", "trajectory_000.csv", "trajectory_001.csv", "trajectory_002.csv"]
    );
    assert_eq!(fa, fb);

    let manifest: serde_json::Value = serde_json::from_slice(&fa[1].1).unwrap();
    assert_eq!(manifest["content_hash"].as_str().unwrap(), cfg.content_hash());
    assert!(manifest["unit_note"].as_str().unwrap().contains("c = 1/sqrt(2)"));
    assert_eq!(manifest["cells"].as_array().unwrap().len(), 3);

    let comparison = String::from_utf8(fa[0].1.clone()).unwrap();
    assert_eq!(comparison.lines().count(), 4);
    assert!(comparison.starts_with("t_f,survival_opt,survival_const,survival_cdf,J_na,J_bath"));
    fs::remove_dir_all(&a).unwrap();
    fs::remove_dir_all(&b).unwrap();
}

#[test]
fn kernels_dump_has_one_row_per_node() {
    let cfg = RunConfig::from_json(CFG).unwrap();
    let d = scratch("k");
    kernels_to_dir(&cfg, &d).unwrap();
    let k = fs::read_to_string(d.join("kernels.csv")).unwrap();
    assert_eq!(k.lines().count(), 49);
    let t = fs::read_to_string(d.join("tables.csv")).unwrap();
    assert_eq!(t.lines().count(), 1 + 24 * 24);
    fs::remove_dir_all(&d).unwrap();
}

#[test]
fn hash_tracks_content() {
    let a = RunConfig::from_json(CFG).unwrap();
    let b = RunConfig::from_json(&CFG.replace("\"g_tilde\": 1.0", "\"g_tilde\": 0.5")).unwrap();
    assert_ne!(a.content_hash(), b.content_hash());
    let reparsed = RunConfig::from_json(&a.canonical_json()).unwrap();
    assert_eq!(reparsed.content_hash(), a.content_hash());
}

#[test]
fn unknown_fields_rejected() {
    assert!(RunConfig::from_json(&CFG.replace("\"sweep\"", "\"sweeps\"")).is_err());
}
