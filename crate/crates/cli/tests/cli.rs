use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn cliffrac(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cliffrac"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn json_file(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn gen_surface_writes_spec_and_voxels() {
    let dir = TempDir::new().unwrap();
    let o = cliffrac(&["gen-surface", "--alpha", "2", "--beta", "3", "--depth", "7", "--json"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let summary: Value = serde_json::from_slice(&o.stdout).unwrap();
    // the default bounds span two units per axis
    assert_eq!(summary["cells"], 256 * 256);
    let spec = json_file(&dir.path().join("surface.json"));
    assert_eq!(spec["alpha"], 2.0);
    assert_eq!(spec["beta"], 3.0);
    assert!(dir.path().join("voxels.bin").metadata().unwrap().len() > 128 * 128);
}

#[test]
fn bad_exponent_is_a_parameter_error() {
    let dir = TempDir::new().unwrap();
    let o = cliffrac(&["gen-surface", "--alpha", "0.5", "--beta", "3"], dir.path());
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("alpha"));
    let o = cliffrac(&["gen-surface", "--no-such-flag"], dir.path());
    assert_eq!(code(&o), 2);
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    for dir in [&a, &b] {
        let o = cliffrac(&["gen-surface", "--alpha", "2", "--beta", "3", "--depth", "7"], dir.path());
        assert_eq!(code(&o), 0);
        let spec = dir.path().join("surface.json");
        let vox = dir.path().join("voxels.bin");
        let o = cliffrac(
            &["estimate", "--spec", spec.to_str().unwrap(), "--voxels", vox.to_str().unwrap(), "--theory"],
            dir.path(),
        );
        assert_eq!(code(&o), 0);
        let o = cliffrac(&["solve", "--depth", "6", "--seed", "3"], dir.path());
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    let mut names: Vec<_> = fs::read_dir(a.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.len() >= 10);
    for name in names {
        let x = fs::read(a.path().join(&name)).unwrap();
        let y = fs::read(b.path().join(&name)).unwrap();
        assert!(x == y, "{name:?} differs between runs");
    }
}

#[test]
fn estimate_reports_family_values_with_theory() {
    let dir = TempDir::new().unwrap();
    let o = cliffrac(&["estimate", "--alpha", "2", "--beta", "3", "--depth", "10", "--theory"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = json_file(&dir.path().join("estimate.json"));
    assert!((r["theory"]["dim"].as_f64().unwrap() - 1.5).abs() < 1e-12);
    assert!((r["theory"]["m_lower"].as_f64().unwrap() - 0.75).abs() < 1e-12);
    assert!((r["dimension"]["value"].as_f64().unwrap() - 1.5).abs() < 0.1);
    assert!(r["exponent_inner_exact"]["value"].as_f64().unwrap() >= 0.70);
    for f in ["box_counts.csv", "volume_inner.csv", "volume_outer.csv", "box_counts.svg"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let csv = fs::read_to_string(dir.path().join("box_counts.csv")).unwrap();
    assert!(csv.starts_with("k,N_k\n"));
}

#[test]
fn estimate_calibrates_on_the_disk_from_voxels_alone() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&cliffrac(&["gen-surface", "--shape", "ball", "--depth", "10"], dir.path())), 0);
    let vox = dir.path().join("voxels.bin");
    let o = cliffrac(&["estimate", "--voxels", vox.to_str().unwrap()], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = json_file(&dir.path().join("estimate.json"));
    assert!((r["dimension"]["value"].as_f64().unwrap() - 1.0).abs() < 0.05);
    assert!((r["exponent_inner"]["value"].as_f64().unwrap() - 1.0).abs() < 0.05);
}

#[test]
fn missing_input_is_an_io_error() {
    let dir = TempDir::new().unwrap();
    let o = cliffrac(&["estimate", "--voxels", "/nonexistent/voxels.bin"], dir.path());
    assert_eq!(code(&o), 3);
    let o = cliffrac(&["report"], dir.path());
    assert_eq!(code(&o), 3);
}

#[test]
fn tight_stderr_limit_is_a_fit_failure() {
    let dir = TempDir::new().unwrap();
    let o = cliffrac(&["estimate", "--shape", "ball", "--depth", "8", "--max-stderr", "1e-9"], dir.path());
    assert_eq!(code(&o), 4);
    assert!(dir.path().join("estimate.json").exists());
}

#[test]
fn zero_jet_solves_exactly() {
    let dir = TempDir::new().unwrap();
    let o = cliffrac(&["solve", "--depth", "6", "--poly", "zero", "--json"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = json_file(&dir.path().join("report.json"));
    assert_eq!(r["summary"]["max_err"], 0.0);
    for p in r["probes"].as_array().unwrap() {
        assert_eq!(p["rel_err"], 0.0);
    }
}

#[test]
fn rejected_gate_prints_the_margin() {
    let dir = TempDir::new().unwrap();
    let o = cliffrac(&["solve", "--alpha", "2", "--beta", "3", "--nu", "0.1", "--depth", "6"], dir.path());
    assert_eq!(code(&o), 5);
    assert!(String::from_utf8_lossy(&o.stderr).contains("margin -"));
}

#[test]
fn unreachable_tolerance_fails_verification() {
    let dir = TempDir::new().unwrap();
    let o = cliffrac(&["verify", "--depth", "6", "--tolerance", "1e-6"], dir.path());
    assert_eq!(code(&o), 6);
    assert!(dir.path().join("report.json").exists());
    let o = cliffrac(&["report"], dir.path());
    assert_eq!(code(&o), 0);
    assert!(fs::read_to_string(dir.path().join("report.md")).unwrap().contains("passed: false"));
}

#[test]
fn refinement_lowers_the_median_error() {
    let median = |depth: &str| {
        let dir = TempDir::new().unwrap();
        let o = cliffrac(&["verify", "--poly", "identity", "--depth", depth, "--tolerance", "1"], dir.path());
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        json_file(&dir.path().join("report.json"))["summary"]["median_err"].as_f64().unwrap()
    };
    let (m6, m7) = (median("6"), median("7"));
    assert!(m7 < m6, "median {m6} at depth 6, {m7} at depth 7");
}

#[test]
fn flags_override_the_config_file() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"alpha": 2.0, "beta": 3.0, "depth": 9, "m_max": 5}"#).unwrap();
    let o = cliffrac(&["gen-surface", "--config", cfg.to_str().unwrap(), "--depth", "6", "--json"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let summary: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(summary["depth"], 6);
    assert_eq!(summary["shape"]["family"]["m_max"], 5);
    let merged = json_file(&dir.path().join("config.json"));
    assert_eq!(merged["depth"], 6);
    assert_eq!(merged["alpha"], 2.0);

    fs::write(&cfg, r#"{"alpha": 2.0, "typo": 1}"#).unwrap();
    let o = cliffrac(&["gen-surface", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(code(&o), 2);
}
