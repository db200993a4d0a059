use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn spectra1d(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spectra1d"))
        .args(args)
        .env_remove("SPECTRA1D_THREADS")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = spectra1d(args);
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn floats(v: &Value) -> Vec<f64> {
    v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn harmonic_energies() {
    let doc = json(&["one-body", "--trap", "harmonic", "--levels", "5"]);
    assert_eq!(doc["schema"], "v1");
    assert_eq!(doc["command"], "one-body");
    assert!(doc["config_hash"].as_str().unwrap().len() == 16);
    assert!(doc["tolerances"]["commutator"].as_f64().is_some());
    assert_eq!(floats(&doc["result"]["energies"]), vec![0.5, 1.5, 2.5, 3.5, 4.5]);
    assert_eq!(doc["result"]["parity"], serde_json::json!([1, -1, 1, -1, 1]));
}

#[test]
fn identical_runs_are_byte_identical() {
    let args = ["tensor", "--trap", "well", "--cutoff", "5", "--seed", "7"];
    let a = spectra1d(&args);
    let b = spectra1d(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn floats_carry_twelve_significant_digits() {
    let doc = json(&["one-body", "--trap", "well", "--levels", "3"]);
    let e0 = doc["result"]["energies"][0].as_f64().unwrap();
    assert_eq!(e0, 4.93480220054);
    let text = String::from_utf8(spectra1d(&["one-body", "--trap", "well", "--levels", "3", "--format", "csv"]).stdout).unwrap();
    assert!(text.starts_with("# schema=v1 command=one-body config_hash="));
    assert!(text.contains("\n0,4.93480220054e0,"));
}

#[test]
fn weak_coupling_example_in_the_well() {
    let doc = json(&["weak-pt", "--trap", "well", "--n", "5", "--e-cut", "40"]);
    let result = &doc["result"];
    // only [0,0,0,0,0] and [0,0,0,0,1] lie below 40
    assert_eq!(result["reports"].as_array().unwrap().len(), 2);
    assert_eq!(result["max_block_size"], 1);
}

#[test]
fn quartic_five_particle_level_is_not_solvable() {
    let doc = json(&["weak-pt", "--trap", "quartic", "--n", "5", "--e-cut", "25.4"]);
    let reports = doc["result"]["reports"].as_array().unwrap();
    let distinct = reports
        .iter()
        .find(|r| r["multiset"] == serde_json::json!([0, 1, 2, 3, 4]))
        .expect("level 0 1 2 3 4 is reached");
    assert_eq!(distinct["solvable"], false);
    assert_eq!(doc["result"]["solvable"], false);
}

#[test]
fn accidental_levels_are_skipped_unless_merged() {
    let plain = json(&["weak-pt", "--n", "3", "--e-cut", "3.5"]);
    assert_eq!(plain["result"]["skipped_accidental"].as_array().unwrap().len(), 2);
    let merged = json(&["weak-pt", "--n", "3", "--e-cut", "3.5", "--merge"]);
    assert!(merged["result"]["skipped_accidental"].as_array().unwrap().is_empty());
    let reports = merged["result"]["reports"].as_array().unwrap();
    assert_eq!(reports.last().unwrap()["generic"], false);
}

#[test]
fn hexagon_spectrum() {
    let doc = json(&["near-pt", "--n", "3", "--t", "1,1", "--trap", "well"]);
    let mut shifts: Vec<f64> = doc["result"]["report"]["blocks"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|b| {
            let d = b["irrep_dimension"].as_u64().unwrap() as usize;
            floats(&b["eigenvalues"]).into_iter().flat_map(move |e| std::iter::repeat_n(e, d))
        })
        .collect();
    shifts.sort_by(f64::total_cmp);
    assert_eq!(shifts, vec![-2.0, -1.0, -1.0, 1.0, 1.0, 2.0]);
}

#[test]
fn unitary_degeneracy_counts() {
    let doc = json(&["unitary", "--trap", "well", "--n", "3", "--j", "2", "--statistics", "fermion"]);
    assert_eq!(doc["result"]["physical_degeneracy"], 8);
    for level in doc["result"]["levels"].as_array().unwrap() {
        assert_eq!(level["pre_symmetrization_degeneracy"], 6);
    }
}

#[test]
fn exact_diagonalization_sectors() {
    let doc = json(&["xdiag", "--n", "2", "--g", "0,1", "--index-sum", "12"]);
    let spectra = doc["result"]["spectra"].as_array().unwrap();
    assert_eq!(spectra.len(), 4);
    let free_symmetric = &spectra[0];
    assert_eq!(free_symmetric["sector"], serde_json::json!([2]));
    assert_eq!(floats(&free_symmetric["eigenvalues"])[0], 1.0);
    let antisymmetric: Vec<&Value> = spectra.iter().filter(|s| s["sector"] == serde_json::json!([1, 1])).collect();
    assert_eq!(antisymmetric[0]["eigenvalues"], antisymmetric[1]["eigenvalues"]);
    assert!(doc["result"]["commutators"]["permutation"].as_f64().unwrap() < 1e-10);
}

#[test]
fn basis_and_tensor_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let basis = dir.path().join("basis.json");
    let tensor = dir.path().join("tensor.json");

    for trap in ["harmonic", "quartic"] {
        let out = spectra1d(&["one-body", "--trap", trap, "--levels", "6", "--samples", "50", "-o", path_str(&basis)]);
        assert!(out.status.success());
        let back = json(&["one-body", "--import", path_str(&basis)]);
        assert_eq!(back["result"]["imported"], true);
        assert!(back["result"]["orthonormality_residual"].as_f64().unwrap() < 1e-8);
    }

    let out = spectra1d(&["tensor", "--trap", "well", "--cutoff", "4", "-o", path_str(&tensor)]);
    assert!(out.status.success());
    let back = json(&["tensor", "--import", path_str(&tensor)]);
    assert_eq!(back["result"]["invariants_hold"], true);
    assert_eq!(back["result"]["cutoff"], 4);
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    std::fs::write(&config, r#"{"trap": "well", "levels": 3, "format": "json"}"#).unwrap();
    let from_file = json(&["one-body", "--config", path_str(&config)]);
    assert_eq!(from_file["config"]["trap"], "well");
    assert_eq!(from_file["result"]["energies"].as_array().unwrap().len(), 3);
    let overridden = json(&["one-body", "--config", path_str(&config), "--levels", "4", "--trap", "harmonic"]);
    assert_eq!(floats(&overridden["result"]["energies"]), vec![0.5, 1.5, 2.5, 3.5]);

    std::fs::write(&config, r#"{"trap": {"kind": "infinite_well"}, "N": 2}"#).unwrap();
    let from_object = json(&["levels", "--config", path_str(&config), "--e-cut", "30"]);
    assert_eq!(from_object["config"]["n"], 2);
    assert_eq!(from_object["result"]["levels"][0]["multiset"], serde_json::json!([0, 0]));
}

#[test]
fn thread_cap_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_spectra1d"))
        .args(["tensor", "--cutoff", "4", "--threads", "8"])
        .env("SPECTRA1D_THREADS", "1")
        .output()
        .unwrap();
    assert!(out.status.success());
    let bad = Command::new(env!("CARGO_BIN_EXE_spectra1d"))
        .args(["tensor", "--cutoff", "4"])
        .env("SPECTRA1D_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn exit_codes() {
    assert_eq!(spectra1d(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(spectra1d(&["one-body", "--no-such-flag"]).status.code(), Some(2));
    assert_eq!(spectra1d(&["levels", "--n", "0"]).status.code(), Some(2));
    assert_eq!(spectra1d(&["levels", "--e-cut", "-1"]).status.code(), Some(2));
    assert_eq!(spectra1d(&["one-body", "--trap", "cone"]).status.code(), Some(2));
    assert_eq!(spectra1d(&["verify", "--only", "11"]).status.code(), Some(2));

    let domain = spectra1d(&["near-pt", "--n", "4", "--t", "1,2,3"]);
    assert_eq!(domain.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&domain.stderr).contains("unitary_limit"));
    let coverage = spectra1d(&["levels", "--levels", "3", "--e-cut", "100"]);
    assert_eq!(coverage.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&coverage.stderr).contains("weak_coupling"));
    assert_eq!(spectra1d(&["--help"]).status.code(), Some(0));
}

#[test]
fn quick_verification_passes() {
    let out = spectra1d(&["verify", "--quick"]);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(out.status.success(), "{stderr}");
    assert_eq!(stderr.lines().filter(|l| l.starts_with("[PASS]")).count(), 10);
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["result"]["all_passed"], true);
}
