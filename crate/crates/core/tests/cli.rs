use std::process::{Command, Output};

use nc_cloning::cli::{RunReport, Verdict};
use nc_cloning::scan::CurveSeries;

fn nc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nc-cloning"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn region_names_matching_mode() {
    let o = nc(&["region", "--v", "0.015"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(
        text.contains("best_matching_mode: thm2-direct/ideal-overlap"),
        "{text}"
    );
    assert!(
        text.contains("mode: thm2-direct/observed-confusability"),
        "{text}"
    );
    assert!(
        text.contains("reference_interval_within_0.05: pass"),
        "{text}"
    );
}

#[test]
fn region_other_modes() {
    let o = nc(&[
        "--json",
        "region",
        "--v",
        "0.015",
        "--err-mode",
        "appendix-err",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let r: RunReport = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r.outputs["interval"], "empty");
    let o = nc(&["--json", "region", "--v", "0.2"]);
    let r: RunReport = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(
        r.verdicts["reference_interval_within_0.05"],
        Verdict::Skipped
    );
}

#[test]
fn bounds_at_zero_overlap() {
    let o = nc(&["--json", "bounds", "--c", "0"]);
    assert_eq!(o.status.code(), Some(0));
    let r: RunReport = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r.outputs["quantum_optimal"], 1.0);
    assert_eq!(r.outputs["noncontextual_ideal"], 1.0);
}

#[test]
fn bounds_with_noise() {
    let o = nc(&["--json", "bounds", "--c", "0.5", "--v", "0.015"]);
    let r: RunReport = serde_json::from_slice(&o.stdout).unwrap();
    let q = r.outputs["quantum_noisy"].as_f64().unwrap();
    assert!((q - 0.950_471_858_27).abs() < 1e-10);
    assert!(
        r.outputs["advantage_by_mode"]["thm2-direct/ideal-overlap"]
            .as_f64()
            .unwrap()
            > 0.0
    );
}

#[test]
fn verify_ontic_passes() {
    let o = nc(&[
        "--json",
        "verify-ontic",
        "--c",
        "0.5",
        "--resolution",
        "200",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let r: RunReport = serde_json::from_slice(&o.stdout).unwrap();
    let f = r.outputs["f_global"].as_f64().unwrap();
    assert!((f - 0.875).abs() <= 0.04);
    assert!(r.verdicts.values().all(|v| *v == Verdict::Pass));
}

#[test]
fn verify_ontic_reports_snapping() {
    let o = nc(&[
        "--json",
        "verify-ontic",
        "--c",
        "0.333",
        "--resolution",
        "20",
    ]);
    let r: RunReport = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r.warnings.len(), 1);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn verify_quantum_passes() {
    for c in ["0", "0.3", "1"] {
        let o = nc(&["verify-quantum", "--v", "0.1", "--c", c]);
        assert_eq!(o.status.code(), Some(0), "c={c}: {}", stdout(&o));
    }
}

#[test]
fn clones_and_noise_and_critical_noise() {
    assert_eq!(nc(&["clones", "--c", "0.7"]).status.code(), Some(0));
    assert_eq!(
        nc(&["noise", "--v", "0.015", "--c", "0.4"]).status.code(),
        Some(0)
    );
    let o = nc(&["--json", "critical-noise", "--c", "0.5"]);
    assert_eq!(o.status.code(), Some(0));
    let r: RunReport = serde_json::from_slice(&o.stdout).unwrap();
    assert!(r.outputs["v_star"].as_f64().unwrap() >= 0.015);
}

#[test]
fn reports_are_byte_identical() {
    for args in [
        &["region", "--v", "0.02"][..],
        &[
            "--json",
            "verify-ontic",
            "--c",
            "0.25",
            "--resolution",
            "40",
            "--seed",
            "9",
        ],
        &["bounds", "--c", "0.4", "--v", "0.1"],
    ] {
        assert_eq!(nc(args).stdout, nc(args).stdout);
    }
}

#[test]
fn argument_errors() {
    let o = nc(&["region", "--v", "0.015", "--unknown"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
    assert_eq!(nc(&["bounds", "--c", "-0.1"]).status.code(), Some(2));
    assert_eq!(
        nc(&["region", "--v", "0.1", "--c-mode", "sideways"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        nc(&["curves", "--out", "x", "--points", "2"]).status.code(),
        Some(2)
    );
    assert_eq!(nc(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn curves_csv_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = nc(&["curves", "--out", out, "--format", "csv", "--points", "50"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let q = std::fs::read_to_string(dir.path().join("tradeoff_quantum.csv")).unwrap();
    assert!(q.starts_with("x,y\n"));
    assert_eq!(q.lines().count(), 51);
    let regions = std::fs::read_to_string(
        dir.path()
            .join("regions_thm2-direct_observed-confusability.csv"),
    )
    .unwrap();
    assert!(regions.starts_with("v,c_lo,c_hi\n"));
    let noise = std::fs::read_to_string(
        dir.path()
            .join("noise_resistance_err-prime_ideal-overlap.csv"),
    )
    .unwrap();
    // endpoints are excluded from the critical-noise curve
    assert_eq!(noise.lines().count(), 49);
}

#[test]
fn curves_json_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = nc(&["curves", "--out", out, "--format", "json", "--points", "20"]);
    assert_eq!(o.status.code(), Some(0));
    for entry in std::fs::read_dir(dir.path()).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        if name.starts_with("regions") {
            continue;
        }
        let text = std::fs::read_to_string(&path).unwrap();
        let series = CurveSeries::from_json(&text).unwrap();
        assert_eq!(series.to_json(), text, "{name}");
    }
}
