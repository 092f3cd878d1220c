//! End-to-end tests of the `gwre` binary: exit codes, CSV round-trips,
//! determinism, precision modes.

use gwre_cli::csvio::read_csv;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gwre"))
}

fn write_cfg(dir: &Path, name: &str, json: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, json).unwrap();
    path
}

fn run_ok(out: &Output) {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn phi_hand_values_and_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        dir.path(),
        "c.json",
        r#"{"environment": {"two_poly": 0.2}, "phi": {"J": 3, "N": 3}}"#,
    );
    let csv = dir.path().join("phi.csv");
    let out = bin()
        .args(["phi", "--config"])
        .arg(&cfg)
        .arg("--output")
        .arg(&csv)
        .output()
        .unwrap();
    run_ok(&out);
    let table = read_csv(&csv).unwrap();
    assert_eq!(table.columns, vec!["n", "j", "phi"]);
    assert!(table
        .meta
        .iter()
        .any(|(k, v)| k == "precision" && v == "standard"));
    let find = |n: f64, j: f64| -> f64 {
        table
            .rows
            .iter()
            .find(|r| r[0] == n && r[1] == j)
            .map(|r| r[2])
            .unwrap()
    };
    assert!((find(2.0, 1.0) - 2.0).abs() < 1e-12);
    assert!((find(3.0, 1.0) - 65.0 / 36.0).abs() < 1e-12);
    assert!((find(3.0, 2.0) - 20.0 / 11.0).abs() < 1e-12);
}

#[test]
fn explicit_members_match_shorthand() {
    let dir = tempfile::tempdir().unwrap();
    let shorthand = write_cfg(
        dir.path(),
        "a.json",
        r#"{"environment": {"two_poly": 0.2}, "phi": {"J": 4, "N": 40}}"#,
    );
    let explicit = write_cfg(
        dir.path(),
        "b.json",
        r#"{"environment": {"members": [
            {"weight": 0.5, "probs": [0.2, 0.8]},
            {"weight": 0.5, "probs": [0.6, 0, 0.4]}
        ]}, "phi": {"J": 4, "N": 40}}"#,
    );
    let csv_a = dir.path().join("a.csv");
    let csv_b = dir.path().join("b.csv");
    for (cfg, csv) in [(&shorthand, &csv_a), (&explicit, &csv_b)] {
        let out = bin()
            .args(["phi", "--config"])
            .arg(cfg)
            .arg("--output")
            .arg(csv)
            .output()
            .unwrap();
        run_ok(&out);
    }
    let a = read_csv(&csv_a).unwrap();
    let b = read_csv(&csv_b).unwrap();
    assert_eq!(a.rows, b.rows);
}

#[test]
fn weight_deficit_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        dir.path(),
        "c.json",
        r#"{"environment": {"members": [
            {"weight": 0.5, "probs": [0.2, 0.8]},
            {"weight": 0.4, "probs": [0.6, 0, 0.4]}
        ]}, "phi": {"J": 2, "N": 4}}"#,
    );
    let out = bin()
        .args(["phi", "--config"])
        .arg(&cfg)
        .args(["--output", "/tmp/unused.csv"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("weights sum"), "{stderr}");
}

#[test]
fn malformed_json_exits_2_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "c.json", r#"{"environment": {"two_poly": }}"#);
    let out = bin()
        .args(["phi", "--config"])
        .arg(&cfg)
        .args(["--output", "/tmp/unused.csv"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("column"));
}

#[test]
fn missing_section_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "c.json", r#"{"environment": {"two_poly": 0.2}}"#);
    let out = bin()
        .args(["density", "--config"])
        .arg(&cfg)
        .args(["--output", "/tmp/unused.csv"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("density"));
}

#[test]
fn density_roundtrip_and_self_compare() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        dir.path(),
        "c.json",
        r#"{"environment": {"two_poly": 0.2},
            "phi": {"J": 6, "N": 200},
            "density": {"J": 6, "M": 150, "x": {"min": 0.2, "max": 1.0, "step": 0.2}}}"#,
    );
    let csv = dir.path().join("d.csv");
    let out = bin()
        .args(["density", "--config"])
        .arg(&cfg)
        .arg("--output")
        .arg(&csv)
        .output()
        .unwrap();
    run_ok(&out);

    let cmp = dir.path().join("cmp.csv");
    let out = bin()
        .args(["compare"])
        .arg(&csv)
        .arg(&csv)
        .arg("--output")
        .arg(&cmp)
        .output()
        .unwrap();
    run_ok(&out);
    let table = read_csv(&cmp).unwrap();
    assert_eq!(
        table.columns,
        vec!["x", "p_a", "p_b", "abs_diff", "rel_diff"]
    );
    assert!(table.column("abs_diff").unwrap().iter().all(|&d| d == 0.0));
    assert!(table
        .meta
        .iter()
        .any(|(k, v)| k == "max_rel_diff" && v.starts_with("0")));
    // ... and the written values parse back to the exact computed floats
    assert_eq!(
        table.column("p_a").unwrap(),
        read_csv(&csv).unwrap().column("p").unwrap()
    );
}

#[test]
fn simulate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        dir.path(),
        "c.json",
        r#"{"environment": {"two_poly": 0.4},
            "simulate": {"t": 8, "trials": 30000, "seed": 11, "bins": 25}}"#,
    );
    let c1 = dir.path().join("s1.csv");
    let c2 = dir.path().join("s2.csv");
    for csv in [&c1, &c2] {
        let out = bin()
            .args(["simulate", "--config"])
            .arg(&cfg)
            .arg("--output")
            .arg(csv)
            .output()
            .unwrap();
        run_ok(&out);
    }
    assert_eq!(
        std::fs::read(&c1).unwrap(),
        std::fs::read(&c2).unwrap(),
        "same seed must give identical output"
    );
}

#[test]
fn compare_mismatched_grids_needs_interpolate() {
    let dir = tempfile::tempdir().unwrap();
    let mk = |name: &str, step: f64| -> PathBuf {
        let cfg = write_cfg(
            dir.path(),
            &format!("{name}.json"),
            &format!(
                r#"{{"environment": {{"two_poly": 0.2}},
                    "phi": {{"J": 4, "N": 150}},
                    "density": {{"J": 4, "M": 120, "x": {{"min": 0.2, "max": 1.0, "step": {step}}}}}}}"#
            ),
        );
        let csv = dir.path().join(format!("{name}.csv"));
        let out = bin()
            .args(["density", "--config"])
            .arg(&cfg)
            .arg("--output")
            .arg(&csv)
            .output()
            .unwrap();
        run_ok(&out);
        csv
    };
    let fine = mk("fine", 0.1);
    let coarse = mk("coarse", 0.2);

    let cmp = dir.path().join("cmp.csv");
    let out = bin()
        .args(["compare"])
        .arg(&fine)
        .arg(&coarse)
        .arg("--output")
        .arg(&cmp)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = bin()
        .args(["compare"])
        .arg(&fine)
        .arg(&coarse)
        .arg("--output")
        .arg(&cmp)
        .arg("--interpolate")
        .output()
        .unwrap();
    run_ok(&out);
    let table = read_csv(&cmp).unwrap();
    assert_eq!(table.rows.len(), 5); // coarser grid: 0.2, 0.4, ..., 1.0
    // same curve sampled on nested grids: interpolation error only
    assert!(table.column("rel_diff").unwrap().iter().all(|&r| r < 5e-3));
}

#[test]
fn extended_and_standard_agree() {
    let dir = tempfile::tempdir().unwrap();
    let mk = |precision: &str| -> PathBuf {
        let cfg = write_cfg(
            dir.path(),
            &format!("{precision}.json"),
            &format!(
                r#"{{"environment": {{"two_poly": 0.2}},
                    "phi": {{"J": 6, "N": 120}},
                    "precision": "{precision}"}}"#
            ),
        );
        let csv = dir.path().join(format!("{precision}.csv"));
        let out = bin()
            .args(["b", "--config"])
            .arg(&cfg)
            .arg("--output")
            .arg(&csv)
            .output()
            .unwrap();
        run_ok(&out);
        csv
    };
    let std_csv = read_csv(&mk("standard")).unwrap();
    let ext_csv = read_csv(&mk("extended")).unwrap();
    for (a, b) in std_csv.rows.iter().zip(&ext_csv.rows) {
        assert!(((a[1] - b[1]) / b[1]).abs() < 1e-12, "{a:?} vs {b:?}");
    }
    // extended rows carry ~34 significant digits
    let text = std::fs::read_to_string(dir.path().join("extended.csv")).unwrap();
    let line = text.lines().find(|l| l.starts_with("2,")).unwrap();
    let mantissa = line.split(',').nth(1).unwrap().split('e').next().unwrap();
    assert!(
        mantissa.trim_start_matches('-').len() >= 34,
        "expected 34 digits, got {mantissa}"
    );
}

#[test]
fn amplitudes_with_richardson() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(
        dir.path(),
        "c.json",
        r#"{"environment": {"two_poly": 0.2},
            "phi": {"J": 3, "N": 400},
            "amplitudes": {"M": 200, "richardson": true}}"#,
    );
    let csv = dir.path().join("amps.csv");
    let out = bin()
        .args(["amplitudes", "--config"])
        .arg(&cfg)
        .arg("--output")
        .arg(&csv)
        .output()
        .unwrap();
    run_ok(&out);
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.contains("richardson,200,360")); // M2 = round(200 * 1.8)
    let alpha_line = text
        .lines()
        .find(|l| l.starts_with("1,"))
        .unwrap()
        .split(',')
        .nth(1)
        .unwrap()
        .parse::<f64>()
        .unwrap();
    assert!((alpha_line - 0.5588831570834294).abs() < 1e-12);
}

#[test]
fn unstable_reference_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    // depth 12 cannot reach y = 200 when E = 1.4
    let cfg = write_cfg(
        dir.path(),
        "c.json",
        r#"{"environment": {"two_poly": 0.6},
            "reference": {"t": 12, "y_max": 200, "dy": 0.5,
                          "x": {"min": 0.5, "max": 1.0, "step": 0.5}}}"#,
    );
    let out = bin()
        .args(["reference", "--config"])
        .arg(&cfg)
        .args(["--output", "/tmp/unused.csv"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("increase t"), "{stderr}");
}
