use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_disclosure");

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn run_in(cmd: &str, config: &Path, out: &Path) -> Output {
    run(&[cmd, "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap(), "--quiet"])
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn crawford_sobel_weak_check_exits_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&["check", "--config", fixture("cs_weak.toml").to_str().unwrap(), "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let s = stdout(&o);
    assert!(s.lines().any(|l| l.starts_with("weak ") && l.contains("HOLDS")), "{s}");
    assert!(s.lines().any(|l| l.starts_with("linear_receiver.kolotilin") && l.contains("VIOLATED")), "{s}");
}

#[test]
fn crra_suboptimal_check_exits_two_with_witness() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&[
        "check",
        "--config",
        fixture("crra_suboptimal.toml").to_str().unwrap(),
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let s = stdout(&o);
    assert!(s.lines().any(|l| l.starts_with("weak ") && l.contains("VIOLATED")), "{s}");
    assert!(s.contains("WITNESS_FOUND") && s.contains("witness states {1, 2}"), "{s}");
}

#[test]
fn empty_checks_list_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "c.toml", "checks = []\n[model]\nfamily = \"quadratic_cs\"\nb = 0.2\n");
    let o = run_in("check", &cfg, &tmp.path().join("out"));
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("configuration error") || stderr(&o).contains("checks list is empty"), "{}", stderr(&o));
}

#[test]
fn malformed_config_exits_one() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "c.toml", "[model\nfamily = ");
    assert_eq!(run_in("check", &cfg, &tmp.path().join("out")).status.code(), Some(1));
    let missing = tmp.path().join("nope.toml");
    assert_eq!(run_in("check", &missing, &tmp.path().join("out")).status.code(), Some(1));
}

#[test]
fn four_state_prior_is_unsupported_by_the_oracle() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "c.toml",
        "[model]\nfamily = \"quadratic_cs\"\nb = 0.1\n[prior]\nsupport = [0.0, 0.25, 0.5, 1.0]\nprobabilities = [0.25, 0.25, 0.25, 0.25]\n",
    );
    let o = run_in("oracle", &cfg, &tmp.path().join("out"));
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("unsupported support size 4"), "{}", stderr(&o));
}

#[test]
fn unbiased_binary_oracle_is_optimal_and_plots_the_chord() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run_in("oracle", &fixture("cs_binary.toml"), tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let svg = std::fs::read_to_string(tmp.path().join("envelope.svg")).unwrap();
    assert!(svg.starts_with("<?xml") && svg.contains("<polyline") && svg.contains("FULL_DISCLOSURE_OPTIMAL"));
    let samples = std::fs::read_to_string(tmp.path().join("envelope_samples.csv")).unwrap();
    // v(p) = -p(1-p) at every sampled posterior
    for line in samples.lines().skip(2) {
        let cells: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        let p = cells[1];
        assert!((cells[2] + p * (1.0 - p)).abs() < 1e-12, "{line}");
    }
}

#[test]
fn crra_suboptimal_oracle_reports_a_negative_certificate() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run_in("oracle", &fixture("crra_suboptimal.toml"), tmp.path());
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let verdict = std::fs::read_to_string(tmp.path().join("oracle_verdict.csv")).unwrap();
    let row: Vec<&str> = verdict.lines().nth(2).unwrap().split(',').collect();
    assert_eq!(row[0], "FULL_DISCLOSURE_SUBOPTIMAL");
    assert!(row[5].parse::<f64>().unwrap() < 0.0);
}

#[test]
fn regime_map_single_optimal_point() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "r.toml",
        "[model]\nfamily = \"crra\"\ngamma = 0.5\nrho = 0.0\ndelta = 0.5\nkappa = 0.5\n[regime_map]\ngamma = [0.5, 0.5]\nrho = [0.0, 0.0]\nresolution = 1\nvalidate_every = 1\n",
    );
    let o = run_in("regime-map", &cfg, &tmp.path().join("out"));
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = std::fs::read_to_string(tmp.path().join("out/regime_map.csv")).unwrap();
    let row = csv.lines().nth(2).unwrap();
    assert!(row.contains(",OPTIMAL,true,HOLDS"), "{row}");
}

#[test]
fn regime_map_crossing_one_without_band_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "r.toml",
        "[model]\nfamily = \"crra\"\ngamma = 0.5\nrho = 0.0\ndelta = 0.5\nkappa = 0.5\n[regime_map]\nband = 0.0\n",
    );
    let o = run_in("regime-map", &cfg, &tmp.path().join("out"));
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("contains 1"), "{}", stderr(&o));
}

#[test]
fn grid_and_format_flags_are_honoured() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&[
        "check",
        "--config",
        fixture("cs_binary.toml").to_str().unwrap(),
        "--out",
        tmp.path().to_str().unwrap(),
        "--grid",
        "11x21",
        "--format",
        "csv",
        "-q",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(tmp.path().join("verdicts.csv").exists());
    assert!(!tmp.path().join("verdicts.jsonl").exists());
    let csv = std::fs::read_to_string(tmp.path().join("verdicts.csv")).unwrap();
    assert!(csv.lines().nth(2).unwrap().ends_with(",11,21"), "{csv}");
    assert_eq!(run(&["check", "--config", "x", "--grid", "11"]).status.code(), Some(1));
}

#[test]
fn verify_round_trip_and_tamper_detection() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let o = run_in("check", &fixture("crra_optimal.toml"), &out);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = run(&["verify", "--out", out.to_str().unwrap(), "--config", fixture("crra_optimal.toml").to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(0), "{}", stdout(&v));
    assert!(stdout(&v).contains("0 mismatches"));

    let wrong = run(&["verify", "--out", out.to_str().unwrap(), "--config", fixture("cs_weak.toml").to_str().unwrap()]);
    assert_eq!(wrong.status.code(), Some(2));

    let path = out.join("verdicts.jsonl");
    let text = std::fs::read_to_string(&path).unwrap().replacen("HOLDS_STRICTLY", "VIOLATED", 1);
    std::fs::write(&path, text).unwrap();
    let tampered = run(&["verify", path.to_str().unwrap()]);
    assert_eq!(tampered.status.code(), Some(2));
    assert!(stdout(&tampered).contains("MISMATCH"));
}

#[test]
fn verify_regime_map_records() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let o = run(&["regime-map", "--out", out.to_str().unwrap(), "--seed", "7", "-q"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = run(&["verify", "--out", out.to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(0), "{}", stdout(&v));
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert!(stdout(&run(&["--version"])).contains(env!("CARGO_PKG_VERSION")));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
}
