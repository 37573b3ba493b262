use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn run_in(dir: &Path, name: &str, config: &str, extra: &[&str]) -> Output {
    let cfg = dir.join(format!("{name}.cfg"));
    fs::write(&cfg, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_markovlab"))
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(dir.join("out"))
        .args(extra)
        .output()
        .unwrap()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

fn column(header: &[String], rows: &[Vec<f64>], name: &str) -> Vec<f64> {
    let k = header.iter().position(|h| h == name).unwrap();
    rows.iter().map(|r| r[k]).collect()
}

const UNIQUE_ENV: &str = "scenario = divisibility
d_s = 3
d_e = 1
seed = 42
random_triples = 5
";

#[test]
fn unique_environment_divisibility_passes() {
    let dir = TempDir::new().unwrap();
    let out = run_in(dir.path(), "div", UNIQUE_ENV, &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = String::from_utf8(out.stdout).unwrap();
    assert!(summary.contains("PASS divisibility"));
    assert!(summary.contains("result: PASS"));
    let (header, rows) = read_csv(&dir.path().join("out/divisibility.csv"));
    assert_eq!(header, ["t0", "ts", "t", "defect", "state_defect"]);
    assert_eq!(rows.len(), 5);
    assert!(column(&header, &rows, "defect").iter().all(|d| *d < 1e-10));
}

#[test]
fn coupling_sweep_keeps_unique_environment_divisible() {
    let dir = TempDir::new().unwrap();
    let cfg = format!("{UNIQUE_ENV}sweep_key = coupling_strength\nsweep_values = [0.1, 1, 10]\n");
    let out = run_in(dir.path(), "sweep", &cfg, &[]);
    assert_eq!(out.status.code(), Some(0));
    let (header, rows) = read_csv(&dir.path().join("out/divisibility.csv"));
    assert_eq!(header[0], "coupling_strength");
    assert_eq!(rows.len(), 15);
    let tags: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    assert_eq!(&tags[..5], &[0.1; 5]);
    assert_eq!(&tags[10..], &[10.0; 5]);
    assert!(column(&header, &rows, "defect").iter().all(|d| *d < 1e-10));
}

#[test]
fn crossover_sweep_endpoints() {
    let dir = TempDir::new().unwrap();
    let cfg = "scenario = sweep
es_level = 1
j0 = 0.1
e0 = 0.4
gamma = 0.3
j1_min = 1e-8
j1_max = 1e8
j1_points = 50
";
    let out = run_in(dir.path(), "amp", cfg, &[]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let (header, rows) = read_csv(&dir.path().join("out/sweep.csv"));
    assert_eq!(rows.len(), 50);
    let a1 = column(&header, &rows, "abs_A1");
    let a2 = column(&header, &rows, "abs_A2");
    assert!((a1[0] - 1.0).abs() < 1e-6 && a2[0] < 1e-6);
    assert!((a1[49] - 0.5).abs() < 1e-2 && (a2[49] - 0.5).abs() < 1e-2);
    assert!(String::from_utf8(out.stdout).unwrap().contains("PASS half_split"));
}

#[test]
fn amp_phase_at_zero_resonance() {
    let dir = TempDir::new().unwrap();
    let cfg = "scenario = amp-phase\nes_level = 1.3\nj0 = 0.2\nj1 = 0\ne0 = 1\ngamma = 0.5\n";
    let out = run_in(dir.path(), "ap", cfg, &[]);
    assert_eq!(out.status.code(), Some(0));
    let (header, rows) = read_csv(&dir.path().join("out/amp-phase.csv"));
    assert_eq!(column(&header, &rows, "abs_A1"), [1.0]);
    assert_eq!(column(&header, &rows, "abs_A2"), [0.0]);

    // below the resonance the principal root puts the weight on the second term
    let cfg = "scenario = amp-phase\nes_level = 0.7\nj0 = 0.2\nj1 = 0\ne0 = 1\ngamma = 0.5\n";
    run_in(dir.path(), "ap", cfg, &[]);
    let (header, rows) = read_csv(&dir.path().join("out/amp-phase.csv"));
    assert_eq!(column(&header, &rows, "abs_A1"), [0.0]);
    assert_eq!(column(&header, &rows, "abs_A2"), [1.0]);
}

#[test]
fn identical_configs_give_identical_bytes() {
    let dir = TempDir::new().unwrap();
    let cfg = "scenario = master-check\nd_s = 2\nd_e = 3\nseed = 9\nsamples = 4\n";
    let first = run_in(dir.path(), "a", cfg, &[]);
    let csv_a = fs::read(dir.path().join("out/master-check.csv")).unwrap();
    let sum_a = fs::read(dir.path().join("out/master-check_summary.txt")).unwrap();
    let second = run_in(dir.path(), "a", cfg, &[]);
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(csv_a, fs::read(dir.path().join("out/master-check.csv")).unwrap());
    assert_eq!(sum_a, fs::read(dir.path().join("out/master-check_summary.txt")).unwrap());
    // a different seed changes the random spec
    run_in(dir.path(), "a", cfg, &["--seed", "10"]);
    assert_ne!(csv_a, fs::read(dir.path().join("out/master-check.csv")).unwrap());
}

#[test]
fn empty_sweep_succeeds_with_empty_table() {
    let dir = TempDir::new().unwrap();
    let cfg = format!("{UNIQUE_ENV}sweep_key = coupling_strength\nsweep_values = []\n");
    let out = run_in(dir.path(), "empty", &cfg, &[]);
    assert_eq!(out.status.code(), Some(0));
    assert!(fs::read(dir.path().join("out/divisibility.csv")).unwrap().is_empty());
}

#[test]
fn non_scalar_sweep_key_is_usage_error() {
    let dir = TempDir::new().unwrap();
    let cfg = format!("{UNIQUE_ENV}sweep_key = hS\nsweep_values = [1]\n");
    let out = run_in(dir.path(), "bad", &cfg, &[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn non_hermitian_matrix_rejected_by_key() {
    let dir = TempDir::new().unwrap();
    let cfg = "scenario = divisibility\nd_s = 2\nd_e = 1\nhS = [[1+0i, 0.5+0i],[0+0i, 2+0i]]\nhE = [[0]]\nhSE = [[1,0],[0,1]]\nc = [1, 0]\n";
    let out = run_in(dir.path(), "herm", cfg, &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("`hS`"));
}

#[test]
fn syntax_error_reports_line() {
    let dir = TempDir::new().unwrap();
    let out = run_in(dir.path(), "syn", "scenario = green\nes = [1\n", &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("line 2"));
}

#[test]
fn failed_check_exits_one() {
    let dir = TempDir::new().unwrap();
    let cfg = "scenario = green\nes = [1]\nj0 = 0.2\nt1 = 2\nsteps = 200\ntol.markov_decay = 1e-20\n";
    let out = run_in(dir.path(), "fail", cfg, &[]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stdout).unwrap().contains("FAIL markov_decay"));
}

#[test]
fn strict_step_guard_is_fatal() {
    let dir = TempDir::new().unwrap();
    let cfg = "scenario = green\nes = [1]\nj0 = 0.2\nt1 = 10\nsteps = 50\n";
    let loose = run_in(dir.path(), "g", cfg, &[]);
    assert!(String::from_utf8(loose.stdout).unwrap().contains("violated"));
    let strict = run_in(dir.path(), "g", cfg, &["--strict"]);
    assert_eq!(strict.status.code(), Some(1));
    assert!(String::from_utf8(strict.stderr).unwrap().contains("step-size guard"));
}

#[test]
fn scenario_flag_overrides_file() {
    let dir = TempDir::new().unwrap();
    let cfg = "scenario = stationarity\nd_s = 2\nd_e = 1\nseed = 3\nt1 = 2\nsteps = 20\n";
    let out = run_in(dir.path(), "ov", cfg, &["--scenario", "entropy"]);
    assert_eq!(out.status.code(), Some(0));
    let summary = String::from_utf8(out.stdout).unwrap();
    assert!(summary.starts_with("scenario: entropy"));
    assert!(summary.contains("PASS entropy_flatness"));
}

#[test]
fn gamma_sweep_approaches_narrow_resonance_limit() {
    let dir = TempDir::new().unwrap();
    let cfg = "scenario = green-analytic
es = [1]
j0 = 0.1
j1 = 0.5
e0 = 1.2
gamma = 1
t1 = 5
steps = 500
sweep_key = gamma
sweep_values = [1e-1, 1e-3, 1e-5]
output = gamma_sweep
";
    let out = run_in(dir.path(), "gs", cfg, &[]);
    assert_eq!(out.status.code(), Some(0));
    let summary = String::from_utf8(out.stdout).unwrap();
    let gaps: Vec<f64> = summary
        .lines()
        .filter(|l| l.contains("narrow_limit_gap"))
        .map(|l| l.rsplit(' ').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(gaps.len(), 3);
    assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2] && gaps[2] < 1e-4, "{gaps:?}");
    assert!(dir.path().join("out/gamma_sweep.csv").exists());
}

#[test]
fn constant_density_green_matches_closed_form() {
    let dir = TempDir::new().unwrap();
    let cfg = "scenario = green\nes = [1]\nj0 = 0.2\nt1 = 10\nsteps = 10000\nlesser = retarded\n";
    let out = run_in(dir.path(), "c", cfg, &[]);
    assert_eq!(out.status.code(), Some(0));
    let (header, rows) = read_csv(&dir.path().join("out/green.csv"));
    assert_eq!(header, ["t", "re_G1", "im_G1", "abs_G1", "re_G2", "im_G2"]);
    for r in rows.iter().step_by(500) {
        assert!((r[3] - (-0.2 * r[0]).exp()).abs() < 1e-6);
    }
}

#[test]
fn witness_and_stationarity_for_unique_environment() {
    let dir = TempDir::new().unwrap();
    let base = "d_s = 2\nd_e = 1\nseed = 21\nt1 = 4\nsteps = 400\n";
    let w = run_in(dir.path(), "w", &format!("scenario = witness\n{base}c_b = [0.6, 0.8i]\n"), &[]);
    assert_eq!(w.status.code(), Some(0));
    assert!(String::from_utf8(w.stdout).unwrap().contains("PASS no_backflow"));
    let s = run_in(dir.path(), "s", &format!("scenario = stationarity\n{base}"), &[]);
    assert_eq!(s.status.code(), Some(0));
    assert!(String::from_utf8(s.stdout).unwrap().contains("PASS stationarity"));
}
