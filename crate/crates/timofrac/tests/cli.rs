//! End-to-end behavior of the binary: headers, exit codes, artifacts.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_timofrac");

fn config(dir: &Path, scenario: &str, extra: &str) -> std::path::PathBuf {
    let text = format!(
        "beam.rho1 = 1\nbeam.rho2 = 1\nbeam.kappa1 = 1\nbeam.kappa2 = 1\nbeam.length = 1\n\
         time.horizon = 1\nfrac.alpha = 0.5\ngrid.n_cells = 16\ngrid.n_steps = 32\n\
         kernel.kind = exponential\nkernel.m0 = 0.1\nkernel.lambda = 1\n\
         scenario.name = {scenario}\noutput.dir = {}\nseed = 11\n{extra}\n",
        dir.join("out").display()
    );
    let path = dir.join(format!("{scenario}.conf"));
    fs::write(&path, text).unwrap();
    path
}

fn timofrac(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().unwrap()
}

fn header(path: &Path) -> String {
    fs::read_to_string(path).unwrap().lines().next().unwrap().to_string()
}

#[test]
fn run_writes_traces_with_exact_headers() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "manufactured_poly", "flags.plot_script = true");
    let out = timofrac(&["run", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let o = dir.path().join("out");
    assert_eq!(header(&o.join("solution.csv")), "t,x,theta,phi");
    assert_eq!(
        header(&o.join("norms.csv")),
        "t,l2_theta,l2_phi,b21_theta_t,b21_phi_t"
    );
    assert_eq!(header(&o.join("energy_report.csv")), "check,lhs,rhs,ratio,pass");
    assert!(o.join("plot.py").exists());

    // one norms row per level, constant column count everywhere
    let norms = fs::read_to_string(o.join("norms.csv")).unwrap();
    assert_eq!(norms.lines().count(), 1 + 33);
    for name in ["solution.csv", "norms.csv", "energy_report.csv"] {
        let text = fs::read_to_string(o.join(name)).unwrap();
        let cols = text.lines().next().unwrap().split(',').count();
        assert!(text.lines().all(|l| l.split(',').count() == cols), "{name}");
        assert!(!text.contains("NaN") && !text.contains("inf"), "{name}");
    }
}

#[test]
fn zero_scenario_has_all_zero_traces() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "zero", "");
    assert_eq!(timofrac(&["run", cfg.to_str().unwrap()]).status.code(), Some(0));
    let sol = fs::read_to_string(dir.path().join("out/solution.csv")).unwrap();
    for line in sol.lines().skip(1) {
        let f: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!((f[2], f[3]), (0.0, 0.0));
    }
}

#[test]
fn perturb_pair_reports_dependence_row() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(dir.path(), "perturb_pair", "");
    assert_eq!(timofrac(&["run", cfg.to_str().unwrap()]).status.code(), Some(0));
    let rep = fs::read_to_string(dir.path().join("out/energy_report.csv")).unwrap();
    let row = rep
        .lines()
        .find(|l| l.starts_with("continuous_dependence,"))
        .unwrap();
    assert!(row.ends_with(",PASS"));
}

#[test]
fn converge_writes_table_and_orders() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(
        dir.path(),
        "manufactured_poly",
        "converge.n_cells_fine = 128\nconverge.n_steps_fine = 1024",
    );
    let out = timofrac(&["converge", cfg.to_str().unwrap(), "--levels", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let path = dir.path().join("out/convergence.csv");
    assert_eq!(header(&path), "level,dx,dt,err_theta,err_phi,order_x,order_t");
    assert_eq!(fs::read_to_string(path).unwrap().lines().count(), 7);
}

#[test]
fn zero_scenario_convergence_is_not_applicable() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(
        dir.path(),
        "zero",
        "converge.n_cells_fine = 64\nconverge.n_steps_fine = 128",
    );
    let out = timofrac(&["converge", cfg.to_str().unwrap(), "--levels", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(dir.path().join("out/convergence.csv")).unwrap();
    for line in text.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!((f[3], f[4], f[5], f[6]), ("0e0", "0e0", "", ""));
    }
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = config(dir.path(), "zero", "frac.alpha = 1.5");
    // duplicate key
    assert_eq!(timofrac(&["run", bad.to_str().unwrap()]).status.code(), Some(2));
    let inadmissible = dir.path().join("k.conf");
    let text = fs::read_to_string(config(dir.path(), "zero", ""))
        .unwrap()
        .replace("beam.kappa2 = 1", "beam.kappa2 = 0.5")
        .replace("beam.rho2 = 1", "beam.rho2 = 0.5")
        .replace("kernel.m0 = 0.1", "kernel.m0 = 1");
    fs::write(&inadmissible, text).unwrap();
    let out = timofrac(&["run", inadmissible.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("kernel"));
    assert_eq!(timofrac(&["run", "/nonexistent.conf"]).status.code(), Some(2));
    assert_eq!(timofrac(&["bogus"]).status.code(), Some(2));
}

#[test]
fn check_failures_exit_one() {
    assert_eq!(
        timofrac(&["selftest", "--ml-term-budget", "3"]).status.code(),
        Some(1)
    );
    let out = timofrac(&["selftest", "--no-projection"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout)
        .lines()
        .any(|l| l.starts_with("ibp_i,") && l.ends_with(",FAIL")));
}

#[test]
fn selftest_passes() {
    let out = timofrac(&["selftest"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn mlf_prints_value_and_rejects_bad_order() {
    let out = timofrac(&["mlf", "--beta", "0.5", "--x", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let v: f64 = String::from_utf8_lossy(&out.stdout).trim().parse().unwrap();
    assert!((v - 5.008_980_080_762_283).abs() < 1e-12);
    let out = timofrac(&["mlf", "--beta", "1", "--mu", "2", "--x", "-1"]);
    let v: f64 = String::from_utf8_lossy(&out.stdout).trim().parse().unwrap();
    assert!((v - (1.0 - (-1.0_f64).exp())).abs() < 1e-14);
    assert_eq!(timofrac(&["mlf", "--beta", "-1", "--x", "1"]).status.code(), Some(3));
}
