//! CSV emission. Reals are written in `{:e}` form, which round-trips and is
//! identical across runs, so repeated runs produce byte-identical files.

use std::fs;
use std::path::{Path, PathBuf};

use timofrac_core::energy::NormTraces;
use timofrac_core::Trajectory;

use crate::error::{HarnessError, Result};

pub const SOLUTION_HEADER: [&str; 4] = ["t", "x", "theta", "phi"];
pub const NORMS_HEADER: [&str; 5] = ["t", "l2_theta", "l2_phi", "b21_theta_t", "b21_phi_t"];
pub const ENERGY_HEADER: [&str; 5] = ["check", "lhs", "rhs", "ratio", "pass"];
pub const CONVERGENCE_HEADER: [&str; 7] =
    ["level", "dx", "dt", "err_theta", "err_phi", "order_x", "order_t"];

pub const SOLUTION_FILE: &str = "solution.csv";
pub const NORMS_FILE: &str = "norms.csv";
pub const ENERGY_FILE: &str = "energy_report.csv";
pub const CONVERGENCE_FILE: &str = "convergence.csv";

/// One row of `energy_report.csv`. Missing cells are written empty; a row
/// without a verdict is informational.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub check: String,
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    pub ratio: Option<f64>,
    pub pass: Option<bool>,
}

impl CheckRow {
    /// `lhs ≤ rhs`-style check; the ratio is left empty when `rhs` is 0.
    pub fn verdict(check: impl Into<String>, lhs: f64, rhs: f64, pass: bool) -> Self {
        CheckRow {
            check: check.into(),
            lhs: Some(lhs),
            rhs: Some(rhs),
            ratio: (rhs != 0.0).then(|| lhs / rhs),
            pass: Some(pass),
        }
    }

    pub fn info(check: impl Into<String>, value: f64) -> Self {
        CheckRow {
            check: check.into(),
            lhs: Some(value),
            rhs: None,
            ratio: None,
            pass: None,
        }
    }

    pub fn failed(&self) -> bool {
        self.pass == Some(false)
    }
}

/// Rows of a check run and the resulting verdict.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Outcome {
    pub rows: Vec<CheckRow>,
}

impl Outcome {
    pub fn push(&mut self, row: CheckRow) {
        self.rows.push(row);
    }

    pub fn passed(&self) -> bool {
        !self.rows.iter().any(CheckRow::failed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRow> {
        self.rows.iter().filter(|r| r.failed())
    }

    pub fn row(&self, check: &str) -> Option<&CheckRow> {
        self.rows.iter().find(|r| r.check == check)
    }

    /// 0 when every verdict passed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }
}

/// One row of `convergence.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub level: usize,
    pub dx: f64,
    pub dt: f64,
    pub err_theta: f64,
    pub err_phi: f64,
    pub order_x: Option<f64>,
    pub order_t: Option<f64>,
}

fn real(file: &str, column: &str, v: f64) -> Result<String> {
    if v.is_finite() {
        Ok(format!("{v:e}"))
    } else {
        Err(HarnessError::NonFinite {
            file: file.to_string(),
            column: column.to_string(),
        })
    }
}

fn opt_real(file: &str, column: &str, v: Option<f64>) -> Result<String> {
    v.map_or(Ok(String::new()), |v| real(file, column, v))
}

fn writer(dir: &Path, name: &str, header: &[&str]) -> Result<(csv::Writer<fs::File>, PathBuf)> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record(header)?;
    Ok((w, path))
}

/// Writes `snapshots` evenly spaced levels (always including the first and
/// last), one row per node.
pub fn write_solution(dir: &Path, tr: &Trajectory, snapshots: usize) -> Result<PathBuf> {
    let (mut w, path) = writer(dir, SOLUTION_FILE, &SOLUTION_HEADER)?;
    let last = tr.n_levels() - 1;
    let count = snapshots.clamp(2, last + 1);
    let mut levels: Vec<usize> = (0..count).map(|i| i * last / (count - 1)).collect();
    levels.dedup();
    let nodes = tr.grid.nodes();
    for k in levels {
        let t = real(SOLUTION_FILE, "t", tr.time(k))?;
        for (i, &x) in nodes.iter().enumerate() {
            w.write_record([
                t.clone(),
                real(SOLUTION_FILE, "x", x)?,
                real(SOLUTION_FILE, "theta", tr.theta[k][i])?,
                real(SOLUTION_FILE, "phi", tr.phi[k][i])?,
            ])?;
        }
    }
    w.flush()?;
    Ok(path)
}

pub fn write_norms(dir: &Path, tr: &Trajectory, traces: &NormTraces) -> Result<PathBuf> {
    let (mut w, path) = writer(dir, NORMS_FILE, &NORMS_HEADER)?;
    for k in 0..tr.n_levels() {
        let cols = [
            tr.time(k),
            traces.l2_theta[k],
            traces.l2_phi[k],
            traces.b21_theta_t[k],
            traces.b21_phi_t[k],
        ];
        let rec = cols
            .iter()
            .zip(NORMS_HEADER)
            .map(|(v, c)| real(NORMS_FILE, c, *v))
            .collect::<Result<Vec<_>>>()?;
        w.write_record(rec)?;
    }
    w.flush()?;
    Ok(path)
}

pub fn write_energy_report(dir: &Path, outcome: &Outcome) -> Result<PathBuf> {
    let (mut w, path) = writer(dir, ENERGY_FILE, &ENERGY_HEADER)?;
    for r in &outcome.rows {
        let pass = match r.pass {
            Some(true) => "PASS",
            Some(false) => "FAIL",
            None => "",
        };
        w.write_record([
            r.check.clone(),
            opt_real(ENERGY_FILE, "lhs", r.lhs)?,
            opt_real(ENERGY_FILE, "rhs", r.rhs)?,
            opt_real(ENERGY_FILE, "ratio", r.ratio)?,
            pass.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(path)
}

pub fn write_convergence(dir: &Path, rows: &[ConvergenceRow]) -> Result<PathBuf> {
    let (mut w, path) = writer(dir, CONVERGENCE_FILE, &CONVERGENCE_HEADER)?;
    let f = CONVERGENCE_FILE;
    for r in rows {
        w.write_record([
            r.level.to_string(),
            real(f, "dx", r.dx)?,
            real(f, "dt", r.dt)?,
            real(f, "err_theta", r.err_theta)?,
            real(f, "err_phi", r.err_phi)?,
            opt_real(f, "order_x", r.order_x)?,
            opt_real(f, "order_t", r.order_t)?,
        ])?;
    }
    w.flush()?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn energy_rows_render_empty_cells() {
        let dir = tempfile::tempdir().unwrap();
        let mut o = Outcome::default();
        o.push(CheckRow::verdict("a", 1.0, 2.0, true));
        o.push(CheckRow::info("b", 3.0));
        o.push(CheckRow::verdict("c", 1.0, 0.0, false));
        let p = write_energy_report(dir.path(), &o).unwrap();
        let text = fs::read_to_string(p).unwrap();
        assert_eq!(
            text,
            "check,lhs,rhs,ratio,pass\na,1e0,2e0,5e-1,PASS\nb,3e0,,,\nc,1e0,0e0,,FAIL\n"
        );
        assert!(!o.passed());
        assert_eq!(o.exit_code(), 1);
    }

    #[test]
    fn non_finite_values_are_refused() {
        let dir = tempfile::tempdir().unwrap();
        let mut o = Outcome::default();
        o.push(CheckRow::info("nan", f64::NAN));
        let e = write_energy_report(dir.path(), &o).unwrap_err();
        assert!(matches!(e, HarnessError::NonFinite { .. }));
        assert_eq!(e.exit_code(), 3);
    }
}
