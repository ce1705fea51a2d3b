//! The `run`, `converge`, `verify-energy` and `perturb` pipelines.
//!
//! Each returns an [`Outcome`] whose failing rows decide the exit status;
//! errors are reserved for configuration and numerical failures.

use timofrac_core::energy::{
    constants_from_report, discrete_energy, verify_apriori, verify_continuous_dependence,
    verify_ibp_identities, EnergyConstants, NormTraces,
};
use timofrac_core::solver::{solve, solve_with};
use timofrac_core::{ProblemData, SolverOptions, Trajectory};

use crate::config::{RunConfig, ScenarioName};
use crate::error::{HarnessError, Result};
use crate::output::{self, CheckRow, ConvergenceRow, Outcome};
use crate::plot::write_plot_script;
use crate::reference::{classical_reference, max_difference};
use crate::scenario::{perturbation, random_draw, scenario_data, Manufactured};

/// `|moment| ≤ CONSTRAINT_REL_TOL · L · max|field|` at every stored level.
pub const CONSTRAINT_REL_TOL: f64 = 1e-9;
/// Max-norm agreement required between the `alpha = 1` run and the explicit
/// classical integrator.
pub const CLASSICAL_TOL: f64 = 1e-3;
/// Relative change allowed in the dependence ratio when the perturbation is
/// rescaled.
pub const SCALE_INVARIANCE_TOL: f64 = 1e-8;
/// Rescaling applied in the scale-invariance check.
pub const SCALE_PROBE: f64 = 10.0;

fn constants(cfg: &RunConfig) -> Result<EnergyConstants> {
    Ok(constants_from_report(&cfg.beam, &cfg.kernel_report)?)
}

/// A priori rows and the constraint row for one solved case.
pub fn apriori_rows(
    label: &str,
    tr: &Trajectory,
    data: &ProblemData,
    cfg: &RunConfig,
    k: &EnergyConstants,
) -> Result<Vec<CheckRow>> {
    let rep = verify_apriori(tr, data, cfg.beam.alpha, k)?;
    let suffix = |name: &str| {
        if label.is_empty() {
            name.to_string()
        } else {
            format!("{name}:{label}")
        }
    };
    let mut rows = vec![
        CheckRow::verdict(suffix("apriori_sup"), rep.lhs_sup, rep.data_norm, rep.pass_sup),
        CheckRow::verdict(suffix("apriori_rate"), rep.lhs_rate, rep.data_norm, rep.pass_rate),
    ];
    for (name, margin) in [
        ("apriori_sup_margin_ln", rep.margin_sup()),
        ("apriori_rate_margin_ln", rep.margin_rate()),
    ] {
        if margin.is_finite() {
            rows.push(CheckRow::info(suffix(name), margin));
        }
    }
    rows.push(constraint_row(&suffix("constraints"), tr));
    Ok(rows)
}

pub fn constraint_row(check: &str, tr: &Trajectory) -> CheckRow {
    let worst = tr.worst_constraint_residual();
    CheckRow::verdict(check, worst, CONSTRAINT_REL_TOL, worst <= CONSTRAINT_REL_TOL)
}

/// Solves the configured scenario, checks it and writes all traces.
pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    let beam = &cfg.beam;
    let data = scenario_data(cfg)?;
    let tr = solve(beam, &data)?;
    let k = constants(cfg)?;
    let mut out = Outcome::default();
    out.rows.extend(apriori_rows("", &tr, &data, cfg, &k)?);
    out.push(CheckRow::info("f_star_ln", k.ln_f_star()));

    match cfg.scenario.name {
        ScenarioName::ManufacturedPoly | ScenarioName::PerturbPair => {
            let m = Manufactured::new(beam, &cfg.scenario);
            out.push(CheckRow::info("mms_err_theta", m.max_error(&tr.grid, tr.dt, &tr.theta)));
            out.push(CheckRow::info("mms_err_phi", m.max_error(&tr.grid, tr.dt, &tr.phi)));
        }
        _ => {}
    }
    if cfg.scenario.name == ScenarioName::PerturbPair {
        let p = perturbation(cfg, cfg.scenario.draw)?;
        let rep = verify_continuous_dependence(beam, &data, &p, &k)?;
        out.push(CheckRow::verdict(
            "continuous_dependence",
            rep.lhs,
            rep.perturbation_norm,
            rep.pass,
        ));
    }
    if cfg.scenario.name == ScenarioName::ClassicalLimit {
        let r = classical_reference(beam, &data)?;
        let diff = max_difference(&tr.theta, &r.theta).max(max_difference(&tr.phi, &r.phi));
        out.push(CheckRow::verdict(
            "classical_reference",
            diff,
            CLASSICAL_TOL,
            diff <= CLASSICAL_TOL,
        ));
    }

    let dir = &cfg.output_dir;
    output::write_solution(dir, &tr, cfg.snapshots)?;
    output::write_norms(dir, &tr, &NormTraces::of(&tr))?;
    output::write_energy_report(dir, &out)?;
    if cfg.flags.plot_script {
        write_plot_script(dir)?;
    }
    Ok(out)
}

/// Max-norm errors against the exact solution of a scenario that has one.
fn exact_errors(cfg: &RunConfig, tr: &Trajectory) -> (f64, f64) {
    match cfg.scenario.name {
        ScenarioName::ManufacturedPoly => {
            let m = Manufactured::new(&cfg.beam, &cfg.scenario);
            (
                m.max_error(&tr.grid, tr.dt, &tr.theta),
                m.max_error(&tr.grid, tr.dt, &tr.phi),
            )
        }
        _ => {
            let sup = |u: &[Vec<f64>]| u.iter().flatten().fold(0.0_f64, |m, v| m.max(v.abs()));
            (sup(&tr.theta), sup(&tr.phi))
        }
    }
}

/// Result of [`converge`].
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStudy {
    pub rows: Vec<ConvergenceRow>,
    pub outcome: Outcome,
}

impl ConvergenceStudy {
    /// Orders between consecutive spatial levels.
    pub fn spatial_orders(&self) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.order_x).collect()
    }

    pub fn temporal_orders(&self) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.order_t).collect()
    }
}

fn observed_order(e_prev: f64, e: f64, h_prev: f64, h: f64) -> Option<f64> {
    (e_prev > 0.0 && e > 0.0).then(|| (e_prev / e).ln() / (h_prev / h).ln())
}

// Largest ratio of consecutive errors; 0 when every error is exactly 0.
fn worst_reduction(errs: &[f64]) -> f64 {
    errs.windows(2)
        .map(|w| if w[1] == 0.0 { 0.0 } else { w[1] / w[0] })
        .fold(0.0, f64::max)
}

/// Spatial refinement at `converge.n_steps_fine` steps, then temporal
/// refinement at `converge.n_cells_fine` cells, each over `levels` grids
/// doubling from the configured one. Writes `convergence.csv`.
pub fn converge(cfg: &RunConfig, levels: usize) -> Result<ConvergenceStudy> {
    if levels < 3 {
        return Err(HarnessError::config("--levels", "at least 3 levels are required"));
    }
    if !matches!(
        cfg.scenario.name,
        ScenarioName::ManufacturedPoly | ScenarioName::Zero
    ) {
        return Err(HarnessError::config(
            "scenario.name",
            "convergence studies need an exact solution: use manufactured_poly or zero",
        ));
    }
    let mut rows = Vec::with_capacity(2 * levels);
    let mut outcome = Outcome::default();
    let fine = cfg.converge;
    for (label, spatial) in [("spatial", true), ("temporal", false)] {
        let mut errs = Vec::with_capacity(levels);
        let mut prev: Option<(f64, f64)> = None;
        for i in 0..levels {
            let (nc, ns) = if spatial {
                (cfg.beam.n_cells << i, fine.n_steps_fine)
            } else {
                (fine.n_cells_fine, cfg.beam.n_steps << i)
            };
            let c = cfg.with_grid(nc, ns)?;
            let data = scenario_data(&c)?;
            let tr = solve(&c.beam, &data)?;
            let (et, ep) = exact_errors(&c, &tr);
            let err = et.max(ep);
            let (dx, dt) = (tr.grid.dx(), tr.dt);
            let h = if spatial { dx } else { dt };
            let order = prev.and_then(|(e0, h0)| observed_order(e0, err, h0, h));
            rows.push(ConvergenceRow {
                level: rows.len() + 1,
                dx,
                dt,
                err_theta: et,
                err_phi: ep,
                order_x: if spatial { order } else { None },
                order_t: if spatial { None } else { order },
            });
            prev = Some((err, h));
            errs.push(err);
        }
        let worst = worst_reduction(&errs);
        outcome.push(CheckRow::verdict(
            format!("{label}_monotone"),
            worst,
            1.0,
            worst < 1.0,
        ));
        if let Some(o) = rows.last().and_then(|r| if spatial { r.order_x } else { r.order_t }) {
            outcome.push(CheckRow::info(format!("{label}_order"), o));
        }
    }
    output::write_convergence(&cfg.output_dir, &rows)?;
    Ok(ConvergenceStudy { rows, outcome })
}

/// Worst identity residual over all steps divided by the largest magnitude
/// of the terms it compares. Index `j` is identity `j+1`.
pub fn relative_ibp_residuals(tr: &Trajectory, kappa1: f64, kappa2: f64) -> Result<[f64; 4]> {
    let mut worst = [0.0_f64; 4];
    let mut scale = [0.0_f64; 4];
    for n in 1..tr.n_levels() {
        let r = verify_ibp_identities(tr, kappa1, kappa2, n)?;
        for j in 0..4 {
            worst[j] = worst[j].max(r.residuals()[j].abs());
            scale[j] = scale[j].max(r.scale[j]);
        }
    }
    for (w, s) in worst.iter_mut().zip(scale) {
        if s > 0.0 {
            *w /= s;
        }
    }
    Ok(worst)
}

/// Largest single-step rise of `κ₁‖θ‖² + κ₂‖φ‖² + ‖I_xφ‖²` relative to its
/// initial value.
pub fn energy_step_rise(tr: &Trajectory, kappa1: f64, kappa2: f64) -> f64 {
    let e = discrete_energy(tr, kappa1, kappa2);
    let rise = e.windows(2).map(|w| w[1] - w[0]).fold(f64::MIN, f64::max);
    if e[0] > 0.0 {
        rise / e[0]
    } else {
        rise.max(0.0)
    }
}

/// Copy of `data` with the forcing removed.
pub fn unforced(data: &ProblemData) -> ProblemData {
    let mut d = data.clone();
    d.forcing_f = d.forcing_f.combine(0.0, &data.forcing_f, 0.0);
    d.forcing_g = d.forcing_g.combine(0.0, &data.forcing_g, 0.0);
    d
}

/// A priori checks over the zero case, the manufactured case and
/// `scenario.draws` random draws, plus informational identity and energy
/// rows. Writes `energy_report.csv`.
pub fn verify_energy(cfg: &RunConfig) -> Result<Outcome> {
    let beam = &cfg.beam;
    let k = constants(cfg)?;
    let mut out = Outcome::default();
    out.push(CheckRow::info("f_star_ln", k.ln_f_star()));

    let grid = beam.grid()?;
    let zero = ProblemData::zeros(&grid, beam.n_steps);
    let tr = solve(beam, &zero)?;
    out.rows.extend(apriori_rows("zero", &tr, &zero, cfg, &k)?);

    let m = Manufactured::new(beam, &cfg.scenario).data(beam)?;
    let tr = solve(beam, &m)?;
    out.rows.extend(apriori_rows("manufactured_poly", &tr, &m, cfg, &k)?);
    let ibp = relative_ibp_residuals(&tr, beam.kappa1, beam.kappa2)?;
    for (name, r) in ["ibp_i", "ibp_ii", "ibp_iii", "ibp_iv"].iter().zip(ibp) {
        out.push(CheckRow::info(*name, r));
    }

    for draw in 0..cfg.scenario.draws {
        let d = random_draw(cfg, draw)?;
        let tr = solve(beam, &d)?;
        out.rows.extend(apriori_rows(&format!("random_smooth#{draw}"), &tr, &d, cfg, &k)?);
    }

    if !beam.kernel.is_zero() {
        let d = unforced(&random_draw(cfg, 0)?);
        let tr = solve(beam, &d)?;
        out.push(CheckRow::info(
            "energy_step_rise",
            energy_step_rise(&tr, beam.kappa1, beam.kappa2),
        ));
    }
    output::write_energy_report(&cfg.output_dir, &out)?;
    Ok(out)
}

/// Continuous dependence over `scenario.draws` perturbation directions of
/// the manufactured data, each checked for `ratio ≤ F*` and for invariance
/// of the ratio under rescaling. Writes `energy_report.csv`.
pub fn perturb(cfg: &RunConfig) -> Result<Outcome> {
    let beam = &cfg.beam;
    let k = constants(cfg)?;
    let base = match cfg.scenario.name {
        ScenarioName::ManufacturedPoly | ScenarioName::PerturbPair => {
            Manufactured::new(beam, &cfg.scenario).data(beam)?
        }
        _ => scenario_data(cfg)?,
    };
    let mut out = Outcome::default();
    out.push(CheckRow::info("f_star_ln", k.ln_f_star()));
    for draw in 0..cfg.scenario.draws {
        let p = perturbation(cfg, draw)?;
        let rep = verify_continuous_dependence(beam, &base, &p, &k)?;
        out.push(CheckRow::verdict(
            format!("dependence:{draw}"),
            rep.lhs,
            rep.perturbation_norm,
            rep.pass,
        ));
        let rescaled = verify_continuous_dependence(beam, &base, &p.scaled(SCALE_PROBE), &k)?;
        let drift = (rescaled.ratio - rep.ratio).abs() / rep.ratio;
        out.push(CheckRow::verdict(
            format!("scale_invariance:{draw}"),
            drift,
            SCALE_INVARIANCE_TOL,
            drift <= SCALE_INVARIANCE_TOL,
        ));
    }
    output::write_energy_report(&cfg.output_dir, &out)?;
    Ok(out)
}

/// Solve without the projection; diagnostic use only.
pub fn solve_unprojected(cfg: &RunConfig, data: &ProblemData) -> Result<Trajectory> {
    Ok(solve_with(&cfg.beam, data, SolverOptions { project: false })?)
}
