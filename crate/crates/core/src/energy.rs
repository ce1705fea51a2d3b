//! Norms, the constants of the a priori estimates, and checks of those
//! estimates on computed trajectories.
//!
//! The bound constant `F*` is astronomically large even for unit parameters
//! (its logarithm is in the tens of thousands), so `M` and `F*` are carried
//! as natural logarithms and every inequality is decided in log space.

use alloc::vec::Vec;

use crate::fraccalc::{gamma_fn, ln_gamma, ln_mittag_leffler2, rl_integral, FracOrder, TimeSeries};
use crate::math::{exp, ln, powf, sqrt};
use crate::memory::KernelReport;
use crate::solver::{solve_with, BeamConfig, ProblemData, SolverOptions, SpaceTimeField, Trajectory};
use crate::spatial::Grid;
use crate::{Error, Result};

/// `‖u‖_{L²(0,L)}`.
pub fn norm_l2(grid: &Grid, u: &[f64]) -> f64 {
    grid.norm_l2(u)
}

/// `‖u‖_{B₂¹} = ‖I_x u‖_{L²}`.
pub fn norm_b21(grid: &Grid, u: &[f64]) -> f64 {
    grid.norm_l2(&grid.ix(u))
}

/// `max_k ‖u_k‖_{L²}`.
pub fn norm_sup_l2(grid: &Grid, levels: &[Vec<f64>]) -> f64 {
    levels
        .iter()
        .fold(0.0_f64, |m, u| m.max(grid.norm_l2(u)))
}

/// `‖u‖_{L²(0,T;L²(0,L))}`, trapezoidal in time.
pub fn norm_spacetime(grid: &Grid, dt: f64, levels: &[Vec<f64>]) -> f64 {
    let sq: Vec<f64> = levels.iter().map(|u| grid.inner(u, u)).collect();
    sqrt(trapezoid(&sq, dt))
}

fn trapezoid(v: &[f64], dt: f64) -> f64 {
    match v.len() {
        0 | 1 => 0.0,
        n => dt * (v[1..n - 1].iter().sum::<f64>() + 0.5 * (v[0] + v[n - 1])),
    }
}

/// Squared data norm `‖F‖² + ‖φ̂‖² + ‖ψ‖² + ‖G‖² + ‖f‖² + ‖g‖²`.
pub fn norm_data(grid: &Grid, dt: f64, data: &ProblemData) -> f64 {
    let st = |f: &SpaceTimeField| {
        let n = norm_spacetime(grid, dt, f.levels());
        n * n
    };
    let initial: f64 = data.initial_fields().iter().map(|u| grid.inner(u, u)).sum();
    st(&data.forcing_f) + st(&data.forcing_g) + initial
}

/// The constants of the a priori estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyConstants {
    w_star: f64,
    omega: f64,
    ln_m: f64,
    ln_f_star: f64,
}

impl EnergyConstants {
    pub fn w_star(&self) -> f64 {
        self.w_star
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// `ln M`.
    pub fn ln_m(&self) -> f64 {
        self.ln_m
    }

    /// `ln F*`.
    pub fn ln_f_star(&self) -> f64 {
        self.ln_f_star
    }

    /// `F*` as a double; infinite once it overflows.
    pub fn f_star(&self) -> f64 {
        exp(self.ln_f_star)
    }

    /// Whether `lhs ≤ F* · rhs`, decided exactly in log space.
    pub fn bound_holds(&self, lhs: f64, rhs: f64) -> bool {
        bound_holds(self.ln_f_star, lhs, rhs)
    }
}

fn bound_holds(ln_factor: f64, lhs: f64, rhs: f64) -> bool {
    if !(lhs.is_finite() && rhs.is_finite()) || lhs < 0.0 || rhs < 0.0 {
        return false;
    }
    if lhs == 0.0 {
        return true;
    }
    if rhs == 0.0 {
        return false;
    }
    ln(lhs) <= ln_factor + ln(rhs)
}

/// The max/min quotient defining `W*`.
pub fn w_star(config: &BeamConfig, kernel: &KernelReport) -> Result<f64> {
    let BeamConfig {
        rho1,
        rho2,
        kappa1,
        kappa2,
        length: l,
        horizon: t,
        alpha,
        ..
    } = *config;
    // Γ(1-α)(1-α) = Γ(2-α), which stays finite at α = 1
    let frac = powf(t, 1.0 - alpha) * l * l / (4.0 * gamma_fn(2.0 - alpha)?);
    let first = kappa1 * kappa1 / 2.0
        + t / kappa2 * kernel.sup_m2
        + 0.5
        + t * t / 2.0 * kernel.sup_dm2
        + kernel.m_at_zero;
    let num = [
        first,
        1.5,
        kappa1 / 2.0 + l * l / 4.0,
        kappa2 / 4.0,
        rho1 * frac,
        rho2 * frac,
    ]
    .into_iter()
    .fold(f64::NEG_INFINITY, f64::max);
    let den = [rho1, rho2, kappa1, kappa2, 1.0]
        .into_iter()
        .fold(f64::INFINITY, f64::min)
        / 2.0;
    Ok(num / den)
}

/// Evaluates `W*`, `ω = W*(W* e^{W* T} + 1)`,
/// `M = Γ(α) E_{α,α}(ω T^α) max{1, T^α/(αΓ(α))}` and `F* = M ω max{…}`.
pub fn compute_constants(config: &BeamConfig) -> Result<EnergyConstants> {
    let report = config.validate()?;
    constants_from_report(config, &report)
}

/// [`compute_constants`] with an already validated kernel.
pub fn constants_from_report(
    config: &BeamConfig,
    kernel: &KernelReport,
) -> Result<EnergyConstants> {
    let w = w_star(config, kernel)?;
    let omega = w * (w * exp(w * config.horizon) + 1.0);
    if !omega.is_finite() {
        return Err(Error::Domain {
            what: "omega overflows; W*·T is too large",
            value: w * config.horizon,
        });
    }
    let a = config.alpha;
    let t_a = powf(config.horizon, a);
    let ln_gamma_a = ln_gamma(a)?;
    let ln_max = ln(1.0_f64.max(t_a / (a * exp(ln_gamma_a))));
    let ln_m = ln_gamma_a + ln_mittag_leffler2(a, a, omega * t_a)? + ln_max;
    let ln_f_star = ln_m + ln(omega) + ln_max;
    Ok(EnergyConstants {
        w_star: w,
        omega,
        ln_m,
        ln_f_star,
    })
}

/// Per-level norms of a trajectory.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NormTraces {
    pub l2_theta: Vec<f64>,
    pub l2_phi: Vec<f64>,
    pub b21_theta_t: Vec<f64>,
    pub b21_phi_t: Vec<f64>,
}

impl NormTraces {
    pub fn of(tr: &Trajectory) -> Self {
        let g = &tr.grid;
        NormTraces {
            l2_theta: tr.theta.iter().map(|u| g.norm_l2(u)).collect(),
            l2_phi: tr.phi.iter().map(|u| g.norm_l2(u)).collect(),
            b21_theta_t: tr.theta_rate.iter().map(|u| norm_b21(g, u)).collect(),
            b21_phi_t: tr.phi_rate.iter().map(|u| norm_b21(g, u)).collect(),
        }
    }
}

/// Both a priori estimates evaluated on one trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyReport {
    /// `sup‖θ‖² + sup‖φ‖²`.
    pub lhs_sup: f64,
    /// `D^{α-1}(‖θ_t‖²_{B₂¹} + ‖φ_t‖²_{B₂¹})` at `T`.
    pub lhs_rate: f64,
    /// Squared data norm; the bound is `F*` times this.
    pub data_norm: f64,
    pub ln_f_star: f64,
    pub pass_sup: bool,
    pub pass_rate: bool,
    pub traces: NormTraces,
}

impl EnergyReport {
    pub fn pass(&self) -> bool {
        self.pass_sup && self.pass_rate
    }

    /// `ln(F*·rhs/lhs)`; positive when the estimate holds.
    pub fn margin_sup(&self) -> f64 {
        log_margin(self.ln_f_star, self.lhs_sup, self.data_norm)
    }

    pub fn margin_rate(&self) -> f64 {
        log_margin(self.ln_f_star, self.lhs_rate, self.data_norm)
    }
}

fn log_margin(ln_factor: f64, lhs: f64, rhs: f64) -> f64 {
    if lhs == 0.0 {
        f64::INFINITY
    } else {
        ln_factor + ln(rhs) - ln(lhs)
    }
}

/// Evaluates both estimates for `tr`, which must be the solution for `data`.
///
/// `D^{α-1}` is the Riemann-Liouville integral of order `1-α`; at `α = 1` it
/// is the identity.
pub fn verify_apriori(
    tr: &Trajectory,
    data: &ProblemData,
    alpha: f64,
    constants: &EnergyConstants,
) -> Result<EnergyReport> {
    let traces = NormTraces::of(tr);
    let sup_sq = |v: &[f64]| v.iter().fold(0.0_f64, |m, x| m.max(x * x));
    let lhs_sup = sup_sq(&traces.l2_theta) + sup_sq(&traces.l2_phi);
    let rates: Vec<f64> = traces
        .b21_theta_t
        .iter()
        .zip(&traces.b21_phi_t)
        .map(|(a, b)| a * a + b * b)
        .collect();
    let lhs_rate = if alpha >= 1.0 {
        *rates.last().unwrap_or(&0.0)
    } else {
        let order = FracOrder::integral(1.0 - alpha)?;
        rl_integral(&TimeSeries::new(rates, tr.dt)?, order)?
    };
    let data_norm = norm_data(&tr.grid, tr.dt, data);
    Ok(EnergyReport {
        lhs_sup,
        lhs_rate,
        data_norm,
        ln_f_star: constants.ln_f_star,
        pass_sup: constants.bound_holds(lhs_sup, data_norm),
        pass_rate: constants.bound_holds(lhs_rate, data_norm),
        traces,
    })
}

/// Outcome of a continuous-dependence check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DependenceReport {
    /// `sup‖Δθ‖² + sup‖Δφ‖²`.
    pub lhs: f64,
    /// Squared norm of the perturbation.
    pub perturbation_norm: f64,
    pub ratio: f64,
    pub ln_f_star: f64,
    pub pass: bool,
}

/// Solves for `data` and `data + perturbation` and bounds the difference by
/// the perturbation norm.
pub fn verify_continuous_dependence(
    config: &BeamConfig,
    data: &ProblemData,
    perturbation: &ProblemData,
    constants: &EnergyConstants,
) -> Result<DependenceReport> {
    let grid = config.grid()?;
    let pn = norm_data(&grid, config.dt(), perturbation);
    if pn == 0.0 {
        return Err(Error::UndefinedRatio);
    }
    let opts = SolverOptions::default();
    let base = solve_with(config, data, opts)?;
    let moved = solve_with(config, &data.combine(1.0, perturbation, 1.0), opts)?;
    let diff = |a: &[Vec<f64>], b: &[Vec<f64>]| -> f64 {
        a.iter().zip(b).fold(0.0_f64, |m, (u, v)| {
            let d: Vec<f64> = u.iter().zip(v).map(|(x, y)| y - x).collect();
            m.max(grid.inner(&d, &d))
        })
    };
    let lhs = diff(&base.theta, &moved.theta) + diff(&base.phi, &moved.phi);
    Ok(DependenceReport {
        lhs,
        perturbation_norm: pn,
        ratio: lhs / pn,
        ln_f_star: constants.ln_f_star,
        pass: constants.bound_holds(lhs, pn),
    })
}

/// Residuals of the four integration-by-parts identities between levels
/// `n-1` and `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IbpReport {
    pub step: usize,
    /// `(θ_t, I²θ_t) + ‖Iθ_t‖²`.
    pub dissipation: f64,
    /// `κ₁(θ_xx, I²θ_t) − (κ₁/2) d/dt‖θ‖²`.
    pub shear: f64,
    /// `κ₂(φ_xx, I²φ_t) − (κ₂/2) d/dt‖φ‖²`.
    pub bending: f64,
    /// `−κ₁(φ, I²φ_t) − (κ₁/2) d/dt‖Iφ‖²`.
    pub coupling: f64,
    /// Magnitude of the terms being compared, for relative statements.
    pub scale: [f64; 4],
}

impl IbpReport {
    pub fn residuals(&self) -> [f64; 4] {
        [self.dissipation, self.shear, self.bending, self.coupling]
    }
}

/// Checks the identities at the half step `t_{n-1/2}`: fields are averaged
/// over the two levels and rates are their difference over `dt`, so each
/// time derivative on the right is reproduced exactly and the residuals
/// measure the spatial duality alone.
pub fn verify_ibp_identities(
    tr: &Trajectory,
    kappa1: f64,
    kappa2: f64,
    n: usize,
) -> Result<IbpReport> {
    if n == 0 || n >= tr.n_levels() {
        return Err(Error::InsufficientHistory {
            needed: n + 1,
            got: tr.n_levels(),
        });
    }
    let g = &tr.grid;
    let dt = tr.dt;
    let mid = |u: &[Vec<f64>]| -> (Vec<f64>, Vec<f64>) {
        let avg = u[n].iter().zip(&u[n - 1]).map(|(a, b)| 0.5 * (a + b)).collect();
        let rate = u[n].iter().zip(&u[n - 1]).map(|(a, b)| (a - b) / dt).collect();
        (avg, rate)
    };
    let (th, th_t) = mid(&tr.theta);
    let (ph, ph_t) = mid(&tr.phi);
    let i2_th_t = g.ix2(&th_t);
    let i2_ph_t = g.ix2(&ph_t);
    let i_th_t = g.ix(&th_t);

    let a1 = g.inner(&th_t, &i2_th_t);
    let b1 = g.inner(&i_th_t, &i_th_t);

    let a2 = kappa1 * g.inner(&g.d2x(&th), &i2_th_t);
    let b2 = kappa1 * g.inner(&th, &th_t);

    let a3 = kappa2 * g.inner(&g.d2x(&ph), &i2_ph_t);
    let b3 = kappa2 * g.inner(&ph, &ph_t);

    let a4 = -kappa1 * g.inner(&ph, &i2_ph_t);
    let b4 = kappa1 * g.inner(&g.ix(&ph), &g.ix(&ph_t));

    Ok(IbpReport {
        step: n,
        dissipation: a1 + b1,
        shear: a2 - b2,
        bending: a3 - b3,
        coupling: a4 - b4,
        scale: [
            a1.abs().max(b1.abs()),
            a2.abs().max(b2.abs()),
            a3.abs().max(b3.abs()),
            a4.abs().max(b4.abs()),
        ],
    })
}

/// Largest absolute residual of each identity over levels `1..`.
pub fn worst_ibp_residuals(tr: &Trajectory, kappa1: f64, kappa2: f64) -> Result<[f64; 4]> {
    let mut worst = [0.0_f64; 4];
    for n in 1..tr.n_levels() {
        let r = verify_ibp_identities(tr, kappa1, kappa2, n)?.residuals();
        for (w, v) in worst.iter_mut().zip(r) {
            *w = w.max(v.abs());
        }
    }
    Ok(worst)
}

/// `κ₁‖θⁿ‖² + κ₂‖φⁿ‖² + ‖I_xφⁿ‖²` at every level.
pub fn discrete_energy(tr: &Trajectory, kappa1: f64, kappa2: f64) -> Vec<f64> {
    let g = &tr.grid;
    tr.theta
        .iter()
        .zip(&tr.phi)
        .map(|(th, ph)| {
            let i_ph = g.ix(ph);
            kappa1 * g.inner(th, th) + kappa2 * g.inner(ph, ph) + g.inner(&i_ph, &i_ph)
        })
        .collect()
}
