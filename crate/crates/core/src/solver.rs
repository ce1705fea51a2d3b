//! Implicit time stepping for the coupled fractional Timoshenko system
//!
//! ```text
//! ρ₁ ∂^{α+1}θ − κ₁(θ_x + φ)_x + θ_t                      = F
//! ρ₂ ∂^{α+1}φ − κ₂ φ_xx + κ₁(θ_x + φ) + ∫₀ᵗ m(t−s) φ_xx ds = G
//! ```
//!
//! with both integral moments of `θ` and `φ` held at zero.
//!
//! The order-`(α+1)` Caputo terms use the L1 scheme on a second-order sampled
//! velocity, with the newest level implicit. `θ_t` is the three-point backward
//! difference. The memory integral is trapezoidal with its newest node
//! implicit. The constant system matrix is LU-factored once per solve.
//! Each new level is passed through the moment projection.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::fraccalc::CaputoWeights;
use crate::memory::{memory_history_part, validate_kernel, KernelReport, KernelSpec, MemoryKernel};
use crate::spatial::{max_abs, Grid};
use crate::{Error, Result};

/// Tolerance of the `ρ₁/κ₁ = ρ₂/κ₂` relation.
pub const RATIO_REL_TOL: f64 = 1e-12;

/// Relative size of moment residuals tolerated in initial data.
pub const COMPAT_REL_TOL: f64 = 1e-10;

/// Physical and numerical parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamConfig {
    pub rho1: f64,
    pub rho2: f64,
    pub kappa1: f64,
    pub kappa2: f64,
    pub length: f64,
    pub horizon: f64,
    pub alpha: f64,
    pub n_cells: usize,
    pub n_steps: usize,
    pub kernel: KernelSpec,
    /// Admits `alpha = 1`, the integer-order system.
    pub classical_limit: bool,
}

impl BeamConfig {
    #[inline]
    pub fn dt(&self) -> f64 {
        self.horizon / self.n_steps as f64
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.length, self.n_cells)
    }

    pub fn sampled_kernel(&self) -> MemoryKernel {
        MemoryKernel::sample(&self.kernel, self.dt(), self.n_steps)
    }

    /// Checks every invariant and returns the kernel report.
    pub fn validate(&self) -> Result<KernelReport> {
        let positive = [
            (self.rho1, "beam.rho1"),
            (self.rho2, "beam.rho2"),
            (self.kappa1, "beam.kappa1"),
            (self.kappa2, "beam.kappa2"),
            (self.length, "beam.length"),
            (self.horizon, "time.horizon"),
        ];
        for (v, field) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidConfig {
                    field,
                    reason: "must be positive and finite",
                });
            }
        }
        let r1 = self.rho1 / self.kappa1;
        let r2 = self.rho2 / self.kappa2;
        if (r1 - r2).abs() > RATIO_REL_TOL * r1.max(r2) {
            return Err(Error::InvalidConfig {
                field: "beam.rho2",
                reason: "rho1/kappa1 must equal rho2/kappa2",
            });
        }
        let fractional = self.alpha > 0.0 && self.alpha < 1.0;
        let classical = self.alpha == 1.0 && self.classical_limit;
        if !(fractional || classical) {
            return Err(Error::InvalidConfig {
                field: "frac.alpha",
                reason: "alpha must lie in (0,1); alpha = 1 needs flags.classical_limit",
            });
        }
        self.grid()?;
        if self.n_steps < 2 {
            return Err(Error::InvalidConfig {
                field: "grid.n_steps",
                reason: "must be at least 2",
            });
        }
        validate_kernel(&self.sampled_kernel(), self.kappa2, self.horizon)
    }
}

/// A field sampled at every grid node and every time level `0..=n_steps`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeField {
    levels: Vec<Vec<f64>>,
}

impl SpaceTimeField {
    pub fn zeros(grid: &Grid, n_steps: usize) -> Self {
        SpaceTimeField {
            levels: vec![grid.zeros(); n_steps + 1],
        }
    }

    pub fn from_fn(grid: &Grid, dt: f64, n_steps: usize, f: impl Fn(f64, f64) -> f64) -> Self {
        let levels = (0..=n_steps)
            .map(|k| {
                let t = k as f64 * dt;
                grid.sample(|x| f(x, t))
            })
            .collect();
        SpaceTimeField { levels }
    }

    pub fn from_levels(levels: Vec<Vec<f64>>) -> Self {
        SpaceTimeField { levels }
    }

    #[inline]
    pub fn level(&self, k: usize) -> &[f64] {
        &self.levels[k]
    }

    pub fn levels(&self) -> &[Vec<f64>] {
        &self.levels
    }

    pub fn n_levels(&self) -> usize {
        self.levels.len()
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &SpaceTimeField, b: f64) -> SpaceTimeField {
        SpaceTimeField {
            levels: self
                .levels
                .iter()
                .zip(&other.levels)
                .map(|(u, v)| combine(u, a, v, b))
                .collect(),
        }
    }
}

fn combine(u: &[f64], a: f64, v: &[f64], b: f64) -> Vec<f64> {
    u.iter().zip(v).map(|(x, y)| a * x + b * y).collect()
}

/// Forcing and initial data.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemData {
    pub forcing_f: SpaceTimeField,
    pub forcing_g: SpaceTimeField,
    /// `θ(·,0)`.
    pub init_disp: Vec<f64>,
    /// `θ_t(·,0)`.
    pub init_disp_rate: Vec<f64>,
    /// `φ(·,0)`.
    pub init_rot: Vec<f64>,
    /// `φ_t(·,0)`.
    pub init_rot_rate: Vec<f64>,
}

impl ProblemData {
    pub fn zeros(grid: &Grid, n_steps: usize) -> Self {
        ProblemData {
            forcing_f: SpaceTimeField::zeros(grid, n_steps),
            forcing_g: SpaceTimeField::zeros(grid, n_steps),
            init_disp: grid.zeros(),
            init_disp_rate: grid.zeros(),
            init_rot: grid.zeros(),
            init_rot_rate: grid.zeros(),
        }
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &ProblemData, b: f64) -> ProblemData {
        ProblemData {
            forcing_f: self.forcing_f.combine(a, &other.forcing_f, b),
            forcing_g: self.forcing_g.combine(a, &other.forcing_g, b),
            init_disp: combine(&self.init_disp, a, &other.init_disp, b),
            init_disp_rate: combine(&self.init_disp_rate, a, &other.init_disp_rate, b),
            init_rot: combine(&self.init_rot, a, &other.init_rot, b),
            init_rot_rate: combine(&self.init_rot_rate, a, &other.init_rot_rate, b),
        }
    }

    pub fn scaled(&self, s: f64) -> ProblemData {
        self.combine(s, self, 0.0)
    }

    pub fn initial_fields(&self) -> [&[f64]; 4] {
        [
            &self.init_disp,
            &self.init_disp_rate,
            &self.init_rot,
            &self.init_rot_rate,
        ]
    }

    fn check_shape(&self, grid: &Grid, n_steps: usize) -> Result<()> {
        let nodes = grid.n_nodes();
        for f in self.initial_fields() {
            if f.len() != nodes {
                return Err(Error::ShapeMismatch {
                    expected: nodes,
                    got: f.len(),
                });
            }
        }
        for st in [&self.forcing_f, &self.forcing_g] {
            if st.n_levels() != n_steps + 1 {
                return Err(Error::ShapeMismatch {
                    expected: n_steps + 1,
                    got: st.n_levels(),
                });
            }
            if let Some(bad) = st.levels.iter().find(|l| l.len() != nodes) {
                return Err(Error::ShapeMismatch {
                    expected: nodes,
                    got: bad.len(),
                });
            }
        }
        Ok(())
    }
}

/// Moment residuals of the four initial fields and the data actually used.
#[derive(Debug, Clone, PartialEq)]
pub struct CompatibilityReport {
    /// `(moment0, moment1)` for `θ(·,0)`, `θ_t(·,0)`, `φ(·,0)`, `φ_t(·,0)`.
    pub residuals: [(f64, f64); 4],
    /// Which of the four fields were projected.
    pub projected: [bool; 4],
    pub data: ProblemData,
}

impl CompatibilityReport {
    pub fn intervened(&self) -> bool {
        self.projected.iter().any(|&p| p)
    }
}

/// Measures the moment residuals of the initial data and projects every
/// field whose residual exceeds `1e-10 · L · max|field|`.
pub fn check_compatibility(grid: &Grid, data: &ProblemData) -> CompatibilityReport {
    let mut out = data.clone();
    let mut residuals = [(0.0, 0.0); 4];
    let mut projected = [false; 4];
    let fields: [&mut Vec<f64>; 4] = [
        &mut out.init_disp,
        &mut out.init_disp_rate,
        &mut out.init_rot,
        &mut out.init_rot_rate,
    ];
    for (i, f) in fields.into_iter().enumerate() {
        residuals[i] = grid.constraint_residual(f);
        if !grid.satisfies_constraints(f, COMPAT_REL_TOL) {
            grid.project_in_place(f);
            projected[i] = true;
        }
    }
    CompatibilityReport {
        residuals,
        projected,
        data: out,
    }
}

/// Switches for diagnostic runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Apply the moment projection to the data and every new level.
    pub project: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { project: true }
    }
}

/// Full discrete history of a solve.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub grid: Grid,
    pub dt: f64,
    pub theta: Vec<Vec<f64>>,
    pub phi: Vec<Vec<f64>>,
    /// `ψ` at level 0, backward first differences afterwards.
    pub theta_rate: Vec<Vec<f64>>,
    /// `g` at level 0, backward first differences afterwards.
    pub phi_rate: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn n_levels(&self) -> usize {
        self.theta.len()
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.dt
    }

    /// Largest `|moment| / (L · max|field|)` over every stored field.
    pub fn worst_constraint_residual(&self) -> f64 {
        let mut worst = 0.0_f64;
        for u in self.theta.iter().chain(&self.phi) {
            let scale = self.grid.length() * max_abs(u);
            if scale == 0.0 {
                continue;
            }
            let (m0, m1) = self.grid.constraint_residual(u);
            worst = worst.max(m0.abs().max(m1.abs()) / scale);
        }
        worst
    }
}

/// Incremental solver; [`solve`] drives it to the horizon.
pub struct Stepper<'a> {
    config: BeamConfig,
    data: &'a ProblemData,
    options: SolverOptions,
    grid: Grid,
    dt: f64,
    weights: CaputoWeights,
    kernel: MemoryKernel,
    lu: nalgebra::linalg::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    theta: Vec<Vec<f64>>,
    phi: Vec<Vec<f64>>,
    // second-order velocity samples, final once the next level exists
    theta_vel: Vec<Vec<f64>>,
    phi_vel: Vec<Vec<f64>>,
    phi_xx: Vec<Vec<f64>>,
}

impl<'a> Stepper<'a> {
    /// Validates `config`, projects incompatible initial data and builds the
    /// first two levels.
    pub fn new(config: &BeamConfig, data: &'a ProblemData, options: SolverOptions) -> Result<Self> {
        config.validate()?;
        let grid = config.grid()?;
        data.check_shape(&grid, config.n_steps)?;
        let dt = config.dt();
        let gamma = config.alpha;
        let weights = CaputoWeights::with_exponent(gamma, dt, config.n_steps + 1);
        let kernel = config.sampled_kernel();
        let lu = build_matrix(config, &grid, &weights, &kernel).lu();
        if !lu.is_invertible() {
            return Err(Error::NumericalFailure { step: 0 });
        }

        let (theta0, psi, phi0, g) = if options.project {
            let d = check_compatibility(&grid, data).data;
            (d.init_disp, d.init_disp_rate, d.init_rot, d.init_rot_rate)
        } else {
            (
                data.init_disp.clone(),
                data.init_disp_rate.clone(),
                data.init_rot.clone(),
                data.init_rot_rate.clone(),
            )
        };
        let mut theta1 = combine(&theta0, 1.0, &psi, dt);
        let mut phi1 = combine(&phi0, 1.0, &g, dt);
        if options.project {
            grid.project_in_place(&mut theta1);
            grid.project_in_place(&mut phi1);
        }
        let cap = config.n_steps + 1;
        let mut s = Stepper {
            config: *config,
            data,
            options,
            grid,
            dt,
            weights,
            kernel,
            lu,
            theta: Vec::with_capacity(cap),
            phi: Vec::with_capacity(cap),
            theta_vel: Vec::with_capacity(cap),
            phi_vel: Vec::with_capacity(cap),
            phi_xx: Vec::with_capacity(cap),
        };
        s.phi_xx.push(grid.d2x(&phi0));
        s.phi_xx.push(grid.d2x(&phi1));
        s.theta_vel.push(psi);
        s.phi_vel.push(g);
        s.theta.push(theta0);
        s.theta.push(theta1);
        s.phi.push(phi0);
        s.phi.push(phi1);
        Ok(s)
    }

    /// Index of the newest stored level.
    pub fn current_level(&self) -> usize {
        self.theta.len() - 1
    }

    pub fn is_done(&self) -> bool {
        self.current_level() >= self.config.n_steps
    }

    /// Computes the next level.
    pub fn step(&mut self) -> Result<()> {
        let k = self.current_level() + 1;
        if k > self.config.n_steps {
            return Err(Error::InsufficientHistory {
                needed: k + 1,
                got: self.config.n_steps + 1,
            });
        }
        let n = self.grid.n_nodes();
        let dt = self.dt;
        let c = &self.config;

        // known part of the Caputo terms at level k
        let theta_hist = self.caputo_known(&self.theta, &self.theta_vel, k);
        let phi_hist = self.caputo_known(&self.phi, &self.phi_vel, k);
        let mem = memory_history_part(&self.phi_xx, &self.kernel, k)?;

        let f = self.data.forcing_f.level(k);
        let g = self.data.forcing_g.level(k);
        let (tm1, tm2) = (&self.theta[k - 1], &self.theta[k - 2]);
        let mut rhs = DVector::zeros(2 * n);
        for i in 0..n {
            let damping_known = (-4.0 * tm1[i] + tm2[i]) / (2.0 * dt);
            rhs[i] = f[i] - c.rho1 * theta_hist[i] - damping_known;
            rhs[n + i] = g[i] - c.rho2 * phi_hist[i] - mem[i];
        }
        let sol = self
            .lu
            .solve(&rhs)
            .filter(|v| v.iter().all(|x| x.is_finite()))
            .ok_or(Error::NumericalFailure { step: k })?;
        let mut theta_k: Vec<f64> = sol.rows(0, n).iter().copied().collect();
        let mut phi_k: Vec<f64> = sol.rows(n, n).iter().copied().collect();
        if self.options.project {
            self.grid.project_in_place(&mut theta_k);
            self.grid.project_in_place(&mut phi_k);
        }

        // the central velocity at k-1 is now available
        let inv = 1.0 / (2.0 * dt);
        let tv = combine(&theta_k, inv, &self.theta[k - 2], -inv);
        let pv = combine(&phi_k, inv, &self.phi[k - 2], -inv);
        self.theta_vel.push(tv);
        self.phi_vel.push(pv);
        self.phi_xx.push(self.grid.d2x(&phi_k));
        self.theta.push(theta_k);
        self.phi.push(phi_k);
        Ok(())
    }

    // Everything in the discrete order-(α+1) derivative at level k except the
    // multiple of u_k. Velocity samples 0..=k-2 are final.
    fn caputo_known(&self, u: &[Vec<f64>], vel: &[Vec<f64>], k: usize) -> Vec<f64> {
        let b = self.weights.coefficients();
        let dt = self.dt;
        let n = self.grid.n_nodes();
        let mut acc = vec![0.0; n];
        // w_k (BDF2) and w_{k-1} (central) without their u_k parts
        let ck = b[0] / (2.0 * dt);
        let ckm1 = (b[1] - b[0]) / (2.0 * dt);
        for i in 0..n {
            acc[i] = ck * (-4.0 * u[k - 1][i] + u[k - 2][i]) - ckm1 * u[k - 2][i];
        }
        for (j, w) in vel.iter().enumerate().take(k - 1).skip(1) {
            let coef = b[k - j] - b[k - 1 - j];
            if coef == 0.0 {
                continue;
            }
            for (a, wi) in acc.iter_mut().zip(w) {
                *a += coef * wi;
            }
        }
        let c0 = b[k - 1];
        for (a, wi) in acc.iter_mut().zip(&vel[0]) {
            *a -= c0 * wi;
        }
        acc
    }

    /// Runs to the horizon and returns the trajectory.
    pub fn run(mut self) -> Result<Trajectory> {
        while !self.is_done() {
            self.step()?;
        }
        Ok(self.finish())
    }

    /// Trajectory of the levels computed so far.
    pub fn finish(self) -> Trajectory {
        let dt = self.dt;
        let rates = |u: &[Vec<f64>], first: &[f64]| -> Vec<Vec<f64>> {
            let mut r = Vec::with_capacity(u.len());
            r.push(first.to_vec());
            for w in u.windows(2) {
                r.push(combine(&w[1], 1.0 / dt, &w[0], -1.0 / dt));
            }
            r
        };
        let theta_rate = rates(&self.theta, &self.theta_vel[0]);
        let phi_rate = rates(&self.phi, &self.phi_vel[0]);
        Trajectory {
            grid: self.grid,
            dt,
            theta: self.theta,
            phi: self.phi,
            theta_rate,
            phi_rate,
        }
    }
}

// Newest-level operator. The Caputo diagonal is (2b₀ + b₁)/(2dt) and θ_t
// contributes 3/(2dt).
fn build_matrix(
    c: &BeamConfig,
    grid: &Grid,
    weights: &CaputoWeights,
    kernel: &MemoryKernel,
) -> DMatrix<f64> {
    let n = grid.n_nodes();
    let b = weights.coefficients();
    let dt = weights.step();
    let cd = (2.0 * b[0] + b[1]) / (2.0 * dt);
    let d2 = operator_matrix(n, |u| grid.d2x(u));
    let d1 = operator_matrix(n, |u| grid.d1x(u));
    let mem0 = 0.5 * dt * kernel.at_zero();
    let mut a = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] = -c.kappa1 * d2[(i, j)];
            a[(i, n + j)] = -c.kappa1 * d1[(i, j)];
            a[(n + i, j)] = c.kappa1 * d1[(i, j)];
            a[(n + i, n + j)] = (mem0 - c.kappa2) * d2[(i, j)];
        }
        a[(i, i)] += c.rho1 * cd + 1.5 / dt;
        a[(n + i, n + i)] += c.rho2 * cd + c.kappa1;
    }
    a
}

fn operator_matrix(n: usize, op: impl Fn(&[f64]) -> Vec<f64>) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    let mut e = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        for (i, v) in op(&e).into_iter().enumerate() {
            m[(i, j)] = v;
        }
        e[j] = 0.0;
    }
    m
}

/// Solves with default options.
pub fn solve(config: &BeamConfig, data: &ProblemData) -> Result<Trajectory> {
    solve_with(config, data, SolverOptions::default())
}

pub fn solve_with(
    config: &BeamConfig,
    data: &ProblemData,
    options: SolverOptions,
) -> Result<Trajectory> {
    Stepper::new(config, data, options)?.run()
}
