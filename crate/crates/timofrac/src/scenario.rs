//! Concrete problem data for each registered scenario.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use timofrac_core::fraccalc::gamma_fn;
use timofrac_core::solver::SpaceTimeField;
use timofrac_core::{BeamConfig, Grid, KernelSpec, ProblemData};

use crate::config::{RunConfig, ScenarioName, ScenarioSpec};
use crate::error::Result;

/// Moment-free profile `p(x) = x² − Lx + L²/6`.
pub fn profile(length: f64) -> impl Fn(f64) -> f64 + Copy {
    move |x| x * x - length * x + length * length / 6.0
}

/// Manufactured exact solution `θ* = φ* = A t^q p(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Manufactured {
    pub amplitude: f64,
    pub power: u32,
    pub length: f64,
}

impl Manufactured {
    pub fn new(beam: &BeamConfig, spec: &ScenarioSpec) -> Self {
        Manufactured {
            amplitude: spec.amplitude,
            power: spec.time_power,
            length: beam.length,
        }
    }

    pub fn value(&self, x: f64, t: f64) -> f64 {
        self.amplitude * t.powi(self.power as i32) * profile(self.length)(x)
    }

    /// Forcing obtained by substituting the exact solution into both equations.
    pub fn data(&self, beam: &BeamConfig) -> Result<ProblemData> {
        let grid = beam.grid()?;
        let dt = beam.dt();
        let q = self.power as i32;
        let qf = self.power as f64;
        let a = beam.alpha;
        // ∂^{α+1} t^q = Γ(q+1)/Γ(q−α) t^{q−1−α}
        let cap_coef = gamma_fn(qf + 1.0)? / gamma_fn(qf - a)?;
        let cap = move |t: f64| if t == 0.0 { 0.0 } else { cap_coef * t.powf(qf - 1.0 - a) };
        let memory = memory_moment(beam.kernel, self.power);
        let (l, amp) = (self.length, self.amplitude);
        let p = profile(l);
        let dp = move |x: f64| 2.0 * x - l;
        let (r1, r2, k1, k2) = (beam.rho1, beam.rho2, beam.kappa1, beam.kappa2);

        let f = SpaceTimeField::from_fn(&grid, dt, beam.n_steps, move |x, t| {
            let tq = t.powi(q);
            amp * (r1 * cap(t) * p(x) - k1 * tq * (2.0 + dp(x)) + qf * t.powi(q - 1) * p(x))
        });
        let g = SpaceTimeField::from_fn(&grid, dt, beam.n_steps, move |x, t| {
            let tq = t.powi(q);
            amp * (r2 * cap(t) * p(x) - 2.0 * k2 * tq + k1 * tq * (dp(x) + p(x)) + 2.0 * memory(t))
        });
        let mut d = ProblemData::zeros(&grid, beam.n_steps);
        d.forcing_f = f;
        d.forcing_g = g;
        Ok(d)
    }

    /// Largest deviation of `levels` from the exact field.
    pub fn max_error(&self, grid: &Grid, dt: f64, levels: &[Vec<f64>]) -> f64 {
        let nodes = grid.nodes();
        let mut worst = 0.0_f64;
        for (k, u) in levels.iter().enumerate() {
            let t = k as f64 * dt;
            for (v, &x) in u.iter().zip(&nodes) {
                worst = worst.max((v - self.value(x, t)).abs());
            }
        }
        worst
    }
}

// t ↦ ∫₀ᵗ m(t−s) s^q ds for the exponential kernel, through
// K_q = t^q/λ − (q/λ) K_{q−1}, K_0 = (1 − e^{−λt})/λ.
fn memory_moment(kernel: KernelSpec, q: u32) -> impl Fn(f64) -> f64 + Copy {
    move |t: f64| match kernel {
        KernelSpec::Zero => 0.0,
        KernelSpec::Exponential { m0, lambda } => {
            let mut k = -(-lambda * t).exp_m1() / lambda;
            for j in 1..=q {
                k = t.powi(j as i32) / lambda - j as f64 / lambda * k;
            }
            m0 * k
        }
    }
}

// Independent stream per (seed, draw, purpose).
fn stream(seed: u64, draw: u64, purpose: u64) -> ChaCha8Rng {
    let mix = seed
        ^ draw.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ purpose.wrapping_add(1).wrapping_mul(0xD1B5_4A32_D192_ED03);
    ChaCha8Rng::seed_from_u64(mix)
}

struct Basis {
    fns: Vec<Vec<f64>>,
}

impl Basis {
    fn new(grid: &Grid, modes: usize) -> Self {
        let l = grid.length();
        let mut fns = Vec::with_capacity(2 * modes);
        for j in 1..=modes {
            let k = j as f64 * PI / l;
            fns.push(grid.sample(|x| (k * x).cos()));
            fns.push(grid.sample(|x| (k * x).sin()));
        }
        Basis { fns }
    }

    // Random combination with coefficients decaying like 1/j, projected.
    fn draw(&self, grid: &Grid, rng: &mut ChaCha8Rng, scale: f64) -> Vec<f64> {
        let mut u = grid.zeros();
        for (i, f) in self.fns.iter().enumerate() {
            let c = scale * rng.random_range(-1.0..1.0) / (i / 2 + 1) as f64;
            for (ui, fi) in u.iter_mut().zip(f) {
                *ui += c * fi;
            }
        }
        grid.project_in_place(&mut u);
        u
    }

    // Σ_j (a_j + b_j t + c_j t²) basis_j, projected at each level.
    fn draw_forcing(
        &self,
        grid: &Grid,
        dt: f64,
        n_steps: usize,
        rng: &mut ChaCha8Rng,
        scale: f64,
    ) -> SpaceTimeField {
        let poly: Vec<[f64; 3]> = (0..self.fns.len())
            .map(|i| {
                let s = scale / (i / 2 + 1) as f64;
                [
                    s * rng.random_range(-1.0..1.0),
                    s * rng.random_range(-1.0..1.0),
                    s * rng.random_range(-1.0..1.0),
                ]
            })
            .collect();
        let levels = (0..=n_steps)
            .map(|k| {
                let t = k as f64 * dt;
                let mut u = grid.zeros();
                for (f, c) in self.fns.iter().zip(&poly) {
                    let w = c[0] + c[1] * t + c[2] * t * t;
                    for (ui, fi) in u.iter_mut().zip(f) {
                        *ui += w * fi;
                    }
                }
                grid.project_in_place(&mut u);
                u
            })
            .collect();
        SpaceTimeField::from_levels(levels)
    }
}

/// Seeded smooth data: low Fourier modes in `x`, quadratic in `t`, every
/// field projected onto the constraint space.
pub fn random_smooth(
    beam: &BeamConfig,
    modes: usize,
    scale: f64,
    seed: u64,
    draw: u64,
    purpose: u64,
) -> Result<ProblemData> {
    let grid = beam.grid()?;
    let basis = Basis::new(&grid, modes);
    let mut rng = stream(seed, draw, purpose);
    let forcing_f = basis.draw_forcing(&grid, beam.dt(), beam.n_steps, &mut rng, scale);
    let forcing_g = basis.draw_forcing(&grid, beam.dt(), beam.n_steps, &mut rng, scale);
    Ok(ProblemData {
        forcing_f,
        forcing_g,
        init_disp: basis.draw(&grid, &mut rng, scale),
        init_disp_rate: basis.draw(&grid, &mut rng, scale),
        init_rot: basis.draw(&grid, &mut rng, scale),
        init_rot_rate: basis.draw(&grid, &mut rng, scale),
    })
}

const PURPOSE_DATA: u64 = 0;
const PURPOSE_PERTURBATION: u64 = 1;

/// Data of a random draw in a randomized suite.
pub fn random_draw(cfg: &RunConfig, draw: u64) -> Result<ProblemData> {
    random_smooth(
        &cfg.beam,
        cfg.scenario.modes,
        cfg.scenario.amplitude,
        cfg.seed,
        draw,
        PURPOSE_DATA,
    )
}

/// A perturbation direction of size `perturb_scale · amplitude`.
pub fn perturbation(cfg: &RunConfig, draw: u64) -> Result<ProblemData> {
    random_smooth(
        &cfg.beam,
        cfg.scenario.modes,
        cfg.scenario.amplitude * cfg.scenario.perturb_scale,
        cfg.seed,
        draw,
        PURPOSE_PERTURBATION,
    )
}

/// Free vibration from a displaced, moment-free initial state.
pub fn classical_data(beam: &BeamConfig, amplitude: f64) -> Result<ProblemData> {
    let grid = beam.grid()?;
    let l = beam.length;
    let mut d = ProblemData::zeros(&grid, beam.n_steps);
    d.init_disp = grid.sample(|x| amplitude * profile(l)(x));
    d.init_rot = grid.project_constraints(&grid.sample(|x| 0.5 * amplitude * (PI * x / l).cos()));
    Ok(d)
}

/// Data for the configured scenario; `perturb_pair` returns its base data.
pub fn scenario_data(cfg: &RunConfig) -> Result<ProblemData> {
    let beam = &cfg.beam;
    match cfg.scenario.name {
        ScenarioName::Zero => Ok(ProblemData::zeros(&beam.grid()?, beam.n_steps)),
        ScenarioName::ManufacturedPoly | ScenarioName::PerturbPair => {
            Manufactured::new(beam, &cfg.scenario).data(beam)
        }
        ScenarioName::RandomSmooth => random_draw(cfg, cfg.scenario.draw),
        ScenarioName::ClassicalLimit => classical_data(beam, cfg.scenario.amplitude),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn beam() -> BeamConfig {
        BeamConfig {
            rho1: 1.0,
            rho2: 1.0,
            kappa1: 1.0,
            kappa2: 1.0,
            length: 1.0,
            horizon: 1.0,
            alpha: 0.5,
            n_cells: 32,
            n_steps: 16,
            kernel: KernelSpec::Exponential { m0: 0.1, lambda: 1.0 },
            classical_limit: false,
        }
    }

    #[test]
    fn memory_moment_matches_quadrature() {
        let k = KernelSpec::Exponential { m0: 0.3, lambda: 1.7 };
        for q in [2u32, 3] {
            let f = memory_moment(k, q);
            let t = 0.8;
            let n = 20_000;
            let h = t / n as f64;
            let integral: f64 = (0..=n)
                .map(|i| {
                    let s = i as f64 * h;
                    let w = if i == 0 || i == n { 0.5 } else { 1.0 };
                    w * h * 0.3 * (-1.7 * (t - s)).exp() * s.powi(q as i32)
                })
                .sum();
            assert!((f(t) - integral).abs() < 1e-9, "q={q}");
        }
    }

    #[test]
    fn random_draws_are_reproducible_and_distinct() {
        let b = beam();
        let a = random_smooth(&b, 3, 1.0, 42, 0, 0).unwrap();
        let again = random_smooth(&b, 3, 1.0, 42, 0, 0).unwrap();
        let other = random_smooth(&b, 3, 1.0, 42, 1, 0).unwrap();
        assert_eq!(a, again);
        assert_ne!(a, other);
        let g = b.grid().unwrap();
        for f in a.initial_fields() {
            assert!(g.satisfies_constraints(f, 1e-12));
        }
    }

    #[test]
    fn profile_is_moment_free() {
        let g = Grid::new(2.0, 2048).unwrap();
        let p = g.sample(profile(2.0));
        let (m0, m1) = g.constraint_residual(&p);
        assert!(m0.abs() < 1e-6 && m1.abs() < 1e-6);
    }
}
