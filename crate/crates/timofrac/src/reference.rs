//! Independent explicit integrator for the classical (second-order in time)
//! system without memory, used as a cross-check for the `alpha = 1` limit.
//!
//! Central differences in time with the frictional term centred:
//! `(ρ₁/dt² + 1/(2dt)) θⁿ⁺¹ = ρ₁(2θⁿ − θⁿ⁻¹)/dt² + θⁿ⁻¹/(2dt) + κ₁(θ_x + φ)_x + F`,
//! and the analogous update for `φ`. Every new level is projected onto the
//! constraint space, and the first step uses a second-order Taylor start.

use timofrac_core::{BeamConfig, Error, Grid, ProblemData};

use crate::error::{HarnessError, Result};

/// Levels of `θ` and `φ` from the explicit scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceSolution {
    pub theta: Vec<Vec<f64>>,
    pub phi: Vec<Vec<f64>>,
}

// Accelerations (θ_tt, φ_tt) from the classical equations given θ_t.
fn accelerations(
    c: &BeamConfig,
    grid: &Grid,
    theta: &[f64],
    theta_t: &[f64],
    phi: &[f64],
    f: &[f64],
    g: &[f64],
) -> (Vec<f64>, Vec<f64>) {
    let (th_x, th_xx) = (grid.d1x(theta), grid.d2x(theta));
    let (ph_x, ph_xx) = (grid.d1x(phi), grid.d2x(phi));
    let mut a = grid.zeros();
    let mut b = grid.zeros();
    for i in 0..a.len() {
        let shear = th_x[i] + phi[i];
        a[i] = (c.kappa1 * (th_xx[i] + ph_x[i]) - theta_t[i] + f[i]) / c.rho1;
        b[i] = (c.kappa2 * ph_xx[i] - c.kappa1 * shear + g[i]) / c.rho2;
    }
    (a, b)
}

/// Integrates the memory-free classical system on the grid of `config`.
pub fn classical_reference(config: &BeamConfig, data: &ProblemData) -> Result<ReferenceSolution> {
    if !config.kernel.is_zero() {
        return Err(HarnessError::config(
            "kernel.kind",
            "the classical reference integrator requires kernel.kind=zero",
        ));
    }
    let grid = config.grid()?;
    let dt = config.dt();
    let n_steps = config.n_steps;
    let mut theta = Vec::with_capacity(n_steps + 1);
    let mut phi = Vec::with_capacity(n_steps + 1);

    let th0 = grid.project_constraints(&data.init_disp);
    let ph0 = grid.project_constraints(&data.init_rot);
    let psi = grid.project_constraints(&data.init_disp_rate);
    let gr = grid.project_constraints(&data.init_rot_rate);
    let (a0, b0) = accelerations(
        config,
        &grid,
        &th0,
        &psi,
        &ph0,
        data.forcing_f.level(0),
        data.forcing_g.level(0),
    );
    let taylor = |u: &[f64], v: &[f64], acc: &[f64]| -> Vec<f64> {
        let mut w: Vec<f64> = (0..u.len())
            .map(|i| u[i] + dt * v[i] + 0.5 * dt * dt * acc[i])
            .collect();
        grid.project_in_place(&mut w);
        w
    };
    let th1 = taylor(&th0, &psi, &a0);
    let ph1 = taylor(&ph0, &gr, &b0);
    theta.push(th0);
    theta.push(th1);
    phi.push(ph0);
    phi.push(ph1);

    let lead1 = config.rho1 / (dt * dt) + 0.5 / dt;
    let lead2 = config.rho2 / (dt * dt);
    for k in 1..n_steps {
        let (th, thm) = (&theta[k], &theta[k - 1]);
        let (ph, phm) = (&phi[k], &phi[k - 1]);
        let (th_x, th_xx) = (grid.d1x(th), grid.d2x(th));
        let (ph_x, ph_xx) = (grid.d1x(ph), grid.d2x(ph));
        let f = data.forcing_f.level(k);
        let g = data.forcing_g.level(k);
        let mut th_new = grid.zeros();
        let mut ph_new = grid.zeros();
        for i in 0..th_new.len() {
            let inertia1 = config.rho1 * (2.0 * th[i] - thm[i]) / (dt * dt);
            let spatial1 = config.kappa1 * (th_xx[i] + ph_x[i]) + f[i];
            th_new[i] = (inertia1 + thm[i] / (2.0 * dt) + spatial1) / lead1;
            let inertia2 = config.rho2 * (2.0 * ph[i] - phm[i]) / (dt * dt);
            let spatial2 = config.kappa2 * ph_xx[i] - config.kappa1 * (th_x[i] + ph[i]) + g[i];
            ph_new[i] = (inertia2 + spatial2) / lead2;
        }
        if !th_new.iter().chain(&ph_new).all(|v| v.is_finite()) {
            return Err(Error::NumericalFailure { step: k + 1 }.into());
        }
        grid.project_in_place(&mut th_new);
        grid.project_in_place(&mut ph_new);
        theta.push(th_new);
        phi.push(ph_new);
    }
    Ok(ReferenceSolution { theta, phi })
}

/// Largest nodal difference between two level sequences.
pub fn max_difference(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(u, v)| u.iter().zip(v).map(|(x, y)| (x - y).abs()))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use timofrac_core::KernelSpec;

    fn classical(n_cells: usize, n_steps: usize) -> BeamConfig {
        BeamConfig {
            rho1: 1.0,
            rho2: 1.0,
            kappa1: 1.0,
            kappa2: 1.0,
            length: 1.0,
            horizon: 1.0,
            alpha: 1.0,
            n_cells,
            n_steps,
            kernel: KernelSpec::Zero,
            classical_limit: true,
        }
    }

    #[test]
    fn reference_is_second_order_in_time() {
        let errs: Vec<f64> = [400usize, 800, 1600]
            .iter()
            .map(|&n| {
                let c = classical(32, n);
                let d = crate::scenario::classical_data(&c, 1.0).unwrap();
                let r = classical_reference(&c, &d).unwrap();
                let c2 = classical(32, 2 * n);
                let d2 = crate::scenario::classical_data(&c2, 1.0).unwrap();
                let r2 = classical_reference(&c2, &d2).unwrap();
                let coarse_end = r.theta.last().unwrap();
                let fine_end = r2.theta.last().unwrap();
                max_difference(std::slice::from_ref(coarse_end), std::slice::from_ref(fine_end))
            })
            .collect();
        let order = (errs[1] / errs[2]).log2();
        assert!(order > 1.8, "errors {errs:?}");
    }

    #[test]
    fn memory_kernel_is_refused() {
        let mut c = classical(16, 100);
        c.kernel = KernelSpec::Exponential { m0: 0.1, lambda: 1.0 };
        let d = ProblemData::zeros(&c.grid().unwrap(), 100);
        assert!(classical_reference(&c, &d).is_err());
    }
}
