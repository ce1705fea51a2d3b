//! Uniform grid on `(0, L)` and the discrete operators used by the solver.
//!
//! Every integral (moments, inner products, antiderivatives) is the composite
//! trapezoidal rule, so that the discrete integration-by-parts identities
//! close at `O(dx²)`. Fields are plain slices of nodal values `x_0 = 0 .. x_N = L`.

use alloc::vec;
use alloc::vec::Vec;

use crate::math::sqrt;
use crate::{Error, Result};

/// Smallest admissible number of cells.
pub const MIN_CELLS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    length: f64,
    n_cells: usize,
    dx: f64,
}

impl Grid {
    pub fn new(length: f64, n_cells: usize) -> Result<Self> {
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::InvalidConfig {
                field: "beam.length",
                reason: "must be positive and finite",
            });
        }
        if n_cells < MIN_CELLS {
            return Err(Error::InvalidConfig {
                field: "grid.n_cells",
                reason: "must be at least 8",
            });
        }
        Ok(Grid {
            length,
            n_cells,
            dx: length / n_cells as f64,
        })
    }

    #[inline]
    pub fn length(&self) -> f64 {
        self.length
    }

    #[inline]
    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    #[inline]
    pub fn n_nodes(&self) -> usize {
        self.n_cells + 1
    }

    #[inline]
    pub fn dx(&self) -> f64 {
        self.dx
    }

    /// Node `i`; the last node is exactly `L`.
    #[inline]
    pub fn node(&self, i: usize) -> f64 {
        if i == self.n_cells {
            self.length
        } else {
            i as f64 * self.dx
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_nodes()).map(|i| self.node(i)).collect()
    }

    /// Samples `f` at the nodes.
    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        (0..self.n_nodes()).map(|i| f(self.node(i))).collect()
    }

    pub fn zeros(&self) -> Vec<f64> {
        vec![0.0; self.n_nodes()]
    }

    #[inline]
    fn check(&self, u: &[f64]) {
        assert_eq!(u.len(), self.n_nodes(), "field length does not match grid");
    }

    /// Trapezoidal quadrature weight of node `i`.
    #[inline]
    pub fn weight(&self, i: usize) -> f64 {
        if i == 0 || i == self.n_cells {
            0.5 * self.dx
        } else {
            self.dx
        }
    }

    /// `∫₀ᴸ u v dx` by the trapezoidal rule.
    pub fn inner(&self, u: &[f64], v: &[f64]) -> f64 {
        self.check(u);
        self.check(v);
        let n = self.n_cells;
        let interior: f64 = (1..n).map(|i| u[i] * v[i]).sum();
        self.dx * (interior + 0.5 * (u[0] * v[0] + u[n] * v[n]))
    }

    pub fn norm_l2(&self, u: &[f64]) -> f64 {
        sqrt(self.inner(u, u))
    }

    /// `∫₀ᴸ u dx`.
    pub fn moment0(&self, u: &[f64]) -> f64 {
        self.check(u);
        let n = self.n_cells;
        let interior: f64 = u[1..n].iter().sum();
        self.dx * (interior + 0.5 * (u[0] + u[n]))
    }

    /// `∫₀ᴸ x u dx`.
    pub fn moment1(&self, u: &[f64]) -> f64 {
        self.check(u);
        let n = self.n_cells;
        let interior: f64 = (1..n).map(|i| self.node(i) * u[i]).sum();
        self.dx * (interior + 0.5 * self.length * u[n])
    }

    /// Cumulative trapezoidal antiderivative `∫₀ˣ u`; zero at `x = 0`.
    pub fn ix(&self, u: &[f64]) -> Vec<f64> {
        self.check(u);
        let mut out = Vec::with_capacity(u.len());
        let mut acc = 0.0;
        out.push(0.0);
        for i in 1..u.len() {
            acc += 0.5 * self.dx * (u[i - 1] + u[i]);
            out.push(acc);
        }
        out
    }

    /// `∫₀ˣ ∫₀^ξ u`.
    pub fn ix2(&self, u: &[f64]) -> Vec<f64> {
        self.ix(&self.ix(u))
    }

    /// Second derivative: central differences inside, second-order one-sided
    /// four-point stencils at both ends.
    pub fn d2x(&self, u: &[f64]) -> Vec<f64> {
        self.check(u);
        let n = self.n_cells;
        let h2 = self.dx * self.dx;
        let mut out = vec![0.0; u.len()];
        out[0] = (2.0 * u[0] - 5.0 * u[1] + 4.0 * u[2] - u[3]) / h2;
        for i in 1..n {
            out[i] = (u[i - 1] - 2.0 * u[i] + u[i + 1]) / h2;
        }
        out[n] = (2.0 * u[n] - 5.0 * u[n - 1] + 4.0 * u[n - 2] - u[n - 3]) / h2;
        out
    }

    /// First derivative: central differences inside, three-point one-sided at the ends.
    pub fn d1x(&self, u: &[f64]) -> Vec<f64> {
        self.check(u);
        let n = self.n_cells;
        let h = 2.0 * self.dx;
        let mut out = vec![0.0; u.len()];
        out[0] = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / h;
        for i in 1..n {
            out[i] = (u[i + 1] - u[i - 1]) / h;
        }
        out[n] = (3.0 * u[n] - 4.0 * u[n - 1] + u[n - 2]) / h;
        out
    }

    /// Coefficients `(a, b)` of the affine field `a + b x` carrying the same
    /// two moments as `u`.
    pub fn affine_part(&self, u: &[f64]) -> (f64, f64) {
        let (s0, s1, s2) = self.moment_gram();
        let det = s0 * s2 - s1 * s1;
        // det → L⁴/12 as dx → 0
        assert!(det > 0.0, "singular moment system");
        let m0 = self.moment0(u);
        let m1 = self.moment1(u);
        ((s2 * m0 - s1 * m1) / det, (s0 * m1 - s1 * m0) / det)
    }

    // Discrete moments of 1, x, x².
    fn moment_gram(&self) -> (f64, f64, f64) {
        let n = self.n_cells;
        let l = self.length;
        let interior1: f64 = (1..n).map(|i| self.node(i)).sum();
        let interior2: f64 = (1..n).map(|i| self.node(i) * self.node(i)).sum();
        (
            l,
            self.dx * (interior1 + 0.5 * l),
            self.dx * (interior2 + 0.5 * l * l),
        )
    }

    /// Removes the affine part so both moments of the result vanish.
    pub fn project_in_place(&self, u: &mut [f64]) {
        let (a, b) = self.affine_part(u);
        for (i, ui) in u.iter_mut().enumerate() {
            *ui -= a + b * self.node(i);
        }
    }

    pub fn project_constraints(&self, u: &[f64]) -> Vec<f64> {
        let mut out = u.to_vec();
        self.project_in_place(&mut out);
        out
    }

    /// `(moment0, moment1)` of `u`.
    pub fn constraint_residual(&self, u: &[f64]) -> (f64, f64) {
        (self.moment0(u), self.moment1(u))
    }

    /// Whether both moments are within `rel_tol · L · max|u|`.
    pub fn satisfies_constraints(&self, u: &[f64], rel_tol: f64) -> bool {
        let scale = self.length * max_abs(u);
        let (m0, m1) = self.constraint_residual(u);
        m0.abs() <= rel_tol * scale && m1.abs() <= rel_tol * scale
    }
}

pub(crate) fn max_abs(u: &[f64]) -> f64 {
    u.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}
