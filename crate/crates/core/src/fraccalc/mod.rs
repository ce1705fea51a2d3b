//! Discrete fractional operators and the special functions they need.
//!
//! All operators work on uniformly sampled histories starting at `t = 0`.

mod caputo;
mod gamma;
mod mittag_leffler;
mod riemann_liouville;

use alloc::vec::Vec;

use crate::{Error, Result};

pub use caputo::{
    caputo2_apply, caputo2_apply_with_rate, caputo_apply, caputo_series, rate_series,
    CaputoWeights,
};
pub use gamma::{gamma_fn, ln_gamma};
pub use mittag_leffler::{
    ln_mittag_leffler2, mittag_leffler, mittag_leffler2, mittag_leffler2_with_budget,
    DEFAULT_TERM_BUDGET, LOG_TERM_BUDGET, MAX_ABS_ARGUMENT,
};
pub use riemann_liouville::{rl_integral, rl_integral_series};

/// Order of a fractional operator.
///
/// Caputo derivatives accept orders in (0,1) or (1,2); Riemann-Liouville
/// integrals accept (0,1].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct FracOrder(f64);

impl FracOrder {
    pub fn caputo(beta: f64) -> Result<Self> {
        let ok = (beta > 0.0 && beta < 1.0) || (beta > 1.0 && beta < 2.0);
        if ok {
            Ok(FracOrder(beta))
        } else {
            Err(Error::Domain {
                what: "Caputo order must lie in (0,1) or (1,2)",
                value: beta,
            })
        }
    }

    pub fn integral(beta: f64) -> Result<Self> {
        if beta > 0.0 && beta <= 1.0 {
            Ok(FracOrder(beta))
        } else {
            Err(Error::Domain {
                what: "Riemann-Liouville order must lie in (0,1]",
                value: beta,
            })
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

/// Samples `v(k dt)` for `k = 0, 1, ...`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
    dt: f64,
}

impl TimeSeries {
    pub fn new(values: Vec<f64>, dt: f64) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::Domain {
                what: "time step must be positive",
                value: dt,
            });
        }
        if values.is_empty() {
            return Err(Error::InsufficientHistory { needed: 1, got: 0 });
        }
        Ok(TimeSeries { values, dt })
    }

    /// Samples `f` at `0, dt, ..., n_steps dt`.
    pub fn from_fn(n_steps: usize, dt: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = (0..=n_steps).map(|k| f(k as f64 * dt)).collect();
        Self::new(values, dt)
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn dt(&self) -> f64 {
        self.dt
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.dt
    }

    /// Final sample time.
    pub fn horizon(&self) -> f64 {
        self.time(self.values.len() - 1)
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// The first `len` samples.
    pub fn prefix(&self, len: usize) -> TimeSeries {
        TimeSeries {
            values: self.values[..len].to_vec(),
            dt: self.dt,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_ranges() {
        assert!(FracOrder::caputo(0.5).is_ok());
        assert!(FracOrder::caputo(1.5).is_ok());
        assert!(FracOrder::caputo(1.0).is_err());
        assert!(FracOrder::caputo(2.0).is_err());
        assert!(FracOrder::caputo(0.0).is_err());
        assert!(FracOrder::integral(1.0).is_ok());
        assert!(FracOrder::integral(1.2).is_err());
        assert!(FracOrder::integral(f64::NAN).is_err());
    }

    #[test]
    fn series_invariants() {
        assert!(TimeSeries::new(alloc::vec![1.0], 0.0).is_err());
        assert!(TimeSeries::new(alloc::vec![], 0.1).is_err());
        let s = TimeSeries::from_fn(4, 0.25, |t| t).unwrap();
        assert_eq!(s.len(), 5);
        assert_eq!(s.horizon(), 1.0);
    }
}
