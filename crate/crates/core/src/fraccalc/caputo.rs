//! L1-type Caputo derivatives on uniform grids.
//!
//! For order `β ∈ (0,1)` the history is reconstructed piecewise linearly,
//! which gives the weights `b_i = ((i+1)^{1-β} - i^{1-β}) dt^{-β} / Γ(2-β)`.
//! Order `β ∈ (1,2)` is handled as the order `β-1` scheme applied to a
//! sampled first derivative.

use alloc::vec;
use alloc::vec::Vec;

use super::{FracOrder, TimeSeries};
use crate::math::powf;
use crate::{Error, Result};

/// L1 weights `b_0 .. b_{count-1}` for a fixed exponent and step.
#[derive(Debug, Clone, PartialEq)]
pub struct CaputoWeights {
    order: f64,
    step: f64,
    coefficients: Vec<f64>,
}

impl CaputoWeights {
    /// Weights for a Caputo order in (0,1).
    pub fn new(order: FracOrder, step: f64, count: usize) -> Result<Self> {
        let beta = order.value();
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::Domain {
                what: "L1 weights need an order in (0,1)",
                value: beta,
            });
        }
        if !(step > 0.0) {
            return Err(Error::Domain {
                what: "time step must be positive",
                value: step,
            });
        }
        Ok(Self::with_exponent(beta, step, count))
    }

    /// Also admits the limiting exponent 1, where the scheme is the plain
    /// backward difference (`b_0 = 1/dt`, all other weights zero).
    pub(crate) fn with_exponent(order: f64, step: f64, count: usize) -> Self {
        debug_assert!(order > 0.0 && order <= 1.0);
        let scale = powf(step, -order) / libm::tgamma(2.0 - order);
        let p = 1.0 - order;
        let coefficients = (0..count)
            .map(|i| {
                if i == 0 {
                    scale
                } else {
                    let i = i as f64;
                    scale * (powf(i + 1.0, p) - powf(i, p))
                }
            })
            .collect();
        CaputoWeights {
            order,
            step,
            coefficients,
        }
    }

    pub fn order(&self) -> f64 {
        self.order
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// Applies the scheme at the last sample of `series`:
    /// `Σ_j b_{n-1-j} (u_{j+1} - u_j)`.
    ///
    /// Panics if there are more intervals than weights.
    pub fn apply(&self, series: &[f64]) -> f64 {
        let n = series.len().saturating_sub(1);
        assert!(n <= self.coefficients.len(), "not enough L1 weights");
        (0..n)
            .map(|j| self.coefficients[n - 1 - j] * (series[j + 1] - series[j]))
            .sum()
    }
}

/// Caputo derivative of order in (0,1) at the final sample.
pub fn caputo_apply(history: &TimeSeries, order: FracOrder) -> Result<f64> {
    let beta = order.value();
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::Domain {
            what: "caputo_apply needs an order in (0,1)",
            value: beta,
        });
    }
    if history.len() < 2 {
        return Err(Error::InsufficientHistory {
            needed: 2,
            got: history.len(),
        });
    }
    let weights = CaputoWeights::with_exponent(beta, history.dt(), history.len() - 1);
    Ok(weights.apply(history.values()))
}

/// Caputo derivative of order in (0,1) at every sample; the value at `t = 0` is 0.
pub fn caputo_series(history: &TimeSeries, order: FracOrder) -> Result<Vec<f64>> {
    let beta = order.value();
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::Domain {
            what: "caputo_series needs an order in (0,1)",
            value: beta,
        });
    }
    let v = history.values();
    let weights = CaputoWeights::with_exponent(beta, history.dt(), v.len().saturating_sub(1));
    let mut out = vec![0.0; v.len()];
    for n in 1..v.len() {
        out[n] = weights.apply(&v[..=n]);
    }
    Ok(out)
}

/// Second-order samples of the first derivative at every grid time.
///
/// Interior points use central differences, the last point the one-sided
/// three-point backward formula. The first point is `initial_rate` when
/// known, otherwise the one-sided forward formula.
pub fn rate_series(values: &[f64], dt: f64, initial_rate: Option<f64>) -> Result<Vec<f64>> {
    let len = values.len();
    if len < 3 {
        return Err(Error::InsufficientHistory { needed: 3, got: len });
    }
    let n = len - 1;
    let mut w = vec![0.0; len];
    w[0] = initial_rate
        .unwrap_or_else(|| (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * dt));
    for k in 1..n {
        w[k] = (values[k + 1] - values[k - 1]) / (2.0 * dt);
    }
    w[n] = (3.0 * values[n] - 4.0 * values[n - 1] + values[n - 2]) / (2.0 * dt);
    Ok(w)
}

/// Caputo derivative of order in (1,2) at the final sample.
pub fn caputo2_apply(history: &TimeSeries, order: FracOrder) -> Result<f64> {
    caputo2_inner(history, order, None)
}

/// [`caputo2_apply`] with the derivative at `t = 0` supplied instead of estimated.
pub fn caputo2_apply_with_rate(
    history: &TimeSeries,
    order: FracOrder,
    initial_rate: f64,
) -> Result<f64> {
    caputo2_inner(history, order, Some(initial_rate))
}

fn caputo2_inner(history: &TimeSeries, order: FracOrder, rate0: Option<f64>) -> Result<f64> {
    let beta = order.value();
    if !(beta > 1.0 && beta < 2.0) {
        return Err(Error::Domain {
            what: "caputo2_apply needs an order in (1,2)",
            value: beta,
        });
    }
    let rates = rate_series(history.values(), history.dt(), rate0)?;
    let weights = CaputoWeights::with_exponent(beta - 1.0, history.dt(), rates.len() - 1);
    Ok(weights.apply(&rates))
}
