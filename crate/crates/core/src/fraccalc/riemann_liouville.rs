//! Riemann-Liouville integral by product trapezoidal quadrature.

use alloc::vec;
use alloc::vec::Vec;

use super::{FracOrder, TimeSeries};
use crate::math::powf;
use crate::Result;

// dt^β / Γ(β+2) Σ a_j υ_j with the classic product-trapezoid weights:
// a_0 = (n-1)^{β+1} - (n-1-β) n^β, a_j = (k+1)^{β+1} - 2k^{β+1} + (k-1)^{β+1} (k = n-j), a_n = 1.
fn integral_at(values: &[f64], n: usize, beta: f64, inner: &[f64], scale: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let nf = n as f64;
    let a0 = powf(nf - 1.0, beta + 1.0) - (nf - 1.0 - beta) * powf(nf, beta);
    let mut acc = a0 * values[0] + values[n];
    for j in 1..n {
        acc += inner[n - j] * values[j];
    }
    scale * acc
}

fn inner_weights(beta: f64, n: usize) -> Vec<f64> {
    let p = beta + 1.0;
    let mut w = vec![0.0; n.max(1)];
    for (k, slot) in w.iter_mut().enumerate().skip(1) {
        let k = k as f64;
        *slot = powf(k + 1.0, p) - 2.0 * powf(k, p) + powf(k - 1.0, p);
    }
    w
}

/// `D^{-β} υ` at the final sample, `β ∈ (0,1]`.
pub fn rl_integral(history: &TimeSeries, order: FracOrder) -> Result<f64> {
    let beta = FracOrder::integral(order.value())?.value();
    let v = history.values();
    let n = v.len() - 1;
    let scale = powf(history.dt(), beta) / libm::tgamma(beta + 2.0);
    Ok(integral_at(v, n, beta, &inner_weights(beta, n), scale))
}

/// `D^{-β} υ` at every sample time.
pub fn rl_integral_series(history: &TimeSeries, order: FracOrder) -> Result<Vec<f64>> {
    let beta = FracOrder::integral(order.value())?.value();
    let v = history.values();
    let n = v.len() - 1;
    let scale = powf(history.dt(), beta) / libm::tgamma(beta + 2.0);
    let inner = inner_weights(beta, n);
    Ok((0..=n)
        .map(|m| integral_at(v, m, beta, &inner, scale))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_input() {
        let h = TimeSeries::from_fn(10, 0.1, |_| 0.0).unwrap();
        assert_eq!(rl_integral(&h, FracOrder::integral(0.5).unwrap()).unwrap(), 0.0);
    }

    #[test]
    fn constant_is_exact() {
        // D^{-1/2} 1 = t^{1/2}/Γ(3/2) = 2/√π at t = 1
        let h = TimeSeries::from_fn(100, 0.01, |_| 1.0).unwrap();
        let v = rl_integral(&h, FracOrder::integral(0.5).unwrap()).unwrap();
        assert!((v - core::f64::consts::FRAC_2_SQRT_PI).abs() < 1e-12);
    }

    #[test]
    fn order_one_is_trapezoid() {
        let h = TimeSeries::from_fn(8, 0.25, |t| t).unwrap();
        let v = rl_integral(&h, FracOrder::integral(1.0).unwrap()).unwrap();
        assert!((v - 2.0).abs() < 1e-13);
    }

    #[test]
    fn single_sample_gives_zero() {
        let h = TimeSeries::new(alloc::vec![5.0], 0.1).unwrap();
        assert_eq!(rl_integral(&h, FracOrder::integral(0.3).unwrap()).unwrap(), 0.0);
    }

    #[test]
    fn series_agrees_with_pointwise() {
        let h = TimeSeries::from_fn(30, 0.05, libm::sin).unwrap();
        let ord = FracOrder::integral(0.4).unwrap();
        let s = rl_integral_series(&h, ord).unwrap();
        for m in [0, 1, 13, 30] {
            assert!((s[m] - rl_integral(&h.prefix(m + 1), ord).unwrap()).abs() < 1e-15);
        }
    }
}
