//! Mittag-Leffler functions by direct series summation.
//!
//! `E_{β,μ}(x) = Σ xⁿ / Γ(βn + μ)`. There is no asymptotic branch: when the
//! series cannot deliver an accurate value (term budget exhausted, or the
//! alternating terms cancel away most significant digits) an error is
//! returned instead of a silently degraded number.

use super::gamma::ln_gamma;
use crate::math::{exp, ln, ln1p, sqrt};
use crate::{Error, Result};

/// Maximum number of series terms for [`mittag_leffler2`].
pub const DEFAULT_TERM_BUDGET: usize = 10_000;

/// Maximum number of summed terms for [`ln_mittag_leffler2`].
pub const LOG_TERM_BUDGET: usize = 1_000_000;

/// Arguments with larger magnitude are rejected outright.
pub const MAX_ABS_ARGUMENT: f64 = 1.0e6;

const REL_STOP: f64 = 1e-16;
const ABS_FLOOR: f64 = 1e-300;
// Largest peak-term / |sum| ratio tolerated before declaring the value unusable
// (leaves about eight significant digits).
const MAX_CANCELLATION: f64 = 1e8;
// Terms this far below the peak (in natural log) cannot change a double.
const LOG_DROP: f64 = 41.5;

fn check_params(beta: f64, mu: f64, x: f64) -> Result<()> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::Domain {
            what: "Mittag-Leffler beta must be positive",
            value: beta,
        });
    }
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(Error::Domain {
            what: "Mittag-Leffler mu must be positive",
            value: mu,
        });
    }
    if !(x.abs() <= MAX_ABS_ARGUMENT) {
        return Err(Error::Domain {
            what: "Mittag-Leffler argument exceeds the series safeguard bound",
            value: x,
        });
    }
    Ok(())
}

/// One-parameter Mittag-Leffler function `E_β(x)`.
pub fn mittag_leffler(beta: f64, x: f64) -> Result<f64> {
    mittag_leffler2(beta, 1.0, x)
}

/// Two-parameter Mittag-Leffler function `E_{β,μ}(x)`.
pub fn mittag_leffler2(beta: f64, mu: f64, x: f64) -> Result<f64> {
    mittag_leffler2_with_budget(beta, mu, x, DEFAULT_TERM_BUDGET)
}

/// [`mittag_leffler2`] with an explicit term budget.
pub fn mittag_leffler2_with_budget(beta: f64, mu: f64, x: f64, budget: usize) -> Result<f64> {
    check_params(beta, mu, x)?;
    if x == 0.0 {
        return Ok(1.0 / libm::tgamma(mu));
    }
    let ln_abs_x = ln(x.abs());
    let negative = x < 0.0;

    // Neumaier-compensated running sum.
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    let mut peak = 0.0_f64;
    let mut prev_mag = f64::INFINITY;

    for n in 0..budget {
        let mag = term_magnitude(n, beta, mu, x.abs(), ln_abs_x)?;
        let term = if negative && n % 2 == 1 { -mag } else { mag };
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
        peak = peak.max(mag);

        let total = (sum + comp).abs();
        let decreasing = mag <= prev_mag;
        prev_mag = mag;
        if n > 0 && decreasing && (mag < REL_STOP * total || mag < ABS_FLOOR) {
            let value = sum + comp;
            if peak > MAX_CANCELLATION * value.abs() {
                return Err(Error::Cancellation {
                    peak_term: peak,
                    partial_sum: value,
                });
            }
            return Ok(value);
        }
    }
    Err(Error::Convergence {
        terms: budget,
        partial_sum: sum + comp,
    })
}

// |x|ⁿ / Γ(βn + μ), directly while that is safe, otherwise through logs.
fn term_magnitude(n: usize, beta: f64, mu: f64, abs_x: f64, ln_abs_x: f64) -> Result<f64> {
    let arg = beta * n as f64 + mu;
    let log_pow = n as f64 * ln_abs_x;
    if arg < 170.0 && log_pow < 700.0 {
        Ok(libm::pow(abs_x, n as f64) / libm::tgamma(arg))
    } else {
        Ok(exp(log_pow - ln_gamma(arg)?))
    }
}

// lnΓ(a + h) − lnΓ(a) for a > 0, h ≥ 0, accurate even when both logs are huge.
fn ln_gamma_ratio(a: f64, h: f64) -> Result<f64> {
    if a < 1.0e6 {
        return Ok(ln_gamma(a + h)? - ln_gamma(a)?);
    }
    // Stirling difference; the next correction is O(h/a⁴).
    Ok((a - 0.5) * ln1p(h / a) + h * ln(a + h) - h + (1.0 / (a + h) - 1.0 / a) / 12.0)
}

// ln(term(n + j) / term(n)) with term(n) = xⁿ/Γ(βn + μ); j may be negative.
fn ln_term_shift(n: f64, j: f64, beta: f64, mu: f64, ln_x: f64) -> Result<f64> {
    let a = beta * n + mu;
    if j >= 0.0 {
        Ok(j * ln_x - ln_gamma_ratio(a, beta * j)?)
    } else {
        Ok(j * ln_x + ln_gamma_ratio(a + beta * j, -beta * j)?)
    }
}

/// `ln E_{β,μ}(x)` for `x ≥ 0`.
///
/// All terms are positive, so the sum is formed in log space relative to
/// its largest term. This reaches arguments whose function value overflows
/// a double. Terms more than `e^{-41.5}` below the peak are dropped, and a
/// peak wider than 64 terms is sampled with a stride of a quarter width; the
/// trapezoid rule on such a smooth log-concave profile is exponentially
/// accurate.
pub fn ln_mittag_leffler2(beta: f64, mu: f64, x: f64) -> Result<f64> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::Domain {
            what: "Mittag-Leffler beta must be positive",
            value: beta,
        });
    }
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(Error::Domain {
            what: "Mittag-Leffler mu must be positive",
            value: mu,
        });
    }
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain {
            what: "log-domain Mittag-Leffler needs a nonnegative argument",
            value: x,
        });
    }
    if x == 0.0 {
        return Ok(-ln_gamma(mu)?);
    }
    let ln_x = ln(x);

    // The log of the term is concave in n, so its increments change sign once.
    let increment = |n: f64| ln_term_shift(n, 1.0, beta, mu, ln_x);
    let peak_n = if increment(0.0)? <= 0.0 {
        0.0
    } else {
        let mut hi = 1.0_f64;
        while increment(hi)? > 0.0 {
            hi *= 2.0;
            if hi > 1.0e15 {
                return Err(Error::Convergence {
                    terms: LOG_TERM_BUDGET,
                    partial_sum: f64::INFINITY,
                });
            }
        }
        let mut lo = 0.0_f64;
        while hi - lo > 1.0 {
            let mid = libm::floor(0.5 * (lo + hi));
            if increment(mid)? > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    };
    let ln_peak = peak_n * ln_x - ln_gamma(beta * peak_n + mu)?;

    // width from the trigamma asymptotics: σ² ≈ a/β² at a = βn + μ
    let a = beta * peak_n + mu;
    let sigma = sqrt(a) / beta;
    let stride = if a > 10.0 && sigma > 64.0 {
        libm::floor(sigma / 4.0)
    } else {
        1.0
    };
    let mut acc = stride; // Σ stride · term/peak
    let mut used = 1usize;
    for dir in [1.0, -1.0] {
        let mut j = dir * stride;
        while peak_n + j >= 0.0 {
            let rel = ln_term_shift(peak_n, j, beta, mu, ln_x)?;
            if rel < -LOG_DROP {
                break;
            }
            acc += stride * exp(rel);
            used += 1;
            if used > LOG_TERM_BUDGET {
                return Err(Error::Convergence {
                    terms: LOG_TERM_BUDGET,
                    partial_sum: ln_peak + ln(acc),
                });
            }
            j += dir * stride;
        }
    }
    Ok(ln_peak + ln(acc))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_to_exponential() {
        for &x in &[-5.0, -1.0, 0.0, 1.0, 5.0] {
            let e = mittag_leffler(1.0, x).unwrap();
            assert!(((e - libm::exp(x)) / libm::exp(x)).abs() <= 1e-10, "x={x}");
        }
    }

    #[test]
    fn zero_argument() {
        assert_eq!(mittag_leffler(0.5, 0.0).unwrap(), 1.0);
        let v = mittag_leffler2(1.0, 2.0, 0.0).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn e12_closed_form() {
        let e = core::f64::consts::E;
        assert!((mittag_leffler2(1.0, 1.0, 1.0).unwrap() - e).abs() < 1e-14);
        assert!((mittag_leffler2(1.0, 2.0, 1.0).unwrap() - (e - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn cosine_case() {
        // E_2(-x²) = cos x
        let v = mittag_leffler(2.0, -4.0).unwrap();
        assert!((v - libm::cos(2.0)).abs() < 1e-13);
    }

    #[test]
    fn tiny_budget_fails() {
        match mittag_leffler2_with_budget(0.5, 1.0, 1.0, 3) {
            Err(Error::Convergence { terms: 3, partial_sum }) => assert!(partial_sum > 1.0),
            other => panic!("expected convergence error, got {other:?}"),
        }
    }

    #[test]
    fn severe_cancellation_is_reported() {
        // peak term ~6e9 against a value ~0.11
        assert!(matches!(
            mittag_leffler(0.5, -5.0),
            Err(Error::Cancellation { .. })
        ));
    }

    #[test]
    fn bad_parameters() {
        assert!(mittag_leffler(0.0, 1.0).is_err());
        assert!(mittag_leffler2(0.5, -1.0, 1.0).is_err());
        assert!(mittag_leffler(0.5, 2.0e6).is_err());
        assert!(ln_mittag_leffler2(0.5, 0.5, -1.0).is_err());
    }

    #[test]
    fn strided_log_sum() {
        // E_{1,1}(x) = eˣ
        for x in [1.0e4, 1.0e5, 1.0e7] {
            let v = ln_mittag_leffler2(1.0, 1.0, x).unwrap();
            assert!((v - x).abs() < 1e-9 * x, "x={x}: {v}");
        }
        // E_{1/2,1/2}(z) = 1/√π + z e^{z²} erfc(-z)
        let z = 60.0_f64;
        let v = ln_mittag_leffler2(0.5, 0.5, z).unwrap();
        let expected = z * z + libm::log(z * libm::erfc(-z));
        assert!((v - expected).abs() < 1e-9 * expected);
    }

    #[test]
    fn log_domain_matches_direct_series() {
        for &(b, m, x) in &[(0.5, 0.5, 5.0), (0.8, 1.0, 3.0), (1.0, 1.0, 20.0), (0.3, 0.7, 2.0)] {
            let direct = mittag_leffler2(b, m, x).unwrap();
            let logd = ln_mittag_leffler2(b, m, x).unwrap();
            assert!((logd - direct.ln()).abs() < 1e-12 * direct.ln().abs().max(1.0), "{b} {m} {x}");
        }
        assert!((ln_mittag_leffler2(1.0, 1.0, 800.0).unwrap() - 800.0).abs() < 1e-9);
        assert!((ln_mittag_leffler2(0.7, 1.3, 0.0).unwrap() + libm::lgamma(1.3)).abs() < 1e-15);
    }
}
