//! Classical and fractional Gronwall bounds as sampled curves, with a
//! checker that tests a sampled function against the Gronwall hypothesis and
//! then against the bound.

use alloc::vec::Vec;

use crate::fraccalc::{
    gamma_fn, mittag_leffler, mittag_leffler2, rate_series, rl_integral_series, CaputoWeights,
    FracOrder, TimeSeries,
};
use crate::math::{exp, powf};
use crate::{Error, Result};

/// Relative roundoff allowed when a sample meets its bound with equality.
pub const BOUND_REL_SLACK: f64 = 1e-12;

/// Multiple of the truncation estimate tolerated in the hypothesis check.
pub const HYPOTHESIS_SLACK_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, PartialEq)]
pub enum GronwallCase {
    /// `dE/ds ≤ A E + B`.
    Classical {
        e: TimeSeries,
        a: TimeSeries,
        b: TimeSeries,
    },
    /// `∂^β Q ≤ b₁ Q + b₂` with constant `b₁`; `β = 1` is the classical derivative.
    Fractional {
        q: TimeSeries,
        order: FracOrder,
        b1: f64,
        b2: TimeSeries,
    },
}

impl GronwallCase {
    pub fn samples(&self) -> &TimeSeries {
        match self {
            GronwallCase::Classical { e, .. } => e,
            GronwallCase::Fractional { q, .. } => q,
        }
    }

    fn check(&self) -> Result<()> {
        let (main, coeffs): (&TimeSeries, Vec<&TimeSeries>) = match self {
            GronwallCase::Classical { e, a, b } => (e, alloc::vec![a, b]),
            GronwallCase::Fractional { q, b1, b2, order } => {
                FracOrder::integral(order.value())?;
                if !(*b1 >= 0.0) {
                    return Err(Error::Domain {
                        what: "b1 must be nonnegative",
                        value: *b1,
                    });
                }
                (q, alloc::vec![b2])
            }
        };
        for c in coeffs {
            if c.len() != main.len() {
                return Err(Error::ShapeMismatch {
                    expected: main.len(),
                    got: c.len(),
                });
            }
            if let Some(&v) = c.values().iter().find(|v| !(**v >= 0.0)) {
                return Err(Error::Domain {
                    what: "Gronwall coefficients must be nonnegative",
                    value: v,
                });
            }
        }
        Ok(())
    }
}

fn cumulative_trapezoid(v: &[f64], dt: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(v.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in v.windows(2) {
        acc += 0.5 * dt * (w[0] + w[1]);
        out.push(acc);
    }
    out
}

/// `s ↦ exp(∫₀ˢ A)(E(0) + ∫₀ˢ B)` at the sample times.
pub fn gronwall_bound(case: &GronwallCase) -> Result<TimeSeries> {
    case.check()?;
    match case {
        GronwallCase::Classical { e, a, b } => {
            let dt = e.dt();
            let ia = cumulative_trapezoid(a.values(), dt);
            let ib = cumulative_trapezoid(b.values(), dt);
            let e0 = e.values()[0];
            let curve = ia.iter().zip(&ib).map(|(x, y)| exp(*x) * (e0 + y)).collect();
            TimeSeries::new(curve, dt)
        }
        GronwallCase::Fractional { .. } => Err(Error::Domain {
            what: "gronwall_bound needs a classical case",
            value: f64::NAN,
        }),
    }
}

/// `t ↦ Q(0) E_β(b₁t^β) + Γ(β) E_{β,β}(b₁t^β) D^{-β}b₂(t)` at the sample times.
pub fn frac_gronwall_bound(case: &GronwallCase) -> Result<TimeSeries> {
    case.check()?;
    match case {
        GronwallCase::Fractional { q, order, b1, b2 } => {
            let beta = order.value();
            let dt = q.dt();
            let q0 = q.values()[0];
            let rl = rl_integral_series(b2, *order)?;
            let gb = gamma_fn(beta)?;
            let mut curve = Vec::with_capacity(q.len());
            for (k, integral) in rl.iter().enumerate() {
                let z = b1 * powf(k as f64 * dt, beta);
                let v = q0 * mittag_leffler(beta, z)? + gb * mittag_leffler2(beta, beta, z)? * integral;
                curve.push(v);
            }
            TimeSeries::new(curve, dt)
        }
        GronwallCase::Classical { .. } => Err(Error::Domain {
            what: "frac_gronwall_bound needs a fractional case",
            value: f64::NAN,
        }),
    }
}

/// Outcome of [`verify_hypothesis_and_bound`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GronwallReport {
    /// `min_k (rhs_k + tol − derivative_k)`; nonnegative when the hypothesis holds.
    pub hypothesis_margin: f64,
    pub hypothesis_tolerance: f64,
    pub hypothesis_pass: bool,
    /// `min_k (bound_k − sample_k)`; `None` when the hypothesis failed.
    pub bound_margin: Option<f64>,
    pub bound_pass: Option<bool>,
}

impl GronwallReport {
    /// The hypothesis holds and the bound dominates.
    pub fn pass(&self) -> bool {
        self.hypothesis_pass && self.bound_pass == Some(true)
    }
}

/// Checks the hypothesis pointwise, then the bound.
///
/// `derivative` holds `dE/ds` (classical) or `∂^β Q` (fractional) at every
/// sample. When absent it is computed: second-order differences for the
/// classical case, the L1 scheme for the fractional one. The hypothesis may
/// be exceeded by ten times a truncation estimate
/// `max|Δ²E|/dt² · dt^p`, with `p = 2−β` (L1) or `p = 1`.
pub fn verify_hypothesis_and_bound(
    case: &GronwallCase,
    derivative: Option<&[f64]>,
) -> Result<GronwallReport> {
    case.check()?;
    let series = case.samples();
    let v = series.values();
    let dt = series.dt();
    if v.len() < 3 {
        return Err(Error::InsufficientHistory {
            needed: 3,
            got: v.len(),
        });
    }
    let curv = v
        .windows(3)
        .map(|w| (w[0] - 2.0 * w[1] + w[2]).abs())
        .fold(0.0_f64, f64::max)
        / (dt * dt);

    let (deriv, rhs, p, first, bound): (Vec<f64>, Vec<f64>, f64, usize, TimeSeries) = match case {
        GronwallCase::Classical { e, a, b } => {
            let d = match derivative {
                Some(d) => d.to_vec(),
                None => rate_series(e.values(), dt, None)?,
            };
            let rhs = (0..v.len())
                .map(|k| a.values()[k] * v[k] + b.values()[k])
                .collect();
            (d, rhs, 1.0, 0, gronwall_bound(case)?)
        }
        GronwallCase::Fractional { q, order, b1, b2 } => {
            let beta = order.value();
            let d = match derivative {
                Some(d) => d.to_vec(),
                None => {
                    let w = CaputoWeights::with_exponent(beta, dt, v.len() - 1);
                    let mut out = alloc::vec![0.0; v.len()];
                    for (n, o) in out.iter_mut().enumerate().skip(1) {
                        *o = w.apply(&q.values()[..=n]);
                    }
                    out
                }
            };
            let rhs = (0..v.len()).map(|k| b1 * v[k] + b2.values()[k]).collect();
            // the discrete derivative at t = 0 is undefined
            (d, rhs, 2.0 - beta, 1, frac_gronwall_bound(case)?)
        }
    };
    if deriv.len() != v.len() {
        return Err(Error::ShapeMismatch {
            expected: v.len(),
            got: deriv.len(),
        });
    }
    let tol = HYPOTHESIS_SLACK_FACTOR * curv * powf(dt, p);
    let hypothesis_margin = (first..v.len())
        .map(|k| rhs[k] + tol - deriv[k])
        .fold(f64::INFINITY, f64::min);
    let hypothesis_pass = hypothesis_margin >= 0.0;
    if !hypothesis_pass {
        return Ok(GronwallReport {
            hypothesis_margin,
            hypothesis_tolerance: tol,
            hypothesis_pass,
            bound_margin: None,
            bound_pass: None,
        });
    }
    let mut bound_margin = f64::INFINITY;
    let mut bound_pass = true;
    for (s, b) in v.iter().zip(bound.values()) {
        bound_margin = bound_margin.min(b - s);
        if *s > b + BOUND_REL_SLACK * b.abs() {
            bound_pass = false;
        }
    }
    Ok(GronwallReport {
        hypothesis_margin,
        hypothesis_tolerance: tol,
        hypothesis_pass,
        bound_margin: Some(bound_margin),
        bound_pass: Some(bound_pass),
    })
}
