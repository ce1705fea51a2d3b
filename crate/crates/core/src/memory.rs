//! Viscoelastic relaxation kernel and the memory integral
//! `∫₀ᵗ m(t-s) φ_xx(·,s) ds`.
//!
//! Admissible kernels are positive, strictly decreasing, and leave a positive
//! margin `l = κ₂ - ∫₀ᵀ m`. Two analytic families are supported: the zero
//! kernel and `m₀ e^{-λt}`.

use alloc::vec::Vec;

use crate::math::exp;
use crate::{Error, Result};

/// Analytic kernel family selected by configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelSpec {
    Zero,
    Exponential { m0: f64, lambda: f64 },
}

impl KernelSpec {
    pub fn exponential(m0: f64, lambda: f64) -> Result<Self> {
        if !(m0 > 0.0) || !m0.is_finite() {
            return Err(Error::InvalidConfig {
                field: "kernel.m0",
                reason: "must be positive and finite",
            });
        }
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidConfig {
                field: "kernel.lambda",
                reason: "must be positive and finite",
            });
        }
        Ok(KernelSpec::Exponential { m0, lambda })
    }

    pub fn value(&self, t: f64) -> f64 {
        match *self {
            KernelSpec::Zero => 0.0,
            KernelSpec::Exponential { m0, lambda } => m0 * exp(-lambda * t),
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        match *self {
            KernelSpec::Zero => 0.0,
            KernelSpec::Exponential { m0, lambda } => -lambda * m0 * exp(-lambda * t),
        }
    }

    /// `∫₀ᵗ m`, exact.
    pub fn integral(&self, t: f64) -> f64 {
        match *self {
            KernelSpec::Zero => 0.0,
            KernelSpec::Exponential { m0, lambda } => m0 * (1.0 - exp(-lambda * t)) / lambda,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, KernelSpec::Zero)
    }
}

/// Tag recording where a sampled kernel came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelKind {
    Zero,
    Exponential,
    /// Raw samples; admissibility is not assumed.
    Sampled,
}

/// Kernel values and derivatives on the solver time grid `t_k = k dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct MemoryKernel {
    values: Vec<f64>,
    derivative_values: Vec<f64>,
    dt: f64,
    kind: KernelKind,
}

impl MemoryKernel {
    /// Samples `spec` at `t_0 .. t_{n_steps}`.
    pub fn sample(spec: &KernelSpec, dt: f64, n_steps: usize) -> Self {
        let values = (0..=n_steps).map(|k| spec.value(k as f64 * dt)).collect();
        let derivative_values = (0..=n_steps)
            .map(|k| spec.derivative(k as f64 * dt))
            .collect();
        let kind = match spec {
            KernelSpec::Zero => KernelKind::Zero,
            KernelSpec::Exponential { .. } => KernelKind::Exponential,
        };
        MemoryKernel {
            values,
            derivative_values,
            dt,
            kind,
        }
    }

    /// Wraps raw samples without any admissibility check.
    pub fn from_samples(values: Vec<f64>, derivative_values: Vec<f64>, dt: f64) -> Result<Self> {
        if values.len() != derivative_values.len() {
            return Err(Error::ShapeMismatch {
                expected: values.len(),
                got: derivative_values.len(),
            });
        }
        if values.is_empty() {
            return Err(Error::InsufficientHistory { needed: 1, got: 0 });
        }
        Ok(MemoryKernel {
            values,
            derivative_values,
            dt,
            kind: KernelKind::Sampled,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn derivative_values(&self) -> &[f64] {
        &self.derivative_values
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn at_zero(&self) -> f64 {
        self.values[0]
    }

    /// Trapezoidal `∫₀^{t_n} m`.
    pub fn integral_to(&self, n: usize) -> f64 {
        let v = &self.values[..=n];
        if n == 0 {
            return 0.0;
        }
        let interior: f64 = v[1..n].iter().sum();
        self.dt * (interior + 0.5 * (v[0] + v[n]))
    }
}

/// Quantities of a kernel that enter the a priori constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelReport {
    /// `κ₂ - ∫₀ᵀ m`.
    pub l_margin: f64,
    /// `min (-m')` over the samples.
    pub min_neg_derivative: f64,
    pub sup_m2: f64,
    pub sup_dm2: f64,
    pub m_at_zero: f64,
}

/// Checks positivity, strict decrease and the margin condition over `[0, horizon]`.
///
/// The zero kernel skips the sign conditions. Errors name the violated condition.
pub fn validate_kernel(kernel: &MemoryKernel, kappa2: f64, horizon: f64) -> Result<KernelReport> {
    let n = steps_covering(kernel, horizon)?;
    let values = &kernel.values[..=n];
    let derivs = &kernel.derivative_values[..=n];

    let sup_m2 = values.iter().fold(0.0_f64, |m, v| m.max(v * v));
    let sup_dm2 = derivs.iter().fold(0.0_f64, |m, v| m.max(v * v));
    let min_neg_derivative = derivs.iter().fold(f64::INFINITY, |m, v| m.min(-v));
    let l_margin = kappa2 - kernel.integral_to(n);
    let report = KernelReport {
        l_margin,
        min_neg_derivative,
        sup_m2,
        sup_dm2,
        m_at_zero: values[0],
    };

    if !values.iter().chain(derivs).all(|v| v.is_finite()) {
        return Err(Error::Admissibility {
            condition: "kernel samples must be finite",
            value: f64::NAN,
        });
    }
    if kernel.kind != KernelKind::Zero {
        let min_value = values.iter().fold(f64::INFINITY, |m, &v| m.min(v));
        if !(min_value > 0.0) {
            return Err(Error::Admissibility {
                condition: "m(t) > 0 on [0,T]",
                value: min_value,
            });
        }
        if !(min_neg_derivative > 0.0) {
            return Err(Error::Admissibility {
                condition: "m'(t) < 0 on [0,T]",
                value: -min_neg_derivative,
            });
        }
    }
    if !(l_margin > 0.0) {
        return Err(Error::Admissibility {
            condition: "kappa2 - integral of m over [0,T] > 0",
            value: l_margin,
        });
    }
    Ok(report)
}

fn steps_covering(kernel: &MemoryKernel, horizon: f64) -> Result<usize> {
    if !(horizon > 0.0) {
        return Err(Error::Domain {
            what: "horizon must be positive",
            value: horizon,
        });
    }
    let n = libm::round(horizon / kernel.dt) as usize;
    if n + 1 > kernel.len() {
        return Err(Error::InsufficientHistory {
            needed: n + 1,
            got: kernel.len(),
        });
    }
    Ok(n.max(1).min(kernel.len() - 1))
}

/// Trapezoidal `∫₀^{t_n} m(t_n - s) u(s) ds` pointwise in `x`, where
/// `history[j]` holds `u(·, t_j)`.
pub fn memory_convolution(
    history: &[Vec<f64>],
    kernel: &MemoryKernel,
    step_index: usize,
) -> Result<Vec<f64>> {
    if history.len() < step_index + 1 {
        return Err(Error::InsufficientHistory {
            needed: step_index + 1,
            got: history.len(),
        });
    }
    let mut out = memory_history_part(history, kernel, step_index)?;
    if step_index > 0 {
        let w = 0.5 * kernel.dt * kernel.values[0];
        for (o, u) in out.iter_mut().zip(&history[step_index]) {
            *o += w * u;
        }
    }
    Ok(out)
}

/// [`memory_convolution`] without the `s = t_n` node, whose weight is
/// `dt/2 · m(0)`. The solver adds that node implicitly, so only
/// `history[..step_index]` is read.
pub fn memory_history_part(
    history: &[Vec<f64>],
    kernel: &MemoryKernel,
    step_index: usize,
) -> Result<Vec<f64>> {
    let n = step_index;
    if history.len() < n.max(1) {
        return Err(Error::InsufficientHistory {
            needed: n.max(1),
            got: history.len(),
        });
    }
    if kernel.len() < n + 1 {
        return Err(Error::InsufficientHistory {
            needed: n + 1,
            got: kernel.len(),
        });
    }
    let width = history[0].len();
    let mut out = alloc::vec![0.0; width];
    if n == 0 || kernel.kind == KernelKind::Zero {
        return Ok(out);
    }
    let dt = kernel.dt;
    for (j, u) in history[..n].iter().enumerate() {
        if u.len() != width {
            return Err(Error::ShapeMismatch {
                expected: width,
                got: u.len(),
            });
        }
        let w = if j == 0 { 0.5 * dt } else { dt } * kernel.values[n - j];
        if w == 0.0 {
            continue;
        }
        for (o, ui) in out.iter_mut().zip(u) {
            *o += w * ui;
        }
    }
    Ok(out)
}
