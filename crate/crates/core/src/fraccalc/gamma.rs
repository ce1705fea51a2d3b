use crate::{Error, Result};

/// Gamma function for positive arguments.
pub fn gamma_fn(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain {
            what: "gamma requires a positive finite argument",
            value: x,
        });
    }
    Ok(libm::tgamma(x))
}

/// `ln Γ(x)` for positive arguments; stays finite far beyond the overflow of Γ.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain {
            what: "ln_gamma requires a positive finite argument",
            value: x,
        });
    }
    Ok(libm::lgamma_r(x).0)
}
