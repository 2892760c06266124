use std::f64::consts::PI;

use crate::error::{LevyError, Result};

pub fn gamma(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}

pub fn ln_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}

pub fn beta(a: f64, b: f64) -> f64 {
    (ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)).exp()
}

pub fn erf(x: f64) -> f64 {
    statrs::function::erf::erf(x)
}

pub fn erfc(x: f64) -> f64 {
    statrs::function::erf::erfc(x)
}

/// `∫_0^∞ (1 − cos s) s^{−α} ds` for `1 < α < 2`.
pub fn one_minus_cos_moment(alpha: f64) -> Result<f64> {
    if !(alpha > 1.0 && alpha < 2.0) {
        return Err(LevyError::Domain(format!(
            "one_minus_cos_moment needs 1 < alpha < 2, got {alpha}"
        )));
    }
    Ok(PI / (2.0 * gamma(alpha) * (PI * (alpha - 1.0) / 2.0).sin()))
}

/// `∫_0^∞ (1 − cos u) u^{−1−α} du` for `0 < α < 2`; the Lévy-measure
/// normalization of an α-stable law with unit `Re ψ(1)` per unit density.
pub fn stable_cos_integral(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(LevyError::Domain(format!("need 0 < alpha < 2, got {alpha}")));
    }
    if (alpha - 1.0).abs() < 1e-12 {
        return Ok(PI / 2.0);
    }
    // −Γ(−α) cos(πα/2), written through Γ(2−α) to stay off the poles.
    Ok(-gamma(2.0 - alpha) * (PI * alpha / 2.0).cos() / (alpha * (alpha - 1.0)))
}
