//! Fourier-type integrals `∫_0^∞ w(xs) g(s) ds` with `w ∈ {1−cos, sin, cos}`.
//!
//! After the substitution `u = xs` the integral is split into
//! - a head `[0, u_0]` summed over dyadic panels toward the origin, which
//!   resolves singular or sharply varying `g` and uses `1−cos u = 2sin²(u/2)`;
//! - a few explicit half-periods between zeros of the weight;
//! - a tail over half-periods whose alternating contributions are
//!   accelerated with Wynn's epsilon algorithm. For `1−cos` the tail is split
//!   as `∫G − ∫cos·G`, the first part being non-oscillatory.

use std::f64::consts::PI;

use super::quadrature::{
    integrate_finite, integrate_from_zero_with_floor, integrate_to_infinity, QuadratureResult,
    ToleranceProfile,
};
use crate::error::{LevyError, Result};

/// Oscillating weight applied to `g`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FourierWeight {
    OneMinusCos,
    Sin,
    Cos,
}

impl FourierWeight {
    fn eval(self, u: f64) -> f64 {
        match self {
            FourierWeight::OneMinusCos => {
                let s = (0.5 * u).sin();
                2.0 * s * s
            }
            FourierWeight::Sin => u.sin(),
            FourierWeight::Cos => u.cos(),
        }
    }

    // Offset of the zeros of the oscillating part: cos vanishes at (k+½)π,
    // sin at kπ.
    fn zero_offset(self) -> f64 {
        match self {
            FourierWeight::OneMinusCos | FourierWeight::Cos => 0.5 * PI,
            FourierWeight::Sin => 0.0,
        }
    }
}

const HEAD_HALF_PERIODS: usize = 6;
const MAX_TAIL_TERMS: usize = 600;

/// `∫_0^∞ (1 − cos xs) g(s) ds`.
pub fn integrate_oscillatory<G: Fn(f64) -> f64>(
    g: G,
    x: f64,
    tol: &ToleranceProfile,
) -> Result<QuadratureResult> {
    integrate_fourier(g, x, FourierWeight::OneMinusCos, 1.0, tol)
}

/// `∫_0^∞ w(xs) g(s) ds`; `scale` is the `s`-scale on which `g` changes
/// shape (any positive value is valid, it only steers panel placement).
pub fn integrate_fourier<G: Fn(f64) -> f64>(
    g: G,
    x: f64,
    weight: FourierWeight,
    scale: f64,
    tol: &ToleranceProfile,
) -> Result<QuadratureResult> {
    if !x.is_finite() {
        return Err(LevyError::Domain(format!("frequency must be finite, got {x}")));
    }
    let sign = match weight {
        FourierWeight::Sin if x < 0.0 => -1.0,
        _ => 1.0,
    };
    let x = x.abs();
    if x == 0.0 {
        return match weight {
            FourierWeight::Cos => super::quadrature::integrate_half_line(&g, scale, tol),
            _ => Ok(QuadratureResult::zero()),
        };
    }
    let scale = if scale.is_finite() && scale > 0.0 { scale } else { 1.0 };
    let inv_x = 1.0 / x;
    let big_g = |u: f64| g(u * inv_x) * inv_x;
    let part_tol = tol.tightened(0.25);

    let offset = weight.zero_offset();
    let first_zero = if offset > 0.0 { offset } else { PI };
    // Make sure the dyadic head resolves the feature scale of g in u-units.
    let floor = (1e-3 * x * scale).min(1e-3 * first_zero);
    let head_fn = |u: f64| weight.eval(u) * big_g(u);
    let mut total = integrate_from_zero_with_floor(head_fn, first_zero, floor, &part_tol)?;

    let mut lo = first_zero;
    for _ in 0..HEAD_HALF_PERIODS {
        let hi = lo + PI;
        total.add(integrate_finite(head_fn, lo, hi, &part_tol)?);
        lo = hi;
    }

    match weight {
        FourierWeight::OneMinusCos => {
            let plain = integrate_to_infinity(big_g, lo, lo.max(x * scale).max(PI), &part_tol)?;
            let cos_tail = alternating_tail(|u: f64| u.cos() * big_g(u), lo, &part_tol)?;
            total.add(plain);
            total.add(cos_tail.scaled(-1.0));
        }
        FourierWeight::Sin | FourierWeight::Cos => {
            total.add(alternating_tail(head_fn, lo, &part_tol)?);
        }
    }
    if !total.value.is_finite() {
        return Err(LevyError::NonIntegrable("non-finite oscillatory sum".into()));
    }
    Ok(total.scaled(sign))
}

/// Sum of `∫_{start + kπ}^{start + (k+1)π} f` over k ≥ 0, accelerated with
/// Wynn's epsilon algorithm. `start` must be a zero of the oscillation.
fn alternating_tail<F: Fn(f64) -> f64>(
    f: F,
    start: f64,
    tol: &ToleranceProfile,
) -> Result<QuadratureResult> {
    let term_tol = tol.tightened(0.01);
    let mut wynn = Wynn::new();
    let mut partial = 0.0;
    let mut err = 0.0;
    let mut evaluations = 0;
    let mut last_estimate: Option<f64> = None;
    let mut agree = 0;
    let mut first_term_abs = 0.0;
    let mut lo = start;
    for k in 0..MAX_TAIL_TERMS {
        let hi = lo + PI;
        let term = integrate_finite(&f, lo, hi, &term_tol).or_else(|e| match e {
            LevyError::QuadratureFailure { partial, error } if partial.is_finite() => Ok(QuadratureResult {
                value: partial,
                abs_error_estimate: error,
                evaluations: 0,
            }),
            other => Err(other),
        })?;
        lo = hi;
        partial += term.value;
        err += term.abs_error_estimate;
        evaluations += term.evaluations;
        if k == 0 {
            first_term_abs = term.value.abs();
        }
        if k > 200 && term.value.abs() > 0.5 * first_term_abs && first_term_abs > 0.0 {
            return Err(LevyError::NonIntegrable(
                "oscillatory terms do not decay".into(),
            ));
        }
        let estimate = wynn.push(partial);
        let target = tol.target(estimate);
        if term.value.abs() <= 1e-3 * target {
            return Ok(QuadratureResult {
                value: partial,
                abs_error_estimate: err + term.value.abs(),
                evaluations,
            });
        }
        if let Some(prev) = last_estimate {
            let diff = (estimate - prev).abs();
            if k >= 6 && diff <= 0.1 * target {
                agree += 1;
                if agree >= 2 {
                    return Ok(QuadratureResult {
                        value: estimate,
                        abs_error_estimate: err + diff,
                        evaluations,
                    });
                }
            } else {
                agree = 0;
            }
        }
        last_estimate = Some(estimate);
    }
    let estimate = last_estimate.unwrap_or(partial);
    Err(LevyError::QuadratureFailure {
        partial: estimate,
        error: err + (estimate - partial).abs(),
    })
}

/// Wynn's epsilon table kept as a single anti-diagonal.
struct Wynn {
    diag: Vec<f64>,
}

impl Wynn {
    fn new() -> Self {
        Wynn { diag: Vec::new() }
    }

    /// Feed the next partial sum and return the current best estimate.
    fn push(&mut self, s: f64) -> f64 {
        let mut next = Vec::with_capacity(self.diag.len() + 1);
        next.push(s);
        let mut prev_lower = 0.0; // ε_{-1} column is zero
        for (j, &old) in self.diag.iter().enumerate() {
            let delta = next[j] - old;
            let val = if delta.abs() < 1e-300 {
                // Converged column: propagate the even entry.
                f64::INFINITY
            } else {
                prev_lower + 1.0 / delta
            };
            prev_lower = old;
            next.push(val);
        }
        // Deep columns lose precision; cap the table depth.
        next.truncate(41);
        self.diag = next;
        // Even columns approximate the limit; choose the deepest finite one.
        let mut best = s;
        for (j, &v) in self.diag.iter().enumerate() {
            if j % 2 == 0 && v.is_finite() {
                best = v;
            } else if !v.is_finite() {
                break;
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::special::one_minus_cos_moment;

    fn tol() -> ToleranceProfile {
        ToleranceProfile::default()
    }

    #[test]
    fn inverse_square_gives_half_pi() {
        // Over the half line; the symmetric integral over ℝ is π.
        let r = integrate_oscillatory(|s: f64| s.powi(-2), 1.0, &tol()).unwrap();
        assert!((r.value - PI / 2.0).abs() < 1e-7, "{}", r.value);
        let x = 3.0;
        let r = integrate_oscillatory(|s: f64| s.powi(-2), x, &tol()).unwrap();
        assert!((r.value - PI * x / 2.0).abs() < 1e-7, "{}", r.value);
    }

    #[test]
    fn power_matches_closed_form() {
        for &a in &[1.2, 1.5, 1.8] {
            let r = integrate_oscillatory(|s: f64| s.powf(-a), 1.0, &tol()).unwrap();
            let exact = one_minus_cos_moment(a).unwrap();
            assert!((r.value / exact - 1.0).abs() < 1e-7, "alpha {a}: {} vs {exact}", r.value);
        }
    }

    #[test]
    fn vanishes_at_zero_frequency() {
        let r = integrate_oscillatory(|s: f64| s.powi(-2), 0.0, &tol()).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn sine_and_cosine_weights() {
        // ∫_0^∞ sin(s)/s ds = π/2, ∫_0^∞ cos(xs)/(1+s²) ds = π e^{-x}/2
        let r = integrate_fourier(|s: f64| 1.0 / s, 1.0, FourierWeight::Sin, 1.0, &tol()).unwrap();
        assert!((r.value - PI / 2.0).abs() < 1e-7, "{}", r.value);
        let r = integrate_fourier(|s: f64| 1.0 / (1.0 + s * s), 2.0, FourierWeight::Cos, 1.0, &tol()).unwrap();
        assert!((r.value - PI * (-2.0f64).exp() / 2.0).abs() < 1e-8, "{}", r.value);
        let r = integrate_fourier(|s: f64| 1.0 / s, -1.0, FourierWeight::Sin, 1.0, &tol()).unwrap();
        assert!((r.value + PI / 2.0).abs() < 1e-7);
    }

    #[test]
    fn sharp_feature_far_from_unit_scale() {
        // ∫_0^∞ (1−cos xs) ε/(ε²+s²)/s² ... checked against the Lorentzian identity
        // ∫_0^∞ (1 − cos xs)/(a² + s²) ds = π(1 − e^{−ax})/(2a).
        for &(a, x) in &[(1e-3, 5.0), (50.0, 0.3), (1.0, 200.0)] {
            let r = integrate_fourier(|s: f64| 1.0 / (a * a + s * s), x, FourierWeight::OneMinusCos, a, &tol()).unwrap();
            let exact = PI * (1.0 - (-a * x).exp()) / (2.0 * a);
            assert!((r.value / exact - 1.0).abs() < 1e-7, "a={a} x={x}: {} vs {exact}", r.value);
        }
    }

    #[test]
    fn divergent_input_is_reported() {
        let r = integrate_oscillatory(|s: f64| 1.0 / s, 1.0, &tol());
        assert!(r.is_err());
    }
}
