//! Asymptotic constants of regularly varying exponents: tail of ν against
//! `Re ψ`, the limit of `Im ψ / Re ψ`, the resolvent constant `C(α, C_I)` and
//! the resulting large-time constants for hitting a point or an interval.

use std::f64::consts::PI;

use crate::error::{LevyError, Result};
use crate::kernels::k_compensated;
use crate::levy_model::{LevyModel, MeasureSpec};
use crate::mc_engine::{sample_entrances, MCConfig, Target};
use crate::numerics::{beta, gamma, integrate_half_line, ToleranceProfile};

/// Empirical ratios against a predicted limit.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticReport {
    pub predicted_constant: f64,
    /// `(argument, empirical ratio)`, ordered towards the limit.
    pub curve: Vec<(f64, f64)>,
    pub converged: bool,
    pub band: f64,
}

impl AsymptoticReport {
    fn new(predicted: f64, curve: Vec<(f64, f64)>, band: f64) -> Self {
        let close = |r: f64| {
            if predicted == 0.0 {
                r.abs() <= 1e-12
            } else {
                ((r - predicted) / predicted).abs() <= band
            }
        };
        let n = curve.len();
        let converged = n >= 2 && curve[n - 2..].iter().all(|p| close(p.1));
        AsymptoticReport {
            predicted_constant: predicted,
            curve,
            converged,
            band,
        }
    }

    pub fn last_ratio(&self) -> f64 {
        self.curve.last().map_or(f64::NAN, |p| p.1)
    }

    /// CSV rows `argument,empirical_ratio,predicted_constant`.
    pub fn to_csv_rows(&self) -> Vec<[f64; 3]> {
        self.curve.iter().map(|&(a, r)| [a, r, self.predicted_constant]).collect()
    }
}

/// `Γ(1+α)/B(1−α/2, 1+α/2)`, the limit of `ν(|s| ≥ t)/Re ψ(1/t)`.
pub fn tail_constant(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(LevyError::Domain(format!("tail constant needs α ∈ (0, 2), got {alpha}")));
    }
    Ok(gamma(1.0 + alpha) / beta(1.0 - alpha / 2.0, 1.0 + alpha / 2.0))
}

/// The same constant as `2Γ(α) sin(πα/2)/π`.
pub fn tail_constant_reduced(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(LevyError::Domain(format!("tail constant needs α ∈ (0, 2), got {alpha}")));
    }
    Ok(2.0 * gamma(alpha) * (PI * alpha / 2.0).sin() / PI)
}

/// Ratio `ν(|s| ≥ t)/Re ψ(1/t)` along `t_grid` (large t), against the tail
/// constant at the index of `Re ψ` at the origin. `None` without jumps.
pub fn nu_tail_asymptotic_check(model: &LevyModel, t_grid: &[f64], band: f64) -> Result<Option<AsymptoticReport>> {
    let alpha = match model.measure() {
        MeasureSpec::None => return Ok(None),
        MeasureSpec::Stable { .. } | MeasureSpec::Factorized { .. } => model.alpha_at_zero().expect("power-law index"),
        MeasureSpec::Tabulated(_) => {
            return Err(LevyError::AssumptionViolated(
                "a tabulated measure has bounded support; its exponent is not regularly varying at 0".into(),
            ))
        }
    };
    let predicted = tail_constant(alpha)?;
    let tol = model.inner_tolerance();
    let mut curve = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        if !(t > 0.0) {
            return Err(LevyError::Domain(format!("tail arguments must be positive, got {t}")));
        }
        let tail = model.measure().two_sided_tail(t, tol)?;
        curve.push((t, tail / model.re_psi(1.0 / t)?));
    }
    Ok(Some(AsymptoticReport::new(predicted, curve, band)))
}

/// `C_I = lim_{ξ→0} Im ψ/Re ψ` for a centered regularly varying model.
pub fn limit_ratio_c_i(model: &LevyModel) -> Result<f64> {
    let g1 = model.gamma1().unwrap_or(0.0);
    if g1.abs() > 1e-12 {
        return Err(LevyError::AssumptionViolated(format!(
            "Im ψ/Re ψ diverges at 0 for nonzero mean {g1}"
        )));
    }
    match model.measure() {
        MeasureSpec::None => Ok(0.0),
        MeasureSpec::Stable { c_u, c_d, .. } | MeasureSpec::Factorized { c_u, c_d, .. } => {
            let alpha = model.alpha_at_zero().expect("power-law index");
            Ok(-(c_u - c_d) / (c_u + c_d) * (PI * alpha / 2.0).tan())
        }
        MeasureSpec::Tabulated(_) => Err(LevyError::AssumptionViolated(
            "no regular variation for a tabulated measure".into(),
        )),
    }
}

/// Behaviour of `Im ψ` at the origin on `ξ = 10^{-1}, …, 10^{-6}`.
///
/// With zero mean the curve is `Im ψ/Re ψ` against `C_I`; otherwise it is
/// `Im ψ(ξ)/ξ` against `−γ₁`.
pub fn im_re_limit(model: &LevyModel) -> Result<AsymptoticReport> {
    if !matches!(model.measure(), MeasureSpec::Stable { .. } | MeasureSpec::Factorized { .. }) {
        return Err(LevyError::AssumptionViolated(
            "the Im/Re limit is defined for stable or factorized measures".into(),
        ));
    }
    let g1 = model.gamma1().unwrap_or(0.0);
    let grid: Vec<f64> = (1..=6).map(|k| 10f64.powi(-k)).collect();
    let mut curve = Vec::with_capacity(grid.len());
    if g1.abs() > 1e-12 {
        for &xi in &grid {
            curve.push((xi, model.im_psi(xi)? / xi));
        }
        return Ok(AsymptoticReport::new(-g1, curve, 0.02));
    }
    let predicted = limit_ratio_c_i(model)?;
    for &xi in &grid {
        let p = model.eval_exponent(xi)?;
        curve.push((xi, p.im / p.re));
    }
    Ok(AsymptoticReport::new(predicted, curve, 0.02))
}

/// `C(α, C_I) = (1/π)∫_0^∞ (1+w^α)/((1+w^α)² + (C_I w^α)²) dw`.
pub fn c_of_alpha(alpha: f64, c_i: f64) -> Result<f64> {
    if !(alpha > 1.0 && alpha <= 2.0) || !c_i.is_finite() {
        return Err(LevyError::Domain(format!("C(α, C_I) needs α ∈ (1, 2] and finite C_I, got {alpha}, {c_i}")));
    }
    let f = |w: f64| {
        let p = w.powf(alpha);
        (1.0 + p) / ((1.0 + p).powi(2) + (c_i * p).powi(2))
    };
    let tol = ToleranceProfile {
        rel_tol: 1e-12,
        abs_tol: 1e-15,
        max_subdivisions: 2000,
    };
    Ok(integrate_half_line(f, 1.0, &tol)?.value / PI)
}

/// Closed form of `C(α, C_I)`: `cos(arctan(C_I)/α) / (α (1+C_I²)^{e} sin(π/α))`
/// with the exponent `e` given explicitly. The integral is reproduced by
/// `e = 1/(2α)`; see [`c_of_alpha_closed_form`].
pub fn c_of_alpha_closed_form_with_exponent(alpha: f64, c_i: f64, exponent: f64) -> f64 {
    (c_i.atan() / alpha).cos() / (alpha * (1.0 + c_i * c_i).powf(exponent) * (PI / alpha).sin())
}

pub fn c_of_alpha_closed_form(alpha: f64, c_i: f64) -> f64 {
    c_of_alpha_closed_form_with_exponent(alpha, c_i, 1.0 / (2.0 * alpha))
}

fn limit_constants(model: &LevyModel) -> Result<(f64, f64)> {
    let alpha = model
        .alpha_at_zero()
        .ok_or_else(|| LevyError::AssumptionViolated("Re ψ is not known to vary regularly at 0".into()))?;
    if !(alpha > 1.0 && alpha <= 2.0) {
        return Err(LevyError::AssumptionViolated(format!("index {alpha} outside (1, 2]")));
    }
    let c = c_of_alpha(alpha, limit_ratio_c_i(model)?)?;
    Ok((alpha, c * gamma(1.0 / alpha)))
}

/// `lim t (Re ψ)^{-1}(1/t) P^x(T_0 > t) = K(−x)/(C(α, C_I) Γ(1/α))`.
pub fn point_hitting_asymptote(model: &LevyModel, x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(LevyError::Domain("x must be finite".into()));
    }
    let (_, denom) = limit_constants(model)?;
    Ok(k_compensated(model, -x)?.value / denom)
}

/// Interval analogue of [`point_hitting_asymptote`] with the harmonic
/// correction `E^x K(−X_{T_B})` estimated from simulated entrance positions.
#[derive(Debug, Clone, PartialEq)]
pub struct SetAsymptote {
    pub value: f64,
    pub ci_halfwidth: f64,
    pub k_start: f64,
    /// Estimated `E^x K(−X_{T_B})` over the paths that entered before `t_max`.
    pub harmonic_correction: f64,
    pub entered: usize,
    pub n_paths: usize,
}

pub fn set_hitting_asymptote(model: &LevyModel, x: f64, b: Target, cfg: &MCConfig) -> Result<SetAsymptote> {
    if !(b.lo <= 0.0 && b.hi >= 0.0) {
        return Err(LevyError::Domain("the set must contain 0".into()));
    }
    if b.contains(x) {
        return Err(LevyError::Domain(format!("start {x} lies inside the set")));
    }
    let (_, denom) = limit_constants(model)?;
    let k_start = k_compensated(model, -x)?.value;
    // K(−y) on B, linearly interpolated.
    let nodes = 64;
    let ys: Vec<f64> = (0..=nodes).map(|i| b.lo + (b.hi - b.lo) * i as f64 / nodes as f64).collect();
    let ks = ys
        .iter()
        .map(|&y| k_compensated(model, -y).map(|k| k.value))
        .collect::<Result<Vec<f64>>>()?;
    let k_on_b = |y: f64| {
        if b.hi == b.lo {
            return ks[0];
        }
        let s = ((y - b.lo) / (b.hi - b.lo) * nodes as f64).clamp(0.0, nodes as f64);
        let i = (s.floor() as usize).min(nodes - 1);
        let w = s - i as f64;
        ks[i] * (1.0 - w) + ks[i + 1] * w
    };
    let entrances = sample_entrances(model, x, b, cfg)?;
    let n = entrances.len();
    // Conditional on entering before t_max; for recurrent models this is
    // all paths up to truncation.
    let vals: Vec<f64> = entrances
        .iter()
        .filter(|e| e.time.is_finite())
        .map(|e| k_on_b(e.position))
        .collect();
    let entered = vals.len();
    if entered < 2 {
        return Err(LevyError::InsufficientResolution(format!(
            "only {entered} of {n} paths entered the set before t_max"
        )));
    }
    let m = entered as f64;
    let mean = vals.iter().sum::<f64>() / m;
    let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0);
    let half = 1.96 * (var / m).sqrt();
    Ok(SetAsymptote {
        value: (k_start - mean) / denom,
        ci_halfwidth: half / denom,
        k_start,
        harmonic_correction: mean,
        entered,
        n_paths: n,
    })
}
