//! Potential kernels obtained by Fourier inversion of `1/(λ + ψ)`.
//!
//! All integrals run over ξ > 0 using the parity of ψ:
//! - `u^λ(x) = (1/π)∫ [cos(ξx)(λ+Re ψ) − sin(ξx) Im ψ] / |λ+ψ|² dξ`
//! - `K^λ(x) = (1/π)∫ [(1−cos ξx)(λ+Re ψ) + sin(ξx) Im ψ] / |λ+ψ|² dξ`
//! - `H^λ(x) = (2/π)∫ (1−cos ξx)(λ+Re ψ) / |λ+ψ|² dξ`, and `K`, `H` at λ = 0.

use std::f64::consts::PI;

use crate::error::{LevyError, Result};
use crate::levy_model::LevyModel;
use crate::numerics::{integrate_fourier, FourierWeight, QuadratureResult, ToleranceProfile};

/// A kernel evaluation with its quadrature error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    pub value: f64,
    pub error_estimate: f64,
    /// 0 for the λ → 0⁺ limit.
    pub lambda: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KWitness {
    /// `Im ψ ≥ 0` on `(0, eps)`.
    ImSign { eps: f64 },
    NonzeroMean { mean: f64 },
    /// `∫_{|z|>r}|z| ν(dz) ≤ c·r·h(r)` on the tested range.
    TailBound { c: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KExistenceEvidence {
    pub witness: Option<KWitness>,
}

impl KExistenceEvidence {
    pub fn exists(&self) -> bool {
        self.witness.is_some()
    }
}

fn kernel_tol() -> ToleranceProfile {
    ToleranceProfile {
        rel_tol: 1e-10,
        abs_tol: 1e-14,
        max_subdivisions: 2000,
    }
}

/// Evaluates ψ at ξ, turning quadrature errors into NaN so they surface as
/// a non-finite integral (reported by the caller).
fn psi_parts(model: &LevyModel, xi: f64) -> (f64, f64) {
    match model.eval_exponent(xi) {
        Ok(p) => (p.re, p.im),
        Err(_) => (f64::NAN, f64::NAN),
    }
}

fn scale_for(model: &LevyModel, lambda: f64) -> f64 {
    model.xi_scale(if lambda > 0.0 { lambda } else { 1.0 })
}

fn finish(parts: &[QuadratureResult], factor: f64, lambda: f64) -> Result<KernelValue> {
    let value: f64 = parts.iter().map(|p| p.value).sum::<f64>() * factor;
    let err: f64 = parts.iter().map(|p| p.abs_error_estimate).sum::<f64>() * factor.abs();
    if !value.is_finite() {
        return Err(LevyError::QuadratureFailure {
            partial: value,
            error: err,
        });
    }
    Ok(KernelValue {
        value,
        error_estimate: err,
        lambda,
    })
}

/// Transition density `p(t, x)`.
pub fn transition_density(model: &LevyModel, t: f64, x: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(LevyError::Domain(format!("t must be positive, got {t}")));
    }
    let tol = kernel_tol();
    let scale = model.xi_scale(1.0 / t);
    let even = |xi: f64| {
        let (re, im) = psi_parts(model, xi);
        (-t * re).exp() * (t * im).cos()
    };
    let odd = |xi: f64| {
        let (re, im) = psi_parts(model, xi);
        (-t * re).exp() * (t * im).sin()
    };
    // Re e^{−tψ−iξx} = e^{−t Re ψ}[cos(t Im ψ)cos(ξx) − sin(t Im ψ)sin(ξx)]
    let c = integrate_fourier(even, x, FourierWeight::Cos, scale, &tol)?;
    let s = if model.is_symmetric() {
        QuadratureResult::zero()
    } else {
        integrate_fourier(odd, x, FourierWeight::Sin, scale, &tol)?
    };
    let v = (c.value - s.value) / PI;
    if !v.is_finite() {
        return Err(LevyError::QuadratureFailure {
            partial: v,
            error: c.abs_error_estimate + s.abs_error_estimate,
        });
    }
    Ok(v.max(0.0))
}

/// λ-potential density `u^λ(x)`.
pub fn u_lambda(model: &LevyModel, lambda: f64, x: f64) -> Result<KernelValue> {
    if !(lambda > 0.0) {
        return Err(LevyError::Domain(format!("lambda must be positive, got {lambda}")));
    }
    let tol = kernel_tol();
    let scale = scale_for(model, lambda);
    let even = |xi: f64| {
        let (re, im) = psi_parts(model, xi);
        let a = lambda + re;
        a / (a * a + im * im)
    };
    let odd = |xi: f64| {
        let (re, im) = psi_parts(model, xi);
        let a = lambda + re;
        -im / (a * a + im * im)
    };
    let mut parts = vec![integrate_fourier(even, x, FourierWeight::Cos, scale, &tol)?];
    if x != 0.0 && !model.is_symmetric() {
        parts.push(integrate_fourier(odd, x, FourierWeight::Sin, scale, &tol)?);
    }
    finish(&parts, 1.0 / PI, lambda)
}

/// `K^λ(x) = u^λ(0) − u^λ(x)`.
pub fn k_lambda(model: &LevyModel, lambda: f64, x: f64) -> Result<KernelValue> {
    if !(lambda > 0.0) {
        return Err(LevyError::Domain(format!("lambda must be positive, got {lambda}")));
    }
    compensated(model, lambda, x)
}

fn compensated(model: &LevyModel, lambda: f64, x: f64) -> Result<KernelValue> {
    if x == 0.0 {
        return Ok(KernelValue {
            value: 0.0,
            error_estimate: 0.0,
            lambda,
        });
    }
    let tol = kernel_tol();
    let scale = scale_for(model, lambda);
    let even = |xi: f64| {
        let (re, im) = psi_parts(model, xi);
        let a = lambda + re;
        a / (a * a + im * im)
    };
    let odd = |xi: f64| {
        let (re, im) = psi_parts(model, xi);
        let a = lambda + re;
        im / (a * a + im * im)
    };
    let mut parts = vec![integrate_fourier(even, x, FourierWeight::OneMinusCos, scale, &tol)?];
    if !model.is_symmetric() {
        parts.push(integrate_fourier(odd, x, FourierWeight::Sin, scale, &tol)?);
    }
    let mut v = finish(&parts, 1.0 / PI, lambda)?;
    v.value = v.value.max(0.0);
    Ok(v)
}

/// `H^λ(x) = K^λ(x) + K^λ(−x)`; `lambda = 0` gives `H`.
pub fn h_sym(model: &LevyModel, x: f64, lambda: f64) -> Result<KernelValue> {
    if !(lambda >= 0.0) {
        return Err(LevyError::Domain(format!("lambda must be ≥ 0, got {lambda}")));
    }
    if x == 0.0 {
        return Ok(KernelValue {
            value: 0.0,
            error_estimate: 0.0,
            lambda,
        });
    }
    let tol = kernel_tol();
    let scale = scale_for(model, lambda);
    let g = |xi: f64| {
        let (re, im) = psi_parts(model, xi);
        let a = lambda + re;
        a / (a * a + im * im)
    };
    let r = integrate_fourier(g, x, FourierWeight::OneMinusCos, scale, &tol)?;
    finish(&[r], 2.0 / PI, lambda)
}

/// `K(x) = lim_{λ↓0} K^λ(x)`, refused unless an existence witness is found.
pub fn k_compensated(model: &LevyModel, x: f64) -> Result<KernelValue> {
    if !k_exists_evidence(model)?.exists() {
        return Err(LevyError::ExistenceNotCertified);
    }
    compensated(model, 0.0, x)
}

/// Looks for one of the sufficient conditions for the existence of `K`,
/// in the order: sign of Im ψ near 0, nonzero mean, tail bound.
pub fn k_exists_evidence(model: &LevyModel) -> Result<KExistenceEvidence> {
    let eps = 1e-2;
    let mut nonneg = true;
    for i in 0..=48 {
        let xi = eps * 10f64.powf(-8.0 * i as f64 / 48.0);
        if model.im_psi(xi)? < 0.0 {
            nonneg = false;
            break;
        }
    }
    if nonneg {
        return Ok(KExistenceEvidence {
            witness: Some(KWitness::ImSign { eps }),
        });
    }
    if let Some(mean) = model.mean() {
        if mean.abs() > 1e-12 {
            return Ok(KExistenceEvidence {
                witness: Some(KWitness::NonzeroMean { mean }),
            });
        }
    }
    let mut ratios = Vec::new();
    for i in 0..=30 {
        let r = 10f64.powf(3.0 * i as f64 / 30.0);
        let Some(m) = model.large_jump_abs_moment(r)? else {
            return Ok(KExistenceEvidence { witness: None });
        };
        ratios.push(m / (r * model.concentration_h(r)?));
    }
    let sup = ratios.iter().cloned().fold(0.0, f64::max);
    // A sup attained at the right end that is still growing is no evidence
    // of a bound.
    let last = ratios[ratios.len() - 1];
    let decade_ago = ratios[ratios.len() - 11];
    if sup.is_finite() && !(last > 1.5 * decade_ago && last >= sup) {
        return Ok(KExistenceEvidence {
            witness: Some(KWitness::TailBound { c: sup }),
        });
    }
    Ok(KExistenceEvidence { witness: None })
}

/// `κ = lim_{λ↓0} 1/u^λ(0)` by Aitken extrapolation over `λ = 2^{−k}`.
pub fn kappa(model: &LevyModel) -> Result<f64> {
    let mut f = Vec::with_capacity(21);
    for k in 0..=20 {
        let lam = 2f64.powi(-k);
        let u = u_lambda(model, lam, 0.0)?;
        let v = 1.0 / u.value;
        if let Some(&prev) = f.last() {
            if v > prev * (1.0 + 1e-7) {
                return Err(LevyError::UnstableLimit(format!(
                    "1/u^λ(0) increased from {prev} to {v} at λ = 2^-{k}"
                )));
            }
        }
        if v < 1e-8 {
            return Ok(0.0);
        }
        f.push(v);
    }
    let aitken = |a: f64, b: f64, c: f64| {
        let d = (c - b) - (b - a);
        if d.abs() < 1e-300 {
            c
        } else {
            c - (c - b) * (c - b) / d
        }
    };
    let n = f.len();
    let a1 = aitken(f[n - 3], f[n - 2], f[n - 1]);
    let a0 = aitken(f[n - 4], f[n - 3], f[n - 2]);
    let last = f[n - 1];
    if a1 <= 1e-3 * last {
        return Ok(0.0);
    }
    if (a1 - a0).abs() > 0.05 * a1.abs() {
        return Err(LevyError::UnstableLimit(format!(
            "extrapolants disagree: {a0} vs {a1}"
        )));
    }
    Ok(a1)
}

/// `P^x(T_0 = ∞) = κ K(−x)`, clamped to [0, 1].
pub fn survival_prob_t0(model: &LevyModel, x: f64) -> Result<f64> {
    let k = kappa(model)?;
    if k == 0.0 {
        return Ok(0.0);
    }
    let kv = k_compensated(model, -x)?;
    Ok((k * kv.value).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy_model::preset;
    use crate::numerics::{gamma, one_minus_cos_moment};

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn brownian_density() {
        let m = LevyModel::brownian(1.0).unwrap();
        let p0 = transition_density(&m, 1.0, 0.0).unwrap();
        assert!(rel(p0, 1.0 / (4.0 * PI).sqrt()) < 1e-8);
        let p2 = transition_density(&m, 1.0, 2.0).unwrap();
        assert!(rel(p2, (-1.0f64).exp() / (4.0 * PI).sqrt()) < 1e-8);
        assert!(transition_density(&m, 0.0, 1.0).is_err());
    }

    #[test]
    fn stable_density_at_origin() {
        let m = preset("stable-sym-1.5").unwrap();
        let p = transition_density(&m, 1.0, 0.0).unwrap();
        assert!(rel(p, gamma(1.0 + 2.0 / 3.0) / PI) < 1e-8, "{p}");
    }

    #[test]
    fn brownian_resolvent() {
        let m = LevyModel::brownian(1.0).unwrap();
        assert!(rel(u_lambda(&m, 4.0, 0.0).unwrap().value, 0.25) < 1e-9);
        assert!(rel(u_lambda(&m, 1.0, 1.0).unwrap().value, (-1.0f64).exp() / 2.0) < 1e-9);
        assert!(rel(k_lambda(&m, 1.0, 1.0).unwrap().value, (1.0 - (-1.0f64).exp()) / 2.0) < 1e-9);
    }

    #[test]
    fn brownian_h_and_k() {
        let m = LevyModel::brownian(1.0).unwrap();
        for &x in &[0.5, 1.0, 2.0, -3.0] {
            assert!(rel(h_sym(&m, x, 0.0).unwrap().value, x.abs()) < 1e-8);
            assert!(rel(k_compensated(&m, x).unwrap().value, x.abs() / 2.0) < 1e-8);
        }
    }

    #[test]
    fn stable_h_closed_form() {
        let m = preset("stable-sym-1.5").unwrap();
        let h = h_sym(&m, 1.0, 0.0).unwrap();
        assert!(rel(h.value, 2.0 / PI * one_minus_cos_moment(1.5).unwrap()) < 1e-8, "{h:?}");
    }

    #[test]
    fn kappa_recurrent_and_transient() {
        assert_eq!(kappa(&LevyModel::brownian(1.0).unwrap()).unwrap(), 0.0);
        assert_eq!(kappa(&preset("stable-sym-1.5").unwrap()).unwrap(), 0.0);
        // Brownian motion with drift γ: u^λ(0) = 1/sqrt(γ² + 4σ²λ), κ = |γ|.
        let d = LevyModel::new(1.0, 0.7, crate::MeasureSpec::None).unwrap();
        assert!(rel(kappa(&d).unwrap(), 0.7) < 1e-4);
    }

    #[test]
    fn drifted_brownian_escape_probability() {
        // Generator σ²f'' + γf': from x > 0 with γ > 0 the path never
        // reaches 0 with probability 1 − e^{−γx/σ²}.
        let (sigma, g) = (1.0, 0.7);
        let m = LevyModel::new(sigma, g, crate::MeasureSpec::None).unwrap();
        for &x in &[0.5, 1.0, 2.0] {
            let p = survival_prob_t0(&m, x).unwrap();
            let exact = 1.0 - (-g * x / (sigma * sigma)).exp();
            assert!(rel(p, exact) < 1e-3, "x={x}: {p} vs {exact}");
            assert!(survival_prob_t0(&m, -x).unwrap() < 1e-6);
        }
    }

    #[test]
    fn existence_witnesses() {
        let sym = preset("stable-sym-1.5").unwrap();
        assert!(matches!(k_exists_evidence(&sym).unwrap().witness, Some(KWitness::ImSign { .. })));
        let neg = preset("stable-specneg-1.5").unwrap();
        assert!(matches!(k_exists_evidence(&neg).unwrap().witness, Some(KWitness::TailBound { .. })));
        let drifted = LevyModel::new(0.0, 1.0, crate::MeasureSpec::Stable { alpha: 1.5, c_u: 0.3, c_d: 0.3 }).unwrap();
        assert!(matches!(
            k_exists_evidence(&drifted).unwrap().witness,
            Some(KWitness::NonzeroMean { .. }) | Some(KWitness::ImSign { .. })
        ));
    }

    #[test]
    fn spectrally_negative_k_matches_lambda_limit() {
        let m = preset("stable-specneg-1.5").unwrap();
        let k = k_compensated(&m, 1.0).unwrap().value;
        // K^λ(1) − K(1) = O(λ^{1−1/α}); Richardson on λ and λ/8 removes the
        // leading term (ratio 8^{1/3} = 2).
        let a = k_lambda(&m, 1e-6, 1.0).unwrap().value;
        let b = k_lambda(&m, 1e-6 / 8.0, 1.0).unwrap().value;
        let extrap = 2.0 * b - a;
        assert!((extrap - k).abs() < 1e-4, "{k} vs {extrap} ({a}, {b})");
        let h = h_sym(&m, 1.0, 0.0).unwrap().value;
        let km = k_compensated(&m, -1.0).unwrap().value;
        assert!((k + km - h).abs() < 1e-7);
    }
}
