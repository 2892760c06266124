//! Lévy processes described by their generating triplet (σ, γ, ν).
//!
//! Sign convention: `E e^{iξX_t} = e^{−tψ(ξ)}` with
//! `ψ(ξ) = σ²ξ² − iγξ − ∫(e^{iξz} − 1 − iξz1_{|z|<1}) ν(dz)`, so that
//! `Re ψ = σ²ξ² + ∫(1 − cos ξz)ν(dz)` and, when the first moment is finite,
//! `Im ψ = −γ₁ξ + ∫(ξz − sin ξz)ν(dz)` with `γ₁ = E X₁`.

mod config;
mod measure;

use std::f64::consts::PI;

use num_complex::Complex64;

pub use config::{list_models, preset, ModelConfig, MeasureConfig, PRESET_NAMES};
pub use measure::{BrokenPower, MeasureSpec, TabulatedMeasure};

use crate::error::{LevyError, Result};
use crate::numerics::{
    integrate_fourier, integrate_half_line, monotone_inverse, stable_cos_integral, FourierWeight,
    InverseResult, Monotonicity, ToleranceProfile,
};

/// A one-dimensional Lévy process.
#[derive(Debug, Clone, PartialEq)]
pub struct LevyModel {
    sigma: f64,
    gamma: f64,
    measure: MeasureSpec,
    centered: bool,
    gamma1: Option<f64>,
    spectrally_negative: bool,
    tol: ToleranceProfile,
}

/// Integrability verdict for `∫_0^∞ dξ/(1 + Re ψ(ξ))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Integrability {
    Finite(f64),
    Infinite,
    Undetermined,
}

impl Integrability {
    pub fn is_finite(&self) -> bool {
        matches!(self, Integrability::Finite(_))
    }

    pub fn value_estimate(&self) -> Option<f64> {
        match self {
            Integrability::Finite(v) => Some(*v),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WlscEstimate {
    pub alpha_hat: f64,
    pub c_hat: f64,
    /// The (u, λ) pair attaining the minimal scaling ratio.
    pub certifying_pair: (f64, f64),
}

impl LevyModel {
    pub fn new(sigma: f64, gamma: f64, measure: MeasureSpec) -> Result<Self> {
        Self::build(sigma, gamma, measure, false)
    }

    /// Drift chosen so that `E X₁ = 0`.
    pub fn centered(sigma: f64, measure: MeasureSpec) -> Result<Self> {
        Self::build(sigma, 0.0, measure, true)
    }

    pub fn brownian(sigma: f64) -> Result<Self> {
        Self::centered(sigma, MeasureSpec::None)
    }

    /// Centered strictly stable model with `Re ψ(ξ) = |ξ|^α` and skewness
    /// `β = (c_u − c_d)/(c_u + c_d)`.
    pub fn stable_unit(alpha: f64, beta: f64) -> Result<Self> {
        if !(-1.0..=1.0).contains(&beta) {
            return Err(LevyError::InvalidModel(format!("skewness must lie in [-1, 1], got {beta}")));
        }
        let total = 1.0 / stable_cos_integral(alpha)?;
        let measure = MeasureSpec::Stable {
            alpha,
            c_u: 0.5 * total * (1.0 + beta),
            c_d: 0.5 * total * (1.0 - beta),
        };
        Self::centered(0.0, measure)
    }

    fn build(sigma: f64, gamma: f64, measure: MeasureSpec, centered: bool) -> Result<Self> {
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(LevyError::InvalidModel(format!("sigma must be finite and ≥ 0, got {sigma}")));
        }
        if !gamma.is_finite() {
            return Err(LevyError::InvalidModel("gamma must be finite".into()));
        }
        measure.validate()?;
        if sigma == 0.0 && matches!(measure, MeasureSpec::None) {
            return Err(LevyError::InvalidModel("degenerate model: no Gaussian part and no jumps".into()));
        }
        let tol = ToleranceProfile {
            rel_tol: 1e-11,
            abs_tol: 1e-15,
            max_subdivisions: 2000,
        };
        let large_jump_mean = match &measure {
            MeasureSpec::None => 0.0,
            MeasureSpec::Tabulated(t) => {
                t.integrate(|z| z, 1.0, f64::INFINITY, &tol)? + t.integrate(|z| z, f64::NEG_INFINITY, -1.0, &tol)?
            }
            m => {
                let (c_u, c_d, p) = m.power_view().expect("power-law spec");
                (c_u - c_d) * p.first_moment_from_one(f64::INFINITY)
            }
        };
        let gamma = if centered { -large_jump_mean } else { gamma };
        let model = LevyModel {
            sigma,
            gamma,
            spectrally_negative: measure.is_spectrally_negative(),
            measure,
            centered,
            gamma1: Some(gamma + large_jump_mean),
            tol,
        };
        Ok(model)
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn measure(&self) -> &MeasureSpec {
        &self.measure
    }

    pub fn is_centered(&self) -> bool {
        self.centered
    }

    /// `γ₁ = γ + ∫_{|z|≥1} z ν(dz)`.
    pub fn gamma1(&self) -> Option<f64> {
        self.gamma1
    }

    /// `E X₁` (equal to γ₁ whenever the first moment is finite).
    pub fn mean(&self) -> Option<f64> {
        self.gamma1
    }

    pub fn spectrally_negative(&self) -> bool {
        self.spectrally_negative
    }

    pub fn is_symmetric(&self) -> bool {
        self.measure.is_symmetric() && (self.gamma1 == Some(0.0))
    }

    pub fn is_brownian(&self) -> bool {
        matches!(self.measure, MeasureSpec::None)
    }

    /// Quadrature tolerance used for internal integrals over ν.
    pub fn inner_tolerance(&self) -> &ToleranceProfile {
        &self.tol
    }

    /// Index of regular variation of `Re ψ` at the origin, when known.
    pub fn alpha_at_zero(&self) -> Option<f64> {
        match &self.measure {
            MeasureSpec::None => Some(2.0),
            MeasureSpec::Stable { alpha, .. } => Some(*alpha),
            MeasureSpec::Factorized { profile, .. } => Some(1.0 + profile.b_large),
            MeasureSpec::Tabulated(_) => None,
        }
    }

    /// Index of regular variation of `Re ψ` at infinity, when known.
    pub fn alpha_at_infinity(&self) -> Option<f64> {
        if self.sigma > 0.0 {
            return Some(2.0);
        }
        match &self.measure {
            MeasureSpec::Stable { alpha, .. } => Some(*alpha),
            MeasureSpec::Factorized { profile, .. } => Some(1.0 + profile.b_small),
            _ => None,
        }
    }

    /// ψ(ξ) as `Re + i Im`.
    pub fn eval_exponent(&self, xi: f64) -> Result<Complex64> {
        Ok(Complex64::new(self.re_psi(xi)?, self.im_psi(xi)?))
    }

    pub fn re_psi(&self, xi: f64) -> Result<f64> {
        let gauss = self.sigma * self.sigma * xi * xi;
        let a = xi.abs();
        if a == 0.0 {
            return Ok(0.0);
        }
        let jumps = match &self.measure {
            MeasureSpec::None => 0.0,
            MeasureSpec::Stable { alpha, c_u, c_d } => (c_u + c_d) * stable_cos_integral(*alpha)? * a.powf(*alpha),
            MeasureSpec::Factorized { .. } => self.re_jump_quadrature(a)?,
            MeasureSpec::Tabulated(t) => tabulated_re(t, xi),
        };
        Ok(gauss + jumps)
    }

    pub fn im_psi(&self, xi: f64) -> Result<f64> {
        if xi == 0.0 {
            return Ok(0.0);
        }
        let drift = -self.gamma1.unwrap_or(self.gamma) * xi;
        let jumps = match &self.measure {
            MeasureSpec::None => 0.0,
            MeasureSpec::Stable { alpha, c_u, c_d } => {
                let c = stable_cos_integral(*alpha)?;
                -(c_u - c_d) * c * (PI * alpha / 2.0).tan() * xi.signum() * xi.abs().powf(*alpha)
            }
            MeasureSpec::Factorized { .. } => self.im_jump_quadrature(xi)?,
            MeasureSpec::Tabulated(t) => xi * t.first_moment() - t.fourier(xi).1,
        };
        Ok(drift + jumps)
    }

    /// `∫(1 − cos ξz) ν(dz)` by oscillatory quadrature, valid for the
    /// power-law specs (used for Factorized and to cross-check Stable).
    fn re_jump_quadrature(&self, a: f64) -> Result<f64> {
        let (c_u, c_d, p) = self.measure.power_view().ok_or_else(|| {
            LevyError::Unsupported("quadrature path needs a power-law measure".into())
        })?;
        let v = integrate_fourier(|z: f64| p.f(z) / (z * z), a, FourierWeight::OneMinusCos, p.knee, &self.tol)?;
        Ok((c_u + c_d) * v.value)
    }

    /// `∫(ξz − sin ξz) ν(dz) = ξ ∫_0^∞ (1 − cos ξt) (ν₊ − ν₋)([t, ∞)) dt`.
    fn im_jump_quadrature(&self, xi: f64) -> Result<f64> {
        let (c_u, c_d, p) = self.measure.power_view().ok_or_else(|| {
            LevyError::Unsupported("quadrature path needs a power-law measure".into())
        })?;
        if c_u == c_d {
            return Ok(0.0);
        }
        let v = integrate_fourier(|t: f64| p.tail(t), xi.abs(), FourierWeight::OneMinusCos, p.knee, &self.tol)?;
        Ok((c_u - c_d) * xi * v.value)
    }

    /// Exponent evaluated by quadrature over ν regardless of closed forms.
    pub fn eval_exponent_quadrature(&self, xi: f64) -> Result<Complex64> {
        match &self.measure {
            MeasureSpec::Stable { .. } | MeasureSpec::Factorized { .. } => {
                if xi == 0.0 {
                    return Ok(Complex64::new(0.0, 0.0));
                }
                let re = self.sigma * self.sigma * xi * xi + self.re_jump_quadrature(xi.abs())?;
                let im = -self.gamma1.unwrap_or(self.gamma) * xi + self.im_jump_quadrature(xi)?;
                Ok(Complex64::new(re, im))
            }
            _ => self.eval_exponent(xi),
        }
    }

    /// Concentration function `h(r) = σ²/r² + ∫(1 ∧ z²/r²) ν(dz)`.
    pub fn concentration_h(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(LevyError::Domain(format!("h needs r > 0, got {r}")));
        }
        let gauss = self.sigma * self.sigma / (r * r);
        let jumps = match &self.measure {
            MeasureSpec::None => 0.0,
            MeasureSpec::Stable { alpha, c_u, c_d } => {
                (c_u + c_d) * r.powf(-alpha) * (1.0 / (2.0 - alpha) + 1.0 / alpha)
            }
            MeasureSpec::Factorized { c_u, c_d, profile } => {
                (c_u + c_d) * (profile.truncated_second_moment(r) / (r * r) + profile.tail(r))
            }
            MeasureSpec::Tabulated(t) => t.integrate(|z| (z * z / (r * r)).min(1.0), f64::NEG_INFINITY, f64::INFINITY, &self.tol)?,
        };
        Ok(gauss + jumps)
    }

    /// Compensated drift `b_r = γ + ∫ z (1_{|z|<r} − 1_{|z|<1}) ν(dz)`.
    pub fn compensated_drift_b(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(LevyError::Domain(format!("b_r needs r > 0, got {r}")));
        }
        if r == 1.0 {
            return Ok(self.gamma);
        }
        let extra = match &self.measure {
            MeasureSpec::None => 0.0,
            MeasureSpec::Tabulated(t) => {
                let (lo, hi, sign) = if r > 1.0 { (1.0, r, 1.0) } else { (r, 1.0, -1.0) };
                sign * (t.integrate(|z| z, lo, hi, &self.tol)? + t.integrate(|z| z, -hi, -lo, &self.tol)?)
            }
            m => {
                let (c_u, c_d, p) = m.power_view().expect("power-law spec");
                (c_u - c_d) * p.first_moment_from_one(r)
            }
        };
        Ok(self.gamma + extra)
    }

    /// `∫_{|z|>r} |z| ν(dz)`; `None` when infinite.
    pub fn large_jump_abs_moment(&self, r: f64) -> Result<Option<f64>> {
        Ok(Some(match &self.measure {
            MeasureSpec::None => 0.0,
            MeasureSpec::Tabulated(t) => {
                t.integrate(|z| z.abs(), r, f64::INFINITY, &self.tol)?
                    + t.integrate(|z| z.abs(), f64::NEG_INFINITY, -r, &self.tol)?
            }
            m => {
                let (c_u, c_d, p) = m.power_view().expect("power-law spec");
                (c_u + c_d) * p.moment(-1.0, r, f64::INFINITY)
            }
        }))
    }

    /// Whether `Re ψ` is known to be non-decreasing on `(0, ∞)`.
    pub fn re_psi_monotone(&self) -> bool {
        !matches!(self.measure, MeasureSpec::Tabulated(_))
    }

    /// `ψ*(r) = sup_{|x| ≤ r} Re ψ(x)`.
    pub fn psi_star(&self, r: f64) -> Result<f64> {
        if !(r >= 0.0) {
            return Err(LevyError::Domain(format!("psi* needs r ≥ 0, got {r}")));
        }
        if r == 0.0 {
            return Ok(0.0);
        }
        let at_r = self.re_psi(r)?;
        if self.re_psi_monotone() {
            return Ok(at_r);
        }
        // 64 points per decade over six decades below r, then refine around
        // the best grid point.
        let n = 6 * 64;
        let mut best = (at_r, r);
        for i in 0..n {
            let x = r * 10f64.powf(-(i as f64 + 1.0) / 64.0);
            let v = self.re_psi(x)?;
            if v > best.0 {
                best = (v, x);
            }
        }
        let step = 10f64.powf(1.0 / 64.0);
        let (mut lo, mut hi) = (best.1 / step, (best.1 * step).min(r));
        for _ in 0..40 {
            let m1 = lo + (hi - lo) / 3.0;
            let m2 = hi - (hi - lo) / 3.0;
            let (v1, v2) = (self.re_psi(m1)?, self.re_psi(m2)?);
            best.0 = best.0.max(v1).max(v2);
            if v1 < v2 {
                lo = m1;
            } else {
                hi = m2;
            }
        }
        Ok(best.0)
    }

    /// `(Re ψ)^{-1}(s)`, the generalized inverse of ψ*.
    pub fn inv_re_psi(&self, s: f64) -> Result<InverseResult> {
        self.inv_re_psi_tol(s, 1e-12)
    }

    pub(crate) fn inv_re_psi_tol(&self, s: f64, rel_tol: f64) -> Result<InverseResult> {
        if let (MeasureSpec::Stable { alpha, c_u, c_d }, true) = (&self.measure, self.sigma == 0.0) {
            let c = (c_u + c_d) * stable_cos_integral(*alpha)?;
            return Ok(InverseResult {
                value: (s / c).powf(1.0 / alpha),
                range_clamp: !(s > 0.0),
            });
        }
        if let (MeasureSpec::None, true) = (&self.measure, self.sigma > 0.0) {
            return Ok(InverseResult {
                value: s.max(0.0).sqrt() / self.sigma,
                range_clamp: !(s > 0.0),
            });
        }
        let err = std::cell::Cell::new(None);
        let res = monotone_inverse(
            |r| match self.psi_star(r) {
                Ok(v) => v,
                Err(e) => {
                    err.set(Some(e));
                    f64::NAN
                }
            },
            s,
            Monotonicity::Increasing,
            rel_tol,
        )?;
        if let Some(e) = err.take() {
            return Err(e);
        }
        Ok(res)
    }

    /// `h^{-1}(s)`.
    pub fn inv_h(&self, s: f64) -> Result<InverseResult> {
        if let (MeasureSpec::Stable { alpha, c_u, c_d }, true) = (&self.measure, self.sigma == 0.0) {
            let k = (c_u + c_d) * (1.0 / (2.0 - alpha) + 1.0 / alpha);
            return Ok(InverseResult {
                value: (s / k).powf(-1.0 / alpha),
                range_clamp: !(s > 0.0),
            });
        }
        let err = std::cell::Cell::new(None);
        let res = monotone_inverse(
            |r| match self.concentration_h(r) {
                Ok(v) => v,
                Err(e) => {
                    err.set(Some(e));
                    f64::NAN
                }
            },
            s,
            Monotonicity::Decreasing,
            1e-12,
        )?;
        if let Some(e) = err.take() {
            return Err(e);
        }
        Ok(res)
    }

    /// A frequency scale at which `Re ψ` reaches `level` (coarse).
    pub fn xi_scale(&self, level: f64) -> f64 {
        match self.inv_re_psi_tol(level, 1e-3) {
            Ok(r) if r.value.is_finite() && r.value > 0.0 && !r.range_clamp => r.value,
            _ => 1.0,
        }
    }

    /// Weak lower scaling: the largest α with `Re ψ(λu) ≥ λ^α Re ψ(u)` on
    /// all grid pairs (λ > 1), together with the constant at that α.
    pub fn wlsc_estimate(&self, u_grid: &[f64], lambda_grid: &[f64]) -> Result<WlscEstimate> {
        if u_grid.is_empty() || lambda_grid.is_empty() {
            return Err(LevyError::Domain("wlsc grids must be non-empty".into()));
        }
        let mut alpha_hat = f64::INFINITY;
        let mut pair = (u_grid[0], lambda_grid[0]);
        let mut any_positive = false;
        for &u in u_grid {
            let base = self.re_psi(u)?;
            if base <= 0.0 {
                continue;
            }
            any_positive = true;
            for &lam in lambda_grid {
                if !(lam > 1.0) {
                    continue;
                }
                let slope = (self.re_psi(lam * u)? / base).ln() / lam.ln();
                if slope < alpha_hat {
                    alpha_hat = slope;
                    pair = (u, lam);
                }
            }
        }
        if !any_positive {
            return Err(LevyError::Domain("Re ψ vanishes on the whole grid".into()));
        }
        if !alpha_hat.is_finite() {
            return Err(LevyError::Domain("lambda grid needs a value > 1".into()));
        }
        // Report on a 1e-4 grid, rounding down so the constant stays ≤ 1.
        let alpha_hat = (alpha_hat * 1e4).floor() / 1e4;
        let mut c_hat: f64 = 1.0;
        for &u in u_grid {
            let base = self.re_psi(u)?;
            if base <= 0.0 {
                continue;
            }
            for &lam in lambda_grid {
                if lam >= 1.0 {
                    c_hat = c_hat.min(self.re_psi(lam * u)? / (lam.powf(alpha_hat) * base));
                }
            }
        }
        Ok(WlscEstimate {
            alpha_hat,
            c_hat: c_hat.clamp(f64::MIN_POSITIVE, 1.0),
            certifying_pair: pair,
        })
    }

    /// Default six-decade WLSC estimate.
    pub fn wlsc_default(&self) -> Result<WlscEstimate> {
        let u: Vec<f64> = (0..=24).map(|i| 10f64.powf(-3.0 + 0.25 * i as f64)).collect();
        let lam: Vec<f64> = (1..=12).map(|i| 10f64.powf(0.25 * i as f64)).collect();
        self.wlsc_estimate(&u, &lam)
    }

    /// Verdict on `∫_0^∞ dξ/(1 + Re ψ(ξ)) < ∞` from the growth of `Re ψ`
    /// over `[10³, 10⁶]`.
    pub fn integrability_check(&self) -> Result<Integrability> {
        let grid: Vec<f64> = (0..=12).map(|i| 10f64.powf(3.0 + 0.25 * i as f64)).collect();
        let mut min_slope = f64::INFINITY;
        let mut max_slope = f64::NEG_INFINITY;
        for w in grid.windows(2) {
            let (a, b) = (self.re_psi(w[0])?, self.re_psi(w[1])?);
            let slope = if a > 0.0 && b > 0.0 { (b / a).ln() / (w[1] / w[0]).ln() } else { 0.0 };
            min_slope = min_slope.min(slope);
            max_slope = max_slope.max(slope);
        }
        if min_slope > 1.01 {
            let tol = ToleranceProfile::new(1e-8, 1e-12, 2000)?;
            let scale = self.xi_scale(1.0);
            let v = integrate_half_line(|xi| 1.0 / (1.0 + self.re_psi(xi).unwrap_or(f64::NAN)), scale, &tol)?;
            if !v.value.is_finite() {
                return Err(LevyError::QuadratureFailure {
                    partial: v.value,
                    error: v.abs_error_estimate,
                });
            }
            Ok(Integrability::Finite(v.value))
        } else if max_slope < 0.99 {
            Ok(Integrability::Infinite)
        } else {
            Ok(Integrability::Undetermined)
        }
    }

    /// Sanity check `∫(1 ∧ z²) ν(dz) < ∞`, returning its value.
    pub fn levy_integral(&self) -> Result<f64> {
        self.concentration_h(1.0).map(|h| h - self.sigma * self.sigma)
    }

    /// The model of `−X`.
    pub fn dual(&self) -> Result<LevyModel> {
        let measure = match &self.measure {
            MeasureSpec::None => MeasureSpec::None,
            MeasureSpec::Stable { alpha, c_u, c_d } => MeasureSpec::Stable {
                alpha: *alpha,
                c_u: *c_d,
                c_d: *c_u,
            },
            MeasureSpec::Factorized { c_u, c_d, profile } => MeasureSpec::Factorized {
                c_u: *c_d,
                c_d: *c_u,
                profile: *profile,
            },
            MeasureSpec::Tabulated(t) => {
                let z = t.z.iter().rev().map(|z| -z).collect();
                let d = t.density.iter().rev().cloned().collect();
                MeasureSpec::Tabulated(TabulatedMeasure::new(z, d)?)
            }
        };
        if self.centered {
            LevyModel::centered(self.sigma, measure)
        } else {
            LevyModel::new(self.sigma, -self.gamma, measure)
        }
    }

    pub fn to_config(&self) -> ModelConfig {
        ModelConfig::from_model(self)
    }
}

fn tabulated_re(t: &TabulatedMeasure, xi: f64) -> f64 {
    // For small ξ the difference mass − ∫cos cancels; integrate 2sin²(ξz/2)
    // directly instead.
    let width = t.z.last().copied().unwrap_or(0.0).abs().max(t.z[0].abs());
    if (xi * width).abs() < 1.0 {
        let tol = ToleranceProfile::default();
        return t
            .integrate(
                |z| {
                    let s = (0.5 * xi * z).sin();
                    2.0 * s * s
                },
                f64::NEG_INFINITY,
                f64::INFINITY,
                &tol,
            )
            .unwrap_or(f64::NAN);
    }
    t.mass() - t.fourier(xi).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::integrate_adaptive;

    fn sym15() -> LevyModel {
        LevyModel::stable_unit(1.5, 0.0).unwrap()
    }

    fn specneg15() -> LevyModel {
        LevyModel::stable_unit(1.5, -1.0).unwrap()
    }

    #[test]
    fn brownian_exponent() {
        let m = LevyModel::brownian(1.0).unwrap();
        let p = m.eval_exponent(2.0).unwrap();
        assert_eq!(p, Complex64::new(4.0, 0.0));
    }

    #[test]
    fn stable_normalization() {
        let p = sym15().eval_exponent(1.0).unwrap();
        assert!((p.re - 1.0).abs() < 1e-14 && p.im.abs() < 1e-14);
        let p = specneg15().eval_exponent(1.0).unwrap();
        assert!((p.re - 1.0).abs() < 1e-14, "{p}");
        assert!((p.im + 1.0).abs() < 1e-12, "{p}");
    }

    #[test]
    fn spectrally_negative_imaginary_part_by_quadrature() {
        let m = specneg15();
        let q = m.eval_exponent_quadrature(1.0).unwrap();
        assert!((q.re - 1.0).abs() < 1e-8, "{q}");
        assert!((q.im + 1.0).abs() < 1e-8, "{q}");
    }

    #[test]
    fn concentration_power_law() {
        let m = LevyModel::new(0.0, 0.0, MeasureSpec::Stable { alpha: 1.5, c_u: 1.0, c_d: 1.0 }).unwrap();
        let h = m.concentration_h(1.0).unwrap();
        assert!((h - 16.0 / 3.0).abs() < 1e-12);
        // quadrature oracle: 2(∫_0^1 z^{-0.5} dz + ∫_1^∞ z^{-2.5} dz)
        let tol = ToleranceProfile::default();
        let q = 2.0
            * (crate::numerics::integrate_from_zero(|z: f64| z.powf(-0.5), 1.0, &tol).unwrap().value
                + integrate_adaptive(|z: f64| z.powf(-2.5), 1.0, f64::INFINITY, &tol).unwrap().value);
        assert!((h - q).abs() < 1e-7);
        let b = LevyModel::brownian(1.0).unwrap();
        assert!((b.concentration_h(2.0).unwrap() - 0.25).abs() < 1e-15);
        assert!(m.concentration_h(0.0).is_err());
    }

    #[test]
    fn compensated_drift() {
        let m = LevyModel::new(0.0, 0.0, MeasureSpec::Stable { alpha: 1.5, c_u: 0.0, c_d: 1.0 }).unwrap();
        assert_eq!(m.compensated_drift_b(1.0).unwrap(), 0.0);
        // −∫_1^2 z·z^{−2.5} dz by quadrature
        let tol = ToleranceProfile::default();
        let q = -integrate_adaptive(|z: f64| z.powf(-1.5), 1.0, 2.0, &tol).unwrap().value;
        assert!((m.compensated_drift_b(2.0).unwrap() - q).abs() < 1e-12);
        let s = sym15();
        assert!((s.compensated_drift_b(3.7).unwrap() - s.gamma()).abs() < 1e-15);
    }

    #[test]
    fn centered_models_have_zero_mean() {
        let m = specneg15();
        assert!(m.gamma1().unwrap().abs() < 1e-15);
        assert!(m.gamma() > 0.0);
        let f = preset("factorized-asym-1.5").unwrap();
        assert!(f.gamma1().unwrap().abs() < 1e-12);
    }

    #[test]
    fn inverses() {
        let b = LevyModel::brownian(1.0).unwrap();
        assert!((b.inv_re_psi(9.0).unwrap().value - 3.0).abs() < 1e-12);
        assert!((b.inv_h(0.25).unwrap().value - 2.0).abs() < 1e-10);
        let s = sym15();
        assert!((s.inv_re_psi(8.0).unwrap().value - 4.0).abs() < 1e-12);
        assert!((s.inv_re_psi(1.0).unwrap().value - 1.0).abs() < 1e-12);
        assert!((s.re_psi(s.inv_re_psi(1.0).unwrap().value).unwrap() - 1.0).abs() < 1e-12);
        let h = s.concentration_h(2.5).unwrap();
        assert!((s.inv_h(h).unwrap().value - 2.5).abs() < 1e-9);
    }

    #[test]
    fn generic_inverse_path_matches_closed_form() {
        let f = preset("factorized-beta0.4-0.6").unwrap();
        let s = 3.0;
        let r = f.inv_re_psi(s).unwrap().value;
        assert!((f.re_psi(r).unwrap() / s - 1.0).abs() < 1e-8);
    }

    #[test]
    fn dual_conjugates_exponent() {
        for m in [specneg15(), preset("factorized-asym-1.5").unwrap()] {
            let d = m.dual().unwrap();
            for &xi in &[0.1, 1.0, 7.0] {
                let a = m.eval_exponent(xi).unwrap();
                let b = d.eval_exponent(xi).unwrap();
                assert!((a.re - b.re).abs() < 1e-9 * a.re && (a.im + b.im).abs() < 1e-9 * a.re.max(1.0));
            }
        }
    }

    #[test]
    fn wlsc() {
        let w = sym15().wlsc_default().unwrap();
        assert!((w.alpha_hat - 1.5).abs() < 0.01, "{w:?}");
        assert!((w.c_hat - 1.0).abs() < 1e-3);
        let w = LevyModel::brownian(1.0).unwrap().wlsc_default().unwrap();
        assert!((w.alpha_hat - 2.0).abs() < 0.01);
        let w = preset("factorized-beta0.4-0.6").unwrap().wlsc_default().unwrap();
        assert!(w.alpha_hat >= 1.4 - 1e-3 && w.alpha_hat <= 1.6, "{w:?}");
    }

    #[test]
    fn integrability() {
        let b = LevyModel::brownian(1.0).unwrap().integrability_check().unwrap();
        assert!((b.value_estimate().unwrap() - PI / 2.0).abs() < 1e-7);
        assert!(sym15().integrability_check().unwrap().is_finite());
        let tab = TabulatedMeasure::new(vec![-1.0, -0.5, 0.5, 1.0], vec![1.0, 1.0, 1.0, 1.0]).unwrap();
        let m = LevyModel::new(0.0, 0.0, MeasureSpec::Tabulated(tab)).unwrap();
        assert_eq!(m.integrability_check().unwrap(), Integrability::Infinite);
    }

    #[test]
    fn tabulated_psi_star_runs_maximum() {
        let tab = TabulatedMeasure::new(vec![0.9, 1.1], vec![1.0, 1.0]).unwrap();
        let m = LevyModel::new(0.0, 0.0, MeasureSpec::Tabulated(tab)).unwrap();
        // Re ψ oscillates for large ξ; ψ* is non-decreasing and dominates Re ψ.
        let mut prev = 0.0;
        for i in 1..40 {
            let r = 0.5 * i as f64;
            let v = m.psi_star(r).unwrap();
            assert!(v + 1e-12 >= prev);
            assert!(v + 1e-12 >= m.re_psi(r).unwrap());
            prev = v;
        }
    }
}
