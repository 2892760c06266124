//! Two-sided estimates for hitting times of points and intervals, stated as
//! constant-free comparators; the constants are reported, not assumed.

use std::f64::consts::E;

use crate::error::{LevyError, Result};
use crate::fluctuation::{renewal_pair, RenewalPair};
use crate::kernels::{h_sym, k_lambda, u_lambda};
use crate::levy_model::{LevyModel, MeasureSpec, WlscEstimate};
use crate::mc_engine::{estimate_hitting_tail, MCConfig, MCResult, Target};

/// `a` with `a ψ* ≤ Re ψ` and `b` with `|Im ψ| ≤ b Re ψ`, estimated on a
/// six-decade grid around ξ = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorConstants {
    pub a: f64,
    pub b: f64,
}

pub fn sector_constants(model: &LevyModel) -> Result<SectorConstants> {
    let grid: Vec<f64> = (0..=60).map(|i| 10f64.powf(-3.0 + i as f64 / 10.0)).collect();
    let mut a = f64::INFINITY;
    let mut ratios = Vec::with_capacity(grid.len());
    for &xi in &grid {
        let p = model.eval_exponent(xi)?;
        a = a.min(p.re / model.psi_star(xi)?);
        ratios.push((p.im / p.re).abs());
    }
    let b = ratios.iter().cloned().fold(0.0, f64::max);
    // Still growing at either end of the grid: no finite sector.
    let (first, last) = (ratios[0], ratios[ratios.len() - 1]);
    let grows_low = first >= b && first > 1.1 * ratios[10] && first > 1e-9;
    let grows_high = last >= b && last > 1.1 * ratios[ratios.len() - 11] && last > 1e-9;
    if !b.is_finite() || grows_low || grows_high {
        return Err(LevyError::AssumptionViolated(format!(
            "|Im ψ|/Re ψ is not bounded on the grid (sup so far {b:.4e})"
        )));
    }
    Ok(SectorConstants { a, b })
}

/// `[a/(4(1+b²)) H(1/r), 2π²(1+b²)/a H(1/r)]` with `r = (Re ψ)^{-1}(λ)`.
pub fn u_lambda_sandwich(model: &LevyModel, lambda: f64) -> Result<(f64, f64)> {
    if !(lambda > 0.0) {
        return Err(LevyError::Domain(format!("lambda must be positive, got {lambda}")));
    }
    let SectorConstants { a, b } = sector_constants(model)?;
    let r = model.inv_re_psi(lambda)?.value;
    let h = h_sym(model, 1.0 / r, 0.0)?.value;
    let k = 1.0 + b * b;
    Ok((a / (4.0 * k) * h, 2.0 * std::f64::consts::PI.powi(2) * k / a * h))
}

/// Outcome of [`verify_k_lower`].
#[derive(Debug, Clone, PartialEq)]
pub struct KLowerReport {
    /// `(x, min over λ of K^λ(x)/H(x))`.
    pub rows: Vec<(f64, f64)>,
    pub floor: f64,
    pub certified: bool,
}

impl KLowerReport {
    /// Certified on the side of the origin containing `x`.
    pub fn covers(&self, x: f64) -> bool {
        let same_side: Vec<_> = self.rows.iter().filter(|r| r.0 * x > 0.0).collect();
        !same_side.is_empty() && same_side.iter().all(|r| r.1 >= self.floor)
    }
}

pub const K_LOWER_FLOOR: f64 = 0.05;

/// `min_{λ ∈ h(x)·{1, 1/2, 1/4, 1/8}} K^λ(x)/H(x)` on the grid.
pub fn verify_k_lower(model: &LevyModel, x_grid: &[f64], floor: f64) -> Result<KLowerReport> {
    let mut rows = Vec::new();
    for &x in x_grid.iter().filter(|x| **x != 0.0) {
        let hx = model.concentration_h(x.abs())?;
        let big_h = h_sym(model, x, 0.0)?.value;
        let mut min = f64::INFINITY;
        for k in 0..4 {
            let lambda = hx / f64::from(1u32 << k);
            min = min.min(k_lambda(model, lambda, x)?.value / big_h);
        }
        rows.push((x, min));
    }
    let certified = !rows.is_empty() && rows.iter().all(|r| r.1 >= floor);
    Ok(KLowerReport { rows, floor, certified })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    SmallTime,
    LargeTime,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::SmallTime => "small_time",
            Regime::LargeTime => "large_time",
        }
    }
}

/// A comparator for `P^x(T > t)` with, once simulated, the Monte Carlo estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparatorReport {
    pub x: f64,
    pub r: f64,
    pub t: f64,
    pub regime: Regime,
    pub paper_comparator: f64,
    pub mc_estimate: f64,
    pub ci_halfwidth: f64,
    pub ratio: f64,
}

impl ComparatorReport {
    fn new(x: f64, r: f64, t: f64, regime: Regime, comparator: f64) -> Self {
        ComparatorReport {
            x,
            r,
            t,
            regime,
            paper_comparator: comparator.clamp(0.0, 1.0),
            mc_estimate: f64::NAN,
            ci_halfwidth: f64::NAN,
            ratio: f64::NAN,
        }
    }

    pub fn fill(&mut self, mc: &MCResult) {
        self.mc_estimate = mc.estimate;
        self.ci_halfwidth = mc.ci_halfwidth;
        self.ratio = mc.estimate / self.paper_comparator;
    }
}

/// Everything the comparators need, computed once per model.
#[derive(Debug, Clone)]
pub struct HittingContext {
    model: LevyModel,
    pub pair: RenewalPair,
    pub sector: SectorConstants,
    pub wlsc: WlscEstimate,
    pub k_lower: KLowerReport,
    /// `(H(1), α)` when `H(x) = H(1)|x|^{α−1}` exactly.
    h_scaling: Option<(f64, f64)>,
}

fn strictly_stable_index(model: &LevyModel) -> Option<f64> {
    if model.mean().is_none_or(|m| m.abs() > 1e-12) {
        return None;
    }
    match (model.measure(), model.sigma()) {
        (MeasureSpec::None, _) => Some(2.0),
        (MeasureSpec::Stable { alpha, .. }, 0.0) => Some(*alpha),
        _ => None,
    }
}

/// Default grid for the `K^λ ≳ H` certification.
pub fn default_k_grid() -> Vec<f64> {
    let pos = [0.1, 0.3, 1.0, 3.0, 10.0];
    pos.iter().flat_map(|&x| [x, -x]).collect()
}

impl HittingContext {
    pub fn new(model: &LevyModel) -> Result<Self> {
        Self::with_pair(model, renewal_pair(model)?)
    }

    pub fn with_pair(model: &LevyModel, pair: RenewalPair) -> Result<Self> {
        let h_scaling = match strictly_stable_index(model) {
            Some(alpha) => Some((h_sym(model, 1.0, 0.0)?.value, alpha)),
            None => None,
        };
        Ok(HittingContext {
            model: model.clone(),
            pair,
            sector: sector_constants(model)?,
            wlsc: model.wlsc_default()?,
            k_lower: verify_k_lower(model, &default_k_grid(), K_LOWER_FLOOR)?,
            h_scaling,
        })
    }

    pub fn model(&self) -> &LevyModel {
        &self.model
    }

    /// `H(x)`.
    pub fn h_kernel(&self, x: f64) -> Result<f64> {
        match self.h_scaling {
            Some((h1, alpha)) => Ok(h1 * x.abs().powf(alpha - 1.0)),
            None => Ok(h_sym(&self.model, x, 0.0)?.value),
        }
    }

    fn inv_h_at(&self, t: f64) -> Result<f64> {
        Ok(self.model.inv_h(1.0 / t)?.value)
    }

    fn require_wlsc(&self) -> Result<()> {
        if self.wlsc.alpha_hat > 1.0 {
            Ok(())
        } else {
            Err(LevyError::NotCertified(format!(
                "weak lower scaling index {:.4} does not exceed 1",
                self.wlsc.alpha_hat
            )))
        }
    }

    fn require_k_lower(&self, x: f64) -> Result<()> {
        if self.k_lower.covers(x) {
            Ok(())
        } else {
            Err(LevyError::NotCertified(format!(
                "K^λ ≥ {}·H not certified on the side of x = {x}",
                self.k_lower.floor
            )))
        }
    }

    /// `1 ∧ 4(e−1)/e · (1+b²)/a · H(x)/H(1/(Re ψ)^{-1}(1/t))`.
    pub fn t0_upper(&self, x: f64, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(LevyError::Domain(format!("t must be positive, got {t}")));
        }
        if x == 0.0 {
            return Ok(0.0);
        }
        let SectorConstants { a, b } = self.sector;
        let r = self.model.inv_re_psi(1.0 / t)?.value;
        let v = 4.0 * (E - 1.0) / E * (1.0 + b * b) / a * self.h_kernel(x)? / self.h_kernel(1.0 / r)?;
        Ok(v.min(1.0))
    }

    /// `1 ∧ H(x)/H(h^{-1}(1/t))`.
    pub fn t0_lower_comparator(&self, x: f64, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(LevyError::Domain(format!("t must be positive, got {t}")));
        }
        if x == 0.0 {
            return Ok(0.0);
        }
        self.require_k_lower(x)?;
        Ok((self.h_kernel(x)? / self.h_kernel(self.inv_h_at(t)?)?).min(1.0))
    }

    fn require_interval(&self, x: f64, r: f64, t: f64) -> Result<()> {
        if !(t > 0.0 && r > 0.0) {
            return Err(LevyError::Domain(format!("need t, R > 0, got t = {t}, R = {r}")));
        }
        if !(x > r) {
            return Err(LevyError::Domain(format!("the comparator needs x > R, got x = {x}, R = {r}")));
        }
        Ok(())
    }

    /// Small-time form `V̂(x−R)/V̂(h^{-1}(1/t))` (unclamped).
    pub fn small_time_form(&self, x: f64, r: f64, t: f64) -> Result<f64> {
        self.require_interval(x, r, t)?;
        Ok(self.pair.vhat(x - r) / self.pair.vhat(self.inv_h_at(t)?))
    }

    /// Large-time form `V̂(x−R)/V̂(x) · H(x)/H(h^{-1}(1/t))` (unclamped).
    pub fn large_time_form(&self, x: f64, r: f64, t: f64) -> Result<f64> {
        self.require_interval(x, r, t)?;
        let harmonic = self.pair.vhat(x - r) / self.pair.vhat(x);
        Ok(harmonic * self.h_kernel(x)? / self.h_kernel(self.inv_h_at(t)?)?)
    }

    /// Large-time form with `H(h^{-1}(1/t))` replaced by `t/h^{-1}(1/t)`.
    pub fn large_time_form_alt(&self, x: f64, r: f64, t: f64) -> Result<f64> {
        self.require_interval(x, r, t)?;
        let harmonic = self.pair.vhat(x - r) / self.pair.vhat(x);
        Ok(harmonic * self.h_kernel(x)? * self.inv_h_at(t)? / t)
    }

    /// Comparator for `P^x(T_{[−R,R]} > t)`, `x > R`.
    pub fn interval_comparator(&self, x: f64, r: f64, t: f64) -> Result<ComparatorReport> {
        self.require_interval(x, r, t)?;
        if !self.model.is_centered() && self.model.mean().is_none_or(|m| m.abs() > 1e-12) {
            return Err(LevyError::AssumptionViolated("interval comparator needs a centered model".into()));
        }
        self.require_wlsc()?;
        self.require_k_lower(x)?;
        let seam = 1.0 / self.model.concentration_h(r)?;
        let (regime, value) = if t < seam {
            (Regime::SmallTime, self.small_time_form(x, r, t)?)
        } else {
            (Regime::LargeTime, self.large_time_form(x, r, t)?)
        };
        Ok(ComparatorReport::new(x, r, t, regime, value))
    }

    /// Ratio of the two regime formulas at the seam `t = 1/h(R)`.
    pub fn seam_factor(&self, x: f64, r: f64) -> Result<f64> {
        let t = 1.0 / self.model.concentration_h(r)?;
        Ok(self.large_time_form(x, r, t)? / self.small_time_form(x, r, t)?)
    }

    /// Comparator for spectrally negative models on either side of `[−R, R]`.
    pub fn spectrally_negative_comparator(&self, x: f64, r: f64, t: f64) -> Result<ComparatorReport> {
        if !self.model.spectrally_negative() {
            return Err(LevyError::AssumptionViolated("the model has upward jumps".into()));
        }
        if !(t > 0.0 && r >= 0.0) {
            return Err(LevyError::Domain(format!("need t > 0, R ≥ 0, got t = {t}, R = {r}")));
        }
        if x.abs() <= r {
            return Err(LevyError::Domain(format!("start {x} lies inside [−{r}, {r}]")));
        }
        if self.model.mean().is_none_or(|m| m.abs() > 1e-12) {
            return Err(LevyError::AssumptionViolated("needs a centered model".into()));
        }
        self.require_wlsc()?;
        let s = self.inv_h_at(t)?;
        let value = if x > r {
            self.h_kernel(x - r)? / self.h_kernel(s)?
        } else {
            (x + r).abs() / s
        };
        let regime = if t < 1.0 / self.model.concentration_h(r.max(f64::MIN_POSITIVE))? {
            Regime::SmallTime
        } else {
            Regime::LargeTime
        };
        Ok(ComparatorReport::new(x, r, t, regime, value))
    }

    /// Comparators on `t_grid` filled with one batch of simulated paths.
    pub fn simulate_cells<F>(&self, x: f64, r: f64, t_grid: &[f64], cfg: &MCConfig, comparator: F) -> Result<Vec<ComparatorReport>>
    where
        F: Fn(&Self, f64, f64, f64) -> Result<ComparatorReport>,
    {
        let mut reports = t_grid
            .iter()
            .map(|&t| comparator(self, x, r, t))
            .collect::<Result<Vec<_>>>()?;
        let mc = estimate_hitting_tail(&self.model, x, Target::ball(r)?, t_grid, cfg)?;
        for (rep, m) in reports.iter_mut().zip(&mc) {
            rep.fill(m);
        }
        Ok(reports)
    }
}

/// Summary of Monte Carlo to comparator ratios for one starting point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandSummary {
    pub min_ratio: f64,
    pub max_ratio: f64,
}

impl BandSummary {
    pub fn of(reports: &[ComparatorReport]) -> Self {
        BandSummary {
            min_ratio: reports.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min),
            max_ratio: reports.iter().map(|r| r.ratio).fold(f64::NEG_INFINITY, f64::max),
        }
    }

    pub fn within(&self, lo: f64, hi: f64) -> bool {
        self.min_ratio >= lo && self.max_ratio <= hi
    }

    /// `max/min`: how far from constant the ratio is across t.
    pub fn spread(&self) -> f64 {
        self.max_ratio / self.min_ratio
    }
}

/// `u^λ(0)` together with its sandwich (convenience for reports).
pub fn u_lambda_with_sandwich(model: &LevyModel, lambda: f64) -> Result<(f64, f64, f64)> {
    let (lo, hi) = u_lambda_sandwich(model, lambda)?;
    Ok((lo, u_lambda(model, lambda, 0.0)?.value, hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy_model::preset;
    use crate::numerics::erf;

    #[test]
    fn sector_constants_of_presets() {
        let s = sector_constants(&LevyModel::brownian(1.0).unwrap()).unwrap();
        assert_eq!((s.a, s.b), (1.0, 0.0));
        let s = sector_constants(&preset("stable-specneg-1.5").unwrap()).unwrap();
        assert!((s.b - 1.0).abs() < 1e-10);
        let drifted = LevyModel::new(
            0.0,
            0.5,
            MeasureSpec::Stable {
                alpha: 1.5,
                c_u: 0.3,
                c_d: 0.3,
            },
        )
        .unwrap();
        assert!(matches!(sector_constants(&drifted), Err(LevyError::AssumptionViolated(_))));
    }

    #[test]
    fn resolvent_sandwich() {
        let (lo, u, hi) = u_lambda_with_sandwich(&LevyModel::brownian(1.0).unwrap(), 1.0).unwrap();
        assert!((lo - 0.25).abs() < 1e-8 && (u - 0.5).abs() < 1e-9);
        assert!((hi - 2.0 * std::f64::consts::PI.powi(2)).abs() < 1e-6);
        let (lo, u, hi) = u_lambda_with_sandwich(&preset("stable-sym-1.5").unwrap(), 1.0).unwrap();
        assert!(lo <= u && u <= hi);
    }

    #[test]
    fn brownian_point_envelope() {
        let ctx = HittingContext::new(&LevyModel::brownian(1.0).unwrap()).unwrap();
        let up = ctx.t0_upper(1.0, 100.0).unwrap();
        assert!((up - 4.0 * (E - 1.0) / E / 10.0).abs() < 1e-9);
        let lo = ctx.t0_lower_comparator(1.0, 100.0).unwrap();
        assert!((lo - 0.1).abs() < 1e-9);
        assert!(erf(1.0 / 20.0) <= up);
        assert_eq!(ctx.t0_upper(0.0, 1.0).unwrap(), 0.0);
        assert_eq!(ctx.t0_upper(1.0, 1e-9).unwrap(), 1.0);
    }

    #[test]
    fn stable_interval_comparator() {
        let ctx = HittingContext::new(&preset("stable-sym-1.5").unwrap()).unwrap();
        assert!(ctx.k_lower.certified);
        let seam = 1.0 / ctx.model().concentration_h(1.0).unwrap();
        let c = ctx.interval_comparator(2.0, 1.0, 0.1).unwrap();
        assert_eq!(c.regime, Regime::SmallTime);
        let expect = ctx.pair.vhat(1.0) / ctx.pair.vhat(ctx.model().inv_h(10.0).unwrap().value);
        assert!((c.paper_comparator - expect.min(1.0)).abs() < 1e-12);
        assert_eq!(ctx.interval_comparator(2.0, 1.0, seam).unwrap().regime, Regime::LargeTime);
        let f = ctx.seam_factor(2.0, 1.0).unwrap();
        assert!((1.0 / 8.0..=8.0).contains(&f), "{f}");
        let alt = ctx.large_time_form_alt(2.0, 1.0, 50.0).unwrap() / ctx.large_time_form(2.0, 1.0, 50.0).unwrap();
        assert!((1.0 / 8.0..=8.0).contains(&alt));
        assert_eq!(ctx.interval_comparator(100.0, 1.0, 0.01).unwrap().paper_comparator, 1.0);
        assert!(ctx.interval_comparator(0.5, 1.0, 1.0).is_err());
    }

    #[test]
    fn spectrally_negative_sides() {
        let ctx = HittingContext::new(&preset("stable-specneg-1.5").unwrap()).unwrap();
        let left = ctx.spectrally_negative_comparator(-2.0, 1.0, 1e3).unwrap();
        let s = ctx.model().inv_h(1e-3).unwrap().value;
        assert!((left.paper_comparator - 1.0 / s).abs() < 1e-12);
        assert_eq!(ctx.spectrally_negative_comparator(2.0, 1.0, 1e-6).unwrap().paper_comparator, 1.0);
        assert!(ctx.spectrally_negative_comparator(0.5, 1.0, 1.0).is_err());
        let sym = HittingContext::new(&preset("stable-sym-1.5").unwrap()).unwrap();
        assert!(sym.spectrally_negative_comparator(2.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn k_lower_floor_for_symmetric_stable() {
        let r = verify_k_lower(&preset("stable-sym-1.5").unwrap(), &[0.0, 0.5, 2.0], K_LOWER_FLOOR).unwrap();
        assert_eq!(r.rows.len(), 2);
        assert!(r.certified);
        assert!(r.rows.iter().all(|row| row.1 >= 0.25));
    }
}
