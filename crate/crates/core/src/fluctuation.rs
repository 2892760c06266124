//! Ladder-height renewal functions and what they control: the Green function
//! of the half-line and the probability of leaving `(0, R)` upwards.
//!
//! For strictly stable models (and Brownian motion) the pair is explicit.
//! With `ψ(ξ) = c|ξ|^α(1 − i tan θ sgn ξ)`, `θ = πα(ρ − 1/2)`, the Wiener–Hopf
//! split `ψ(ξ) = κ(−iξ)κ̂(iξ)` with `κ(λ) = κ̂(λ)·λ^{αρ−αρ̂} = λ^{αρ}/s`,
//! `s = √(cos θ / c)`, gives
//! `V(x) = s x^{αρ}/Γ(1+αρ)` and `V̂(x) = s x^{αρ̂}/Γ(1+αρ̂)`.
//! Other models get Monte Carlo estimates of both functions.

use std::f64::consts::PI;

use crate::error::{LevyError, Result};
use crate::levy_model::{LevyModel, MeasureSpec};
use crate::mc_engine::{ladder_renewal_estimate, MCConfig};
use crate::numerics::{gamma, integrate_from_zero, stable_cos_integral, ToleranceProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    ClosedForm,
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq)]
enum Shape {
    Power {
        v: f64,
        a: f64,
        vh: f64,
        ah: f64,
    },
    /// Log-log tables on a common grid; extended by the end slopes.
    Table {
        ln_x: Vec<f64>,
        ln_v: Vec<f64>,
        ln_vh: Vec<f64>,
    },
}

/// Renewal functions `V` (ascending ladder) and `V̂` (descending ladder).
#[derive(Debug, Clone, PartialEq)]
pub struct RenewalPair {
    pub provenance: Provenance,
    /// Positivity parameter `P(X_t > 0)` for stable models.
    pub rho: Option<f64>,
    shape: Shape,
}

fn table_eval(ln_x: &[f64], ln_f: &[f64], x: f64) -> (f64, f64) {
    let lx = x.ln();
    let n = ln_x.len();
    let i = match ln_x.iter().position(|&g| g > lx) {
        Some(0) => 0,
        Some(i) => i - 1,
        None => n - 2,
    }
    .min(n - 2);
    let slope = (ln_f[i + 1] - ln_f[i]) / (ln_x[i + 1] - ln_x[i]);
    let value = (ln_f[i] + slope * (lx - ln_x[i])).exp();
    (value, slope)
}

impl RenewalPair {
    fn eval(&self, x: f64, hat: bool) -> (f64, f64) {
        if !(x > 0.0) {
            return (0.0, 0.0);
        }
        match &self.shape {
            Shape::Power { v, a, vh, ah } => {
                let (k, p) = if hat { (*vh, *ah) } else { (*v, *a) };
                let val = k * x.powf(p);
                (val, p)
            }
            Shape::Table { ln_x, ln_v, ln_vh } => table_eval(ln_x, if hat { ln_vh } else { ln_v }, x),
        }
    }

    pub fn v(&self, x: f64) -> f64 {
        self.eval(x, false).0
    }

    pub fn vhat(&self, x: f64) -> f64 {
        self.eval(x, true).0
    }

    pub fn v_prime(&self, x: f64) -> f64 {
        let (val, slope) = self.eval(x, false);
        if x > 0.0 {
            val * slope / x
        } else {
            0.0
        }
    }

    pub fn vhat_prime(&self, x: f64) -> f64 {
        let (val, slope) = self.eval(x, true);
        if x > 0.0 {
            val * slope / x
        } else {
            0.0
        }
    }

    /// Power-law exponents `(αρ, αρ̂)` of a closed-form pair.
    pub fn exponents(&self) -> Option<(f64, f64)> {
        match self.shape {
            Shape::Power { a, ah, .. } => Some((a, ah)),
            Shape::Table { .. } => None,
        }
    }
}

fn require_centered(model: &LevyModel) -> Result<()> {
    match model.mean() {
        Some(m) if m.abs() <= 1e-12 => Ok(()),
        _ => Err(LevyError::AssumptionViolated(
            "renewal functions are provided for centered models only".into(),
        )),
    }
}

/// Positivity parameter of a strictly stable law with skewness β.
pub fn stable_rho(alpha: f64, beta: f64) -> f64 {
    0.5 + (beta * (PI * alpha / 2.0).tan()).atan() / (PI * alpha)
}

fn power_pair(alpha: f64, c: f64, rho: f64) -> RenewalPair {
    let theta = PI * alpha * (rho - 0.5);
    let s = (theta.cos() / c).sqrt();
    let (a, ah) = (alpha * rho, alpha * (1.0 - rho));
    RenewalPair {
        provenance: Provenance::ClosedForm,
        rho: Some(rho),
        shape: Shape::Power {
            v: s / gamma(1.0 + a),
            a,
            vh: s / gamma(1.0 + ah),
            ah,
        },
    }
}

/// Default Monte Carlo settings for non-stable pairs.
pub fn renewal_mc_config() -> MCConfig {
    MCConfig {
        seed: 0x5eed_1ad0,
        n_paths: 400,
        dt: 1.0,
        t_max: 1.0,
        ..MCConfig::default()
    }
}

/// Closed form for Brownian and strictly stable models, Monte Carlo
/// (with [`renewal_mc_config`]) on `[0.1, 10]` otherwise; outside that range
/// the table is extended by its end slopes.
pub fn renewal_pair(model: &LevyModel) -> Result<RenewalPair> {
    require_centered(model)?;
    match (model.measure(), model.sigma()) {
        (MeasureSpec::None, s) => Ok(power_pair(2.0, s * s, 0.5)),
        (MeasureSpec::Stable { alpha, c_u, c_d }, 0.0) => {
            let c = (c_u + c_d) * stable_cos_integral(*alpha)?;
            let beta = (c_u - c_d) / (c_u + c_d);
            Ok(power_pair(*alpha, c, stable_rho(*alpha, beta)))
        }
        _ => {
            let grid: Vec<f64> = (-4..=4).map(|k| 10f64.powf(k as f64 / 4.0)).collect();
            renewal_pair_mc(model, &grid, &renewal_mc_config())
        }
    }
}

/// Ladder-record estimates of `V̂` (from the model) and `V` (from its dual).
///
/// The local-time normalization is not identifiable from ladder counts; it is
/// fixed by `V(x₀) = V̂(x₀) = h(x₀)^{-1/2}` at the geometric centre `x₀` of
/// the grid, which makes `h·V·V̂ = 1` there.
pub fn renewal_pair_mc(model: &LevyModel, x_grid: &[f64], cfg: &MCConfig) -> Result<RenewalPair> {
    require_centered(model)?;
    let vh = ladder_renewal_estimate(model, x_grid, cfg)?;
    let v = ladder_renewal_estimate(&model.dual()?, x_grid, cfg)?;
    let ln_x: Vec<f64> = vh.x.iter().map(|x| x.ln()).collect();
    let pivot = ln_x.len() / 2;
    let x0 = vh.x[pivot];
    let anchor = model.concentration_h(x0)?.powf(-0.5);
    let norm = |vals: &[f64]| -> Vec<f64> {
        let k = anchor / vals[pivot];
        vals.iter().map(|v| (v * k).ln()).collect()
    };
    Ok(RenewalPair {
        provenance: Provenance::MonteCarlo,
        rho: None,
        shape: Shape::Table {
            ln_v: norm(&v.value),
            ln_vh: norm(&vh.value),
            ln_x,
        },
    })
}

fn green_tol() -> ToleranceProfile {
    ToleranceProfile {
        rel_tol: 1e-10,
        abs_tol: 1e-14,
        max_subdivisions: 2000,
    }
}

/// Green function of the half-line `(0, ∞)`:
/// `∫_0^x V̂′(u)V′(y−x+u) du` for `x ≤ y`, and the dual formula for `y < x`.
pub fn green_halfline(pair: &RenewalPair, x: f64, y: f64) -> Result<f64> {
    if !(x > 0.0 && y > 0.0) {
        return Err(LevyError::Domain(format!("Green function needs x, y > 0, got {x}, {y}")));
    }
    let r = if x <= y {
        integrate_from_zero(|u| pair.vhat_prime(u) * pair.v_prime(y - x + u), x, &green_tol())?
    } else {
        integrate_from_zero(|u| pair.v_prime(u) * pair.vhat_prime(x - y + u), y, &green_tol())?
    };
    Ok(r.value.max(0.0))
}

/// One row `(x, y_or_R, value, comparator, ratio)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioRow {
    pub x: f64,
    pub y: f64,
    pub value: f64,
    pub comparator: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioReport {
    pub rows: Vec<RatioRow>,
    pub min_ratio: f64,
    pub max_ratio: f64,
}

impl RatioReport {
    fn from_rows(rows: Vec<RatioRow>) -> Self {
        let min_ratio = rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
        let max_ratio = rows.iter().map(|r| r.ratio).fold(f64::NEG_INFINITY, f64::max);
        RatioReport {
            rows,
            min_ratio,
            max_ratio,
        }
    }

    pub fn within(&self, lo: f64, hi: f64) -> bool {
        !self.rows.is_empty() && self.min_ratio >= lo && self.max_ratio <= hi
    }
}

/// `G(x, y)` against `V̂(x)V′(y)` (x ≤ y) or `V̂′(x)V(y)` (y < x) on `grid × grid`.
pub fn green_comparator_check(pair: &RenewalPair, grid: &[f64]) -> Result<RatioReport> {
    let mut rows = Vec::with_capacity(grid.len() * grid.len());
    for &x in grid {
        for &y in grid {
            let value = green_halfline(pair, x, y)?;
            let comparator = if x <= y {
                pair.vhat(x) * pair.v_prime(y)
            } else {
                pair.vhat_prime(x) * pair.v(y)
            };
            rows.push(RatioRow {
                x,
                y,
                value,
                comparator,
                ratio: value / comparator,
            });
        }
    }
    Ok(RatioReport::from_rows(rows))
}

/// `x V′(x)/V(x)` and `x V̂′(x)/V̂(x)` on the grid.
pub fn v_ratio_check(pair: &RenewalPair, grid: &[f64]) -> Result<(RatioReport, RatioReport)> {
    if grid.iter().any(|x| !(*x > 0.0)) {
        return Err(LevyError::Domain("grid must be positive".into()));
    }
    let rows = |f: &dyn Fn(f64) -> f64, df: &dyn Fn(f64) -> f64| {
        grid.iter()
            .map(|&x| {
                let (value, comparator) = (x * df(x), f(x));
                RatioRow {
                    x,
                    y: x,
                    value,
                    comparator,
                    ratio: value / comparator,
                }
            })
            .collect::<Vec<_>>()
    };
    Ok((
        RatioReport::from_rows(rows(&|x| pair.v(x), &|x| pair.v_prime(x))),
        RatioReport::from_rows(rows(&|x| pair.vhat(x), &|x| pair.vhat_prime(x))),
    ))
}

/// Default constant of the lower exit bound.
pub const EXIT_LOWER_CONSTANT: f64 = 1.0 / 16.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExitBounds {
    pub lower: f64,
    pub upper: f64,
}

/// `c V̂(x)/V̂(R) ≤ P^x(leave (0,R) through the top) ≤ V̂(x)/V̂(R)`.
pub fn exit_right_bounds(model: &LevyModel, pair: &RenewalPair, x: f64, r: f64, c: f64) -> Result<ExitBounds> {
    if !(r > 0.0 && x > 0.0 && x < r) {
        return Err(LevyError::Domain(format!("need 0 < x < R, got x = {x}, R = {r}")));
    }
    require_centered(model)?;
    let w = model.wlsc_default()?;
    if !(w.alpha_hat > 1.0) {
        return Err(LevyError::NotCertified(format!(
            "weak lower scaling index {:.4} does not exceed 1",
            w.alpha_hat
        )));
    }
    let upper = (pair.vhat(x) / pair.vhat(r)).min(1.0);
    Ok(ExitBounds {
        lower: c * upper,
        upper,
    })
}

/// `h(R) V(R) V̂(R)`.
pub fn concentration_product(model: &LevyModel, pair: &RenewalPair, r: f64) -> Result<f64> {
    Ok(model.concentration_h(r)? * pair.v(r) * pair.vhat(r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy_model::preset;

    fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
            .collect()
    }

    #[test]
    fn brownian_pair_and_green() {
        let m = LevyModel::brownian(1.0).unwrap();
        let p = renewal_pair(&m).unwrap();
        assert_eq!(p.rho, Some(0.5));
        assert!((p.v(3.0) - 3.0).abs() < 1e-12 && (p.vhat(3.0) - 3.0).abs() < 1e-12);
        assert!((green_halfline(&p, 1.0, 2.0).unwrap() - 1.0).abs() < 1e-10);
        assert!((green_halfline(&p, 3.0, 2.0).unwrap() - 2.0).abs() < 1e-10);
        let r = green_comparator_check(&p, &[0.5, 1.0, 4.0]).unwrap();
        assert!(r.within(1.0 - 1e-9, 1.0 + 1e-9));
        let b = exit_right_bounds(&m, &p, 1.0, 4.0, EXIT_LOWER_CONSTANT).unwrap();
        assert!((b.upper - 0.25).abs() < 1e-12);
    }

    #[test]
    fn green_function_scales_with_sigma() {
        let m = LevyModel::brownian(2.0).unwrap();
        let p = renewal_pair(&m).unwrap();
        // generator σ² d²/dx²: G = (x ∧ y)/σ²
        assert!((green_halfline(&p, 1.0, 3.0).unwrap() - 0.25).abs() < 1e-10);
    }

    #[test]
    fn stable_exponents() {
        let p = renewal_pair(&preset("stable-sym-1.5").unwrap()).unwrap();
        assert_eq!(p.exponents(), Some((0.75, 0.75)));
        let p = renewal_pair(&preset("stable-specneg-1.5").unwrap()).unwrap();
        let (a, ah) = p.exponents().unwrap();
        assert!((p.rho.unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert!((a - 1.0).abs() < 1e-12 && (ah - 0.5).abs() < 1e-12);
        let (rv, rvh) = v_ratio_check(&p, &[0.1, 1.0, 10.0]).unwrap();
        assert!(rv.within(1.0 - 1e-12, 1.0 + 1e-12));
        assert!(rvh.within(0.5 - 1e-12, 0.5 + 1e-12));
    }

    #[test]
    fn stable_green_symmetry_and_band() {
        let m = preset("stable-sym-1.5").unwrap();
        let p = renewal_pair(&m).unwrap();
        let g1 = green_halfline(&p, 0.7, 2.0).unwrap();
        let g2 = green_halfline(&p, 2.0, 0.7).unwrap();
        assert!((g1 - g2).abs() < 1e-8 * g1);
        let r = green_comparator_check(&p, &log_grid(0.1, 10.0, 6)).unwrap();
        assert!(r.within(1.0 / 8.0, 8.0), "{} {}", r.min_ratio, r.max_ratio);
        let b = exit_right_bounds(&m, &p, 1.0, 16.0, EXIT_LOWER_CONSTANT).unwrap();
        assert!((b.upper - 0.125).abs() < 1e-12);
    }

    #[test]
    fn concentration_product_band() {
        for name in ["brownian", "stable-sym-1.2", "stable-sym-1.5", "stable-sym-1.8", "stable-specneg-1.5"] {
            let m = preset(name).unwrap();
            let p = renewal_pair(&m).unwrap();
            for r in log_grid(0.01, 100.0, 9) {
                let v = concentration_product(&m, &p, r).unwrap();
                assert!((1.0 / 16.0..=16.0).contains(&v), "{name} {r}: {v}");
            }
        }
    }

    #[test]
    fn refuses_drift_and_bad_domain() {
        let m = LevyModel::new(1.0, 0.5, MeasureSpec::None).unwrap();
        assert!(renewal_pair(&m).is_err());
        let b = LevyModel::brownian(1.0).unwrap();
        let p = renewal_pair(&b).unwrap();
        assert!(green_halfline(&p, 0.0, 1.0).is_err());
        assert!(exit_right_bounds(&b, &p, 5.0, 4.0, 0.1).is_err());
        assert_eq!(p.v(-1.0), 0.0);
    }

    #[test]
    fn monte_carlo_pair_for_factorized_model() {
        let m = preset("factorized-asym-1.5").unwrap();
        let grid = log_grid(0.1, 10.0, 5);
        let cfg = MCConfig {
            n_paths: 200,
            ..renewal_mc_config()
        };
        let p = renewal_pair_mc(&m, &grid, &cfg).unwrap();
        assert_eq!(p.provenance, Provenance::MonteCarlo);
        let (rv, rvh) = v_ratio_check(&p, &grid).unwrap();
        assert!(rv.within(0.1, 10.0) && rvh.within(0.1, 10.0));
        for w in grid.windows(2) {
            assert!(p.v(w[1]) >= p.v(w[0]) && p.vhat(w[1]) >= p.vhat(w[0]));
        }
    }
}
