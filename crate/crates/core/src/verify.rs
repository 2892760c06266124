//! Named verification suites: closed-form oracles, property bands and
//! Monte Carlo cross-checks, each reported row by row.

use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::asymptotics::{
    c_of_alpha, im_re_limit, limit_ratio_c_i, nu_tail_asymptotic_check, point_hitting_asymptote, tail_constant,
    tail_constant_reduced,
};
use crate::error::{LevyError, Result};
use crate::fluctuation::{exit_right_bounds, renewal_pair, EXIT_LOWER_CONSTANT};
use crate::hitting::{BandSummary, HittingContext};
use crate::kernels::{h_sym, k_compensated, u_lambda};
use crate::levy_model::{preset, LevyModel};
use crate::mc_engine::{estimate_exit_right, estimate_hitting_tail, MCConfig, Target};
use crate::numerics::{erf, one_minus_cos_moment};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    BrownianClosedForms,
    StableKernels,
    TailConstants,
    ImReLimit,
    ResolventScaling,
    ExitProbability,
    IntervalSandwich,
    SpectrallyNegative,
    PointProxy,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::BrownianClosedForms,
        Suite::StableKernels,
        Suite::TailConstants,
        Suite::ImReLimit,
        Suite::ResolventScaling,
        Suite::ExitProbability,
        Suite::IntervalSandwich,
        Suite::SpectrallyNegative,
        Suite::PointProxy,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::BrownianClosedForms => "brownian-closed-forms",
            Suite::StableKernels => "stable-kernels",
            Suite::TailConstants => "tail-constants",
            Suite::ImReLimit => "im-re-limit",
            Suite::ResolventScaling => "resolvent-scaling",
            Suite::ExitProbability => "exit-probability",
            Suite::IntervalSandwich => "interval-sandwich",
            Suite::SpectrallyNegative => "spectrally-negative",
            Suite::PointProxy => "point-proxy",
        }
    }

    pub fn from_name(name: &str) -> Result<Suite> {
        Suite::ALL
            .iter()
            .copied()
            .find(|s| s.name() == name)
            .ok_or_else(|| LevyError::Config(format!("unknown suite '{name}'")))
    }

    /// Whether the suite simulates paths (and so depends on the seed).
    pub fn randomized(&self) -> bool {
        matches!(
            self,
            Suite::ExitProbability | Suite::IntervalSandwich | Suite::SpectrallyNegative | Suite::PointProxy
        )
    }
}

/// One verified quantity. `reference` is NaN for pure band checks.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub label: String,
    pub value: f64,
    pub reference: f64,
    pub lo: f64,
    pub hi: f64,
    pub pass: bool,
}

impl CheckRow {
    /// `|value − reference| ≤ tol·|reference|`.
    pub fn relative(label: impl Into<String>, value: f64, reference: f64, tol: f64) -> Self {
        let w = tol * reference.abs();
        Self::band_with_ref(label, value, reference, reference - w, reference + w)
    }

    pub fn band(label: impl Into<String>, value: f64, lo: f64, hi: f64) -> Self {
        Self::band_with_ref(label, value, f64::NAN, lo, hi)
    }

    fn band_with_ref(label: impl Into<String>, value: f64, reference: f64, lo: f64, hi: f64) -> Self {
        CheckRow {
            label: label.into(),
            value,
            reference,
            lo,
            hi,
            pass: value >= lo && value <= hi,
        }
    }

    /// A yes/no property; `value` is 1 when it holds.
    pub fn flag(label: impl Into<String>, holds: bool) -> Self {
        Self::band(label, if holds { 1.0 } else { 0.0 }, 1.0, 1.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteReport {
    pub suite: Suite,
    /// Seed of the simulated rows, if any.
    pub seed: Option<u64>,
    pub rows: Vec<CheckRow>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| !r.pass).count()
    }

    /// CSV body (no header); byte-stable for a given seed.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{:e},{:e},{:e},{:e},{}",
                self.suite.name(),
                r.label,
                r.value,
                r.reference,
                r.lo,
                r.hi,
                if r.pass { "pass" } else { "fail" }
            );
        }
        s
    }
}

pub const CSV_HEADER: &str = "suite,check,value,reference,lo,hi,status";

/// Simulation settings shared by the randomized suites.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    pub seed: u64,
    pub n_paths: usize,
    pub threads: Option<usize>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            seed: MCConfig::default().seed,
            n_paths: 20_000,
            threads: None,
        }
    }
}

impl VerifyOptions {
    fn mc(&self, dt: f64, t_max: f64) -> MCConfig {
        MCConfig {
            seed: self.seed,
            n_paths: self.n_paths,
            dt,
            t_max,
            threads: self.threads,
            ..MCConfig::default()
        }
    }
}

pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> Result<SuiteReport> {
    let rows = match suite {
        Suite::BrownianClosedForms => brownian_closed_forms()?,
        Suite::StableKernels => stable_kernels()?,
        Suite::TailConstants => tail_constants()?,
        Suite::ImReLimit => im_re()?,
        Suite::ResolventScaling => resolvent_scaling()?,
        Suite::ExitProbability => exit_probability(opts)?,
        Suite::IntervalSandwich => interval_sandwich(opts)?,
        Suite::SpectrallyNegative => spectrally_negative(opts)?,
        Suite::PointProxy => point_proxy(opts)?,
    };
    Ok(SuiteReport {
        suite,
        seed: suite.randomized().then_some(opts.seed),
        rows,
    })
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
        .collect()
}

fn brownian_closed_forms() -> Result<Vec<CheckRow>> {
    let m = LevyModel::brownian(1.0)?;
    let mut rows = Vec::new();
    for lambda in [0.25, 1.0, 4.0] {
        let u = u_lambda(&m, lambda, 0.0)?.value;
        rows.push(CheckRow::relative(format!("u^{lambda}(0)"), u, 0.5 / lambda.sqrt(), 1e-8));
    }
    for x in [0.5, 1.0, 2.0] {
        rows.push(CheckRow::relative(format!("H({x})"), h_sym(&m, x, 0.0)?.value, x, 1e-6));
        for y in [x, -x] {
            rows.push(CheckRow::relative(format!("K({y})"), k_compensated(&m, y)?.value, x / 2.0, 1e-6));
        }
    }
    rows.push(CheckRow::relative("C(2;0)", c_of_alpha(2.0, 0.0)?, 0.5, 1e-8));
    // t^{1/2} erf(x/(2√t)) → x/√π; at t = 1e8 the remainder is O(x²/t).
    let t: f64 = 1e8;
    for x in [0.5, 1.0, 2.0] {
        let exact = x / PI.sqrt();
        rows.push(CheckRow::relative(
            format!("point asymptote x={x}"),
            point_hitting_asymptote(&m, x)?,
            exact,
            1e-6,
        ));
        rows.push(CheckRow::relative(
            format!("sqrt(t) erf(x/2sqrt(t)) x={x} t=1e8"),
            t.sqrt() * erf(x / (2.0 * t.sqrt())),
            exact,
            1e-6,
        ));
    }
    Ok(rows)
}

fn stable_kernels() -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    for alpha in [1.2, 1.5, 1.8] {
        let m = LevyModel::stable_unit(alpha, 0.0)?;
        let h1 = h_sym(&m, 1.0, 0.0)?.value;
        rows.push(CheckRow::relative(
            format!("alpha={alpha} H(1)"),
            h1,
            2.0 / PI * one_minus_cos_moment(alpha)?,
            1e-5,
        ));
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for r in log_grid(1e-3, 1e3, 13) {
            let p = r * m.concentration_h(r)? * h_sym(&m, r, 0.0)?.value;
            lo = lo.min(p);
            hi = hi.max(p);
        }
        rows.push(CheckRow::band(format!("alpha={alpha} min r h(r) H(r)"), lo, 1.0 / 16.0, 16.0));
        rows.push(CheckRow::band(format!("alpha={alpha} max r h(r) H(r)"), hi, 1.0 / 16.0, 16.0));
    }
    Ok(rows)
}

fn tail_constants() -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    for alpha in [0.5, 1.0, 1.2, 1.5, 1.8] {
        rows.push(CheckRow::relative(
            format!("tail constant alpha={alpha}"),
            tail_constant(alpha)?,
            tail_constant_reduced(alpha)?,
            1e-10,
        ));
    }
    let cases = [
        ("stable-sym-1.5", vec![1.0, 10.0, 100.0], 0.02),
        ("stable-specneg-1.5", vec![1.0, 10.0, 100.0], 0.02),
        ("factorized-beta0.4-0.6", vec![1e2, 1e3, 1e4], 0.05),
    ];
    for (name, grid, band) in cases {
        let r = nu_tail_asymptotic_check(&preset(name)?, &grid, band)?
            .ok_or_else(|| LevyError::Unsupported(format!("{name} has no jumps")))?;
        rows.push(CheckRow::relative(
            format!("{name} tail ratio at t={:e}", grid[grid.len() - 1]),
            r.last_ratio(),
            r.predicted_constant,
            band,
        ));
        rows.push(CheckRow::flag(format!("{name} tail ratio converged"), r.converged));
    }
    Ok(rows)
}

fn im_re() -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    let sn = preset("stable-specneg-1.5")?;
    for xi in [1e-4, 1e-2, 1.0, 1e2, 1e4] {
        let p = sn.eval_exponent(xi)?;
        rows.push(CheckRow::relative(format!("specneg Im/Re at xi={xi:e}"), p.im / p.re, -1.0, 1e-10));
    }
    let f = preset("factorized-asym-1.5")?;
    let r = im_re_limit(&f)?;
    let at = r
        .curve
        .iter()
        .find(|p| (p.0 / 1e-4 - 1.0).abs() < 1e-9)
        .map(|p| p.1)
        .ok_or_else(|| LevyError::Domain("ξ = 1e-4 missing from the limit grid".into()))?;
    rows.push(CheckRow::relative("factorized-asym-1.5 Im/Re at xi=1e-4", at, 1.0 / 3.0, 0.02));
    rows.push(CheckRow::relative(
        "factorized-asym-1.5 predicted C_I",
        r.predicted_constant,
        1.0 / 3.0,
        1e-12,
    ));
    Ok(rows)
}

fn resolvent_scaling() -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    for name in ["stable-sym-1.5", "stable-specneg-1.5"] {
        let m = preset(name)?;
        let c = c_of_alpha(1.5, limit_ratio_c_i(&m)?)?;
        for lambda in [0.01, 1.0, 100.0] {
            let lhs = lambda * u_lambda(&m, lambda, 0.0)?.value;
            let rhs = m.inv_re_psi(lambda)?.value * c;
            rows.push(CheckRow::relative(format!("{name} lambda={lambda}"), lhs / rhs, 1.0, 1e-4));
        }
    }
    Ok(rows)
}

fn exit_probability(opts: &VerifyOptions) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    let bm = LevyModel::brownian(1.0)?;
    let pair = renewal_pair(&bm)?;
    let est = estimate_exit_right(&bm, 1.0, 4.0, &opts.mc(0.01, 1e3))?;
    let bound = exit_right_bounds(&bm, &pair, 1.0, 4.0, EXIT_LOWER_CONSTANT)?;
    rows.push(CheckRow::band(
        "brownian P^1(exit (0,4) at top)",
        est.estimate,
        0.25 - 3.0 * est.ci_halfwidth,
        0.25 + 3.0 * est.ci_halfwidth,
    ));
    rows.push(CheckRow::band(
        "brownian estimate - 3CI vs V(x)/V(R)",
        est.estimate - 3.0 * est.ci_halfwidth,
        0.0,
        bound.upper,
    ));
    let m = preset("stable-sym-1.5")?;
    let pair = renewal_pair(&m)?;
    for r in [1.0, 4.0] {
        for frac in [0.25, 0.5, 0.75] {
            let x = frac * r;
            let est = estimate_exit_right(&m, x, r, &opts.mc(0.01, 1e3))?;
            let b = exit_right_bounds(&m, &pair, x, r, EXIT_LOWER_CONSTANT)?;
            rows.push(CheckRow::band(
                format!("stable-sym-1.5 x={x} R={r} estimate vs V^(x)/V^(R) + 3CI"),
                est.estimate,
                b.lower,
                b.upper + 3.0 * est.ci_halfwidth,
            ));
        }
    }
    Ok(rows)
}

fn interval_sandwich(opts: &VerifyOptions) -> Result<Vec<CheckRow>> {
    let m = preset("stable-sym-1.5")?;
    let ctx = HittingContext::new(&m)?;
    let r = 1.0;
    let seam = 1.0 / m.concentration_h(r)?;
    let t_grid = log_grid(0.1 * seam, 100.0 * seam, 7);
    let cfg = opts.mc(0.05, t_grid[t_grid.len() - 1]);
    let mut rows = Vec::new();
    for x in [1.5, 2.0, 4.0, 8.0] {
        let reports = ctx.simulate_cells(x, r, &t_grid, &cfg, |c, x, r, t| c.interval_comparator(x, r, t))?;
        for rep in &reports {
            rows.push(CheckRow::band(
                format!("x={x} t={:.4e} {} MC/comparator", rep.t, rep.regime.as_str()),
                rep.ratio,
                1.0 / 16.0,
                16.0,
            ));
        }
        let s = BandSummary::of(&reports);
        rows.push(CheckRow::band(format!("x={x} ratio spread across t"), s.spread(), 1.0, 4.0));
    }
    Ok(rows)
}

fn spectrally_negative(opts: &VerifyOptions) -> Result<Vec<CheckRow>> {
    let m = preset("stable-specneg-1.5")?;
    let ctx = HittingContext::new(&m)?;
    let t_grid = log_grid(0.1, 100.0, 7);
    let cfg = opts.mc(0.05, 100.0);
    let mut rows = Vec::new();
    for x in [-2.0, 2.0] {
        let reports = ctx.simulate_cells(x, 1.0, &t_grid, &cfg, |c, x, r, t| {
            c.spectrally_negative_comparator(x, r, t)
        })?;
        for rep in &reports {
            rows.push(CheckRow::band(
                format!("x={x} t={:.4e} MC/comparator", rep.t),
                rep.ratio,
                1.0 / 16.0,
                16.0,
            ));
        }
    }
    Ok(rows)
}

fn point_proxy(opts: &VerifyOptions) -> Result<Vec<CheckRow>> {
    let m = preset("stable-sym-1.5")?;
    let (x, t) = (1.0, 50.0);
    let predicted = point_hitting_asymptote(&m, x)?;
    let scale = t * m.inv_re_psi(1.0 / t)?.value;
    let mut rows = Vec::new();
    let mut prev = f64::NEG_INFINITY;
    let mut monotone = true;
    for eps in [0.05, 0.02, 0.01] {
        let cfg = MCConfig {
            point_proxy_eps: eps,
            ..opts.mc(0.05, t)
        };
        let p = estimate_hitting_tail(&m, x, Target::ball(eps)?, &[t], &cfg)?.remove(0);
        let q = scale * p.estimate;
        rows.push(CheckRow::band(
            format!("eps={eps} t (Re psi)^-1(1/t) P(T>t)"),
            q,
            0.0,
            f64::INFINITY,
        ));
        monotone &= q > prev;
        prev = q;
    }
    rows.push(CheckRow::flag("increasing as eps shrinks", monotone));
    rows.push(CheckRow::relative("eps=0.01 vs point asymptote", prev, predicted, 0.25));
    Ok(rows)
}
