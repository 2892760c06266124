//! Adaptive Gauss–Kronrod quadrature on finite intervals and dyadic-panel
//! summation for improper integrals.
//!
//! Improper ends (an infinite upper limit, or an integrable algebraic
//! singularity at the lower limit) are handled by summing geometric panels
//! and extrapolating the remainder from the panel ratio. For an integrand
//! with a power-law envelope the panel contributions form a geometric
//! sequence, so the extrapolated remainder is exact up to the subleading
//! corrections of the envelope.

use crate::error::{LevyError, Result};

/// Result of a numerical integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
}

impl QuadratureResult {
    pub(crate) fn zero() -> Self {
        QuadratureResult {
            value: 0.0,
            abs_error_estimate: 0.0,
            evaluations: 1,
        }
    }

    pub(crate) fn add(&mut self, other: QuadratureResult) {
        self.value += other.value;
        self.abs_error_estimate += other.abs_error_estimate;
        self.evaluations += other.evaluations;
    }

    pub(crate) fn scaled(self, factor: f64) -> Self {
        QuadratureResult {
            value: self.value * factor,
            abs_error_estimate: self.abs_error_estimate * factor.abs(),
            evaluations: self.evaluations,
        }
    }
}

/// Accuracy targets for a quadrature call.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceProfile {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for ToleranceProfile {
    fn default() -> Self {
        ToleranceProfile {
            rel_tol: 1e-8,
            abs_tol: 1e-12,
            max_subdivisions: 2000,
        }
    }
}

impl ToleranceProfile {
    pub fn new(rel_tol: f64, abs_tol: f64, max_subdivisions: usize) -> Result<Self> {
        if !(rel_tol > 0.0) || !(abs_tol > 0.0) {
            return Err(LevyError::Domain(
                "tolerances must be strictly positive".into(),
            ));
        }
        Ok(ToleranceProfile {
            rel_tol,
            abs_tol,
            max_subdivisions: max_subdivisions.max(1),
        })
    }

    pub(crate) fn target(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }

    /// A tighter profile used for sub-integrals of a composite rule.
    pub(crate) fn tightened(&self, factor: f64) -> Self {
        ToleranceProfile {
            rel_tol: self.rel_tol * factor,
            abs_tol: self.abs_tol * factor,
            max_subdivisions: self.max_subdivisions,
        }
    }
}

const XGK: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_22,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_725,
    0.054_755_896_574_351_995,
    0.075_039_674_810_919_96,
    0.093_125_454_583_697_6,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_84,
    0.134_709_217_311_473_34,
    0.142_775_938_577_060_09,
    0.147_739_104_901_338_49,
    0.149_445_554_002_916_9,
];

// Gauss weights for the nodes XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_35,
    0.295_524_224_714_752_87,
];

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        let min_err = 50.0 * f64::EPSILON * res_abs;
        if min_err > scaled {
            scaled = min_err;
        }
    }
    scaled
}

/// One 21-point Gauss–Kronrod panel: (value, error estimate).
fn gk21<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut res_k = fc * WGK[10];
    let mut res_g = 0.0;
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let err = (res_k - res_g) * half;
    let value = res_k * half;
    let err = rescale_error(err, res_abs * half.abs(), res_asc * half.abs());
    (value, err)
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

/// Globally adaptive Gauss–Kronrod integration over a finite interval.
///
/// Returns `QuadratureFailure` carrying the partial value when the error
/// target is not met within `max_subdivisions` bisections.
pub fn integrate_finite<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: &ToleranceProfile,
) -> Result<QuadratureResult> {
    if a == b {
        return Ok(QuadratureResult::zero());
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(LevyError::Domain("integrate_finite needs finite bounds".into()));
    }
    let (v0, e0) = gk21(&f, a, b);
    let mut evaluations = 21;
    let mut segments = vec![Segment {
        a,
        b,
        value: v0,
        error: e0,
    }];
    let mut total = v0;
    let mut total_err = e0;
    let mut iterations = 0;
    while total_err > tol.target(total) {
        if !total.is_finite() {
            return Err(LevyError::NonIntegrable(format!(
                "non-finite partial integral on [{a}, {b}]"
            )));
        }
        if iterations >= tol.max_subdivisions {
            return Err(LevyError::QuadratureFailure {
                partial: total,
                error: total_err,
            });
        }
        iterations += 1;
        let (idx, _) = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("non-empty segment list");
        let seg = segments.swap_remove(idx);
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a.min(seg.b) || mid >= seg.a.max(seg.b) {
            // Interval collapsed to machine precision; accept what we have.
            segments.push(seg);
            break;
        }
        let (v1, e1) = gk21(&f, seg.a, mid);
        let (v2, e2) = gk21(&f, mid, seg.b);
        evaluations += 42;
        total += v1 + v2 - seg.value;
        segments.push(Segment {
            a: seg.a,
            b: mid,
            value: v1,
            error: e1,
        });
        segments.push(Segment {
            a: mid,
            b: seg.b,
            value: v2,
            error: e2,
        });
        total_err = segments.iter().map(|s| s.error).sum();
    }
    // Re-sum to limit drift from the incremental updates.
    let value: f64 = segments.iter().map(|s| s.value).sum();
    Ok(QuadratureResult {
        value,
        abs_error_estimate: total_err,
        evaluations,
    })
}

/// Shared bookkeeping for a sequence of geometric panels whose remainder is
/// extrapolated with Aitken's delta-squared on the partial sums.
struct PanelSeries {
    partial: f64,
    last_contrib: Option<f64>,
    prev_ratio: Option<f64>,
    prev_extrapolated: Option<f64>,
    err: f64,
    evaluations: usize,
    growing: usize,
}

enum PanelStep {
    Continue,
    Done(QuadratureResult),
}

impl PanelSeries {
    fn new() -> Self {
        PanelSeries {
            partial: 0.0,
            last_contrib: None,
            prev_ratio: None,
            prev_extrapolated: None,
            err: 0.0,
            evaluations: 0,
            growing: 0,
        }
    }

    fn push(&mut self, panel: QuadratureResult, index: usize, tol: &ToleranceProfile) -> Result<PanelStep> {
        self.partial += panel.value;
        self.err += panel.abs_error_estimate;
        self.evaluations += panel.evaluations;
        let c = panel.value;
        let target = tol.target(self.partial);
        let mut step = PanelStep::Continue;
        if let Some(prev) = self.last_contrib {
            if c.abs() <= 1e-3 * target && prev.abs() <= 1e-2 * target {
                step = PanelStep::Done(QuadratureResult {
                    value: self.partial,
                    abs_error_estimate: self.err + c.abs() + prev.abs(),
                    evaluations: self.evaluations,
                });
            } else if prev != 0.0 {
                let r = c / prev;
                if r.abs() >= 0.999 {
                    self.growing += 1;
                } else {
                    self.growing = 0;
                }
                if self.growing >= 12 {
                    return Err(LevyError::NonIntegrable(format!(
                        "panel contributions do not decay (ratio {r:.4})"
                    )));
                }
                if r > 0.0 && r < 0.995 {
                    let extrapolated = self.partial + c * r / (1.0 - r);
                    let remainder = (c * r / (1.0 - r)).abs();
                    if let (Some(prev_r), Some(prev_x)) = (self.prev_ratio, self.prev_extrapolated) {
                        let drift = (extrapolated - prev_x).abs();
                        let ratio_stable = (r - prev_r).abs() < 0.02 * (1.0 - r).max(0.01);
                        if index >= 4 && ratio_stable && drift <= 0.5 * tol.target(extrapolated) {
                            let tail_err = drift + remainder * (r - prev_r).abs() / (1.0 - r);
                            step = PanelStep::Done(QuadratureResult {
                                value: extrapolated,
                                abs_error_estimate: self.err + tail_err,
                                evaluations: self.evaluations,
                            });
                        }
                    }
                    self.prev_extrapolated = Some(extrapolated);
                } else {
                    self.prev_extrapolated = None;
                }
                self.prev_ratio = Some(r);
            }
        }
        self.last_contrib = Some(c);
        Ok(step)
    }

    fn exhausted(&self) -> Result<QuadratureResult> {
        let last = self.last_contrib.unwrap_or(0.0).abs();
        if let Some(x) = self.prev_extrapolated {
            let err = self.err + (x - self.partial).abs() * 0.1 + last;
            return Err(LevyError::QuadratureFailure {
                partial: x,
                error: err,
            });
        }
        Err(LevyError::QuadratureFailure {
            partial: self.partial,
            error: self.err + last,
        })
    }
}

const MAX_PANELS: usize = 400;

/// `∫_a^∞ f`, summing panels of doubling width starting with `first_width`
/// and extrapolating the tail from the panel ratio.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    first_width: f64,
    tol: &ToleranceProfile,
) -> Result<QuadratureResult> {
    if !(first_width > 0.0) || !a.is_finite() {
        return Err(LevyError::Domain("bad tail integration setup".into()));
    }
    let panel_tol = tol.tightened(0.1);
    let mut series = PanelSeries::new();
    let mut lo = a;
    let mut width = first_width;
    for index in 0..MAX_PANELS {
        let hi = lo + width;
        let panel = integrate_finite(&f, lo, hi, &panel_tol).or_else(accept_partial)?;
        if let PanelStep::Done(res) = series.push(panel, index, tol)? {
            return Ok(res);
        }
        lo = hi;
        width *= 2.0;
        if !hi.is_finite() {
            break;
        }
    }
    series.exhausted()
}

/// `∫_0^b f` for integrands with an integrable algebraic singularity (or a
/// fine internal scale) at the origin, summing panels `[b 2^{-j-1}, b 2^{-j}]`.
pub fn integrate_from_zero<F: Fn(f64) -> f64>(
    f: F,
    b: f64,
    tol: &ToleranceProfile,
) -> Result<QuadratureResult> {
    integrate_from_zero_with_floor(f, b, 0.0, tol)
}

/// As [`integrate_from_zero`], but never stops before the panels have
/// reached below `floor` (a known internal scale of the integrand).
pub fn integrate_from_zero_with_floor<F: Fn(f64) -> f64>(
    f: F,
    b: f64,
    floor: f64,
    tol: &ToleranceProfile,
) -> Result<QuadratureResult> {
    if !(b > 0.0) {
        return Err(LevyError::Domain("integrate_from_zero needs b > 0".into()));
    }
    let panel_tol = tol.tightened(0.1);
    let mut series = PanelSeries::new();
    let mut hi = b;
    for index in 0..MAX_PANELS {
        let lo = 0.5 * hi;
        if lo <= f64::MIN_POSITIVE * 1e10 {
            break;
        }
        let panel = integrate_finite(&f, lo, hi, &panel_tol).or_else(accept_partial)?;
        if let PanelStep::Done(res) = series.push(panel, index, tol)? {
            if floor <= 0.0 || lo <= floor {
                return Ok(res);
            }
        }
        hi = lo;
    }
    // Reached the underflow floor: the remaining mass is negligible.
    Ok(QuadratureResult {
        value: series.partial,
        abs_error_estimate: series.err + series.last_contrib.unwrap_or(0.0).abs(),
        evaluations: series.evaluations,
    })
}

/// `∫_0^∞ f` split at a characteristic scale of the integrand.
pub fn integrate_half_line<F: Fn(f64) -> f64>(
    f: F,
    scale: f64,
    tol: &ToleranceProfile,
) -> Result<QuadratureResult> {
    let scale = if scale.is_finite() && scale > 0.0 { scale } else { 1.0 };
    let split = tol.tightened(0.5);
    let mut head = integrate_from_zero(&f, scale, &split)?;
    let tail = integrate_to_infinity(&f, scale, scale, &split)?;
    head.add(tail);
    Ok(head)
}

/// Adaptive integration of `f` over `(a, b)`; `b` may be `f64::INFINITY`.
///
/// For an infinite upper limit the tail is summed over doubling panels and
/// its remainder bounded through the detected decay envelope.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: &ToleranceProfile,
) -> Result<QuadratureResult> {
    if !(b > a) {
        return Err(LevyError::Domain(format!("need a < b, got a={a}, b={b}")));
    }
    if b.is_infinite() {
        let width = a.abs().max(1.0);
        integrate_to_infinity(f, a, width, tol)
    } else {
        integrate_finite(f, a, b, tol)
    }
}

// A panel that failed to meet its own (tightened) target is still usable
// inside a composite sum as long as its error is carried along.
fn accept_partial(e: LevyError) -> Result<QuadratureResult> {
    match e {
        LevyError::QuadratureFailure { partial, error } if partial.is_finite() => Ok(QuadratureResult {
            value: partial,
            abs_error_estimate: error,
            evaluations: 0,
        }),
        other => Err(other),
    }
}
