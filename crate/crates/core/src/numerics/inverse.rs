use crate::error::{LevyError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monotonicity {
    Increasing,
    Decreasing,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InverseResult {
    pub value: f64,
    /// Set when `s` lies outside the range reachable on the search bracket
    /// and the result was clamped to an end of the bracket.
    pub range_clamp: bool,
}

const R_MIN: f64 = 1e-60;
const R_MAX: f64 = 1e60;

/// Generalized inverse of a monotone function on `(0, ∞)`.
///
/// Increasing `f`: `sup{r : f(r) ≤ s}`. Decreasing `f`: `sup{r : f(r) ≥ s}`.
pub fn monotone_inverse<F: Fn(f64) -> f64>(
    f: F,
    s: f64,
    direction: Monotonicity,
    rel_tol: f64,
) -> Result<InverseResult> {
    if s.is_nan() {
        return Err(LevyError::Domain("cannot invert at NaN".into()));
    }
    // Work with an increasing predicate: `inside(r)` holds on an initial
    // segment (0, r*] and r* is returned.
    let inside = |r: f64| -> bool {
        let v = f(r);
        match direction {
            Monotonicity::Increasing => v <= s,
            Monotonicity::Decreasing => v >= s,
        }
    };
    // Geometric bracketing outward from r = 1; the ends of the search range
    // are only probed when the bracket actually reaches them.
    let (mut lo, mut hi) = if inside(1.0) {
        let mut lo = 1.0;
        let mut hi = 4.0;
        while inside(hi) {
            lo = hi;
            hi *= 4.0;
            if hi >= R_MAX {
                return Ok(InverseResult {
                    value: R_MAX,
                    range_clamp: true,
                });
            }
        }
        (lo, hi)
    } else {
        let mut hi = 1.0;
        let mut lo = 0.25;
        while !inside(lo) {
            hi = lo;
            lo *= 0.25;
            if lo <= R_MIN {
                return Ok(InverseResult {
                    value: R_MIN,
                    range_clamp: true,
                });
            }
        }
        (lo, hi)
    };
    let rel_tol = rel_tol.max(4.0 * f64::EPSILON);
    while hi - lo > rel_tol * hi {
        let mid = (lo * hi).sqrt();
        let mid = if mid > lo && mid < hi { mid } else { 0.5 * (lo + hi) };
        if mid <= lo || mid >= hi {
            break;
        }
        if inside(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(InverseResult {
        value: 0.5 * (lo + hi),
        range_clamp: false,
    })
}
