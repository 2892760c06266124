use serde::{Deserialize, Serialize};

use crate::error::{LevyError, Result};
use crate::numerics::{integrate_finite, ToleranceProfile};

/// Broken power law `f(z) = (z/knee)^{-b_small}` for `z ≤ knee` and
/// `(z/knee)^{-b_large}` above. The profile of `ν₀(dz) = f(z) z^{-2} dz`.
///
/// `Re ψ` is regularly varying with index `1 + b_large` at the origin and
/// `1 + b_small` at infinity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BrokenPower {
    pub knee: f64,
    pub b_small: f64,
    pub b_large: f64,
}

impl BrokenPower {
    pub fn pure(beta: f64) -> Self {
        BrokenPower {
            knee: 1.0,
            b_small: beta,
            b_large: beta,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.knee > 0.0 && self.knee.is_finite()) {
            return Err(LevyError::InvalidModel(format!("knee must be positive, got {}", self.knee)));
        }
        if !(self.b_small >= 0.0 && self.b_small < 1.0) {
            return Err(LevyError::InvalidModel(format!(
                "b_small must lie in [0, 1), got {}",
                self.b_small
            )));
        }
        if !(self.b_large > 0.0 && self.b_large < 1.0) {
            return Err(LevyError::InvalidModel(format!(
                "b_large must lie in (0, 1), got {}",
                self.b_large
            )));
        }
        Ok(())
    }

    pub fn f(&self, z: f64) -> f64 {
        let z = z.abs();
        let b = if z <= self.knee { self.b_small } else { self.b_large };
        (z / self.knee).powf(-b)
    }

    /// Scaling envelope exponents (β₁, β₂) with constants a₁ = a₂ = 1.
    pub fn scaling_exponents(&self) -> (f64, f64) {
        (self.b_small.min(self.b_large), self.b_small.max(self.b_large))
    }

    fn piece(&self, beta: f64, p: f64, a: f64, b: f64) -> f64 {
        // ∫_a^b (z/k)^{-β} z^p dz
        let k = self.knee;
        let e = p + 1.0 - beta;
        let scale = k.powf(beta);
        if e.abs() < 1e-14 {
            return scale * (b / a).ln();
        }
        let upper = if b.is_infinite() { 0.0 } else { b.powf(e) };
        let lower = if a == 0.0 { 0.0 } else { a.powf(e) };
        scale * (upper - lower) / e
    }

    /// `∫_a^b f(z) z^p dz` for `0 ≤ a ≤ b ≤ ∞` (caller ensures convergence).
    pub fn moment(&self, p: f64, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        let k = self.knee;
        let mut total = 0.0;
        if a < k {
            total += self.piece(self.b_small, p, a, b.min(k));
        }
        if b > k {
            total += self.piece(self.b_large, p, a.max(k), b);
        }
        total
    }

    /// `ν₀([t, ∞)) = ∫_t^∞ f(z) z^{-2} dz`.
    pub fn tail(&self, t: f64) -> f64 {
        self.moment(-2.0, t, f64::INFINITY)
    }

    /// Solves `tail(t) = y` for `t > 0`.
    pub fn inverse_tail(&self, y: f64) -> f64 {
        let k = self.knee;
        let tk = self.tail(k);
        if y <= tk {
            // k^{bL} t^{-1-bL}/(1+bL) = y
            let bl = self.b_large;
            (y * (1.0 + bl) / k.powf(bl)).powf(-1.0 / (1.0 + bl))
        } else {
            // k^{bS}(t^{-1-bS} − k^{-1-bS})/(1+bS) + tk = y
            let bs = self.b_small;
            let v = (y - tk) * (1.0 + bs) / k.powf(bs) + k.powf(-1.0 - bs);
            v.powf(-1.0 / (1.0 + bs))
        }
    }

    /// `∫_0^r z² ν₀(dz) = ∫_0^r f`.
    pub fn truncated_second_moment(&self, r: f64) -> f64 {
        self.moment(0.0, 0.0, r)
    }

    /// Signed `∫_1^r z ν₀(dz)` (negative for r < 1).
    pub fn first_moment_from_one(&self, r: f64) -> f64 {
        if r >= 1.0 {
            self.moment(-1.0, 1.0, r)
        } else {
            -self.moment(-1.0, r, 1.0)
        }
    }

    /// `∫_0^r z ν₀(dz)`, finite since `b_small < 1`.
    pub fn first_moment_below(&self, r: f64) -> f64 {
        self.moment(-1.0, 0.0, r)
    }
}

/// Lévy density tabulated on a grid of nonzero points, linearly interpolated
/// between neighbours of the same sign and zero outside the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabulatedMeasure {
    pub z: Vec<f64>,
    pub density: Vec<f64>,
}

impl TabulatedMeasure {
    pub fn new(z: Vec<f64>, density: Vec<f64>) -> Result<Self> {
        let t = TabulatedMeasure { z, density };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if self.z.len() != self.density.len() || self.z.len() < 2 {
            return Err(LevyError::InvalidModel(
                "tabulated measure needs matching z/density arrays of length ≥ 2".into(),
            ));
        }
        if self.z.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(LevyError::InvalidModel("tabulated z must be strictly increasing".into()));
        }
        if self.z.iter().any(|&z| z == 0.0 || !z.is_finite()) {
            return Err(LevyError::InvalidModel("tabulated z must be finite and nonzero".into()));
        }
        if self.density.iter().any(|&d| !(d >= 0.0) || !d.is_finite()) {
            return Err(LevyError::InvalidModel("tabulated density must be finite and ≥ 0".into()));
        }
        Ok(())
    }

    /// Grid segments `[z_i, z_{i+1}]` that do not straddle the origin.
    pub fn segments(&self) -> impl Iterator<Item = (f64, f64, f64, f64)> + '_ {
        self.z
            .windows(2)
            .zip(self.density.windows(2))
            .filter(|(z, _)| z[0] * z[1] > 0.0)
            .map(|(z, d)| (z[0], z[1], d[0], d[1]))
    }

    pub fn density_at(&self, z: f64) -> f64 {
        for (a, b, da, db) in self.segments() {
            if z >= a && z <= b {
                return da + (db - da) * (z - a) / (b - a);
            }
        }
        0.0
    }

    /// `∫ w(z) ν(dz)` over the grid, restricted to `z ∈ [lo, hi]`.
    pub fn integrate<W: Fn(f64) -> f64>(&self, w: W, lo: f64, hi: f64, tol: &ToleranceProfile) -> Result<f64> {
        let mut total = 0.0;
        for (a, b, da, db) in self.segments() {
            let a2 = a.max(lo);
            let b2 = b.min(hi);
            if b2 <= a2 {
                continue;
            }
            let dens = |z: f64| da + (db - da) * (z - a) / (b - a);
            total += integrate_finite(|z| w(z) * dens(z), a2, b2, tol)?.value;
        }
        Ok(total)
    }

    /// `(∫ cos(ξz) ν(dz), ∫ sin(ξz) ν(dz))`, exact for the piecewise-linear
    /// density.
    pub fn fourier(&self, xi: f64) -> (f64, f64) {
        let (mut c, mut s) = (0.0, 0.0);
        for (a, b, da, db) in self.segments() {
            let q = (db - da) / (b - a);
            let p = da - q * a;
            if (xi * (b - a)).abs() < 1e-2 {
                // Short segment: 5-point Gauss–Legendre is exact far beyond
                // the needed order here.
                const X: [f64; 5] = [-0.906_179_845_938_664, -0.538_469_310_105_683, 0.0, 0.538_469_310_105_683, 0.906_179_845_938_664];
                const W: [f64; 5] = [0.236_926_885_056_189, 0.478_628_670_499_366, 0.568_888_888_888_889, 0.478_628_670_499_366, 0.236_926_885_056_189];
                let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
                for i in 0..5 {
                    let z = m + h * X[i];
                    let d = p + q * z;
                    c += h * W[i] * d * (xi * z).cos();
                    s += h * W[i] * d * (xi * z).sin();
                }
            } else {
                // ∫(p+qz)e^{iξz} = [(p+qz)e^{iξz}/(iξ) + q e^{iξz}/ξ²]
                let prim = |z: f64| {
                    let (sn, cs) = (xi * z).sin_cos();
                    let d = p + q * z;
                    // (p+qz)(cs + i sn)/(iξ) = (p+qz)(sn − i cs)/ξ
                    (d * sn / xi + q * cs / (xi * xi), -d * cs / xi + q * sn / (xi * xi))
                };
                let (cb, sb) = prim(b);
                let (ca, sa) = prim(a);
                c += cb - ca;
                s += sb - sa;
            }
        }
        (c, s)
    }

    pub fn mass(&self) -> f64 {
        self.segments().map(|(a, b, da, db)| 0.5 * (da + db) * (b - a)).sum()
    }

    pub fn first_moment(&self) -> f64 {
        self.segments()
            .map(|(a, b, da, db)| {
                let q = (db - da) / (b - a);
                let p = da - q * a;
                p * (b * b - a * a) / 2.0 + q * (b * b * b - a * a * a) / 3.0
            })
            .sum()
    }

    pub fn has_positive_mass(&self) -> bool {
        self.segments().any(|(a, _, da, db)| a > 0.0 && (da > 0.0 || db > 0.0))
    }
}

/// Description of the Lévy measure ν.
#[derive(Debug, Clone, PartialEq)]
pub enum MeasureSpec {
    None,
    /// Density `c_u z^{-1-α}` on z > 0 and `c_d |z|^{-1-α}` on z < 0.
    Stable { alpha: f64, c_u: f64, c_d: f64 },
    /// `ν(dz) = c_u 1_{z>0} f(|z|)|z|^{-2} dz + c_d 1_{z<0} f(|z|)|z|^{-2} dz`.
    Factorized { c_u: f64, c_d: f64, profile: BrokenPower },
    Tabulated(TabulatedMeasure),
}

impl MeasureSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            MeasureSpec::None => Ok(()),
            MeasureSpec::Stable { alpha, c_u, c_d } => {
                if !(*alpha > 1.0 && *alpha < 2.0) {
                    return Err(LevyError::InvalidModel(format!("stable alpha must lie in (1, 2), got {alpha}")));
                }
                check_weights(*c_u, *c_d)
            }
            MeasureSpec::Factorized { c_u, c_d, profile } => {
                profile.validate()?;
                check_weights(*c_u, *c_d)
            }
            MeasureSpec::Tabulated(t) => t.validate(),
        }
    }

    /// The (c_u, c_d, profile) view shared by stable and factorized specs.
    pub(crate) fn power_view(&self) -> Option<(f64, f64, BrokenPower)> {
        match *self {
            MeasureSpec::Stable { alpha, c_u, c_d } => Some((c_u, c_d, BrokenPower::pure(alpha - 1.0))),
            MeasureSpec::Factorized { c_u, c_d, profile } => Some((c_u, c_d, profile)),
            _ => None,
        }
    }

    pub fn is_spectrally_negative(&self) -> bool {
        match self {
            MeasureSpec::None => true,
            MeasureSpec::Stable { c_u, .. } | MeasureSpec::Factorized { c_u, .. } => *c_u == 0.0,
            MeasureSpec::Tabulated(t) => !t.has_positive_mass(),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        match self {
            MeasureSpec::None => true,
            MeasureSpec::Stable { c_u, c_d, .. } | MeasureSpec::Factorized { c_u, c_d, .. } => c_u == c_d,
            MeasureSpec::Tabulated(t) => {
                let n = t.z.len();
                (0..n).all(|i| t.z[i] == -t.z[n - 1 - i] && t.density[i] == t.density[n - 1 - i])
            }
        }
    }

    /// `ν((t, ∞))` and `ν((−∞, −t))`.
    pub fn right_tail(&self, t: f64, tol: &ToleranceProfile) -> Result<f64> {
        match self {
            MeasureSpec::Tabulated(tab) => tab.integrate(|_| 1.0, t, f64::INFINITY, tol),
            MeasureSpec::None => Ok(0.0),
            _ => {
                let (c_u, _, p) = self.power_view().expect("power-law spec");
                Ok(c_u * p.tail(t))
            }
        }
    }

    pub fn left_tail(&self, t: f64, tol: &ToleranceProfile) -> Result<f64> {
        match self {
            MeasureSpec::Tabulated(tab) => tab.integrate(|_| 1.0, f64::NEG_INFINITY, -t, tol),
            MeasureSpec::None => Ok(0.0),
            _ => {
                let (_, c_d, p) = self.power_view().expect("power-law spec");
                Ok(c_d * p.tail(t))
            }
        }
    }

    /// `ν({|s| ≥ t})`.
    pub fn two_sided_tail(&self, t: f64, tol: &ToleranceProfile) -> Result<f64> {
        Ok(self.right_tail(t, tol)? + self.left_tail(t, tol)?)
    }

    /// Density of ν at z.
    pub fn density(&self, z: f64) -> f64 {
        match self {
            MeasureSpec::None => 0.0,
            MeasureSpec::Tabulated(t) => t.density_at(z),
            _ => {
                let (c_u, c_d, p) = self.power_view().expect("power-law spec");
                if z == 0.0 {
                    return 0.0;
                }
                let c = if z > 0.0 { c_u } else { c_d };
                c * p.f(z) / (z * z)
            }
        }
    }
}

fn check_weights(c_u: f64, c_d: f64) -> Result<()> {
    if !(c_u >= 0.0 && c_d >= 0.0 && c_u.is_finite() && c_d.is_finite()) || c_u + c_d == 0.0 {
        return Err(LevyError::InvalidModel(format!(
            "weights must be non-negative and not both zero, got c_u={c_u}, c_d={c_d}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::integrate_adaptive;

    fn tol() -> ToleranceProfile {
        ToleranceProfile::default()
    }

    #[test]
    fn broken_power_tail_matches_quadrature() {
        let p = BrokenPower {
            knee: 2.0,
            b_small: 0.3,
            b_large: 0.6,
        };
        for &t in &[0.01, 0.5, 2.0, 7.0] {
            let q = integrate_adaptive(|z: f64| p.f(z) / (z * z), t, f64::INFINITY, &tol());
            let q = if t < 2.0 {
                integrate_adaptive(|z: f64| p.f(z) / (z * z), t, 2.0, &tol()).unwrap().value
                    + integrate_adaptive(|z: f64| p.f(z) / (z * z), 2.0, f64::INFINITY, &tol()).unwrap().value
            } else {
                q.unwrap().value
            };
            assert!((p.tail(t) / q - 1.0).abs() < 1e-7, "t={t}: {} vs {q}", p.tail(t));
            assert!((p.inverse_tail(p.tail(t)) / t - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn broken_power_log_moment() {
        let p = BrokenPower {
            knee: 1.0,
            b_small: 0.0,
            b_large: 0.5,
        };
        // ∫_{0.5}^{1} 1/z dz = ln 2
        assert!((p.moment(-1.0, 0.5, 1.0) - 2f64.ln()).abs() < 1e-14);
        // ∫_1^∞ z^{-1.5} dz = 2
        assert!((p.first_moment_from_one(f64::INFINITY) - 2.0).abs() < 1e-14);
        assert!((p.first_moment_from_one(0.5) + 2f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn validation() {
        assert!(MeasureSpec::Stable { alpha: 2.0, c_u: 1.0, c_d: 1.0 }.validate().is_err());
        assert!(MeasureSpec::Stable { alpha: 1.5, c_u: 0.0, c_d: 0.0 }.validate().is_err());
        assert!(MeasureSpec::Stable { alpha: 1.5, c_u: 0.0, c_d: 1.0 }.validate().is_ok());
        let bad = BrokenPower { knee: 1.0, b_small: 0.4, b_large: 1.2 };
        assert!(MeasureSpec::Factorized { c_u: 1.0, c_d: 1.0, profile: bad }.validate().is_err());
        assert!(TabulatedMeasure::new(vec![1.0, 0.5], vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn tabulated_tails() {
        let t = TabulatedMeasure::new(vec![-2.0, -1.0, 1.0, 3.0], vec![1.0, 1.0, 2.0, 0.0]).unwrap();
        assert!((t.density_at(2.0) - 1.0).abs() < 1e-15);
        assert_eq!(t.density_at(0.0), 0.0);
        let m = MeasureSpec::Tabulated(t);
        assert!((m.right_tail(1.0, &tol()).unwrap() - 2.0).abs() < 1e-12);
        assert!((m.left_tail(1.0, &tol()).unwrap() - 1.0).abs() < 1e-12);
        assert!(!m.is_spectrally_negative());
    }

    #[test]
    fn tabulated_fourier_matches_quadrature() {
        let t = TabulatedMeasure::new(vec![-2.0, -1.0, 0.5, 3.0], vec![1.0, 0.3, 2.0, 0.5]).unwrap();
        for &xi in &[1e-4, 0.3, 2.0, 17.0] {
            let (c, s) = t.fourier(xi);
            let qc = t.integrate(|z| (xi * z).cos(), f64::NEG_INFINITY, f64::INFINITY, &tol()).unwrap();
            let qs = t.integrate(|z| (xi * z).sin(), f64::NEG_INFINITY, f64::INFINITY, &tol()).unwrap();
            assert!((c - qc).abs() < 1e-10 && (s - qs).abs() < 1e-10, "{xi}: {c} {qc} {s} {qs}");
        }
        let m = t.integrate(|_| 1.0, f64::NEG_INFINITY, f64::INFINITY, &tol()).unwrap();
        assert!((t.mass() - m).abs() < 1e-12);
        let m1 = t.integrate(|z| z, f64::NEG_INFINITY, f64::INFINITY, &tol()).unwrap();
        assert!((t.first_moment() - m1).abs() < 1e-12);
    }
}
