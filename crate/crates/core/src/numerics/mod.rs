//! Quadrature, special functions and monotone inverses.

mod inverse;
mod oscillatory;
mod quadrature;
mod special;

pub use inverse::{monotone_inverse, InverseResult, Monotonicity};
pub use oscillatory::{integrate_fourier, integrate_oscillatory, FourierWeight};
pub use quadrature::{
    integrate_adaptive, integrate_finite, integrate_from_zero, integrate_from_zero_with_floor,
    integrate_half_line, integrate_to_infinity, QuadratureResult, ToleranceProfile,
};
pub use special::{beta, erf, erfc, gamma, ln_gamma, one_minus_cos_moment, stable_cos_integral};
