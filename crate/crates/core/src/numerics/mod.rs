//! Special functions, quadrature, root finding and characteristic-function
//! inversion used by every pricing module.

mod erf;
mod gamma;
mod inversion;
mod quadrature;
mod roots;

pub use erf::{erf, erfc, erfc_inv, gamma_p, gamma_q};
pub use gamma::{gamma, ln_gamma, log_beta, log_gamma};
pub use inversion::{cf_to_pdf, truncation_point, CfDensity, CfInverter, CF_CUTOFF, MAX_FREQUENCY};
pub use quadrature::{gauss_legendre, integrate, integrate_with_breaks, QuadratureSettings};
pub use roots::{bisect, find_root, find_root_with};

pub use num_complex::Complex;

/// Complex number type used for characteristic functions.
pub type ComplexValue<T> = Complex<T>;

pub const EULER_MASCHERONI: f64 = 0.577_215_664_901_532_9;
/// Apéry's constant ζ(3).
pub const ZETA3: f64 = 1.202_056_903_159_594_2;

/// Standard normal cdf.
pub fn norm_cdf<T: crate::Real>(x: T) -> T {
    T::lit(0.5) * erfc(-x * T::FRAC_1_SQRT_2())
}

/// Standard normal quantile.
pub fn norm_quantile<T: crate::Real>(u: T) -> crate::Result<T> {
    erfc_inv(T::lit(2.0) * u).map(|v| -T::SQRT_2() * v)
}
