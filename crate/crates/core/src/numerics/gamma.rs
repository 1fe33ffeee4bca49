//! Complex log-gamma (Lanczos, g = 607/128) and related functions.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::real::Real;

const LANCZOS_G: f64 = 607.0 / 128.0;
const LANCZOS: [f64; 15] = [
    0.999_999_999_999_997_1,
    57.156_235_665_862_92,
    -59.597_960_355_475_49,
    14.136_097_974_741_747,
    -0.491_913_816_097_620_2,
    3.399_464_998_481_189e-5,
    4.652_362_892_704_858e-5,
    -9.837_447_530_487_956e-5,
    1.580_887_032_249_125e-4,
    -2.102_644_417_241_049e-4,
    2.174_396_181_152_126_4e-4,
    -1.643_181_065_367_639e-4,
    8.441_822_398_385_275e-5,
    -2.619_083_840_158_141e-5,
    3.689_918_265_953_162_4e-6,
];

/// `ln Γ(z)`.
///
/// For `Re z ≥ 1/2` the result is the analytic branch continuous from the
/// positive real axis. Left of that line the reflection formula is used and
/// the imaginary part is only determined modulo 2π, which is irrelevant once
/// exponentiated.
pub fn log_gamma<T: Real>(z: Complex<T>) -> Result<Complex<T>> {
    if z.im == T::zero() && z.re <= T::zero() && z.re == z.re.floor() {
        return Err(Error::domain(format!("log_gamma pole at z = {}", z.re)));
    }
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::domain("log_gamma argument must be finite"));
    }
    let half = T::lit(0.5);
    if z.re < half {
        let pi = T::PI();
        let one = Complex::new(T::one(), T::zero());
        let reflected = lanczos(one - z);
        Ok(Complex::new(pi.ln(), T::zero()) - ln_sin_pi(z) - reflected)
    } else {
        Ok(lanczos(z))
    }
}

/// `ln B(a, b) = ln Γ(a) + ln Γ(b) − ln Γ(a + b)`.
pub fn log_beta<T: Real>(a: Complex<T>, b: Complex<T>) -> Result<Complex<T>> {
    Ok(log_gamma(a)? + log_gamma(b)? - log_gamma(a + b)?)
}

/// `ln Γ(x)` for real `x > 0`.
pub fn ln_gamma<T: Real>(x: T) -> Result<T> {
    if !(x > T::zero()) {
        return Err(Error::domain(format!("ln_gamma needs x > 0, got {x}")));
    }
    Ok(lanczos(Complex::new(x, T::zero())).re)
}

/// `Γ(x)` for real `x > 0`.
pub fn gamma<T: Real>(x: T) -> Result<T> {
    ln_gamma(x).map(T::exp)
}

fn lanczos<T: Real>(z: Complex<T>) -> Complex<T> {
    let one = T::one();
    let zm = z - one;
    let mut sum = Complex::new(T::lit(LANCZOS[0]), T::zero());
    for (k, &c) in LANCZOS.iter().enumerate().skip(1) {
        sum = sum + Complex::new(T::lit(c), T::zero()) / (zm + T::lit(k as f64));
    }
    let t = zm + T::lit(LANCZOS_G + 0.5);
    let half_ln_2pi = T::lit(0.918_938_533_204_672_8);
    (zm + T::lit(0.5)) * t.ln() - t + sum.ln() + half_ln_2pi
}

/// `ln sin(πz)` without overflow for large `|Im z|`.
fn ln_sin_pi<T: Real>(z: Complex<T>) -> Complex<T> {
    let pi = T::PI();
    let i = Complex::new(T::zero(), T::one());
    let one = Complex::new(T::one(), T::zero());
    let ln2 = T::LN_2();
    let half_pi = T::FRAC_PI_2();
    if z.im.abs() < T::lit(20.0) {
        return (z * pi).sin().ln();
    }
    if z.im > T::zero() {
        -i * z * pi + (one - (i * z * (pi + pi)).exp()).ln() - ln2 + i * half_pi
    } else {
        i * z * pi + (one - (-i * z * (pi + pi)).exp()).ln() - ln2 - i * half_pi
    }
}
