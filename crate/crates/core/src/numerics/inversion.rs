//! Density recovery from a characteristic function,
//! `f(x) = (1/π) ∫₀^∞ Re[e^{−iθx} φ(θ)] dθ` for real-valued random variables.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::numerics::quadrature::{gauss_legendre, integrate, integrate_with_breaks, QuadratureSettings};
use crate::real::Real;

/// Truncation threshold on `|φ|`.
pub const CF_CUTOFF: f64 = 1e-12;
/// Largest frequency searched for the truncation point.
pub const MAX_FREQUENCY: f64 = 1e6;

const MAX_PANELS: usize = 4000;
const PANEL_RADIANS: f64 = 4.0;

/// Density value recovered by inversion, with the amount removed by clamping
/// a slightly negative quadrature result to zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CfDensity<T> {
    pub density: T,
    pub clamped: T,
}

impl<T: Real> CfDensity<T> {
    fn from_raw(raw: T) -> Self {
        if raw < T::zero() {
            CfDensity {
                density: T::zero(),
                clamped: -raw,
            }
        } else {
            CfDensity {
                density: raw,
                clamped: T::zero(),
            }
        }
    }
}

/// Smallest frequency past which `|φ|` stays below [`CF_CUTOFF`]. If the
/// cutoff is not reached by [`MAX_FREQUENCY`] but `|φ|` decays there like a
/// clean power `θ^{−p}` with `p > 1`, the cap is returned and the remainder is
/// left to the algebraic tail correction.
pub fn truncation_point<T: Real>(phi: &impl Fn(T) -> Complex<T>) -> Result<T> {
    let cutoff = T::lit(CF_CUTOFF);
    let max = T::lit(MAX_FREQUENCY);
    let step = T::lit(1.1);
    let below = |theta: T| {
        [1.0, 1.05, 1.1, 1.25, 1.5, 2.0]
            .iter()
            .all(|&k| phi(theta * T::lit(k)).norm() < cutoff)
    };
    let mut theta = T::lit(0.25);
    loop {
        let candidate = theta.min(max);
        if below(candidate) {
            return Ok(candidate);
        }
        if candidate >= max {
            if power_law_decay(phi, max) {
                return Ok(max);
            }
            return Err(Error::numeric(format!(
                "characteristic function not integrable: |phi| >= {CF_CUTOFF:e} up to theta = {MAX_FREQUENCY:e}"
            )));
        }
        theta = theta * step;
    }
}

fn power_law_decay<T: Real>(phi: &impl Fn(T) -> Complex<T>, theta: T) -> bool {
    let norms: Vec<T> = [0.125, 0.25, 0.5, 1.0]
        .iter()
        .map(|&k| phi(theta * T::lit(k)).norm())
        .collect();
    if norms.iter().any(|n| !(*n > T::zero())) {
        return false;
    }
    let rates: Vec<T> = norms.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let p = rates[rates.len() - 1];
    p > T::lit(1.05) && p < T::lit(30.0) && rates.iter().all(|&r| (r - p).abs() < T::lit(0.01) * p)
}

/// Linear phase rate of `φ` near the origin (the location the density is centered on).
fn phase_drift<T: Real>(phi: &impl Fn(T) -> Complex<T>, theta_max: T) -> T {
    let h = T::lit(1e-4).min(theta_max * T::lit(1e-6));
    phi(h).arg() / h
}

/// Inverts `phi` at `x` by adaptive panels over `[0, Θ]`, switching to
/// extrapolated half-period sums when `φ` decays slowly relative to the
/// oscillation of `e^{−iθx}`.
pub fn cf_to_pdf<T: Real>(
    phi: impl Fn(T) -> Complex<T>,
    x: T,
    settings: &QuadratureSettings<T>,
) -> Result<CfDensity<T>> {
    let theta_max = truncation_point(&phi)?;
    let drift = phase_drift(&phi, theta_max);
    let omega = (x - drift).abs();
    let integrand = |theta: T| {
        let rot = Complex::new(T::zero(), -theta * x).exp();
        (rot * phi(theta)).re
    };
    let panel = if omega > T::zero() {
        T::lit(PANEL_RADIANS) / omega
    } else {
        theta_max
    };
    let n_panels = (theta_max / panel).ceil().as_f64();
    let raw = if n_panels > MAX_PANELS as f64 {
        oscillatory_sum(integrand, omega, settings)?
    } else {
        let n = (n_panels as usize).max(8);
        let breaks: Vec<T> = (0..=n)
            .map(|k| theta_max * T::lit(k as f64 / n as f64))
            .collect();
        let inner = QuadratureSettings {
            max_subdivisions: settings.max_subdivisions.max(4 * n),
            ..*settings
        };
        let head = integrate_with_breaks(integrand, &breaks, &inner)?;
        head + algebraic_tail(&phi, theta_max, x, drift, settings)?
    };
    Ok(CfDensity::from_raw(raw / T::PI()))
}

/// Tail `∫_Θ^∞ Re[e^{−iθx}φ(θ)] dθ` when `|φ|` decays like a power `θ^{−p}`;
/// zero for faster decay.
fn algebraic_tail<T: Real>(
    phi: &impl Fn(T) -> Complex<T>,
    theta_max: T,
    x: T,
    drift: T,
    settings: &QuadratureSettings<T>,
) -> Result<T> {
    let at = phi(theta_max);
    let half = phi(theta_max * T::lit(0.5)).norm();
    if at.norm() == T::zero() || half == T::zero() {
        return Ok(T::zero());
    }
    let p = (half / at.norm()).log2();
    if !(p > T::lit(1.05) && p < T::lit(30.0)) {
        return Ok(T::zero());
    }
    let z = theta_max * (x - drift);
    let one = T::one();
    let shape = if z == T::zero() {
        Complex::new(one / (p - one), T::zero())
    } else {
        // ∫₁^∞ t^{−p} e^{−iz(t−1)} dt with the contour rotated onto t = 1 ∓ is.
        let sign = z.signum();
        let a = z.abs();
        let part = |re: bool| {
            move |s: T| {
                let v = Complex::new(one, -sign * s).powf(-p) * (-a * s).exp();
                if re {
                    v.re
                } else {
                    v.im
                }
            }
        };
        let re = integrate(part(true), T::zero(), T::infinity(), settings)?;
        let im = integrate(part(false), T::zero(), T::infinity(), settings)?;
        Complex::new(T::zero(), -sign) * Complex::new(re, im)
    };
    let lead = Complex::new(T::zero(), -theta_max * x).exp() * at * theta_max;
    Ok((lead * shape).re)
}

/// Sum of integrals over successive half periods of `e^{−iθω}`, accelerated
/// with Wynn's epsilon algorithm.
fn oscillatory_sum<T: Real>(
    mut integrand: impl FnMut(T) -> T,
    omega: T,
    settings: &QuadratureSettings<T>,
) -> Result<T> {
    let half_period = T::PI() / omega;
    let mut partial = T::zero();
    let mut sums = Vec::new();
    let mut previous: Option<T> = None;
    let mut stable = 0;
    for k in 0..20_000usize {
        let a = half_period * T::lit(k as f64);
        let block = integrate(&mut integrand, a, a + half_period, settings)?;
        partial += block;
        sums.push(partial);
        if sums.len() < 6 {
            continue;
        }
        let estimate = wynn_epsilon(&sums[sums.len().saturating_sub(30)..]);
        if let Some(prev) = previous {
            let tol = settings.abs_tol.max(settings.rel_tol * estimate.abs()) * T::lit(0.1);
            if (estimate - prev).abs() < tol && block.abs() < T::lit(1e-3) {
                stable += 1;
                if stable >= 3 {
                    return Ok(estimate);
                }
            } else {
                stable = 0;
            }
        }
        previous = Some(estimate);
    }
    Err(Error::NonConvergence {
        message: "oscillatory inversion".into(),
        partial: partial.as_f64(),
        error_estimate: f64::NAN,
    })
}

/// Highest-order even-column entry of the epsilon table built from `s`.
pub(crate) fn wynn_epsilon<T: Real>(s: &[T]) -> T {
    let n = s.len();
    let mut prev = vec![T::zero(); n + 1];
    let mut cur: Vec<T> = s.to_vec();
    let mut best = s[n - 1];
    for col in 1..n {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for i in 0..cur.len() - 1 {
            let diff = cur[i + 1] - cur[i];
            if diff == T::zero() {
                return cur[i + 1];
            }
            next.push(prev[i + 1] + T::one() / diff);
        }
        prev = cur;
        cur = next;
        if col % 2 == 0 {
            if let Some(&v) = cur.last() {
                if v.is_finite() {
                    best = v;
                }
            }
        }
    }
    best
}

/// Batched inversion on a fixed Gauss–Legendre panel rule: `φ` is sampled once
/// and the density at many points costs one weighted sum each.
///
/// Intended for characteristic functions with exponential decay.
#[derive(Debug, Clone)]
pub struct CfInverter<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
    values: Vec<Complex<T>>,
}

impl<T: Real> CfInverter<T> {
    /// Builds a rule accurate to roughly `tol` for every `x` in `[x_lo, x_hi]`.
    pub fn new(phi: impl Fn(T) -> Complex<T>, x_lo: T, x_hi: T, tol: T) -> Result<Self> {
        let theta_max = truncation_point(&phi)?;
        let drift = phase_drift(&phi, theta_max);
        let omega = (x_lo - drift).abs().max((x_hi - drift).abs()) + T::one();
        let mut n_panels = ((theta_max * omega / T::lit(PANEL_RADIANS)).ceil().as_f64() as usize).max(16);
        let probes: Vec<T> = (0..7)
            .map(|k| x_lo + (x_hi - x_lo) * T::lit(k as f64 / 6.0))
            .collect();
        let mut rule = Self::build(&phi, theta_max, n_panels);
        for _ in 0..8 {
            let finer = Self::build(&phi, theta_max, 2 * n_panels);
            let gap = probes
                .iter()
                .map(|&x| (rule.raw(x) - finer.raw(x)).abs())
                .fold(T::zero(), T::max);
            rule = finer;
            n_panels *= 2;
            if gap < tol {
                return Ok(rule);
            }
        }
        Err(Error::numeric(format!(
            "inversion rule did not reach tolerance {tol:e} with {n_panels} panels"
        )))
    }

    fn build(phi: &impl Fn(T) -> Complex<T>, theta_max: T, n_panels: usize) -> Self {
        const ORDER: usize = 16;
        let (gx, gw) = gauss_legendre::<T>(ORDER);
        let width = theta_max / T::lit(n_panels as f64);
        let half = T::lit(0.5) * width;
        let mut nodes = Vec::with_capacity(n_panels * ORDER);
        let mut weights = Vec::with_capacity(n_panels * ORDER);
        for p in 0..n_panels {
            let center = width * T::lit(p as f64) + half;
            for (x, w) in gx.iter().zip(&gw) {
                nodes.push(center + half * *x);
                weights.push(half * *w / T::PI());
            }
        }
        let values = nodes.iter().map(|&t| phi(t)).collect();
        CfInverter {
            nodes,
            weights,
            values,
        }
    }

    fn raw(&self, x: T) -> T {
        let mut acc = T::zero();
        for ((t, w), v) in self.nodes.iter().zip(&self.weights).zip(&self.values) {
            let (s, c) = (*t * x).sin_cos();
            // Re[(c − i s)(v.re + i v.im)]
            acc += *w * (c * v.re + s * v.im);
        }
        acc
    }

    pub fn pdf(&self, x: T) -> CfDensity<T> {
        CfDensity::from_raw(self.raw(x))
    }

    /// `∫_a^b` of the unclamped density, integrated term by term in closed form.
    pub fn integral(&self, a: T, b: T) -> T {
        let mut acc = T::zero();
        for ((t, w), v) in self.nodes.iter().zip(&self.weights).zip(&self.values) {
            let (sa, ca) = (*t * a).sin_cos();
            let (sb, cb) = (*t * b).sin_cos();
            acc += *w * ((sb - sa) * v.re + (ca - cb) * v.im) / *t;
        }
        acc
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn settings() -> QuadratureSettings<f64> {
        QuadratureSettings::default()
    }

    #[test]
    fn gaussian_at_origin() {
        let phi = |t: f64| Complex::new((-0.5 * t * t).exp(), 0.0);
        let d = cf_to_pdf(phi, 0.0, &settings()).unwrap();
        assert!((d.density - 1.0 / (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-12);
        assert_eq!(d.clamped, 0.0);
    }

    #[test]
    fn laplace_at_origin_uses_power_tail() {
        let phi = |t: f64| Complex::new(1.0 / (1.0 + t * t), 0.0);
        let d = cf_to_pdf(phi, 0.0, &settings()).unwrap();
        assert!((d.density - 0.5).abs() < 1e-9, "{}", d.density);
    }

    #[test]
    fn narrow_laplace_past_the_frequency_cap() {
        let b = 0.05;
        let phi = move |t: f64| Complex::new(1.0 / (1.0 + b * b * t * t), 0.0);
        for x in [0.0, 0.01, -0.08, 0.2] {
            let exact = (-(x as f64).abs() / b).exp() / (2.0 * b);
            let d = cf_to_pdf(phi, x, &settings()).unwrap();
            assert!((d.density - exact).abs() < 1e-8, "x = {x}: {} vs {exact}", d.density);
        }
    }

    #[test]
    fn uniform_cf_is_not_integrable() {
        let phi = |t: f64| {
            let v = if t == 0.0 { 1.0 } else { t.sin() / t };
            Complex::new(v, 0.0)
        };
        assert!(matches!(cf_to_pdf(phi, 0.0, &settings()), Err(Error::Numeric(_))));
    }

    #[test]
    fn wynn_accelerates_alternating_series() {
        // ln 2 = 1 − 1/2 + 1/3 − …
        let mut s = 0.0;
        let sums: Vec<f64> = (1..=20)
            .map(|k| {
                s += if k % 2 == 1 { 1.0 } else { -1.0 } / k as f64;
                s
            })
            .collect();
        assert!((wynn_epsilon(&sums) - std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn batched_rule_matches_closed_form() {
        let phi = |t: f64| Complex::new((-0.5 * t * t).exp(), 0.0) * Complex::new(0.0, 0.3 * t).exp();
        let inv = CfInverter::new(phi, -6.0, 6.0, 1e-13).unwrap();
        for x in [-4.0, -1.0, 0.3, 2.5] {
            let exact = (-0.5 * (x - 0.3f64).powi(2)).exp() / (2.0 * std::f64::consts::PI).sqrt();
            assert!((inv.pdf(x).density - exact).abs() < 1e-12);
        }
    }
}
