//! Globally adaptive Gauss–Kronrod (10/21) quadrature and Gauss–Legendre rules.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct QuadratureSettings<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    pub max_subdivisions: usize,
}

impl<T: Real> Default for QuadratureSettings<T> {
    fn default() -> Self {
        QuadratureSettings {
            abs_tol: T::lit(1e-10),
            rel_tol: T::lit(1e-10),
            max_subdivisions: 2000,
        }
    }
}

impl<T: Real> QuadratureSettings<T> {
    pub fn new(abs_tol: T, rel_tol: T, max_subdivisions: usize) -> Result<Self> {
        if !(abs_tol > T::zero() && rel_tol > T::zero()) {
            return Err(Error::domain("quadrature tolerances must be positive"));
        }
        if max_subdivisions == 0 {
            return Err(Error::domain("max_subdivisions must be at least 1"));
        }
        Ok(QuadratureSettings {
            abs_tol,
            rel_tol,
            max_subdivisions,
        })
    }

    pub fn with_tolerance(self, tol: T) -> Self {
        QuadratureSettings {
            abs_tol: tol,
            rel_tol: tol,
            ..self
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
    0.148_874_338_981_631_2,
    0.0,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_73,
    0.054_755_896_574_352,
    0.075_039_674_810_919_95,
    0.093_125_454_583_697_6,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_85,
    0.134_709_217_311_473_33,
    0.142_775_938_577_060_08,
    0.147_739_104_901_338_5,
    0.149_445_554_002_916_9,
];
// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 5] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_36,
    0.295_524_224_714_752_87,
];

struct Segment<T> {
    a: T,
    b: T,
    estimate: T,
    error: T,
}

impl<T: Real> PartialEq for Segment<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T: Real> Eq for Segment<T> {}
impl<T: Real> PartialOrd for Segment<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Real> Ord for Segment<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .partial_cmp(&other.error)
            .unwrap_or(Ordering::Equal)
    }
}

fn kronrod21<T: Real>(f: &mut impl FnMut(T) -> T, a: T, b: T) -> Result<(T, T)> {
    let half = T::lit(0.5);
    let center = half * (a + b);
    let half_len = half * (b - a);
    let fc = f(center);
    let mut res_k = fc * T::lit(WGK[10]);
    let mut res_g = T::zero();
    let mut res_abs = res_k.abs();
    let mut fv1 = [T::zero(); 10];
    let mut fv2 = [T::zero(); 10];
    for j in 0..10 {
        let dx = half_len * T::lit(XGK[j]);
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        let w = T::lit(WGK[j]);
        res_k += w * (f1 + f2);
        res_abs += w * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += T::lit(WG[j / 2]) * (f1 + f2);
        }
    }
    if !res_k.is_finite() {
        return Err(Error::numeric(format!(
            "integrand is not finite on [{a}, {b}]"
        )));
    }
    let mean = res_k * half;
    let mut res_asc = T::lit(WGK[10]) * (fc - mean).abs();
    for j in 0..10 {
        res_asc += T::lit(WGK[j]) * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let abs_h = half_len.abs();
    let integral = res_k * half_len;
    res_abs *= abs_h;
    res_asc *= abs_h;
    let mut err = ((res_k - res_g) * half_len).abs();
    if res_asc != T::zero() && err != T::zero() {
        err = res_asc * T::one().min((T::lit(200.0) * err / res_asc).powf(T::lit(1.5)));
    }
    let eps = T::epsilon();
    if res_abs > T::min_positive_value() / (T::lit(50.0) * eps) {
        err = err.max(T::lit(50.0) * eps * res_abs);
    }
    Ok((integral, err))
}

/// Adaptive integral of `f` over `[a, b]`; either limit may be infinite.
pub fn integrate<T: Real>(
    f: impl FnMut(T) -> T,
    a: T,
    b: T,
    settings: &QuadratureSettings<T>,
) -> Result<T> {
    integrate_with_breaks(f, &[a, b], settings)
}

/// Adaptive integral over consecutive pieces `[p0, p1], [p1, p2], …`.
///
/// Interior breakpoints must be finite; the outer ones may be infinite.
pub fn integrate_with_breaks<T: Real>(
    mut f: impl FnMut(T) -> T,
    points: &[T],
    settings: &QuadratureSettings<T>,
) -> Result<T> {
    if points.len() < 2 {
        return Err(Error::domain("integration needs at least two breakpoints"));
    }
    if points.iter().any(|p| p.is_nan()) {
        return Err(Error::domain("integration limits must not be NaN"));
    }
    let (lo, hi) = (points[0], points[points.len() - 1]);
    if lo == hi {
        return Ok(T::zero());
    }
    if lo > hi {
        let reversed: Vec<T> = points.iter().rev().copied().collect();
        return integrate_with_breaks(f, &reversed, settings).map(|v| -v);
    }
    if points.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::domain("breakpoints must be monotone"));
    }
    if lo.is_finite() && hi.is_finite() {
        return adapt(f, points, settings);
    }
    match compactified(&mut f, points, settings) {
        Err(Error::NonConvergence { .. }) => blockwise(&mut f, points, settings),
        other => other,
    }
}

// Infinite ranges mapped onto a bounded interval.
fn compactified<T: Real>(
    f: &mut impl FnMut(T) -> T,
    points: &[T],
    settings: &QuadratureSettings<T>,
) -> Result<T> {
    let one = T::one();
    let (lo, hi) = (points[0], points[points.len() - 1]);
    let inner = &points[1..points.len() - 1];
    if lo.is_infinite() && hi.is_infinite() {
        // x = t / (1 − t²) maps (−1, 1) onto the real line.
        let g = |t: T| {
            let d = one - t * t;
            f(t / d) * (one + t * t) / (d * d)
        };
        let mut tp = vec![-one];
        tp.extend(inner.iter().map(|&x| real_line_to_unit(x)));
        tp.push(one);
        return adapt(g, &tp, settings);
    }
    if hi.is_infinite() {
        // x = lo + t / (1 − t) on [0, 1).
        let g = |t: T| {
            let d = one - t;
            f(lo + t / d) / (d * d)
        };
        let mut tp = vec![T::zero()];
        tp.extend(inner.iter().map(|&x| {
            let y = x - lo;
            y / (one + y)
        }));
        tp.push(one);
        return adapt(g, &tp, settings);
    }
    // x = hi − (1 − t) / t on (0, 1].
    let g = |t: T| f(hi - (one - t) / t) / (t * t);
    let mut tp = vec![T::zero()];
    tp.extend(inner.iter().map(|&x| one / (one + hi - x)));
    tp.push(one);
    adapt(g, &tp, settings)
}

const MAX_TAIL_BLOCKS: usize = 400;

// Fallback for slowly decaying (algebraic) tails: the finite part is
// integrated directly and each infinite tail as a sum over blocks of doubling
// width, extrapolated with the epsilon algorithm.
fn blockwise<T: Real>(
    f: &mut impl FnMut(T) -> T,
    points: &[T],
    settings: &QuadratureSettings<T>,
) -> Result<T> {
    let mut finite: Vec<T> = points.iter().copied().filter(|p| p.is_finite()).collect();
    if finite.is_empty() {
        finite.push(T::zero());
    }
    let first = finite[0];
    let last = finite[finite.len() - 1];
    let mut total = if finite.len() > 1 {
        adapt(&mut *f, &finite, settings)?
    } else {
        T::zero()
    };
    if points[0].is_infinite() {
        total += tail_sum(f, first, -T::one(), settings)?;
    }
    if points[points.len() - 1].is_infinite() {
        total += tail_sum(f, last, T::one(), settings)?;
    }
    Ok(total)
}

// ∫ from `start` to ±∞ (direction `dir`) of `f`.
fn tail_sum<T: Real>(
    f: &mut impl FnMut(T) -> T,
    start: T,
    dir: T,
    settings: &QuadratureSettings<T>,
) -> Result<T> {
    let unit = start.abs().max(T::one());
    let mut a = start;
    let mut width = unit;
    let mut partial = Vec::new();
    let mut sum = T::zero();
    let mut quiet = 0;
    let mut last_extrapolation: Option<T> = None;
    for k in 0..MAX_TAIL_BLOCKS {
        let b = a + dir * width;
        if b.is_infinite() {
            break;
        }
        let block = adapt(&mut *f, &[a.min(b), a.max(b)], settings)?;
        sum += block;
        partial.push(sum);
        let tol = settings.abs_tol.max(settings.rel_tol * sum.abs());
        quiet = if block.abs() <= T::lit(1e-3) * tol { quiet + 1 } else { 0 };
        if quiet >= 3 && k >= 8 {
            return Ok(sum);
        }
        if partial.len() >= 6 {
            let window = &partial[partial.len().saturating_sub(40)..];
            let e = super::inversion::wynn_epsilon(window);
            if let Some(prev) = last_extrapolation {
                if (e - prev).abs() <= T::lit(0.1) * tol && (e - sum).abs() <= T::lit(1e3) * (block.abs() + tol) {
                    return Ok(e);
                }
            }
            last_extrapolation = Some(e);
        }
        a = b;
        width = width * T::lit(2.0);
    }
    Err(Error::NonConvergence {
        message: "tail integral did not settle".into(),
        partial: sum.as_f64(),
        error_estimate: last_extrapolation.map_or(T::infinity(), |e| (e - sum).abs()).as_f64(),
    })
}

fn real_line_to_unit<T: Real>(x: T) -> T {
    if x == T::zero() {
        return x;
    }
    // Root of x t² + t − x = 0 lying in (−1, 1).
    let two = T::lit(2.0);
    two * x / (T::one() + (T::one() + T::lit(4.0) * x * x).sqrt())
}

fn adapt<T: Real>(
    mut f: impl FnMut(T) -> T,
    points: &[T],
    settings: &QuadratureSettings<T>,
) -> Result<T> {
    let mut heap = BinaryHeap::new();
    let mut total = T::zero();
    let mut total_err = T::zero();
    for w in points.windows(2) {
        if w[0] == w[1] {
            continue;
        }
        let (estimate, error) = kronrod21(&mut f, w[0], w[1])?;
        total += estimate;
        total_err += error;
        heap.push(Segment {
            a: w[0],
            b: w[1],
            estimate,
            error,
        });
    }
    let mut frozen_err = T::zero();
    let mut subdivisions = heap.len();
    loop {
        let tol = settings.abs_tol.max(settings.rel_tol * total.abs());
        if total_err <= tol {
            return Ok(total);
        }
        let Some(seg) = heap.pop() else {
            break;
        };
        let mid = T::lit(0.5) * (seg.a + seg.b);
        let narrow = mid <= seg.a
            || mid >= seg.b
            || (seg.b - seg.a) <= T::lit(1e3) * T::epsilon() * seg.a.abs().max(seg.b.abs());
        if narrow {
            frozen_err += seg.error;
            if frozen_err > tol {
                break;
            }
            continue;
        }
        if subdivisions >= settings.max_subdivisions {
            heap.push(seg);
            break;
        }
        let (e1, r1) = kronrod21(&mut f, seg.a, mid)?;
        let (e2, r2) = kronrod21(&mut f, mid, seg.b)?;
        subdivisions += 1;
        total += e1 + e2 - seg.estimate;
        total_err += r1 + r2 - seg.error;
        heap.push(Segment {
            a: seg.a,
            b: mid,
            estimate: e1,
            error: r1,
        });
        heap.push(Segment {
            a: mid,
            b: seg.b,
            estimate: e2,
            error: r2,
        });
    }
    Err(Error::NonConvergence {
        message: format!("adaptive quadrature after {subdivisions} subdivisions"),
        partial: total.as_f64(),
        error_estimate: total_err.as_f64(),
    })
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    assert!(n >= 1, "Gauss-Legendre order must be positive");
    let mut nodes = vec![0.0f64; n];
    let mut weights = vec![0.0f64; n];
    let m = n.div_ceil(2);
    let nf = n as f64;
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                let jf = j as f64;
                p0 = ((2.0 * jf + 1.0) * z * p1 - jf * p2) / (jf + 1.0);
            }
            dp = nf * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (
        nodes.into_iter().map(T::lit).collect(),
        weights.into_iter().map(T::lit).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn settings() -> QuadratureSettings<f64> {
        QuadratureSettings::default()
    }

    #[test]
    fn unit_square() {
        let v = integrate(|x: f64| x * x, 0.0, 1.0, &settings()).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn normal_density_over_real_line() {
        let phi = |x: f64| (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let v = integrate(phi, f64::NEG_INFINITY, f64::INFINITY, &settings()).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn half_lines() {
        let v = integrate(|x: f64| (-x).exp(), 0.0, f64::INFINITY, &settings()).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
        let w = integrate(|x: f64| x.exp(), f64::NEG_INFINITY, 0.0, &settings()).unwrap();
        assert!((w - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let v = integrate(|x: f64| x, 1.0, 0.0, &settings()).unwrap();
        assert!((v + 0.5).abs() < 1e-15);
    }

    #[test]
    fn endpoint_singularity() {
        let v = integrate(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, &settings()).unwrap();
        assert!((v - 2.0).abs() < 1e-9);
    }

    #[test]
    fn non_integrable_reports_partial_estimate() {
        let s = QuadratureSettings::new(1e-10, 1e-10, 50).unwrap();
        match integrate(|x: f64| 1.0 / x, 0.0, 1.0, &s) {
            Err(Error::NonConvergence { partial, .. }) => assert!(partial > 1.0),
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }

    #[test]
    fn breakpoints_on_real_line() {
        let f = |x: f64| (-x.abs()).exp();
        let v = integrate_with_breaks(f, &[f64::NEG_INFINITY, 0.0, f64::INFINITY], &settings())
            .unwrap();
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn gauss_legendre_exactness() {
        for n in [1usize, 4, 16] {
            let (x, w) = gauss_legendre::<f64>(n);
            for d in 0..(2 * n) {
                let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(d as i32)).sum();
                let exact = if d % 2 == 0 { 2.0 / (d as f64 + 1.0) } else { 0.0 };
                assert!((s - exact).abs() < 1e-13, "n={n} d={d}");
            }
        }
    }
}
