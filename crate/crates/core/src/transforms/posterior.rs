use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Open01;
use serde::{Deserialize, Serialize};

use super::WeightingFunction;
use crate::distributions::DistributionSpec;
use crate::error::{Error, Result};
use crate::numerics::{integrate_with_breaks, QuadratureSettings, EULER_MASCHERONI};
use crate::real::Real;

/// Tail mass below which `posterior_stats` stops extending its range.
pub const TAIL_MASS: f64 = 1e-12;
/// Grid size of [`classify_disposition`].
pub const DISPOSITION_GRID: usize = 199;
/// Curvature below which [`classify_disposition`] treats `w″` as zero.
pub const DISPOSITION_TOL: f64 = 1e-9;

/// The distorted cdf `x ↦ w(F_prior(x))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct PenalizedCdf<T> {
    pub weighting: WeightingFunction<T>,
    pub prior: DistributionSpec<T>,
}

impl<T: Real> PenalizedCdf<T> {
    pub fn new(weighting: WeightingFunction<T>, prior: DistributionSpec<T>) -> Self {
        PenalizedCdf { weighting, prior }
    }

    /// In the upper half this goes through the survival side, so a prior CDF
    /// that rounds to 1 does not saturate the distorted one.
    pub fn cdf(&self, x: T) -> T {
        let u = self.prior.cdf(x);
        if u <= T::zero() {
            T::zero()
        } else if u > T::lit(0.5) {
            T::one() - self.sf(x)
        } else {
            self.weighting.eval(u).unwrap_or(u)
        }
    }

    /// `1 − F(x)`, computed from the prior's survival function.
    pub fn sf(&self, x: T) -> T {
        let s = self.prior.sf(x);
        if s <= T::zero() {
            T::zero()
        } else if s >= T::one() {
            T::one()
        } else {
            self.weighting.eval_complement(s).unwrap_or(s)
        }
    }

    pub fn quantile(&self, v: T) -> Result<T> {
        self.prior.quantile(self.weighting.inverse(v)?)
    }

    /// Inverse-transform draws, reproducible for a given `seed`.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Vec<T>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                let u: f64 = rng.sample(Open01);
                self.quantile(T::lit(u))
            })
            .collect()
    }
}

/// Mean, dispersion and information ratio (zero benchmark) of a return law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct PosteriorStats<T> {
    pub mean: T,
    pub variance: T,
    pub std: T,
    /// `mean / std`; `None` for a degenerate law.
    pub information_ratio: Option<T>,
}

impl<T: Real> PosteriorStats<T> {
    fn from_moments(mean: T, variance: T) -> Self {
        let variance = variance.max(T::zero());
        let std = variance.sqrt();
        PosteriorStats {
            mean,
            variance,
            std,
            information_ratio: (std > T::zero()).then(|| mean / std),
        }
    }
}

/// Moments of a penalized cdf from tail integrals of `F` and `1 − F`.
///
/// The range starts at `support_hint` and is widened until the mass outside
/// is below [`TAIL_MASS`] on both sides.
pub fn posterior_stats<T: Real>(penalized: &PenalizedCdf<T>, support_hint: (T, T)) -> Result<PosteriorStats<T>> {
    let (mut lo, mut hi) = support_hint;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::domain(format!("support hint must be a finite interval, got [{lo}, {hi}]")));
    }
    let tail = T::lit(TAIL_MASS);
    let cdf = |x: T| penalized.cdf(x);
    let sf = |x: T| penalized.sf(x);
    let mut width = hi - lo;
    let mut steps = 0;
    while cdf(lo) >= tail || sf(hi) >= tail {
        if steps == 200 || !width.is_finite() {
            return Err(Error::numeric(format!(
                "tail mass stays above {TAIL_MASS} beyond [{lo}, {hi}]"
            )));
        }
        if cdf(lo) >= tail {
            lo -= width;
        }
        if sf(hi) >= tail {
            hi += width;
        }
        width = width + width;
        steps += 1;
    }

    // Expand about c = clamp(0): E X = c + ∫_c^hi (1−F) − ∫_lo^c F.
    let c = T::zero().max(lo).min(hi);
    let mut breaks = vec![lo, c, hi];
    for p in [support_hint.0, support_hint.1] {
        if p > lo && p < hi && p != c {
            breaks.push(p);
        }
    }
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let settings = QuadratureSettings::default().with_tolerance(T::lit(1e-11));
    let split = |x: T| x >= c;
    let m1 = integrate_with_breaks(
        |x| if split(x) { sf(x) } else { -cdf(x) },
        &breaks,
        &settings,
    )?;
    let m2 = integrate_with_breaks(
        |x| {
            let d = x - c;
            if split(x) {
                T::lit(2.0) * d * sf(x)
            } else {
                -T::lit(2.0) * d * cdf(x)
            }
        },
        &breaks,
        &settings,
    )?;
    Ok(PosteriorStats::from_moments(c + m1, m2 - m1 * m1))
}

/// Negative Gumbel law after a modified Prelec distortion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct MpwpfPosterior<T> {
    pub mu: T,
    pub rho: T,
    /// Change in information ratio relative to the undistorted law.
    pub ir_shift: T,
}

/// Distorting `NegGumbel{μ, ϱ}` by `ModifiedPrelec{δ, ρ}` gives
/// `NegGumbel{μ − ϱ ln δ, ϱ/ρ}`.
pub fn mpwpf_posterior<T: Real>(mu: T, varrho: T, delta: T, rho: T) -> Result<MpwpfPosterior<T>> {
    for (name, v) in [("varrho", varrho), ("delta", delta), ("rho", rho)] {
        if !(v > T::zero() && v.is_finite()) {
            return Err(Error::domain(format!("{name} must be positive and finite, got {v}")));
        }
    }
    if !mu.is_finite() {
        return Err(Error::domain("mu must be finite"));
    }
    let mu2 = mu - varrho * delta.ln();
    let rho2 = varrho / rho;
    let ir = |m: T, s: T| (m - s * T::lit(EULER_MASCHERONI)) / (T::PI() * s / T::lit(6f64.sqrt()));
    Ok(MpwpfPosterior {
        mu: mu2,
        rho: rho2,
        ir_shift: ir(mu2, rho2) - ir(mu, varrho),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Disposition {
    /// Concave then convex: small probabilities overweighted, large ones discounted.
    Fearful,
    /// Convex then concave.
    Greedy,
    Neutral,
    Mixed,
}

impl Disposition {
    pub fn as_str(&self) -> &'static str {
        match self {
            Disposition::Fearful => "fearful",
            Disposition::Greedy => "greedy",
            Disposition::Neutral => "neutral",
            Disposition::Mixed => "mixed",
        }
    }
}

/// Curvature pattern of `w` from central second differences on the grid
/// `k / 200`, `k = 1..199`.
pub fn classify_disposition<T: Real>(w: &WeightingFunction<T>) -> Disposition {
    let n = DISPOSITION_GRID + 1;
    let h = 1.0 / n as f64;
    let values: Option<Vec<f64>> = (1..n)
        .map(|k| w.eval(T::lit(k as f64 * h)).ok().map(T::as_f64))
        .collect();
    let Some(values) = values else {
        return Disposition::Mixed;
    };
    let mut runs: Vec<bool> = Vec::new();
    for win in values.windows(3) {
        let d2 = (win[2] - 2.0 * win[1] + win[0]) / (h * h);
        if !d2.is_finite() {
            return Disposition::Mixed;
        }
        if d2.abs() < DISPOSITION_TOL {
            continue;
        }
        let convex = d2 > 0.0;
        if runs.last() != Some(&convex) {
            runs.push(convex);
        }
    }
    match runs.as_slice() {
        [] => Disposition::Neutral,
        [false, true] => Disposition::Fearful,
        [true, false] => Disposition::Greedy,
        _ => Disposition::Mixed,
    }
}

/// Whether `a` first-order stochastically dominates `b` on a grid spanning
/// the joint 1e-6 … 1 − 1e-6 quantile range.
pub fn fosd_check<T: Real>(a: &DistributionSpec<T>, b: &DistributionSpec<T>, grid_points: usize) -> Result<bool> {
    if grid_points < 100 {
        return Err(Error::domain(format!("fosd grid needs at least 100 points, got {grid_points}")));
    }
    let (p, q) = (T::lit(1e-6), T::lit(1.0 - 1e-6));
    let lo = a.quantile(p)?.min(b.quantile(p)?);
    let hi = a.quantile(q)?.max(b.quantile(q)?);
    let slack = T::lit(1e-12);
    let step = (hi - lo) / T::lit((grid_points - 1) as f64);
    Ok((0..grid_points).all(|k| {
        let x = lo + step * T::lit(k as f64);
        a.cdf(x) <= b.cdf(x) + slack
    }))
}
