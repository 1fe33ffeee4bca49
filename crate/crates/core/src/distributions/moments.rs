use serde::{Deserialize, Serialize};

use super::{DistributionSpec, Family};
use crate::numerics::{ln_gamma, EULER_MASCHERONI, ZETA3};
use crate::real::Real;

/// First four standardized moments. `None` marks a moment that does not
/// exist for the family (heavy tails); it serializes as `null`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct MomentSummary<T> {
    pub mean: Option<T>,
    pub variance: Option<T>,
    pub skewness: Option<T>,
    pub excess_kurtosis: Option<T>,
}

impl<T: Real> MomentSummary<T> {
    fn all(mean: T, variance: T, skewness: T, excess_kurtosis: T) -> Self {
        MomentSummary {
            mean: Some(mean),
            variance: Some(variance),
            skewness: Some(skewness),
            excess_kurtosis: Some(excess_kurtosis),
        }
    }

    pub fn std(&self) -> Option<T> {
        self.variance.map(T::sqrt)
    }
}

impl<T: Real> DistributionSpec<T> {
    pub fn moments(&self) -> MomentSummary<T> {
        let lit = T::lit;
        let pi2 = T::PI() * T::PI();
        let gumbel_skew = lit(12.0 * 6f64.sqrt() * ZETA3) / (pi2 * T::PI());
        match self.family {
            Family::Laplace { m, b } => MomentSummary::all(m, lit(2.0) * b * b, T::zero(), lit(3.0)),
            Family::Logistic { m, rho } => MomentSummary::all(m, pi2 * rho * rho / lit(3.0), T::zero(), lit(1.2)),
            Family::Gumbel { mu, rho } => MomentSummary::all(
                mu + rho * lit(EULER_MASCHERONI),
                pi2 * rho * rho / lit(6.0),
                gumbel_skew,
                lit(2.4),
            ),
            Family::NegGumbel { mu, rho } => MomentSummary::all(
                mu - rho * lit(EULER_MASCHERONI),
                pi2 * rho * rho / lit(6.0),
                -gumbel_skew,
                lit(2.4),
            ),
            Family::Gaussian { mu, sigma } => MomentSummary::all(mu, sigma * sigma, T::zero(), T::zero()),
            Family::Uniform { lo, hi } => {
                let w = hi - lo;
                MomentSummary::all(lit(0.5) * (lo + hi), w * w / lit(12.0), T::zero(), lit(-1.2))
            }
            Family::Cauchy { .. } => MomentSummary {
                mean: None,
                variance: None,
                skewness: None,
                excess_kurtosis: None,
            },
            Family::DoublePareto { rho } => {
                // E|X|^k < ∞ iff k < ρ − 1.
                let has = |k: f64| rho > lit(k + 1.0);
                let m2 = lit(2.0) / ((rho - lit(2.0)) * (rho - lit(3.0)));
                let m4 = lit(24.0) / ((rho - lit(2.0)) * (rho - lit(3.0)) * (rho - lit(4.0)) * (rho - lit(5.0)));
                MomentSummary {
                    mean: has(1.0).then(T::zero),
                    variance: has(2.0).then_some(m2),
                    skewness: has(3.0).then(T::zero),
                    excess_kurtosis: has(4.0).then(|| m4 / (m2 * m2) - lit(3.0)),
                }
            }
            Family::Weibull { gamma, delta } => from_raw(|k| {
                let lg0 = ln_gamma(T::one() + lit(k) / gamma).ok()?;
                Some(delta.powi(k as i32) * lg0.exp())
            }),
            Family::GenGamma { gamma, delta } => from_raw(|k| {
                // E X^k = Γ(δ + k/γ) / Γ(δ), finite iff δ + k/γ > 0.
                let a = delta + lit(k) / gamma;
                if !(a > T::zero()) {
                    return None;
                }
                Some((ln_gamma(a).ok()? - ln_gamma(delta).ok()?).exp())
            }),
        }
    }
}

// Central moments from raw moments E X^k, k = 1..4.
fn from_raw<T: Real>(raw: impl Fn(f64) -> Option<T>) -> MomentSummary<T> {
    let m1 = raw(1.0);
    let m2 = raw(2.0);
    let m3 = raw(3.0);
    let m4 = raw(4.0);
    let variance = m1.zip(m2).map(|(a, b)| (b - a * a).max(T::zero()));
    let skewness = m1.zip(variance).zip(m3).map(|((a, v), c)| {
        (c - T::lit(3.0) * a * v - a * a * a) / (v * v.sqrt())
    });
    let excess_kurtosis = m1.zip(variance).zip(m2.zip(m3)).zip(m4).map(|(((a, v), (b, c)), d)| {
        let central4 = d - T::lit(4.0) * a * c + T::lit(6.0) * a * a * b - T::lit(3.0) * a * a * a * a;
        central4 / (v * v) - T::lit(3.0)
    });
    MomentSummary {
        mean: m1,
        variance,
        skewness,
        excess_kurtosis,
    }
}
