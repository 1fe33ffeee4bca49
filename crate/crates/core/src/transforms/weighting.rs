use serde::{Deserialize, Serialize};

use crate::distributions::{DistributionSpec, Family};
use crate::error::{Error, Result};
use crate::numerics::{erfc_inv, find_root_with, norm_cdf};
use crate::real::Real;

/// Smallest Tversky–Kahneman exponent for which `u^γ / (u^γ + (1−u)^γ)^{1/γ}`
/// is increasing on the whole unit interval. Below it the curve dips near
/// `u = 1`.
pub const TK_GAMMA_MIN: f64 = 0.279_204_247_014_938_54;

/// Parameters of a probability weighting function `w: (0,1) → (0,1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", bound = "T: Real")]
pub enum WeightingKind<T> {
    /// `u^γ / (u^γ + (1−u)^γ)^{1/γ}`, `γ > TK_GAMMA_MIN`.
    Tk { gamma: T },
    /// `a u^γ / (a u^γ + (1−u)^γ)`, `γ > 0`, `a > 1`.
    GoldsteinEinhorn { gamma: T, a: T },
    /// `exp(−(−δ ln u)^ρ)`.
    Prelec { delta: T, rho: T },
    /// `1 − exp(−(−δ ln(1−u))^ρ)`.
    ModifiedPrelec { delta: T, rho: T },
    /// `exp(−(η/γ)(1 − u^γ))`. Does not vanish at 0: `w(0⁺) = e^{−η/γ}`.
    PrelecExpPower { gamma: T, eta: T },
    /// `(1 − γ ln u)^{−η/γ}`.
    PrelecHyperLog { gamma: T, eta: T },
    /// `exp(−β((1−u)/u)^α)`.
    Luce { alpha: T, beta: T },
    /// `u ↦ F_post(F_prior⁻¹(u))`, the weighting that carries `prior` to `post`.
    Composed {
        prior: DistributionSpec<T>,
        post: DistributionSpec<T>,
    },
}

/// A validated probability weighting function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WeightingKind<T>", into = "WeightingKind<T>", bound = "T: Real")]
pub struct WeightingFunction<T> {
    kind: WeightingKind<T>,
}

impl<T: Real> TryFrom<WeightingKind<T>> for WeightingFunction<T> {
    type Error = Error;

    fn try_from(kind: WeightingKind<T>) -> Result<Self> {
        WeightingFunction::new(kind)
    }
}

impl<T: Real> From<WeightingFunction<T>> for WeightingKind<T> {
    fn from(w: WeightingFunction<T>) -> Self {
        w.kind
    }
}

fn positive<T: Real>(name: &str, v: T) -> Result<()> {
    if v > T::zero() && v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be positive and finite, got {v}")))
    }
}

impl<T: Real> WeightingFunction<T> {
    pub fn new(kind: WeightingKind<T>) -> Result<Self> {
        use WeightingKind::*;
        match kind {
            Tk { gamma } => {
                if !(gamma > T::lit(TK_GAMMA_MIN) && gamma.is_finite()) {
                    return Err(Error::domain(format!(
                        "tk gamma must exceed {TK_GAMMA_MIN} for a monotone weighting, got {gamma}"
                    )));
                }
            }
            GoldsteinEinhorn { gamma, a } => {
                positive("goldstein_einhorn gamma", gamma)?;
                if !(a > T::one() && a.is_finite()) {
                    return Err(Error::domain(format!("goldstein_einhorn a must exceed 1, got {a}")));
                }
            }
            Prelec { delta, rho } | ModifiedPrelec { delta, rho } => {
                positive("prelec delta", delta)?;
                positive("prelec rho", rho)?;
            }
            PrelecExpPower { gamma, eta } | PrelecHyperLog { gamma, eta } => {
                positive("prelec gamma", gamma)?;
                positive("prelec eta", eta)?;
            }
            Luce { alpha, beta } => {
                positive("luce alpha", alpha)?;
                positive("luce beta", beta)?;
            }
            Composed { .. } => {}
        }
        Ok(WeightingFunction { kind })
    }

    pub fn tk(gamma: T) -> Result<Self> {
        Self::new(WeightingKind::Tk { gamma })
    }

    pub fn goldstein_einhorn(gamma: T, a: T) -> Result<Self> {
        Self::new(WeightingKind::GoldsteinEinhorn { gamma, a })
    }

    pub fn prelec(delta: T, rho: T) -> Result<Self> {
        Self::new(WeightingKind::Prelec { delta, rho })
    }

    pub fn modified_prelec(delta: T, rho: T) -> Result<Self> {
        Self::new(WeightingKind::ModifiedPrelec { delta, rho })
    }

    pub fn prelec_exp_power(gamma: T, eta: T) -> Result<Self> {
        Self::new(WeightingKind::PrelecExpPower { gamma, eta })
    }

    pub fn prelec_hyper_log(gamma: T, eta: T) -> Result<Self> {
        Self::new(WeightingKind::PrelecHyperLog { gamma, eta })
    }

    pub fn luce(alpha: T, beta: T) -> Result<Self> {
        Self::new(WeightingKind::Luce { alpha, beta })
    }

    /// The weighting solving `F_post = w ∘ F_prior`. Every catalog cdf is
    /// continuous and strictly increasing on its support, so this cannot fail.
    pub fn from_cdfs(prior: DistributionSpec<T>, post: DistributionSpec<T>) -> Self {
        WeightingFunction {
            kind: WeightingKind::Composed { prior, post },
        }
    }

    pub fn kind(&self) -> &WeightingKind<T> {
        &self.kind
    }

    /// Rewrites Gumbel→Gumbel and NegGumbel→NegGumbel compositions as the
    /// Prelec and modified Prelec functions they equal.
    pub fn as_named(&self) -> Self {
        let WeightingKind::Composed { prior, post } = self.kind else {
            return *self;
        };
        let kind = match (*prior.family(), *post.family()) {
            (Family::Gumbel { mu, rho }, Family::Gumbel { mu: mu2, rho: rho2 }) => WeightingKind::Prelec {
                delta: ((mu2 - mu) / rho).exp(),
                rho: rho / rho2,
            },
            (Family::NegGumbel { mu, rho }, Family::NegGumbel { mu: mu2, rho: rho2 }) => {
                WeightingKind::ModifiedPrelec {
                    delta: ((mu - mu2) / rho).exp(),
                    rho: rho / rho2,
                }
            }
            _ => return *self,
        };
        WeightingFunction { kind }
    }

    /// `w(u)` for `u` strictly inside `(0, 1)`.
    pub fn eval(&self, u: T) -> Result<T> {
        check_unit(u)?;
        let one = T::one();
        let v = match self.kind {
            WeightingKind::Tk { gamma } => {
                let a = u.powf(gamma);
                a / (a + (one - u).powf(gamma)).powf(one / gamma)
            }
            WeightingKind::GoldsteinEinhorn { gamma, a } => {
                let p = a * u.powf(gamma);
                p / (p + (one - u).powf(gamma))
            }
            WeightingKind::Prelec { delta, rho } => (-(-delta * u.ln()).powf(rho)).exp(),
            WeightingKind::ModifiedPrelec { delta, rho } => -(-(-delta * (-u).ln_1p()).powf(rho)).exp_m1(),
            WeightingKind::PrelecExpPower { gamma, eta } => (-(eta / gamma) * (one - u.powf(gamma))).exp(),
            WeightingKind::PrelecHyperLog { gamma, eta } => (one - gamma * u.ln()).powf(-eta / gamma),
            WeightingKind::Luce { alpha, beta } => (-beta * ((one - u) / u).powf(alpha)).exp(),
            WeightingKind::Composed { prior, post } => match closed_form(&prior, &post, u) {
                Some(v) => v,
                None => post.cdf(prior.quantile(u)?),
            },
        };
        Ok(v)
    }

    /// `1 − w(1 − s)` for `s` in `(0, 1)`, without cancellation when `w` is near 1.
    pub fn eval_complement(&self, s: T) -> Result<T> {
        check_unit(s)?;
        let one = T::one();
        let ln_u = (-s).ln_1p();
        let from_ln_w = |ln_w: T| -ln_w.exp_m1();
        let v = match self.kind {
            WeightingKind::Tk { gamma } => {
                let a = gamma * ln_u;
                let ln_sum = (a.exp_m1() + s.powf(gamma)).ln_1p();
                from_ln_w(a - ln_sum / gamma)
            }
            WeightingKind::GoldsteinEinhorn { gamma, a } => {
                let q = s.powf(gamma);
                q / (a * (gamma * ln_u).exp() + q)
            }
            WeightingKind::Prelec { delta, rho } => from_ln_w(-(-delta * ln_u).powf(rho)),
            WeightingKind::ModifiedPrelec { delta, rho } => (-(-delta * s.ln()).powf(rho)).exp(),
            WeightingKind::PrelecExpPower { gamma, eta } => from_ln_w((eta / gamma) * (gamma * ln_u).exp_m1()),
            WeightingKind::PrelecHyperLog { gamma, eta } => from_ln_w(-(eta / gamma) * (-gamma * ln_u).ln_1p()),
            WeightingKind::Luce { alpha, beta } => from_ln_w(-beta * (s / (one - s)).powf(alpha)),
            WeightingKind::Composed { prior, post } => post.sf(prior.isf(s)?),
        };
        Ok(v)
    }

    /// `w(u)` evaluated as `F_post(F_prior⁻¹(u))` even where a closed form exists.
    pub fn eval_generic(&self, u: T) -> Result<T> {
        match self.kind {
            WeightingKind::Composed { prior, post } => {
                check_unit(u)?;
                Ok(post.cdf(prior.quantile(u)?))
            }
            _ => self.eval(u),
        }
    }

    /// `w⁻¹(v)` by root finding in logit coordinates.
    pub fn inverse(&self, v: T) -> Result<T> {
        check_unit(v)?;
        let logistic = |t: T| T::one() / (T::one() + (-t).exp());
        let f = |t: T| match self.eval(logistic(t)) {
            Ok(w) => w - v,
            Err(_) => if t < T::zero() { -T::one() } else { T::one() },
        };
        let (lo, hi) = (T::lit(-740.0), T::lit(36.0));
        if f(lo) >= T::zero() {
            return Ok(logistic(lo));
        }
        if f(hi) <= T::zero() {
            return Ok(logistic(hi));
        }
        let t = find_root_with(f, lo, hi, T::lit(1e-13), T::zero())?;
        Ok(logistic(t))
    }
}

fn check_unit<T: Real>(u: T) -> Result<()> {
    if u > T::zero() && u < T::one() {
        Ok(())
    } else {
        Err(Error::domain(format!("weighting argument must lie in (0, 1), got {u}")))
    }
}

// Closed forms of F_post ∘ F_prior⁻¹ for the family pairs that have one.
fn closed_form<T: Real>(prior: &DistributionSpec<T>, post: &DistributionSpec<T>, u: T) -> Option<T> {
    use Family::*;
    let one = T::one();
    let half = T::lit(0.5);
    let two = T::lit(2.0);
    let odds = (one - u) / u;
    let gauss_x = |mu: T, sigma: T| erfc_inv(two * u).ok().map(|e| mu - T::SQRT_2() * sigma * e);
    let v = match (*prior.family(), *post.family()) {
        (Logistic { m, rho }, Logistic { m: m2, rho: rho2 }) => {
            let c = (-(m - m2) / rho2).exp();
            one / (one + c * odds.powf(rho / rho2))
        }
        (Logistic { m, rho }, Gumbel { mu, rho: rho2 }) => {
            let c = ((mu - m) / rho2).exp();
            (-c * odds.powf(rho / rho2)).exp()
        }
        (DoublePareto { rho }, DoublePareto { rho: rho2 }) => {
            let g = (one - rho2) / (one - rho);
            if u < half {
                half * (two * u).powf(g)
            } else {
                one - half * (two - two * u).powf(g)
            }
        }
        (DoublePareto { rho }, Laplace { m, b }) => {
            let x = if u < half {
                one - (two * u).powf(one / (one - rho))
            } else {
                (two - two * u).powf(one / (one - rho)) - one
            };
            laplace_cdf(x, m, b)
        }
        (Cauchy { c }, Cauchy { c: c2 }) => half + ((c / c2) * (T::PI() * (u - half)).tan()).atan() / T::PI(),
        (Cauchy { c }, Gumbel { mu, rho }) => {
            let x = c * (T::PI() * (u - half)).tan();
            (-(-(x - mu) / rho).exp()).exp()
        }
        (Laplace { m, b }, Laplace { m: m2, b: b2 }) if m == m2 => {
            if u < half {
                half * (two * u).powf(b / b2)
            } else {
                one - half * (two - two * u).powf(b / b2)
            }
        }
        (Gaussian { mu, sigma }, Gaussian { mu: mu2, sigma: sigma2 }) => norm_cdf((gauss_x(mu, sigma)? - mu2) / sigma2),
        (Gaussian { mu, sigma }, NegGumbel { mu: mu2, rho }) => {
            -(-((gauss_x(mu, sigma)? - mu2) / rho).exp()).exp_m1()
        }
        (Gaussian { mu, sigma }, Logistic { m, rho }) => one / (one + (-(gauss_x(mu, sigma)? - m) / rho).exp()),
        (Gumbel { mu, rho }, Gumbel { mu: mu2, rho: rho2 }) => {
            let delta = ((mu2 - mu) / rho).exp();
            (-(-delta * u.ln()).powf(rho / rho2)).exp()
        }
        (NegGumbel { mu, rho }, NegGumbel { mu: mu2, rho: rho2 }) => {
            let delta = ((mu - mu2) / rho).exp();
            -(-(-delta * (-u).ln_1p()).powf(rho / rho2)).exp_m1()
        }
        _ => return None,
    };
    Some(v)
}

fn laplace_cdf<T: Real>(x: T, m: T, b: T) -> T {
    let z = (x - m) / b;
    if z < T::zero() {
        T::lit(0.5) * z.exp()
    } else {
        T::one() - T::lit(0.5) * (-z).exp()
    }
}
