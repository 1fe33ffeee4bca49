//! Parametric return distributions: pdf, cdf, quantile, characteristic
//! function, mgf, moments and seeded sampling.

mod analytic;
mod moments;
mod sample;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::Real;

pub use moments::MomentSummary;

/// Parameters of one catalog family.
///
/// Build a [`DistributionSpec`] from it with [`DistributionSpec::new`] (or the
/// named constructors), which checks the constraints listed per variant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", bound = "T: Real")]
pub enum Family<T> {
    /// Density `e^{−|x−m|/b} / (2b)`, `b > 0`.
    Laplace { m: T, b: T },
    /// `F(x) = 1 / (1 + e^{−(x−m)/ρ})`, `ρ > 0`.
    Logistic { m: T, rho: T },
    /// `F(x) = exp(−e^{−(x−μ)/ρ})`, `ρ > 0`.
    Gumbel { mu: T, rho: T },
    /// `F(x) = 1 − exp(−e^{(x−μ)/ρ})`, `ρ > 0`.
    NegGumbel { mu: T, rho: T },
    /// Density `(ρ−1)(1+|x|)^{−ρ} / 2`, `ρ > 1`.
    DoublePareto { rho: T },
    /// Centered Cauchy with scale `c > 0`.
    Cauchy { c: T },
    Gaussian { mu: T, sigma: T },
    /// `F(x) = 1 − exp(−(x/δ)^γ)` on `x > 0`, `γ, δ > 0`.
    Weibull { gamma: T, delta: T },
    /// Density `|γ| x^{γδ−1} e^{−x^γ} / Γ(δ)` on `x > 0`, `γ ≠ 0`, `δ > 0`.
    GenGamma { gamma: T, delta: T },
    Uniform { lo: T, hi: T },
}

/// A validated member of the distribution catalog.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Family<T>", into = "Family<T>", bound = "T: Real")]
pub struct DistributionSpec<T> {
    family: Family<T>,
}

impl<T: Real> TryFrom<Family<T>> for DistributionSpec<T> {
    type Error = Error;

    fn try_from(family: Family<T>) -> Result<Self> {
        DistributionSpec::new(family)
    }
}

impl<T: Real> From<DistributionSpec<T>> for Family<T> {
    fn from(spec: DistributionSpec<T>) -> Self {
        spec.family
    }
}

fn finite<T: Real>(name: &str, v: T) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be finite, got {v}")))
    }
}

fn positive<T: Real>(name: &str, v: T) -> Result<()> {
    if v > T::zero() && v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} must be positive and finite, got {v}")))
    }
}

impl<T: Real> DistributionSpec<T> {
    pub fn new(family: Family<T>) -> Result<Self> {
        use Family::*;
        match family {
            Laplace { m, b } => {
                finite("laplace m", m)?;
                positive("laplace b", b)?;
            }
            Logistic { m, rho } => {
                finite("logistic m", m)?;
                positive("logistic rho", rho)?;
            }
            Gumbel { mu, rho } | NegGumbel { mu, rho } => {
                finite("gumbel mu", mu)?;
                positive("gumbel rho", rho)?;
            }
            DoublePareto { rho } => {
                if !(rho > T::one() && rho.is_finite()) {
                    return Err(Error::domain(format!("double pareto rho must exceed 1, got {rho}")));
                }
            }
            Cauchy { c } => positive("cauchy c", c)?,
            Gaussian { mu, sigma } => {
                finite("gaussian mu", mu)?;
                positive("gaussian sigma", sigma)?;
            }
            Weibull { gamma, delta } => {
                positive("weibull gamma", gamma)?;
                positive("weibull delta", delta)?;
            }
            GenGamma { gamma, delta } => {
                finite("gen_gamma gamma", gamma)?;
                if gamma == T::zero() {
                    return Err(Error::domain("gen_gamma gamma must be nonzero"));
                }
                positive("gen_gamma delta", delta)?;
            }
            Uniform { lo, hi } => {
                finite("uniform lo", lo)?;
                finite("uniform hi", hi)?;
                if !(hi > lo) {
                    return Err(Error::domain(format!("uniform needs lo < hi, got [{lo}, {hi}]")));
                }
            }
        }
        Ok(DistributionSpec { family })
    }

    pub fn laplace(m: T, b: T) -> Result<Self> {
        Self::new(Family::Laplace { m, b })
    }

    pub fn logistic(m: T, rho: T) -> Result<Self> {
        Self::new(Family::Logistic { m, rho })
    }

    pub fn gumbel(mu: T, rho: T) -> Result<Self> {
        Self::new(Family::Gumbel { mu, rho })
    }

    pub fn neg_gumbel(mu: T, rho: T) -> Result<Self> {
        Self::new(Family::NegGumbel { mu, rho })
    }

    pub fn double_pareto(rho: T) -> Result<Self> {
        Self::new(Family::DoublePareto { rho })
    }

    pub fn cauchy(c: T) -> Result<Self> {
        Self::new(Family::Cauchy { c })
    }

    pub fn gaussian(mu: T, sigma: T) -> Result<Self> {
        Self::new(Family::Gaussian { mu, sigma })
    }

    pub fn weibull(gamma: T, delta: T) -> Result<Self> {
        Self::new(Family::Weibull { gamma, delta })
    }

    pub fn gen_gamma(gamma: T, delta: T) -> Result<Self> {
        Self::new(Family::GenGamma { gamma, delta })
    }

    pub fn uniform(lo: T, hi: T) -> Result<Self> {
        Self::new(Family::Uniform { lo, hi })
    }

    pub fn family(&self) -> &Family<T> {
        &self.family
    }

    /// Snake-case family name as used in JSON.
    pub fn name(&self) -> &'static str {
        match self.family {
            Family::Laplace { .. } => "laplace",
            Family::Logistic { .. } => "logistic",
            Family::Gumbel { .. } => "gumbel",
            Family::NegGumbel { .. } => "neg_gumbel",
            Family::DoublePareto { .. } => "double_pareto",
            Family::Cauchy { .. } => "cauchy",
            Family::Gaussian { .. } => "gaussian",
            Family::Weibull { .. } => "weibull",
            Family::GenGamma { .. } => "gen_gamma",
            Family::Uniform { .. } => "uniform",
        }
    }

    /// Closed support `[lo, hi]`, with infinite ends where unbounded.
    pub fn support(&self) -> (T, T) {
        match self.family {
            Family::Weibull { .. } | Family::GenGamma { .. } => (T::zero(), T::infinity()),
            Family::Uniform { lo, hi } => (lo, hi),
            _ => (T::neg_infinity(), T::infinity()),
        }
    }

    /// Location parameter (median for the symmetric families).
    pub fn location(&self) -> T {
        match self.family {
            Family::Laplace { m, .. } | Family::Logistic { m, .. } => m,
            Family::Gumbel { mu, .. } | Family::NegGumbel { mu, .. } | Family::Gaussian { mu, .. } => mu,
            Family::DoublePareto { .. } | Family::Cauchy { .. } => T::zero(),
            Family::Weibull { .. } | Family::GenGamma { .. } => {
                self.quantile(T::lit(0.5)).expect("median is interior")
            }
            Family::Uniform { lo, hi } => T::lit(0.5) * (lo + hi),
        }
    }

    /// Natural scale parameter of the family.
    pub fn scale(&self) -> T {
        match self.family {
            Family::Laplace { b, .. } => b,
            Family::Logistic { rho, .. } | Family::Gumbel { rho, .. } | Family::NegGumbel { rho, .. } => rho,
            Family::DoublePareto { .. } => T::one(),
            Family::Cauchy { c } => c,
            Family::Gaussian { sigma, .. } => sigma,
            Family::Weibull { delta, .. } => delta,
            Family::GenGamma { .. } => {
                let q = |u: f64| self.quantile(T::lit(u)).expect("interior quantile");
                q(0.75) - q(0.25)
            }
            Family::Uniform { lo, hi } => hi - lo,
        }
    }

    /// Infinite divisibility of the family at these parameters.
    ///
    /// Weibull is infinitely divisible for `γ ≤ 1` and the generalized gamma
    /// for `|γ| ≤ 1`; the endpoints are the exponential, gamma and
    /// inverse-gamma laws.
    pub fn is_infinitely_divisible(&self) -> bool {
        match self.family {
            Family::Weibull { gamma, .. } => gamma <= T::one(),
            Family::GenGamma { gamma, .. } => gamma.abs() <= T::one(),
            Family::Uniform { .. } => false,
            _ => true,
        }
    }
}
