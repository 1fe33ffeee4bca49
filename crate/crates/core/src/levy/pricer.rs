use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use super::{neggumbel_rn_location, solve_martingale_h, EsscherSolution, LevyDensity, LevyMarket, LevyModel};
use crate::error::{Error, Result};
use crate::real::Real;

/// Payoff `g(S(T))` of a European claim.
#[derive(Clone)]
pub enum Payoff<T> {
    Call { strike: T },
    Put { strike: T },
    /// Any payoff growing at most linearly in `S(T)`.
    Custom(Arc<dyn Fn(T) -> T + Send + Sync>),
}

impl<T: fmt::Debug> fmt::Debug for Payoff<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Payoff::Call { strike } => f.debug_struct("Call").field("strike", strike).finish(),
            Payoff::Put { strike } => f.debug_struct("Put").field("strike", strike).finish(),
            Payoff::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct EuropeanClaim<T> {
    pub payoff: Payoff<T>,
    pub maturity: T,
}

impl<T: Real> EuropeanClaim<T> {
    pub fn new(payoff: Payoff<T>, maturity: T) -> Result<Self> {
        if let Payoff::Call { strike } | Payoff::Put { strike } = payoff {
            if !(strike > T::zero() && strike.is_finite()) {
                return Err(Error::domain(format!("strike must be positive and finite, got {strike}")));
            }
        }
        if !(maturity > T::zero() && maturity.is_finite()) {
            return Err(Error::domain(format!("maturity must be positive and finite, got {maturity}")));
        }
        Ok(EuropeanClaim { payoff, maturity })
    }

    pub fn call(strike: T, maturity: T) -> Result<Self> {
        Self::new(Payoff::Call { strike }, maturity)
    }

    pub fn put(strike: T, maturity: T) -> Result<Self> {
        Self::new(Payoff::Put { strike }, maturity)
    }

    pub fn custom(g: impl Fn(T) -> T + Send + Sync + 'static, maturity: T) -> Result<Self> {
        Self::new(Payoff::Custom(Arc::new(g)), maturity)
    }
}

/// Risk-neutral law of `L(T)` and its share-measure companion `e^x f / E e^L`.
#[derive(Debug)]
struct Measures<T> {
    money: LevyDensity<T>,
    share: LevyDensity<T>,
}

/// Prices European claims in a Lévy market, caching one pair of
/// risk-neutral densities per maturity.
///
/// Logistic markets use the Esscher measure of [`solve_martingale_h`];
/// negative-Gumbel markets shift the location to `r − ln Γ(1+ϱ)`.
/// The cache can be shared across threads.
#[derive(Debug)]
pub struct LevyPricer<T> {
    market: LevyMarket<T>,
    pricing_model: LevyModel<T>,
    h: T,
    esscher: Option<EsscherSolution<T>>,
    cache: RwLock<HashMap<u64, Arc<Measures<T>>>>,
}

impl<T: Real> LevyPricer<T> {
    pub fn new(market: LevyMarket<T>) -> Result<Self> {
        let market = LevyMarket::new(market.model, market.spot, market.rate)?;
        let (pricing_model, h, esscher) = match market.model {
            LevyModel::LogisticLevy { .. } => {
                let sol = solve_martingale_h(&market)?;
                (market.model, sol.h_q, Some(sol))
            }
            LevyModel::NegGumbelLevy { varrho, .. } => {
                let mu = neggumbel_rn_location(market.rate, varrho)?;
                (LevyModel::NegGumbelLevy { mu, varrho }, T::zero(), None)
            }
        };
        let (_, hi) = pricing_model.mgf_domain();
        if !(h + T::one() < hi) {
            return Err(Error::Model(format!(
                "{}: h + 1 = {} leaves the mgf domain",
                pricing_model.name(),
                h + T::one()
            )));
        }
        Ok(LevyPricer {
            market,
            pricing_model,
            h,
            esscher,
            cache: RwLock::new(HashMap::new()),
        })
    }

    pub fn market(&self) -> &LevyMarket<T> {
        &self.market
    }

    /// Esscher root for logistic markets.
    pub fn esscher(&self) -> Option<&EsscherSolution<T>> {
        self.esscher.as_ref()
    }

    /// Risk-neutral location `μ_q` for negative-Gumbel markets.
    pub fn rn_location(&self) -> Option<T> {
        match self.pricing_model {
            LevyModel::NegGumbelLevy { mu, .. } if self.esscher.is_none() => Some(mu),
            _ => None,
        }
    }

    fn measures(&self, maturity: T) -> Result<Arc<Measures<T>>> {
        if !(maturity > T::zero() && maturity.is_finite()) {
            return Err(Error::domain(format!("maturity must be positive and finite, got {maturity}")));
        }
        let key = maturity.as_f64().to_bits();
        if let Some(m) = self.cache.read().unwrap_or_else(|e| e.into_inner()).get(&key) {
            return Ok(m.clone());
        }
        let built = Arc::new(Measures {
            money: LevyDensity::new(&self.pricing_model, maturity, self.h)?,
            share: LevyDensity::new(&self.pricing_model, maturity, self.h + T::one())?,
        });
        let mut cache = self.cache.write().unwrap_or_else(|e| e.into_inner());
        Ok(cache.entry(key).or_insert(built).clone())
    }

    /// Risk-neutral density of the log-return over `maturity`.
    pub fn density(&self, maturity: T) -> Result<LevyDensity<T>> {
        Ok(self.measures(maturity)?.money.clone())
    }

    /// `S0 P*(L > k) − e^{−rT} K P(L > k)` with `k = ln(K/S0)`.
    pub fn call(&self, strike: T, maturity: T) -> Result<T> {
        let claim = EuropeanClaim::call(strike, maturity)?;
        self.price(&claim)
    }

    pub fn put(&self, strike: T, maturity: T) -> Result<T> {
        let claim = EuropeanClaim::put(strike, maturity)?;
        self.price(&claim)
    }

    pub fn price(&self, claim: &EuropeanClaim<T>) -> Result<T> {
        let t = claim.maturity;
        let m = self.measures(t)?;
        let s0 = self.market.spot;
        let disc = (-self.market.rate * t).exp();
        let price = match claim.payoff {
            Payoff::Call { strike } => {
                let k = (strike / s0).ln();
                s0 * m.share.tail(k)? - disc * strike * m.money.tail(k)?
            }
            Payoff::Put { strike } => {
                let k = (strike / s0).ln();
                disc * strike * m.money.cdf(k)? - s0 * m.share.cdf(k)?
            }
            Payoff::Custom(ref g) => disc * m.money.expectation(|x| g(s0 * x.exp()), &[])?,
        };
        if !price.is_finite() {
            return Err(Error::numeric(format!("non-finite price {price}")));
        }
        Ok(price)
    }
}

fn require_logistic<T: Real>(market: &LevyMarket<T>) -> Result<()> {
    match market.model {
        LevyModel::LogisticLevy { .. } => Ok(()),
        _ => Err(Error::Model(format!("{} market where logistic_levy is required", market.model.name()))),
    }
}

/// European call in a logistic Lévy market under the Esscher measure.
pub fn price_call_logistic<T: Real>(market: &LevyMarket<T>, strike: T, maturity: T) -> Result<T> {
    require_logistic(market)?;
    LevyPricer::new(*market)?.call(strike, maturity)
}

pub fn price_put_logistic<T: Real>(market: &LevyMarket<T>, strike: T, maturity: T) -> Result<T> {
    require_logistic(market)?;
    LevyPricer::new(*market)?.put(strike, maturity)
}

pub fn price_ecc_logistic<T: Real>(market: &LevyMarket<T>, claim: &EuropeanClaim<T>) -> Result<T> {
    require_logistic(market)?;
    LevyPricer::new(*market)?.price(claim)
}

/// European claim in a negative-Gumbel Lévy market, `e^{−rT} ∫ g(S0 e^x) f(x) dx`
/// with `f` the risk-neutral density of `L(T)`.
pub fn price_ecc_neggumbel<T: Real>(market: &LevyMarket<T>, claim: &EuropeanClaim<T>) -> Result<T> {
    if !matches!(market.model, LevyModel::NegGumbelLevy { .. }) {
        return Err(Error::Model(format!(
            "{} market where neg_gumbel_levy is required",
            market.model.name()
        )));
    }
    let pricer = LevyPricer::new(*market)?;
    let m = pricer.measures(claim.maturity)?;
    let s0 = market.spot;
    let disc = (-market.rate * claim.maturity).exp();
    let value = match claim.payoff {
        Payoff::Call { strike } => {
            let k = (strike / s0).ln();
            m.money.expectation(|x| (s0 * x.exp() - strike).max(T::zero()), &[k])?
        }
        Payoff::Put { strike } => {
            let k = (strike / s0).ln();
            m.money.expectation(|x| (strike - s0 * x.exp()).max(T::zero()), &[k])?
        }
        Payoff::Custom(ref g) => m.money.expectation(|x| g(s0 * x.exp()), &[])?,
    };
    Ok(disc * value)
}
