//! Esscher-transform pricing for exponential Lévy markets `S(t) = S(0) e^{L(t)}`
//! driven by logistic or negative-Gumbel motion.

mod density;
mod pricer;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::distributions::DistributionSpec;
use crate::error::{Error, Result};
use crate::numerics::{cf_to_pdf, find_root_with, ln_gamma, log_beta, log_gamma, QuadratureSettings};
use crate::real::Real;

pub use density::LevyDensity;
pub use pricer::{
    price_call_logistic, price_ecc_logistic, price_ecc_neggumbel, price_put_logistic, EuropeanClaim, LevyPricer,
    Payoff,
};

/// Law of the driving motion at `t = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", bound = "T: Real")]
pub enum LevyModel<T> {
    /// `L(1) ~ Logistic{m, ρ}`.
    LogisticLevy { m: T, rho: T },
    /// `L(1) ~ NegGumbel{μ, ϱ}`.
    NegGumbelLevy { mu: T, varrho: T },
}

impl<T: Real> LevyModel<T> {
    pub fn logistic(m: T, rho: T) -> Result<Self> {
        LevyModel::LogisticLevy { m, rho }.validated()
    }

    pub fn neg_gumbel(mu: T, varrho: T) -> Result<Self> {
        LevyModel::NegGumbelLevy { mu, varrho }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        let (loc, scale) = match self {
            LevyModel::LogisticLevy { m, rho } => (m, rho),
            LevyModel::NegGumbelLevy { mu, varrho } => (mu, varrho),
        };
        if !loc.is_finite() {
            return Err(Error::domain(format!("location must be finite, got {loc}")));
        }
        if !(scale > T::zero() && scale.is_finite()) {
            return Err(Error::domain(format!("scale must be positive and finite, got {scale}")));
        }
        Ok(self)
    }

    pub fn name(&self) -> &'static str {
        match self {
            LevyModel::LogisticLevy { .. } => "logistic_levy",
            LevyModel::NegGumbelLevy { .. } => "neg_gumbel_levy",
        }
    }

    /// Open interval of `h` with `E e^{h L(1)} < ∞`.
    pub fn mgf_domain(&self) -> (T, T) {
        match *self {
            LevyModel::LogisticLevy { rho, .. } => (-rho.recip(), rho.recip()),
            LevyModel::NegGumbelLevy { varrho, .. } => (-varrho.recip(), T::infinity()),
        }
    }

    /// Marginal law at `t = 1`.
    pub fn unit_law(&self) -> DistributionSpec<T> {
        match *self {
            LevyModel::LogisticLevy { m, rho } => DistributionSpec::logistic(m, rho),
            LevyModel::NegGumbelLevy { mu, varrho } => DistributionSpec::neg_gumbel(mu, varrho),
        }
        .expect("validated model parameters")
    }

    /// `ln E e^{h L(1)}`.
    pub fn log_mgf(&self, h: T) -> Result<T> {
        let (lo, hi) = self.mgf_domain();
        if !(h > lo && h < hi) {
            return Err(Error::domain(format!("h = {h} outside the mgf domain ({lo}, {hi})")));
        }
        match *self {
            LevyModel::LogisticLevy { m, rho } => {
                // Γ(1+x)Γ(1−x) = πx / sin(πx)
                let x = T::PI() * rho * h;
                let log_ratio = if x.abs() < T::lit(1e-4) {
                    let x2 = x * x;
                    x2 / T::lit(6.0) + T::lit(7.0 / 360.0) * x2 * x2
                } else {
                    (x / x.sin()).ln()
                };
                Ok(m * h + log_ratio)
            }
            LevyModel::NegGumbelLevy { mu, varrho } => Ok(mu * h + ln_gamma(T::one() + varrho * h)?),
        }
    }

    /// `ln φ(θ − ih)` at `t = 1`, the log cf continued to the strip.
    fn log_cf_shifted(&self, theta: T, h: T) -> Complex<T> {
        let lg = |re: T, im: T| log_gamma(Complex::new(re, im)).unwrap_or_else(|_| Complex::new(T::nan(), T::nan()));
        match *self {
            LevyModel::LogisticLevy { m, rho } => {
                // i m (θ − ih) = m h + i m θ
                Complex::new(m * h, m * theta)
                    + lg(T::one() + rho * h, rho * theta)
                    + lg(T::one() - rho * h, -rho * theta)
            }
            LevyModel::NegGumbelLevy { mu, varrho } => {
                Complex::new(mu * h, mu * theta) + lg(T::one() + varrho * h, varrho * theta)
            }
        }
    }

    /// Characteristic function of `L(t)` under the `h`-Esscher measure,
    /// `φ_t(θ − ih) / M_t(h)`.
    pub fn tilted_cf(&self, t: T, h: T, theta: T) -> Result<Complex<T>> {
        let log_m = self.log_mgf(h)?;
        Ok(self.tilted_cf_unchecked(t, h, log_m, theta))
    }

    fn tilted_cf_unchecked(&self, t: T, h: T, log_m: T, theta: T) -> Complex<T> {
        if theta == T::zero() {
            return Complex::new(T::one(), T::zero());
        }
        let z = self.log_cf_shifted(theta, h) - Complex::new(log_m, T::zero());
        (z * t).exp()
    }

    /// Mean and variance of `L(1)` under the `h`-Esscher measure, from
    /// central differences of `ln M`.
    fn tilted_cumulants(&self, h: T) -> Result<(T, T)> {
        let (lo, hi) = self.mgf_domain();
        let room = (h - lo).min(hi - h);
        let eps = T::lit(1e-3).min(room * T::lit(0.25));
        let (a, b, c) = (self.log_mgf(h - eps)?, self.log_mgf(h)?, self.log_mgf(h + eps)?);
        let mean = (c - a) / (eps + eps);
        let var = (c - b - b + a) / (eps * eps);
        Ok((mean, var.max(T::epsilon())))
    }

    /// Exponential decay rates of the `h`-tilted unit density on the left
    /// and right; `None` where the decay is faster than exponential.
    fn tail_rates(&self, h: T) -> (T, Option<T>) {
        match *self {
            LevyModel::LogisticLevy { rho, .. } => (rho.recip() + h, Some(rho.recip() - h)),
            LevyModel::NegGumbelLevy { varrho, .. } => (varrho.recip() + h, None),
        }
    }
}

/// Market of one risky asset with Lévy log-returns and a riskless rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct LevyMarket<T> {
    pub model: LevyModel<T>,
    pub spot: T,
    pub rate: T,
}

impl<T: Real> LevyMarket<T> {
    pub fn new(model: LevyModel<T>, spot: T, rate: T) -> Result<Self> {
        let model = model.validated()?;
        if !(spot > T::zero() && spot.is_finite()) {
            return Err(Error::domain(format!("spot must be positive and finite, got {spot}")));
        }
        if !(rate > T::zero() && rate.is_finite()) {
            return Err(Error::domain(format!("riskless rate must be positive and finite, got {rate}")));
        }
        Ok(LevyMarket { model, spot, rate })
    }
}

/// Root of the martingale condition `r = ln M(h+1) − ln M(h)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct EsscherSolution<T> {
    pub h_q: T,
    pub residual: T,
    /// Open interval the root was sought in.
    pub domain: (T, T),
}

/// Largest residual accepted for the martingale root.
pub const ESSCHER_RESIDUAL_TOL: f64 = 1e-10;

/// `(e^{imθ} B(1+iρθ, 1−iρθ))^t`.
pub fn logistic_levy_cf<T: Real>(m: T, rho: T, t: T, theta: T) -> Result<Complex<T>> {
    if !(rho > T::zero()) {
        return Err(Error::domain(format!("rho must be positive, got {rho}")));
    }
    if !(t > T::zero()) {
        return Err(Error::domain(format!("t must be positive, got {t}")));
    }
    if theta == T::zero() {
        return Ok(Complex::new(T::one(), T::zero()));
    }
    let one = T::one();
    let lb = log_beta(Complex::new(one, rho * theta), Complex::new(one, -rho * theta))?;
    Ok(((Complex::new(T::zero(), m * theta) + lb) * t).exp())
}

/// `E e^{h L(t)} = M(h)^t`.
pub fn levy_mgf<T: Real>(model: &LevyModel<T>, t: T, h: T) -> Result<T> {
    check_time(t)?;
    Ok((t * model.log_mgf(h)?).exp())
}

/// Density of `L(t)` under the Esscher measure with parameter `h`,
/// `e^{hx} M(h)^{−t} f_t(x)`.
pub fn esscher_pdf<T: Real>(model: &LevyModel<T>, t: T, h: T, x: T) -> Result<T> {
    check_time(t)?;
    let log_m = model.log_mgf(h)?;
    if t == T::one() {
        let f = model.unit_law().pdf(x);
        return Ok(if f > T::zero() { (h * x - log_m).exp() * f } else { T::zero() });
    }
    let settings = QuadratureSettings::default().with_tolerance(T::lit(1e-12));
    let out = cf_to_pdf(|th| model.tilted_cf_unchecked(t, h, log_m, th), x, &settings)?;
    Ok(out.density)
}

/// Solves the Esscher martingale condition for the market's model.
pub fn solve_martingale_h<T: Real>(market: &LevyMarket<T>) -> Result<EsscherSolution<T>> {
    let model = market.model;
    let r = market.rate;
    let (mlo, mhi) = model.mgf_domain();
    let (lo, hi) = (mlo, mhi - T::one());
    if !(hi > lo) {
        return Err(Error::Model(format!(
            "{}: martingale domain ({lo}, {hi}) is empty",
            model.name()
        )));
    }
    let g = |h: T| match (model.log_mgf(h + T::one()), model.log_mgf(h)) {
        (Ok(a), Ok(b)) => a - b - r,
        _ => T::nan(),
    };
    // g increases from −∞ at the left edge to +∞ at the right edge.
    let half = T::lit(0.5);
    let mut a = if hi.is_finite() { lo + half * (hi - lo) } else { lo + T::one() };
    let mut b = a;
    let mut found = (false, false);
    for k in 1..=200 {
        if !found.0 {
            if g(a) < T::zero() {
                found.0 = true;
            } else {
                a = lo + (a - lo) * half;
            }
        }
        if !found.1 {
            if g(b) > T::zero() {
                found.1 = true;
            } else if hi.is_finite() {
                b = hi - (hi - b) * half;
            } else {
                b = b + T::lit(2f64.powi(k.min(60)));
            }
        }
        if found.0 && found.1 {
            break;
        }
    }
    if !(found.0 && found.1) || !(a > lo && b < hi) {
        return Err(Error::Model(format!(
            "{}: no root of the martingale condition in ({lo}, {hi}) for r = {r}",
            model.name()
        )));
    }
    let h_q = find_root_with(g, a, b, T::lit(1e-15), T::lit(1e-14))?;
    let residual = g(h_q);
    if !(residual.abs() < T::lit(ESSCHER_RESIDUAL_TOL)) {
        return Err(Error::NonConvergence {
            message: "martingale condition".into(),
            partial: h_q.as_f64(),
            error_estimate: residual.abs().as_f64(),
        });
    }
    Ok(EsscherSolution {
        h_q,
        residual,
        domain: (lo, hi),
    })
}

/// Risk-neutral location of a negative-Gumbel Lévy market,
/// `μ_q = r − ln Γ(1+ϱ)`.
pub fn neggumbel_rn_location<T: Real>(r: T, varrho: T) -> Result<T> {
    if !(varrho > T::zero()) {
        return Err(Error::domain(format!("varrho must be positive, got {varrho}")));
    }
    Ok(r - ln_gamma(T::one() + varrho)?)
}

fn check_time<T: Real>(t: T) -> Result<()> {
    if t > T::zero() && t.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("time must be positive and finite, got {t}")))
    }
}
