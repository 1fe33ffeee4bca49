//! Greed–fear hedging of a claim on an Itô price process: the hedger's
//! derived coefficients, a Feynman–Kac Monte Carlo pricer and the
//! constant-coefficient call formula.

mod monte_carlo;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{integrate, norm_cdf, QuadratureSettings};
use crate::real::Real;

pub use monte_carlo::{price_fk_monte_carlo, price_fk_monte_carlo_with, McEstimate, MonteCarloSettings};

/// A coefficient `c(t, x)` of the price dynamics.
#[derive(Clone)]
pub enum Coefficient<T> {
    Constant(T),
    /// `c0 + ct·t + cx·ln x`.
    Affine { c0: T, ct: T, cx: T },
    Function(Arc<dyn Fn(T, T) -> T + Send + Sync>),
}

impl<T: Real> Coefficient<T> {
    pub fn function(f: impl Fn(T, T) -> T + Send + Sync + 'static) -> Self {
        Coefficient::Function(Arc::new(f))
    }

    #[inline]
    pub fn eval(&self, t: T, x: T) -> T {
        match self {
            Coefficient::Constant(c) => *c,
            Coefficient::Affine { c0, ct, cx } => *c0 + *ct * t + *cx * x.ln(),
            Coefficient::Function(f) => f(t, x),
        }
    }

    pub fn as_constant(&self) -> Option<T> {
        match self {
            Coefficient::Constant(c) => Some(*c),
            Coefficient::Affine { c0, ct, cx } if *ct == T::zero() && *cx == T::zero() => Some(*c0),
            _ => None,
        }
    }
}

impl<T: fmt::Debug> fmt::Debug for Coefficient<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coefficient::Constant(c) => write!(f, "Constant({c:?})"),
            Coefficient::Affine { c0, ct, cx } => write!(f, "Affine({c0:?} + {ct:?} t + {cx:?} ln x)"),
            Coefficient::Function(_) => f.write_str("Function(..)"),
        }
    }
}

impl<T> From<T> for Coefficient<T> {
    fn from(c: T) -> Self {
        Coefficient::Constant(c)
    }
}

/// Public dynamics `(μ, σ)`, the hedger's dynamics `(μ^τ, σ^τ)`, the riskless
/// rate `r` and the greed–fear functional `𝒢`.
#[derive(Debug, Clone)]
pub struct GreedFearDiffusionSpec<T> {
    pub mu: Coefficient<T>,
    pub sigma: Coefficient<T>,
    pub mu_tau: Coefficient<T>,
    pub sigma_tau: Coefficient<T>,
    pub r: Coefficient<T>,
    pub g: Coefficient<T>,
}

impl<T: Real> GreedFearDiffusionSpec<T> {
    /// Constant coefficients are checked here; functional ones when evaluated.
    pub fn new(
        mu: Coefficient<T>,
        sigma: Coefficient<T>,
        mu_tau: Coefficient<T>,
        sigma_tau: Coefficient<T>,
        r: Coefficient<T>,
        g: Coefficient<T>,
    ) -> Result<Self> {
        let spec = GreedFearDiffusionSpec {
            mu,
            sigma,
            mu_tau,
            sigma_tau,
            r,
            g,
        };
        for (name, c) in spec.named() {
            if let Some(v) = c.as_constant() {
                check_coefficient(name, v)?;
            }
        }
        Ok(spec)
    }

    /// The special case with constant `𝒢`, `μ`, `σ^τ = σ` and `μ^τ = (1+𝒢)μ`.
    pub fn constant(mu: T, sigma: T, r: T, g: T) -> Result<Self> {
        Self::new(
            mu.into(),
            sigma.into(),
            ((T::one() + g) * mu).into(),
            sigma.into(),
            r.into(),
            g.into(),
        )
    }

    fn named(&self) -> [(&'static str, &Coefficient<T>); 6] {
        [
            ("mu", &self.mu),
            ("sigma", &self.sigma),
            ("mu_tau", &self.mu_tau),
            ("sigma_tau", &self.sigma_tau),
            ("r", &self.r),
            ("G", &self.g),
        ]
    }

    /// True when every coefficient is a constant.
    pub fn is_constant(&self) -> bool {
        self.named().iter().all(|(_, c)| c.as_constant().is_some())
    }
}

fn check_coefficient<T: Real>(name: &str, v: T) -> Result<()> {
    let ok = match name {
        "sigma" | "sigma_tau" | "r" => v > T::zero(),
        "G" => v > -T::one(),
        _ => true,
    };
    if ok && v.is_finite() {
        Ok(())
    } else {
        let need = match name {
            "sigma" | "sigma_tau" | "r" => " (must be positive)",
            "G" => " (must exceed -1)",
            _ => "",
        };
        Err(Error::domain(format!("coefficient {name} = {v}{need}")))
    }
}

/// The hedger's coefficients at one point `(t, x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct DerivedCoefficients<T> {
    /// `r^ℑ = r(1+𝒢)`.
    pub r_invest: T,
    /// `θ = (μ−r)/σ`.
    pub sharpe: T,
    /// `θ^τ = (μ^τ−r)/σ^τ`.
    pub sharpe_tau: T,
    /// `D_y^τ = (θ^τ σ^τ² − θσ²)/σ`, plus `𝒢r` when requested.
    pub div_yield: T,
    /// `R^ℑ = r^ℑ − D_y^τ`.
    pub drift_r: T,
    /// `h^τ = (θ^τ)² 𝒢`.
    pub reward_h: T,
}

pub fn derived_coefficients<T: Real>(
    spec: &GreedFearDiffusionSpec<T>,
    t: T,
    x: T,
    include_gr_term: bool,
) -> Result<DerivedCoefficients<T>> {
    if !(x > T::zero()) {
        return Err(Error::domain(format!("price must be positive, got {x}")));
    }
    let [mu, sigma, mu_tau, sigma_tau, r, g] = spec.named().map(|(name, c)| (name, c.eval(t, x)));
    for (name, v) in [mu, sigma, mu_tau, sigma_tau, r, g] {
        check_coefficient(name, v)?;
    }
    Ok(derive(mu.1, sigma.1, mu_tau.1, sigma_tau.1, r.1, g.1, include_gr_term))
}

#[inline]
fn derive<T: Real>(mu: T, sigma: T, mu_tau: T, sigma_tau: T, r: T, g: T, include_gr_term: bool) -> DerivedCoefficients<T> {
    let sharpe = (mu - r) / sigma;
    let sharpe_tau = (mu_tau - r) / sigma_tau;
    let mut div_yield = (sharpe_tau * sigma_tau * sigma_tau - sharpe * sigma * sigma) / sigma;
    if include_gr_term {
        div_yield += g * r;
    }
    let r_invest = r * (T::one() + g);
    DerivedCoefficients {
        r_invest,
        sharpe,
        sharpe_tau,
        div_yield,
        drift_r: r_invest - div_yield,
        reward_h: sharpe_tau * sharpe_tau * g,
    }
}

/// Black–Scholes call with a continuous dividend yield `q`.
pub fn black_scholes_call<T: Real>(spot: T, strike: T, tau: T, r: T, sigma: T, q: T) -> Result<T> {
    if !(spot > T::zero() && strike > T::zero()) {
        return Err(Error::domain(format!("spot and strike must be positive, got {spot}, {strike}")));
    }
    if !(tau > T::zero() && sigma > T::zero()) {
        return Err(Error::domain(format!("tau and sigma must be positive, got {tau}, {sigma}")));
    }
    let sd = sigma * tau.sqrt();
    let d1 = ((spot / strike).ln() + (r - q + T::lit(0.5) * sigma * sigma) * tau) / sd;
    let d2 = d1 - sd;
    Ok(spot * (-q * tau).exp() * norm_cdf(d1) - strike * (-r * tau).exp() * norm_cdf(d2))
}

/// Call price in the constant-coefficient case `σ^τ = σ`, `μ^τ = (1+𝒢)μ`.
///
/// This is the Feynman–Kac value: the asset drifts at `R = r − 𝒢(μ−r)`,
/// everything is discounted at `r(1+𝒢)`, and the running reward
/// `h = ((1+𝒢)μ − r)² 𝒢 / σ²` is paid until expiry:
///
/// `C = e^{−𝒢μτ} S Φ(D¹) − K e^{−r(1+𝒢)τ} Φ(D²) − h (1 − e^{−r(1+𝒢)τ}) / (r(1+𝒢))`
///
/// with `D¹ = [ln(S/K) + (R + σ²/2)τ] / (σ√τ)` and `D² = D¹ − σ√τ`.
#[allow(clippy::too_many_arguments)]
pub fn price_call_closed_form<T: Real>(spot: T, strike: T, t: T, maturity: T, r: T, sigma: T, mu: T, g: T) -> Result<T> {
    if !(maturity > t) {
        return Err(Error::domain(format!("maturity {maturity} must exceed t = {t}")));
    }
    if !(r > T::zero()) {
        return Err(Error::domain(format!("r must be positive, got {r}")));
    }
    if !(g > -T::one()) {
        return Err(Error::domain(format!("G must exceed -1, got {g}")));
    }
    let tau = maturity - t;
    let r_invest = r * (T::one() + g);
    // Black–Scholes with rate r^ℑ and yield q = r^ℑ − R = 𝒢μ.
    let q = g * mu;
    let option = black_scholes_call(spot, strike, tau, r_invest, sigma, q)?;
    Ok(option - reward_term(r, sigma, mu, g, tau))
}

/// Present value of the running reward over `τ`, `h (1 − e^{−r(1+𝒢)τ}) / (r(1+𝒢))`.
pub fn reward_term<T: Real>(r: T, sigma: T, mu: T, g: T, tau: T) -> T {
    let r_invest = r * (T::one() + g);
    let theta_tau = ((T::one() + g) * mu - r) / sigma;
    let h = theta_tau * theta_tau * g;
    -h * (-r_invest * tau).exp_m1() / r_invest
}

/// Stock and bond holdings `(a, b)` of the greed–fear hedge of a claim with
/// value `f` and delta `f_x`:
/// `a = σ^τ f_x / σ + 𝒢(μ^τ − r)/((σ^τ)² S)` and `b = (f(1+𝒢) − aS)/β(t)`.
///
/// `β(t) = exp ∫₀^t r(s, S) ds` is evaluated with the price held at `S`,
/// which is exact when `r` does not depend on the price.
pub fn hedge_ratios<T: Real>(spec: &GreedFearDiffusionSpec<T>, t: T, spot: T, f: T, f_x: T) -> Result<(T, T)> {
    if !(spot > T::zero()) {
        return Err(Error::domain(format!("price must be positive, got {spot}")));
    }
    let at = |c: &Coefficient<T>| c.eval(t, spot);
    let (mu_tau, sigma, sigma_tau, r, g) = (at(&spec.mu_tau), at(&spec.sigma), at(&spec.sigma_tau), at(&spec.r), at(&spec.g));
    for (name, v) in [("sigma", sigma), ("sigma_tau", sigma_tau), ("r", r), ("G", g)] {
        check_coefficient(name, v)?;
    }
    let a = sigma_tau * f_x / sigma + g * (mu_tau - r) / (sigma_tau * sigma_tau * spot);
    let log_beta = match spec.r.as_constant() {
        Some(rc) => rc * t,
        None if t > T::zero() => integrate(|s| spec.r.eval(s, spot), T::zero(), t, &QuadratureSettings::default())?,
        None => T::zero(),
    };
    let b = (f * (T::one() + g) - a * spot) / log_beta.exp();
    Ok((a, b))
}
