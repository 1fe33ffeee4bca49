//! Greed–fear binomial tree with additive factors `1 + μΔt ± σ√Δt` and its
//! dividend-yield Black–Scholes limit.

use serde::{Deserialize, Serialize};

use crate::diffusion::black_scholes_call;
use crate::error::{Error, Result};
use crate::numerics::norm_cdf;
use crate::real::Real;

/// Market and tree size for the greed–fear binomial pricer.
///
/// `a` is the greed–fear coefficient 𝒜: positive for a greedy hedger, who
/// behaves as if the stock paid the yield `(μ − r)𝒜`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct GreedFearBinomialSpec<T> {
    pub s0: T,
    pub mu: T,
    pub sigma: T,
    pub r: T,
    pub a: T,
    pub n_steps: usize,
    pub maturity: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct TreeNode<T> {
    pub step: usize,
    pub up_count: usize,
    pub price: T,
}

/// Price with the quantities that determine it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct BinomialPrice<T> {
    pub price: T,
    pub n: usize,
    /// `D_y = (μ − r)𝒜`.
    pub dy_implied_by_a: T,
    /// Weights of the up and down successors.
    pub probability_bounds: (T, T),
}

impl<T: Real> GreedFearBinomialSpec<T> {
    /// `σ = 0` is accepted so degenerate trees can be built; pricing needs `σ > 0`.
    pub fn new(s0: T, mu: T, sigma: T, r: T, a: T, n_steps: usize, maturity: T) -> Result<Self> {
        let spec = GreedFearBinomialSpec {
            s0,
            mu,
            sigma,
            r,
            a,
            n_steps,
            maturity,
        };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        let finite = [self.s0, self.mu, self.sigma, self.r, self.a, self.maturity]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::domain("binomial parameters must be finite"));
        }
        if !(self.s0 > T::zero() && self.maturity > T::zero() && self.sigma >= T::zero()) {
            return Err(Error::domain(format!(
                "need S0 > 0, T > 0, sigma >= 0; got {}, {}, {}",
                self.s0, self.maturity, self.sigma
            )));
        }
        if !(self.r > T::zero() && self.r < self.mu) {
            return Err(Error::domain(format!(
                "riskless rate must lie in (0, mu) = (0, {}), got {}",
                self.mu, self.r
            )));
        }
        if self.n_steps == 0 {
            return Err(Error::Config("n_steps must be at least 1".into()));
        }
        Ok(())
    }

    pub fn dt(&self) -> T {
        self.maturity / T::lit(self.n_steps as f64)
    }

    /// `(1 + μΔt + σ√Δt, 1 + μΔt − σ√Δt)`.
    pub fn factors(&self) -> (T, T) {
        factors(self.mu, self.sigma, self.dt())
    }

    /// `D_y = (μ − r)𝒜`.
    pub fn implied_dividend(&self) -> T {
        (self.mu - self.r) * self.a
    }

    /// `θ^ℑ = (μ + D_y − r)/σ`.
    pub fn sharpe(&self) -> T {
        (self.mu + self.implied_dividend() - self.r) / self.sigma
    }

    /// Backward-induction weights `(½ − ½θ^ℑ√Δt, ½ + ½θ^ℑ√Δt)`.
    pub fn weights(&self) -> (T, T) {
        let half = T::lit(0.5);
        let skew = half * self.sharpe() * self.dt().sqrt();
        (half - skew, half + skew)
    }

    fn tree_ok(&self, n: usize) -> bool {
        let dt = self.maturity / T::lit(n as f64);
        factors(self.mu, self.sigma, dt).1 > T::zero()
    }

    fn weights_ok(&self, n: usize) -> bool {
        let dt = self.maturity / T::lit(n as f64);
        (self.sharpe() * dt.sqrt()).abs() < T::one()
    }

    fn check_tree(&self) -> Result<()> {
        if self.tree_ok(self.n_steps) {
            return Ok(());
        }
        let n = minimal_steps(|n| self.tree_ok(n));
        Err(Error::Config(format!(
            "down factor 1 + mu dt - sigma sqrt(dt) <= 0 with n = {}; need n >= {n}",
            self.n_steps
        )))
    }

    fn check_weights(&self) -> Result<()> {
        if !(self.sigma > T::zero()) {
            return Err(Error::Config("pricing needs sigma > 0".into()));
        }
        self.check_tree()?;
        if self.weights_ok(self.n_steps) {
            return Ok(());
        }
        let n = minimal_steps(|n| self.weights_ok(n) && self.tree_ok(n));
        Err(Error::Config(format!(
            "|theta| sqrt(dt) >= 1 with n = {}, theta = {}; need n >= {n}",
            self.n_steps,
            self.sharpe()
        )))
    }
}

fn factors<T: Real>(mu: T, sigma: T, dt: T) -> (T, T) {
    let drift = T::one() + mu * dt;
    let jump = sigma * dt.sqrt();
    (drift + jump, drift - jump)
}

/// Smallest `n` with `ok(m)` for every `m >= n`, assuming validity is monotone.
fn minimal_steps(ok: impl Fn(usize) -> bool) -> usize {
    let mut hi = 1usize;
    while !ok(hi) {
        if hi > usize::MAX / 4 {
            return hi;
        }
        hi *= 2;
    }
    let mut lo = hi / 2;
    while lo + 1 < hi {
        let mid = lo + (hi - lo) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// The full recombining lattice; level `k` holds `k + 1` nodes ordered by up count.
pub fn build_tree<T: Real>(spec: &GreedFearBinomialSpec<T>) -> Result<Vec<Vec<TreeNode<T>>>> {
    spec.validate()?;
    spec.check_tree()?;
    let (u, d) = spec.factors();
    Ok((0..=spec.n_steps)
        .map(|k| {
            (0..=k)
                .map(|j| TreeNode {
                    step: k,
                    up_count: j,
                    price: spec.s0 * u.powi(j as i32) * d.powi((k - j) as i32),
                })
                .collect()
        })
        .collect())
}

/// Stock holding `(C_up − C_dn)/(S_up − S_dn) + 𝒢 (S_up + S_dn)/(S_up − S_dn)²`.
pub fn hedge_ratio_node<T: Real>(c_up: T, c_dn: T, s_up: T, s_dn: T, g_node: T) -> Result<T> {
    let spread = s_up - s_dn;
    if spread == T::zero() {
        return Err(Error::Config(format!("degenerate tree: S_up = S_dn = {s_up}")));
    }
    Ok((c_up - c_dn) / spread + g_node * (s_up + s_dn) / (spread * spread))
}

/// Node greed–fear level `𝒢 = 𝒜σ(C_up − C_dn)√Δt`.
pub fn node_greed_fear<T: Real>(a: T, sigma: T, c_up: T, c_dn: T, dt: T) -> T {
    a * sigma * (c_up - c_dn) * dt.sqrt()
}

/// Backward induction `C_k = e^{−rΔt}[p_up C_up + p_dn C_dn]` from `g(S_n)`.
pub fn price_binomial<T: Real>(spec: &GreedFearBinomialSpec<T>, payoff: impl Fn(T) -> T) -> Result<T> {
    Ok(price_binomial_report(spec, payoff)?.price)
}

pub fn price_binomial_report<T: Real>(
    spec: &GreedFearBinomialSpec<T>,
    payoff: impl Fn(T) -> T,
) -> Result<BinomialPrice<T>> {
    spec.validate()?;
    spec.check_weights()?;
    let n = spec.n_steps;
    let (u, d) = spec.factors();
    let (pu, pd) = spec.weights();
    let disc = (-spec.r * spec.dt()).exp();
    let (lu, ld) = (u.ln(), d.ln());
    let ls0 = spec.s0.ln();
    let mut values: Vec<T> = (0..=n)
        .map(|j| payoff((ls0 + lu * T::lit(j as f64) + ld * T::lit((n - j) as f64)).exp()))
        .collect();
    if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::numeric(format!("payoff returned {bad}")));
    }
    for k in (0..n).rev() {
        for j in 0..=k {
            values[j] = disc * (pu * values[j + 1] + pd * values[j]);
        }
    }
    Ok(BinomialPrice {
        price: values[0],
        n,
        dy_implied_by_a: spec.implied_dividend(),
        probability_bounds: (pu, pd),
    })
}

/// Black–Scholes call on a stock paying the continuous yield `D_y`.
pub fn price_closed_form_dividend<T: Real>(spot: T, strike: T, t: T, maturity: T, r: T, sigma: T, dy: T) -> Result<T> {
    if !(maturity > t) {
        return Err(Error::domain(format!("maturity {maturity} must exceed t = {t}")));
    }
    black_scholes_call(spot, strike, maturity - t, r, sigma, dy)
}

/// The matching put, `K e^{−rτ} Φ(−D²) − e^{−D_y τ} S Φ(−D¹)`.
pub fn price_put_closed_form_dividend<T: Real>(spot: T, strike: T, t: T, maturity: T, r: T, sigma: T, dy: T) -> Result<T> {
    // validates the inputs
    price_closed_form_dividend(spot, strike, t, maturity, r, sigma, dy)?;
    let tau = maturity - t;
    let sd = sigma * tau.sqrt();
    let d1 = ((spot / strike).ln() + (r - dy + T::lit(0.5) * sigma * sigma) * tau) / sd;
    let d2 = d1 - sd;
    Ok(strike * (-r * tau).exp() * norm_cdf(-d2) - spot * (-dy * tau).exp() * norm_cdf(-d1))
}
