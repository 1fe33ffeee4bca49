use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_coefficient, derive, GreedFearDiffusionSpec};
use crate::error::{Error, Result};
use crate::real::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonteCarloSettings {
    /// Number of simulated paths; with antithetic pairs it is rounded up to even.
    pub n_paths: usize,
    /// Time steps over the whole horizon.
    pub n_steps: usize,
    pub seed: u64,
    pub antithetic: bool,
}

impl Default for MonteCarloSettings {
    fn default() -> Self {
        MonteCarloSettings {
            n_paths: 100_000,
            n_steps: 50,
            seed: 0,
            antithetic: true,
        }
    }
}

impl MonteCarloSettings {
    pub fn new(n_paths: usize, n_steps: usize, seed: u64, antithetic: bool) -> Result<Self> {
        let s = MonteCarloSettings {
            n_paths,
            n_steps,
            seed,
            antithetic,
        };
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<()> {
        if self.n_paths == 0 || self.n_steps == 0 {
            return Err(Error::domain(format!(
                "n_paths and n_steps must be at least 1, got {} and {}",
                self.n_paths, self.n_steps
            )));
        }
        Ok(())
    }
}

/// Sample mean with its standard error. With antithetic sampling each pair
/// average counts as one sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct McEstimate<T> {
    pub price: T,
    pub std_error: T,
    pub n_samples: usize,
}

#[derive(Clone, Copy)]
struct Local<T> {
    sigma: T,
    drift: T,
    r_invest: T,
    reward: T,
}

/// Feynman–Kac value `E[e^{−∫r^ℑ} g(X(T)) − ∫ e^{−∫r^ℑ} h^τ ds]` with
/// `dX/X = R^ℑ ds + σ dB`, by log-Euler paths and trapezoid time integrals.
///
/// Path `i` (or antithetic pair `i`) draws from ChaCha stream `i` of `seed`,
/// so the result does not depend on how the work is scheduled.
pub fn price_fk_monte_carlo<T: Real>(
    spec: &GreedFearDiffusionSpec<T>,
    payoff: impl Fn(T) -> T + Sync,
    t: T,
    x: T,
    maturity: T,
    mc: &MonteCarloSettings,
) -> Result<McEstimate<T>> {
    price_fk_monte_carlo_with(spec, payoff, t, x, maturity, mc, false)
}

/// [`price_fk_monte_carlo`] with the `𝒢r` term of `D_y` switchable.
pub fn price_fk_monte_carlo_with<T: Real>(
    spec: &GreedFearDiffusionSpec<T>,
    payoff: impl Fn(T) -> T + Sync,
    t: T,
    x: T,
    maturity: T,
    mc: &MonteCarloSettings,
    include_gr_term: bool,
) -> Result<McEstimate<T>> {
    mc.validate()?;
    if !(x > T::zero() && x.is_finite()) {
        return Err(Error::domain(format!("initial price must be positive, got {x}")));
    }
    if !(maturity > t) {
        return Err(Error::domain(format!("maturity {maturity} must exceed t = {t}")));
    }
    let local = |s: T, px: T| -> Result<Local<T>> {
        let at = |c: &super::Coefficient<T>| c.eval(s, px);
        let vals = [
            ("mu", at(&spec.mu)),
            ("sigma", at(&spec.sigma)),
            ("mu_tau", at(&spec.mu_tau)),
            ("sigma_tau", at(&spec.sigma_tau)),
            ("r", at(&spec.r)),
            ("G", at(&spec.g)),
        ];
        for (name, v) in vals {
            check_coefficient(name, v).map_err(|_| {
                Error::numeric(format!("coefficient {name} = {v} is invalid at t = {s}, x = {px}"))
            })?;
        }
        let d = derive(vals[0].1, vals[1].1, vals[2].1, vals[3].1, vals[4].1, vals[5].1, include_gr_term);
        Ok(Local {
            sigma: vals[1].1,
            drift: d.drift_r,
            r_invest: d.r_invest,
            reward: d.reward_h,
        })
    };
    let frozen = if spec.is_constant() { Some(local(t, x)?) } else { None };
    let coef = |s: T, px: T| match frozen {
        Some(c) => Ok(c),
        None => local(s, px),
    };

    let n = mc.n_steps;
    let dt = (maturity - t) / T::lit(n as f64);
    let sqrt_dt = dt.sqrt();
    let half = T::lit(0.5);

    let path = |normals: &[f64], sign: T| -> Result<T> {
        let mut lx = x.ln();
        let mut px = x;
        let mut c = coef(t, px)?;
        let (mut int_r, mut disc, mut reward) = (T::zero(), T::one(), T::zero());
        for (k, &z) in normals.iter().enumerate() {
            lx += (c.drift - half * c.sigma * c.sigma) * dt + c.sigma * sqrt_dt * sign * T::lit(z);
            px = lx.exp();
            let s = t + dt * T::lit((k + 1) as f64);
            if !(px.is_finite() && px > T::zero()) {
                return Err(Error::numeric(format!("path value X = {px} at t = {s}")));
            }
            let c2 = coef(s, px)?;
            int_r += half * (c.r_invest + c2.r_invest) * dt;
            let disc2 = (-int_r).exp();
            reward += half * (disc * c.reward + disc2 * c2.reward) * dt;
            disc = disc2;
            c = c2;
        }
        let pay = payoff(px);
        if !pay.is_finite() {
            return Err(Error::numeric(format!("payoff = {pay} at X = {px}")));
        }
        Ok(disc * pay - reward)
    };

    let units = if mc.antithetic { mc.n_paths.div_ceil(2) } else { mc.n_paths };
    let samples: Vec<T> = (0..units)
        .into_par_iter()
        .map_init(
            || vec![0.0f64; n],
            |buf, i| {
                let mut rng = ChaCha8Rng::seed_from_u64(mc.seed);
                rng.set_stream(i as u64);
                for z in buf.iter_mut() {
                    *z = StandardNormal.sample(&mut rng);
                }
                if mc.antithetic {
                    Ok(half * (path(buf, T::one())? + path(buf, -T::one())?))
                } else {
                    path(buf, T::one())
                }
            },
        )
        .collect::<Result<_>>()?;

    let count = T::lit(units as f64);
    let mean = samples.iter().fold(T::zero(), |a, &v| a + v) / count;
    let var = if units > 1 {
        samples.iter().fold(T::zero(), |a, &v| a + (v - mean) * (v - mean)) / T::lit((units - 1) as f64)
    } else {
        T::zero()
    };
    Ok(McEstimate {
        price: mean,
        std_error: (var / count).sqrt(),
        n_samples: units,
    })
}
