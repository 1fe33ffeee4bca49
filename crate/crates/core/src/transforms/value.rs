use serde::{Deserialize, Serialize};

use crate::distributions::{DistributionSpec, Family};
use crate::error::{Error, Result};
use crate::numerics::{erfc_inv, log_gamma, Complex};
use crate::real::Real;

/// Parameters of a value function applied to returns.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", bound = "T: Real")]
pub enum ValueKind<T> {
    /// `x^α` on gains, `−λ(−x)^β` on losses; `α, β ∈ (0,1)`, `λ > 1`.
    Tk { alpha: T, beta: T, lambda: T },
    /// `a ln x + c` on gains, `−λ ln(−x) − ν` on losses; `a, λ > 0`.
    LogForm { a: T, c: T, lambda: T, nu: T },
    /// `x ↦ F_post⁻¹(F_prior(x))`, which maps `prior` onto `post`.
    Composed {
        prior: DistributionSpec<T>,
        post: DistributionSpec<T>,
    },
}

/// A validated value function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ValueKind<T>", into = "ValueKind<T>", bound = "T: Real")]
pub struct ValueFunction<T> {
    kind: ValueKind<T>,
}

impl<T: Real> TryFrom<ValueKind<T>> for ValueFunction<T> {
    type Error = Error;

    fn try_from(kind: ValueKind<T>) -> Result<Self> {
        ValueFunction::new(kind)
    }
}

impl<T: Real> From<ValueFunction<T>> for ValueKind<T> {
    fn from(v: ValueFunction<T>) -> Self {
        v.kind
    }
}

impl<T: Real> ValueFunction<T> {
    pub fn new(kind: ValueKind<T>) -> Result<Self> {
        let unit = |name: &str, v: T| {
            if v > T::zero() && v < T::one() {
                Ok(())
            } else {
                Err(Error::domain(format!("{name} must lie in (0, 1), got {v}")))
            }
        };
        let positive = |name: &str, v: T| {
            if v > T::zero() && v.is_finite() {
                Ok(())
            } else {
                Err(Error::domain(format!("{name} must be positive and finite, got {v}")))
            }
        };
        match kind {
            ValueKind::Tk { alpha, beta, lambda } => {
                unit("tk alpha", alpha)?;
                unit("tk beta", beta)?;
                if !(lambda > T::one() && lambda.is_finite()) {
                    return Err(Error::domain(format!("tk lambda must exceed 1, got {lambda}")));
                }
            }
            ValueKind::LogForm { a, c, lambda, nu } => {
                positive("log_form a", a)?;
                positive("log_form lambda", lambda)?;
                if !(c.is_finite() && nu.is_finite()) {
                    return Err(Error::domain("log_form c and nu must be finite"));
                }
            }
            ValueKind::Composed { .. } => {}
        }
        Ok(ValueFunction { kind })
    }

    pub fn tk(alpha: T, beta: T, lambda: T) -> Result<Self> {
        Self::new(ValueKind::Tk { alpha, beta, lambda })
    }

    pub fn log_form(a: T, c: T, lambda: T, nu: T) -> Result<Self> {
        Self::new(ValueKind::LogForm { a, c, lambda, nu })
    }

    /// The map `F_post⁻¹ ∘ F_prior`, which sends a `prior` draw to a `post` draw.
    pub fn from_cdfs(prior: DistributionSpec<T>, post: DistributionSpec<T>) -> Self {
        ValueFunction {
            kind: ValueKind::Composed { prior, post },
        }
    }

    pub fn kind(&self) -> &ValueKind<T> {
        &self.kind
    }

    /// `v(x)`.
    ///
    /// The log form has no finite value at the origin: `+0.0` gives `−∞`
    /// (the gain-side limit) and `−0.0` gives `+∞` (the loss-side limit).
    /// Composed functions need `x` inside the prior's support.
    pub fn eval(&self, x: T) -> Result<T> {
        if x.is_nan() {
            return Err(Error::domain("value function argument is NaN"));
        }
        match self.kind {
            ValueKind::Tk { alpha, beta, lambda } => Ok(if x >= T::zero() {
                x.powf(alpha)
            } else {
                -lambda * (-x).powf(beta)
            }),
            ValueKind::LogForm { a, c, lambda, nu } => Ok(if x > T::zero() {
                a * x.ln() + c
            } else if x < T::zero() {
                -lambda * (-x).ln() - nu
            } else if x.is_sign_negative() {
                T::infinity()
            } else {
                T::neg_infinity()
            }),
            ValueKind::Composed { prior, post } => {
                let (lo, hi) = prior.support();
                if !(x > lo && x < hi) {
                    return Err(Error::domain(format!(
                        "{x} is outside the interior of the {} support",
                        prior.name()
                    )));
                }
                match closed_form(&prior, &post, x) {
                    Some(v) => v,
                    None => post.quantile(prior.cdf(x)),
                }
            }
        }
    }

    /// `F_post⁻¹(F_prior(x))` for composed functions, bypassing closed forms.
    pub fn eval_generic(&self, x: T) -> Result<T> {
        match self.kind {
            ValueKind::Composed { prior, post } => post.quantile(prior.cdf(x)),
            _ => self.eval(x),
        }
    }

    /// `v⁻¹(y)`. The log form maps each half-line onto the whole line and has
    /// no single inverse.
    pub fn inverse(&self, y: T) -> Result<T> {
        match self.kind {
            ValueKind::Tk { alpha, beta, lambda } => Ok(if y >= T::zero() {
                y.powf(alpha.recip())
            } else {
                -(-y / lambda).powf(beta.recip())
            }),
            ValueKind::LogForm { .. } => Err(Error::domain("the log form value function has no global inverse")),
            ValueKind::Composed { prior, post } => prior.quantile(post.cdf(y)),
        }
    }

    /// `P(v(X) ≤ y)` for `X ~ spec`.
    pub fn pushforward_cdf(&self, spec: &DistributionSpec<T>, y: T) -> Result<T> {
        if let ValueKind::Composed { post, .. } = self.kind {
            let u = post.cdf(y);
            if u <= T::zero() || u >= T::one() {
                return Ok(u);
            }
        }
        let x = self.inverse(y)?;
        let (lo, hi) = spec.support();
        Ok(if x <= lo {
            T::zero()
        } else if x >= hi {
            T::one()
        } else {
            spec.cdf(x)
        })
    }

    /// Characteristic function of `a ln E⁺ + c − λ ln E⁻ − ν` with `E±` iid
    /// exponential of mean `b`: the log form applied to the two halves of a
    /// centered Laplace(b) return.
    pub fn logform_posterior_cf(&self, b: T, theta: T) -> Result<Complex<T>> {
        let ValueKind::LogForm { a, c, lambda, nu } = self.kind else {
            return Err(Error::domain("posterior cf needs a log form value function"));
        };
        if !(b > T::zero() && b.is_finite()) {
            return Err(Error::domain(format!("laplace scale must be positive, got {b}")));
        }
        let loc = c - nu + (a - lambda) * b.ln();
        let lg = log_gamma(Complex::new(T::one(), a * theta))? + log_gamma(Complex::new(T::one(), -lambda * theta))?;
        Ok((lg + Complex::new(T::zero(), theta * loc)).exp())
    }

    /// The logistic law of the log-form posterior, available when `a = λ`.
    pub fn logform_posterior(&self) -> Result<DistributionSpec<T>> {
        match self.kind {
            ValueKind::LogForm { a, c, lambda, nu } if a == lambda => DistributionSpec::logistic(c - nu, a),
            ValueKind::LogForm { .. } => Err(Error::domain(
                "the log form posterior is logistic only when a = lambda",
            )),
            _ => Err(Error::domain("posterior law needs a log form value function")),
        }
    }
}

/// Log-form coefficients `(a, c)` matching `x^α` in value and slope at `x = ½`.
pub fn fit_logform_to_tk<T: Real>(alpha: T) -> Result<(T, T)> {
    if !(alpha > T::zero() && alpha <= T::one()) {
        return Err(Error::domain(format!("alpha must lie in (0, 1], got {alpha}")));
    }
    let h = T::lit(0.5).powf(alpha);
    Ok((alpha * h, h * (T::one() + alpha * T::LN_2())))
}

// Closed forms of F_post⁻¹ ∘ F_prior.
fn closed_form<T: Real>(prior: &DistributionSpec<T>, post: &DistributionSpec<T>, x: T) -> Option<Result<T>> {
    use Family::*;
    let one = T::one();
    let v = match (*prior.family(), *post.family()) {
        (Laplace { m, b }, Gaussian { mu, sigma }) => {
            let z = (x - m) / b;
            let e = match erfc_inv((-z.abs()).exp()) {
                Ok(e) => e,
                Err(err) => return Some(Err(err)),
            };
            mu + z.signum() * sigma * T::SQRT_2() * e
        }
        (Laplace { m, b }, DoublePareto { rho }) => {
            let z = (x - m) / b;
            if z >= T::zero() {
                (z / (rho - one)).exp_m1()
            } else {
                -(-z / (rho - one)).exp_m1()
            }
        }
        (DoublePareto { rho }, Laplace { m, b }) => {
            if x >= T::zero() {
                m - b * (one - rho) * x.ln_1p()
            } else {
                m + b * (one - rho) * (-x).ln_1p()
            }
        }
        (DoublePareto { rho }, DoublePareto { rho: rho2 }) => {
            let g = (one - rho) / (one - rho2);
            if x >= T::zero() {
                (g * x.ln_1p()).exp_m1()
            } else {
                -(g * (-x).ln_1p()).exp_m1()
            }
        }
        _ => return None,
    };
    Some(Ok(v))
}
