use num_complex::Complex;

use super::{DistributionSpec, Family};
use crate::error::{Error, Result};
use crate::numerics::{
    erfc, erfc_inv, find_root_with, gamma, gamma_p, gamma_q, integrate, ln_gamma, log_gamma, norm_quantile,
    QuadratureSettings,
};
use crate::real::Real;

fn cx<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

// Γ(1 + iy) with the sign of the imaginary argument chosen by the caller.
fn gamma_one_plus_i<T: Real>(y: T) -> Complex<T> {
    log_gamma(cx(T::one(), y)).expect("1 + iy is never a pole").exp()
}

// πx / sinh(πx) without overflow.
fn pi_x_over_sinh<T: Real>(x: T) -> T {
    let a = T::PI() * x.abs();
    if a < T::lit(1e-8) {
        return T::one() - a * a / T::lit(6.0);
    }
    let e = (-a).exp();
    T::lit(2.0) * a * e / (T::one() - e * e)
}

impl<T: Real> DistributionSpec<T> {
    /// Probability density at `x` (infinite where a Weibull or generalized
    /// gamma density has a pole at the origin).
    pub fn pdf(&self, x: T) -> T {
        let one = T::one();
        let two = T::lit(2.0);
        match self.family {
            Family::Laplace { m, b } => (-(x - m).abs() / b).exp() / (two * b),
            Family::Logistic { m, rho } => {
                let e = (-((x - m) / rho).abs()).exp();
                e / (rho * (one + e) * (one + e))
            }
            Family::Gumbel { mu, rho } => {
                let z = (x - mu) / rho;
                (-z - (-z).exp()).exp() / rho
            }
            Family::NegGumbel { mu, rho } => {
                let z = (x - mu) / rho;
                (z - z.exp()).exp() / rho
            }
            Family::DoublePareto { rho } => T::lit(0.5) * (rho - one) * (one + x.abs()).powf(-rho),
            Family::Cauchy { c } => c / (T::PI() * (c * c + x * x)),
            Family::Gaussian { mu, sigma } => {
                let z = (x - mu) / sigma;
                (-T::lit(0.5) * z * z).exp() / (sigma * T::TAU().sqrt())
            }
            Family::Weibull { gamma, delta } => {
                if x < T::zero() {
                    return T::zero();
                }
                let z = x / delta;
                if x == T::zero() {
                    return origin_density(gamma - one, gamma / delta);
                }
                gamma / delta * z.powf(gamma - one) * (-z.powf(gamma)).exp()
            }
            Family::GenGamma { gamma, delta } => {
                if x < T::zero() {
                    return T::zero();
                }
                let lg = ln_gamma(delta).expect("delta > 0");
                if x == T::zero() {
                    if gamma < T::zero() {
                        return T::zero();
                    }
                    return origin_density(gamma * delta - one, gamma / lg.exp());
                }
                let ln_pdf = gamma.abs().ln() - lg + (gamma * delta - one) * x.ln() - x.powf(gamma);
                ln_pdf.exp()
            }
            Family::Uniform { lo, hi } => {
                if x >= lo && x <= hi {
                    one / (hi - lo)
                } else {
                    T::zero()
                }
            }
        }
    }

    /// Cumulative distribution function at `x`.
    pub fn cdf(&self, x: T) -> T {
        let one = T::one();
        let half = T::lit(0.5);
        let p = match self.family {
            Family::Laplace { m, b } => {
                let z = (x - m) / b;
                if z < T::zero() {
                    half * z.exp()
                } else {
                    one - half * (-z).exp()
                }
            }
            Family::Logistic { m, rho } => {
                let z = (x - m) / rho;
                if z >= T::zero() {
                    one / (one + (-z).exp())
                } else {
                    let e = z.exp();
                    e / (one + e)
                }
            }
            Family::Gumbel { mu, rho } => (-(-(x - mu) / rho).exp()).exp(),
            Family::NegGumbel { mu, rho } => -(-((x - mu) / rho).exp()).exp_m1(),
            Family::DoublePareto { rho } => {
                if x < T::zero() {
                    half * (one - x).powf(one - rho)
                } else {
                    one - half * (one + x).powf(one - rho)
                }
            }
            Family::Cauchy { c } => half + (x / c).atan() / T::PI(),
            Family::Gaussian { mu, sigma } => half * erfc(-(x - mu) / (sigma * T::SQRT_2())),
            Family::Weibull { gamma, delta } => {
                if x <= T::zero() {
                    T::zero()
                } else {
                    -(-(x / delta).powf(gamma)).exp_m1()
                }
            }
            Family::GenGamma { gamma, delta } => {
                if x <= T::zero() {
                    T::zero()
                } else if gamma > T::zero() {
                    gamma_p(delta, x.powf(gamma)).expect("valid incomplete gamma arguments")
                } else {
                    gamma_q(delta, x.powf(gamma)).expect("valid incomplete gamma arguments")
                }
            }
            Family::Uniform { lo, hi } => ((x - lo) / (hi - lo)).max(T::zero()).min(one),
        };
        p.max(T::zero()).min(one)
    }

    /// Survival function `1 − F(x)`, accurate in the upper tail.
    pub fn sf(&self, x: T) -> T {
        let one = T::one();
        let half = T::lit(0.5);
        let p = match self.family {
            Family::Laplace { m, b } => {
                let z = (x - m) / b;
                if z >= T::zero() {
                    half * (-z).exp()
                } else {
                    one - half * z.exp()
                }
            }
            Family::Logistic { m, rho } => {
                let z = (x - m) / rho;
                if z <= T::zero() {
                    one / (one + z.exp())
                } else {
                    let e = (-z).exp();
                    e / (one + e)
                }
            }
            Family::Gumbel { mu, rho } => -(-(-(x - mu) / rho).exp()).exp_m1(),
            Family::NegGumbel { mu, rho } => (-((x - mu) / rho).exp()).exp(),
            Family::DoublePareto { rho } => {
                if x >= T::zero() {
                    half * (one + x).powf(one - rho)
                } else {
                    one - half * (one - x).powf(one - rho)
                }
            }
            Family::Cauchy { c } => {
                if x > T::zero() {
                    (c / x).atan() / T::PI()
                } else {
                    half - (x / c).atan() / T::PI()
                }
            }
            Family::Gaussian { mu, sigma } => half * erfc((x - mu) / (sigma * T::SQRT_2())),
            Family::Weibull { gamma, delta } => {
                if x <= T::zero() {
                    one
                } else {
                    (-(x / delta).powf(gamma)).exp()
                }
            }
            Family::GenGamma { gamma, delta } => {
                if x <= T::zero() {
                    one
                } else if gamma > T::zero() {
                    gamma_q(delta, x.powf(gamma)).expect("valid incomplete gamma arguments")
                } else {
                    gamma_p(delta, x.powf(gamma)).expect("valid incomplete gamma arguments")
                }
            }
            Family::Uniform { lo, hi } => ((hi - x) / (hi - lo)).max(T::zero()).min(one),
        };
        p.max(T::zero()).min(one)
    }

    /// Inverse cdf on the open unit interval.
    pub fn quantile(&self, u: T) -> Result<T> {
        if !(u > T::zero() && u < T::one()) {
            return Err(Error::domain(format!("quantile needs u in (0, 1), got {u}")));
        }
        let one = T::one();
        let two = T::lit(2.0);
        let half = T::lit(0.5);
        Ok(match self.family {
            Family::Laplace { m, b } => {
                if u < half {
                    m + b * (two * u).ln()
                } else {
                    m - b * (two * (one - u)).ln()
                }
            }
            Family::Logistic { m, rho } => m + rho * (u / (one - u)).ln(),
            Family::Gumbel { mu, rho } => mu - rho * (-u.ln()).ln(),
            Family::NegGumbel { mu, rho } => mu + rho * (-(-u).ln_1p()).ln(),
            Family::DoublePareto { rho } => {
                let k = one / (one - rho);
                if u < half {
                    one - (two * u).powf(k)
                } else {
                    (two * (one - u)).powf(k) - one
                }
            }
            Family::Cauchy { c } => c * (T::PI() * (u - half)).tan(),
            Family::Gaussian { mu, sigma } => mu + sigma * norm_quantile(u)?,
            Family::Weibull { gamma, delta } => delta * (-(-u).ln_1p()).powf(one / gamma),
            Family::GenGamma { .. } => self.log_space_root(|x| self.cdf(x) - u)?,
            Family::Uniform { lo, hi } => lo + u * (hi - lo),
        })
    }

    // Brent on t = ln x for the positive families without a closed-form
    // inverse; `excess(x)` is increasing in x and vanishes at the answer.
    fn log_space_root(&self, excess: impl Fn(T) -> T) -> Result<T> {
        let g = |t: T| excess(t.exp());
        let (mut lo, mut hi) = (-T::one(), T::one());
        let limit = T::lit(700.0);
        while g(lo) > T::zero() && lo > -limit {
            lo = lo * T::lit(2.0);
        }
        while g(hi) < T::zero() && hi < limit {
            hi = hi * T::lit(2.0);
        }
        let t = find_root_with(g, lo, hi, T::lit(1e-15), T::lit(1e-14))?;
        Ok(t.exp())
    }

    /// Upper quantile: the `x` with `sf(x) = s`, accurate for small `s`.
    pub fn isf(&self, s: T) -> Result<T> {
        if !(s > T::zero() && s < T::one()) {
            return Err(Error::domain(format!("isf needs s in (0, 1), got {s}")));
        }
        let one = T::one();
        let two = T::lit(2.0);
        let half = T::lit(0.5);
        Ok(match self.family {
            Family::Laplace { m, b } => {
                if s < half {
                    m - b * (two * s).ln()
                } else {
                    m + b * (two * (one - s)).ln()
                }
            }
            Family::Logistic { m, rho } => m - rho * (s / (one - s)).ln(),
            Family::Gumbel { mu, rho } => mu - rho * (-(-s).ln_1p()).ln(),
            Family::NegGumbel { mu, rho } => mu + rho * (-s.ln()).ln(),
            Family::DoublePareto { rho } => {
                let k = one / (one - rho);
                if s < half {
                    (two * s).powf(k) - one
                } else {
                    one - (two * (one - s)).powf(k)
                }
            }
            Family::Cauchy { c } => c / (T::PI() * s).tan(),
            Family::Gaussian { mu, sigma } => mu + sigma * T::SQRT_2() * erfc_inv(two * s)?,
            Family::Weibull { gamma, delta } => delta * (-s.ln()).powf(one / gamma),
            Family::GenGamma { .. } => {
                self.log_space_root(|x| s.ln() - self.sf(x).max(T::min_positive_value()).ln())?
            }
            Family::Uniform { lo, hi } => hi - s * (hi - lo),
        })
    }

    /// Characteristic function `E e^{iθX}`.
    ///
    /// Closed form for all families except double Pareto (contour-rotated
    /// integral), Weibull and the generalized gamma (quadrature), which can
    /// report non-convergence at very large `|θ|`.
    pub fn cf(&self, theta: T) -> Result<Complex<T>> {
        if theta == T::zero() {
            return Ok(Complex::new(T::one(), T::zero()));
        }
        let drift = |loc: T| Complex::new(T::zero(), loc * theta).exp();
        Ok(match self.family {
            Family::Laplace { m, b } => drift(m) / (T::one() + b * b * theta * theta),
            Family::Logistic { m, rho } => drift(m) * pi_x_over_sinh(rho * theta),
            Family::Gumbel { mu, rho } => drift(mu) * gamma_one_plus_i(-rho * theta),
            Family::NegGumbel { mu, rho } => drift(mu) * gamma_one_plus_i(rho * theta),
            Family::DoublePareto { rho } => cx(double_pareto_cf(rho, theta.abs())?, T::zero()),
            Family::Cauchy { c } => cx((-c * theta.abs()).exp(), T::zero()),
            Family::Gaussian { mu, sigma } => {
                drift(mu) * (-T::lit(0.5) * sigma * sigma * theta * theta).exp()
            }
            Family::Uniform { lo, hi } => {
                let half_width = T::lit(0.5) * (hi - lo) * theta;
                drift(T::lit(0.5) * (lo + hi)) * (half_width.sin() / half_width)
            }
            Family::Weibull { .. } | Family::GenGamma { .. } => {
                let re = self.positive_expectation(|x| (theta * x).cos())?;
                let im = self.positive_expectation(|x| (theta * x).sin())?;
                cx(re, im)
            }
        })
    }

    /// Moment generating function `E e^{sX}`; domain error outside the
    /// family's convergence region.
    ///
    /// Regions: Laplace `|s| < 1/b`, logistic `|s| < 1/ρ`, Gumbel `s < 1/ρ`,
    /// negative Gumbel `s > −1/ρ`, Gaussian and uniform all `s`, Cauchy and
    /// double Pareto only `s = 0`, Weibull and generalized gamma all `s` when
    /// `γ > 1`, `s < 1/δ` (Weibull) or `s < 1` (generalized gamma) when
    /// `γ = 1`, and `s ≤ 0` otherwise.
    pub fn mgf(&self, s: T) -> Result<T> {
        if s == T::zero() {
            return Ok(T::one());
        }
        let one = T::one();
        let out_of = |region: String| {
            Err(Error::domain(format!(
                "{} mgf is finite only for {region}, got s = {s}",
                self.name()
            )))
        };
        match self.family {
            Family::Laplace { m, b } => {
                if (b * s).abs() >= one {
                    return out_of(format!("|s| < {}", one / b));
                }
                Ok((m * s).exp() / (one - b * b * s * s))
            }
            Family::Logistic { m, rho } => {
                if (rho * s).abs() >= one {
                    return out_of(format!("|s| < {}", one / rho));
                }
                let a = T::PI() * rho * s;
                Ok((m * s).exp() * a / a.sin())
            }
            Family::Gumbel { mu, rho } => {
                if rho * s >= one {
                    return out_of(format!("s < {}", one / rho));
                }
                Ok((mu * s).exp() * gamma(one - rho * s)?)
            }
            Family::NegGumbel { mu, rho } => {
                if rho * s <= -one {
                    return out_of(format!("s > {}", -one / rho));
                }
                Ok((mu * s).exp() * gamma(one + rho * s)?)
            }
            Family::DoublePareto { .. } | Family::Cauchy { .. } => out_of("s = 0".into()),
            Family::Gaussian { mu, sigma } => Ok((mu * s + T::lit(0.5) * sigma * sigma * s * s).exp()),
            Family::Uniform { lo, hi } => {
                let half_width = T::lit(0.5) * (hi - lo) * s;
                Ok((T::lit(0.5) * (lo + hi) * s).exp() * half_width.sinh() / half_width)
            }
            Family::Weibull { gamma, delta } => {
                if gamma == one {
                    if delta * s >= one {
                        return out_of(format!("s < {}", one / delta));
                    }
                    return Ok(one / (one - delta * s));
                }
                if gamma < one && s > T::zero() {
                    return out_of("s <= 0".into());
                }
                self.positive_expectation(|x| (s * x).exp())
            }
            Family::GenGamma { gamma, delta } => {
                if gamma == one {
                    if s >= one {
                        return out_of("s < 1".into());
                    }
                    return Ok((one - s).powf(-delta));
                }
                if gamma < one && s > T::zero() {
                    return out_of("s <= 0".into());
                }
                self.positive_expectation(|x| (s * x).exp())
            }
        }
    }

    /// `E g(X)` for the Weibull and generalized gamma families, written as
    /// `X = c·Y^{1/γ}` with `Y ~ Gamma(k)` and then `Y = v^{1/k}`, which leaves
    /// the bounded weight `e^{−v^{1/k}} / Γ(k+1)` on `(0, ∞)`.
    pub(crate) fn positive_expectation(&self, g: impl Fn(T) -> T) -> Result<T> {
        let (c, gamma, k) = match self.family {
            Family::Weibull { gamma, delta } => (delta, gamma, T::one()),
            Family::GenGamma { gamma, delta } => (T::one(), gamma, delta),
            _ => return Err(Error::domain("positive_expectation needs a Weibull or gen_gamma spec")),
        };
        let settings = QuadratureSettings {
            abs_tol: T::lit(1e-12),
            rel_tol: T::lit(1e-11),
            max_subdivisions: 20_000,
        };
        let inv_k = T::one() / k;
        let inv_gk = T::one() / (gamma * k);
        let norm = crate::numerics::gamma(k + T::one())?;
        let integrand = |v: T| {
            let w = (-v.powf(inv_k)).exp();
            if w == T::zero() {
                return T::zero();
            }
            g(c * v.powf(inv_gk)) * w
        };
        Ok(integrate(integrand, T::zero(), T::infinity(), &settings)? / norm)
    }
}

// Density limit at x = 0⁺ for densities behaving like `coef · x^power`.
fn origin_density<T: Real>(power: T, coef: T) -> T {
    if power < T::zero() {
        T::infinity()
    } else if power == T::zero() {
        coef
    } else {
        T::zero()
    }
}

// Rotating ∫₀^∞ cos(θx)(1+x)^{−ρ} dx onto the imaginary axis and putting
// s = tan t gives (ρ−1)∫₀^{π/2} e^{−θ tan t} cos^{ρ−2}t sin(ρt) dt.
fn double_pareto_cf<T: Real>(rho: T, theta: T) -> Result<T> {
    let settings = QuadratureSettings {
        abs_tol: T::lit(1e-13),
        rel_tol: T::lit(1e-12),
        max_subdivisions: 20_000,
    };
    let two = T::lit(2.0);
    let integrand = |t: T| {
        let damp = (-theta * t.tan()).exp();
        if damp == T::zero() {
            return T::zero();
        }
        damp * t.cos().powf(rho - two) * (rho * t).sin()
    };
    Ok((rho - T::one()) * integrate(integrand, T::zero(), T::FRAC_PI_2(), &settings)?)
}
