//! Least-squares calibration of implied volatility and implied dividend
//! yield from call quotes, with a generic driver for other pricers.

mod nelder_mead;

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::binomial::price_closed_form_dividend;
use crate::error::{Error, Result};
use crate::real::Real;

use nelder_mead::{minimize, Bounds};

/// A quoted European call.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct OptionQuote<T> {
    pub strike: T,
    pub maturity: T,
    pub mid_price: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct CalibrationResult<T> {
    pub sigma_impl: T,
    pub dy_impl: T,
    pub objective: T,
    /// Nelder–Mead iterations summed over every start and the final polish.
    pub n_iterations: usize,
    pub converged: bool,
}

/// Result of [`calibrate_generic`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct GenericCalibration<T> {
    pub params: Vec<T>,
    pub objective: T,
    pub n_iterations: usize,
    pub converged: bool,
    /// Per parameter: the optimum sits on a bound of a nondegenerate interval.
    pub on_boundary: Vec<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct CalibrationSettings<T> {
    pub sigma_bounds: (T, T),
    pub dy_bounds: (T, T),
    /// Simplex size, in parameter units, at which a run stops.
    pub tol: T,
    /// Iteration cap per Nelder–Mead run.
    pub max_iter: usize,
    /// Number of starting points.
    pub multistart: usize,
}

impl<T: Real> Default for CalibrationSettings<T> {
    fn default() -> Self {
        CalibrationSettings {
            sigma_bounds: (T::lit(1e-4), T::lit(5.0)),
            dy_bounds: (-T::one(), T::one()),
            tol: T::lit(1e-10),
            max_iter: 2000,
            multistart: 8,
        }
    }
}

impl<T: Real> CalibrationSettings<T> {
    fn validate(&self) -> Result<()> {
        let (s_lo, s_hi) = self.sigma_bounds;
        let (d_lo, d_hi) = self.dy_bounds;
        if !(s_lo > T::zero() && s_lo <= s_hi && s_hi.is_finite()) {
            return Err(Error::Config(format!("sigma bounds must satisfy 0 < lo <= hi, got [{s_lo}, {s_hi}]")));
        }
        if !(d_lo <= d_hi && d_lo.is_finite() && d_hi.is_finite()) {
            return Err(Error::Config(format!("D_y bounds must be ordered and finite, got [{d_lo}, {d_hi}]")));
        }
        check_search(self.tol, self.max_iter, self.multistart)
    }
}

fn check_search<T: Real>(tol: T, max_iter: usize, multistart: usize) -> Result<()> {
    if !(tol > T::zero()) {
        return Err(Error::Config(format!("tol must be positive, got {tol}")));
    }
    if max_iter == 0 || multistart == 0 {
        return Err(Error::Config("max_iter and multistart must be at least 1".into()));
    }
    Ok(())
}

/// Reads `strike,maturity,mid_price` rows. Rows are numbered by file line,
/// so the first quote is row 2.
pub fn load_quotes<T: Real>(path: impl AsRef<Path>) -> Result<Vec<OptionQuote<T>>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::FileNotFound(path.display().to_string()),
        _ => Error::Io(format!("{}: {e}", path.display())),
    })?;
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let header = reader
        .headers()
        .map_err(|e| Error::Parse {
            row: 1,
            message: e.to_string(),
        })?
        .clone();
    let expected = ["strike", "maturity", "mid_price"];
    if header.iter().collect::<Vec<_>>() != expected {
        return Err(Error::Parse {
            row: 1,
            message: format!("header must be strike,maturity,mid_price, got {}", header.iter().collect::<Vec<_>>().join(",")),
        });
    }
    let mut quotes = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 2;
        let record = record.map_err(|e| Error::Parse {
            row,
            message: e.to_string(),
        })?;
        let mut vals = [T::zero(); 3];
        for (j, name) in expected.iter().enumerate() {
            let field = record.get(j).unwrap_or("");
            let v: f64 = field.parse().map_err(|_| Error::Parse {
                row,
                message: format!("{name} = {field:?} is not a number"),
            })?;
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Parse {
                    row,
                    message: format!("{name} must be positive, got {v}"),
                });
            }
            vals[j] = T::lit(v);
        }
        quotes.push(OptionQuote {
            strike: vals[0],
            maturity: vals[1],
            mid_price: vals[2],
        });
    }
    if quotes.is_empty() {
        return Err(Error::Parse {
            row: 1,
            message: "no quotes".into(),
        });
    }
    Ok(quotes)
}

fn check_quotes<T: Real>(quotes: &[OptionQuote<T>], spot: T) -> Result<()> {
    if !(spot > T::zero() && spot.is_finite()) {
        return Err(Error::domain(format!("spot must be positive, got {spot}")));
    }
    for (i, q) in quotes.iter().enumerate() {
        let positive = [q.strike, q.maturity, q.mid_price].iter().all(|v| *v > T::zero() && v.is_finite());
        if !positive {
            return Err(Error::domain(format!("quote {i}: strike, maturity and price must be positive")));
        }
        if !(q.mid_price < spot) {
            return Err(Error::domain(format!(
                "quote {i}: call price {} is not below the spot {spot}",
                q.mid_price
            )));
        }
    }
    Ok(())
}

/// `Σ ((C_market − C_model) / C_market)²` for any model pricer.
fn relative_sse<T: Real>(quotes: &[OptionQuote<T>], model: impl Fn(&OptionQuote<T>) -> Result<T>) -> Result<T> {
    let mut sum = T::zero();
    for q in quotes {
        let c = model(q)?;
        if c.abs() < T::lit(1e-10) {
            log::warn!(
                "model price {c:e} below 1e-10 at strike {}, maturity {}",
                q.strike,
                q.maturity
            );
        }
        let e = (q.mid_price - c) / q.mid_price;
        sum += e * e;
    }
    Ok(sum)
}

/// Sum of squared relative errors against the dividend-yield Black–Scholes
/// price with volatility `sigma` and yield `dy`.
pub fn objective<T: Real>(quotes: &[OptionQuote<T>], spot: T, r: T, sigma: T, dy: T) -> Result<T> {
    relative_sse(quotes, |q| {
        price_closed_form_dividend(spot, q.strike, T::zero(), q.maturity, r, sigma, dy)
    })
}

/// Fits one `(σ, D_y)` pair to every quote.
pub fn calibrate_sigma_dy<T: Real>(
    quotes: &[OptionQuote<T>],
    spot: T,
    r: T,
    settings: &CalibrationSettings<T>,
) -> Result<CalibrationResult<T>> {
    settings.validate()?;
    check_quotes(quotes, spot)?;
    if quotes.len() < 2 {
        return Err(Error::Identifiability(format!(
            "sigma and D_y need at least 2 quotes, got {}",
            quotes.len()
        )));
    }
    if quotes.iter().all(|q| q.strike == quotes[0].strike) {
        return Err(Error::Identifiability("sigma and D_y need at least 2 distinct strikes".into()));
    }
    let lo = [settings.sigma_bounds.0, settings.dy_bounds.0];
    let hi = [settings.sigma_bounds.1, settings.dy_bounds.1];
    let fit = search(
        |p: &[T]| objective(quotes, spot, r, p[0], p[1]),
        &lo,
        &hi,
        settings.tol,
        settings.max_iter,
        settings.multistart,
    )?;
    Ok(CalibrationResult {
        sigma_impl: fit.params[0],
        dy_impl: fit.params[1],
        objective: fit.objective,
        n_iterations: fit.n_iterations,
        converged: fit.converged,
    })
}

/// Fits the parameters of an arbitrary pricer over `param_box`.
///
/// `pricer(params)` builds a quote pricer `(strike, maturity) -> price`; it is
/// called once per objective evaluation, so it can share work across quotes.
pub fn calibrate_generic<T, P, F>(
    quotes: &[OptionQuote<T>],
    spot: T,
    pricer: P,
    param_box: &[(T, T)],
    settings: &CalibrationSettings<T>,
) -> Result<GenericCalibration<T>>
where
    T: Real,
    P: Fn(&[T]) -> Result<F> + Sync,
    F: Fn(T, T) -> Result<T>,
{
    check_search(settings.tol, settings.max_iter, settings.multistart)?;
    check_quotes(quotes, spot)?;
    if quotes.is_empty() {
        return Err(Error::Identifiability("no quotes".into()));
    }
    if param_box.is_empty() {
        return Err(Error::Config("empty parameter box".into()));
    }
    for (i, &(lo, hi)) in param_box.iter().enumerate() {
        if !(lo <= hi && lo.is_finite() && hi.is_finite()) {
            return Err(Error::Config(format!("parameter {i}: bounds [{lo}, {hi}] are not ordered and finite")));
        }
    }
    let lo: Vec<T> = param_box.iter().map(|b| b.0).collect();
    let hi: Vec<T> = param_box.iter().map(|b| b.1).collect();
    search(
        |p: &[T]| {
            let price = pricer(p)?;
            relative_sse(quotes, |q| price(q.strike, q.maturity))
        },
        &lo,
        &hi,
        settings.tol,
        settings.max_iter,
        settings.multistart,
    )
}

/// Radical inverse of `i` in `base`.
fn halton(mut i: usize, base: usize) -> f64 {
    let (mut x, mut f) = (0.0, 1.0 / base as f64);
    while i > 0 {
        x += f * (i % base) as f64;
        i /= base;
        f /= base as f64;
    }
    x
}

const PRIMES: [usize; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Multistart Nelder–Mead from the box centre and Halton points, then a
/// restart from the best point to guard against a collapsed simplex.
fn search<T: Real>(
    f: impl Fn(&[T]) -> Result<T> + Sync,
    lo: &[T],
    hi: &[T],
    tol: T,
    max_iter: usize,
    multistart: usize,
) -> Result<GenericCalibration<T>> {
    let dim = lo.len();
    if dim > PRIMES.len() {
        return Err(Error::Config(format!("at most {} parameters are supported", PRIMES.len())));
    }
    // Non-finite objective values are treated as +inf so the simplex moves away.
    let f = |p: &[T]| f(p).map(|v| if v.is_finite() { v } else { T::infinity() });
    let bounds = Bounds { lo, hi };
    let starts: Vec<Vec<T>> = (0..multistart)
        .map(|k| {
            (0..dim)
                .map(|j| {
                    let u = if k == 0 { 0.5 } else { halton(k, PRIMES[j]) };
                    lo[j] + T::lit(u) * (hi[j] - lo[j])
                })
                .collect()
        })
        .collect();
    let step = T::lit(0.1);
    let runs = starts
        .par_iter()
        .map(|x0| minimize(&f, &bounds, x0, step, tol, max_iter))
        .collect::<Result<Vec<_>>>()?;
    let mut total: usize = runs.iter().map(|r| r.iterations).sum();
    let best = runs
        .into_iter()
        .reduce(|a, b| if b.f < a.f { b } else { a })
        .expect("multistart >= 1");
    let polish = minimize(&f, &bounds, &best.x, T::lit(1e-3), tol, max_iter)?;
    total += polish.iterations;
    let (best, converged) = if polish.f <= best.f {
        let c = polish.converged;
        (polish, c)
    } else {
        let c = best.converged;
        (best, c)
    };
    let on_boundary = (0..dim)
        .map(|j| {
            let width = hi[j] - lo[j];
            let eps = T::lit(1e-8) * width;
            width > T::zero() && (best.x[j] - lo[j] <= eps || hi[j] - best.x[j] <= eps)
        })
        .collect();
    Ok(GenericCalibration {
        params: best.x,
        objective: best.f,
        n_iterations: total,
        converged,
        on_boundary,
    })
}
