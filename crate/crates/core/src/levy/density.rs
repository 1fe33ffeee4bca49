use super::{check_time, LevyModel};
use crate::distributions::DistributionSpec;
use crate::error::Result;
use crate::numerics::{integrate_with_breaks, CfInverter, QuadratureSettings};
use crate::real::Real;

/// Density of `L(t)` under an Esscher measure, tabulated once on a range
/// that leaves out less than about 1e-15 of the mass of both `f` and `e^x f`.
///
/// At `t = 1` the closed form is used; otherwise the tilted cf is inverted.
/// The result is renormalized over the range.
#[derive(Debug, Clone)]
pub struct LevyDensity<T> {
    source: Source<T>,
    lo: T,
    hi: T,
    mode_hint: T,
    norm: T,
}

#[derive(Debug, Clone)]
enum Source<T> {
    Closed { law: DistributionSpec<T>, h: T, log_m: T },
    Inverted(CfInverter<T>),
}

impl<T: Real> LevyDensity<T> {
    pub fn new(model: &LevyModel<T>, t: T, h: T) -> Result<Self> {
        Self::build(model, t, h, false)
    }

    /// Always inverts the cf, also at `t = 1`.
    pub fn inverted(model: &LevyModel<T>, t: T, h: T) -> Result<Self> {
        Self::build(model, t, h, true)
    }

    fn build(model: &LevyModel<T>, t: T, h: T, force_inversion: bool) -> Result<Self> {
        check_time(t)?;
        let log_m = model.log_mgf(h)?;
        let (mean, var) = model.tilted_cumulants(h)?;
        let (mean, sd) = (mean * t, (var * t).sqrt());
        let (left_rate, right_rate) = model.tail_rates(h);
        // A t-fold convolution of exponential tails decays like x^{t−1} e^{−ax}.
        let reach = |a: T| (T::lit(40.0) + T::lit(4.0) * t) / a;
        let spread = T::lit(12.0) * sd;
        let lo = mean - spread.max(reach(left_rate));
        let hi = mean
            + match right_rate {
                // Leave room for the e^x weight when it is integrable.
                Some(a) if a > T::lit(1.5) => spread.max(reach(a - T::one())),
                Some(a) => spread.max(reach(a)),
                None => spread,
            };
        let source = if t == T::one() && !force_inversion {
            Source::Closed {
                law: model.unit_law(),
                h,
                log_m,
            }
        } else {
            let tol = (T::epsilon() * T::lit(1e4)).max(T::lit(1e-12));
            let m = *model;
            Source::Inverted(CfInverter::new(
                move |th| m.tilted_cf_unchecked(t, h, log_m, th),
                lo,
                hi,
                tol,
            )?)
        };
        let mut out = LevyDensity {
            source,
            lo,
            hi,
            mode_hint: mean,
            norm: T::one(),
        };
        out.norm = out.raw_mass(lo, hi)?;
        Ok(out)
    }

    /// Interval outside which the density is treated as zero.
    pub fn range(&self) -> (T, T) {
        (self.lo, self.hi)
    }

    pub fn pdf(&self, x: T) -> T {
        self.raw(x).max(T::zero())
    }

    fn raw(&self, x: T) -> T {
        if x < self.lo || x > self.hi {
            return T::zero();
        }
        let v = match &self.source {
            Source::Closed { law, h, log_m } => {
                let f = law.pdf(x);
                if f > T::zero() {
                    (*h * x - *log_m).exp() * f
                } else {
                    T::zero()
                }
            }
            Source::Inverted(inv) => {
                let d = inv.pdf(x);
                d.density - d.clamped
            }
        };
        v / self.norm
    }

    fn raw_mass(&self, a: T, b: T) -> Result<T> {
        let (a, b) = (a.max(self.lo), b.min(self.hi));
        if !(b > a) {
            return Ok(T::zero());
        }
        match &self.source {
            Source::Inverted(inv) => Ok(inv.integral(a, b) / self.norm),
            Source::Closed { .. } => {
                let mut breaks = vec![a, b];
                if self.mode_hint > a && self.mode_hint < b {
                    breaks.insert(1, self.mode_hint);
                }
                integrate_with_breaks(|x| self.raw(x), &breaks, &mass_settings())
            }
        }
    }

    /// Probability of `(a, b)`.
    pub fn mass(&self, a: T, b: T) -> Result<T> {
        self.raw_mass(a, b)
    }

    pub fn cdf(&self, x: T) -> Result<T> {
        self.raw_mass(self.lo, x)
    }

    /// `P(L > x)`.
    pub fn tail(&self, x: T) -> Result<T> {
        self.raw_mass(x, self.hi)
    }

    /// `∫ g(x) f(x) dx` over the range, split at `kinks`.
    pub fn expectation(&self, g: impl Fn(T) -> T, kinks: &[T]) -> Result<T> {
        let mut breaks = vec![self.lo, self.hi];
        breaks.extend(
            kinks
                .iter()
                .copied()
                .chain(std::iter::once(self.mode_hint))
                .filter(|&k| k > self.lo && k < self.hi),
        );
        breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        breaks.dedup();
        let settings = QuadratureSettings::new(T::lit(1e-12), T::lit(1e-11), 4000)?;
        integrate_with_breaks(|x| g(x) * self.raw(x), &breaks, &settings)
    }
}

fn mass_settings<T: Real>() -> QuadratureSettings<T> {
    QuadratureSettings {
        abs_tol: T::lit(1e-14),
        rel_tol: T::lit(1e-13),
        max_subdivisions: 4000,
    }
}
