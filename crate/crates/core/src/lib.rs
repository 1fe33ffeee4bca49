//! Behavioral option pricing.
//!
//! Prospect-theory value and probability weighting functions act on return
//! distributions; the resulting laws feed Esscher-transform Lévy pricers,
//! greed–fear diffusion and binomial pricers, and a least-squares calibrator.
//!
//! Numerical code is generic over [`Real`] (`f32`/`f64`); the aliases at the
//! crate root fix the scalar to `f64`.

pub mod binomial;
pub mod calibration;
pub mod diffusion;
pub mod distributions;
pub mod error;
pub mod levy;
pub mod numerics;
pub mod transforms;
mod real;

pub use error::{Error, Result};
pub use real::Real;

// f64 instantiations of the generic types.
pub type DistributionSpec = distributions::DistributionSpec<f64>;
pub type Family = distributions::Family<f64>;
pub type MomentSummary = distributions::MomentSummary<f64>;

pub type ValueFunction = transforms::ValueFunction<f64>;
pub type WeightingFunction = transforms::WeightingFunction<f64>;
pub type PenalizedCdf = transforms::PenalizedCdf<f64>;
pub type PosteriorStats = transforms::PosteriorStats<f64>;

pub type LevyModel = levy::LevyModel<f64>;
pub type LevyMarket = levy::LevyMarket<f64>;
pub type LevyPricer = levy::LevyPricer<f64>;
pub type EuropeanClaim = levy::EuropeanClaim<f64>;

pub type Coefficient = diffusion::Coefficient<f64>;
pub type GreedFearDiffusionSpec = diffusion::GreedFearDiffusionSpec<f64>;
pub type McEstimate = diffusion::McEstimate<f64>;

pub type GreedFearBinomialSpec = binomial::GreedFearBinomialSpec<f64>;

pub type OptionQuote = calibration::OptionQuote<f64>;
pub type CalibrationSettings = calibration::CalibrationSettings<f64>;
pub type CalibrationResult = calibration::CalibrationResult<f64>;

pub type QuadratureSettings = numerics::QuadratureSettings<f64>;
pub type Complex = numerics::Complex<f64>;
