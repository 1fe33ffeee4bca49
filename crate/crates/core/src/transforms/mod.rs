//! Value functions and probability weighting functions: the named
//! behavioral families, the maps built from a pair of cdfs, penalized cdfs
//! and their moments, and the fear/greed reading of a weighting curve.

mod posterior;
mod value;
mod weighting;

pub use posterior::{
    classify_disposition, fosd_check, mpwpf_posterior, posterior_stats, Disposition, MpwpfPosterior, PenalizedCdf,
    PosteriorStats, DISPOSITION_GRID, DISPOSITION_TOL, TAIL_MASS,
};
pub use value::{fit_logform_to_tk, ValueFunction, ValueKind};
pub use weighting::{WeightingFunction, WeightingKind, TK_GAMMA_MIN};
