use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Open01;

use super::DistributionSpec;
use crate::error::Result;
use crate::real::Real;

impl<T: Real> DistributionSpec<T> {
    /// `n` draws by inverse transform, reproducible for a given `seed`.
    pub fn sample(&self, n: usize, seed: u64) -> Result<Vec<T>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.sample_with(&mut rng, n)
    }

    /// Inverse-transform draws from a caller-supplied generator.
    pub fn sample_with<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Result<Vec<T>> {
        (0..n)
            .map(|_| {
                let u: f64 = rng.sample(Open01);
                self.quantile(T::lit(u))
            })
            .collect()
    }
}
