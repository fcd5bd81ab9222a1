use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::ImageGrid;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Additive white Gaussian noise description.
///
/// Samples come from `ChaCha20Rng::seed_from_u64(seed)` mapped through the
/// ziggurat standard-normal sampler of `rand_distr`, drawn in row-major pixel
/// order. The pair `(sigma, seed)` fully determines the realisation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub sigma: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(sigma: f64, seed: u64) -> Result<Self> {
        let spec = Self { sigma, seed };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma.is_finite() && self.sigma >= 0.0) {
            return Err(Error::InvalidParameter(format!("noise sigma must be finite and >= 0, got {}", self.sigma)));
        }
        Ok(())
    }
}

/// Returns `img + n` with `n ~ N(0, sigma^2)` i.i.d. per pixel. No clipping.
pub fn add_awgn<T: Real>(img: &ImageGrid<T>, noise: NoiseSpec) -> Result<ImageGrid<T>> {
    noise.validate()?;
    if noise.sigma == 0.0 {
        return Ok(img.clone());
    }
    let mut rng = ChaCha20Rng::seed_from_u64(noise.seed);
    let sigma = T::lit(noise.sigma);
    let data = img
        .data()
        .iter()
        .map(|&v| {
            let z: f64 = StandardNormal.sample(&mut rng);
            v + sigma * T::lit(z)
        })
        .collect();
    ImageGrid::new(img.width(), img.height(), data)
}
