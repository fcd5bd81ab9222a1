use std::fmt;

use serde::{Deserialize, Serialize};

use super::ImageGrid;
use crate::error::Result;
use crate::scalar::Real;

/// Peak signal-to-noise ratio with an explicit marker for identical images.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Psnr {
    Finite(f64),
    /// Zero mean squared error.
    Infinite,
}

impl Psnr {
    /// Decibel value, `None` for identical images.
    pub fn db(self) -> Option<f64> {
        match self {
            Psnr::Finite(v) => Some(v),
            Psnr::Infinite => None,
        }
    }

    /// Decibel value with `f64::INFINITY` for identical images.
    pub fn as_f64(self) -> f64 {
        self.db().unwrap_or(f64::INFINITY)
    }
}

impl fmt::Display for Psnr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Psnr::Finite(v) => write!(f, "{v:.2} dB"),
            Psnr::Infinite => write!(f, "inf dB"),
        }
    }
}

pub fn mse<T: Real>(reference: &ImageGrid<T>, test: &ImageGrid<T>) -> Result<f64> {
    reference.same_dims(test)?;
    let sum: f64 = reference
        .data()
        .iter()
        .zip(test.data())
        .map(|(&a, &b)| {
            let d = (a - b).to_f64().unwrap_or(f64::NAN);
            d * d
        })
        .sum();
    Ok(sum / reference.len() as f64)
}

/// `10 log10(255^2 / MSE)`; the peak is fixed at 255.
pub fn psnr<T: Real>(reference: &ImageGrid<T>, test: &ImageGrid<T>) -> Result<Psnr> {
    let mse = mse(reference, test)?;
    if mse == 0.0 {
        return Ok(Psnr::Infinite);
    }
    Ok(Psnr::Finite(10.0 * (255.0 * 255.0 / mse).log10()))
}
