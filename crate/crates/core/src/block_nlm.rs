//! Blockwise (accelerated) non-local means with a Gaussian-weighted patch
//! distance. Used on the wavelet detail bands in the first stage.
//!
//! Weights are evaluated once per block centre on a strided lattice. Each
//! centre yields a full patch estimate, the weighted average of the patches
//! in its search window, and every pixel averages the estimates of all blocks
//! that cover it.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imaging::{ImageGrid, Patch};
use crate::scalar::Real;

/// Scale of squared patch distances.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DistanceConvention {
    /// Mean over patch pixels (kernel weights sum to one). `h` is then
    /// independent of the patch size.
    Normalized,
    /// Sum over patch pixels, i.e. the normalized distance times `m^2`.
    /// The published `h` factors (6 sigma, 3.87 sigma) are calibrated for
    /// this scale.
    #[default]
    Raw,
}

impl DistanceConvention {
    /// Factor applied to the per-pixel normalized distance.
    pub fn scale<T: Real>(self, side: usize) -> T {
        match self {
            DistanceConvention::Normalized => T::one(),
            DistanceConvention::Raw => T::count(side * side),
        }
    }
}

impl std::str::FromStr for DistanceConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "normalized" => Ok(Self::Normalized),
            "raw" => Ok(Self::Raw),
            other => Err(Error::InvalidParameter(format!("unknown distance convention {other:?}"))),
        }
    }
}

/// Normalized, separable Gaussian window over an `m x m` patch.
#[derive(Clone, Debug, PartialEq)]
pub struct SpatialKernel<T> {
    side: usize,
    weights: Vec<T>,
}

impl<T: Real> SpatialKernel<T> {
    pub fn gaussian(side: usize, alpha: T) -> Result<Self> {
        if side < 3 || side.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!("kernel side {side} must be odd and >= 3")));
        }
        if !(alpha > T::zero()) || !alpha.is_finite() {
            return Err(Error::InvalidParameter(format!("kernel alpha {alpha} must be > 0")));
        }
        let half = (side / 2) as isize;
        let two_a2 = T::lit(2.0) * alpha * alpha;
        let mut weights = Vec::with_capacity(side * side);
        for dy in -half..=half {
            for dx in -half..=half {
                let r2 = T::lit((dy * dy + dx * dx) as f64);
                weights.push((-r2 / two_a2).exp());
            }
        }
        let total: T = weights.iter().copied().sum();
        weights.iter_mut().for_each(|w| *w = *w / total);
        Ok(Self { side, weights })
    }

    pub fn uniform(side: usize) -> Result<Self> {
        if side < 3 || side.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!("kernel side {side} must be odd and >= 3")));
        }
        let w = T::one() / T::count(side * side);
        Ok(Self { side, weights: vec![w; side * side] })
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }
}

/// `Σ kernel(k, l) (a(k, l) - b(k, l))^2`.
pub fn patch_distance_weighted<T: Real>(a: &Patch<T>, b: &Patch<T>, kernel: &SpatialKernel<T>) -> Result<T> {
    if a.side() != b.side() || a.side() != kernel.side() {
        return Err(Error::InvalidParameter(format!(
            "patch sides differ: {}, {}, kernel {}",
            a.side(),
            b.side(),
            kernel.side()
        )));
    }
    Ok(a.values().iter().zip(b.values()).zip(kernel.weights()).map(|((&x, &y), &k)| k * (x - y) * (x - y)).sum())
}

/// `exp(-dist2 / h^2)`.
#[inline]
pub fn nlm_weight<T: Real>(dist2: T, h: T) -> T {
    (-dist2 / (h * h)).exp()
}

/// Self-weight used when the other weights of a row underflow to zero.
#[inline]
pub(crate) fn self_weight_from_max<T: Real>(row_max: T) -> T {
    if row_max > T::zero() {
        row_max
    } else {
        T::one()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockNlmParams<T> {
    pub patch_side: usize,
    pub window_side: usize,
    /// Filtering parameter in intensity units.
    pub h: T,
    /// Standard deviation of the Gaussian patch kernel, in pixels.
    pub alpha: T,
    /// Stride between block centres.
    pub block_step: usize,
    pub convention: DistanceConvention,
}

impl<T: Real> BlockNlmParams<T> {
    /// `m x m` patches, `window x window` search, stride `m / 2`, `alpha = (m / 2) / 2`.
    pub fn new(patch_side: usize, window_side: usize, h: T) -> Self {
        Self {
            patch_side,
            window_side,
            h,
            alpha: T::lit((patch_side / 2) as f64 / 2.0).max(T::lit(0.5)),
            block_step: (patch_side / 2).max(1),
            convention: DistanceConvention::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.patch_side < 3 || self.patch_side.is_multiple_of(2) {
            return bad(format!("stage-1 patch side {} must be odd and >= 3", self.patch_side));
        }
        if self.window_side.is_multiple_of(2) || self.window_side <= self.patch_side {
            return bad(format!(
                "stage-1 window side {} must be odd and larger than the patch side {}",
                self.window_side, self.patch_side
            ));
        }
        if !(self.h > T::zero()) || !self.h.is_finite() {
            return bad(format!("stage-1 h = {} must be finite and > 0", self.h));
        }
        if !(self.alpha > T::zero()) || !self.alpha.is_finite() {
            return bad(format!("stage-1 alpha = {} must be finite and > 0", self.alpha));
        }
        if self.block_step == 0 || self.block_step > self.patch_side {
            return bad(format!("block step {} must lie in 1..={}", self.block_step, self.patch_side));
        }
        Ok(())
    }
}

/// Symmetrically extended copy of `img` with an arbitrary margin.
pub(crate) struct Padded<T> {
    pub width: usize,
    pub data: Vec<T>,
}

impl<T: Real> Padded<T> {
    pub fn new(img: &ImageGrid<T>, radius: usize) -> Self {
        let r = radius as isize;
        let width = img.width() + 2 * radius;
        let height = img.height() + 2 * radius;
        let mut data = Vec::with_capacity(width * height);
        for pr in 0..height as isize {
            for pc in 0..width as isize {
                data.push(img.get_reflected(pr - r, pc - r));
            }
        }
        Self { width, data }
    }

    #[inline]
    pub fn at(&self, row: usize, col: usize) -> T {
        self.data[row * self.width + col]
    }
}

/// Lattice `0, step, 2 step, ...` plus the last index so that every pixel is
/// a block centre's neighbour.
pub(crate) fn lattice(n: usize, step: usize) -> Vec<usize> {
    let mut v: Vec<usize> = (0..n).step_by(step).collect();
    if *v.last().expect("n >= 1") != n - 1 {
        v.push(n - 1);
    }
    v
}

/// Weighted average of the patches in the search window of one block centre.
fn block_estimate<T: Real>(
    padded: &Padded<T>,
    center: (usize, usize),
    p: &BlockNlmParams<T>,
    kernel: &SpatialKernel<T>,
    weights: &mut Vec<T>,
) -> Vec<T> {
    let m = p.patch_side;
    let hp = m / 2;
    let hw = p.window_side / 2;
    let radius = hw + hp;
    // padded coordinates of the top-left corner of the centre patch
    let (ci, cj) = (center.0 + radius - hp, center.1 + radius - hp);
    let kw = kernel.weights();
    let scale: T = p.convention.scale(m);
    let inv_h2 = T::one() / (p.h * p.h);

    weights.clear();
    let mut row_max = T::zero();
    let self_index = hw * p.window_side + hw;
    for dy in 0..p.window_side {
        for dx in 0..p.window_side {
            let (oi, oj) = (ci + dy - hw, cj + dx - hw);
            if dy == hw && dx == hw {
                weights.push(T::zero());
                continue;
            }
            let mut d2 = T::zero();
            for a in 0..m {
                let ra = &padded.data[(ci + a) * padded.width + cj..][..m];
                let rb = &padded.data[(oi + a) * padded.width + oj..][..m];
                let ka = &kw[a * m..(a + 1) * m];
                for ((&x, &y), &k) in ra.iter().zip(rb).zip(ka) {
                    let d = x - y;
                    d2 = d2 + k * d * d;
                }
            }
            let w = (-(d2 * scale) * inv_h2).exp();
            row_max = row_max.max(w);
            weights.push(w);
        }
    }
    weights[self_index] = self_weight_from_max(row_max);
    let norm: T = weights.iter().copied().sum();

    let mut estimate = vec![T::zero(); m * m];
    for dy in 0..p.window_side {
        for dx in 0..p.window_side {
            let w = weights[dy * p.window_side + dx];
            let (oi, oj) = (ci + dy - hw, cj + dx - hw);
            for a in 0..m {
                let src = &padded.data[(oi + a) * padded.width + oj..][..m];
                for (e, &s) in estimate[a * m..(a + 1) * m].iter_mut().zip(src) {
                    *e = *e + w * s;
                }
            }
        }
    }
    estimate.iter_mut().for_each(|e| *e = *e / norm);
    estimate
}

/// Blockwise non-local means of one band.
///
/// The result does not depend on the number of worker threads: block
/// estimates are computed in parallel but aggregated in lattice order.
pub fn denoise_band<T: Real>(band: &ImageGrid<T>, p: &BlockNlmParams<T>) -> Result<ImageGrid<T>> {
    p.validate()?;
    let (w, h) = band.dims();
    let m = p.patch_side;
    let hp = m / 2;
    let radius = p.window_side / 2 + hp;
    let padded = Padded::new(band, radius);
    let kernel = SpatialKernel::gaussian(m, p.alpha)?;
    let rows = lattice(h, p.block_step);
    let cols = lattice(w, p.block_step);

    let estimates: Vec<Vec<Vec<T>>> = rows
        .par_iter()
        .map(|&r| {
            let mut scratch = Vec::with_capacity(p.window_side * p.window_side);
            cols.iter().map(|&c| block_estimate(&padded, (r, c), p, &kernel, &mut scratch)).collect()
        })
        .collect();

    let mut acc = vec![T::zero(); w * h];
    let mut hits = vec![0u32; w * h];
    for (&r, row_estimates) in rows.iter().zip(&estimates) {
        for (&c, est) in cols.iter().zip(row_estimates) {
            for a in 0..m {
                let Some(y) = (r + a).checked_sub(hp).filter(|&y| y < h) else { continue };
                for b in 0..m {
                    let Some(x) = (c + b).checked_sub(hp).filter(|&x| x < w) else { continue };
                    acc[y * w + x] = acc[y * w + x] + est[a * m + b];
                    hits[y * w + x] += 1;
                }
            }
        }
    }
    let data = acc.into_iter().zip(hits).map(|(s, n)| s / T::count(n as usize)).collect();
    ImageGrid::new(w, h, data)
}
