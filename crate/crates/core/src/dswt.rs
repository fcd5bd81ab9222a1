//! Two-dimensional stationary (undecimated, à trous) wavelet transform.
//!
//! At level `j` the analysis filters are dilated by `2^(j-1)` and applied
//! separably along rows and columns without decimation, so every band keeps
//! the resolution of the source image. Synthesis applies the adjoint filters
//! and averages the four redundant branches, which makes [`inverse`] an exact
//! left inverse of [`forward`] for orthogonal filters.
//!
//! Samples outside the grid are taken periodically. Whole-sample symmetric
//! extension is not invertible from same-size bands when the filters are not
//! linear phase (every Daubechies filter except Haar).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imaging::ImageGrid;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WaveletId {
    Haar,
    Db2,
    Db4,
}

impl WaveletId {
    pub const ALL: [WaveletId; 3] = [WaveletId::Haar, WaveletId::Db2, WaveletId::Db4];

    pub fn name(self) -> &'static str {
        match self {
            WaveletId::Haar => "haar",
            WaveletId::Db2 => "db2",
            WaveletId::Db4 => "db4",
        }
    }
}

impl std::str::FromStr for WaveletId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "haar" | "db1" => Ok(WaveletId::Haar),
            "db2" => Ok(WaveletId::Db2),
            "db4" => Ok(WaveletId::Db4),
            other => Err(Error::InvalidParameter(format!("unknown wavelet {other:?}"))),
        }
    }
}

impl std::fmt::Display for WaveletId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

// Orthonormal Daubechies scaling filters (taps sum to sqrt(2)).
const DB4_LOWPASS: [f64; 8] = [
    0.230_377_813_308_855_23,
    0.714_846_570_552_541_5,
    0.630_880_767_929_590_4,
    -0.027_983_769_416_983_85,
    -0.187_034_811_718_881_14,
    0.030_841_381_835_986_965,
    0.032_883_011_666_982_945,
    -0.010_597_401_784_997_278,
];

/// Quadrature-mirror analysis filter pair.
#[derive(Clone, Debug, PartialEq)]
pub struct WaveletFilters<T> {
    pub id: WaveletId,
    pub lowpass: Vec<T>,
    pub highpass: Vec<T>,
}

impl<T: Real> WaveletFilters<T> {
    pub fn new(id: WaveletId) -> Self {
        let lowpass: Vec<f64> = match id {
            WaveletId::Haar => vec![std::f64::consts::FRAC_1_SQRT_2; 2],
            WaveletId::Db2 => {
                let s3 = 3f64.sqrt();
                let d = 4.0 * 2f64.sqrt();
                vec![(1.0 + s3) / d, (3.0 + s3) / d, (3.0 - s3) / d, (1.0 - s3) / d]
            }
            WaveletId::Db4 => DB4_LOWPASS.to_vec(),
        };
        let len = lowpass.len();
        // g[k] = (-1)^k h[L-1-k]
        let highpass = (0..len)
            .map(|k| {
                let v = lowpass[len - 1 - k];
                if k % 2 == 0 {
                    v
                } else {
                    -v
                }
            })
            .collect::<Vec<_>>();
        Self {
            id,
            lowpass: lowpass.into_iter().map(T::lit).collect(),
            highpass: highpass.into_iter().map(T::lit).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.lowpass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lowpass.is_empty()
    }
}

/// Detail orientation within one level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    /// Highpass along x (columns), lowpass along y.
    X,
    /// Lowpass along x, highpass along y (rows).
    Y,
    /// Highpass along both axes.
    XY,
}

impl Orientation {
    pub const ALL: [Orientation; 3] = [Orientation::X, Orientation::Y, Orientation::XY];
}

/// The three detail bands of one decomposition level.
#[derive(Clone, Debug, PartialEq)]
pub struct DetailLevel<T> {
    pub x: ImageGrid<T>,
    pub y: ImageGrid<T>,
    pub xy: ImageGrid<T>,
}

impl<T: Real> DetailLevel<T> {
    pub fn band(&self, o: Orientation) -> &ImageGrid<T> {
        match o {
            Orientation::X => &self.x,
            Orientation::Y => &self.y,
            Orientation::XY => &self.xy,
        }
    }

    pub fn band_mut(&mut self, o: Orientation) -> &mut ImageGrid<T> {
        match o {
            Orientation::X => &mut self.x,
            Orientation::Y => &mut self.y,
            Orientation::XY => &mut self.xy,
        }
    }
}

/// Undecimated decomposition: `details[j - 1]` holds level `j`, and
/// `approx` the coarsest approximation band.
#[derive(Clone, Debug, PartialEq)]
pub struct WaveletPyramid<T> {
    pub wavelet: WaveletId,
    pub details: Vec<DetailLevel<T>>,
    pub approx: ImageGrid<T>,
}

impl<T: Real> WaveletPyramid<T> {
    pub fn levels(&self) -> usize {
        self.details.len()
    }

    /// Iterates `(level, orientation, band)` with levels counted from 1.
    pub fn bands(&self) -> impl Iterator<Item = (usize, Orientation, &ImageGrid<T>)> {
        self.details
            .iter()
            .enumerate()
            .flat_map(|(j, lvl)| Orientation::ALL.into_iter().map(move |o| (j + 1, o, lvl.band(o))))
    }

    /// Band-wise `a * self + b * other`.
    pub fn linear_combination(&self, a: T, other: &Self, b: T) -> Result<Self> {
        if self.levels() != other.levels() {
            return Err(Error::InvalidParameter("pyramids differ in level count".into()));
        }
        let comb = |p: &ImageGrid<T>, q: &ImageGrid<T>| p.zip_map(q, |u, v| a * u + b * v);
        let details = self
            .details
            .iter()
            .zip(&other.details)
            .map(|(p, q)| Ok(DetailLevel { x: comb(&p.x, &q.x)?, y: comb(&p.y, &q.y)?, xy: comb(&p.xy, &q.xy)? }))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { wavelet: self.wavelet, details, approx: comb(&self.approx, &other.approx)? })
    }
}

/// Largest filter reach `2^(J-1) (L-1)` used at the coarsest level.
pub fn support(levels: usize, filter_len: usize) -> usize {
    (1usize << (levels.saturating_sub(1))) * (filter_len - 1)
}

fn check_levels(levels: usize, filter_len: usize, width: usize, height: usize) -> Result<()> {
    if levels == 0 {
        return Err(Error::InvalidParameter("decomposition needs at least one level".into()));
    }
    let min_side = width.min(height);
    if levels > 24 || support(levels, filter_len) >= min_side {
        return Err(Error::TooManyLevels { levels, support: support(levels.min(24), filter_len), min_side });
    }
    Ok(())
}

/// Periodic dilated filtering along x: `out(r, c) = Σ_k taps[k] src(r, c ± step k)`
/// with `+` for analysis and `-` for the adjoint.
fn filter_x<T: Real>(src: &[T], width: usize, taps: &[T], step: usize, adjoint: bool) -> Vec<T> {
    let mut out = vec![T::zero(); src.len()];
    out.par_chunks_mut(width).zip(src.par_chunks(width)).for_each(|(dst, row)| {
        for (c, d) in dst.iter_mut().enumerate() {
            let mut acc = T::zero();
            for (k, &t) in taps.iter().enumerate() {
                let off = (step * k) % width;
                let idx = if adjoint { (c + width - off) % width } else { (c + off) % width };
                acc = acc + t * row[idx];
            }
            *d = acc;
        }
    });
    out
}

/// Periodic dilated filtering along y.
fn filter_y<T: Real>(src: &[T], width: usize, height: usize, taps: &[T], step: usize, adjoint: bool) -> Vec<T> {
    let mut out = vec![T::zero(); src.len()];
    out.par_chunks_mut(width).enumerate().for_each(|(r, dst)| {
        for (k, &t) in taps.iter().enumerate() {
            let off = (step * k) % height;
            let sr = if adjoint { (r + height - off) % height } else { (r + off) % height };
            let row = &src[sr * width..(sr + 1) * width];
            for (d, &s) in dst.iter_mut().zip(row) {
                *d = *d + t * s;
            }
        }
    });
    out
}

/// Decomposes `img` into `levels` detail levels plus the coarsest approximation.
pub fn forward<T: Real>(img: &ImageGrid<T>, levels: usize, filters: &WaveletFilters<T>) -> Result<WaveletPyramid<T>> {
    let (w, h) = img.dims();
    check_levels(levels, filters.len(), w, h)?;
    let grid = |data: Vec<T>| ImageGrid::new(w, h, data);
    let mut approx = img.data().to_vec();
    let mut details = Vec::with_capacity(levels);
    for j in 0..levels {
        let step = 1 << j;
        let lo_x = filter_x(&approx, w, &filters.lowpass, step, false);
        let hi_x = filter_x(&approx, w, &filters.highpass, step, false);
        let x = filter_y(&hi_x, w, h, &filters.lowpass, step, false);
        let xy = filter_y(&hi_x, w, h, &filters.highpass, step, false);
        let y = filter_y(&lo_x, w, h, &filters.highpass, step, false);
        approx = filter_y(&lo_x, w, h, &filters.lowpass, step, false);
        details.push(DetailLevel { x: grid(x)?, y: grid(y)?, xy: grid(xy)? });
    }
    Ok(WaveletPyramid { wavelet: filters.id, details, approx: grid(approx)? })
}

/// Reconstructs the image from a pyramid produced by [`forward`].
pub fn inverse<T: Real>(pyr: &WaveletPyramid<T>, filters: &WaveletFilters<T>) -> Result<ImageGrid<T>> {
    if pyr.wavelet != filters.id {
        return Err(Error::InvalidParameter(format!(
            "pyramid built with {} cannot be inverted with {}",
            pyr.wavelet, filters.id
        )));
    }
    let (w, h) = pyr.approx.dims();
    for lvl in &pyr.details {
        for o in Orientation::ALL {
            pyr.approx.same_dims(lvl.band(o))?;
        }
    }
    check_levels(pyr.levels(), filters.len(), w, h)?;
    let quarter = T::lit(0.25);
    let mut approx = pyr.approx.data().to_vec();
    for (j, lvl) in pyr.details.iter().enumerate().rev() {
        let step = 1 << j;
        let ya = filter_y(&approx, w, h, &filters.lowpass, step, true);
        let yy = filter_y(lvl.y.data(), w, h, &filters.highpass, step, true);
        let yx = filter_y(lvl.x.data(), w, h, &filters.lowpass, step, true);
        let yxy = filter_y(lvl.xy.data(), w, h, &filters.highpass, step, true);
        let lo: Vec<T> = ya.iter().zip(&yy).map(|(&a, &b)| a + b).collect();
        let hi: Vec<T> = yx.iter().zip(&yxy).map(|(&a, &b)| a + b).collect();
        let lo = filter_x(&lo, w, &filters.lowpass, step, true);
        let hi = filter_x(&hi, w, &filters.highpass, step, true);
        approx = lo.iter().zip(&hi).map(|(&a, &b)| quarter * (a + b)).collect();
    }
    ImageGrid::new(w, h, approx)
}
