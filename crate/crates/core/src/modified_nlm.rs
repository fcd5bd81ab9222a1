//! Pixelwise non-local means with the orientation-modulated similarity.
//!
//! Weights compare patches of a *reference* image (the stage-1 output) and
//! scale the squared patch distance by the orientation factor `eta` of the
//! reference gradients. The averaged values are taken from the *noisy*
//! image. The self-weight is the largest weight of the row, boosted by a
//! constant factor when the assumed noise level is not severe.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::block_nlm::{self_weight_from_max, DistanceConvention, Padded};
use crate::error::{Error, Result};
use crate::imaging::ImageGrid;
use crate::orientation::{eta_from_stats, gradient_extended, NormalField, NormalMode};
use crate::scalar::Real;

/// Whether the orientation factor participates in the weights.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EtaMode {
    #[default]
    Orientation,
    /// `eta = 1` for every pair (plain pixelwise NLM on the reference).
    Neutral,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModNlmParams<T> {
    pub patch_side: usize,
    pub window_side: usize,
    pub h: T,
    /// Assumed noise standard deviation; selects the self-weight rule.
    pub sigma: T,
    /// Self-weight multiplier applied while `sigma <= boost_sigma_max`.
    pub self_weight_boost: T,
    pub boost_sigma_max: T,
    pub convention: DistanceConvention,
    pub eta_mode: EtaMode,
    pub normal_mode: NormalMode,
}

impl<T: Real> ModNlmParams<T> {
    pub fn new(patch_side: usize, window_side: usize, h: T, sigma: T) -> Self {
        Self {
            patch_side,
            window_side,
            h,
            sigma,
            self_weight_boost: T::lit(4.0) / T::lit(3.0),
            boost_sigma_max: T::lit(20.0),
            convention: DistanceConvention::default(),
            eta_mode: EtaMode::Orientation,
            normal_mode: NormalMode::Gradient,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.patch_side < 3 || self.patch_side.is_multiple_of(2) {
            return bad(format!("stage-2 patch side {} must be odd and >= 3", self.patch_side));
        }
        if self.window_side.is_multiple_of(2) || self.window_side <= self.patch_side {
            return bad(format!(
                "stage-2 window side {} must be odd and larger than the patch side {}",
                self.window_side, self.patch_side
            ));
        }
        if !(self.h > T::zero()) || !self.h.is_finite() {
            return bad(format!("stage-2 h = {} must be finite and > 0", self.h));
        }
        if !(self.sigma >= T::zero()) || !self.sigma.is_finite() {
            return bad(format!("sigma = {} must be finite and >= 0", self.sigma));
        }
        if !(self.self_weight_boost >= T::one()) || !self.self_weight_boost.is_finite() {
            return bad(format!("self-weight boost {} must be >= 1", self.self_weight_boost));
        }
        if !self.boost_sigma_max.is_finite() {
            return bad("boost sigma threshold must be finite".into());
        }
        Ok(())
    }

    /// Multiplier applied to the row maximum to obtain the self-weight.
    pub fn effective_boost(&self) -> T {
        if self.sigma > self.boost_sigma_max {
            T::one()
        } else {
            self.self_weight_boost
        }
    }
}

/// Self-weight from the largest weight of the row.
pub fn self_weight<T: Real>(row_max: T, p: &ModNlmParams<T>) -> T {
    p.effective_boost() * self_weight_from_max(row_max)
}

fn check_window<T: Real>(img: &ImageGrid<T>, at: (usize, usize), side: usize) -> Result<()> {
    let half = side / 2;
    let (row, col) = at;
    if row < half || col < half || row + half >= img.height() || col + half >= img.width() {
        return Err(Error::OutOfBounds {
            row: row as isize,
            col: col as isize,
            side,
            width: img.width(),
            height: img.height(),
        });
    }
    Ok(())
}

/// `exp(-d^2(i, j) eta(i, j) / h^2)` for two distinct pixels.
///
/// `normals` must be sampled on the same grid as `reference`. Both patches
/// must lie inside the grid.
pub fn modified_weight<T: Real>(
    reference: &ImageGrid<T>,
    normals: &NormalField<T>,
    i: (usize, usize),
    j: (usize, usize),
    p: &ModNlmParams<T>,
) -> Result<T> {
    if i == j {
        return Err(Error::SelfComparison);
    }
    if normals.dims() != reference.dims() {
        return Err(Error::DimensionMismatch { left: reference.dims(), right: normals.dims() });
    }
    let m = p.patch_side;
    check_window(reference, i, m)?;
    check_window(reference, j, m)?;
    let half = m / 2;
    let mut d2 = T::zero();
    let mut gsum = T::zero();
    let mut gmax = T::zero();
    for a in 0..m {
        for b in 0..m {
            let pi = (i.0 + a - half, i.1 + b - half);
            let pj = (j.0 + a - half, j.1 + b - half);
            let d = reference.get(pi.0, pi.1) - reference.get(pj.0, pj.1);
            d2 = d2 + d * d;
            if p.eta_mode == EtaMode::Orientation {
                let g = normals.dot(pi, pj);
                gsum = gsum + g;
                gmax = gmax.max(g.abs());
            }
        }
    }
    let eta = match p.eta_mode {
        EtaMode::Orientation => eta_from_stats(gsum, gmax, m),
        EtaMode::Neutral => T::one(),
    };
    let factor = p.convention.scale::<T>(m) / T::count(m * m);
    Ok((-(d2 * factor) * eta / (p.h * p.h)).exp())
}

/// All weights of one pixel's search window.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightRow<T> {
    pub center: (usize, usize),
    /// `(j, w(i, j))` for every `j != i`, row-major over the window.
    pub entries: Vec<((usize, usize), T)>,
    pub self_weight: T,
    pub normalizer: T,
}

/// Weight row of pixel `i`; the whole window and its patches must lie inside
/// `reference`.
pub fn weight_row<T: Real>(
    reference: &ImageGrid<T>,
    normals: &NormalField<T>,
    i: (usize, usize),
    p: &ModNlmParams<T>,
) -> Result<WeightRow<T>> {
    p.validate()?;
    check_window(reference, i, p.window_side + p.patch_side - 1)?;
    let hw = p.window_side / 2;
    let mut entries = Vec::with_capacity(p.window_side * p.window_side - 1);
    let mut row_max = T::zero();
    for r in i.0 - hw..=i.0 + hw {
        for c in i.1 - hw..=i.1 + hw {
            if (r, c) == i {
                continue;
            }
            let w = modified_weight(reference, normals, i, (r, c), p)?;
            row_max = row_max.max(w);
            entries.push(((r, c), w));
        }
    }
    let self_weight = self_weight(row_max, p);
    let normalizer = self_weight + entries.iter().map(|e| e.1).sum::<T>();
    Ok(WeightRow { center: i, entries, self_weight, normalizer })
}

const STRIP_ROWS: usize = 32;

struct Stage2Inputs<'a, T> {
    p: &'a ModNlmParams<T>,
    width: usize,
    reference: Padded<T>,
    noisy: Padded<T>,
    normals: Vec<Vec<T>>,
}

impl<T: Real> Stage2Inputs<'_, T> {
    /// Denoised rows `r0..r1`.
    fn strip(&self, r0: usize, r1: usize) -> Vec<T> {
        let p = self.p;
        let w = self.width;
        let m = p.patch_side;
        let hp = m / 2;
        let hw = p.window_side / 2;
        let radius = hw + hp;
        let pw = self.reference.width;
        let rows = r1 - r0;
        let region_rows = rows + 2 * hp;
        let region_cols = w + 2 * hp;
        let use_eta = p.eta_mode == EtaMode::Orientation;
        let factor = p.convention.scale::<T>(m) / T::count(m * m);
        let inv_h2 = T::one() / (p.h * p.h);

        let mut dist = vec![T::zero(); region_rows * region_cols];
        let mut dots = vec![T::zero(); if use_eta { region_rows * region_cols } else { 0 }];
        let mut h_dist = vec![T::zero(); region_rows * w];
        let mut h_sum = vec![T::zero(); if use_eta { region_rows * w } else { 0 }];
        let mut h_max = vec![T::zero(); if use_eta { region_rows * w } else { 0 }];
        let mut num = vec![T::zero(); rows * w];
        let mut den = vec![T::zero(); rows * w];
        let mut wmax = vec![T::zero(); rows * w];

        let top = r0 + radius - hp;
        let left = radius - hp;
        for dy in -(hw as isize)..=hw as isize {
            for dx in -(hw as isize)..=hw as isize {
                if dy == 0 && dx == 0 {
                    continue;
                }
                let shift = dy * pw as isize + dx;
                for rr in 0..region_rows {
                    let base = (top + rr) * pw + left;
                    let other = (base as isize + shift) as usize;
                    let a = &self.reference.data[base..base + region_cols];
                    let b = &self.reference.data[other..other + region_cols];
                    let out = &mut dist[rr * region_cols..(rr + 1) * region_cols];
                    for ((o, &x), &y) in out.iter_mut().zip(a).zip(b) {
                        let d = x - y;
                        *o = d * d;
                    }
                    if use_eta {
                        let out = &mut dots[rr * region_cols..(rr + 1) * region_cols];
                        out.iter_mut().for_each(|o| *o = T::zero());
                        for comp in &self.normals {
                            let a = &comp[base..base + region_cols];
                            let b = &comp[other..other + region_cols];
                            for ((o, &x), &y) in out.iter_mut().zip(a).zip(b) {
                                *o = *o + x * y;
                            }
                        }
                    }
                }
                // patch sums along x
                for rr in 0..region_rows {
                    let src = &dist[rr * region_cols..(rr + 1) * region_cols];
                    let dst = &mut h_dist[rr * w..(rr + 1) * w];
                    for (c, o) in dst.iter_mut().enumerate() {
                        *o = src[c..c + m].iter().fold(T::zero(), |s, &v| s + v);
                    }
                    if use_eta {
                        let src = &dots[rr * region_cols..(rr + 1) * region_cols];
                        for c in 0..w {
                            let win = &src[c..c + m];
                            h_sum[rr * w + c] = win.iter().fold(T::zero(), |s, &v| s + v);
                            h_max[rr * w + c] = win.iter().fold(T::zero(), |s, &v| s.max(v.abs()));
                        }
                    }
                }
                // patch sums along y, weights, accumulation
                for s in 0..rows {
                    let noisy_row = (r0 + s) as isize + radius as isize + dy;
                    let noisy_base = (noisy_row * pw as isize + radius as isize + dx) as usize;
                    let noisy = &self.noisy.data[noisy_base..noisy_base + w];
                    for c in 0..w {
                        let mut d2 = T::zero();
                        for a in 0..m {
                            d2 = d2 + h_dist[(s + a) * w + c];
                        }
                        let eta = if use_eta {
                            let mut gs = T::zero();
                            let mut gm = T::zero();
                            for a in 0..m {
                                gs = gs + h_sum[(s + a) * w + c];
                                gm = gm.max(h_max[(s + a) * w + c]);
                            }
                            eta_from_stats(gs, gm, m)
                        } else {
                            T::one()
                        };
                        let wgt = (-(d2 * factor) * eta * inv_h2).exp();
                        let k = s * w + c;
                        num[k] = num[k] + wgt * noisy[c];
                        den[k] = den[k] + wgt;
                        wmax[k] = wmax[k].max(wgt);
                    }
                }
            }
        }
        let boost = p.effective_boost();
        (0..rows * w)
            .map(|k| {
                let (s, c) = (k / w, k % w);
                let own = self.noisy.at(r0 + s + radius, c + radius);
                let sw = boost * self_weight_from_max(wmax[k]);
                (sw * own + num[k]) / (sw + den[k])
            })
            .collect()
    }
}

/// Pixelwise modified non-local means of `noisy`, with weights taken from
/// `reference` patches and `reference` gradients.
///
/// Output is bit-identical for any number of worker threads.
pub fn denoise<T: Real>(noisy: &ImageGrid<T>, reference: &ImageGrid<T>, p: &ModNlmParams<T>) -> Result<ImageGrid<T>> {
    p.validate()?;
    noisy.same_dims(reference)?;
    let (w, h) = noisy.dims();
    let radius = p.window_side / 2 + p.patch_side / 2;
    let normals = match p.eta_mode {
        EtaMode::Orientation => {
            let field = gradient_extended(reference, radius);
            NormalField::new(&field, p.normal_mode).components().iter().map(|g| g.data().to_vec()).collect()
        }
        EtaMode::Neutral => Vec::new(),
    };
    let inputs = Stage2Inputs {
        p,
        width: w,
        reference: Padded::new(reference, radius),
        noisy: Padded::new(noisy, radius),
        normals,
    };
    let strips: Vec<(usize, usize)> = (0..h).step_by(STRIP_ROWS).map(|r0| (r0, (r0 + STRIP_ROWS).min(h))).collect();
    let parts: Vec<Vec<T>> = strips.par_iter().map(|&(r0, r1)| inputs.strip(r0, r1)).collect();
    ImageGrid::new(w, h, parts.concat())
}
