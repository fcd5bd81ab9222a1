//! Pixel grids, mirror padding, patch extraction, noise synthesis, PSNR and
//! PGM file I/O.

mod metrics;
mod noise;
pub mod pgm;

pub use metrics::{mse, psnr, Psnr};
pub use noise::{add_awgn, NoiseSpec};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Reflects an arbitrary index into `0..n` using whole-sample symmetric
/// extension (`... 2 1 | 0 1 2 ... n-1 | n-2 n-3 ...`).
///
/// A length-1 axis has no mirror partner and extends as a constant.
#[inline]
pub fn reflect(i: isize, n: usize) -> usize {
    if n == 1 {
        return 0;
    }
    let period = 2 * (n as isize - 1);
    let m = i.rem_euclid(period);
    if m >= n as isize {
        (period - m) as usize
    } else {
        m as usize
    }
}

/// Row-major grid of real intensities.
///
/// Values are finite after every public constructor. Grids are immutable:
/// every operation returns a new grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ImageGrid<T> {
    width: usize,
    height: usize,
    data: Vec<T>,
}

impl<T: Real> ImageGrid<T> {
    pub fn new(width: usize, height: usize, data: Vec<T>) -> Result<Self> {
        if width == 0 || height == 0 || data.len() != width * height {
            return Err(Error::Dimensions { width, height, len: data.len() });
        }
        if let Some(index) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { width, height, data })
    }

    pub fn filled(width: usize, height: usize, value: T) -> Result<Self> {
        Self::new(width, height, vec![value; width * height])
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> T) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height);
        for r in 0..height {
            for c in 0..width {
                data.push(f(r, c));
            }
        }
        Self::new(width, height, data)
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    /// `(width, height)`.
    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> T {
        self.data[row * self.width + col]
    }

    /// Value at `(row, col)` with symmetric extension beyond the border.
    #[inline]
    pub fn get_reflected(&self, row: isize, col: isize) -> T {
        self.get(reflect(row, self.height), reflect(col, self.width))
    }

    #[inline]
    pub fn row(&self, row: usize) -> &[T] {
        &self.data[row * self.width..(row + 1) * self.width]
    }

    #[inline]
    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    pub fn same_dims(&self, other: &Self) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(Error::DimensionMismatch { left: self.dims(), right: other.dims() });
        }
        Ok(())
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Result<Self> {
        Self::new(self.width, self.height, self.data.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_map(&self, other: &Self, f: impl Fn(T, T) -> T) -> Result<Self> {
        self.same_dims(other)?;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect();
        Self::new(self.width, self.height, data)
    }

    pub fn min(&self) -> T {
        self.data.iter().copied().fold(T::infinity(), T::min)
    }

    pub fn max(&self) -> T {
        self.data.iter().copied().fold(T::neg_infinity(), T::max)
    }

    pub fn mean(&self) -> T {
        self.data.iter().copied().sum::<T>() / T::count(self.len())
    }

    /// Population variance.
    pub fn variance(&self) -> T {
        let mean = self.mean();
        self.data.iter().map(|&v| (v - mean) * (v - mean)).sum::<T>() / T::count(self.len())
    }

    pub fn cast<U: Real>(&self) -> ImageGrid<U> {
        ImageGrid {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|v| U::from(*v).expect("finite cast")).collect(),
        }
    }

    /// Symmetric (mirror-without-repeat) extension by `radius` on every side.
    ///
    /// Mirroring needs `radius <= n - 1` along each axis longer than one
    /// pixel; a single-pixel axis extends as a constant.
    pub fn pad(&self, radius: usize) -> Result<Self> {
        if radius == 0 {
            return Ok(self.clone());
        }
        let too_big = |n: usize| n > 1 && radius >= n;
        if too_big(self.width) || too_big(self.height) {
            return Err(Error::PadRadius { radius, width: self.width, height: self.height });
        }
        let r = radius as isize;
        let w = self.width + 2 * radius;
        let h = self.height + 2 * radius;
        let cols: Vec<usize> = (0..w as isize).map(|c| reflect(c - r, self.width)).collect();
        let mut data = Vec::with_capacity(w * h);
        for pr in 0..h as isize {
            let src = self.row(reflect(pr - r, self.height));
            data.extend(cols.iter().map(|&c| src[c]));
        }
        Ok(Self { width: w, height: h, data })
    }

    /// Crops the `width x height` window whose top-left corner is `(row, col)`.
    pub fn crop(&self, row: usize, col: usize, width: usize, height: usize) -> Result<Self> {
        if row + height > self.height || col + width > self.width || width == 0 || height == 0 {
            return Err(Error::OutOfBounds {
                row: row as isize,
                col: col as isize,
                side: width.max(height),
                width: self.width,
                height: self.height,
            });
        }
        let mut data = Vec::with_capacity(width * height);
        for r in row..row + height {
            data.extend_from_slice(&self.row(r)[col..col + width]);
        }
        Ok(Self { width, height, data })
    }

    /// The `side x side` window centred on `center = (row, col)`.
    pub fn extract_patch(&self, center: (usize, usize), side: usize) -> Result<Patch<T>> {
        check_side(side)?;
        let half = side / 2;
        let (row, col) = center;
        if row < half || col < half || row + half >= self.height || col + half >= self.width {
            return Err(Error::OutOfBounds {
                row: row as isize,
                col: col as isize,
                side,
                width: self.width,
                height: self.height,
            });
        }
        let mut values = Vec::with_capacity(side * side);
        for r in row - half..=row + half {
            values.extend_from_slice(&self.row(r)[col - half..=col + half]);
        }
        Ok(Patch { side, values, center })
    }
}

fn check_side(side: usize) -> Result<()> {
    if side < 3 || side.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("patch side {side} must be odd and >= 3")));
    }
    Ok(())
}

/// Square `side x side` block of intensities cut from a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Patch<T> {
    side: usize,
    values: Vec<T>,
    center: (usize, usize),
}

impl<T: Real> Patch<T> {
    pub fn new(side: usize, values: Vec<T>, center: (usize, usize)) -> Result<Self> {
        check_side(side)?;
        if values.len() != side * side {
            return Err(Error::InvalidParameter(format!(
                "patch of side {side} needs {} values, got {}",
                side * side,
                values.len()
            )));
        }
        Ok(Self { side, values, center })
    }

    #[inline]
    pub fn side(&self) -> usize {
        self.side
    }

    #[inline]
    pub fn values(&self) -> &[T] {
        &self.values
    }

    #[inline]
    pub fn center(&self) -> (usize, usize) {
        self.center
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> T {
        self.values[row * self.side + col]
    }
}
