//! Gradient fields, normal vector patches and the orientation weight factor.
//!
//! The inner-product patch of two pixels `i`, `j` holds, element by element,
//! the dot product of the normal vectors in the `m x m` windows around them.
//! Its normalized sum drives the factor `eta` that scales the photometric
//! patch distance in the second stage: aligned orientations give `eta < 1`
//! (distance shrinks), anti-aligned ones `eta > 1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imaging::ImageGrid;
use crate::scalar::Real;

/// Largest |Γ| below which a pair of windows counts as gradient-free.
pub const FLAT_EPSILON: f64 = 1e-12;

/// Per-pixel `(gx, gy)` central differences.
#[derive(Clone, Debug, PartialEq)]
pub struct GradientField<T> {
    pub gx: ImageGrid<T>,
    pub gy: ImageGrid<T>,
}

/// Central differences with symmetric extension:
/// `gx(r, c) = (u(r, c+1) - u(r, c-1)) / 2` and likewise along rows.
pub fn gradient<T: Real>(img: &ImageGrid<T>) -> GradientField<T> {
    gradient_extended(img, 0)
}

/// Gradient of the symmetric extension of `img`, sampled on the grid padded
/// by `radius` on every side. Interior samples equal [`gradient`].
pub fn gradient_extended<T: Real>(img: &ImageGrid<T>, radius: usize) -> GradientField<T> {
    let r = radius as isize;
    let w = img.width() + 2 * radius;
    let h = img.height() + 2 * radius;
    let half = T::lit(0.5);
    let gx = ImageGrid::from_fn(w, h, |pr, pc| {
        let (y, x) = (pr as isize - r, pc as isize - r);
        (img.get_reflected(y, x + 1) - img.get_reflected(y, x - 1)) * half
    });
    let gy = ImageGrid::from_fn(w, h, |pr, pc| {
        let (y, x) = (pr as isize - r, pc as isize - r);
        (img.get_reflected(y + 1, x) - img.get_reflected(y - 1, x)) * half
    });
    GradientField { gx: gx.expect("finite input"), gy: gy.expect("finite input") }
}

/// How gradient samples become normal vectors.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalMode {
    /// The raw pair `(gx, gy)`.
    #[default]
    Gradient,
    /// Unit surface normal `(-gx, -gy, 1) / sqrt(1 + gx^2 + gy^2)`.
    UnitSurface,
}

/// Normal vector components sampled on a grid (two or three of them).
#[derive(Clone, Debug, PartialEq)]
pub struct NormalField<T> {
    components: Vec<ImageGrid<T>>,
}

impl<T: Real> NormalField<T> {
    pub fn new(field: &GradientField<T>, mode: NormalMode) -> Self {
        match mode {
            NormalMode::Gradient => Self { components: vec![field.gx.clone(), field.gy.clone()] },
            NormalMode::UnitSurface => {
                let norm = field
                    .gx
                    .zip_map(&field.gy, |a, b| (T::one() + a * a + b * b).sqrt())
                    .expect("gradient components share dimensions");
                let div = |g: &ImageGrid<T>| g.zip_map(&norm, |v, n| -v / n).expect("same dims");
                let nz = norm.map(|n| T::one() / n).expect("finite");
                Self { components: vec![div(&field.gx), div(&field.gy), nz] }
            }
        }
    }

    pub fn components(&self) -> &[ImageGrid<T>] {
        &self.components
    }

    pub fn dims(&self) -> (usize, usize) {
        self.components[0].dims()
    }

    /// Dot product of the normals at two grid positions.
    #[inline]
    pub fn dot(&self, a: (usize, usize), b: (usize, usize)) -> T {
        self.components.iter().map(|g| g.get(a.0, a.1) * g.get(b.0, b.1)).sum()
    }
}

impl<T: Real> From<&GradientField<T>> for NormalField<T> {
    fn from(field: &GradientField<T>) -> Self {
        Self::new(field, NormalMode::Gradient)
    }
}

/// Element-wise inner products of two normal vector patches.
#[derive(Clone, Debug, PartialEq)]
pub struct GammaPatch<T> {
    side: usize,
    values: Vec<T>,
}

impl<T: Real> GammaPatch<T> {
    pub fn new(side: usize, values: Vec<T>) -> Result<Self> {
        if side < 3 || side.is_multiple_of(2) || values.len() != side * side {
            return Err(Error::InvalidParameter(format!(
                "gamma patch needs odd side >= 3 and side^2 values (side {side}, {} values)",
                values.len()
            )));
        }
        Ok(Self { side, values })
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }
}

/// Γ for the windows of side `side` centred on `i` and `j`.
pub fn gamma<T: Real>(
    field: &NormalField<T>,
    i: (usize, usize),
    j: (usize, usize),
    side: usize,
) -> Result<GammaPatch<T>> {
    if side < 3 || side.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("patch side {side} must be odd and >= 3")));
    }
    let (w, h) = field.dims();
    let half = side / 2;
    for &(row, col) in [i, j].iter() {
        if row < half || col < half || row + half >= h || col + half >= w {
            return Err(Error::OutOfBounds { row: row as isize, col: col as isize, side, width: w, height: h });
        }
    }
    let mut values = Vec::with_capacity(side * side);
    for a in 0..side {
        for b in 0..side {
            let pi = (i.0 + a - half, i.1 + b - half);
            let pj = (j.0 + a - half, j.1 + b - half);
            values.push(field.dot(pi, pj));
        }
    }
    GammaPatch::new(side, values)
}

/// Analytic range `[exp(-m^2/(m^2-1)), exp(m^2/(m^2-1))]` of [`eta`].
pub fn eta_bounds<T: Real>(side: usize) -> (T, T) {
    let m2 = T::count(side * side);
    let e = m2 / (m2 - T::one());
    ((-e).exp(), e.exp())
}

/// Orientation weight factor from the sum and largest magnitude of Γ.
///
/// `exp(-Σ Γ / ((m^2 - 1) max |Γ|))`, neutral (1) when every |Γ| is below
/// [`FLAT_EPSILON`], clamped to [`eta_bounds`].
#[inline]
pub fn eta_from_stats<T: Real>(sum: T, max_abs: T, side: usize) -> T {
    if max_abs <= T::lit(FLAT_EPSILON) {
        return T::one();
    }
    let m2 = T::count(side * side);
    let (lo, hi) = eta_bounds::<T>(side);
    (-sum / ((m2 - T::one()) * max_abs)).exp().max(lo).min(hi)
}

pub fn eta<T: Real>(g: &GammaPatch<T>) -> T {
    let sum = g.values().iter().copied().sum();
    let max_abs = g.values().iter().fold(T::zero(), |m, v| m.max(v.abs()));
    eta_from_stats(sum, max_abs, g.side())
}
