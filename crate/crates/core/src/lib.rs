//! Two-stage multiscale non-local means denoising.
//!
//! Stage 1 filters the detail bands of an undecimated wavelet decomposition
//! with blockwise NLM and reconstructs a pre-denoised reference. Stage 2 runs
//! pixelwise NLM on the noisy image, comparing reference patches and scaling
//! their distance by an orientation factor derived from reference gradients.
//!
//! Every numeric type is generic over [`Real`]; the aliases below fix it to
//! `f64`, which is what the pipeline and its tests are calibrated for.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod block_nlm;
pub mod dswt;
pub mod error;
pub mod imaging;
pub mod modified_nlm;
pub mod orientation;
pub mod pipeline;
pub mod scalar;

pub use error::{Error, Result};
pub use imaging::pgm::{self, PgmError};
pub use imaging::{add_awgn, psnr, reflect, ImageGrid, NoiseSpec, Patch, Psnr};
pub use scalar::Real;

pub type Image = ImageGrid<f64>;
pub type ImagePatch = Patch<f64>;
pub type Pyramid = dswt::WaveletPyramid<f64>;
pub type Filters = dswt::WaveletFilters<f64>;
pub type Gradients = orientation::GradientField<f64>;
pub type Normals = orientation::NormalField<f64>;
pub type Gamma = orientation::GammaPatch<f64>;
pub type StageOneParams = block_nlm::BlockNlmParams<f64>;
pub type StageTwoParams = modified_nlm::ModNlmParams<f64>;
pub type Params = pipeline::DenoiseParams<f64>;
pub type Outputs = pipeline::StageOutputs<f64>;
pub type HybridDenoiser = pipeline::Denoiser<f64>;
