//! The two-stage denoiser.
//!
//! 1. Stationary wavelet decomposition of the noisy image to `levels` levels.
//! 2. Blockwise NLM on every detail band; the approximation band is kept.
//! 3. Inverse transform, giving the pre-denoised reference.
//! 4. Pixelwise modified NLM of the noisy image, with weights computed on
//!    reference patches and reference gradients.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::block_nlm::{self, BlockNlmParams, DistanceConvention};
use crate::dswt::{self, Orientation, WaveletFilters, WaveletId};
use crate::error::{Error, Result};
use crate::imaging::ImageGrid;
use crate::modified_nlm::{self, ModNlmParams};
use crate::scalar::Real;

/// Image whose patches and gradients drive the stage-2 weights.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceSource {
    #[default]
    PreDenoised,
    /// Ablation: compare patches of the noisy image itself.
    Noisy,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DenoiseParams<T> {
    pub sigma: T,
    pub levels: usize,
    pub wavelet: WaveletId,
    pub stage1: BlockNlmParams<T>,
    pub stage2: ModNlmParams<T>,
    /// Multiplier on the stage-1 `h` per decomposition level (index 0 is
    /// level 1). Missing entries mean 1.
    #[serde(default)]
    pub level_h_scale: Vec<T>,
    #[serde(default)]
    pub reference: ReferenceSource,
}

pub const DEFAULT_LEVELS: usize = 2;
pub const DEFAULT_WAVELET: WaveletId = WaveletId::Db2;
pub const STAGE1_PATCH: usize = 9;
pub const STAGE1_WINDOW: usize = 15;
pub const STAGE1_H_FACTOR: f64 = 6.0;
pub const STAGE2_PATCH: usize = 7;
pub const STAGE2_WINDOW: usize = 15;
pub const STAGE2_H_FACTOR: f64 = 3.87;

impl<T: Real> DenoiseParams<T> {
    /// 9x9 patches, 15x15 windows, `h = 6 sigma` in stage 1; 7x7 patches,
    /// 15x15 windows, `h = 3.87 sigma` in stage 2; two db2 levels.
    pub fn defaults(sigma: T) -> Self {
        Self::with_factors(sigma, T::lit(STAGE1_H_FACTOR), T::lit(STAGE2_H_FACTOR))
    }

    pub fn with_factors(sigma: T, h1_factor: T, h2_factor: T) -> Self {
        Self {
            sigma,
            levels: DEFAULT_LEVELS,
            wavelet: DEFAULT_WAVELET,
            stage1: BlockNlmParams::new(STAGE1_PATCH, STAGE1_WINDOW, h1_factor * sigma),
            stage2: ModNlmParams::new(STAGE2_PATCH, STAGE2_WINDOW, h2_factor * sigma, sigma),
            level_h_scale: Vec::new(),
            reference: ReferenceSource::PreDenoised,
        }
    }

    pub fn set_convention(&mut self, convention: DistanceConvention) {
        self.stage1.convention = convention;
        self.stage2.convention = convention;
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > T::zero()) || !self.sigma.is_finite() {
            return Err(Error::InvalidParameter(format!("sigma = {} must be finite and > 0", self.sigma)));
        }
        if self.levels == 0 {
            return Err(Error::InvalidParameter("at least one decomposition level is required".into()));
        }
        if let Some(s) = self.level_h_scale.iter().find(|s| !(**s > T::zero()) || !s.is_finite()) {
            return Err(Error::InvalidParameter(format!("level h scale {s} must be finite and > 0")));
        }
        self.stage1.validate()?;
        self.stage2.validate()
    }

    fn level_scale(&self, level: usize) -> T {
        self.level_h_scale.get(level - 1).copied().unwrap_or_else(T::one)
    }
}

/// `(min, max, variance)` of one band.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandSummary {
    pub min: f64,
    pub max: f64,
    pub variance: f64,
}

impl BandSummary {
    pub fn of<T: Real>(band: &ImageGrid<T>) -> Self {
        let f = |v: T| v.to_f64().unwrap_or(f64::NAN);
        Self { min: f(band.min()), max: f(band.max()), variance: f(band.variance()) }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BandStats {
    pub level: usize,
    pub orientation: Orientation,
    pub before: BandSummary,
    pub after: BandSummary,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StageTimings {
    pub decompose: Duration,
    pub band_filtering: Duration,
    pub reconstruct: Duration,
    pub modified_nlm: Duration,
}

impl StageTimings {
    pub fn stage1(&self) -> Duration {
        self.decompose + self.band_filtering + self.reconstruct
    }

    pub fn total(&self) -> Duration {
        self.stage1() + self.modified_nlm
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StageOutputs<T> {
    pub pre_denoised: ImageGrid<T>,
    pub final_image: ImageGrid<T>,
    pub band_stats: Vec<BandStats>,
    pub timings: StageTimings,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    PreDenoise,
    ModifiedNlm,
}

/// Progress notifications emitted while the pipeline runs.
#[derive(Clone, Debug, PartialEq)]
pub enum PipelineEvent {
    BandFiltered(BandStats),
    /// Stage 2 is about to run with this self-weight multiplier.
    SelfWeightRule {
        boost: f64,
    },
    StageFinished {
        stage: Stage,
        elapsed: Duration,
    },
}

/// Immutable two-stage denoiser.
#[derive(Clone, Debug)]
pub struct Denoiser<T> {
    params: DenoiseParams<T>,
    filters: WaveletFilters<T>,
}

impl<T: Real> Denoiser<T> {
    pub fn new(params: DenoiseParams<T>) -> Result<Self> {
        params.validate()?;
        let filters = WaveletFilters::new(params.wavelet);
        Ok(Self { params, filters })
    }

    pub fn params(&self) -> &DenoiseParams<T> {
        &self.params
    }

    fn pre_denoise_inner(
        &self,
        noisy: &ImageGrid<T>,
        observer: &mut dyn FnMut(&PipelineEvent),
        timings: &mut StageTimings,
        stats: &mut Vec<BandStats>,
    ) -> Result<ImageGrid<T>> {
        let t = Instant::now();
        let mut pyramid = dswt::forward(noisy, self.params.levels, &self.filters)?;
        timings.decompose = t.elapsed();

        let t = Instant::now();
        for (j, level) in pyramid.details.iter_mut().enumerate() {
            let mut p = self.params.stage1;
            p.h = p.h * self.params.level_scale(j + 1);
            for o in Orientation::ALL {
                let band = level.band_mut(o);
                let before = BandSummary::of(band);
                *band = block_nlm::denoise_band(band, &p)?;
                let s = BandStats { level: j + 1, orientation: o, before, after: BandSummary::of(band) };
                observer(&PipelineEvent::BandFiltered(s));
                stats.push(s);
            }
        }
        timings.band_filtering = t.elapsed();

        let t = Instant::now();
        let reference = dswt::inverse(&pyramid, &self.filters)?;
        timings.reconstruct = t.elapsed();
        observer(&PipelineEvent::StageFinished { stage: Stage::PreDenoise, elapsed: timings.stage1() });
        Ok(reference)
    }

    /// Stage 1 only: the pre-denoised reference image.
    pub fn pre_denoise(&self, noisy: &ImageGrid<T>) -> Result<ImageGrid<T>> {
        self.pre_denoise_inner(noisy, &mut |_| {}, &mut StageTimings::default(), &mut Vec::new())
    }

    pub fn denoise_full(&self, noisy: &ImageGrid<T>) -> Result<StageOutputs<T>> {
        self.denoise_full_observed(noisy, &mut |_| {})
    }

    pub fn denoise_full_observed(
        &self,
        noisy: &ImageGrid<T>,
        observer: &mut dyn FnMut(&PipelineEvent),
    ) -> Result<StageOutputs<T>> {
        let mut timings = StageTimings::default();
        let mut band_stats = Vec::with_capacity(3 * self.params.levels);
        let pre_denoised = self.pre_denoise_inner(noisy, observer, &mut timings, &mut band_stats)?;

        let stage2 = &self.params.stage2;
        observer(&PipelineEvent::SelfWeightRule { boost: stage2.effective_boost().to_f64().unwrap_or(f64::NAN) });
        let t = Instant::now();
        let reference = match self.params.reference {
            ReferenceSource::PreDenoised => &pre_denoised,
            ReferenceSource::Noisy => noisy,
        };
        let final_image = modified_nlm::denoise(noisy, reference, stage2)?;
        timings.modified_nlm = t.elapsed();
        observer(&PipelineEvent::StageFinished { stage: Stage::ModifiedNlm, elapsed: timings.modified_nlm });
        Ok(StageOutputs { pre_denoised, final_image, band_stats, timings })
    }
}

pub fn pre_denoise<T: Real>(noisy: &ImageGrid<T>, params: &DenoiseParams<T>) -> Result<ImageGrid<T>> {
    Denoiser::new(params.clone())?.pre_denoise(noisy)
}

pub fn denoise_full<T: Real>(noisy: &ImageGrid<T>, params: &DenoiseParams<T>) -> Result<StageOutputs<T>> {
    Denoiser::new(params.clone())?.denoise_full(noisy)
}
