//! Resolved run configuration: denoiser tunables and benchmark layout.
//!
//! Every structure rejects unknown keys so that a typo in a hand-edited
//! config fails loudly instead of silently falling back to a default.

use std::path::{Path, PathBuf};

use hybrid_nlm::block_nlm::DistanceConvention;
use hybrid_nlm::dswt::WaveletId;
use hybrid_nlm::modified_nlm::EtaMode;
use hybrid_nlm::orientation::NormalMode;
use hybrid_nlm::pipeline::{self, DenoiseParams, ReferenceSource};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};
use crate::reference_tables;

pub const SCHEMA_VERSION: u32 = 1;

/// Denoiser tunables with `h` given as multiples of sigma.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodConfig {
    pub levels: usize,
    pub wavelet: WaveletId,
    pub patch1: usize,
    pub window1: usize,
    pub h1_factor: f64,
    /// Gaussian patch kernel std dev; `None` means `(patch1 / 2) / 2`.
    pub alpha1: Option<f64>,
    /// Block stride; `None` means `patch1 / 2`.
    pub step1: Option<usize>,
    pub patch2: usize,
    pub window2: usize,
    pub h2_factor: f64,
    pub boost: f64,
    pub boost_sigma_max: f64,
    pub distance_convention: DistanceConvention,
    pub eta_mode: EtaMode,
    pub normal_mode: NormalMode,
    pub reference_source: ReferenceSource,
}

impl Default for MethodConfig {
    fn default() -> Self {
        Self {
            levels: pipeline::DEFAULT_LEVELS,
            wavelet: pipeline::DEFAULT_WAVELET,
            patch1: pipeline::STAGE1_PATCH,
            window1: pipeline::STAGE1_WINDOW,
            h1_factor: pipeline::STAGE1_H_FACTOR,
            alpha1: None,
            step1: None,
            patch2: pipeline::STAGE2_PATCH,
            window2: pipeline::STAGE2_WINDOW,
            h2_factor: pipeline::STAGE2_H_FACTOR,
            boost: 4.0 / 3.0,
            boost_sigma_max: 20.0,
            distance_convention: DistanceConvention::default(),
            eta_mode: EtaMode::Orientation,
            normal_mode: NormalMode::Gradient,
            reference_source: ReferenceSource::PreDenoised,
        }
    }
}

impl MethodConfig {
    /// Pipeline parameters for a given noise level. Invariants are checked
    /// later by the pipeline constructor.
    pub fn params(&self, sigma: f64) -> DenoiseParams<f64> {
        let mut p = DenoiseParams::with_factors(sigma, self.h1_factor, self.h2_factor);
        p.levels = self.levels;
        p.wavelet = self.wavelet;
        p.stage1.patch_side = self.patch1;
        p.stage1.window_side = self.window1;
        p.stage1.alpha = self.alpha1.unwrap_or(((self.patch1 / 2) as f64 / 2.0).max(0.5));
        p.stage1.block_step = self.step1.unwrap_or((self.patch1 / 2).max(1));
        p.stage2.patch_side = self.patch2;
        p.stage2.window_side = self.window2;
        p.stage2.self_weight_boost = self.boost;
        p.stage2.boost_sigma_max = self.boost_sigma_max;
        p.stage2.eta_mode = self.eta_mode;
        p.stage2.normal_mode = self.normal_mode;
        p.reference = self.reference_source;
        p.set_convention(self.distance_convention);
        p
    }
}

/// One benchmark image inside the corpus directory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusImage {
    pub name: String,
    pub file: String,
    /// Expected `(width, height)`; mismatches are flagged, not fatal.
    pub expected_dims: (usize, usize),
    /// Hex SHA-256 of the canonical file, when known.
    pub sha256: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellSeed {
    pub image: String,
    pub sigma: f64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    pub schema_version: u32,
    pub corpus: PathBuf,
    pub images: Vec<CorpusImage>,
    pub sigmas: Vec<f64>,
    pub seeds: Vec<CellSeed>,
    pub method: MethodConfig,
    /// Central square crop applied to every image before noise is added.
    pub crop: Option<usize>,
    /// Clamp the noisy image to `[0, 255]` before denoising.
    pub clip_noisy: bool,
}

/// Published seed of benchmark cell `(image, sigma)`.
pub fn default_seed(image_index: usize, sigma: f64) -> u64 {
    1000 * (image_index as u64 + 1) + sigma.round() as u64
}

impl BenchConfig {
    /// The five standard images at the five published noise levels.
    pub fn standard(corpus: impl Into<PathBuf>) -> Self {
        let images: Vec<CorpusImage> = reference_tables::IMAGES
            .iter()
            .map(|&name| CorpusImage {
                name: name.to_string(),
                file: format!("{name}.pgm"),
                expected_dims: if name == "house" { (256, 256) } else { (512, 512) },
                sha256: None,
            })
            .collect();
        let sigmas: Vec<f64> = reference_tables::SIGMAS.iter().map(|&s| s as f64).collect();
        let seeds = images
            .iter()
            .enumerate()
            .flat_map(|(i, im)| {
                sigmas.iter().map(move |&s| CellSeed { image: im.name.clone(), sigma: s, seed: default_seed(i, s) })
            })
            .collect();
        Self {
            schema_version: SCHEMA_VERSION,
            corpus: corpus.into(),
            images,
            sigmas,
            seeds,
            method: MethodConfig::default(),
            crop: None,
            clip_noisy: false,
        }
    }

    /// Keeps only the named images (case-insensitive), in the given order.
    pub fn restrict_images(&mut self, names: &[String]) -> CliResult<()> {
        let mut kept = Vec::with_capacity(names.len());
        for n in names {
            let Some(im) = self.images.iter().find(|im| im.name.eq_ignore_ascii_case(n)) else {
                return Err(CliError::Usage(format!("unknown benchmark image {n:?}")));
            };
            kept.push(im.clone());
        }
        self.images = kept;
        Ok(())
    }

    pub fn seed_for(&self, image: &str, sigma: f64) -> u64 {
        if let Some(s) = self.seeds.iter().find(|s| s.image == image && (s.sigma - sigma).abs() < 1e-9) {
            return s.seed;
        }
        let idx = reference_tables::IMAGES.iter().position(|&n| n == image).unwrap_or(self.images.len());
        default_seed(idx, sigma)
    }

    /// Fills in seeds for every `(image, sigma)` cell lacking one.
    pub fn resolve_seeds(&mut self) {
        let mut seeds = Vec::new();
        for im in &self.images {
            for &s in &self.sigmas {
                seeds.push(CellSeed { image: im.name.clone(), sigma: s, seed: self.seed_for(&im.name, s) });
            }
        }
        self.seeds = seeds;
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CliError::Usage(format!(
                "config schema version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        if self.sigmas.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(CliError::Usage("benchmark sigmas must be finite and > 0".into()));
        }
        for &s in &self.sigmas {
            self.method.params(s).validate()?;
        }
        Ok(())
    }

    pub fn image_path(&self, image: &CorpusImage) -> PathBuf {
        self.corpus.join(&image.file)
    }
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|source| CliError::Json { path: path.display().to_string(), source })
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).expect("report types serialize");
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}
