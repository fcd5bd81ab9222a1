//! Benchmark runner over the standard test-image corpus.

use std::path::Path;

use hybrid_nlm::{add_awgn, pgm, psnr, HybridDenoiser, Image, NoiseSpec};
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::config::{BenchConfig, CorpusImage};
use crate::error::{CliError, CliResult};
use crate::reference_tables;
use crate::report::{BenchReport, BenchRow, StageMillis};

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn file_sha256(path: &Path) -> CliResult<String> {
    std::fs::read(path).map(|b| sha256_hex(&b)).map_err(|e| CliError::io(path, e))
}

/// Central `side x side` crop (no-op when the image is already smaller).
pub fn center_crop(img: &Image, side: usize) -> CliResult<Image> {
    let w = side.min(img.width());
    let h = side.min(img.height());
    Ok(img.crop((img.height() - h) / 2, (img.width() - w) / 2, w, h)?)
}

pub struct BenchOptions {
    pub threads: usize,
    pub record_timings: bool,
    pub progress: bool,
}

struct LoadedImage {
    spec: CorpusImage,
    image: Image,
    sha256: String,
    dims: (usize, usize),
}

fn finite_psnr(a: &Image, b: &Image) -> CliResult<f64> {
    Ok(psnr(a, b)?.as_f64())
}

fn run_cell(config: &BenchConfig, im: &LoadedImage, sigma: f64, opts: &BenchOptions) -> CliResult<BenchRow> {
    let seed = config.seed_for(&im.spec.name, sigma);
    let mut noisy = add_awgn(&im.image, NoiseSpec::new(sigma, seed)?)?;
    if config.clip_noisy {
        noisy = noisy.map(|v| v.clamp(0.0, 255.0))?;
    }
    let denoiser = HybridDenoiser::new(config.method.params(sigma))?;
    let out = denoiser.denoise_full(&noisy)?;
    let psnr_final = finite_psnr(&im.image, &out.final_image)?;
    let published_psnr = if config.crop.is_none() { reference_tables::proposed(&im.spec.name, sigma) } else { None };
    let timing_ms = if opts.record_timings { StageMillis::from(&out.timings) } else { StageMillis::default() };
    if opts.progress {
        eprintln!(
            "{:<8} sigma {:>3}: final {:.2} dB ({:.1} s)",
            im.spec.name,
            sigma,
            psnr_final,
            out.timings.total().as_secs_f64()
        );
    }
    let expected = im.spec.expected_dims;
    Ok(BenchRow {
        image: im.spec.name.clone(),
        width: im.image.width(),
        height: im.image.height(),
        sha256: im.sha256.clone(),
        dims_flag: (config.crop.is_none() && im.dims != expected)
            .then(|| format!("expected {}x{}, found {}x{}", expected.0, expected.1, im.dims.0, im.dims.1)),
        sigma,
        seed,
        psnr_noisy: finite_psnr(&im.image, &noisy)?,
        psnr_pre_denoised: finite_psnr(&im.image, &out.pre_denoised)?,
        psnr_final,
        paper_reference_psnr: published_psnr,
        delta_to_paper: published_psnr.map(|p| psnr_final - p),
        timing_ms,
    })
}

/// Runs every `(image, sigma)` cell of `config`. Missing images are listed in
/// the report, which is then marked incomplete.
pub fn run_bench(config: &BenchConfig, opts: &BenchOptions) -> CliResult<BenchReport> {
    let mut config = config.clone();
    config.resolve_seeds();
    config.validate()?;

    let mut loaded = Vec::new();
    let mut missing = Vec::new();
    for spec in &config.images {
        let path = config.image_path(spec);
        if !path.is_file() {
            missing.push(spec.name.clone());
            continue;
        }
        let sha256 = file_sha256(&path)?;
        if let Some(expected) = &spec.sha256 {
            if !expected.eq_ignore_ascii_case(&sha256) && opts.progress {
                eprintln!("warning: {} does not match the canonical hash", path.display());
            }
        }
        let image: Image = pgm::read_image(&path).map_err(|e| CliError::image(&path, e))?;
        let dims = image.dims();
        let image = match config.crop {
            Some(side) => center_crop(&image, side)?,
            None => image,
        };
        loaded.push(LoadedImage { spec: spec.clone(), image, sha256, dims });
    }

    let cells: Vec<(&LoadedImage, f64)> =
        loaded.iter().flat_map(|im| config.sigmas.iter().map(move |&s| (im, s))).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.threads.max(1))
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))?;
    let rows = pool.install(|| {
        cells.par_iter().map(|&(im, sigma)| run_cell(&config, im, sigma, opts)).collect::<CliResult<Vec<_>>>()
    })?;
    Ok(BenchReport::assemble(config, rows, missing))
}
