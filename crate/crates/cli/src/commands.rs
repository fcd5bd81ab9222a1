//! Subcommand definitions and their implementations.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use hybrid_nlm::block_nlm::DistanceConvention;
use hybrid_nlm::dswt::WaveletId;
use hybrid_nlm::modified_nlm::EtaMode;
use hybrid_nlm::orientation::NormalMode;
use hybrid_nlm::pipeline::{PipelineEvent, ReferenceSource, Stage};
use hybrid_nlm::{add_awgn, pgm, psnr, HybridDenoiser, Image, NoiseSpec, Psnr};

use crate::bench::{self, BenchOptions};
use crate::config::{read_json, write_json, BenchConfig, MethodConfig, SCHEMA_VERSION};
use crate::error::{CliError, CliResult};
use crate::report::{BenchReport, DenoiseReport, NoiseSidecar, PsnrTriple, StageMillis};

#[derive(Debug, Parser)]
#[command(name = "hnlm", version, about = "Two-stage multiscale non-local means denoiser")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Add seeded white Gaussian noise to a PGM image.
    AddNoise(AddNoiseArgs),
    /// Denoise a PGM image.
    Denoise(DenoiseArgs),
    /// Run the benchmark grid over the standard test images.
    Bench(BenchArgs),
    /// PSNR between two PGM images.
    Psnr(PsnrArgs),
}

#[derive(Debug, Args)]
pub struct AddNoiseArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// JSON sidecar path [default: <output>.json]
    #[arg(long)]
    pub sidecar: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum WaveletArg {
    Haar,
    Db2,
    Db4,
}

impl From<WaveletArg> for WaveletId {
    fn from(w: WaveletArg) -> Self {
        match w {
            WaveletArg::Haar => WaveletId::Haar,
            WaveletArg::Db2 => WaveletId::Db2,
            WaveletArg::Db4 => WaveletId::Db4,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ConventionArg {
    Normalized,
    Raw,
}

impl From<ConventionArg> for DistanceConvention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Normalized => DistanceConvention::Normalized,
            ConventionArg::Raw => DistanceConvention::Raw,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EtaArg {
    Orientation,
    Neutral,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum NormalsArg {
    Gradient,
    UnitSurface,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ReferenceArg {
    PreDenoised,
    Noisy,
}

/// Denoiser tunables. Unset flags keep the configured (or built-in) value.
#[derive(Debug, Default, Args)]
pub struct MethodArgs {
    /// Wavelet decomposition levels [default: 2]
    #[arg(long)]
    pub levels: Option<usize>,
    /// Wavelet family [default: db2]
    #[arg(long, value_enum)]
    pub wavelet: Option<WaveletArg>,
    /// Stage-1 patch side [default: 9]
    #[arg(long)]
    pub patch1: Option<usize>,
    /// Stage-1 search window side [default: 15]
    #[arg(long)]
    pub window1: Option<usize>,
    /// Stage-1 h as a multiple of sigma [default: 6.0]
    #[arg(long)]
    pub h1_factor: Option<f64>,
    /// Stage-1 Gaussian patch kernel std dev [default: (patch1 / 2) / 2]
    #[arg(long)]
    pub alpha1: Option<f64>,
    /// Stage-1 block stride [default: patch1 / 2]
    #[arg(long)]
    pub step1: Option<usize>,
    /// Stage-2 patch side [default: 7]
    #[arg(long)]
    pub patch2: Option<usize>,
    /// Stage-2 search window side [default: 15]
    #[arg(long)]
    pub window2: Option<usize>,
    /// Stage-2 h as a multiple of sigma [default: 3.87]
    #[arg(long)]
    pub h2_factor: Option<f64>,
    /// Self-weight multiplier for moderate noise [default: 1.3333333333]
    #[arg(long)]
    pub boost: Option<f64>,
    /// Largest sigma that still gets the self-weight boost [default: 20]
    #[arg(long)]
    pub boost_sigma_max: Option<f64>,
    /// Patch distance scale [default: raw]
    #[arg(long, value_enum)]
    pub distance_convention: Option<ConventionArg>,
    /// Orientation factor in stage 2 [default: orientation]
    #[arg(long, value_enum)]
    pub eta: Option<EtaArg>,
    /// Normal vectors used by the orientation factor [default: gradient]
    #[arg(long, value_enum)]
    pub normals: Option<NormalsArg>,
    /// Image whose patches drive stage-2 weights [default: pre-denoised]
    #[arg(long, value_enum)]
    pub reference_source: Option<ReferenceArg>,
}

impl MethodArgs {
    pub fn apply(&self, m: &mut MethodConfig) {
        macro_rules! set {
            ($field:ident) => {
                if let Some(v) = self.$field {
                    m.$field = v;
                }
            };
        }
        set!(levels);
        set!(patch1);
        set!(window1);
        set!(h1_factor);
        set!(patch2);
        set!(window2);
        set!(h2_factor);
        set!(boost);
        set!(boost_sigma_max);
        if let Some(v) = self.alpha1 {
            m.alpha1 = Some(v);
        }
        if let Some(v) = self.step1 {
            m.step1 = Some(v);
        }
        if let Some(w) = self.wavelet {
            m.wavelet = w.into();
        }
        if let Some(c) = self.distance_convention {
            m.distance_convention = c.into();
        }
        if let Some(e) = self.eta {
            m.eta_mode = match e {
                EtaArg::Orientation => EtaMode::Orientation,
                EtaArg::Neutral => EtaMode::Neutral,
            };
        }
        if let Some(n) = self.normals {
            m.normal_mode = match n {
                NormalsArg::Gradient => NormalMode::Gradient,
                NormalsArg::UnitSurface => NormalMode::UnitSurface,
            };
        }
        if let Some(r) = self.reference_source {
            m.reference_source = match r {
                ReferenceArg::PreDenoised => ReferenceSource::PreDenoised,
                ReferenceArg::Noisy => ReferenceSource::Noisy,
            };
        }
    }

    pub fn resolve(&self) -> MethodConfig {
        let mut m = MethodConfig::default();
        self.apply(&mut m);
        m
    }
}

#[derive(Debug, Args)]
pub struct DenoiseArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    /// Noise standard deviation of the input
    #[arg(long)]
    pub sigma: f64,
    /// Clean image; enables PSNR figures in the report
    #[arg(long)]
    pub reference: Option<PathBuf>,
    /// Also write the stage-1 image next to the output as <stem>.pre.pgm
    #[arg(long)]
    pub emit_intermediate: bool,
    /// JSON report path
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Worker threads [default: all cores]
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub quiet: bool,
    #[command(flatten)]
    pub method: MethodArgs,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Directory holding lena.pgm, barbara.pgm, boats.pgm, peppers.pgm, house.pgm
    #[arg(long, default_value = "corpus")]
    pub corpus: PathBuf,
    /// Bench config or a previous bench report to re-run
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Comma-separated subset of images
    #[arg(long, value_delimiter = ',')]
    pub images: Option<Vec<String>>,
    /// Comma-separated noise levels
    #[arg(long, value_delimiter = ',')]
    pub sigmas: Option<Vec<f64>>,
    /// Central square crop for quick runs
    #[arg(long)]
    pub crop: Option<usize>,
    /// Clamp noisy images to [0, 255] before denoising
    #[arg(long)]
    pub clip_noisy: bool,
    #[arg(long, default_value = "bench_report.json")]
    pub report: PathBuf,
    /// Text table path [default: stdout]
    #[arg(long)]
    pub table: Option<PathBuf>,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Record zero timings so reports compare byte for byte
    #[arg(long)]
    pub no_timings: bool,
    #[arg(long)]
    pub quiet: bool,
    #[command(flatten)]
    pub method: MethodArgs,
}

#[derive(Debug, Args)]
pub struct PsnrArgs {
    #[arg(long)]
    pub reference: PathBuf,
    #[arg(long)]
    pub input: PathBuf,
}

fn read_pgm(path: &Path) -> CliResult<Image> {
    pgm::read_image(path).map_err(|e| CliError::image(path, e))
}

fn write_pgm(img: &Image, path: &Path) -> CliResult<()> {
    pgm::write_image(img, path).map_err(|e| CliError::image(path, e))
}

fn check_output_dir(path: &Path) -> CliResult<()> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() && !dir.is_dir() => Err(CliError::io(
            path,
            std::io::Error::new(std::io::ErrorKind::NotFound, "output directory does not exist"),
        )),
        _ => Ok(()),
    }
}

fn default_threads() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

fn with_pool<R: Send>(threads: Option<usize>, f: impl FnOnce() -> R + Send) -> CliResult<R> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or_else(default_threads).max(1))
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}

/// `out.pgm` -> `out.pre.pgm`.
pub fn intermediate_path(output: &Path) -> PathBuf {
    let stem = output.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let ext = output.extension().map(|e| e.to_string_lossy().into_owned()).unwrap_or_else(|| "pgm".into());
    output.with_file_name(format!("{stem}.pre.{ext}"))
}

pub fn add_noise(args: &AddNoiseArgs) -> CliResult<()> {
    let spec = NoiseSpec::new(args.sigma, args.seed).map_err(|e| CliError::Usage(e.to_string()))?;
    let img = read_pgm(&args.input)?;
    check_output_dir(&args.output)?;
    let noisy = add_awgn(&img, spec)?;
    write_pgm(&noisy, &args.output)?;
    let sidecar = NoiseSidecar {
        schema_version: SCHEMA_VERSION,
        sigma: args.sigma,
        seed: args.seed,
        generator: "ChaCha20Rng::seed_from_u64 + rand_distr::StandardNormal (ziggurat), row-major".into(),
        source: args.input.display().to_string(),
        source_sha256: bench::file_sha256(&args.input)?,
        clamped_on_write: true,
    };
    let sidecar_path = args.sidecar.clone().unwrap_or_else(|| {
        let mut p = args.output.clone().into_os_string();
        p.push(".json");
        PathBuf::from(p)
    });
    write_json(&sidecar, &sidecar_path)
}

pub fn denoise(args: &DenoiseArgs) -> CliResult<()> {
    if !(args.sigma.is_finite() && args.sigma > 0.0) {
        return Err(CliError::Usage(format!("--sigma must be > 0, got {}", args.sigma)));
    }
    let method = args.method.resolve();
    let denoiser = HybridDenoiser::new(method.params(args.sigma))?;
    let noisy = read_pgm(&args.input)?;
    let clean = args.reference.as_deref().map(read_pgm).transpose()?;
    if let Some(c) = &clean {
        noisy.same_dims(c)?;
    }
    check_output_dir(&args.output)?;
    if let Some(r) = &args.report {
        check_output_dir(r)?;
    }

    let quiet = args.quiet;
    let outputs = with_pool(args.threads, || {
        denoiser.denoise_full_observed(&noisy, &mut |event| {
            if quiet {
                return;
            }
            match event {
                PipelineEvent::BandFiltered(s) => eprintln!(
                    "  level {} band {:?}: variance {:.2} -> {:.2}",
                    s.level, s.orientation, s.before.variance, s.after.variance
                ),
                PipelineEvent::SelfWeightRule { boost } => eprintln!("  self-weight multiplier {boost:.4}"),
                PipelineEvent::StageFinished { stage, elapsed } => {
                    let name = match stage {
                        Stage::PreDenoise => "stage 1 (wavelet NLM)",
                        Stage::ModifiedNlm => "stage 2 (modified NLM)",
                    };
                    eprintln!("{name} finished in {:.2} s", elapsed.as_secs_f64())
                }
            }
        })
    })??;

    write_pgm(&outputs.final_image, &args.output)?;
    let intermediate = if args.emit_intermediate {
        let path = intermediate_path(&args.output);
        write_pgm(&outputs.pre_denoised, &path)?;
        Some(path.display().to_string())
    } else {
        None
    };
    let psnr_triple = match &clean {
        Some(c) => Some(PsnrTriple {
            noisy: psnr(c, &noisy)?.as_f64(),
            pre_denoised: psnr(c, &outputs.pre_denoised)?.as_f64(),
            final_: psnr(c, &outputs.final_image)?.as_f64(),
        }),
        None => None,
    };
    if let (Some(t), false) = (&psnr_triple, quiet) {
        eprintln!("PSNR noisy {:.2} dB, stage 1 {:.2} dB, final {:.2} dB", t.noisy, t.pre_denoised, t.final_);
    }
    if let Some(path) = &args.report {
        let report = DenoiseReport {
            schema_version: SCHEMA_VERSION,
            input: args.input.display().to_string(),
            input_sha256: bench::file_sha256(&args.input)?,
            output: args.output.display().to_string(),
            intermediate,
            sigma: args.sigma,
            method,
            band_stats: outputs.band_stats,
            timing_ms: StageMillis::from(&outputs.timings),
            psnr: psnr_triple,
        };
        write_json(&report, path)?;
    }
    Ok(())
}

/// Loads a bench config, accepting a previous report in its place.
pub fn load_bench_config(path: &Path) -> CliResult<BenchConfig> {
    match read_json::<BenchReport>(path) {
        Ok(report) => Ok(report.config),
        Err(CliError::Json { .. }) => read_json::<BenchConfig>(path),
        Err(e) => Err(e),
    }
}

pub fn bench(args: &BenchArgs) -> CliResult<BenchReport> {
    let mut config = match &args.config {
        Some(path) => load_bench_config(path)?,
        None => BenchConfig::standard(&args.corpus),
    };
    if args.config.is_none() || args.corpus != Path::new("corpus") {
        config.corpus = args.corpus.clone();
    }
    if let Some(images) = &args.images {
        config.restrict_images(images)?;
    }
    if let Some(sigmas) = &args.sigmas {
        config.sigmas = sigmas.clone();
    }
    if args.crop.is_some() {
        config.crop = args.crop;
    }
    config.clip_noisy |= args.clip_noisy;
    args.method.apply(&mut config.method);
    check_output_dir(&args.report)?;

    let opts = BenchOptions {
        threads: args.threads.unwrap_or_else(default_threads),
        record_timings: !args.no_timings,
        progress: !args.quiet,
    };
    let report = bench::run_bench(&config, &opts)?;
    write_json(&report, &args.report)?;
    let table = report.render_table();
    match &args.table {
        Some(path) => std::fs::write(path, &table).map_err(|e| CliError::io(path, e))?,
        None => print!("{table}"),
    }
    Ok(report)
}

pub fn psnr_cmd(args: &PsnrArgs) -> CliResult<Psnr> {
    let a = read_pgm(&args.reference)?;
    let b = read_pgm(&args.input)?;
    Ok(psnr(&a, &b)?)
}

pub fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::AddNoise(a) => add_noise(a),
        Command::Denoise(a) => denoise(a),
        Command::Bench(a) => bench(a).map(|_| ()),
        Command::Psnr(a) => {
            let p = psnr_cmd(a)?;
            match p {
                Psnr::Finite(v) => println!("{v:.4}"),
                Psnr::Infinite => println!("inf"),
            }
            Ok(())
        }
    }
}
