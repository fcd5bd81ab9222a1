//! JSON report schemas and the aligned-text benchmark table.

use std::fmt::Write as _;

use hybrid_nlm::pipeline::{BandStats, StageTimings};
use serde::{Deserialize, Serialize};

use crate::config::{BenchConfig, MethodConfig, SCHEMA_VERSION};
use crate::reference_tables;

/// Sidecar written next to every noisy image.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSidecar {
    pub schema_version: u32,
    pub sigma: f64,
    pub seed: u64,
    pub generator: String,
    pub source: String,
    pub source_sha256: String,
    pub clamped_on_write: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StageMillis {
    pub stage1: f64,
    pub stage2: f64,
    pub total: f64,
}

impl From<&StageTimings> for StageMillis {
    fn from(t: &StageTimings) -> Self {
        let ms = |d: std::time::Duration| d.as_secs_f64() * 1e3;
        Self { stage1: ms(t.stage1()), stage2: ms(t.modified_nlm), total: ms(t.total()) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DenoiseReport {
    pub schema_version: u32,
    pub input: String,
    pub input_sha256: String,
    pub output: String,
    pub intermediate: Option<String>,
    pub sigma: f64,
    pub method: MethodConfig,
    pub band_stats: Vec<BandStats>,
    pub timing_ms: StageMillis,
    /// Present when a clean reference image was supplied.
    pub psnr: Option<PsnrTriple>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PsnrTriple {
    pub noisy: f64,
    pub pre_denoised: f64,
    #[serde(rename = "final")]
    pub final_: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchRow {
    pub image: String,
    pub width: usize,
    pub height: usize,
    pub sha256: String,
    /// Set when the image size differs from the expected size.
    pub dims_flag: Option<String>,
    pub sigma: f64,
    pub seed: u64,
    pub psnr_noisy: f64,
    pub psnr_pre_denoised: f64,
    pub psnr_final: f64,
    pub paper_reference_psnr: Option<f64>,
    pub delta_to_paper: Option<f64>,
    pub timing_ms: StageMillis,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AggregateRow {
    pub sigma: f64,
    pub images: usize,
    pub mean_psnr_noisy: f64,
    pub mean_psnr_pre_denoised: f64,
    pub mean_psnr_final: f64,
    /// Published five-image average; only meaningful when `images == 5`.
    pub paper_reference_psnr: Option<f64>,
    pub delta_to_paper: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchReport {
    pub schema_version: u32,
    pub config: BenchConfig,
    pub rows: Vec<BenchRow>,
    pub aggregates: Vec<AggregateRow>,
    pub missing_images: Vec<String>,
    pub complete: bool,
}

fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    sum / n as f64
}

impl BenchReport {
    /// Builds the report from per-cell rows (sorted here by image order in
    /// the config, then sigma).
    pub fn assemble(config: BenchConfig, mut rows: Vec<BenchRow>, missing_images: Vec<String>) -> Self {
        let order = |name: &str| config.images.iter().position(|im| im.name == name).unwrap_or(usize::MAX);
        rows.sort_by(|a, b| order(&a.image).cmp(&order(&b.image)).then(a.sigma.total_cmp(&b.sigma)));
        let aggregates = config
            .sigmas
            .iter()
            .filter_map(|&sigma| {
                let cells: Vec<&BenchRow> = rows.iter().filter(|r| r.sigma == sigma).collect();
                if cells.is_empty() {
                    return None;
                }
                let mean_final = mean(cells.iter().map(|r| r.psnr_final));
                let published_psnr = if cells.len() == reference_tables::IMAGES.len() {
                    reference_tables::averages(sigma).map(|t| t[4])
                } else {
                    None
                };
                Some(AggregateRow {
                    sigma,
                    images: cells.len(),
                    mean_psnr_noisy: mean(cells.iter().map(|r| r.psnr_noisy)),
                    mean_psnr_pre_denoised: mean(cells.iter().map(|r| r.psnr_pre_denoised)),
                    mean_psnr_final: mean_final,
                    paper_reference_psnr: published_psnr,
                    delta_to_paper: published_psnr.map(|p| mean_final - p),
                })
            })
            .collect();
        let complete = missing_images.is_empty() && rows.len() == config.images.len() * config.sigmas.len();
        Self { schema_version: SCHEMA_VERSION, config, rows, aggregates, missing_images, complete }
    }

    /// Same report with every timing zeroed, for content comparisons.
    pub fn without_timings(&self) -> Self {
        let mut r = self.clone();
        r.rows.iter_mut().for_each(|row| row.timing_ms = StageMillis::default());
        r
    }

    /// Aligned text rendering of per-image rows and per-sigma means next to
    /// the published columns.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<9} {:>5} {:>7} {:>7} {:>7} | {:>6} {:>6} {:>6} {:>6} {:>8} {:>7} | {:>9}",
            "image", "sigma", "noisy", "stage1", "final", "BM3D", "GSM", "KSVD", "BNLM", "Proposed", "delta", "time[s]"
        );
        let published = |v: Option<[f64; 5]>| match v {
            Some(t) => t.iter().map(|x| format!("{x:>6.2}")).collect::<Vec<_>>(),
            None => vec![format!("{:>6}", "-"); 5],
        };
        for r in &self.rows {
            let p = published(reference_tables::per_image(&r.image, r.sigma));
            let delta = r.delta_to_paper.map_or_else(|| "-".to_string(), |d| format!("{d:+.2}"));
            let _ = writeln!(
                out,
                "{:<9} {:>5} {:>7.2} {:>7.2} {:>7.2} | {} {} {} {} {:>8} {:>7} | {:>9.1}{}",
                r.image,
                r.sigma,
                r.psnr_noisy,
                r.psnr_pre_denoised,
                r.psnr_final,
                p[0],
                p[1],
                p[2],
                p[3],
                p[4].trim(),
                delta,
                r.timing_ms.total / 1e3,
                r.dims_flag.as_ref().map(|f| format!("  [{f}]")).unwrap_or_default()
            );
        }
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "{:<9} {:>5} {:>7} {:>7} {:>7} | {:>6} {:>6} {:>6} {:>6} {:>8} {:>7}",
            "mean(n)", "sigma", "noisy", "stage1", "final", "BM3D", "GSM", "KSVD", "BNLM", "Proposed", "delta"
        );
        for a in &self.aggregates {
            let p = published(if a.images == reference_tables::IMAGES.len() {
                reference_tables::averages(a.sigma)
            } else {
                None
            });
            let delta = a.delta_to_paper.map_or_else(|| "-".to_string(), |d| format!("{d:+.2}"));
            let _ = writeln!(
                out,
                "{:<9} {:>5} {:>7.2} {:>7.2} {:>7.2} | {} {} {} {} {:>8} {:>7}",
                format!("mean({})", a.images),
                a.sigma,
                a.mean_psnr_noisy,
                a.mean_psnr_pre_denoised,
                a.mean_psnr_final,
                p[0],
                p[1],
                p[2],
                p[3],
                p[4].trim(),
                delta
            );
        }
        if !self.missing_images.is_empty() {
            let _ = writeln!(out, "\nmissing corpus images: {}", self.missing_images.join(", "));
        }
        if !self.complete {
            let _ = writeln!(out, "report incomplete");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(image: &str, sigma: f64, fin: f64) -> BenchRow {
        BenchRow {
            image: image.into(),
            width: 8,
            height: 8,
            sha256: String::new(),
            dims_flag: None,
            sigma,
            seed: 1,
            psnr_noisy: 20.0,
            psnr_pre_denoised: 25.0,
            psnr_final: fin,
            paper_reference_psnr: reference_tables::proposed(image, sigma),
            delta_to_paper: reference_tables::proposed(image, sigma).map(|p| fin - p),
            timing_ms: StageMillis { stage1: 1.0, stage2: 2.0, total: 3.0 },
        }
    }

    #[test]
    fn aggregates_are_row_means() {
        let mut cfg = BenchConfig::standard("c");
        cfg.sigmas = vec![25.0];
        let names = ["lena", "barbara", "boats", "peppers", "house"];
        let rows: Vec<BenchRow> = names.iter().enumerate().map(|(i, n)| row(n, 25.0, 28.0 + i as f64 * 0.37)).collect();
        let report = BenchReport::assemble(cfg, rows.clone(), vec![]);
        assert!(report.complete);
        let a = &report.aggregates[0];
        let expect = rows.iter().map(|r| r.psnr_final).sum::<f64>() / 5.0;
        assert!((a.mean_psnr_final - expect).abs() < 1e-9);
        assert_eq!(a.paper_reference_psnr, Some(30.63));
        assert!(report.render_table().contains("mean(5)"));
    }

    #[test]
    fn json_round_trip() {
        let cfg = BenchConfig::standard("c");
        let report =
            BenchReport::assemble(cfg, vec![row("lena", 20.0, 32.1), row("lena", 10.0, 35.0)], vec!["house".into()]);
        assert!(!report.complete);
        assert_eq!(report.rows[0].sigma, 10.0);
        let text = serde_json::to_string(&report).unwrap();
        let back: BenchReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, report);
        assert_eq!(report.without_timings().rows[0].timing_ms, StageMillis::default());
    }
}
