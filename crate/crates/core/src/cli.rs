//! The `sbd` command line: `encode`, `decode`, `simulate`, `eval`, `bench`.
//!
//! Every subcommand writes its result to `--out` when given, else stdout.
//! Configuration precedence for `simulate` is flags, then the config file,
//! then built-in defaults.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::codec::{canonical_clockwise, decode_bins, encode, x_rank_order, Roi, DEFAULT_BINS};
use crate::evaluation::{evaluate_image, EvalReport, GroundTruth, ScoredQuad, DEFAULT_IOU_THRESHOLD};
use crate::formats::{
    list_images, parse_det_file, parse_gt_file, RoiMode, TargetEntry, TargetImage, TargetsFile,
    TARGETS_SCHEMA_VERSION,
};
use crate::geometry::{Point, Quad};
use crate::pipeline::{PipelineConfig, Stage};
use crate::simulator::{simulate, SimConfig};

#[derive(Debug, Parser)]
#[command(name = "sbd", version, about = "Key-edge box codec, post-processing and evaluation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Encode ground-truth boxes into key-edge targets (JSON).
    Encode(EncodeArgs),
    /// Decode a targets file back into boxes and report the codec error.
    Decode(DecodeArgs),
    /// Run the synthetic detector through the full pipeline and score it.
    Simulate(SimulateArgs),
    /// Score detection files against ground-truth files.
    Eval(EvalArgs),
    /// Time encode + decode over random boxes.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct EncodeArgs {
    /// Directory of ICDAR ground-truth files (or a single file).
    #[arg(long)]
    pub gt: PathBuf,
    #[arg(long, value_enum, default_value_t = RoiMode::Tight)]
    pub roi_mode: RoiMode,
    /// Image size used by `--roi-mode image`, as WIDTHxHEIGHT.
    #[arg(long, default_value = "1280x720")]
    pub image_size: String,
    /// Bins per key edge.
    #[arg(long = "M", default_value_t = DEFAULT_BINS)]
    pub bins: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DecodeArgs {
    #[arg(long)]
    pub targets: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Flat `key = value` config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Overrides `seed` from the config file
    #[arg(long)]
    pub seed: Option<u64>,
    /// Bins per key edge
    #[arg(long = "M")]
    pub bins: Option<usize>,
    /// Rescoring weight in [0, 2]
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Window length for key-edge confidence
    #[arg(long)]
    pub window: Option<usize>,
    /// Polygon NMS IoU threshold
    #[arg(long)]
    pub pnms: Option<f64>,
    /// OKS-NMS threshold
    #[arg(long)]
    pub oks: Option<f64>,
    /// IoU needed for a match
    #[arg(long)]
    pub iou: Option<f64>,
    /// Drop detections scoring below this after rescoring
    #[arg(long)]
    pub score_cutoff: Option<f64>,
    /// Write the JSON report here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub gt: PathBuf,
    #[arg(long)]
    pub det: PathBuf,
    #[arg(long, default_value_t = DEFAULT_IOU_THRESHOLD)]
    pub iou: f64,
    /// Emit the JSON report instead of a one-line summary.
    #[arg(long)]
    pub json: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 100_000)]
    pub n: usize,
    #[arg(long = "M", default_value_t = DEFAULT_BINS)]
    pub bins: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Keys accepted in a `simulate` config file.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub image_w: Option<u32>,
    pub image_h: Option<u32>,
    pub n_quads: Option<usize>,
    pub seed: Option<u64>,
    pub noise_sigma: Option<f64>,
    pub heat_sigma: Option<f64>,
    pub fp_rate: Option<f64>,
    pub roi_jitter: Option<f64>,
    pub n_scenes: Option<usize>,
    #[serde(rename = "M")]
    pub bins: Option<usize>,
    pub gamma: Option<f64>,
    pub window: Option<usize>,
    pub pnms: Option<f64>,
    pub oks: Option<f64>,
    pub iou: Option<f64>,
    pub score_cutoff: Option<f64>,
    pub stages: Option<Vec<Stage>>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

/// Resolves flags over file over defaults.
pub fn resolve_simulation(args: &SimulateArgs, file: &ConfigFile) -> (SimConfig, PipelineConfig) {
    let d = SimConfig::default();
    let sim = SimConfig {
        image_w: file.image_w.unwrap_or(d.image_w),
        image_h: file.image_h.unwrap_or(d.image_h),
        n_quads: file.n_quads.unwrap_or(d.n_quads),
        seed: args.seed.or(file.seed).unwrap_or(d.seed),
        noise_sigma: file.noise_sigma.unwrap_or(d.noise_sigma),
        heat_sigma: file.heat_sigma.unwrap_or(d.heat_sigma),
        fp_rate: file.fp_rate.unwrap_or(d.fp_rate),
        roi_jitter: file.roi_jitter.unwrap_or(d.roi_jitter),
        n_scenes: file.n_scenes.unwrap_or(d.n_scenes),
    };
    let mut p = PipelineConfig::default();
    p.bins = args.bins.or(file.bins).unwrap_or(p.bins);
    p.rescore.gamma = args.gamma.or(file.gamma).unwrap_or(p.rescore.gamma);
    p.rescore.window = args.window.or(file.window).unwrap_or(p.rescore.window);
    p.pnms_threshold = args.pnms.or(file.pnms).unwrap_or(p.pnms_threshold);
    p.oks.threshold = args.oks.or(file.oks).unwrap_or(p.oks.threshold);
    p.iou_threshold = args.iou.or(file.iou).unwrap_or(p.iou_threshold);
    p.score_cutoff = args.score_cutoff.or(file.score_cutoff).unwrap_or(p.score_cutoff);
    if let Some(stages) = &file.stages {
        p.stages = stages.clone();
    }
    (sim, p)
}

fn to_json<T: Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn parse_image_size(s: &str) -> Result<(f64, f64)> {
    let (w, h) = s
        .split_once(['x', 'X'])
        .with_context(|| format!("image size {s:?} is not WIDTHxHEIGHT"))?;
    let w: u32 = w.trim().parse().with_context(|| format!("bad width in {s:?}"))?;
    let h: u32 = h.trim().parse().with_context(|| format!("bad height in {s:?}"))?;
    if w == 0 || h == 0 {
        bail!("image size {s:?} must be positive");
    }
    Ok((w as f64, h as f64))
}

pub fn encode_cmd(args: &EncodeArgs) -> Result<String> {
    let (iw, ih) = parse_image_size(&args.image_size)?;
    let mut images = Vec::new();
    for (image, path) in list_images(&args.gt)? {
        let mut boxes = Vec::new();
        for rec in parse_gt_file(&path)? {
            let roi = match args.roi_mode {
                RoiMode::Tight => Roi::bounding(&rec.quad)?,
                RoiMode::Image => Roi::new(0.0, 0.0, iw, ih)?,
            };
            let targets = encode(&rec.quad, &roi, args.bins)?;
            boxes.push(TargetEntry {
                roi,
                targets,
                source: Some(rec.quad.coords()),
                dont_care: rec.dont_care,
            });
        }
        images.push(TargetImage { image, boxes });
    }
    to_json(&TargetsFile {
        schema_version: TARGETS_SCHEMA_VERSION,
        bins: args.bins,
        roi_mode: args.roi_mode,
        images,
    })
}

#[derive(Debug, Serialize, Deserialize)]
pub struct DecodedImage {
    pub image: String,
    /// Boxes in clockwise order, `[x1, y1, ..., x4, y4]`.
    pub quads: Vec<[f64; 8]>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct DecodeReport {
    pub schema_version: u32,
    pub n_boxes: usize,
    /// Largest per-coordinate error against the encoded source boxes.
    pub max_abs_error_px: Option<f64>,
    /// Largest error as a fraction of the `1.5 * bin width` bound.
    pub max_error_over_bound: Option<f64>,
    pub within_bound: Option<bool>,
    pub images: Vec<DecodedImage>,
}

/// Per-coordinate error between a decoded quad (x-rank order) and its
/// source, plus that error relative to `1.5 * w` on each axis.
pub fn codec_error(decoded: &Quad, source: &Quad, roi: &Roi, bins: usize) -> (f64, f64) {
    let (wx, wy) = roi.bin_widths(bins);
    let order = x_rank_order(source);
    let mut abs = 0.0f64;
    let mut rel = 0.0f64;
    for (d, &si) in decoded.vertices.iter().zip(order.iter()) {
        let s: Point = source.vertices[si];
        let (ex, ey) = ((d.x - s.x).abs(), (d.y - s.y).abs());
        abs = abs.max(ex).max(ey);
        rel = rel.max(ex / (1.5 * wx)).max(ey / (1.5 * wy));
    }
    (abs, rel)
}

pub fn decode_cmd(args: &DecodeArgs) -> Result<String> {
    let file = TargetsFile::read(&args.targets)?;
    let mut images = Vec::new();
    let (mut n_boxes, mut max_abs, mut max_rel, mut have_source) = (0, 0.0f64, 0.0f64, false);
    for img in &file.images {
        let mut quads = Vec::new();
        for entry in &img.boxes {
            let quad = decode_bins(&entry.targets, &entry.roi)
                .with_context(|| format!("decoding a box of image {}", img.image))?;
            if let Some(src) = entry.source {
                let src = Quad::from_coords(src)?;
                let (abs, rel) = codec_error(&quad, &src, &entry.roi, entry.targets.bins);
                max_abs = max_abs.max(abs);
                max_rel = max_rel.max(rel);
                have_source = true;
            }
            quads.push(canonical_clockwise(&quad).coords());
            n_boxes += 1;
        }
        images.push(DecodedImage { image: img.image.clone(), quads });
    }
    to_json(&DecodeReport {
        schema_version: TARGETS_SCHEMA_VERSION,
        n_boxes,
        max_abs_error_px: have_source.then_some(max_abs),
        max_error_over_bound: have_source.then_some(max_rel),
        within_bound: have_source.then_some(max_rel <= 1.0 + 1e-9),
        images,
    })
}

pub fn simulate_cmd(args: &SimulateArgs) -> Result<String> {
    let file = match &args.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let (sim, pipeline) = resolve_simulation(args, &file);
    let summary = simulate(&sim, &pipeline)?;
    to_json(&summary)
}

pub fn eval_report(gt: &Path, det: &Path, iou: f64) -> Result<EvalReport> {
    if !(iou > 0.0 && iou <= 1.0) {
        bail!("--iou must lie in (0, 1], got {iou}");
    }
    let gts = list_images(gt)?;
    let dets = list_images(det)?;
    let mut ids: Vec<&String> = gts.keys().chain(dets.keys()).collect();
    ids.sort();
    ids.dedup();
    let mut per_image = Vec::with_capacity(ids.len());
    for id in ids {
        let g: Vec<GroundTruth> = match gts.get(id) {
            Some(p) => parse_gt_file(p)?.iter().map(|r| r.ground_truth()).collect(),
            None => Vec::new(),
        };
        let d: Vec<ScoredQuad> = match dets.get(id) {
            Some(p) => parse_det_file(p)?.iter().map(|r| r.scored()).collect(),
            None => Vec::new(),
        };
        per_image.push(evaluate_image(id, &g, &d, iou));
    }
    Ok(EvalReport::from_images(per_image))
}

pub fn eval_cmd(args: &EvalArgs) -> Result<String> {
    let report = eval_report(&args.gt, &args.det, args.iou)?;
    if args.json {
        to_json(&report)
    } else {
        Ok(format!(
            "precision={:.4} recall={:.4} hmean={:.4} tp={} n_det={} n_gt={}\n",
            report.precision, report.recall, report.hmean, report.tp, report.n_det, report.n_gt
        ))
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct BenchReport {
    pub n: usize,
    pub bins: usize,
    pub seconds: f64,
    pub quads_per_second: f64,
    pub max_abs_error_px: f64,
}

/// Random quads with distinct coordinates inside `[0, extent)^2`.
pub fn random_quads(n: usize, extent: f64, seed: u64) -> Vec<Quad> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| Quad::new([(); 4].map(|_| Point::new(rng.random_range(0.0..extent), rng.random_range(0.0..extent)))))
        .collect()
}

pub fn bench_report(args: &BenchArgs) -> Result<BenchReport> {
    let roi = Roi::new(0.0, 0.0, 112.0, 112.0)?;
    let quads = random_quads(args.n, 112.0, args.seed);
    let start = Instant::now();
    let mut max_abs = 0.0f64;
    for q in &quads {
        let kt = encode(q, &roi, args.bins)?;
        let d = decode_bins(&kt, &roi)?;
        max_abs = max_abs.max(codec_error(&d, q, &roi, args.bins).0);
    }
    let seconds = start.elapsed().as_secs_f64();
    Ok(BenchReport {
        n: args.n,
        bins: args.bins,
        seconds,
        quads_per_second: if seconds > 0.0 { args.n as f64 / seconds } else { f64::INFINITY },
        max_abs_error_px: max_abs,
    })
}

/// Runs a parsed command and returns what it would print.
pub fn execute(cli: &Cli) -> Result<(String, Option<PathBuf>)> {
    Ok(match &cli.command {
        Command::Encode(a) => (encode_cmd(a)?, a.out.clone()),
        Command::Decode(a) => (decode_cmd(a)?, a.out.clone()),
        Command::Simulate(a) => (simulate_cmd(a)?, a.out.clone()),
        Command::Eval(a) => (eval_cmd(a)?, a.out.clone()),
        Command::Bench(a) => (to_json(&bench_report(a)?)?, None),
    })
}

pub fn run(cli: &Cli) -> Result<()> {
    let (text, out) = execute(cli)?;
    match out {
        Some(path) => fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_file_keys() {
        let f = ConfigFile::parse("seed = 3\nM = 28\ngamma = 0.5\nfp_rate = 0.25\nstages = [\"rescore\", \"pnms\"]\n").unwrap();
        assert_eq!(f.seed, Some(3));
        assert_eq!(f.bins, Some(28));
        assert_eq!(f.stages, Some(vec![Stage::Rescore, Stage::Pnms]));
        assert!(ConfigFile::parse("bogus = 1\n").is_err());
    }

    #[test]
    fn precedence() {
        let file = ConfigFile::parse("seed = 3\ngamma = 0.5\nwindow = 3\n").unwrap();
        let args = SimulateArgs {
            config: None,
            seed: Some(9),
            bins: None,
            gamma: None,
            window: Some(7),
            pnms: None,
            oks: None,
            iou: None,
            score_cutoff: None,
            out: None,
        };
        let (sim, p) = resolve_simulation(&args, &file);
        assert_eq!(sim.seed, 9);
        assert_eq!(p.rescore.gamma, 0.5);
        assert_eq!(p.rescore.window, 7);
        assert_eq!(p.bins, 56);
        assert_eq!(p.pnms_threshold, 0.2);
        assert_eq!(p.iou_threshold, 0.5);
    }

    #[test]
    fn image_size_parsing() {
        assert_eq!(parse_image_size("1280x720").unwrap(), (1280.0, 720.0));
        assert!(parse_image_size("1280").is_err());
        assert!(parse_image_size("0x5").is_err());
    }

    #[test]
    fn bench_small() {
        let r = bench_report(&BenchArgs { n: 1000, bins: 56, seed: 1 }).unwrap();
        assert_eq!(r.n, 1000);
        assert!(r.max_abs_error_px <= 3.0);
    }
}
