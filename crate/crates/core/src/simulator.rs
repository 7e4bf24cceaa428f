//! Deterministic stand-in for a trained key-edge detector.
//!
//! Scenes hold non-overlapping convex quadrilaterals. For each one the
//! "head" emits a Gaussian bump per key edge centred on the encoded target
//! bin, a match-type distribution peaked on the true match type and a high
//! box score. False positives get flat key-edge distributions with an equally
//! high box score, which is the failure mode rescoring is meant to catch.
//!
//! Randomness comes from ChaCha8 seeded with `seed`; scene `i` draws its
//! geometry from stream `2 i` and its detector output from stream `2 i + 1`,
//! so scenes can be generated in any order with identical results.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::codec::{canonical_clockwise, encode, KeDistributions, Roi, NUM_MATCH_TYPES};
use crate::error::Error;
use crate::evaluation::{evaluate_image, EvalReport, GroundTruth};
use crate::geometry::{is_simple_quad, ConvexPolygon, Point, Quad};
use crate::pipeline::{postprocess, PipelineConfig, RawDetection};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub image_w: u32,
    pub image_h: u32,
    pub n_quads: usize,
    pub seed: u64,
    /// Per-bin uniform noise amplitude added before renormalizing.
    pub noise_sigma: f64,
    /// Width of the key-edge bump, in bins.
    pub heat_sigma: f64,
    /// False positives per scene as a fraction of `n_quads` (rounded up).
    pub fp_rate: f64,
    /// RoI expansion and shift, as a fraction of the box extent.
    pub roi_jitter: f64,
    pub n_scenes: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            image_w: 1280,
            image_h: 720,
            n_quads: 20,
            seed: 0,
            noise_sigma: 0.002,
            heat_sigma: 1.0,
            fp_rate: 0.2,
            roi_jitter: 0.1,
            n_scenes: 1,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), Error> {
        let bad = |m: String| Err(Error::Config(m));
        if self.image_w == 0 || self.image_h == 0 {
            return bad("image_w and image_h must be positive".into());
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return bad(format!("noise_sigma must be >= 0, got {}", self.noise_sigma));
        }
        if !(self.heat_sigma > 0.0 && self.heat_sigma.is_finite()) {
            return bad(format!("heat_sigma must be > 0, got {}", self.heat_sigma));
        }
        if !(0.0..=1.0).contains(&self.fp_rate) {
            return bad(format!("fp_rate must lie in [0, 1], got {}", self.fp_rate));
        }
        if !(self.roi_jitter >= 0.0 && self.roi_jitter.is_finite()) {
            return bad(format!("roi_jitter must be >= 0, got {}", self.roi_jitter));
        }
        Ok(())
    }

    /// Number of false positives injected per scene.
    pub fn n_false_positives(&self) -> usize {
        (self.fp_rate * self.n_quads as f64).ceil() as usize
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneGt {
    pub index: u64,
    pub image_w: u32,
    pub image_h: u32,
    /// Simple convex quads in clockwise order, inside the image.
    pub quads: Vec<Quad>,
}

impl SceneGt {
    pub fn ground_truth(&self) -> Vec<GroundTruth> {
        self.quads.iter().copied().map(GroundTruth::care).collect()
    }
}

const MIN_TEXT_HEIGHT: f64 = 16.0;
const MAX_TEXT_HEIGHT: f64 = 40.0;
const MAX_ASPECT: f64 = 4.0;
const SKEW: f64 = 0.1;
const BOX_GAP: f64 = 4.0;
const ATTEMPTS_PER_QUAD: usize = 400;

fn random_shape(rng: &mut ChaCha8Rng) -> [Point; 4] {
    let h = rng.random_range(MIN_TEXT_HEIGHT..MAX_TEXT_HEIGHT);
    let w = h * rng.random_range(1.0..MAX_ASPECT);
    let theta = rng.random_range(-PI / 2.0..PI / 2.0);
    let (s, c) = theta.sin_cos();
    [(-0.5, -0.5), (0.5, -0.5), (0.5, 0.5), (-0.5, 0.5)].map(|(u, v)| {
        let x = u * w + rng.random_range(-SKEW..SKEW) * h;
        let y = v * h + rng.random_range(-SKEW..SKEW) * h;
        Point::new(c * x - s * y, s * x + c * y)
    })
}

fn overlaps(a: (f64, f64, f64, f64), b: (f64, f64, f64, f64)) -> bool {
    a.0 - BOX_GAP < b.2 && b.0 - BOX_GAP < a.2 && a.1 - BOX_GAP < b.3 && b.1 - BOX_GAP < a.3
}

/// Scene `index` of the configured run. May hold fewer than `n_quads` quads
/// when the image cannot fit them all.
pub fn gen_scene(cfg: &SimConfig, index: u64) -> SceneGt {
    let mut rng = cfg.rng(2 * index);
    let (iw, ih) = (cfg.image_w as f64, cfg.image_h as f64);
    let mut quads: Vec<Quad> = Vec::with_capacity(cfg.n_quads);
    let mut boxes = Vec::with_capacity(cfg.n_quads);
    let mut attempts = 0;
    while quads.len() < cfg.n_quads && attempts < cfg.n_quads * ATTEMPTS_PER_QUAD {
        attempts += 1;
        let shape = Quad::new(random_shape(&mut rng));
        let (x0, y0, x1, y1) = shape.bounds();
        if x1 - x0 >= iw || y1 - y0 >= ih {
            continue;
        }
        let cx = rng.random_range(-x0..iw - x1);
        let cy = rng.random_range(-y0..ih - y1);
        let quad = Quad::new(shape.vertices.map(|p| Point::new(p.x + cx, p.y + cy)));
        let bounds = quad.bounds();
        if !is_simple_quad(&quad)
            || ConvexPolygon::try_new(quad.vertices.to_vec()).is_none()
            || boxes.iter().any(|b| overlaps(*b, bounds))
        {
            continue;
        }
        boxes.push(bounds);
        quads.push(canonical_clockwise(&quad));
    }
    SceneGt {
        index,
        image_w: cfg.image_w,
        image_h: cfg.image_h,
        quads,
    }
}

fn normalized(mut v: Vec<f64>) -> Vec<f64> {
    let sum: f64 = v.iter().sum();
    v.iter_mut().for_each(|p| *p /= sum);
    v
}

fn noisy(base: impl Iterator<Item = f64>, noise: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    normalized(base.map(|p| p + noise * rng.random::<f64>()).collect())
}

fn bump(center: usize, bins: usize, cfg: &SimConfig, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let two_var = 2.0 * cfg.heat_sigma * cfg.heat_sigma;
    let base = (0..bins).map(|j| {
        let d = j as f64 - center as f64;
        (-d * d / two_var).exp()
    });
    noisy(base, cfg.noise_sigma, rng)
}

fn flat(len: usize, cfg: &SimConfig, rng: &mut ChaCha8Rng) -> Vec<f64> {
    noisy(std::iter::repeat_n(1.0, len), cfg.noise_sigma, rng)
}

fn array24(v: Vec<f64>) -> [f64; NUM_MATCH_TYPES] {
    v.try_into().expect("24 match scores")
}

fn jittered_roi(quad: &Quad, jitter: f64, rng: &mut ChaCha8Rng) -> Result<Roi, Error> {
    let (x0, y0, x1, y1) = quad.bounds();
    let (w, h) = ((x1 - x0).max(1.0), (y1 - y0).max(1.0));
    let mut side = |extent: f64| {
        if jitter > 0.0 {
            rng.random_range(0.0..jitter) * extent
        } else {
            0.0
        }
    };
    let (ex0, ey0, ex1, ey1) = (side(w), side(h), side(w), side(h));
    let mut shift = |extent: f64| {
        if jitter > 0.0 {
            rng.random_range(-jitter..jitter) * extent
        } else {
            0.0
        }
    };
    let (dx, dy) = (shift(w), shift(h));
    Ok(Roi::new(x0 - ex0 + dx, y0 - ey0 + dy, x1 + ex1 + dx, y1 + ey1 + dy)?)
}

/// Raw detections for a scene: one per ground-truth quad, followed by the
/// injected false positives.
pub fn render_detector_output(scene: &SceneGt, cfg: &SimConfig, bins: usize) -> Result<Vec<RawDetection>, Error> {
    cfg.validate()?;
    let mut rng = cfg.rng(2 * scene.index + 1);
    let mut out = Vec::with_capacity(scene.quads.len() + cfg.n_false_positives());

    for quad in &scene.quads {
        let roi = jittered_roi(quad, cfg.roi_jitter, &mut rng)?;
        let kt = encode(quad, &roi, bins)?;
        let x = kt.x_bins.map(|b| bump(b, bins, cfg, &mut rng));
        let y = kt.y_bins.map(|b| bump(b, bins, cfg, &mut rng));
        let truth = kt.match_type.index();
        let ms = noisy(
            (0..NUM_MATCH_TYPES).map(|i| if i == truth { 1.0 } else { 0.0 }),
            cfg.noise_sigma,
            &mut rng,
        );
        let dists = KeDistributions::new(x, y, array24(ms))?;
        let s_box = rng.random_range(0.8..1.0);
        out.push(RawDetection { roi, dists, s_box });
    }

    let (iw, ih) = (scene.image_w as f64, scene.image_h as f64);
    for _ in 0..cfg.n_false_positives() {
        let h = rng.random_range(MIN_TEXT_HEIGHT..MAX_TEXT_HEIGHT).min(ih);
        let w = (h * rng.random_range(1.0..MAX_ASPECT)).min(iw);
        let x0 = rng.random_range(0.0..=iw - w);
        let y0 = rng.random_range(0.0..=ih - h);
        let roi = Roi::new(x0, y0, x0 + w, y0 + h)?;
        let x = [(); 4].map(|_| flat(bins, cfg, &mut rng));
        let y = [(); 4].map(|_| flat(bins, cfg, &mut rng));
        let ms = flat(NUM_MATCH_TYPES, cfg, &mut rng);
        let dists = KeDistributions::new(x, y, array24(ms))?;
        let s_box = rng.random_range(0.8..1.0);
        out.push(RawDetection { roi, dists, s_box });
    }
    Ok(out)
}

/// Metrics of a whole simulated run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationSummary {
    pub seed: u64,
    pub n_scenes: usize,
    pub n_raw: usize,
    pub n_injected_fp: usize,
    #[serde(flatten)]
    pub metrics: EvalReport,
}

/// Generates, renders, post-processes and evaluates every scene.
pub fn simulate(cfg: &SimConfig, pipeline: &PipelineConfig) -> Result<SimulationSummary, Error> {
    cfg.validate()?;
    pipeline.validate()?;
    let mut per_image = Vec::with_capacity(cfg.n_scenes);
    let mut n_raw = 0;
    for index in 0..cfg.n_scenes as u64 {
        let scene = gen_scene(cfg, index);
        let raw = render_detector_output(&scene, cfg, pipeline.bins)?;
        n_raw += raw.len();
        let dets = postprocess(&raw, pipeline)?;
        per_image.push(evaluate_image(
            &format!("scene_{index}"),
            &scene.ground_truth(),
            &dets,
            pipeline.iou_threshold,
        ));
    }
    Ok(SimulationSummary {
        seed: cfg.seed,
        n_scenes: cfg.n_scenes,
        n_raw,
        n_injected_fp: cfg.n_false_positives() * cfg.n_scenes,
        metrics: EvalReport::from_images(per_image),
    })
}
