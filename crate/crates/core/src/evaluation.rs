//! ICDAR-style detection scoring: one-to-one IoU matching and
//! precision/recall/Hmean.

use serde::{Deserialize, Serialize};

use crate::geometry::{polygon_iou, Quad};
use crate::suppression::Detection;

pub const DEFAULT_IOU_THRESHOLD: f64 = 0.5;

/// Version tag carried by every JSON metric report.
pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Anything with a polygon and a ranking score.
pub trait Scored {
    fn quad(&self) -> &Quad;
    fn score(&self) -> f64;
}

impl Scored for Detection {
    fn quad(&self) -> &Quad {
        &self.quad
    }
    fn score(&self) -> f64 {
        self.score
    }
}

/// A bare scored polygon, e.g. one line of a detection file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoredQuad {
    pub quad: Quad,
    pub score: f64,
}

impl Scored for ScoredQuad {
    fn quad(&self) -> &Quad {
        &self.quad
    }
    fn score(&self) -> f64 {
        self.score
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub quad: Quad,
    /// Unreadable region ("###"): neither counted nor penalized.
    pub dont_care: bool,
}

impl GroundTruth {
    pub fn care(quad: Quad) -> Self {
        Self { quad, dont_care: false }
    }
}

// Non-simple polygons have no defined overlap and count as disjoint.
fn iou_or_zero(a: &Quad, b: &Quad) -> f64 {
    polygon_iou(a, b).unwrap_or(0.0)
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Matching {
    /// `(detection index, gt index, iou)` in matching order.
    pub pairs: Vec<(usize, usize, f64)>,
    pub unmatched_dets: Vec<usize>,
    pub unmatched_gts: Vec<usize>,
}

/// Greedy one-to-one matching. Detections are visited by descending score
/// (ties in input order); each takes the still unmatched ground truth with
/// the highest IoU, provided it reaches `iou_thresh`.
pub fn match_detections<D: Scored>(gts: &[Quad], dets: &[D], iou_thresh: f64) -> Matching {
    let mut order: Vec<usize> = (0..dets.len()).collect();
    order.sort_by(|&a, &b| dets[b].score().total_cmp(&dets[a].score()));

    let mut gt_taken = vec![false; gts.len()];
    let mut m = Matching::default();
    for di in order {
        let best = gts
            .iter()
            .enumerate()
            .filter(|(gi, _)| !gt_taken[*gi])
            .map(|(gi, g)| (gi, iou_or_zero(dets[di].quad(), g)))
            .fold(None, |best: Option<(usize, f64)>, (gi, iou)| match best {
                Some((_, b)) if b >= iou => best,
                _ => Some((gi, iou)),
            });
        match best {
            Some((gi, iou)) if iou >= iou_thresh => {
                gt_taken[gi] = true;
                m.pairs.push((di, gi, iou));
            }
            _ => m.unmatched_dets.push(di),
        }
    }
    m.unmatched_gts = (0..gts.len()).filter(|&g| !gt_taken[g]).collect();
    m
}

/// Precision, recall and their harmonic mean; each is 0 when undefined.
pub fn hmean(tp: usize, n_det: usize, n_gt: usize) -> (f64, f64, f64) {
    let p = if n_det == 0 { 0.0 } else { tp as f64 / n_det as f64 };
    let r = if n_gt == 0 { 0.0 } else { tp as f64 / n_gt as f64 };
    (p, r, harmonic_mean(p, r))
}

/// `2 p r / (p + r)`, or 0 when both are 0.
pub fn harmonic_mean(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImageResult {
    pub image: String,
    pub tp: usize,
    pub n_det: usize,
    pub n_gt: usize,
}

/// Scores one image. Don't-care ground truths are dropped from the
/// denominator, and so is any detection overlapping one of them at
/// `iou_thresh` or more.
pub fn evaluate_image<D: Scored>(image: &str, gts: &[GroundTruth], dets: &[D], iou_thresh: f64) -> ImageResult {
    let care: Vec<Quad> = gts.iter().filter(|g| !g.dont_care).map(|g| g.quad).collect();
    let ignored: Vec<&Quad> = gts.iter().filter(|g| g.dont_care).map(|g| &g.quad).collect();
    let counted: Vec<&D> = dets
        .iter()
        .filter(|d| !ignored.iter().any(|g| iou_or_zero(d.quad(), g) >= iou_thresh))
        .collect();
    let m = match_detections(&care, &counted, iou_thresh);
    ImageResult {
        image: image.to_string(),
        tp: m.pairs.len(),
        n_det: counted.len(),
        n_gt: care.len(),
    }
}

impl<D: Scored> Scored for &D {
    fn quad(&self) -> &Quad {
        (**self).quad()
    }
    fn score(&self) -> f64 {
        (**self).score()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub schema_version: u32,
    pub precision: f64,
    pub recall: f64,
    pub hmean: f64,
    pub n_gt: usize,
    pub n_det: usize,
    pub tp: usize,
    pub per_image: Vec<ImageResult>,
}

impl EvalReport {
    /// Sums counts over images and derives the aggregate metrics.
    pub fn from_images(per_image: Vec<ImageResult>) -> Self {
        let (tp, n_det, n_gt) = per_image
            .iter()
            .fold((0, 0, 0), |(t, d, g), r| (t + r.tp, d + r.n_det, g + r.n_gt));
        let (precision, recall, hmean) = hmean(tp, n_det, n_gt);
        Self {
            schema_version: REPORT_SCHEMA_VERSION,
            precision,
            recall,
            hmean,
            n_gt,
            n_det,
            tp,
            per_image,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sq(x: f64, y: f64, s: f64) -> Quad {
        Quad::from_coords([x, y, x + s, y, x + s, y + s, x, y + s]).unwrap()
    }

    fn sd(quad: Quad, score: f64) -> ScoredQuad {
        ScoredQuad { quad, score }
    }

    #[test]
    fn single_match_above_threshold() {
        // 10x10 vs shifted by 2.5: IoU = 75 / 125 = 0.6
        let gt = sq(0., 0., 10.);
        let det = sd(sq(2.5, 0., 10.), 0.9);
        let m = match_detections(&[gt], &[det], 0.5);
        assert_eq!(m.pairs.len(), 1);
        assert!((m.pairs[0].2 - 0.6).abs() < 1e-12);
        let m = match_detections(&[gt], &[det], 0.7);
        assert!(m.pairs.is_empty());
        assert_eq!(m.unmatched_gts, vec![0]);
    }

    #[test]
    fn duplicates_count_once() {
        let gt = sq(0., 0., 10.);
        let dets = [sd(gt, 0.9), sd(gt, 0.8)];
        let r = evaluate_image("a", &[GroundTruth::care(gt)], &dets, 0.5);
        assert_eq!((r.tp, r.n_det, r.n_gt), (1, 2, 1));
    }

    #[test]
    fn higher_score_picks_best_iou() {
        let g0 = sq(0., 0., 10.);
        let g1 = sq(3., 0., 10.);
        // det overlaps g1 more than g0
        let d = sd(sq(2., 0., 10.), 0.9);
        let m = match_detections(&[g0, g1], &[d], 0.5);
        assert_eq!(m.pairs[0].1, 1);
    }

    #[test]
    fn dont_care_excluded() {
        let gts = [GroundTruth::care(sq(0., 0., 10.)), GroundTruth { quad: sq(100., 0., 10.), dont_care: true }];
        let dets = [sd(sq(0., 0., 10.), 0.9), sd(sq(100., 0., 10.), 0.9), sd(sq(500., 0., 10.), 0.1)];
        let r = evaluate_image("x", &gts, &dets, 0.5);
        assert_eq!((r.tp, r.n_det, r.n_gt), (1, 2, 1));
    }

    #[test]
    fn hmean_cases() {
        assert_eq!(hmean(0, 0, 0), (0.0, 0.0, 0.0));
        assert_eq!(hmean(0, 5, 3), (0.0, 0.0, 0.0));
        let (p, r, h) = hmean(3, 4, 6);
        assert_eq!((p, r), (0.75, 0.5));
        assert!((h - 0.6).abs() < 1e-12);
        assert!((harmonic_mean(0.7, 0.7) - 0.7).abs() < 1e-15);
        assert!((harmonic_mean(0.894, 0.838) - 0.8651).abs() < 5e-5);
        assert!((harmonic_mean(0.896, 0.805) - 0.848).abs() < 5e-4);
    }

    #[test]
    fn report_aggregates() {
        let rep = EvalReport::from_images(vec![
            ImageResult { image: "a".into(), tp: 1, n_det: 2, n_gt: 1 },
            ImageResult { image: "b".into(), tp: 1, n_det: 1, n_gt: 3 },
        ]);
        assert_eq!((rep.tp, rep.n_det, rep.n_gt), (2, 3, 4));
        assert!((rep.precision - 2.0 / 3.0).abs() < 1e-12);
        assert!((rep.recall - 0.5).abs() < 1e-12);
        assert_eq!(rep.schema_version, REPORT_SCHEMA_VERSION);
    }
}
