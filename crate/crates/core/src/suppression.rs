//! Post-processing of decoded detections: validity filtering, polygon NMS
//! and keypoint-similarity NMS.

use serde::{Deserialize, Serialize};

use crate::codec::{x_rank_order, MatchType, Roi};
use crate::error::SuppressionError;
use crate::geometry::{is_simple_quad, polygon_area, polygon_iou, Quad};

pub const DEFAULT_PNMS_THRESHOLD: f64 = 0.2;
pub const DEFAULT_OKS_THRESHOLD: f64 = 0.9;

/// A decoded box with its scores and provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub quad: Quad,
    pub s_box: f64,
    pub s_sbd: f64,
    /// Ranking score; equals `s_box` until rescored.
    pub score: f64,
    pub roi: Roi,
    pub match_type: MatchType,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScaleMode {
    /// Object scale is the square root of the reference polygon's area.
    #[default]
    SqrtArea,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OksParams {
    pub scale_mode: ScaleMode,
    pub threshold: f64,
}

impl Default for OksParams {
    fn default() -> Self {
        Self {
            scale_mode: ScaleMode::SqrtArea,
            threshold: DEFAULT_OKS_THRESHOLD,
        }
    }
}

impl OksParams {
    pub fn new(threshold: f64) -> Result<Self, SuppressionError> {
        if !(0.0..=1.0).contains(&threshold) {
            return Err(SuppressionError::Threshold(threshold));
        }
        Ok(Self {
            scale_mode: ScaleMode::SqrtArea,
            threshold,
        })
    }
}

/// Splits detections into those whose quad is a valid simple polygon with
/// positive area and those that are not. Input order is preserved in both.
pub fn validity_filter(dets: Vec<Detection>) -> (Vec<Detection>, Vec<Detection>) {
    dets.into_iter().partition(|d| is_simple_quad(&d.quad))
}

/// Indices ordered by descending score; equal scores keep input order.
fn score_order(dets: &[Detection]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..dets.len()).collect();
    order.sort_by(|&a, &b| dets[b].score.total_cmp(&dets[a].score));
    order
}

fn greedy<F>(dets: &[Detection], suppresses: F) -> Vec<Detection>
where
    F: Fn(&Detection, &Detection) -> bool,
{
    let order = score_order(dets);
    let mut removed = vec![false; dets.len()];
    let mut keep = Vec::new();
    for (pos, &i) in order.iter().enumerate() {
        if removed[i] {
            continue;
        }
        keep.push(dets[i].clone());
        for &j in &order[pos + 1..] {
            if !removed[j] && suppresses(&dets[i], &dets[j]) {
                removed[j] = true;
            }
        }
    }
    keep
}

/// Greedy polygon NMS. A detection is dropped when its IoU with an already
/// kept, higher-scored detection exceeds `threshold`. Pairs involving a
/// non-simple quad have no defined IoU and never suppress each other.
pub fn pnms(dets: &[Detection], threshold: f64) -> Vec<Detection> {
    greedy(dets, |kept, other| {
        polygon_iou(&kept.quad, &other.quad).is_ok_and(|iou| iou > threshold)
    })
}

/// Keypoint similarity between two decoded boxes.
///
/// Keypoints are the four vertices paired by x-rank. Every keypoint is
/// visible and weighted equally, and the scale is taken from `reference`,
/// so `s^2` is the reference polygon's area:
/// `mean_i exp(-d_i^2 / (2 s^2))`.
pub fn oks(reference: &Detection, other: &Detection, params: &OksParams) -> Result<f64, SuppressionError> {
    let scale_sq = match params.scale_mode {
        ScaleMode::SqrtArea => polygon_area(&reference.quad),
    };
    if scale_sq.is_nan() || scale_sq <= 0.0 {
        return Err(SuppressionError::ZeroScale);
    }
    let ra = x_rank_order(&reference.quad);
    let rb = x_rank_order(&other.quad);
    let sum: f64 = ra
        .iter()
        .zip(rb.iter())
        .map(|(&i, &j)| {
            let d = reference.quad.vertices[i].distance(other.quad.vertices[j]);
            (-d * d / (2.0 * scale_sq)).exp()
        })
        .sum();
    Ok(sum / 4.0)
}

/// Greedy NMS on keypoint similarity; suppresses box-in-box duplicates that
/// polygon IoU can miss. A kept detection with zero area suppresses nothing.
pub fn oks_nms(dets: &[Detection], params: &OksParams) -> Vec<Detection> {
    greedy(dets, |kept, other| {
        oks(kept, other, params).is_ok_and(|s| s > params.threshold)
    })
}
