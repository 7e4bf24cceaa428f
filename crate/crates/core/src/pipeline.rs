//! Raw head output to scored, suppressed and evaluated detections.
//!
//! Every raw detection is decoded, put into clockwise boundary order and
//! given its key-edge confidence. The remaining stages run in the configured
//! order; the default is validity, rescore, score cutoff, PNMS, OKS-NMS.

use serde::{Deserialize, Serialize};

use crate::codec::{canonical_clockwise, decode, KeDistributions, Roi, DEFAULT_BINS};
use crate::error::Error;
use crate::evaluation::{evaluate_image, EvalReport, GroundTruth, DEFAULT_IOU_THRESHOLD};
use crate::scoring::{rescore, s_sbd, RescoreParams};
use crate::suppression::{
    oks_nms, pnms, validity_filter, Detection, OksParams, DEFAULT_PNMS_THRESHOLD,
};

/// What a key-edge detector head emits for one proposal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawDetection {
    pub roi: Roi,
    pub dists: KeDistributions,
    pub s_box: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Validity,
    Rescore,
    ScoreCutoff,
    Pnms,
    OksNms,
}

impl Stage {
    pub const DEFAULT_ORDER: [Stage; 5] = [
        Stage::Validity,
        Stage::Rescore,
        Stage::ScoreCutoff,
        Stage::Pnms,
        Stage::OksNms,
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub bins: usize,
    pub rescore: RescoreParams,
    /// Detections scoring below this after rescoring are dropped.
    pub score_cutoff: f64,
    pub pnms_threshold: f64,
    pub oks: OksParams,
    pub iou_threshold: f64,
    pub stages: Vec<Stage>,
}

pub const DEFAULT_SCORE_CUTOFF: f64 = 0.5;

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            bins: DEFAULT_BINS,
            rescore: RescoreParams::default(),
            score_cutoff: DEFAULT_SCORE_CUTOFF,
            pnms_threshold: DEFAULT_PNMS_THRESHOLD,
            oks: OksParams::default(),
            iou_threshold: DEFAULT_IOU_THRESHOLD,
            stages: Stage::DEFAULT_ORDER.to_vec(),
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<(), Error> {
        if self.bins < 2 {
            return Err(Error::Config(format!("bins must be at least 2, got {}", self.bins)));
        }
        RescoreParams::new(self.rescore.gamma, self.rescore.window)?;
        if self.rescore.window > self.bins {
            return Err(Error::Config(format!(
                "window {} exceeds bin count {}",
                self.rescore.window, self.bins
            )));
        }
        OksParams::new(self.oks.threshold)?;
        let unit = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must lie in [0, 1], got {v}")))
            }
        };
        unit("score_cutoff", self.score_cutoff)?;
        unit("pnms_threshold", self.pnms_threshold)?;
        unit("iou_threshold", self.iou_threshold)?;
        if self.iou_threshold == 0.0 {
            return Err(Error::Config("iou_threshold must be positive".into()));
        }
        Ok(())
    }
}

/// Decodes one raw detection. The score starts out as the box score.
pub fn decode_raw(raw: &RawDetection, window: usize) -> Result<Detection, Error> {
    let (quad, match_type) = decode(&raw.dists, &raw.roi)?;
    Ok(Detection {
        quad: canonical_clockwise(&quad),
        s_box: raw.s_box,
        s_sbd: s_sbd(&raw.dists, window)?,
        score: raw.s_box,
        roi: raw.roi,
        match_type,
    })
}

/// Runs decoding and every configured stage, returning surviving detections.
pub fn postprocess(raw: &[RawDetection], cfg: &PipelineConfig) -> Result<Vec<Detection>, Error> {
    cfg.validate()?;
    let mut dets = raw
        .iter()
        .map(|r| {
            if r.dists.bins() != cfg.bins {
                return Err(Error::Config(format!(
                    "distribution has {} bins, pipeline expects {}",
                    r.dists.bins(),
                    cfg.bins
                )));
            }
            decode_raw(r, cfg.rescore.window)
        })
        .collect::<Result<Vec<_>, _>>()?;

    for stage in &cfg.stages {
        dets = match stage {
            Stage::Validity => validity_filter(dets).0,
            Stage::Rescore => dets
                .into_iter()
                .map(|mut d| {
                    d.score = rescore(d.s_box, d.s_sbd, cfg.rescore.gamma)?;
                    Ok(d)
                })
                .collect::<Result<_, Error>>()?,
            Stage::ScoreCutoff => dets.into_iter().filter(|d| d.score >= cfg.score_cutoff).collect(),
            Stage::Pnms => pnms(&dets, cfg.pnms_threshold),
            Stage::OksNms => oks_nms(&dets, &cfg.oks),
        };
    }
    Ok(dets)
}

/// Post-processes one image and scores it against its ground truth.
pub fn run_pipeline(
    image: &str,
    raw: &[RawDetection],
    gts: &[GroundTruth],
    cfg: &PipelineConfig,
) -> Result<(Vec<Detection>, EvalReport), Error> {
    let dets = postprocess(raw, cfg)?;
    let result = evaluate_image(image, gts, &dets, cfg.iou_threshold);
    Ok((dets, EvalReport::from_images(vec![result])))
}
