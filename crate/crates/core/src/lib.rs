//! Sequential-free box discretization for quadrilateral detection.
//!
//! A quadrilateral box is encoded as eight key edges (sorted x and y values,
//! each quantized as a classification target inside the RoI) plus a match
//! type pairing them back into vertices. The encoding does not depend on
//! vertex annotation order. Around the codec sit the post-processing and
//! evaluation pieces a detector built on it needs:
//!
//! - [`geometry`]: areas, segment intersection, simplicity, polygon IoU.
//! - [`codec`]: encode/decode between quads and key-edge targets or scores.
//! - [`scoring`]: key-edge confidence and the rescoring blend.
//! - [`suppression`]: validity filter, polygon NMS, OKS-NMS.
//! - [`evaluation`]: ICDAR-style matching and precision/recall/Hmean.
//! - [`pipeline`]: decode, rescore, suppress, evaluate.
//! - [`simulator`]: seeded synthetic detector output for end-to-end runs.
//! - [`formats`] and [`cli`]: file formats and the `sbd` command.

pub mod cli;
pub mod codec;
pub mod error;
pub mod evaluation;
pub mod formats;
pub mod geometry;
pub mod pipeline;
pub mod scoring;
pub mod simulator;
pub mod suppression;

pub use codec::{
    canonical_clockwise, compute_match_type, decode, decode_bins, encode, half_transform,
    reconstruct_quad, sort_key_edges, KeDistributions, KeTargets, MatchType, Roi, SortedCoords,
};
pub use error::Error;
pub use evaluation::{hmean, match_detections, EvalReport, GroundTruth, ScoredQuad};
pub use geometry::{is_simple_quad, polygon_area, polygon_intersection_area, polygon_iou, Point, Quad};
pub use pipeline::{run_pipeline, PipelineConfig, RawDetection, Stage};
pub use scoring::{rescore, s_sbd, windowed_max_sum, RescoreParams};
pub use simulator::{gen_scene, render_detector_output, simulate, SceneGt, SimConfig};
pub use suppression::{oks, oks_nms, pnms, validity_filter, Detection, OksParams};
