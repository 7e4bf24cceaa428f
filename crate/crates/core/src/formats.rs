//! File formats.
//!
//! Ground truth and detections use the ICDAR text layout, one box per line:
//!
//! ```text
//! x1,y1,x2,y2,x3,y3,x4,y4,transcription      (ground truth, "###" = don't care)
//! x1,y1,x2,y2,x3,y3,x4,y4,score              (detections)
//! ```
//!
//! Key-edge targets and decoded boxes are exchanged as versioned JSON.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::codec::{KeTargets, Roi};
use crate::error::FormatError;
use crate::evaluation::{GroundTruth, ScoredQuad};
use crate::geometry::Quad;

pub const DONT_CARE: &str = "###";
pub const TARGETS_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct IcdarRecord {
    pub quad: Quad,
    /// Ground-truth text; `None` for detection records.
    pub transcription: Option<String>,
    /// Detection confidence; `None` for ground-truth records.
    pub score: Option<f64>,
    pub dont_care: bool,
}

impl IcdarRecord {
    pub fn ground_truth(&self) -> GroundTruth {
        GroundTruth { quad: self.quad, dont_care: self.dont_care }
    }

    pub fn scored(&self) -> ScoredQuad {
        ScoredQuad { quad: self.quad, score: self.score.unwrap_or(1.0) }
    }
}

fn read(path: &Path) -> Result<String, FormatError> {
    fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<(), FormatError> {
    fs::write(path, text).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })
}

// Splits off eight coordinates; the remainder (which may itself contain
// commas) is returned untouched.
fn split_coords<'a>(line: &'a str, src: &str, lineno: usize) -> Result<(Quad, Option<&'a str>), FormatError> {
    let err = |msg: String| FormatError::Parse { path: src.to_string(), line: lineno, msg };
    let mut parts = line.splitn(9, ',');
    let mut c = [0.0; 8];
    for (i, slot) in c.iter_mut().enumerate() {
        let field = parts
            .next()
            .ok_or_else(|| err(format!("expected 8 coordinates, found {i}")))?
            .trim();
        *slot = field
            .parse()
            .map_err(|_| err(format!("coordinate {} is not a number: {field:?}", i + 1)))?;
    }
    let quad = Quad::from_coords(c).map_err(|e| err(e.to_string()))?;
    Ok((quad, parts.next()))
}

fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.trim_start_matches('\u{feff}')
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty())
}

pub fn parse_gt_str(text: &str, src: &str) -> Result<Vec<IcdarRecord>, FormatError> {
    lines(text)
        .map(|(n, line)| {
            let (quad, rest) = split_coords(line, src, n)?;
            let transcription = rest.unwrap_or("").to_string();
            Ok(IcdarRecord {
                quad,
                dont_care: transcription == DONT_CARE,
                transcription: Some(transcription),
                score: None,
            })
        })
        .collect()
}

/// Detection lines carry a score in `[0, 1]` after the coordinates; a line
/// with coordinates only gets score 1.
pub fn parse_det_str(text: &str, src: &str) -> Result<Vec<IcdarRecord>, FormatError> {
    lines(text)
        .map(|(n, line)| {
            let (quad, rest) = split_coords(line, src, n)?;
            let score = match rest.map(str::trim) {
                None | Some("") => 1.0,
                Some(s) => s.parse::<f64>().map_err(|_| FormatError::Parse {
                    path: src.to_string(),
                    line: n,
                    msg: format!("score is not a number: {s:?}"),
                })?,
            };
            if !(0.0..=1.0).contains(&score) {
                return Err(FormatError::Parse {
                    path: src.to_string(),
                    line: n,
                    msg: format!("score {score} outside [0, 1]"),
                });
            }
            Ok(IcdarRecord { quad, transcription: None, score: Some(score), dont_care: false })
        })
        .collect()
}

pub fn parse_gt_file(path: &Path) -> Result<Vec<IcdarRecord>, FormatError> {
    parse_gt_str(&read(path)?, &path.display().to_string())
}

pub fn parse_det_file(path: &Path) -> Result<Vec<IcdarRecord>, FormatError> {
    parse_det_str(&read(path)?, &path.display().to_string())
}

fn coords_line(q: &Quad) -> String {
    q.coords().iter().map(|v| format!("{v:.2}")).collect::<Vec<_>>().join(",")
}

/// Coordinates with two decimals, score in shortest round-trip form.
pub fn format_det(dets: &[ScoredQuad]) -> String {
    dets.iter()
        .map(|d| format!("{},{}\n", coords_line(&d.quad), d.score))
        .collect()
}

pub fn write_det_file(path: &Path, dets: &[ScoredQuad]) -> Result<(), FormatError> {
    write(path, &format_det(dets))
}

pub fn format_gt(gts: &[(Quad, &str)]) -> String {
    gts.iter()
        .map(|(q, t)| format!("{},{}\n", coords_line(q), t))
        .collect()
}

/// Image id of an ICDAR file name: extension and any `gt_`/`res_` prefix
/// removed, so `gt_img_7.txt` and `res_img_7.txt` both map to `img_7`.
pub fn image_id(path: &Path) -> String {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    for prefix in ["gt_", "res_"] {
        if let Some(rest) = stem.strip_prefix(prefix) {
            return rest.to_string();
        }
    }
    stem
}

/// `.txt` files in `dir` keyed by image id. A plain file is returned as the
/// only entry.
pub fn list_images(dir: &Path) -> Result<BTreeMap<String, PathBuf>, FormatError> {
    let io = |source| FormatError::Io { path: dir.display().to_string(), source };
    if dir.is_file() {
        return Ok(BTreeMap::from([(image_id(dir), dir.to_path_buf())]));
    }
    let mut out = BTreeMap::new();
    for entry in fs::read_dir(dir).map_err(io)? {
        let path = entry.map_err(io)?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == "txt") {
            let id = image_id(&path);
            if let Some(prev) = out.insert(id.clone(), path.clone()) {
                return Err(FormatError::Invalid {
                    path: dir.display().to_string(),
                    msg: format!("{} and {} both map to image {id:?}", prev.display(), path.display()),
                });
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum RoiMode {
    /// Bounding rectangle of each box.
    Tight,
    /// The whole image.
    Image,
}

/// One encoded box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetEntry {
    pub roi: Roi,
    #[serde(flatten)]
    pub targets: KeTargets,
    /// The box that was encoded, for error reporting after decoding.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<[f64; 8]>,
    #[serde(default)]
    pub dont_care: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetImage {
    pub image: String,
    pub boxes: Vec<TargetEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetsFile {
    pub schema_version: u32,
    pub bins: usize,
    pub roi_mode: RoiMode,
    pub images: Vec<TargetImage>,
}

impl TargetsFile {
    pub fn read(path: &Path) -> Result<Self, FormatError> {
        let text = read(path)?;
        let file: TargetsFile = serde_json::from_str(&text).map_err(|e| FormatError::Invalid {
            path: path.display().to_string(),
            msg: e.to_string(),
        })?;
        if file.schema_version != TARGETS_SCHEMA_VERSION {
            return Err(FormatError::Invalid {
                path: path.display().to_string(),
                msg: format!("unsupported schema_version {}", file.schema_version),
            });
        }
        Ok(file)
    }
}
