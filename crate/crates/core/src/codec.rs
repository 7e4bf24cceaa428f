//! Sequential-free key-edge codec.
//!
//! A quadrilateral is described by its four sorted x values and four sorted y
//! values (the key edges) plus a match type saying which sorted y belongs to
//! which sorted x. None of this depends on the order in which the vertices
//! were annotated.
//!
//! Each key edge is not learned directly. The target is the half point
//! `(t + t_mean) / 2` between the edge and the box's mean coordinate,
//! quantized into one of `M` uniform bins spanning the RoI. Because the half
//! point lies closer to the centre, it usually stays inside the RoI even when
//! the border itself does not, and decoding recovers the border outside.
//!
//! Decoding needs no side channel: the mean of the four half points equals
//! `t_mean`, so `t = 2 h - mean(h)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::CodecError;
use crate::geometry::{Point, Quad};

/// Bin count used throughout unless configured otherwise.
pub const DEFAULT_BINS: usize = 56;

/// Number of key edges per box: four along x and four along y.
pub const NUM_KEY_EDGES: usize = 8;

/// Number of distinct match types (4!).
pub const NUM_MATCH_TYPES: usize = 24;

/// Axis-aligned proposal rectangle that frames the codec.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 4]", into = "[f64; 4]")]
pub struct Roi {
    x0: f64,
    y0: f64,
    x1: f64,
    y1: f64,
}

impl Roi {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Self, CodecError> {
        let ok = [x0, y0, x1, y1].iter().all(|v| v.is_finite()) && x0 < x1 && y0 < y1;
        if !ok {
            return Err(CodecError::InvalidRoi { x0, y0, x1, y1 });
        }
        Ok(Self { x0, y0, x1, y1 })
    }

    /// Tight bounding rectangle of a quad. Zero extents are padded by one
    /// pixel on each side so the RoI stays valid.
    pub fn bounding(quad: &Quad) -> Result<Self, CodecError> {
        if !quad.is_finite() {
            return Err(CodecError::NonFinite);
        }
        let (mut x0, mut y0, mut x1, mut y1) = quad.bounds();
        if x1 <= x0 {
            x0 -= 1.0;
            x1 += 1.0;
        }
        if y1 <= y0 {
            y0 -= 1.0;
            y1 += 1.0;
        }
        Self::new(x0, y0, x1, y1)
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }
    pub fn y0(&self) -> f64 {
        self.y0
    }
    pub fn x1(&self) -> f64 {
        self.x1
    }
    pub fn y1(&self) -> f64 {
        self.y1
    }
    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }
    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.x0 && p.x <= self.x1 && p.y >= self.y0 && p.y <= self.y1
    }

    /// Bin widths `(w_x, w_y)` for `bins` bins per axis.
    pub fn bin_widths(&self, bins: usize) -> (f64, f64) {
        (self.width() / bins as f64, self.height() / bins as f64)
    }

    fn axis(&self, axis: Axis) -> (f64, f64) {
        match axis {
            Axis::X => (self.x0, self.x1),
            Axis::Y => (self.y0, self.y1),
        }
    }
}

impl TryFrom<[f64; 4]> for Roi {
    type Error = CodecError;
    fn try_from(v: [f64; 4]) -> Result<Self, Self::Error> {
        Roi::new(v[0], v[1], v[2], v[3])
    }
}

impl From<Roi> for [f64; 4] {
    fn from(r: Roi) -> Self {
        [r.x0, r.y0, r.x1, r.y1]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Axis {
    X,
    Y,
}

/// The eight key edges of a box: sorted x values, sorted y values, and the
/// per-axis means.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SortedCoords {
    pub xs: [f64; 4],
    pub ys: [f64; 4],
    pub x_mean: f64,
    pub y_mean: f64,
}

impl SortedCoords {
    /// Builds from already sorted values; means are computed here.
    pub fn new(xs: [f64; 4], ys: [f64; 4]) -> Self {
        Self {
            xs,
            ys,
            x_mean: mean4(&xs),
            y_mean: mean4(&ys),
        }
    }
}

#[inline]
fn mean4(v: &[f64; 4]) -> f64 {
    (v[0] + v[1] + v[2] + v[3]) / 4.0
}

/// Vertex indices in x-rank order. Ties on x are broken by y, then by
/// vertex index, so coincident coordinates rank the same way whatever order
/// the vertices were listed in.
pub fn x_rank_order(quad: &Quad) -> [usize; 4] {
    rank_order(quad, Axis::X)
}

/// Vertex indices in y-rank order (ties broken by x, then vertex index).
pub fn y_rank_order(quad: &Quad) -> [usize; 4] {
    rank_order(quad, Axis::Y)
}

fn rank_order(quad: &Quad, axis: Axis) -> [usize; 4] {
    let v = &quad.vertices;
    let key = |i: usize| match axis {
        Axis::X => (v[i].x, v[i].y),
        Axis::Y => (v[i].y, v[i].x),
    };
    let mut idx = [0usize, 1, 2, 3];
    idx.sort_by(|&a, &b| {
        let (ka, kb) = (key(a), key(b));
        ka.0.total_cmp(&kb.0)
            .then(ka.1.total_cmp(&kb.1))
            .then(a.cmp(&b))
    });
    idx
}

pub fn sort_key_edges(quad: &Quad) -> SortedCoords {
    let v = &quad.vertices;
    let xo = x_rank_order(quad);
    let yo = y_rank_order(quad);
    SortedCoords::new(xo.map(|i| v[i].x), yo.map(|i| v[i].y))
}

/// Which sorted y is paired with each sorted x.
///
/// `perm()[i]` is the 1-based y-rank of the vertex with x-rank `i + 1`, so
/// `"2413"` pairs `(x_min, y_2)`, `(x_2, y_max)`, `(x_3, y_min)` and
/// `(x_max, y_3)`. Match types are indexed 0..24 in lexicographic order
/// (`1234` is 0, `4321` is 23).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MatchType {
    perm: [u8; 4],
}

const FACTORIALS: [usize; 4] = [6, 2, 1, 1];

impl MatchType {
    pub const IDENTITY: MatchType = MatchType { perm: [1, 2, 3, 4] };

    pub fn from_perm(perm: [u8; 4]) -> Result<Self, CodecError> {
        let mut seen = [false; 4];
        for &d in &perm {
            if !(1..=4).contains(&d) || seen[(d - 1) as usize] {
                return Err(CodecError::InvalidPermutation(perm));
            }
            seen[(d - 1) as usize] = true;
        }
        Ok(Self { perm })
    }

    /// Inverse of [`MatchType::index`] (Lehmer code decoding).
    pub fn from_index(index: usize) -> Result<Self, CodecError> {
        if index >= NUM_MATCH_TYPES {
            return Err(CodecError::MatchIndex(index));
        }
        let mut pool: Vec<u8> = vec![1, 2, 3, 4];
        let mut rest = index;
        let mut perm = [0u8; 4];
        for (slot, f) in perm.iter_mut().zip(FACTORIALS) {
            *slot = pool.remove(rest / f);
            rest %= f;
        }
        Ok(Self { perm })
    }

    pub fn perm(&self) -> [u8; 4] {
        self.perm
    }

    pub fn index(&self) -> usize {
        (0..4)
            .map(|i| {
                let smaller_after = self.perm[i + 1..].iter().filter(|&&d| d < self.perm[i]).count();
                smaller_after * FACTORIALS[i]
            })
            .sum()
    }

    /// All 24 match types in index order.
    pub fn all() -> impl Iterator<Item = MatchType> {
        (0..NUM_MATCH_TYPES).map(|i| MatchType::from_index(i).expect("index in range"))
    }
}

impl Default for MatchType {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl fmt::Display for MatchType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in self.perm {
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl FromStr for MatchType {
    type Err = CodecError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bytes = s.as_bytes();
        if bytes.len() != 4 || !bytes.iter().all(u8::is_ascii_digit) {
            return Err(CodecError::MatchString(s.to_string()));
        }
        let perm = [0, 1, 2, 3].map(|i| bytes[i] - b'0');
        Self::from_perm(perm).map_err(|_| CodecError::MatchString(s.to_string()))
    }
}

impl Serialize for MatchType {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for MatchType {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub fn compute_match_type(quad: &Quad) -> MatchType {
    let xo = x_rank_order(quad);
    let yo = y_rank_order(quad);
    let mut y_rank = [0u8; 4];
    for (rank, &vertex) in yo.iter().enumerate() {
        y_rank[vertex] = rank as u8 + 1;
    }
    MatchType {
        perm: xo.map(|vertex| y_rank[vertex]),
    }
}

/// Pairs sorted coordinates according to the match type. Vertices come out
/// in x-rank order, which is generally *not* a boundary cycle; see
/// [`canonical_clockwise`].
pub fn reconstruct_quad(sc: &SortedCoords, mt: MatchType) -> Quad {
    let p = mt.perm();
    Quad::new([0, 1, 2, 3].map(|i| Point::new(sc.xs[i], sc.ys[(p[i] - 1) as usize])))
}

/// Moves a key edge halfway towards the box mean.
#[inline]
pub fn half_transform(t: f64, t_mean: f64) -> f64 {
    (t + t_mean) / 2.0
}

/// Inverse of [`half_transform`].
#[inline]
pub fn inverse_half_transform(h: f64, t_mean: f64) -> f64 {
    2.0 * h - t_mean
}

/// Classification targets for the eight key edges of one box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct KeTargets {
    pub x_bins: [usize; 4],
    pub y_bins: [usize; 4],
    /// Whether each half point fell inside the RoI before clamping, x edges
    /// first. Targets flagged `false` carry no training signal.
    pub in_roi: [bool; NUM_KEY_EDGES],
    pub match_type: MatchType,
    pub bins: usize,
    /// Zero extent along x or y. Still encoded.
    pub degenerate: bool,
}

impl KeTargets {
    pub fn all_in_roi(&self) -> bool {
        self.in_roi.iter().all(|&b| b)
    }
}

fn to_bin(h: f64, lo: f64, hi: f64, bins: usize) -> (usize, bool) {
    let w = (hi - lo) / bins as f64;
    let inside = h >= lo && h < hi;
    let raw = ((h - lo) / w).floor();
    let bin = if raw < 0.0 {
        0
    } else {
        (raw as usize).min(bins - 1)
    };
    (bin, inside)
}

#[inline]
fn bin_center(bin: usize, lo: f64, hi: f64, bins: usize) -> f64 {
    lo + (bin as f64 + 0.5) * (hi - lo) / bins as f64
}

/// Encodes a quad into key-edge bin targets relative to `roi`.
pub fn encode(quad: &Quad, roi: &Roi, bins: usize) -> Result<KeTargets, CodecError> {
    if bins < 2 {
        return Err(CodecError::BinCount(bins));
    }
    if !quad.is_finite() {
        return Err(CodecError::NonFinite);
    }
    let sc = sort_key_edges(quad);
    let mut in_roi = [false; NUM_KEY_EDGES];
    let mut encode_axis = |vals: &[f64; 4], mean: f64, axis: Axis, flag_offset: usize| {
        let (lo, hi) = roi.axis(axis);
        let mut out = [0usize; 4];
        for i in 0..4 {
            let (bin, inside) = to_bin(half_transform(vals[i], mean), lo, hi, bins);
            out[i] = bin;
            in_roi[flag_offset + i] = inside;
        }
        out
    };
    let x_bins = encode_axis(&sc.xs, sc.x_mean, Axis::X, 0);
    let y_bins = encode_axis(&sc.ys, sc.y_mean, Axis::Y, 4);
    Ok(KeTargets {
        x_bins,
        y_bins,
        in_roi,
        match_type: compute_match_type(quad),
        bins,
        degenerate: sc.xs[3] <= sc.xs[0] || sc.ys[3] <= sc.ys[0],
    })
}

fn decode_axis(bins_idx: &[usize; 4], lo: f64, hi: f64, bins: usize) -> [f64; 4] {
    let halves = bins_idx.map(|b| bin_center(b, lo, hi, bins));
    let mean = mean4(&halves);
    halves.map(|h| inverse_half_transform(h, mean))
}

/// Decodes bin indices back into a quad. Coordinates are not clamped to the
/// RoI.
pub fn decode_bins(kt: &KeTargets, roi: &Roi) -> Result<Quad, CodecError> {
    if kt.bins < 2 {
        return Err(CodecError::BinCount(kt.bins));
    }
    if let Some(&bin) = kt.x_bins.iter().chain(&kt.y_bins).find(|&&b| b >= kt.bins) {
        return Err(CodecError::BinOutOfRange { bin, bins: kt.bins });
    }
    let xs = decode_axis(&kt.x_bins, roi.x0, roi.x1, kt.bins);
    let ys = decode_axis(&kt.y_bins, roi.y0, roi.y1, kt.bins);
    Ok(reconstruct_quad(&SortedCoords::new(xs, ys), kt.match_type))
}

/// Softmax outputs of a key-edge head for one RoI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeDistributions {
    x_dists: [Vec<f64>; 4],
    y_dists: [Vec<f64>; 4],
    #[serde(with = "match_scores_serde")]
    match_scores: [f64; NUM_MATCH_TYPES],
}

mod match_scores_serde {
    use super::NUM_MATCH_TYPES;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[f64; NUM_MATCH_TYPES], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[f64; NUM_MATCH_TYPES], D::Error> {
        let v = Vec::<f64>::deserialize(d)?;
        v.try_into()
            .map_err(|v: Vec<f64>| serde::de::Error::invalid_length(v.len(), &"24 match scores"))
    }
}

const SUM_TOL: f64 = 1e-6;

fn check_distribution(what: &'static str, v: &[f64]) -> Result<(), CodecError> {
    if let Some(bad) = v.iter().find(|p| !p.is_finite() || **p < 0.0) {
        return Err(CodecError::Distribution {
            what,
            reason: format!("entry {bad} is negative or not finite"),
        });
    }
    let sum: f64 = v.iter().sum();
    if (sum - 1.0).abs() > SUM_TOL {
        return Err(CodecError::Distribution {
            what,
            reason: format!("sums to {sum}"),
        });
    }
    Ok(())
}

impl KeDistributions {
    /// Validates shapes (all eight vectors share one length of at least 2)
    /// and normalization (each vector sums to 1 within 1e-6).
    pub fn new(
        x_dists: [Vec<f64>; 4],
        y_dists: [Vec<f64>; 4],
        match_scores: [f64; NUM_MATCH_TYPES],
    ) -> Result<Self, CodecError> {
        let bins = x_dists[0].len();
        if bins < 2 {
            return Err(CodecError::BinCount(bins));
        }
        for (what, d) in x_dists
            .iter()
            .map(|d| ("x key-edge distribution", d))
            .chain(y_dists.iter().map(|d| ("y key-edge distribution", d)))
        {
            if d.len() != bins {
                return Err(CodecError::Length { what, got: d.len(), expected: bins });
            }
            check_distribution(what, d)?;
        }
        check_distribution("match scores", &match_scores)?;
        Ok(Self { x_dists, y_dists, match_scores })
    }

    /// One-hot distributions at the given targets.
    pub fn one_hot(kt: &KeTargets) -> Self {
        let hot = |b: usize| {
            let mut v = vec![0.0; kt.bins];
            v[b] = 1.0;
            v
        };
        let mut match_scores = [0.0; NUM_MATCH_TYPES];
        match_scores[kt.match_type.index()] = 1.0;
        Self {
            x_dists: kt.x_bins.map(hot),
            y_dists: kt.y_bins.map(hot),
            match_scores,
        }
    }

    pub fn bins(&self) -> usize {
        self.x_dists[0].len()
    }

    pub fn x_dists(&self) -> &[Vec<f64>; 4] {
        &self.x_dists
    }

    pub fn y_dists(&self) -> &[Vec<f64>; 4] {
        &self.y_dists
    }

    pub fn match_scores(&self) -> &[f64; NUM_MATCH_TYPES] {
        &self.match_scores
    }

    /// All eight key-edge distributions, x edges first.
    pub fn key_edges(&self) -> impl Iterator<Item = &[f64]> {
        self.x_dists
            .iter()
            .chain(self.y_dists.iter())
            .map(Vec::as_slice)
    }

    /// Argmax readout of every head.
    pub fn argmax_targets(&self) -> KeTargets {
        let match_type = MatchType::from_index(argmax(&self.match_scores)).expect("24 entries");
        KeTargets {
            x_bins: [0, 1, 2, 3].map(|i| argmax(&self.x_dists[i])),
            y_bins: [0, 1, 2, 3].map(|i| argmax(&self.y_dists[i])),
            in_roi: [true; NUM_KEY_EDGES],
            match_type,
            bins: self.bins(),
            degenerate: false,
        }
    }
}

/// Index of the largest entry; ties go to the lowest index.
pub fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate().skip(1) {
        if x > v[best] {
            best = i;
        }
    }
    best
}

/// Decodes full score distributions by argmax, then [`decode_bins`].
pub fn decode(kd: &KeDistributions, roi: &Roi) -> Result<(Quad, MatchType), CodecError> {
    let kt = kd.argmax_targets();
    Ok((decode_bins(&kt, roi)?, kt.match_type))
}

/// Reorders vertices into a boundary cycle running clockwise on screen
/// (y down), starting from the vertex with the smallest `x + y`.
///
/// Vertices are sorted by angle around their centroid, which yields the
/// convex boundary for points in convex position.
pub fn canonical_clockwise(quad: &Quad) -> Quad {
    let c = quad.centroid_of_vertices();
    let mut v = quad.vertices;
    v.sort_by(|a, b| {
        let ta = (a.y - c.y).atan2(a.x - c.x);
        let tb = (b.y - c.y).atan2(b.x - c.x);
        ta.total_cmp(&tb)
    });
    let start = (0..4)
        .min_by(|&i, &j| {
            let (a, b) = (v[i], v[j]);
            (a.x + a.y).total_cmp(&(b.x + b.y)).then(a.y.total_cmp(&b.y))
        })
        .unwrap_or(0);
    v.rotate_left(start);
    Quad::new(v)
}
