//! Exact 2-D primitives for quadrilaterals.
//!
//! Areas, segment intersection with a distance tolerance, simplicity tests and
//! polygon intersection/IoU. Intersections are computed by convex clipping;
//! a simple but non-convex quadrilateral is split along its interior diagonal
//! into two triangles first.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::GeometryError;

/// Distance tolerance (pixels) for collinearity and on-segment tests.
pub const EPS_GEOM: f64 = 1e-9;

/// A point in image coordinates (pixels, y pointing down).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    #[inline]
    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 2-D cross product.
    #[inline]
    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    #[inline]
    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    #[inline]
    fn approx_eq(self, other: Point) -> bool {
        self.distance(other) <= EPS_GEOM
    }
}

impl std::ops::Sub for Point {
    type Output = Point;

    #[inline]
    fn sub(self, other: Point) -> Point {
        Point::new(self.x - other.x, self.y - other.y)
    }
}

impl From<(f64, f64)> for Point {
    fn from((x, y): (f64, f64)) -> Self {
        Point::new(x, y)
    }
}

/// Four vertices in listed order. Edges are v0v1, v1v2, v2v3 and v3v0.
///
/// Degenerate and self-intersecting vertex orders are representable; use
/// [`is_simple_quad`] to reject them.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Quad {
    pub vertices: [Point; 4],
}

impl Quad {
    pub const fn new(vertices: [Point; 4]) -> Self {
        Self { vertices }
    }

    /// Builds a quad from `x1,y1,...,x4,y4`, rejecting non-finite values.
    pub fn from_coords(c: [f64; 8]) -> Result<Self, GeometryError> {
        if c.iter().any(|v| !v.is_finite()) {
            return Err(GeometryError::NonFinite);
        }
        Ok(Self::new([
            Point::new(c[0], c[1]),
            Point::new(c[2], c[3]),
            Point::new(c[4], c[5]),
            Point::new(c[6], c[7]),
        ]))
    }

    pub fn coords(&self) -> [f64; 8] {
        let v = &self.vertices;
        [
            v[0].x, v[0].y, v[1].x, v[1].y, v[2].x, v[2].y, v[3].x, v[3].y,
        ]
    }

    pub fn is_finite(&self) -> bool {
        self.vertices.iter().all(Point::is_finite)
    }

    /// Iterator over the four edges as `(start, end)` pairs.
    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        (0..4).map(move |i| (self.vertices[i], self.vertices[(i + 1) % 4]))
    }

    pub fn centroid_of_vertices(&self) -> Point {
        let (sx, sy) = self
            .vertices
            .iter()
            .fold((0.0, 0.0), |(sx, sy), p| (sx + p.x, sy + p.y));
        Point::new(sx / 4.0, sy / 4.0)
    }

    /// Axis-aligned bounds as `(min_x, min_y, max_x, max_y)`.
    pub fn bounds(&self) -> (f64, f64, f64, f64) {
        self.vertices.iter().fold(
            (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY),
            |(x0, y0, x1, y1), p| (x0.min(p.x), y0.min(p.y), x1.max(p.x), y1.max(p.y)),
        )
    }

    /// Shoelace sum. Positive when the vertices run clockwise on screen
    /// (counterclockwise in a y-up frame).
    pub fn signed_area(&self) -> f64 {
        self.edges().map(|(a, b)| a.cross(b)).sum::<f64>() * 0.5
    }

    pub fn reversed(&self) -> Quad {
        let v = self.vertices;
        Quad::new([v[3], v[2], v[1], v[0]])
    }
}

impl fmt::Display for Quad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = &self.vertices;
        write!(
            f,
            "[({}, {}), ({}, {}), ({}, {}), ({}, {})]",
            v[0].x, v[0].y, v[1].x, v[1].y, v[2].x, v[2].y, v[3].x, v[3].y
        )
    }
}

/// Convex polygon with vertices in positive (shoelace) orientation.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexPolygon {
    vertices: Vec<Point>,
}

impl ConvexPolygon {
    /// Accepts 3 or more vertices forming a convex polygon of positive area,
    /// in either orientation. Collinear consecutive vertices are allowed.
    pub fn try_new(mut vertices: Vec<Point>) -> Option<Self> {
        if vertices.len() < 3 || vertices.iter().any(|p| !p.is_finite()) {
            return None;
        }
        let area = shoelace(&vertices);
        if area <= 0.0 {
            if area == 0.0 {
                return None;
            }
            vertices.reverse();
        }
        let n = vertices.len();
        let convex = (0..n).all(|i| {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            let c = vertices[(i + 2) % n];
            orientation(a, b, c) != Orientation::Clockwise
        });
        convex.then_some(Self { vertices })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn area(&self) -> f64 {
        shoelace(&self.vertices)
    }

    /// Intersection with another convex polygon (Sutherland-Hodgman).
    /// Returns `None` when the overlap has no area.
    pub fn intersection(&self, clip: &ConvexPolygon) -> Option<ConvexPolygon> {
        let out = clip_convex(&self.vertices, &clip.vertices);
        if out.len() < 3 || shoelace(&out) <= 0.0 {
            return None;
        }
        Some(ConvexPolygon { vertices: out })
    }

    pub fn intersection_area(&self, clip: &ConvexPolygon) -> f64 {
        let out = clip_convex(&self.vertices, &clip.vertices);
        if out.len() < 3 {
            return 0.0;
        }
        shoelace(&out).max(0.0)
    }
}

fn shoelace(pts: &[Point]) -> f64 {
    let n = pts.len();
    (0..n).map(|i| pts[i].cross(pts[(i + 1) % n])).sum::<f64>() * 0.5
}

fn clip_convex(subject: &[Point], clip: &[Point]) -> Vec<Point> {
    let mut output = subject.to_vec();
    let n = clip.len();
    for i in 0..n {
        if output.is_empty() {
            break;
        }
        let c1 = clip[i];
        let c2 = clip[(i + 1) % n];
        let edge = c2 - c1;
        let side = |p: Point| edge.cross(p - c1);
        let input = std::mem::take(&mut output);
        let m = input.len();
        for j in 0..m {
            let cur = input[j];
            let prev = input[(j + m - 1) % m];
            let (sc, sp) = (side(cur), side(prev));
            if sc >= 0.0 {
                if sp < 0.0 {
                    output.push(line_cut(prev, cur, sp, sc));
                }
                output.push(cur);
            } else if sp >= 0.0 {
                output.push(line_cut(prev, cur, sp, sc));
            }
        }
    }
    output
}

// Point on segment p->q where the signed side value crosses zero.
#[inline]
fn line_cut(p: Point, q: Point, sp: f64, sq: f64) -> Point {
    let t = sp / (sp - sq);
    Point::new(p.x + t * (q.x - p.x), p.y + t * (q.y - p.y))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    CounterClockwise,
    Clockwise,
    Collinear,
}

/// Orientation of `c` relative to the directed line `a -> b`.
///
/// `c` counts as collinear when its distance to the line is within
/// [`EPS_GEOM`]. "CounterClockwise" means positive cross product.
pub fn orientation(a: Point, b: Point, c: Point) -> Orientation {
    let ab = b - a;
    let len = ab.dot(ab).sqrt();
    let cross = ab.cross(c - a);
    let dist = if len > 0.0 {
        cross.abs() / len
    } else {
        a.distance(c)
    };
    if dist <= EPS_GEOM {
        Orientation::Collinear
    } else if cross > 0.0 {
        Orientation::CounterClockwise
    } else {
        Orientation::Clockwise
    }
}

// Assumes p is collinear with a-b.
fn within_box(p: Point, a: Point, b: Point) -> bool {
    p.x >= a.x.min(b.x) - EPS_GEOM
        && p.x <= a.x.max(b.x) + EPS_GEOM
        && p.y >= a.y.min(b.y) - EPS_GEOM
        && p.y <= a.y.max(b.y) + EPS_GEOM
}

/// How a shared endpoint between two segments is treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EndpointRule {
    /// Closed segments: any common point counts.
    #[default]
    Closed,
    /// Touching only at a common endpoint does not count; collinear overlap
    /// beyond that endpoint still does.
    ExcludeShared,
}

/// Whether segments `a1a2` and `b1b2` share a point.
pub fn segments_intersect(a1: Point, a2: Point, b1: Point, b2: Point, rule: EndpointRule) -> bool {
    if rule == EndpointRule::ExcludeShared {
        let shared = [(a1, a2, b1, b2), (a1, a2, b2, b1), (a2, a1, b1, b2), (a2, a1, b2, b1)]
            .into_iter()
            .find(|(s, _, t, _)| s.approx_eq(*t));
        if let Some((s, a_other, _, b_other)) = shared {
            let da = a_other - s;
            let db = b_other - s;
            if a_other.approx_eq(s) || b_other.approx_eq(s) {
                return false;
            }
            return orientation(s, a_other, b_other) == Orientation::Collinear && da.dot(db) > 0.0;
        }
    }

    let o1 = orientation(a1, a2, b1);
    let o2 = orientation(a1, a2, b2);
    let o3 = orientation(b1, b2, a1);
    let o4 = orientation(b1, b2, a2);

    if o1 != o2 && o3 != o4 {
        return true;
    }
    (o1 == Orientation::Collinear && within_box(b1, a1, a2))
        || (o2 == Orientation::Collinear && within_box(b2, a1, a2))
        || (o3 == Orientation::Collinear && within_box(a1, b1, b2))
        || (o4 == Orientation::Collinear && within_box(a2, b1, b2))
}

/// Absolute shoelace area; zero for degenerate input.
pub fn polygon_area(quad: &Quad) -> f64 {
    quad.signed_area().abs()
}

/// True iff the quad bounds a region of positive area and its sides meet
/// only at shared vertices, i.e. each side touches the others only at its
/// head and tail.
pub fn is_simple_quad(quad: &Quad) -> bool {
    if !quad.is_finite() || polygon_area(quad) <= EPS_GEOM {
        return false;
    }
    let v = &quad.vertices;
    for i in 0..4 {
        for j in (i + 1)..4 {
            if v[i].approx_eq(v[j]) {
                return false;
            }
        }
    }
    let edge = |i: usize| (v[i], v[(i + 1) % 4]);
    for i in 0..4 {
        let (a1, a2) = edge(i);
        let (b1, b2) = edge((i + 1) % 4);
        if segments_intersect(a1, a2, b1, b2, EndpointRule::ExcludeShared) {
            return false;
        }
    }
    for (i, j) in [(0, 2), (1, 3)] {
        let (a1, a2) = edge(i);
        let (b1, b2) = edge(j);
        if segments_intersect(a1, a2, b1, b2, EndpointRule::Closed) {
            return false;
        }
    }
    true
}

/// Splits a simple quad into one or two convex pieces with disjoint interiors.
fn convex_pieces(quad: &Quad) -> Vec<ConvexPolygon> {
    let mut v = quad.vertices;
    if quad.signed_area() < 0.0 {
        v.reverse();
    }
    let turn = |i: usize| {
        let prev = v[(i + 3) % 4];
        let next = v[(i + 1) % 4];
        orientation(prev, v[i], next)
    };
    let reflex = (0..4).find(|&i| turn(i) == Orientation::Clockwise);
    let pieces = match reflex {
        None => vec![v.to_vec()],
        Some(i) => vec![
            vec![v[i], v[(i + 1) % 4], v[(i + 2) % 4]],
            vec![v[i], v[(i + 2) % 4], v[(i + 3) % 4]],
        ],
    };
    pieces.into_iter().filter_map(ConvexPolygon::try_new).collect()
}

/// Area of the intersection of two simple quads.
pub fn polygon_intersection_area(a: &Quad, b: &Quad) -> Result<f64, GeometryError> {
    if !is_simple_quad(a) {
        return Err(GeometryError::NotSimple { which: "first" });
    }
    if !is_simple_quad(b) {
        return Err(GeometryError::NotSimple { which: "second" });
    }
    let pa = convex_pieces(a);
    let pb = convex_pieces(b);
    let inter: f64 = pa
        .iter()
        .flat_map(|p| pb.iter().map(move |q| p.intersection_area(q)))
        .sum();
    let cap = polygon_area(a).min(polygon_area(b));
    Ok(inter.clamp(0.0, cap))
}

/// Intersection over union of two simple quads, in `[0, 1]`.
pub fn polygon_iou(a: &Quad, b: &Quad) -> Result<f64, GeometryError> {
    let inter = polygon_intersection_area(a, b)?;
    let union = polygon_area(a) + polygon_area(b) - inter;
    if union <= 0.0 {
        return Ok(0.0);
    }
    Ok((inter / union).clamp(0.0, 1.0))
}
