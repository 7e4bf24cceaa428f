//! Oracles and generators shared by the integration tests. Nothing here calls
//! into the geometry or codec code it is used to check.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sbd::{Detection, MatchType, Point, Quad, Roi};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_points(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> Quad {
    Quad::new([(); 4].map(|_| Point::new(rng.random_range(lo..hi), rng.random_range(lo..hi))))
}

/// Vertices ordered by angle around their mean; a simple polygon for
/// points in general position.
pub fn star_order(q: &Quad) -> Quad {
    let cx = q.vertices.iter().map(|p| p.x).sum::<f64>() / 4.0;
    let cy = q.vertices.iter().map(|p| p.y).sum::<f64>() / 4.0;
    let mut v = q.vertices;
    v.sort_by(|a, b| {
        (a.y - cy)
            .atan2(a.x - cx)
            .partial_cmp(&(b.y - cy).atan2(b.x - cx))
            .unwrap()
    });
    Quad::new(v)
}

/// Random simple quad: random points joined in angular order.
pub fn random_simple_quad(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> Quad {
    star_order(&random_points(rng, lo, hi))
}

/// Random convex quad: a rotated, scaled and mildly perturbed rectangle.
pub fn random_convex_quad(rng: &mut ChaCha8Rng, cx: f64, cy: f64, size: f64) -> Quad {
    loop {
        let w = rng.random_range(0.3..1.0) * size;
        let h = rng.random_range(0.3..1.0) * size;
        let t: f64 = rng.random_range(0.0..std::f64::consts::PI);
        let (s, c) = t.sin_cos();
        let v = [(-0.5, -0.5), (0.5, -0.5), (0.5, 0.5), (-0.5, 0.5)].map(|(u, k)| {
            let x = u * w + rng.random_range(-0.1..0.1) * size;
            let y = k * h + rng.random_range(-0.1..0.1) * size;
            Point::new(cx + c * x - s * y, cy + s * x + c * y)
        });
        let q = Quad::new(v);
        if is_convex_oracle(&q) {
            return q;
        }
    }
}

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

pub fn is_convex_oracle(q: &Quad) -> bool {
    let v = &q.vertices;
    let turns: Vec<f64> = (0..4).map(|i| cross(v[i], v[(i + 1) % 4], v[(i + 2) % 4])).collect();
    turns.iter().all(|&t| t > 0.0) || turns.iter().all(|&t| t < 0.0)
}

/// Winding number of `p` with respect to the closed polygon `q`.
pub fn winding(q: &Quad, p: Point) -> i32 {
    let v = &q.vertices;
    let mut w = 0;
    for i in 0..4 {
        let a = v[i];
        let b = v[(i + 1) % 4];
        if a.y <= p.y {
            if b.y > p.y && cross(a, b, p) > 0.0 {
                w += 1;
            }
        } else if b.y <= p.y && cross(a, b, p) < 0.0 {
            w -= 1;
        }
    }
    w
}

pub fn inside(q: &Quad, p: Point) -> bool {
    winding(q, p) != 0
}

fn bbox(quads: &[&Quad]) -> (f64, f64, f64, f64) {
    let mut b = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for q in quads {
        for p in q.vertices {
            b = (b.0.min(p.x), b.1.min(p.y), b.2.max(p.x), b.3.max(p.y));
        }
    }
    b
}

/// Monte-Carlo area of the region enclosed by `q`.
pub fn mc_area(q: &Quad, samples: usize, seed: u64) -> f64 {
    let (x0, y0, x1, y1) = bbox(&[q]);
    let mut r = rng(seed);
    let hits = (0..samples)
        .filter(|_| inside(q, Point::new(r.random_range(x0..x1), r.random_range(y0..y1))))
        .count();
    hits as f64 / samples as f64 * (x1 - x0) * (y1 - y0)
}

/// Monte-Carlo `(intersection area, IoU)` of two simple quads.
pub fn mc_overlap(a: &Quad, b: &Quad, samples: usize, seed: u64) -> (f64, f64) {
    let (x0, y0, x1, y1) = bbox(&[a, b]);
    let mut r = rng(seed);
    let (mut both, mut either) = (0usize, 0usize);
    for _ in 0..samples {
        let p = Point::new(r.random_range(x0..x1), r.random_range(y0..y1));
        let (ia, ib) = (inside(a, p), inside(b, p));
        both += (ia && ib) as usize;
        either += (ia || ib) as usize;
    }
    let cell = (x1 - x0) * (y1 - y0) / samples as f64;
    let iou = if either == 0 { 0.0 } else { both as f64 / either as f64 };
    (both as f64 * cell, iou)
}

/// Parametric segment crossing test for points in general position.
pub fn param_cross(p1: Point, p2: Point, p3: Point, p4: Point) -> bool {
    let d1 = (p2.x - p1.x, p2.y - p1.y);
    let d2 = (p4.x - p3.x, p4.y - p3.y);
    let denom = d1.0 * d2.1 - d1.1 * d2.0;
    if denom == 0.0 {
        return false;
    }
    let e = (p3.x - p1.x, p3.y - p1.y);
    let t = (e.0 * d2.1 - e.1 * d2.0) / denom;
    let u = (e.0 * d1.1 - e.1 * d1.0) / denom;
    (0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u)
}

/// Simplicity by checking the two pairs of opposite sides, for quads with
/// coordinates in general position.
pub fn simple_by_segment_pairs(q: &Quad) -> bool {
    let v = &q.vertices;
    let shoelace: f64 = (0..4).map(|i| v[i].x * v[(i + 1) % 4].y - v[(i + 1) % 4].x * v[i].y).sum();
    if shoelace == 0.0 {
        return false;
    }
    !param_cross(v[0], v[1], v[2], v[3]) && !param_cross(v[1], v[2], v[3], v[0])
}

/// Exact integer simplicity oracle for lattice quads.
pub fn simple_lattice(v: [(i64, i64); 4]) -> bool {
    type P = (i64, i64);
    let cr = |o: P, a: P, b: P| (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0);
    let on_seg = |p: P, a: P, b: P| {
        cr(a, b, p) == 0 && p.0 >= a.0.min(b.0) && p.0 <= a.0.max(b.0) && p.1 >= a.1.min(b.1) && p.1 <= a.1.max(b.1)
    };
    let sgn = |x: i64| x.signum();
    let closed = |a: P, b: P, c: P, d: P| {
        let (o1, o2, o3, o4) = (sgn(cr(a, b, c)), sgn(cr(a, b, d)), sgn(cr(c, d, a)), sgn(cr(c, d, b)));
        if o1 * o2 < 0 && o3 * o4 < 0 {
            return true;
        }
        on_seg(c, a, b) || on_seg(d, a, b) || on_seg(a, c, d) || on_seg(b, c, d)
    };
    let area2: i64 = (0..4).map(|i| v[i].0 * v[(i + 1) % 4].1 - v[(i + 1) % 4].0 * v[i].1).sum();
    if area2 == 0 {
        return false;
    }
    for i in 0..4 {
        for j in i + 1..4 {
            if v[i] == v[j] {
                return false;
            }
        }
    }
    if closed(v[0], v[1], v[2], v[3]) || closed(v[1], v[2], v[3], v[0]) {
        return false;
    }
    // adjacent sides s = v[i]v[i+1], t = v[i+1]v[i+2]: only the shared vertex
    for i in 0..4 {
        let (a, s, b) = (v[i], v[(i + 1) % 4], v[(i + 2) % 4]);
        if cr(a, s, b) == 0 {
            let dot = (a.0 - s.0) * (b.0 - s.0) + (a.1 - s.1) * (b.1 - s.1);
            if dot > 0 {
                return false;
            }
        }
    }
    true
}

/// All 24 orderings of four items.
pub fn permutations4() -> Vec<[usize; 4]> {
    let mut out = Vec::new();
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    let mut seen = [false; 4];
                    p.iter().for_each(|&i| seen[i] = true);
                    if seen.iter().all(|&s| s) {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

pub fn reorder(q: &Quad, p: [usize; 4]) -> Quad {
    Quad::new(p.map(|i| q.vertices[i]))
}

/// Vertex multiset as sorted bit patterns.
pub fn multiset(q: &Quad) -> Vec<(u64, u64)> {
    let mut v: Vec<(u64, u64)> = q.vertices.iter().map(|p| (p.x.to_bits(), p.y.to_bits())).collect();
    v.sort();
    v
}

pub fn det(quad: Quad, score: f64) -> Detection {
    Detection {
        quad,
        s_box: score,
        s_sbd: 0.0,
        score,
        roi: Roi::new(0.0, 0.0, 1.0, 1.0).unwrap(),
        match_type: MatchType::IDENTITY,
    }
}

/// Clustered scene: jittered copies of a few base boxes, scores rounded to
/// produce ties.
pub fn scene(r: &mut ChaCha8Rng, n: usize) -> Vec<Detection> {
    let bases: Vec<Quad> = (0..4)
        .map(|_| {
            let (cx, cy) = (r.random_range(20.0..180.0), r.random_range(20.0..180.0));
            random_convex_quad(r, cx, cy, 40.0)
        })
        .collect();
    (0..n)
        .map(|_| {
            let b = bases[r.random_range(0..bases.len())];
            let j = r.random_range(0.0..8.0);
            let q = Quad::new(b.vertices.map(|p| Point::new(p.x + r.random_range(-j..=j), p.y + r.random_range(-j..=j))));
            det(q, (r.random_range(0.0..1.0f64) * 10.0).round() / 10.0)
        })
        .collect()
}

/// Reference greedy NMS over a precomputed suppression matrix.
pub fn brute_nms(dets: &[Detection], sup: impl Fn(usize, usize) -> bool) -> Vec<usize> {
    let n = dets.len();
    let mut order: Vec<usize> = (0..n).collect();
    // insertion sort: stable, descending score
    for i in 1..n {
        let mut j = i;
        while j > 0 && dets[order[j - 1]].score < dets[order[j]].score {
            order.swap(j - 1, j);
            j -= 1;
        }
    }
    let matrix: Vec<Vec<bool>> = (0..n).map(|a| (0..n).map(|b| a != b && sup(a, b)).collect()).collect();
    let mut kept: Vec<usize> = Vec::new();
    for &i in &order {
        if !kept.iter().any(|&k| matrix[k][i]) {
            kept.push(i);
        }
    }
    kept
}

pub fn hand_oks(a: &Quad, b: &Quad) -> f64 {
    let by_x = |q: &Quad| {
        let mut v = q.vertices.to_vec();
        v.sort_by(|p, q| p.x.total_cmp(&q.x).then(p.y.total_cmp(&q.y)));
        v
    };
    let v = &a.vertices;
    let s2 = (0..4).map(|i| v[i].x * v[(i + 1) % 4].y - v[(i + 1) % 4].x * v[i].y).sum::<f64>().abs() / 2.0;
    if s2 == 0.0 {
        return 0.0;
    }
    by_x(a)
        .iter()
        .zip(by_x(b))
        .map(|(p, q)| (-((p.x - q.x).powi(2) + (p.y - q.y).powi(2)) / (2.0 * s2)).exp())
        .sum::<f64>()
        / 4.0
}
