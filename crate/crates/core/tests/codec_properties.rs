mod common;

use common::*;
use proptest::prelude::*;
use sbd::codec::{
    compute_match_type, decode_bins, encode, reconstruct_quad, sort_key_edges, KeDistributions, MatchType,
    SortedCoords,
};
use sbd::{Point, Quad, Roi};

fn roi112() -> Roi {
    Roi::new(0.0, 0.0, 112.0, 112.0).unwrap()
}

/// Match type by trying every permutation against the vertex multiset.
fn brute_force_match_type(q: &Quad) -> Vec<MatchType> {
    let mut xs: Vec<f64> = q.vertices.iter().map(|p| p.x).collect();
    let mut ys: Vec<f64> = q.vertices.iter().map(|p| p.y).collect();
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    let target = multiset(q);
    permutations4()
        .into_iter()
        .filter(|p| {
            let cand = Quad::new([0, 1, 2, 3].map(|i| Point::new(xs[i], ys[p[i]])));
            multiset(&cand) == target
        })
        .map(|p| MatchType::from_perm(p.map(|d| d as u8 + 1)).unwrap())
        .collect()
}

#[test]
fn match_type_agrees_with_brute_force() {
    let mut r = rng(11);
    for _ in 0..10_000 {
        let q = random_points(&mut r, 0.0, 100.0);
        let found = brute_force_match_type(&q);
        assert_eq!(found, vec![compute_match_type(&q)], "{q}");
    }
}

#[test]
fn every_match_type_is_reachable() {
    let sc = SortedCoords::new([1.0, 2.0, 3.0, 4.0], [10.0, 20.0, 30.0, 40.0]);
    for mt in MatchType::all() {
        assert_eq!(compute_match_type(&reconstruct_quad(&sc, mt)), mt);
    }
}

#[test]
fn encoding_ignores_vertex_order() {
    let mut r = rng(12);
    for _ in 0..1000 {
        let q = random_points(&mut r, 5.0, 107.0);
        let base = encode(&q, &roi112(), 56).unwrap();
        for p in permutations4() {
            assert_eq!(encode(&reorder(&q, p), &roi112(), 56).unwrap(), base);
        }
    }
}

#[test]
fn encoding_ignores_order_with_tied_coordinates() {
    let q = Quad::from_coords([10.0, 10.0, 10.0, 50.0, 60.0, 10.0, 60.0, 50.0]).unwrap();
    let base = encode(&q, &roi112(), 56).unwrap();
    for p in permutations4() {
        assert_eq!(encode(&reorder(&q, p), &roi112(), 56).unwrap(), base);
    }
}

#[test]
fn round_trip_within_one_and_a_half_bins() {
    let mut r = rng(13);
    let w = 112.0 / 56.0;
    for _ in 0..10_000 {
        let q = random_points(&mut r, 0.0, 112.0);
        let kt = encode(&q, &roi112(), 56).unwrap();
        assert!(kt.all_in_roi());
        let back = sort_key_edges(&decode_bins(&kt, &roi112()).unwrap());
        let orig = sort_key_edges(&q);
        for i in 0..4 {
            assert!((back.xs[i] - orig.xs[i]).abs() <= 1.5 * w + 1e-9);
            assert!((back.ys[i] - orig.ys[i]).abs() <= 1.5 * w + 1e-9);
        }
    }
}

#[test]
fn one_hot_distributions_decode_like_targets() {
    let mut r = rng(14);
    for _ in 0..500 {
        let q = random_points(&mut r, 0.0, 112.0);
        let kt = encode(&q, &roi112(), 56).unwrap();
        let kd = KeDistributions::one_hot(&kt);
        assert_eq!(kd.argmax_targets(), kt);
        let (decoded, mt) = sbd::codec::decode(&kd, &roi112()).unwrap();
        assert_eq!(mt, kt.match_type);
        assert_eq!(decoded, decode_bins(&kt, &roi112()).unwrap());
    }
}

fn coord() -> impl Strategy<Value = f64> {
    -200.0..300.0f64
}

fn points() -> impl Strategy<Value = Quad> {
    proptest::array::uniform8(coord()).prop_map(|c| Quad::from_coords(c).unwrap())
}

fn any_roi() -> impl Strategy<Value = Roi> {
    (-50.0..50.0f64, -50.0..50.0f64, 1.0..300.0f64, 1.0..300.0f64)
        .prop_map(|(x, y, w, h)| Roi::new(x, y, x + w, y + h).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn bins_are_in_range_and_nondecreasing(q in points(), roi in any_roi(), bins in 2usize..120) {
        let kt = encode(&q, &roi, bins).unwrap();
        for axis in [kt.x_bins, kt.y_bins] {
            prop_assert!(axis.iter().all(|&b| b < bins));
            prop_assert!(axis.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn reconstruction_returns_the_vertex_multiset(q in points()) {
        let sc = sort_key_edges(&q);
        prop_assert_eq!(multiset(&reconstruct_quad(&sc, compute_match_type(&q))), multiset(&q));
    }

    #[test]
    fn decoded_mean_is_the_bin_centre_mean(q in points(), roi in any_roi()) {
        let kt = encode(&q, &roi, 56).unwrap();
        let back = sort_key_edges(&decode_bins(&kt, &roi).unwrap());
        let (wx, wy) = roi.bin_widths(56);
        let cx: f64 = kt.x_bins.iter().map(|&b| roi.x0() + (b as f64 + 0.5) * wx).sum::<f64>() / 4.0;
        let cy: f64 = kt.y_bins.iter().map(|&b| roi.y0() + (b as f64 + 0.5) * wy).sum::<f64>() / 4.0;
        prop_assert!((back.x_mean - cx).abs() <= 1e-9);
        prop_assert!((back.y_mean - cy).abs() <= 1e-9);
    }

    #[test]
    fn match_type_index_round_trips(i in 0usize..24) {
        let mt = MatchType::from_index(i).unwrap();
        prop_assert_eq!(mt.index(), i);
        prop_assert_eq!(mt.to_string().parse::<MatchType>().unwrap(), mt);
    }

    #[test]
    fn in_roi_flags_follow_the_half_points(q in points(), roi in any_roi()) {
        let kt = encode(&q, &roi, 56).unwrap();
        let sc = sort_key_edges(&q);
        for i in 0..4 {
            let hx = (sc.xs[i] + sc.x_mean) / 2.0;
            let hy = (sc.ys[i] + sc.y_mean) / 2.0;
            prop_assert_eq!(kt.in_roi[i], hx >= roi.x0() && hx < roi.x1());
            prop_assert_eq!(kt.in_roi[4 + i], hy >= roi.y0() && hy < roi.y1());
        }
    }
}
