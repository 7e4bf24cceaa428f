//! Localization-aware confidence.
//!
//! A box classifier can be confident about a region whose edges are vague.
//! The key-edge heads expose that vagueness: a sharp edge puts most of its
//! mass in a few adjacent bins, a vague one spreads it out. `s_sbd` averages,
//! over the eight key edges, the heaviest run of `window` adjacent bins, and
//! [`rescore`] blends it with the box score.

use serde::{Deserialize, Serialize};

use crate::codec::{KeDistributions, NUM_KEY_EDGES};
use crate::error::ScoringError;

pub const DEFAULT_GAMMA: f64 = 1.4;
pub const DEFAULT_WINDOW: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RescoreParams {
    pub gamma: f64,
    pub window: usize,
}

impl Default for RescoreParams {
    fn default() -> Self {
        Self {
            gamma: DEFAULT_GAMMA,
            window: DEFAULT_WINDOW,
        }
    }
}

impl RescoreParams {
    pub fn new(gamma: f64, window: usize) -> Result<Self, ScoringError> {
        check_gamma(gamma)?;
        if window == 0 {
            return Err(ScoringError::Window { window, len: 0 });
        }
        Ok(Self { gamma, window })
    }
}

fn check_gamma(gamma: f64) -> Result<(), ScoringError> {
    if !(0.0..=2.0).contains(&gamma) {
        return Err(ScoringError::Gamma(gamma));
    }
    Ok(())
}

/// Largest sum over `window` consecutive entries. Only windows fully inside
/// the vector are considered.
pub fn windowed_max_sum(dist: &[f64], window: usize) -> Result<f64, ScoringError> {
    if window == 0 || window > dist.len() {
        return Err(ScoringError::Window { window, len: dist.len() });
    }
    let mut sum: f64 = dist[..window].iter().sum();
    let mut best = sum;
    for i in window..dist.len() {
        sum += dist[i] - dist[i - window];
        best = best.max(sum);
    }
    Ok(best)
}

/// Mean over the eight key edges of [`windowed_max_sum`].
pub fn s_sbd(kd: &KeDistributions, window: usize) -> Result<f64, ScoringError> {
    let mut total = 0.0;
    for d in kd.key_edges() {
        total += windowed_max_sum(d, window)?;
    }
    Ok((total / NUM_KEY_EDGES as f64).clamp(0.0, 1.0))
}

/// `((2 - gamma) * s_box + gamma * s_sbd) / 2`.
///
/// `gamma = 0` keeps the box score, `gamma = 2` keeps only `s_sbd`.
pub fn rescore(s_box: f64, s_sbd: f64, gamma: f64) -> Result<f64, ScoringError> {
    check_gamma(gamma)?;
    for s in [s_box, s_sbd] {
        if !(0.0..=1.0).contains(&s) {
            return Err(ScoringError::Score(s));
        }
    }
    Ok(((2.0 - gamma) * s_box + gamma * s_sbd) / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::{encode, KeDistributions, Roi};
    use crate::geometry::Quad;

    fn uniform(m: usize) -> Vec<f64> {
        vec![1.0 / m as f64; m]
    }

    fn one_hot(m: usize, at: usize) -> Vec<f64> {
        let mut v = vec![0.0; m];
        v[at] = 1.0;
        v
    }

    fn ms() -> [f64; 24] {
        let mut m = [0.0; 24];
        m[0] = 1.0;
        m
    }

    #[test]
    fn window_sums() {
        assert_eq!(windowed_max_sum(&one_hot(56, 0), 5).unwrap(), 1.0);
        assert_eq!(windowed_max_sum(&one_hot(56, 55), 5).unwrap(), 1.0);
        assert!((windowed_max_sum(&uniform(56), 5).unwrap() - 5.0 / 56.0).abs() < 1e-12);
        let v = [0.0, 0.1, 0.2, 0.4, 0.2, 0.1, 0.0, 0.0];
        assert!((windowed_max_sum(&v, 5).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(windowed_max_sum(&v, 8).unwrap(), v.iter().sum::<f64>());
        assert!(windowed_max_sum(&v, 9).is_err());
        assert!(windowed_max_sum(&v, 0).is_err());
    }

    #[test]
    fn s_sbd_cases() {
        let roi = Roi::new(0., 0., 112., 112.).unwrap();
        let quad = Quad::from_coords([10., 40., 20., 100., 50., 0., 80., 60.]).unwrap();
        let hot = KeDistributions::one_hot(&encode(&quad, &roi, 56).unwrap());
        assert_eq!(s_sbd(&hot, 5).unwrap(), 1.0);

        let u = uniform(56);
        let flat = KeDistributions::new(
            [u.clone(), u.clone(), u.clone(), u.clone()],
            [u.clone(), u.clone(), u.clone(), u.clone()],
            ms(),
        )
        .unwrap();
        assert!((s_sbd(&flat, 5).unwrap() - 5.0 / 56.0).abs() < 1e-12);

        let h = one_hot(56, 10);
        let mixed = KeDistributions::new(
            [h.clone(), h.clone(), h.clone(), h.clone()],
            [u.clone(), u.clone(), u.clone(), u],
            ms(),
        )
        .unwrap();
        let expected = (4.0 + 4.0 * 5.0 / 56.0) / 8.0;
        assert!((s_sbd(&mixed, 5).unwrap() - expected).abs() < 1e-12);
        assert!((expected - 0.544_642_857).abs() < 1e-9);
    }

    #[test]
    fn rescore_cases() {
        assert_eq!(rescore(0.9, 0.5, 0.0).unwrap(), 0.9);
        assert_eq!(rescore(0.9, 0.5, 2.0).unwrap(), 0.5);
        assert!((rescore(0.9, 0.5, 1.4).unwrap() - 0.62).abs() < 1e-12);
        assert!(matches!(rescore(0.9, 0.5, 2.1), Err(ScoringError::Gamma(_))));
        assert!(matches!(rescore(0.9, 0.5, -0.1), Err(ScoringError::Gamma(_))));
        assert!(matches!(rescore(1.2, 0.5, 1.0), Err(ScoringError::Score(_))));
    }

    #[test]
    fn params_validate() {
        assert!(RescoreParams::new(1.4, 5).is_ok());
        assert!(RescoreParams::new(2.5, 5).is_err());
        assert!(RescoreParams::new(1.0, 0).is_err());
        assert_eq!(RescoreParams::default(), RescoreParams { gamma: 1.4, window: 5 });
    }
}
