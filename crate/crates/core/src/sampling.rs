//! Seeded random bodies and deformations for property checks and scans.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::support::{grid_angle, GridSupport, Perturbation};

/// Highest Fourier mode used by the smooth samplers.
pub const MAX_MODE: usize = 6;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `r (1 + Σ_{k=2}^{6} c_k cos(kθ + φ_k))` with `Σ (k² − 1)|c_k| <= 0.9`, so the
/// radius of curvature stays at least `0.1 r`. Only even modes when
/// `symmetric` is set.
pub fn random_smooth_support(n: usize, seed: u64, symmetric: bool) -> Result<GridSupport> {
    let mut rng = rng(seed);
    let modes: Vec<usize> = (2..=MAX_MODE).filter(|k| !symmetric || k % 2 == 0).collect();
    let budget = 0.9 / modes.len() as f64;
    let terms: Vec<(f64, f64, f64)> = modes
        .iter()
        .map(|&k| {
            let c = rng.gen_range(-1.0..1.0) * budget / (k * k - 1) as f64;
            (k as f64, c, rng.gen_range(0.0..TAU))
        })
        .collect();
    let r = rng.gen_range(0.5..2.0);
    GridSupport::from_fn(n, |t| {
        r * (1.0 + terms.iter().map(|&(k, c, p)| c * (k * t + p).cos()).sum::<f64>())
    })
}

/// Trigonometric polynomial of degree at most 6 with coefficients in `[−1, 1]`.
pub fn random_perturbation(n: usize, seed: u64) -> Result<Perturbation> {
    let mut rng = rng(seed);
    let terms: Vec<(f64, f64, f64)> = (0..=MAX_MODE)
        .map(|k| (k as f64, rng.gen_range(-1.0..1.0), rng.gen_range(0.0..TAU)))
        .collect();
    Perturbation::from_fn(n, |t| terms.iter().map(|&(k, c, p)| c * (k * t + p).cos()).sum())
}

/// `Σ_{k=1}^{6} b_k sin(kθ)` on `(0, π)` and exactly zero elsewhere, including
/// at `θ = 0` and `θ = π`.
pub fn random_half_perturbation(n: usize, seed: u64) -> Result<Perturbation> {
    let mut rng = rng(seed);
    let b: Vec<f64> = (1..=MAX_MODE)
        .map(|k| rng.gen_range(-1.0..1.0) / k as f64)
        .collect();
    let values = (0..n)
        .map(|j| {
            if j == 0 || j >= n / 2 {
                return 0.0;
            }
            let t = grid_angle(n, j);
            b.iter()
                .enumerate()
                .map(|(k, c)| c * ((k + 1) as f64 * t).sin())
                .sum()
        })
        .collect();
    Perturbation::new(values)
}

/// Window `(a, a + L)` with `L` in `[0.4, 2.6]` split into three subwindows
/// separated by gaps of a tenth of the window.
pub fn random_window(seed: u64) -> ((f64, f64), [(f64, f64); 3]) {
    let mut rng = rng(seed);
    let a = rng.gen_range(0.0..TAU);
    let len = rng.gen_range(0.4..2.6);
    let gap = 0.1 * len;
    let piece = (len - 4.0 * gap) / 3.0;
    let sub = std::array::from_fn(|i| {
        let s = a + gap + i as f64 * (piece + gap);
        (s, s + piece)
    });
    debug_assert!(len < PI);
    ((a, a + len), sub)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smooth_supports_are_convex() {
        for seed in 0..20 {
            let h = random_smooth_support(256, seed, seed % 2 == 0).unwrap();
            assert!(h.is_convex(0.0));
            assert!(h.min() > 0.0);
            if seed % 2 == 0 {
                assert!(h.symmetry_defect() < 1e-12);
            }
        }
    }

    #[test]
    fn half_perturbations_symmetrize() {
        for seed in 0..5 {
            let v = random_half_perturbation(64, seed).unwrap();
            assert!(v.symmetrize().is_ok());
            assert!(v.values()[32..].iter().all(|&x| x == 0.0));
        }
    }

    #[test]
    fn windows_are_ordered() {
        for seed in 0..20 {
            let ((a, b), sub) = random_window(seed);
            assert!(b - a < PI);
            let mut last = a;
            for (s, e) in sub {
                assert!(last < s && s < e && e < b);
                last = e;
            }
        }
    }
}
