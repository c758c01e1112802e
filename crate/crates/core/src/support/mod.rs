//! Sampled 2π-periodic support functions on a uniform angular grid.
//!
//! A [`GridSupport`] stores `h(2πj/n)` for `j = 0..n`. The discrete curvature
//! operator used throughout the crate is
//!
//! ```text
//! (L h)_j = (h_{j+1} - 2 h_j + h_{j-1}) / s² + h_j,    s = 2 sin(Δθ/2)
//! ```
//!
//! a central second difference whose denominator is the chord length rather
//! than `Δθ`. It annihilates `cos θ` and `sin θ` exactly, so translations carry
//! no curvature, and `Δθ·(L h)_j` is a fixed multiple of the edge length of the
//! polygon `{x : x·u(θ_k) <= h_k}` at normal `j`. The cell measures therefore
//! satisfy the Minkowski closure identity and `Σ_j Δθ (L h)_j = Δθ Σ_j h_j`
//! to rounding.

mod convexify;
mod measure;

pub use measure::{Atom, CurvatureMeasure};

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};

/// Default number of grid samples.
pub const DEFAULT_GRID: usize = 720;
/// Positivity floor for bodies that contain the origin.
pub const H_MIN: f64 = 1e-6;
/// Cellwise tolerance on `h'' + h >= 0`.
pub const CONVEXITY_TOL: f64 = 1e-9;
/// Default atom threshold, as a multiple of the mean density.
pub const DEFAULT_ATOM_FACTOR: f64 = 50.0;

fn check_grid_len(n: usize) -> Result<()> {
    if n < 8 || !n.is_multiple_of(2) {
        return Err(Error::InvalidGrid(format!(
            "grid size must be even and at least 8, got {n}"
        )));
    }
    Ok(())
}

/// Angular step `2π/n`.
#[inline]
pub fn grid_step(n: usize) -> f64 {
    TAU / n as f64
}

/// Angle of grid point `j`.
#[inline]
pub fn grid_angle(n: usize, j: usize) -> f64 {
    TAU * j as f64 / n as f64
}

/// Applies the discrete curvature operator `L` to periodic samples.
pub fn curvature_operator(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let s = 2.0 * (0.5 * grid_step(n)).sin();
    let inv_s2 = 1.0 / (s * s);
    (0..n)
        .map(|j| {
            let prev = values[(j + n - 1) % n];
            let next = values[(j + 1) % n];
            (next - 2.0 * values[j] + prev) * inv_s2 + values[j]
        })
        .collect()
}

/// Discrete cell measures `μ_j = Δθ·(L h)_j` of the measure `h'' + h`.
pub fn cell_measures(values: &[f64]) -> Vec<f64> {
    let dt = grid_step(values.len());
    curvature_operator(values).into_iter().map(|l| l * dt).collect()
}

/// A support function sampled on the uniform grid `θ_j = 2πj/n`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSupport {
    samples: Vec<f64>,
}

impl GridSupport {
    /// Wraps samples; `n` must be even and at least 8, every sample finite.
    pub fn new(samples: Vec<f64>) -> Result<Self> {
        check_grid_len(samples.len())?;
        if let Some(j) = samples.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidGrid(format!("sample {j} is not finite")));
        }
        Ok(Self { samples })
    }

    pub fn from_fn(n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new((0..n).map(|j| f(grid_angle(n, j))).collect())
    }

    /// Support function of the disc of radius `r` centred at the origin.
    pub fn constant(n: usize, r: f64) -> Result<Self> {
        Self::new(vec![r; n])
    }

    pub fn n(&self) -> usize {
        self.samples.len()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn step(&self) -> f64 {
        grid_step(self.n())
    }

    pub fn angle(&self, j: usize) -> f64 {
        grid_angle(self.n(), j)
    }

    pub fn min(&self) -> f64 {
        self.samples.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.samples.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Fails with `PositivityViolated` if any sample is below [`H_MIN`].
    pub fn check_positive(&self) -> Result<()> {
        match self.samples.iter().position(|&x| x < H_MIN) {
            Some(index) => Err(Error::PositivityViolated {
                index,
                value: self.samples[index],
            }),
            None => Ok(()),
        }
    }

    pub fn scaled(&self, r: f64) -> Self {
        Self {
            samples: self.samples.iter().map(|x| x * r).collect(),
        }
    }

    /// `h + t v` without any admissibility check.
    pub fn perturbed(&self, v: &Perturbation, t: f64) -> Result<Self> {
        check_same_grid(self.n(), v.n())?;
        Ok(Self {
            samples: self
                .samples
                .iter()
                .zip(v.values())
                .map(|(h, w)| h + t * w)
                .collect(),
        })
    }

    /// Evaluates `h` at an arbitrary angle.
    ///
    /// Between two grid angles the interpolant is the unique `ρ cos(θ - α)`
    /// through the bracketing samples, i.e. the support function of the
    /// vertex where the two supporting lines meet.
    pub fn eval(&self, theta: f64) -> f64 {
        let n = self.n();
        let dt = self.step();
        let x = theta.rem_euclid(TAU) / dt;
        let nearest = x.round();
        if (x - nearest).abs() < 1e-12 {
            return self.samples[nearest as usize % n];
        }
        let j = (x.floor() as usize).min(n - 1);
        let offset = (x - j as f64) * dt;
        let h0 = self.samples[j];
        let h1 = self.samples[(j + 1) % n];
        (h0 * (dt - offset).sin() + h1 * offset.sin()) / dt.sin()
    }

    pub fn curvature(&self) -> Vec<f64> {
        curvature_operator(&self.samples)
    }

    pub fn cell_measures(&self) -> Vec<f64> {
        cell_measures(&self.samples)
    }

    /// True iff every discrete cell measure is at least `-tol`.
    pub fn is_convex(&self, tol: f64) -> bool {
        self.first_nonconvex_cell(tol).is_none()
    }

    pub(crate) fn first_nonconvex_cell(&self, tol: f64) -> Option<(usize, f64)> {
        self.cell_measures()
            .into_iter()
            .enumerate()
            .find(|&(_, m)| m < -tol)
    }

    pub(crate) fn check_convex(&self) -> Result<()> {
        match self.first_nonconvex_cell(CONVEXITY_TOL) {
            Some((cell, measure)) => Err(Error::NonConvex { cell, measure }),
            None => Ok(()),
        }
    }

    /// Decomposes `h'' + h` into atoms and a density (see [`CurvatureMeasure`]).
    pub fn curvature_measure(&self, atom_threshold: f64) -> Result<CurvatureMeasure> {
        CurvatureMeasure::from_grid(self, atom_threshold)
    }

    /// 50 times the mean density of `h'' + h`.
    pub fn default_atom_threshold(&self) -> f64 {
        let total: f64 = self.cell_measures().iter().sum();
        DEFAULT_ATOM_FACTOR * total / TAU
    }

    /// Support function of `{x : x·u(θ_j) <= h_j for all j}`: the largest
    /// convex support function below `h`.
    pub fn convexify(&self) -> Result<Self> {
        convexify::convexify(self)
    }

    /// Antipodal average `(h(θ) + h(θ + π)) / 2`.
    pub fn symmetrize(&self) -> Self {
        let n = self.n();
        let half = n / 2;
        Self {
            samples: (0..n)
                .map(|j| 0.5 * (self.samples[j] + self.samples[(j + half) % n]))
                .collect(),
        }
    }

    /// `max_j |h(θ_j) - h(θ_j + π)|`.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.n();
        let half = n / 2;
        (0..half)
            .map(|j| (self.samples[j] - self.samples[j + half]).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.symmetry_defect() <= tol
    }
}

pub(crate) fn check_same_grid(left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(Error::GridMismatch { left, right });
    }
    Ok(())
}

/// A deformation `v` sampled on the same grid as the body it perturbs.
#[derive(Clone, Debug, PartialEq)]
pub struct Perturbation {
    values: Vec<f64>,
}

/// Discrete norms of a perturbation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Norms {
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
    pub h1_seminorm: f64,
}

impl Perturbation {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        check_grid_len(values.len())?;
        if let Some(j) = values.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidGrid(format!("value {j} is not finite")));
        }
        Ok(Self { values })
    }

    pub fn from_fn(n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new((0..n).map(|j| f(grid_angle(n, j))).collect())
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(vec![0.0; n])
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * t).collect(),
        }
    }

    /// Trapezoid L¹, L², sup norm and forward-difference H¹ seminorm.
    pub fn norms(&self) -> Norms {
        let n = self.n();
        let dt = grid_step(n);
        let l1 = self.values.iter().map(|v| v.abs()).sum::<f64>() * dt;
        let l2 = (self.values.iter().map(|v| v * v).sum::<f64>() * dt).sqrt();
        let linf = self.values.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let h1 = ((0..n)
            .map(|j| {
                let d = (self.values[(j + 1) % n] - self.values[j]) / dt;
                d * d
            })
            .sum::<f64>()
            * dt)
            .sqrt();
        Norms {
            l1,
            l2,
            linf,
            h1_seminorm: h1,
        }
    }

    /// Extends a deformation supported in `(0, π)` to the antipodal half
    /// circle, `ṽ(θ + π) = ṽ(θ) = v(θ)` for `θ ∈ (0, π)`. For a centrally
    /// symmetric `h`, `h + t ṽ` stays centrally symmetric.
    pub fn symmetrize(&self) -> Result<Self> {
        let n = self.n();
        let half = n / 2;
        let scale = self.values.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let outside: f64 = std::iter::once(0)
            .chain(half..n)
            .map(|j| self.values[j].abs())
            .sum::<f64>()
            * grid_step(n);
        if outside > 1e-12 * scale.max(1e-300) * PI {
            return Err(Error::UnsupportedPerturbation { mass: outside });
        }
        let mut values = vec![0.0; n];
        values[1..half].copy_from_slice(&self.values[1..half]);
        values[half + 1..].copy_from_slice(&self.values[1..half]);
        Ok(Self { values })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn square(n: usize) -> GridSupport {
        GridSupport::from_fn(n, |t| t.cos().abs() + t.sin().abs()).unwrap()
    }

    #[test]
    fn rejects_odd_or_small_grids() {
        assert!(GridSupport::new(vec![1.0; 7]).is_err());
        assert!(GridSupport::new(vec![1.0; 6]).is_err());
        assert!(GridSupport::new(vec![1.0; 9]).is_err());
        assert!(GridSupport::new(vec![f64::NAN; 8]).is_err());
    }

    #[test]
    fn eval_constant_and_grid_points() {
        // off-grid the cone interpolant is the circumscribed polygon's support,
        // within (Δθ/2)²/2 of the disc
        let h = GridSupport::constant(720, 1.0).unwrap();
        assert!((h.eval(0.3) - 1.0).abs() < 1e-5);
        let h = square(64);
        for j in 0..64 {
            assert_eq!(h.eval(h.angle(j)), h.samples()[j]);
        }
        assert_eq!(h.eval(-TAU + h.angle(3)), h.samples()[3]);
        assert_eq!(h.eval(TAU), h.samples()[0]);
    }

    #[test]
    fn eval_square_off_grid_converges() {
        // 1022 is not a multiple of 8 so π/4 falls strictly between samples.
        for n in [102usize, 1022, 10222] {
            let h = square(n);
            let err = (h.eval(PI / 4.0) - 2f64.sqrt()).abs();
            assert!(err < 2.0 * h.step() * h.step(), "n={n} err={err}");
        }
    }

    #[test]
    fn operator_annihilates_first_harmonics() {
        let h = GridSupport::from_fn(720, |t| 0.3 * t.cos() - 0.7 * t.sin()).unwrap();
        for l in h.curvature() {
            assert!(l.abs() < 1e-9);
        }
    }

    #[test]
    fn convexity_examples() {
        assert!(GridSupport::constant(720, 1.0).unwrap().is_convex(1e-9));
        let bad = GridSupport::from_fn(720, |t| 1.0 + 0.5 * (2.0 * t).cos()).unwrap();
        assert!(!bad.is_convex(1e-9));
        assert!(square(720).is_convex(1e-9));
    }

    #[test]
    fn symmetrize_body_examples() {
        let disc = GridSupport::constant(64, 1.0).unwrap();
        assert_eq!(disc.symmetrize(), disc);
        let shifted = GridSupport::from_fn(64, |t| 1.0 + 0.2 * t.cos()).unwrap();
        for x in shifted.symmetrize().samples() {
            assert_relative_eq!(*x, 1.0, epsilon = 1e-15);
        }
        let sq = square(64);
        let s = sq.symmetrize();
        for (a, b) in s.samples().iter().zip(sq.samples()) {
            assert_relative_eq!(*a, *b, epsilon = 1e-15);
        }
        assert_eq!(s.symmetrize(), s);
    }

    #[test]
    fn norms_examples() {
        let one = Perturbation::new(vec![1.0; 8]).unwrap().norms();
        assert_relative_eq!(one.l1, TAU, epsilon = 1e-14);
        assert_relative_eq!(one.l2, TAU.sqrt(), epsilon = 1e-14);
        assert_eq!(one.linf, 1.0);
        assert_eq!(one.h1_seminorm, 0.0);

        let c = Perturbation::from_fn(1024, f64::cos).unwrap().norms();
        assert!((c.l2 - PI.sqrt()).abs() < 1e-6);
        // forward differences of cos carry a sinc(Δθ/2) factor
        assert!((c.h1_seminorm - PI.sqrt()).abs() < 1e-5);

        let s3 = Perturbation::from_fn(1024, |t| (3.0 * t).sin()).unwrap().norms();
        assert!((s3.h1_seminorm - 3.0 * PI.sqrt()).abs() < 1e-4);
    }

    #[test]
    fn symmetrize_perturbation_examples() {
        let n = 64;
        let z = Perturbation::zeros(n).unwrap();
        assert_eq!(z.symmetrize().unwrap(), z);

        let bump = Perturbation::from_fn(n, |t| {
            let d = t - PI / 2.0;
            if d.abs() < 0.5 {
                (1.0 - (d / 0.5).powi(2)).powi(2)
            } else {
                0.0
            }
        })
        .unwrap();
        let sym = bump.symmetrize().unwrap();
        assert_eq!(sym.values()[16], bump.values()[16]);
        assert_eq!(sym.values()[48], bump.values()[16]);
        let (a, b) = (bump.norms().l2, sym.norms().l2);
        assert_relative_eq!(b * b, 2.0 * a * a, max_relative = 1e-14);

        let full = Perturbation::from_fn(n, f64::cos).unwrap();
        assert!(matches!(
            full.symmetrize(),
            Err(Error::UnsupportedPerturbation { .. })
        ));
    }
}
