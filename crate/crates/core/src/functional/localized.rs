//! Deformations supported in a short window that move only the curvature
//! mass already present there.
//!
//! On a window `(a, a + L)` and for each subwindow `i`, `v_i` solves
//! `v_i'' + v_i = χ_i (h'' + h)` with `v_i(0) = v_i(L) = 0` (in the window
//! coordinate `t = θ − a`). Variation of parameters gives
//! `v_i(t) = Σ_k m_k sin(t − t_k) 1_{t > t_k} + c_i sin t` with
//! `c_i = −Σ_k m_k sin(L − t_k) / sin L`. A combination `Σ λ_i v_i` with both
//! one-sided boundary slopes zero vanishes identically near the window ends,
//! so its measure `v'' + v` is carried by the selected masses only.
//!
//! The two slope conditions are homogeneous in `λ`, so a nontrivial
//! combination needs at least three subwindows in general; with two the slope
//! matrix must be singular.

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::support::{grid_angle, grid_step, CurvatureMeasure, Perturbation};

/// Sine values below this count as a Dirichlet resonance.
pub const RESONANCE_TOL: f64 = 1e-6;
/// Cell masses below this fraction of the total mass are ignored.
pub const MASS_TOL: f64 = 1e-12;
/// Relative singular value below which the two-subwindow system is singular.
pub const SINGULAR_TOL: f64 = 1e-10;

/// One cell of the curvature measure moved by the deformation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointMass {
    pub cell: usize,
    /// Offset from the window start.
    pub offset: f64,
    pub mass: f64,
    pub subwindow: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalizedPerturbation {
    /// Window start `a` and length `L`.
    pub start: f64,
    pub length: f64,
    pub masses: Vec<PointMass>,
    /// Dirichlet correction `c_i` of each subwindow solution.
    pub corrections: Vec<f64>,
    /// Unit-norm combination coefficients.
    pub lambdas: Vec<f64>,
    /// `v'(a⁺)` and `v'(b⁻)` of the combination.
    pub slope_at_start: f64,
    pub slope_at_end: f64,
    /// Samples of `v` on the grid of the measure.
    pub perturbation: Perturbation,
}

impl LocalizedPerturbation {
    /// Subwindow solution `v_i` at window offset `t`.
    fn piece(&self, i: usize, t: f64) -> f64 {
        let free: f64 = self
            .masses
            .iter()
            .filter(|p| p.subwindow == i && t > p.offset)
            .map(|p| p.mass * (t - p.offset).sin())
            .sum();
        free + self.corrections[i] * t.sin()
    }

    /// `v(θ)`, zero outside the window.
    pub fn value(&self, theta: f64) -> f64 {
        let t = (theta - self.start).rem_euclid(TAU);
        if t <= 0.0 || t >= self.length {
            return 0.0;
        }
        (0..self.lambdas.len())
            .map(|i| self.lambdas[i] * self.piece(i, t))
            .sum()
    }

    /// Mass of `v'' + v` at each moved cell: `λ_i m`.
    pub fn induced_masses(&self) -> Vec<(usize, f64)> {
        self.masses
            .iter()
            .map(|p| (p.cell, self.lambdas[p.subwindow] * p.mass))
            .collect()
    }
}

fn offset_in_window(start: f64, theta: f64) -> f64 {
    (theta - start).rem_euclid(TAU)
}

/// Builds the localized deformation for `mu` on `window = (a, b)` from the
/// mass of `mu` inside each subwindow. Subwindows are given in absolute
/// angles, must lie in the window and must not overlap.
pub fn localized_perturbation(
    mu: &CurvatureMeasure,
    window: (f64, f64),
    subwindows: &[(f64, f64)],
) -> Result<LocalizedPerturbation> {
    let (a, b) = window;
    let length = b - a;
    if !(length > 0.0 && length < PI) {
        return Err(Error::InvalidWindow(format!(
            "length {length} is not in (0, π)"
        )));
    }
    if subwindows.len() < 2 {
        return Err(Error::InvalidWindow(format!(
            "{} subwindows given, at least two are needed",
            subwindows.len()
        )));
    }
    if length.sin() < RESONANCE_TOL {
        return Err(Error::Resonance { length });
    }
    let mut previous_end = 0.0;
    let mut bounds = Vec::with_capacity(subwindows.len());
    for (i, &(lo, hi)) in subwindows.iter().enumerate() {
        let (s0, s1) = (lo - a, hi - a);
        if !(s0 >= previous_end && s1 > s0 && s1 <= length) {
            return Err(Error::InvalidWindow(format!(
                "subwindow {i} = ({lo}, {hi}) is not ordered inside the window"
            )));
        }
        if (s1 - s0).sin().abs() < RESONANCE_TOL {
            return Err(Error::Resonance { length: s1 - s0 });
        }
        previous_end = s1;
        bounds.push((s0, s1));
    }

    // every cell of the measure as a point mass at its grid angle
    let n = mu.n();
    let dt = grid_step(n);
    let mut cell_mass: Vec<f64> = mu.density.iter().map(|d| d * dt).collect();
    for atom in &mu.atoms {
        for &(j, m) in &atom.cells {
            cell_mass[j] = m;
        }
    }
    // cells below rounding noise of the second difference carry no mass
    let floor = MASS_TOL * mu.total_mass().abs();
    let mut masses = Vec::new();
    for (i, &(s0, s1)) in bounds.iter().enumerate() {
        let before = masses.len();
        for (j, &m) in cell_mass.iter().enumerate() {
            let t = offset_in_window(a, grid_angle(n, j));
            if m > floor && t > s0 && t < s1 {
                masses.push(PointMass {
                    cell: j,
                    offset: t,
                    mass: m,
                    subwindow: i,
                });
            }
        }
        if masses.len() == before {
            return Err(Error::NoAtomInSubwindow { index: i });
        }
    }

    let k = bounds.len();
    let mut corrections = vec![0.0; k];
    let mut slopes = DMatrix::<f64>::zeros(2, k);
    for i in 0..k {
        let mine = masses.iter().filter(|p| p.subwindow == i);
        let at_end: f64 = mine.clone().map(|p| p.mass * (length - p.offset).sin()).sum();
        let slope_end: f64 = mine.map(|p| p.mass * (length - p.offset).cos()).sum();
        let c = -at_end / length.sin();
        corrections[i] = c;
        slopes[(0, i)] = c;
        slopes[(1, i)] = slope_end + c * length.cos();
    }

    let lambdas = null_vector(&slopes)?;
    let slope_at_start = (0..k).map(|i| lambdas[i] * slopes[(0, i)]).sum();
    let slope_at_end = (0..k).map(|i| lambdas[i] * slopes[(1, i)]).sum();

    let mut out = LocalizedPerturbation {
        start: a,
        length,
        masses,
        corrections,
        lambdas,
        slope_at_start,
        slope_at_end,
        perturbation: Perturbation::zeros(n)?,
    };
    let samples = (0..n).map(|j| out.value(grid_angle(n, j))).collect();
    out.perturbation = Perturbation::new(samples)?;
    Ok(out)
}

/// Unit vector spanning (part of) the kernel of a `2 × k` matrix, sign fixed
/// so the largest entry is positive.
fn null_vector(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    let gram = m.transpose() * m;
    let eig = gram.symmetric_eigen();
    let (idx, &smallest) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.total_cmp(y.1))
        .expect("non-empty system");
    let largest = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    if m.ncols() == 2 {
        let sigma = smallest.max(0.0).sqrt();
        if sigma > SINGULAR_TOL * largest.sqrt() {
            return Err(Error::DegenerateSystem { sigma });
        }
    }
    let mut v: Vec<f64> = eig.eigenvectors.column(idx).iter().cloned().collect();
    let pivot = v
        .iter()
        .cloned()
        .max_by(|x, y| x.abs().total_cmp(&y.abs()))
        .unwrap_or(1.0);
    if pivot < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    Ok(v)
}
