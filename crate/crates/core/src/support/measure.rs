use std::f64::consts::TAU;

use super::{grid_angle, grid_step, GridSupport, CONVEXITY_TOL};
use crate::error::{Error, Result};

/// A point mass of `h'' + h`, merged from one or more adjacent grid cells.
#[derive(Clone, Debug, PartialEq)]
pub struct Atom {
    /// Mass-weighted mean angle of the merged cells, in `[0, 2π)`.
    pub angle: f64,
    pub mass: f64,
    /// `(cell index, cell mass)` for every merged cell, in angular order.
    pub cells: Vec<(usize, f64)>,
}

/// The nonnegative measure `h'' + h` split into atoms and a density.
///
/// `density[j]` is the absolutely continuous part at `θ_j` (zero on atom
/// cells), so the total mass is `Σ atoms + Δθ Σ density`.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureMeasure {
    pub atoms: Vec<Atom>,
    pub density: Vec<f64>,
}

impl CurvatureMeasure {
    pub(crate) fn from_grid(h: &GridSupport, atom_threshold: f64) -> Result<Self> {
        let mu = h.cell_measures();
        if let Some((cell, &measure)) = mu
            .iter()
            .enumerate()
            .find(|(_, &m)| m < -CONVEXITY_TOL)
        {
            return Err(Error::NonConvex { cell, measure });
        }
        let n = mu.len();
        let dt = grid_step(n);
        let heavy: Vec<bool> = mu.iter().map(|m| m / dt > atom_threshold).collect();

        let mut density: Vec<f64> = mu
            .iter()
            .zip(&heavy)
            .map(|(m, &is_atom)| if is_atom { 0.0 } else { m / dt })
            .collect();
        let mut atoms = Vec::new();
        if heavy.iter().all(|&x| x) {
            // Degenerate threshold: the whole circle is one run.
            density.iter_mut().for_each(|d| *d = 0.0);
            atoms.push(merge_run(&mu, 0, n));
            return Ok(Self { atoms, density });
        }
        // Start scanning just after a light cell so no run wraps past the start.
        let start = (0..n).find(|&j| !heavy[j]).unwrap() + 1;
        let mut k = 0;
        while k < n {
            let j = (start + k) % n;
            if heavy[j] {
                let mut len = 1;
                while len < n && heavy[(j + len) % n] {
                    len += 1;
                }
                atoms.push(merge_run(&mu, j, len));
                k += len;
            } else {
                k += 1;
            }
        }
        atoms.sort_by(|a, b| a.angle.total_cmp(&b.angle));
        Ok(Self { atoms, density })
    }

    pub fn n(&self) -> usize {
        self.density.len()
    }

    pub fn total_mass(&self) -> f64 {
        let dt = grid_step(self.n());
        self.atoms.iter().map(|a| a.mass).sum::<f64>() + dt * self.density.iter().sum::<f64>()
    }

    /// `Σ atoms + ∫ density` against the unit normal; zero for a closed body.
    pub fn closure_defect(&self) -> f64 {
        let n = self.n();
        let dt = grid_step(n);
        let (mut x, mut y) = (0.0, 0.0);
        for atom in &self.atoms {
            for &(j, m) in &atom.cells {
                let t = grid_angle(n, j);
                x += m * t.cos();
                y += m * t.sin();
            }
        }
        for (j, d) in self.density.iter().enumerate() {
            let t = grid_angle(n, j);
            x += dt * d * t.cos();
            y += dt * d * t.sin();
        }
        x.hypot(y)
    }

    /// Pairs grid samples `v` with the measure: `∫ v d(h'' + h)`.
    pub fn integrate(&self, v: &[f64]) -> f64 {
        let dt = grid_step(self.n());
        let atoms: f64 = self
            .atoms
            .iter()
            .flat_map(|a| a.cells.iter())
            .map(|&(j, m)| v[j] * m)
            .sum();
        atoms + dt * self.density.iter().zip(v).map(|(d, x)| d * x).sum::<f64>()
    }
}

fn merge_run(mu: &[f64], first: usize, len: usize) -> Atom {
    let n = mu.len();
    let dt = grid_step(n);
    let cells: Vec<(usize, f64)> = (0..len).map(|k| ((first + k) % n, mu[(first + k) % n])).collect();
    let mass: f64 = cells.iter().map(|c| c.1).sum();
    // unwrap angles relative to the first cell so runs crossing 0 average correctly
    let base = grid_angle(n, first);
    let mean_offset = if mass > 0.0 {
        cells
            .iter()
            .enumerate()
            .map(|(k, &(_, m))| k as f64 * dt * m)
            .sum::<f64>()
            / mass
    } else {
        0.5 * (len - 1) as f64 * dt
    };
    Atom {
        angle: (base + mean_offset).rem_euclid(TAU),
        mass,
        cells,
    }
}
