//! The Santaló point: the interior translation minimizing the polar area.

use super::{polar_area_derivatives, polar_area_of, Point, PolygonSupport};
use crate::error::{Error, Result};

const MAX_ITERS: usize = 100;
/// Stop once the gradient norm is below this.
pub const GRADIENT_TOL: f64 = 1e-10;
/// Translated support values are kept above this floor.
const H_FLOOR: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SantaloPoint {
    pub point: Point,
    /// `|(P − z)°|` at the minimizer.
    pub polar_area: f64,
    pub gradient_norm: f64,
    pub iterations: usize,
}

fn shifted(p: &PolygonSupport, z: Point) -> Vec<f64> {
    p.normals()
        .iter()
        .zip(p.support_values())
        .map(|(&t, &h)| h - z[0] * t.cos() - z[1] * t.sin())
        .collect()
}

/// Damped Newton on `z ↦ Σ sin g_i / (2 h̃_i h̃_{i+1})`, `h̃ = h − z·u`,
/// started at the vertex average.
pub fn santalo_point(p: &PolygonSupport) -> Result<SantaloPoint> {
    let normals = p.normals();
    let vertices = p.to_vertices();
    let m = vertices.len() as f64;
    let mut z = [
        vertices.iter().map(|v| v[0]).sum::<f64>() / m,
        vertices.iter().map(|v| v[1]).sum::<f64>() / m,
    ];
    let units: Vec<Point> = normals.iter().map(|t| [t.cos(), t.sin()]).collect();
    for iteration in 0..=MAX_ITERS {
        let h = shifted(p, z);
        if h.iter().any(|&x| !(x > H_FLOOR)) {
            return Err(Error::NotBounded);
        }
        let value = polar_area_of(normals, &h);
        let (gb, hb) = polar_area_derivatives(normals, &h);
        // chain rule through ∂h̃_i/∂z = −u_i
        let mut g = [0.0; 2];
        let mut hz = [[0.0; 2]; 2];
        for i in 0..units.len() {
            g[0] -= gb[i] * units[i][0];
            g[1] -= gb[i] * units[i][1];
            for j in 0..units.len() {
                let w = hb[(i, j)];
                if w == 0.0 {
                    continue;
                }
                for r in 0..2 {
                    for c in 0..2 {
                        hz[r][c] += w * units[i][r] * units[j][c];
                    }
                }
            }
        }
        let gradient_norm = g[0].hypot(g[1]);
        if gradient_norm <= GRADIENT_TOL {
            return Ok(SantaloPoint {
                point: z,
                polar_area: value,
                gradient_norm,
                iterations: iteration,
            });
        }
        if iteration == MAX_ITERS {
            break;
        }
        let det = hz[0][0] * hz[1][1] - hz[0][1] * hz[1][0];
        let mut d = [
            -(hz[1][1] * g[0] - hz[0][1] * g[1]) / det,
            -(hz[0][0] * g[1] - hz[1][0] * g[0]) / det,
        ];
        if !(det > 0.0) || !d[0].is_finite() || !d[1].is_finite() {
            d = [-g[0], -g[1]];
        }
        let slope = g[0] * d[0] + g[1] * d[1];
        let mut t = 1.0;
        loop {
            let trial = [z[0] + t * d[0], z[1] + t * d[1]];
            let ht = shifted(p, trial);
            if ht.iter().all(|&x| x > H_FLOOR) {
                let f = polar_area_of(normals, &ht);
                if f <= value + 1e-4 * t * slope || t < 1e-12 {
                    z = trial;
                    break;
                }
            }
            t *= 0.5;
            if t < 1e-16 {
                return Err(Error::NoConvergence("Santaló line search failed".into()));
            }
        }
    }
    Err(Error::NoConvergence(format!(
        "Santaló point not found in {MAX_ITERS} Newton steps"
    )))
}

/// `P(K) = |K| · min_z |(K − z)°|` together with the minimizer.
pub fn nonsymmetric_mahler(p: &PolygonSupport) -> Result<(f64, SantaloPoint)> {
    let s = santalo_point(p)?;
    Ok((p.area() * s.polar_area, s))
}
