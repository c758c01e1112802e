//! Projection of a symmetric polygon onto the first-order critical set of `J`
//! for its own normals.

use nalgebra::{DMatrix, DVector};

use super::PolygonSupport;
use crate::error::{Error, Result};

const MAX_ITERS: usize = 500;
/// Target for the scaled reduced gradient.
const GRADIENT_TOL: f64 = 1e-13;
/// Edges shorter than this fraction of the largest support value count as lost.
const MIN_EDGE: f64 = 1e-6;

/// Reduced gradient and Hessian in the free pair values `h_1, …, h_{N−1}`
/// (`h_0` is held fixed, `h_{k+N} = h_k`).
fn reduced(p: &PolygonSupport) -> (DVector<f64>, DMatrix<f64>) {
    let half = p.m() / 2;
    let g = p.gradient();
    let h = p.hessian();
    let free = half - 1;
    let grad = DVector::from_fn(free, |r, _| g[r + 1] + g[r + 1 + half]);
    let hess = DMatrix::from_fn(free, free, |r, c| {
        let (i, j) = (r + 1, c + 1);
        h[(i, j)] + h[(i, j + half)] + h[(i + half, j)] + h[(i + half, j + half)]
    });
    (grad, hess)
}

fn with_pairs(p: &PolygonSupport, free: &DVector<f64>) -> Result<PolygonSupport> {
    let half = p.m() / 2;
    let mut h = p.support_values().to_vec();
    for (r, x) in free.iter().enumerate() {
        h[r + 1] = *x;
        h[r + 1 + half] = *x;
    }
    PolygonSupport::from_support(p.normals().to_vec(), h)
}

/// Maximizes `J` over symmetric support values with the normals of `p`
/// fixed, starting from `p`, by damped Newton steps. Fails when an edge
/// collapses on the way (the maximizer then has fewer edges).
pub fn project_to_critical(p: &PolygonSupport) -> Result<PolygonSupport> {
    p.check_symmetric()?;
    let half = p.m() / 2;
    let mut current = p.clone();
    if half < 2 {
        return Ok(current);
    }
    let mut damping = 1e-6;
    for _ in 0..MAX_ITERS {
        let scale = current.support_values().iter().cloned().fold(0.0, f64::max);
        let (g, h) = reduced(&current);
        if g.amax() * scale <= GRADIENT_TOL {
            let shortest = current.masses().iter().cloned().fold(f64::INFINITY, f64::min);
            if shortest <= MIN_EDGE * scale {
                return Err(Error::Degenerate(format!(
                    "an edge collapsed (length {shortest:e})"
                )));
            }
            return Ok(current);
        }
        let x = DVector::from_fn(half - 1, |r, _| current.support_values()[r + 1]);
        let value = current.mahler();
        let mut accepted = false;
        while damping < 1e12 {
            let system = -&h + DMatrix::identity(half - 1, half - 1) * damping * (1.0 + h.amax());
            let step = match system.cholesky() {
                Some(c) => c.solve(&g),
                None => {
                    damping *= 4.0;
                    continue;
                }
            };
            if let Ok(trial) = with_pairs(&current, &(&x + &step)) {
                // near the maximum J stalls at rounding level; the gradient
                // still decides
                let gain = trial.mahler() - value;
                let flatter = reduced(&trial).0.amax() < g.amax();
                if gain > 0.0 || (gain >= -1e-14 * value && flatter) {
                    let tiny = step.amax() <= 1e-15 * scale;
                    current = trial;
                    damping = (damping / 4.0).max(1e-12);
                    accepted = true;
                    if tiny {
                        return finish(current);
                    }
                    break;
                }
            }
            damping *= 4.0;
        }
        if !accepted {
            return finish(current);
        }
    }
    Err(Error::NoConvergence("critical projection hit the iteration limit".into()))
}

fn finish(p: PolygonSupport) -> Result<PolygonSupport> {
    let scale = p.support_values().iter().cloned().fold(0.0, f64::max);
    let residual = p.foc_residual()?.iter().map(|x| x.abs()).fold(0.0, f64::max) * scale;
    if residual > super::CRITICAL_TOL {
        return Err(Error::NoConvergence(format!(
            "critical projection stalled at residual {residual:e}"
        )));
    }
    Ok(p)
}
