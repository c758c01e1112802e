//! Projection onto the convexity cone by halfplane intersection.
//!
//! With every `h_j > 0` the origin is interior to `W(h) = {x : x·u_j <= h_j}`,
//! and a halfplane is a facet of `W(h)` exactly when its polar point
//! `u_j / h_j` is a vertex of the convex hull of all polar points. The polar
//! points are already sorted by angle around the origin, so one Graham pass
//! recovers the active constraints.

use super::{grid_angle, GridSupport};
use crate::error::{Error, Result};

#[inline]
fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Indices of the halfplanes that are facets of `W(h)`, in angular order.
pub(crate) fn active_constraints(h: &[f64]) -> Result<Vec<usize>> {
    let n = h.len();
    if let Some(index) = h.iter().position(|&x| !(x > 0.0)) {
        return Err(Error::PositivityViolated {
            index,
            value: h[index],
        });
    }
    let polar: Vec<[f64; 2]> = (0..n)
        .map(|j| {
            let t = grid_angle(n, j);
            [t.cos() / h[j], t.sin() / h[j]]
        })
        .collect();
    // the polar point farthest from the origin is a hull vertex
    let start = (0..n)
        .min_by(|&a, &b| h[a].total_cmp(&h[b]))
        .expect("non-empty grid");

    let mut stack: Vec<usize> = Vec::with_capacity(n);
    for k in 0..=n {
        let j = (start + k) % n;
        while stack.len() >= 2 {
            let a = stack[stack.len() - 2];
            let b = stack[stack.len() - 1];
            if cross(polar[a], polar[b], polar[j]) > 0.0 {
                break;
            }
            stack.pop();
        }
        if k < n {
            stack.push(j);
        }
    }
    if stack.len() < 3 {
        return Err(Error::EmptyBody);
    }
    stack.sort_unstable();
    Ok(stack)
}

pub(super) fn convexify(h: &GridSupport) -> Result<GridSupport> {
    let values = h.samples();
    let n = values.len();
    let active = active_constraints(values)?;
    let mut out = values.to_vec();
    let m = active.len();
    for k in 0..m {
        let a = active[k];
        let b = active[(k + 1) % m];
        let gap = (b + n - a) % n;
        if gap <= 1 {
            continue;
        }
        let ta = grid_angle(n, a);
        let span = gap as f64 * super::grid_step(n);
        if span >= std::f64::consts::PI {
            return Err(Error::EmptyBody);
        }
        let denom = span.sin();
        for step in 1..gap {
            let j = (a + step) % n;
            let t = grid_angle(n, a + step) - ta;
            out[j] = (values[a] * (span - t).sin() + values[b] * t.sin()) / denom;
        }
    }
    GridSupport::new(out)
}
