//! Projected gradient descent of `J` over admissible support functions.
//!
//! Each step moves along the grid Riesz representative
//! `g = B (h'' + h) − A / h³` and projects back: symmetrize (optional),
//! floor at [`H_MIN`], convexify, symmetrize again. Step sizes come from a
//! backtracking line search with sufficient decrease, so values never
//! increase.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::functional::{area, gradient, mahler};
use crate::polygon::{make_parallelogram, PolygonSupport};
use crate::support::{check_same_grid, grid_step, GridSupport, H_MIN};

/// A step may not take any support value below this fraction of its value.
const MAX_SHRINK: f64 = 0.5;

#[derive(Clone, Debug, PartialEq)]
pub struct DescentOptions {
    /// Keep every iterate centrally symmetric.
    pub symmetric: bool,
    pub max_iters: usize,
    /// Initial trial step.
    pub step0: f64,
    /// Stop once the projected gradient has L² norm at most this.
    pub tol_grad: f64,
    /// Stop once the accepted step is below this.
    pub tol_step: f64,
    /// Sufficient-decrease constant of the line search.
    pub armijo: f64,
    /// Rescale to the initial area every this many iterations (0 disables).
    pub renormalize_every: usize,
    /// Keep a body snapshot every this many iterations (0 disables).
    pub snapshot_every: usize,
    /// Amplitude of a random smooth perturbation applied to the start.
    pub initial_kick: f64,
    pub seed: u64,
    /// Number of largest cells in the concentration statistic.
    pub concentration_k: usize,
}

impl Default for DescentOptions {
    fn default() -> Self {
        Self {
            symmetric: true,
            max_iters: 5000,
            step0: 1e-3,
            tol_grad: 1e-7,
            tol_step: 1e-12,
            armijo: 1e-4,
            renormalize_every: 50,
            snapshot_every: 0,
            initial_kick: 0.0,
            seed: 0,
            concentration_k: 4,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    GradientSmall,
    StepSmall,
    MaxIters,
}

impl StopReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            StopReason::GradientSmall => "gradient_small",
            StopReason::StepSmall => "step_small",
            StopReason::MaxIters => "max_iters",
        }
    }
}

/// One row of the descent record.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub value: f64,
    /// Accepted step size (0 for the start).
    pub step: f64,
    pub topk_fraction: f64,
    pub atom_count: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DescentTrace {
    pub records: Vec<IterationRecord>,
    pub snapshots: Vec<(usize, GridSupport)>,
    pub initial: GridSupport,
    pub final_body: GridSupport,
    pub stop_reason: StopReason,
    /// L² norm of the last projected gradient.
    pub projected_gradient: f64,
}

impl DescentTrace {
    pub fn values(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.value).collect()
    }

    pub fn final_value(&self) -> f64 {
        self.records.last().map_or(f64::NAN, |r| r.value)
    }
}

fn l2_distance(a: &[f64], b: &[f64]) -> f64 {
    let dt = grid_step(a.len());
    (a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>() * dt).sqrt()
}

fn project(samples: Vec<f64>, symmetric: bool) -> Result<GridSupport> {
    let mut h = GridSupport::new(samples)?;
    if symmetric {
        h = h.symmetrize();
    }
    let floored = h.samples().iter().map(|x| x.max(H_MIN)).collect();
    let mut h = GridSupport::new(floored)?.convexify()?;
    if symmetric {
        h = h.symmetrize();
    }
    Ok(h)
}

/// Random smooth perturbation built from low even harmonics (or all low
/// harmonics without symmetry), with sup norm at most `amplitude`.
fn kick(n: usize, amplitude: f64, symmetric: bool, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let modes: Vec<(f64, f64, f64)> = (1..=4)
        .map(|k| {
            let freq = if symmetric { 2 * k } else { k + 1 } as f64;
            let w = 1.0 / (k * k) as f64;
            (freq, w * rng.gen_range(-1.0..1.0), w * rng.gen_range(-1.0..1.0))
        })
        .collect();
    let raw: Vec<f64> = (0..n)
        .map(|j| {
            let t = TAU * j as f64 / n as f64;
            modes.iter().map(|(f, a, b)| a * (f * t).cos() + b * (f * t).sin()).sum()
        })
        .collect();
    let top = raw.iter().map(|x: &f64| x.abs()).fold(0.0, f64::max).max(1e-300);
    raw.iter().map(|x| amplitude * x / top).collect()
}

/// Fraction of the total `h'' + h` mass carried by the `k` heaviest cells,
/// and the number of atoms at the default threshold.
pub fn concentration_report(h: &GridSupport, k: usize) -> Result<(f64, usize)> {
    let measure = h.curvature_measure(h.default_atom_threshold())?;
    let mut mu: Vec<f64> = h.cell_measures().into_iter().map(|x| x.max(0.0)).collect();
    let total: f64 = mu.iter().sum();
    mu.sort_by(|a, b| b.total_cmp(a));
    let top: f64 = mu.iter().take(k).sum();
    Ok((top / total, measure.atoms.len()))
}

/// `max_j |h1_j − h2_j|`, the Hausdorff distance of the two bodies on the grid.
pub fn hausdorff_distance(h1: &GridSupport, h2: &GridSupport) -> Result<f64> {
    check_same_grid(h1.n(), h2.n())?;
    Ok(h1
        .samples()
        .iter()
        .zip(h2.samples())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

pub fn descend(h0: &GridSupport, opts: &DescentOptions) -> Result<DescentTrace> {
    if h0.check_positive().is_err() || !h0.is_convex(crate::support::CONVEXITY_TOL) {
        return Err(Error::NonAdmissibleStart("start is not positive and convex".into()));
    }
    if opts.symmetric && !h0.is_symmetric(1e-12) {
        return Err(Error::NonAdmissibleStart(format!(
            "start is not centrally symmetric (defect {:e})",
            h0.symmetry_defect()
        )));
    }
    let n = h0.n();
    let mut h = if opts.initial_kick != 0.0 {
        let bump = kick(n, opts.initial_kick, opts.symmetric, opts.seed);
        project(
            h0.samples().iter().zip(&bump).map(|(x, b)| x + b).collect(),
            opts.symmetric,
        )?
    } else {
        project(h0.samples().to_vec(), opts.symmetric)?
    };
    let initial = h.clone();
    let target_area = area(&h)?;
    let mut value = mahler(&h)?;
    let (topk, atoms) = concentration_report(&h, opts.concentration_k)?;
    let mut records = vec![IterationRecord {
        iteration: 0,
        value,
        step: 0.0,
        topk_fraction: topk,
        atom_count: atoms,
    }];
    let mut snapshots = Vec::new();
    if opts.snapshot_every > 0 {
        snapshots.push((0, h.clone()));
    }
    let mut step = opts.step0;
    let mut stop_reason = StopReason::MaxIters;
    let mut projected_gradient = f64::INFINITY;

    for iteration in 1..=opts.max_iters {
        let g = gradient(&h)?;
        let mut s = (2.0 * step).max(opts.tol_step);
        let accepted = loop {
            let trial_samples: Vec<f64> =
                h.samples().iter().zip(&g).map(|(x, d)| x - s * d).collect();
            // the floor is a safety net, not a constraint the step may lean on
            let shrinks = trial_samples
                .iter()
                .zip(h.samples())
                .any(|(t, x)| *t < MAX_SHRINK * x);
            if shrinks {
                s *= 0.5;
                if s < opts.tol_step {
                    break None;
                }
                continue;
            }
            let trial = project(trial_samples, opts.symmetric)?;
            let moved = l2_distance(trial.samples(), h.samples());
            let trial_value = mahler(&trial)?;
            if trial_value <= value - opts.armijo / s * moved * moved {
                break Some((trial, trial_value, moved));
            }
            s *= 0.5;
            if s < opts.tol_step {
                break None;
            }
        };
        let Some((next, next_value, moved)) = accepted else {
            stop_reason = StopReason::StepSmall;
            break;
        };
        projected_gradient = moved / s;
        step = s;
        h = next;
        value = next_value;
        if opts.renormalize_every > 0 && iteration % opts.renormalize_every == 0 {
            let a = area(&h)?;
            h = h.scaled((target_area / a).sqrt());
            value = mahler(&h)?;
        }
        let (topk, atoms) = concentration_report(&h, opts.concentration_k)?;
        records.push(IterationRecord {
            iteration,
            value,
            step: s,
            topk_fraction: topk,
            atom_count: atoms,
        });
        if opts.snapshot_every > 0 && iteration % opts.snapshot_every == 0 {
            snapshots.push((iteration, h.clone()));
        }
        if projected_gradient <= opts.tol_grad {
            stop_reason = StopReason::GradientSmall;
            break;
        }
    }
    if projected_gradient.is_infinite() {
        // no step was taken: measure the gradient directly
        let g = gradient(&h)?;
        projected_gradient = (g.iter().map(|x| x * x).sum::<f64>() * grid_step(n)).sqrt();
        if projected_gradient <= opts.tol_grad {
            stop_reason = StopReason::GradientSmall;
        }
    }
    Ok(DescentTrace {
        records,
        snapshots,
        initial,
        final_body: h,
        stop_reason,
        projected_gradient,
    })
}

/// A parallelogram fitted to a symmetric body from its two heaviest antipodal
/// curvature directions.
#[derive(Clone, Debug, PartialEq)]
pub struct ParallelogramFit {
    pub parallelogram: PolygonSupport,
    /// Hausdorff distance between the body and the parallelogram after the
    /// linear map taking the parallelogram to `[−1, 1]²`.
    pub normalized_distance: f64,
    /// Grid Hausdorff distance in the original frame.
    pub distance: f64,
}

/// Fits the parallelogram whose normals are the two heaviest antipodal
/// curvature directions of `h` and whose support values are those of `h`.
pub fn fit_parallelogram(h: &GridSupport) -> Result<ParallelogramFit> {
    let n = h.n();
    let half = n / 2;
    let mu = h.cell_measures();
    // pair cell j with its antipode
    let mut pairs: Vec<(f64, usize)> = (0..half).map(|j| (mu[j] + mu[j + half], j)).collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let (mut ja, mut jb) = (pairs[0].1, pairs[1].1);
    if ja > jb {
        std::mem::swap(&mut ja, &mut jb);
    }
    let (ta, tb) = (h.angle(ja), h.angle(jb));
    let (ha, hb) = (h.samples()[ja], h.samples()[jb]);
    // rotate so the first normal sits at 0
    let frame = make_parallelogram(ha, hb, tb - ta)?;
    let c = ta.cos();
    let s = ta.sin();
    let parallelogram = frame.linear_image([[c, -s], [s, c]])?;
    let sampled = parallelogram.sample(n)?;
    let distance = hausdorff_distance(h, &sampled)?;

    // x ↦ (x·u_a/h_a, x·u_b/h_b) maps the parallelogram to the unit square;
    // the support of T K in direction φ is |Tᵀu| h_K(Tᵀu / |Tᵀu|)
    let rows = [
        [ta.cos() / ha, ta.sin() / ha],
        [tb.cos() / hb, tb.sin() / hb],
    ];
    let fine = 4 * n;
    let mut normalized_distance: f64 = 0.0;
    for k in 0..fine {
        let phi = TAU * k as f64 / fine as f64;
        let (cp, sp) = (phi.cos(), phi.sin());
        let w = [rows[0][0] * cp + rows[1][0] * sp, rows[0][1] * cp + rows[1][1] * sp];
        let len = w[0].hypot(w[1]);
        let image = len * h.eval(w[1].atan2(w[0]));
        let square = cp.abs() + sp.abs();
        normalized_distance = normalized_distance.max((image - square).abs());
    }
    Ok(ParallelogramFit {
        parallelogram,
        normalized_distance,
        distance,
    })
}
