//! The planar Mahler functional `J(h) = A(h) B(h)` on sampled support
//! functions, with closed-form first and second variations.
//!
//! `A(h) = ½∫(h² − h'²)` is the area of the body and `B(h) = ∫ 1/(2h²)` the
//! area of its polar. Quadrature is the trapezoid rule on the periodic grid,
//! with `h'` taken as the forward chord difference `(h_{j+1} − h_j)/s`,
//! `s = 2 sin(Δθ/2)`. With that choice `A(h) = ½ Σ_j h_j μ_j` holds exactly,
//! where `μ` are the cell measures of `h'' + h`, and every variation below is
//! the exact derivative of the discrete functional.

mod localized;

pub use localized::{localized_perturbation, LocalizedPerturbation, PointMass};

use crate::error::{Error, Result};
use crate::support::{check_same_grid, curvature_operator, grid_step, GridSupport, Perturbation};

/// Symmetry tolerance for the symmetric second variation.
pub const SYMMETRY_TOL: f64 = 1e-9;
/// Slack allowed by [`check_concavity_bound`].
pub const CONCAVITY_SLACK: f64 = 1e-9;

fn weighted_sum(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `½ Σ h_j (L h)_j Δθ`, no convexity check.
fn area_unchecked(h: &[f64]) -> f64 {
    0.5 * grid_step(h.len()) * weighted_sum(h, &curvature_operator(h))
}

fn polar_area_unchecked(h: &[f64]) -> f64 {
    0.5 * grid_step(h.len()) * h.iter().map(|x| 1.0 / (x * x)).sum::<f64>()
}

/// Area `|K|` of the body with support function `h`.
pub fn area(h: &GridSupport) -> Result<f64> {
    h.check_convex()?;
    Ok(area_unchecked(h.samples()))
}

/// The literal trapezoid rule for `½∫(h² − h'²)` with central differences.
/// Agrees with [`area`] to `O(Δθ²)` on smooth bodies; kept as a diagnostic.
pub fn area_central_difference(h: &GridSupport) -> f64 {
    let s = h.samples();
    let n = s.len();
    let dt = grid_step(n);
    0.5 * dt
        * (0..n)
            .map(|j| {
                let d = (s[(j + 1) % n] - s[(j + n - 1) % n]) / (2.0 * dt);
                s[j] * s[j] - d * d
            })
            .sum::<f64>()
}

/// Area `|K°|` of the polar body.
pub fn polar_area(h: &GridSupport) -> Result<f64> {
    h.check_positive()?;
    Ok(polar_area_unchecked(h.samples()))
}

/// `M(K) = |K| |K°|`.
pub fn mahler(h: &GridSupport) -> Result<f64> {
    Ok(area(h)? * polar_area(h)?)
}

fn check_pair(h: &GridSupport, v: &Perturbation) -> Result<()> {
    check_same_grid(h.n(), v.n())?;
    h.check_positive()
}

/// `A'(h)·v = ∫ hv − h'v'`.
pub fn d_area(h: &GridSupport, v: &Perturbation) -> Result<f64> {
    check_pair(h, v)?;
    Ok(grid_step(h.n()) * weighted_sum(v.values(), &h.curvature()))
}

/// `B'(h)·v = −∫ v/h³`.
pub fn d_polar_area(h: &GridSupport, v: &Perturbation) -> Result<f64> {
    check_pair(h, v)?;
    Ok(-grid_step(h.n())
        * h.samples()
            .iter()
            .zip(v.values())
            .map(|(x, w)| w / (x * x * x))
            .sum::<f64>())
}

/// `J'(h)·v = B(h) A'(h)·v + A(h) B'(h)·v`.
pub fn d_mahler(h: &GridSupport, v: &Perturbation) -> Result<f64> {
    let (a, b) = (area(h)?, polar_area(h)?);
    Ok(b * d_area(h, v)? + a * d_polar_area(h, v)?)
}

/// `A''(h)·(v,v) = ∫ v² − v'²` (independent of `h`).
pub fn d2_area(h: &GridSupport, v: &Perturbation) -> Result<f64> {
    check_same_grid(h.n(), v.n())?;
    Ok(grid_step(v.n()) * weighted_sum(v.values(), &curvature_operator(v.values())))
}

/// `B''(h)·(v,v) = 3∫ v²/h⁴`.
pub fn d2_polar_area(h: &GridSupport, v: &Perturbation) -> Result<f64> {
    check_pair(h, v)?;
    Ok(3.0
        * grid_step(h.n())
        * h.samples()
            .iter()
            .zip(v.values())
            .map(|(x, w)| w * w / (x * x * x * x))
            .sum::<f64>())
}

/// Second variation of `J` together with both evaluations of its middle term.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SecondVariation {
    /// `B A'' + 2 A' B' + A B''`.
    pub value: f64,
    /// `2 (A'(h)·v)(B'(h)·v)`.
    pub middle_from_first_variations: f64,
    /// `−2 (∫ v d(h'' + h)) (∫ v/h³)`, pairing `v` with the curvature measure.
    pub middle_from_measure: f64,
}

impl SecondVariation {
    /// Relative disagreement of the two middle-term evaluations.
    pub fn middle_term_defect(&self) -> f64 {
        let a = self.middle_from_first_variations;
        let b = self.middle_from_measure;
        (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
    }
}

pub fn second_variation(h: &GridSupport, v: &Perturbation) -> Result<SecondVariation> {
    let (a, b) = (area(h)?, polar_area(h)?);
    let (da, db) = (d_area(h, v)?, d_polar_area(h, v)?);
    let (d2a, d2b) = (d2_area(h, v)?, d2_polar_area(h, v)?);
    let measure = h.curvature_measure(h.default_atom_threshold())?;
    let paired = measure.integrate(v.values());
    Ok(SecondVariation {
        value: b * d2a + 2.0 * da * db + a * d2b,
        middle_from_first_variations: 2.0 * da * db,
        // −∫ v/h³ = B'(h)·v
        middle_from_measure: 2.0 * paired * db,
    })
}

/// `J''(h)·(v,v)`.
pub fn d2_mahler(h: &GridSupport, v: &Perturbation) -> Result<f64> {
    let (a, b) = (area(h)?, polar_area(h)?);
    Ok(b * d2_area(h, v)? + 2.0 * d_area(h, v)? * d_polar_area(h, v)? + a * d2_polar_area(h, v)?)
}

/// `J''(h)·(ṽ,ṽ)` for the antipodal extension `ṽ` of a deformation `v`
/// supported in `(0, π)`, evaluated as `2A''B + 8A'B' + 2B''A` on `v`.
pub fn d2_mahler_symmetric(h: &GridSupport, v: &Perturbation) -> Result<f64> {
    let defect = h.symmetry_defect();
    if defect > SYMMETRY_TOL {
        return Err(Error::NotSymmetric { defect });
    }
    // validates the support of v
    v.symmetrize()?;
    let (a, b) = (area(h)?, polar_area(h)?);
    Ok(2.0 * d2_area(h, v)? * b
        + 8.0 * d_area(h, v)? * d_polar_area(h, v)?
        + 2.0 * d2_polar_area(h, v)? * a)
}

/// Constants of the local concavity estimate
/// `J''(h)·(v,v) <= C ‖v‖_∞ ‖v‖_1 − α |v|²_{H¹}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConcavityConstants {
    pub c: f64,
    pub alpha: f64,
}

/// `α = B(h)` and `C = B + 3A ‖h⁻⁴‖_∞ + 2 (h''+h)(T) ‖h⁻³‖_∞`.
pub fn concavity_constants(h: &GridSupport) -> Result<ConcavityConstants> {
    let (a, b) = (area(h)?, polar_area(h)?);
    let hmin = h.min();
    let mass = h.curvature_measure(h.default_atom_threshold())?.total_mass();
    let c = b + 3.0 * a / hmin.powi(4) + 2.0 * mass / hmin.powi(3);
    Ok(ConcavityConstants { c, alpha: b })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConcavityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl ConcavityCheck {
    fn new(lhs: f64, rhs: f64) -> Self {
        Self {
            lhs,
            rhs,
            holds: lhs <= rhs + CONCAVITY_SLACK,
        }
    }
}

/// Compares `J''(h)·(v,v)` with `C ‖v‖_∞ ‖v‖_1 − α |v|²_{H¹}`.
pub fn check_concavity_bound(h: &GridSupport, v: &Perturbation) -> Result<ConcavityCheck> {
    let k = concavity_constants(h)?;
    let norms = v.norms();
    let lhs = d2_mahler(h, v)?;
    let rhs = k.c * norms.linf * norms.l1 - k.alpha * norms.h1_seminorm.powi(2);
    Ok(ConcavityCheck::new(lhs, rhs))
}

/// Symmetric variant: `J''(h)·(ṽ,ṽ) <= 4C ‖v‖_∞ ‖v‖_1 − 2α |v|²_{H¹}`.
pub fn check_concavity_bound_symmetric(
    h: &GridSupport,
    v: &Perturbation,
) -> Result<ConcavityCheck> {
    let k = concavity_constants(h)?;
    let norms = v.norms();
    let lhs = d2_mahler_symmetric(h, v)?;
    let rhs = 4.0 * k.c * norms.linf * norms.l1 - 2.0 * k.alpha * norms.h1_seminorm.powi(2);
    Ok(ConcavityCheck::new(lhs, rhs))
}

/// Bound for deformations with `J'(h)·v = 0`: `C ‖v‖²_2 − α |v|²_{H¹}`.
pub fn check_concavity_bound_critical(
    h: &GridSupport,
    v: &Perturbation,
) -> Result<ConcavityCheck> {
    let k = concavity_constants(h)?;
    let norms = v.norms();
    let lhs = d2_mahler(h, v)?;
    let rhs = k.c * norms.l2.powi(2) - k.alpha * norms.h1_seminorm.powi(2);
    Ok(ConcavityCheck::new(lhs, rhs))
}

/// Riesz representative of `J'(h)` for the grid inner product
/// `⟨f, g⟩ = Δθ Σ f_j g_j`: `g = B (h'' + h) − A / h³`.
pub fn gradient(h: &GridSupport) -> Result<Vec<f64>> {
    h.check_positive()?;
    let a = area_unchecked(h.samples());
    let b = polar_area_unchecked(h.samples());
    Ok(h.curvature()
        .into_iter()
        .zip(h.samples())
        .map(|(l, x)| b * l - a / (x * x * x))
        .collect())
}
