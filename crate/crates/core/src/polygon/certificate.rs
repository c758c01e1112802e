//! Second-variation certificates for symmetric critical polygons.
//!
//! Moving the support value of edge `i` (and of its antipode) by `t` changes
//! only the edges `i − 1, i, i + 1` of each half. At a critical polygon the
//! second derivative of `J` along that move is `2 B · bracket`, where
//! `bracket = −sin(g_{i−1} + g_i)/(sin g_i sin g_{i−1}) − 4a_i²/A + 2a_i/h_i`.

use std::f64::consts::{FRAC_PI_2, PI};

use super::{mahler_of, wrap_angle, PolygonSupport};
use crate::error::{Error, Result};

/// Largest admissible first-order residual, scaled by the largest support value.
pub const CRITICAL_TOL: f64 = 1e-8;
/// Slack on the `θ_{i+1} − θ_{i−1} <= π` hypothesis.
pub const WIDE_TRIPLE_TOL: f64 = 1e-12;

/// The three normals around the certified edge and the two edge lengths on
/// the unit-square sides after affine normalization.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormalizedFrame {
    /// `(0, π/2, θ₂)`.
    pub angles: [f64; 3],
    /// Lengths of the edges with normals `0` and `π/2`, with `a₁ <= a₀`.
    pub masses: [f64; 2],
}

#[derive(Clone, Debug, PartialEq)]
pub struct Certificate {
    pub vertex_index: usize,
    /// Value of the deformation at the moved normal (always 1).
    pub deformation_value: f64,
    /// `J''(h)·(ṽ, ṽ)` along the single-edge move.
    pub quadratic_form: f64,
    pub bracket: f64,
    pub normalized_frame: Option<NormalizedFrame>,
}

fn critical_residual(p: &PolygonSupport) -> Result<f64> {
    let scale = p.support_values().iter().cloned().fold(0.0, f64::max);
    Ok(p.foc_residual()?
        .iter()
        .map(|x| x.abs())
        .fold(0.0, f64::max)
        * scale)
}

fn check_critical(p: &PolygonSupport) -> Result<()> {
    let residual = critical_residual(p)?;
    if residual > CRITICAL_TOL {
        return Err(Error::NotCritical { residual });
    }
    Ok(())
}

/// Bracket and quadratic form at edge `i` without the precondition checks.
fn evaluate(p: &PolygonSupport, i: usize) -> Result<Certificate> {
    let m = p.m();
    let prev = (i + m - 1) % m;
    let (g0, g1) = (p.gap(prev), p.gap(i));
    let span = g0 + g1;
    if span > PI + WIDE_TRIPLE_TOL {
        return Err(Error::WideTriple { index: i, span });
    }
    let a = p.masses()[i];
    let h = p.support_values()[i];
    let bracket = -span.sin() / (g1.sin() * g0.sin()) - 4.0 * a * a / p.area() + 2.0 * a / h;
    Ok(Certificate {
        vertex_index: i,
        deformation_value: 1.0,
        quadratic_form: 2.0 * p.polar_area() * bracket,
        bracket,
        normalized_frame: None,
    })
}

/// Certificate for moving edge `i` of a symmetric critical polygon.
pub fn simple_deformation_hessian(p: &PolygonSupport, i: usize) -> Result<Certificate> {
    if i >= p.m() {
        return Err(Error::InvalidPolygon(format!("edge {i} of {}", p.m())));
    }
    check_critical(p)?;
    evaluate(p, i)
}

/// Second central difference of `J` when the support values of edge `i` and
/// (for symmetric polygons) its antipode move by `±t`.
pub fn fd_quadratic_form(p: &PolygonSupport, i: usize, t: f64) -> f64 {
    let m = p.m();
    let normals = p.normals();
    let at = |s: f64| {
        let mut h = p.support_values().to_vec();
        h[i] += s;
        if p.is_symmetric() {
            h[(i + m / 2) % m] += s;
        }
        mahler_of(normals, &h)
    };
    (at(t) - 2.0 * at(0.0) + at(-t)) / (t * t)
}

/// Step-selected finite-difference value of the certified quadratic form.
///
/// Steps halve from `1e-2`; each adjacent pair gives a Richardson estimate, and
/// the estimate closest to its successor is returned. Large steps lose to
/// truncation on short edges, small ones to roundoff on large support values.
pub fn fd_quadratic_form_extrapolated(p: &PolygonSupport, i: usize) -> f64 {
    let plain: Vec<f64> = (0..9)
        .map(|k| fd_quadratic_form(p, i, 1e-2 / f64::from(1u32 << k)))
        .collect();
    let richardson: Vec<f64> = plain.windows(2).map(|w| (4.0 * w[1] - w[0]) / 3.0).collect();
    richardson
        .windows(2)
        .min_by(|a, b| (a[0] - a[1]).abs().total_cmp(&(b[0] - b[1]).abs()))
        .map_or(plain[0], |w| w[0])
}

/// Normalized image together with which original edge sits at `π/2`.
struct Normalized {
    polygon: PolygonSupport,
    middle_source: usize,
}

/// Rebuilds a symmetric polygon from per-edge `(normal, h)` pairs, pinning
/// the edges in `exact` to their exact normals with unit support value.
fn assemble(mut faces: Vec<(f64, f64)>, exact: [(usize, f64); 2]) -> Result<PolygonSupport> {
    let m = faces.len();
    for (k, angle) in exact {
        faces[k] = (angle, 1.0);
        faces[(k + m / 2) % m] = (angle + PI, 1.0);
    }
    for f in faces.iter_mut() {
        f.0 = wrap_angle(f.0);
    }
    faces.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (normals, h) = faces.into_iter().unzip();
    PolygonSupport::from_support(normals, h)
}

fn normalize(p: &PolygonSupport, i: usize) -> Result<Normalized> {
    p.check_symmetric()?;
    let m = p.m();
    let prev = (i + m - 1) % m;
    let (t0, t1) = (p.normals()[prev], p.normals()[i]);
    let (h0, h1) = (p.support_values()[prev], p.support_values()[i]);
    // x ↦ (x·u_{i−1}/h_{i−1}, x·u_i/h_i)
    let t = [
        [t0.cos() / h0, t0.sin() / h0],
        [t1.cos() / h1, t1.sin() / h1],
    ];
    let faces = p.image_faces(t)?;
    let q = assemble(faces.clone(), [(prev, 0.0), (i, FRAC_PI_2)])?;
    if q.masses()[1] <= q.masses()[0] {
        return Ok(Normalized {
            polygon: q,
            middle_source: i,
        });
    }
    // swap the axes: normal φ becomes π/2 − φ
    let swapped = faces
        .into_iter()
        .map(|(phi, h)| (FRAC_PI_2 - phi, h))
        .collect();
    Ok(Normalized {
        polygon: assemble(swapped, [(i, 0.0), (prev, FRAC_PI_2)])?,
        middle_source: prev,
    })
}

/// Linear image with edge `i − 1` at normal 0 and edge `i` at normal `π/2`
/// (or the reverse, whichever puts the shorter edge at `π/2`), both at unit
/// distance from the origin.
pub fn affine_normalize(p: &PolygonSupport, i: usize) -> Result<PolygonSupport> {
    if i >= p.m() {
        return Err(Error::InvalidPolygon(format!("edge {i} of {}", p.m())));
    }
    Ok(normalize(p, i)?.polygon)
}

/// Frame data of a normalized polygon (normals `0` and `π/2` at indices 0 and 1).
pub fn normalized_frame(q: &PolygonSupport) -> NormalizedFrame {
    let n = q.normals();
    let a = q.masses();
    NormalizedFrame {
        angles: [n[0], n[1], n[2]],
        masses: [a[0], a[1]],
    }
}

/// Scans every adjacent edge pair of a symmetric critical polygon and returns
/// the most negative single-edge certificate, or `None` when no negative one
/// exists. Parallelograms always give `None`.
pub fn certify_nonminimal(p: &PolygonSupport) -> Result<Option<Certificate>> {
    p.check_symmetric()?;
    check_critical(p)?;
    if p.m() == 4 {
        return Ok(None);
    }
    let mut best: Option<Certificate> = None;
    for i in 0..p.m() {
        let normalized = normalize(p, i)?;
        let mut cert = match evaluate(p, normalized.middle_source) {
            Ok(c) => c,
            Err(Error::WideTriple { .. }) => continue,
            Err(e) => return Err(e),
        };
        cert.normalized_frame = Some(normalized_frame(&normalized.polygon));
        if best
            .as_ref()
            .is_none_or(|b| cert.quadratic_form < b.quadratic_form)
        {
            best = Some(cert);
        }
    }
    Ok(best.filter(|c| c.quadratic_form < 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polygon::{make_parallelogram, make_regular};
    use approx::assert_relative_eq;

    #[test]
    fn square_certificate_is_flat() {
        let q = make_regular(2, 1.0).unwrap();
        let c = simple_deformation_hessian(&q, 1).unwrap();
        assert!(c.bracket.abs() < 1e-15);
        assert!(c.quadratic_form.abs() < 1e-15);
        assert_eq!(certify_nonminimal(&q).unwrap(), None);
    }

    #[test]
    fn hexagon_certificate() {
        let h = make_regular(3, 1.0).unwrap();
        let c = simple_deformation_hessian(&h, 1).unwrap();
        assert_relative_eq!(c.bracket, -2.0 / (3.0 * 3f64.sqrt()), epsilon = 1e-14);
        assert_relative_eq!(c.quadratic_form, -2.0, epsilon = 1e-10);
        let fd = fd_quadratic_form(&h, 1, 1e-4);
        assert!((fd - c.quadratic_form).abs() < 1e-6 * 2.0);
        assert!((fd_quadratic_form_extrapolated(&h, 1) - c.quadratic_form).abs() < 1e-9);
        let best = certify_nonminimal(&h).unwrap().unwrap();
        assert_relative_eq!(best.quadratic_form, -2.0, epsilon = 1e-10);
        assert!(best.normalized_frame.is_some());
    }

    #[test]
    fn octagon_bracket_is_negative() {
        let p = make_regular(4, 1.0).unwrap();
        let c = simple_deformation_hessian(&p, 1).unwrap();
        assert!(c.bracket < 0.0);
        let fd = fd_quadratic_form(&p, 1, 1e-4);
        assert!((fd - c.quadratic_form).abs() < 1e-6 * c.quadratic_form.abs().max(1.0));
    }

    #[test]
    fn rectangle_normalizes_to_square() {
        let r = make_parallelogram(1.0, 2.0, FRAC_PI_2).unwrap();
        let q = affine_normalize(&r, 1).unwrap();
        for (t, e) in q.normals().iter().zip([0.0, FRAC_PI_2, PI, 1.5 * PI]) {
            assert_eq!(*t, e);
        }
        for a in q.masses() {
            assert_relative_eq!(*a, 2.0, epsilon = 1e-14);
        }
        assert_relative_eq!(q.mahler(), 8.0, epsilon = 1e-12);
    }

    #[test]
    fn normalization_orders_the_pair() {
        let p = make_regular(3, 1.0).unwrap();
        let h = p.support_values().to_vec();
        let mut h = h;
        // a critical-free polygon is fine for normalization
        h[1] = 1.1;
        h[4] = 1.1;
        let p = PolygonSupport::from_support(p.normals().to_vec(), h).unwrap();
        for i in 0..p.m() {
            let q = affine_normalize(&p, i).unwrap();
            let f = normalized_frame(&q);
            assert_eq!(f.angles[0], 0.0);
            assert_eq!(f.angles[1], FRAC_PI_2);
            assert!(f.masses[1] <= f.masses[0]);
            assert_relative_eq!(q.mahler(), p.mahler(), max_relative = 1e-10);
            assert!(q.area() < 4.0);
        }
    }

    #[test]
    fn non_critical_is_rejected() {
        let p = make_regular(3, 1.0).unwrap();
        let mut h = p.support_values().to_vec();
        h[1] = 1.1;
        h[4] = 1.1;
        let p = PolygonSupport::from_support(p.normals().to_vec(), h).unwrap();
        assert!(matches!(certify_nonminimal(&p), Err(Error::NotCritical { .. })));
        assert!(matches!(simple_deformation_hessian(&p, 0), Err(Error::NotCritical { .. })));
    }
}
