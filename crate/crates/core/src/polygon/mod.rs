//! Exact Mahler calculus on convex polygons given by their outer normals and
//! support values.
//!
//! Normals `θ_0 < … < θ_{m−1}` lie in `[0, 2π)` and the gap after normal `i`
//! is `g_i = θ_{i+1} − θ_i` (cyclically). The curvature measure of the
//! polygon is `Σ a_i δ_{θ_i}` with `a_i` the length of edge `i`, and vertex
//! `A_i` joins edge `i` to edge `i + 1`.

mod certificate;
mod critical;
mod santalo;

pub use certificate::{
    affine_normalize, certify_nonminimal, fd_quadratic_form, fd_quadratic_form_extrapolated, normalized_frame,
    simple_deformation_hessian, Certificate, NormalizedFrame, CRITICAL_TOL, WIDE_TRIPLE_TOL,
};
pub use critical::project_to_critical;
pub use santalo::{nonsymmetric_mahler, santalo_point, SantaloPoint};

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::support::GridSupport;

/// Relative tolerance for symmetry detection and mass consistency.
pub const POLYGON_TOL: f64 = 1e-10;
/// Smallest normal gap produced by the random constructors.
pub const MIN_RANDOM_GAP: f64 = 1e-3;

pub type Point = [f64; 2];

#[derive(Clone, Debug, PartialEq)]
pub struct PolygonSupport {
    normals: Vec<f64>,
    support_values: Vec<f64>,
    masses: Vec<f64>,
    symmetric: bool,
}

#[inline]
fn cross(a: Point, b: Point) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

#[inline]
fn unit(theta: f64) -> Point {
    [theta.cos(), theta.sin()]
}

fn gap(normals: &[f64], i: usize) -> f64 {
    let m = normals.len();
    if i + 1 < m {
        normals[i + 1] - normals[i]
    } else {
        normals[0] + TAU - normals[m - 1]
    }
}

/// Edge lengths `a_i = (h_{i−1} − h_i cos g_{i−1})/sin g_{i−1} + (h_{i+1} − h_i cos g_i)/sin g_i`.
fn edge_lengths(normals: &[f64], h: &[f64]) -> Vec<f64> {
    let m = normals.len();
    (0..m)
        .map(|i| {
            let prev = (i + m - 1) % m;
            let next = (i + 1) % m;
            let (gp, gn) = (gap(normals, prev), gap(normals, i));
            (h[prev] - h[i] * gp.cos()) / gp.sin() + (h[next] - h[i] * gn.cos()) / gn.sin()
        })
        .collect()
}

fn polar_area_of(normals: &[f64], h: &[f64]) -> f64 {
    let m = normals.len();
    (0..m)
        .map(|i| gap(normals, i).sin() / (2.0 * h[i] * h[(i + 1) % m]))
        .sum()
}

fn area_of(normals: &[f64], h: &[f64]) -> f64 {
    0.5 * edge_lengths(normals, h)
        .iter()
        .zip(h)
        .map(|(a, x)| a * x)
        .sum::<f64>()
}

/// `J` for raw support data, no validation.
pub(crate) fn mahler_of(normals: &[f64], h: &[f64]) -> f64 {
    area_of(normals, h) * polar_area_of(normals, h)
}

/// `∇B` and `∇²B` with respect to the support values.
fn polar_area_derivatives(normals: &[f64], h: &[f64]) -> (Vec<f64>, DMatrix<f64>) {
    let m = normals.len();
    let mut grad = vec![0.0; m];
    let mut hess = DMatrix::zeros(m, m);
    for i in 0..m {
        let j = (i + 1) % m;
        let s = gap(normals, i).sin();
        let (x, y) = (h[i], h[j]);
        grad[i] -= s / (2.0 * x * x * y);
        grad[j] -= s / (2.0 * x * y * y);
        hess[(i, i)] += s / (x * x * x * y);
        hess[(j, j)] += s / (x * y * y * y);
        let off = s / (2.0 * x * x * y * y);
        hess[(i, j)] += off;
        hess[(j, i)] += off;
    }
    (grad, hess)
}

/// Matrix of the quadratic form `2A` in the support values; `M h = a`.
fn area_matrix(normals: &[f64]) -> DMatrix<f64> {
    let m = normals.len();
    let mut out = DMatrix::zeros(m, m);
    for i in 0..m {
        let j = (i + 1) % m;
        let g = gap(normals, i);
        let cot = g.cos() / g.sin();
        out[(i, i)] -= cot;
        out[(j, j)] -= cot;
        out[(i, j)] += 1.0 / g.sin();
        out[(j, i)] += 1.0 / g.sin();
    }
    out
}

impl PolygonSupport {
    /// Builds a polygon from strictly increasing normals in `[0, 2π)` and
    /// positive support values. Every normal gap must lie in `(0, π)` and
    /// every halfplane must be a facet.
    pub fn from_support(normals: Vec<f64>, support_values: Vec<f64>) -> Result<Self> {
        let m = normals.len();
        if m < 3 || support_values.len() != m {
            return Err(Error::InvalidPolygon(format!(
                "{m} normals and {} support values",
                support_values.len()
            )));
        }
        if normals.iter().chain(&support_values).any(|x| !x.is_finite()) {
            return Err(Error::InvalidPolygon("non-finite input".into()));
        }
        if normals[0] < 0.0 || normals[m - 1] >= TAU {
            return Err(Error::InvalidPolygon("normals must lie in [0, 2π)".into()));
        }
        for i in 0..m {
            let g = gap(&normals, i);
            if !(g > 0.0 && g < PI) {
                return Err(Error::DegenerateGap { gap: g });
            }
        }
        if let Some(index) = support_values.iter().position(|&x| !(x > 0.0)) {
            return Err(Error::OriginNotInterior {
                index,
                value: support_values[index],
            });
        }
        let masses = edge_lengths(&normals, &support_values);
        let scale = support_values.iter().cloned().fold(0.0, f64::max);
        if let Some(i) = masses.iter().position(|&a| a < -POLYGON_TOL * scale) {
            return Err(Error::InvalidPolygon(format!(
                "halfplane {i} is redundant (edge length {:e})",
                masses[i]
            )));
        }
        let symmetric = detect_symmetry(&normals, &support_values);
        Ok(Self {
            normals,
            support_values,
            masses,
            symmetric,
        })
    }

    /// Polygon with the given vertices, listed counterclockwise around an
    /// interior origin.
    pub fn from_vertices(points: &[Point]) -> Result<Self> {
        let m = points.len();
        if m < 3 {
            return Err(Error::InvalidPolygon(format!("{m} vertices")));
        }
        for k in 0..m {
            let (p, q, r) = (points[k], points[(k + 1) % m], points[(k + 2) % m]);
            let turn = cross([q[0] - p[0], q[1] - p[1]], [r[0] - q[0], r[1] - q[1]]);
            if !(turn > 0.0) {
                return Err(Error::NotConvexPosition { index: (k + 1) % m });
            }
        }
        let mut edges: Vec<(f64, f64)> = Vec::with_capacity(m);
        for k in 0..m {
            let (p, q) = (points[k], points[(k + 1) % m]);
            let (dx, dy) = (q[0] - p[0], q[1] - p[1]);
            let len = dx.hypot(dy);
            let h = cross(p, q) / len;
            if !(h > 0.0) {
                return Err(Error::OriginNotInterior { index: k, value: h });
            }
            edges.push((wrap_angle((-dx).atan2(dy)), h));
        }
        // a vertex winding more than once would pass the turn test
        let total: f64 = (0..m).map(|k| gap_raw(edges[k].0, edges[(k + 1) % m].0)).sum();
        if (total - TAU).abs() > 1e-9 {
            return Err(Error::NotConvexPosition { index: 0 });
        }
        edges.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (normals, h) = edges.into_iter().unzip();
        Self::from_support(normals, h)
    }

    pub fn m(&self) -> usize {
        self.normals.len()
    }

    pub fn normals(&self) -> &[f64] {
        &self.normals
    }

    pub fn support_values(&self) -> &[f64] {
        &self.support_values
    }

    /// Edge lengths, i.e. the atoms of `h'' + h`.
    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    /// `θ_{i+1} − θ_i`, cyclically.
    pub fn gap(&self, i: usize) -> f64 {
        gap(&self.normals, i % self.m())
    }

    /// True when `m = 2N` and normal `i + N` is the antipode of normal `i`
    /// with the same support value.
    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub(crate) fn check_symmetric(&self) -> Result<()> {
        if self.symmetric {
            return Ok(());
        }
        Err(Error::NotSymmetric {
            defect: symmetry_defect(&self.normals, &self.support_values),
        })
    }

    /// Vertex `A_i` where edges `i` and `i + 1` meet.
    pub fn vertex(&self, i: usize) -> Point {
        let m = self.m();
        let j = (i + 1) % m;
        let (ti, tj) = (self.normals[i], self.normals[j]);
        let (hi, hj) = (self.support_values[i], self.support_values[j]);
        let s = (tj - ti).sin();
        [
            (hi * tj.sin() - hj * ti.sin()) / s,
            (hj * ti.cos() - hi * tj.cos()) / s,
        ]
    }

    pub fn to_vertices(&self) -> Vec<Point> {
        (0..self.m()).map(|i| self.vertex(i)).collect()
    }

    /// The polar polygon, with vertices `u_i / h_i`.
    pub fn polar(&self) -> Result<Self> {
        let points: Vec<Point> = self
            .normals
            .iter()
            .zip(&self.support_values)
            .map(|(&t, &h)| [t.cos() / h, t.sin() / h])
            .collect();
        Self::from_vertices(&points)
    }

    /// `½ Σ a_i h_i`.
    pub fn area(&self) -> f64 {
        0.5 * self
            .masses
            .iter()
            .zip(&self.support_values)
            .map(|(a, h)| a * h)
            .sum::<f64>()
    }

    /// `Σ sin g_i / (2 h_i h_{i+1})`.
    pub fn polar_area(&self) -> f64 {
        polar_area_of(&self.normals, &self.support_values)
    }

    pub fn mahler(&self) -> f64 {
        self.area() * self.polar_area()
    }

    /// Shoelace area of the vertex list.
    pub fn shoelace_area(&self) -> f64 {
        let v = self.to_vertices();
        let m = v.len();
        0.5 * (0..m).map(|k| cross(v[k], v[(k + 1) % m])).sum::<f64>()
    }

    /// Partial derivatives of `J` with respect to each support value:
    /// `B a_i − A/(2h_i²)·(sin g_i/h_{i+1} + sin g_{i−1}/h_{i−1})`.
    pub fn gradient(&self) -> Vec<f64> {
        let (a, b) = (self.area(), self.polar_area());
        let (grad_b, _) = polar_area_derivatives(&self.normals, &self.support_values);
        self.masses
            .iter()
            .zip(grad_b)
            .map(|(m, g)| b * m + a * g)
            .collect()
    }

    /// Hessian of `J` with respect to the support values.
    pub fn hessian(&self) -> DMatrix<f64> {
        let (a, b) = (self.area(), self.polar_area());
        let mat = area_matrix(&self.normals);
        let (grad_b, hess_b) = polar_area_derivatives(&self.normals, &self.support_values);
        let m = self.m();
        let mut out = mat * b + hess_b * a;
        for i in 0..m {
            for j in 0..m {
                out[(i, j)] += self.masses[i] * grad_b[j] + grad_b[i] * self.masses[j];
            }
        }
        out
    }

    /// First-order criticality residuals for symmetric deformations of the
    /// support values, one per antipodal pair.
    pub fn foc_residual(&self) -> Result<Vec<f64>> {
        self.check_symmetric()?;
        let mut g = self.gradient();
        g.truncate(self.m() / 2);
        Ok(g)
    }

    /// `max_x x·u(θ)` over the vertices.
    pub fn support_at(&self, theta: f64) -> f64 {
        let u = unit(theta);
        self.to_vertices()
            .iter()
            .map(|p| p[0] * u[0] + p[1] * u[1])
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Support function sampled on an `n`-point grid.
    pub fn sample(&self, n: usize) -> Result<GridSupport> {
        let vertices = self.to_vertices();
        GridSupport::from_fn(n, |t| {
            let u = unit(t);
            vertices
                .iter()
                .map(|p| p[0] * u[0] + p[1] * u[1])
                .fold(f64::NEG_INFINITY, f64::max)
        })
    }

    /// Image under the linear map with row-major matrix `t`.
    pub fn linear_image(&self, t: [[f64; 2]; 2]) -> Result<Self> {
        let mut faces = self.image_faces(t)?;
        faces.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (normals, h) = faces.into_iter().unzip();
        Self::from_support(normals, h)
    }

    /// `(normal angle, support value)` of every edge of the image under `t`,
    /// in the original edge order.
    pub(crate) fn image_faces(&self, t: [[f64; 2]; 2]) -> Result<Vec<(f64, f64)>> {
        let det = t[0][0] * t[1][1] - t[0][1] * t[1][0];
        if !(det.abs() > 0.0) || !det.is_finite() {
            return Err(Error::Degenerate("singular linear map".into()));
        }
        // normals map by the inverse transpose
        let inv_t = [
            [t[1][1] / det, -t[1][0] / det],
            [-t[0][1] / det, t[0][0] / det],
        ];
        Ok(self
            .normals
            .iter()
            .zip(&self.support_values)
            .map(|(&theta, &h)| {
                let u = unit(theta);
                let w = [
                    inv_t[0][0] * u[0] + inv_t[0][1] * u[1],
                    inv_t[1][0] * u[0] + inv_t[1][1] * u[1],
                ];
                let len = w[0].hypot(w[1]);
                (wrap_angle(w[1].atan2(w[0])), h / len)
            })
            .collect())
    }

    /// The translate `P − z`; requires `z` interior.
    pub fn translated(&self, z: Point) -> Result<Self> {
        let h = self
            .normals
            .iter()
            .zip(&self.support_values)
            .map(|(&t, &h)| h - z[0] * t.cos() - z[1] * t.sin())
            .collect();
        Self::from_support(self.normals.clone(), h)
    }

    /// True when the polygon has exactly four edges in two parallel pairs.
    pub fn is_parallelogram(&self) -> bool {
        self.m() == 4 && (self.gap(0) + self.gap(1) - PI).abs() < 1e-12
            && (self.gap(1) + self.gap(2) - PI).abs() < 1e-12
    }
}

/// Reduces an angle to `[0, 2π)`, mapping values that round up to `2π` to 0.
pub(crate) fn wrap_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

fn gap_raw(from: f64, to: f64) -> f64 {
    (to - from).rem_euclid(TAU)
}

fn symmetry_defect(normals: &[f64], h: &[f64]) -> f64 {
    let m = normals.len();
    if m % 2 == 1 {
        return f64::INFINITY;
    }
    let half = m / 2;
    (0..half)
        .map(|i| {
            let angle = (normals[i + half] - normals[i] - PI).abs();
            let value = (h[i + half] - h[i]).abs() / h[i].max(h[i + half]);
            angle.max(value)
        })
        .fold(0.0, f64::max)
}

fn detect_symmetry(normals: &[f64], h: &[f64]) -> bool {
    symmetry_defect(normals, h) <= POLYGON_TOL
}

/// The regular `2N`-gon with normals `iπ/N` and the given apothem.
pub fn make_regular(pairs: usize, apothem: f64) -> Result<PolygonSupport> {
    if pairs < 2 || !(apothem > 0.0) {
        return Err(Error::InvalidPolygon(format!(
            "regular polygon needs at least 2 pairs and a positive apothem (got {pairs}, {apothem})"
        )));
    }
    let m = 2 * pairs;
    let normals = (0..m).map(|i| i as f64 * PI / pairs as f64).collect();
    PolygonSupport::from_support(normals, vec![apothem; m])
}

/// Parallelogram with normals `0, φ, π, π + φ` and support values
/// `h0, h1, h0, h1`.
pub fn make_parallelogram(h0: f64, h1: f64, angle: f64) -> Result<PolygonSupport> {
    if !(angle > 0.0 && angle < PI) {
        return Err(Error::DegenerateGap { gap: angle });
    }
    PolygonSupport::from_support(vec![0.0, angle, PI, PI + angle], vec![h0, h1, h0, h1])
}

/// A random parallelogram: random angle in `(0.1, π − 0.1)`, support values in `[0.5, 2]`.
pub fn make_random_parallelogram(seed: u64) -> Result<PolygonSupport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let angle = rng.gen_range(0.1..PI - 0.1);
    make_parallelogram(rng.gen_range(0.5..=2.0), rng.gen_range(0.5..=2.0), angle)
}

/// A random centrally symmetric `2N`-gon.
///
/// Normals are drawn uniformly in `(0, π)` (redrawn until all gaps exceed
/// [`MIN_RANDOM_GAP`]) and edge lengths uniformly in `[0.5, 2]`; the edges are
/// chained into a polygon centred at the origin and scaled so the largest
/// support value is 2.
pub fn make_random_symmetric(pairs: usize, seed: u64) -> Result<PolygonSupport> {
    if pairs < 2 {
        return Err(Error::InvalidPolygon(format!("{pairs} pairs")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half: Vec<f64> = loop {
        let mut t: Vec<f64> = (0..pairs).map(|_| rng.gen_range(0.0..PI)).collect();
        t.sort_by(|a, b| a.total_cmp(b));
        let min_gap = t
            .windows(2)
            .map(|w| w[1] - w[0])
            .chain(std::iter::once(t[0] + PI - t[pairs - 1]))
            .fold(f64::INFINITY, f64::min);
        if min_gap > MIN_RANDOM_GAP {
            break t;
        }
    };
    let lengths: Vec<f64> = (0..pairs).map(|_| rng.gen_range(0.5..=2.0)).collect();
    from_half_edges(&half, &lengths, 2.0)
}

/// Symmetric polygon with normals `half ∪ (half + π)` and edge lengths
/// `lengths` on both halves, scaled so its largest support value is `hmax`.
pub(crate) fn from_half_edges(half: &[f64], lengths: &[f64], hmax: f64) -> Result<PolygonSupport> {
    let pairs = half.len();
    let normals: Vec<f64> = half.iter().chain(half.iter()).enumerate()
        .map(|(i, &t)| if i < pairs { t } else { t + PI })
        .collect();
    // vertices of the symmetric chain: start at minus half the sum of the
    // first N edge vectors so the polygon is centred at the origin
    let edge = |i: usize| {
        let t = normals[i];
        let a = lengths[i % pairs];
        [-a * t.sin(), a * t.cos()]
    };
    let mut p = [0.0, 0.0];
    for i in 0..pairs {
        let e = edge(i);
        p[0] -= 0.5 * e[0];
        p[1] -= 0.5 * e[1];
    }
    // p is the start of edge 0; its support value is p·u_0
    let mut h = Vec::with_capacity(2 * pairs);
    for (i, &t) in normals.iter().enumerate().take(2 * pairs) {
        let u = unit(t);
        h.push(p[0] * u[0] + p[1] * u[1]);
        let e = edge(i);
        p[0] += e[0];
        p[1] += e[1];
    }
    let top = h.iter().cloned().fold(0.0, f64::max);
    let h: Vec<f64> = h.iter().map(|x| x * hmax / top).collect();
    let h = h[..pairs].iter().chain(&h[..pairs]).cloned().collect();
    PolygonSupport::from_support(normals, h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn square() -> PolygonSupport {
        PolygonSupport::from_vertices(&[[1.0, -1.0], [1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0]]).unwrap()
    }

    fn hexagon() -> PolygonSupport {
        make_regular(3, 1.0).unwrap()
    }

    #[test]
    fn square_from_vertices() {
        let q = square();
        for (t, e) in q.normals().iter().zip([0.0, PI / 2.0, PI, 1.5 * PI]) {
            assert!((t - e).abs() < 1e-15);
        }
        assert!(q.support_values().iter().all(|h| (h - 1.0).abs() < 1e-15));
        assert!(q.masses().iter().all(|a| (a - 2.0).abs() < 1e-15));
        assert!(q.is_symmetric());
        assert!(q.is_parallelogram());
    }

    #[test]
    fn rectangle_values() {
        let r = PolygonSupport::from_vertices(&[[1.0, -2.0], [1.0, 2.0], [-1.0, 2.0], [-1.0, -2.0]]).unwrap();
        for (h, e) in r.support_values().iter().zip([1.0, 2.0, 1.0, 2.0]) {
            assert_relative_eq!(*h, e, epsilon = 1e-15);
        }
        for (a, e) in r.masses().iter().zip([4.0, 2.0, 4.0, 2.0]) {
            assert_relative_eq!(*a, e, epsilon = 1e-15);
        }
        assert_relative_eq!(r.area(), 8.0, epsilon = 1e-14);
        assert_relative_eq!(r.polar_area(), 1.0, epsilon = 1e-15);
        assert_relative_eq!(r.mahler(), 8.0, epsilon = 1e-13);
        for x in r.foc_residual().unwrap() {
            assert!(x.abs() < 1e-12);
        }
    }

    #[test]
    fn hexagon_values() {
        let h = hexagon();
        for a in h.masses() {
            assert_relative_eq!(*a, 2.0 / 3f64.sqrt(), epsilon = 1e-15);
        }
        assert_relative_eq!(h.area(), 2.0 * 3f64.sqrt(), epsilon = 1e-14);
        assert_relative_eq!(h.polar_area(), 1.5 * 3f64.sqrt(), epsilon = 1e-14);
        assert_relative_eq!(h.mahler(), 9.0, epsilon = 1e-12);
        assert!(h.foc_residual().unwrap().iter().all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn square_exact_values() {
        let q = make_regular(2, 1.0).unwrap();
        assert!((q.area() - 4.0).abs() < 1e-15);
        assert!((q.polar_area() - 2.0).abs() < 1e-15);
        assert!((q.mahler() - 8.0).abs() < 1e-14);
        assert!(q.foc_residual().unwrap().iter().all(|x| x.abs() <= 1e-12));
    }

    #[test]
    fn vertices_round_trip() {
        let pts = [[2.0, 0.5], [0.3, 1.7], [-1.5, 0.4], [-0.6, -1.2], [1.1, -0.9]];
        let p = PolygonSupport::from_vertices(&pts).unwrap();
        let back = p.to_vertices();
        // same cycle up to rotation
        let shift = (0..5)
            .find(|&s| (back[s][0] - pts[0][0]).abs() < 1e-9 && (back[s][1] - pts[0][1]).abs() < 1e-9)
            .unwrap();
        for k in 0..5 {
            let q = back[(k + shift) % 5];
            assert!((q[0] - pts[k][0]).abs() < 1e-10 && (q[1] - pts[k][1]).abs() < 1e-10);
        }
        assert_relative_eq!(p.area(), p.shoelace_area(), epsilon = 1e-12);
    }

    #[test]
    fn vertex_validation() {
        let cw = [[1.0, 1.0], [1.0, -1.0], [-1.0, -1.0], [-1.0, 1.0]];
        assert!(matches!(PolygonSupport::from_vertices(&cw), Err(Error::NotConvexPosition { .. })));
        let off = [[1.0, 0.5], [3.0, 0.5], [3.0, 2.0], [1.0, 2.0]];
        assert!(matches!(PolygonSupport::from_vertices(&off), Err(Error::OriginNotInterior { .. })));
        let dent = [[1.0, 0.0], [0.1, 0.1], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]];
        assert!(matches!(PolygonSupport::from_vertices(&dent), Err(Error::NotConvexPosition { .. })));
    }

    #[test]
    fn support_validation() {
        assert!(matches!(
            PolygonSupport::from_support(vec![0.0, 1.0, 2.0], vec![1.0; 3]),
            Err(Error::DegenerateGap { .. })
        ));
        assert!(matches!(
            PolygonSupport::from_support(vec![0.0, 2.0, 4.0], vec![1.0, -1.0, 1.0]),
            Err(Error::OriginNotInterior { index: 1, .. })
        ));
        // the halfplane at π/4 is far outside the square
        assert!(matches!(
            PolygonSupport::from_support(vec![0.0, PI / 4.0, PI / 2.0, PI, 1.5 * PI], vec![1.0, 5.0, 1.0, 1.0, 1.0]),
            Err(Error::InvalidPolygon(_))
        ));
    }

    #[test]
    fn polar_examples() {
        let c = square().polar().unwrap();
        assert_relative_eq!(c.area(), 2.0, epsilon = 1e-14);
        // polar of the apothem-1 hexagon is the circumradius-1 hexagon
        let p = hexagon().polar().unwrap();
        for v in p.to_vertices() {
            assert_relative_eq!(v[0].hypot(v[1]), 1.0, epsilon = 1e-14);
        }
        let back = p.polar().unwrap();
        for (a, b) in back.support_values().iter().zip(hexagon().support_values()) {
            assert_relative_eq!(*a, *b, epsilon = 1e-12);
        }
    }

    #[test]
    fn gradient_and_hessian_match_finite_differences() {
        let p = make_random_symmetric(4, 11).unwrap();
        let g = p.gradient();
        let hs = p.hessian();
        let t = 1e-5;
        for i in 0..p.m() {
            let bump = |s: f64, k: usize, base: &[f64]| {
                let mut h = base.to_vec();
                h[k] += s;
                h
            };
            let f = |h: &[f64]| mahler_of(p.normals(), h);
            let base = p.support_values();
            let fd = (f(&bump(t, i, base)) - f(&bump(-t, i, base))) / (2.0 * t);
            assert!((fd - g[i]).abs() < 1e-7 * (1.0 + g[i].abs()), "grad {i}");
            for j in 0..p.m() {
                let gp = {
                    let q = PolygonSupport::from_support(p.normals().to_vec(), bump(t, j, base)).unwrap();
                    q.gradient()[i]
                };
                let gm = {
                    let q = PolygonSupport::from_support(p.normals().to_vec(), bump(-t, j, base)).unwrap();
                    q.gradient()[i]
                };
                let fd2 = (gp - gm) / (2.0 * t);
                assert!((fd2 - hs[(i, j)]).abs() < 1e-6 * (1.0 + hs[(i, j)].abs()), "hess {i} {j}");
            }
        }
    }

    #[test]
    fn random_symmetric_is_valid() {
        for seed in 0..20 {
            let p = make_random_symmetric(5, seed).unwrap();
            assert!(p.is_symmetric());
            assert_eq!(p.m(), 10);
            let (mut x, mut y) = (0.0, 0.0);
            for (a, t) in p.masses().iter().zip(p.normals()) {
                assert!(*a > 0.0);
                x += a * t.cos();
                y += a * t.sin();
            }
            assert!(x.hypot(y) < 1e-10);
            assert_relative_eq!(p.area(), p.shoelace_area(), max_relative = 1e-12);
            let top = p.support_values().iter().cloned().fold(0.0, f64::max);
            assert_relative_eq!(top, 2.0, epsilon = 1e-14);
        }
        assert_eq!(make_random_symmetric(5, 7).unwrap(), make_random_symmetric(5, 7).unwrap());
    }

    #[test]
    fn linear_image_preserves_mahler() {
        let p = make_random_symmetric(4, 3).unwrap();
        for t in [[[2.0, 0.3], [-0.1, 0.5]], [[0.0, 1.0], [1.0, 0.0]], [[-1.0, 0.2], [0.4, 3.0]]] {
            let q = p.linear_image(t).unwrap();
            assert_relative_eq!(q.mahler(), p.mahler(), max_relative = 1e-10);
            assert!(q.is_symmetric());
        }
    }

    #[test]
    fn sampled_support_matches_exact() {
        let p = hexagon();
        let g = p.sample(8192).unwrap();
        let grid = crate::functional::mahler(&g).unwrap();
        assert!((grid - 9.0).abs() / 9.0 < 5e-3);
        assert_relative_eq!(p.support_at(PI / 6.0), 2.0 / 3f64.sqrt(), epsilon = 1e-14);
    }
}
