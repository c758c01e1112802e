//! Vertex-represented convex polytopes in dimension 1 to 3: hulls, polars,
//! volumes and Mahler volumes by brute force.
//!
//! Points are stored padded to three coordinates; only the first `dim` are
//! meaningful. A facet of a 3-polytope is a counterclockwise (seen from
//! outside) ring of vertex indices, a facet of a polygon is an edge, and a
//! facet of a segment is an endpoint.

mod hull;

pub use hull::COPLANAR_TOL;

use std::f64::consts::{FRAC_PI_4, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::polygon::PolygonSupport;
use hull::{cross, dot, sub, Point3};

/// Facet offsets at or below this fraction of the largest one put the
/// origin on the boundary.
pub const INTERIOR_TOL: f64 = 1e-12;

/// Largest residual `|<v, w> - 1|` over a polar facet for `v` to count as
/// its dual vertex.
const DUAL_MATCH_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct Facet {
    pub ring: Vec<usize>,
    /// Outward unit normal (padded to three coordinates).
    pub normal: [f64; 3],
    /// Signed distance of the facet plane from the origin.
    pub offset: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolytopeV {
    dim: usize,
    vertices: Vec<Point3>,
    facets: Vec<Facet>,
}

fn pad(dim: usize, p: &[f64]) -> Result<Point3> {
    if p.len() != dim {
        return Err(Error::Degenerate(format!(
            "point of length {} in dimension {dim}",
            p.len()
        )));
    }
    if p.iter().any(|x| !x.is_finite()) {
        return Err(Error::Degenerate("non-finite coordinate".into()));
    }
    let mut q = [0.0; 3];
    q[..dim].copy_from_slice(p);
    Ok(q)
}

fn normalize(v: Point3) -> Point3 {
    let len = dot(v, v).sqrt();
    [v[0] / len, v[1] / len, v[2] / len]
}

/// Newell vector of a planar ring: normal times twice the enclosed area.
fn newell(vertices: &[Point3], ring: &[usize]) -> Point3 {
    let m = ring.len();
    let mut n = [0.0; 3];
    for k in 0..m {
        let c = cross(vertices[ring[k]], vertices[ring[(k + 1) % m]]);
        for (a, b) in n.iter_mut().zip(c) {
            *a += b;
        }
    }
    n
}

fn factorial(d: usize) -> f64 {
    (1..=d).map(|k| k as f64).product()
}

impl PolytopeV {
    /// Convex hull of points of a common length 1, 2 or 3. Interior and
    /// boundary non-extreme points are discarded.
    pub fn hull(points: &[Vec<f64>]) -> Result<Self> {
        let dim = points
            .first()
            .map(|p| p.len())
            .ok_or_else(|| Error::Degenerate("no points".into()))?;
        let padded = points
            .iter()
            .map(|p| pad(dim, p))
            .collect::<Result<Vec<_>>>()?;
        Self::hull_padded(dim, &padded)
    }

    fn hull_padded(dim: usize, points: &[Point3]) -> Result<Self> {
        if points.len() < dim + 1 {
            return Err(Error::Degenerate(format!(
                "{} points cannot span dimension {dim}",
                points.len()
            )));
        }
        let raw = match dim {
            1 => hull::hull1(points)?,
            2 => hull::hull2(points)?,
            3 => hull::hull3(points)?,
            _ => return Err(Error::DimensionOverflow(dim)),
        };
        let facets = raw
            .facets
            .into_iter()
            .map(|f| {
                let normal = match dim {
                    1 => {
                        let other = raw.vertices[1 - f.ring[0]];
                        let s = if raw.vertices[f.ring[0]][0] > other[0] { 1.0 } else { -1.0 };
                        [s, 0.0, 0.0]
                    }
                    2 => {
                        let d = sub(raw.vertices[f.ring[1]], raw.vertices[f.ring[0]]);
                        normalize([d[1], -d[0], 0.0])
                    }
                    _ => normalize(newell(&raw.vertices, &f.ring)),
                };
                let offset = f.ring.iter().map(|&i| dot(normal, raw.vertices[i])).sum::<f64>()
                    / f.ring.len() as f64;
                Facet {
                    ring: f.ring,
                    normal,
                    offset,
                }
            })
            .collect();
        Ok(Self {
            dim,
            vertices: raw.vertices,
            facets,
        })
    }

    /// Vertex list of a convex polygon (any orientation).
    pub fn from_polygon(p: &PolygonSupport) -> Result<Self> {
        let points: Vec<Point3> = p.to_vertices().iter().map(|v| [v[0], v[1], 0.0]).collect();
        Self::hull_padded(2, &points)
    }

    /// `[−r, r]^dim`.
    pub fn cube(dim: usize, r: f64) -> Result<Self> {
        let points: Vec<Vec<f64>> = (0..1usize << dim)
            .map(|mask| {
                (0..dim)
                    .map(|k| if mask >> k & 1 == 1 { r } else { -r })
                    .collect()
            })
            .collect();
        Self::hull(&points)
    }

    /// `{Σ|x_k| ≤ r}`.
    pub fn cross_polytope(dim: usize, r: f64) -> Result<Self> {
        let mut points = Vec::with_capacity(2 * dim);
        for k in 0..dim {
            for s in [r, -r] {
                let mut p = vec![0.0; dim];
                p[k] = s;
                points.push(p);
            }
        }
        Self::hull(&points)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex(&self, i: usize) -> &[f64] {
        &self.vertices[i][..self.dim]
    }

    pub fn vertices(&self) -> Vec<Vec<f64>> {
        (0..self.vertices.len()).map(|i| self.vertex(i).to_vec()).collect()
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    /// Number of edges (for `dim = 3`, counted from the facet rings).
    pub fn num_edges(&self) -> usize {
        match self.dim {
            1 => 1,
            2 => self.facets.len(),
            _ => self.facets.iter().map(|f| f.ring.len()).sum::<usize>() / 2,
        }
    }

    /// `V − E + F`, which is 2 for every 3-polytope.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.num_edges() as i64 + self.facets.len() as i64
    }

    fn max_offset(&self) -> f64 {
        self.facets.iter().map(|f| f.offset.abs()).fold(0.0, f64::max)
    }

    pub fn contains_origin(&self) -> bool {
        let floor = INTERIOR_TOL * self.max_offset();
        self.facets.iter().all(|f| f.offset > floor)
    }

    /// `(d − 1)`-dimensional measure of facet `k` (1 for endpoints).
    pub fn facet_area(&self, k: usize) -> f64 {
        let f = &self.facets[k];
        match self.dim {
            1 => 1.0,
            2 => {
                let d = sub(self.vertices[f.ring[1]], self.vertices[f.ring[0]]);
                dot(d, d).sqrt()
            }
            _ => 0.5 * dot(f.normal, newell(&self.vertices, &f.ring)),
        }
    }

    /// `(1/d) Σ offset · facet area`, valid for any position of the origin.
    pub fn volume(&self) -> f64 {
        (0..self.facets.len())
            .map(|k| self.facets[k].offset * self.facet_area(k))
            .sum::<f64>()
            / self.dim as f64
    }

    /// Hull of the facet normals scaled by the reciprocal offsets.
    pub fn polar(&self) -> Result<Self> {
        let floor = INTERIOR_TOL * self.max_offset();
        let mut points = Vec::with_capacity(self.facets.len());
        for (index, f) in self.facets.iter().enumerate() {
            if f.offset <= floor {
                return Err(Error::OriginNotInterior {
                    index,
                    value: f.offset,
                });
            }
            points.push([
                f.normal[0] / f.offset,
                f.normal[1] / f.offset,
                f.normal[2] / f.offset,
            ]);
        }
        let mut polar = Self::hull_padded(self.dim, &points)?;
        // Each polar facet lies on {x : <v, x> = 1} for the vertex v of self
        // it is dual to. Taking that plane directly avoids refitting it through
        // polar vertices that may be nearly coincident.
        for f in &mut polar.facets {
            let ring: Vec<Point3> = f.ring.iter().map(|&i| polar.vertices[i]).collect();
            let fit = |v: &Point3| ring.iter().map(|w| (dot(*v, *w) - 1.0).abs()).fold(0.0, f64::max);
            let Some(v) = self
                .vertices
                .iter()
                .min_by(|a, b| fit(a).total_cmp(&fit(b)))
            else {
                continue;
            };
            let norm = dot(*v, *v).sqrt();
            if fit(v) <= DUAL_MATCH_TOL && dot(*v, f.normal) > 0.0 {
                f.normal = [v[0] / norm, v[1] / norm, v[2] / norm];
                f.offset = 1.0 / norm;
            }
        }
        Ok(polar)
    }

    pub fn mahler(&self) -> Result<f64> {
        Ok(self.volume() * self.polar()?.volume())
    }

    /// Hull of the image of the vertices under the top-left `dim × dim`
    /// block of `t`.
    pub fn linear_image(&self, t: &[[f64; 3]; 3]) -> Result<Self> {
        let d = self.dim;
        let points: Vec<Point3> = self
            .vertices
            .iter()
            .map(|v| {
                let mut w = [0.0; 3];
                for (r, wr) in w.iter_mut().enumerate().take(d) {
                    *wr = (0..d).map(|c| t[r][c] * v[c]).sum();
                }
                w
            })
            .collect();
        Self::hull_padded(d, &points)
    }

    pub fn translated(&self, z: &[f64]) -> Result<Self> {
        let z = pad(self.dim, z)?;
        let points: Vec<Point3> = self.vertices.iter().map(|v| [v[0] + z[0], v[1] + z[1], v[2] + z[2]]).collect();
        Self::hull_padded(self.dim, &points)
    }

    /// Largest distance between a vertex and its nearest vertex in `other`,
    /// in both directions.
    pub fn vertex_set_distance(&self, other: &Self) -> f64 {
        let one_way = |a: &Self, b: &Self| {
            a.vertices
                .iter()
                .map(|p| {
                    b.vertices
                        .iter()
                        .map(|q| {
                            let d = sub(*p, *q);
                            dot(d, d).sqrt()
                        })
                        .fold(f64::INFINITY, f64::min)
                })
                .fold(0.0, f64::max)
        };
        one_way(self, other).max(one_way(other, self))
    }

    /// `mahler − (π/4)^{d−1} 4^d / d!`; nonnegative for symmetric bodies.
    pub fn kuperberg_gap(&self) -> Result<f64> {
        Ok(self.mahler()? - kuperberg_bound(self.dim))
    }
}

/// `4^d / d!`, the Mahler volume of the cube in dimension `d`.
pub fn cube_mahler(dim: usize) -> f64 {
    4f64.powi(dim as i32) / factorial(dim)
}

/// `(π/4)^{d−1} 4^d / d!`.
pub fn kuperberg_bound(dim: usize) -> f64 {
    FRAC_PI_4.powi(dim as i32 - 1) * cube_mahler(dim)
}

/// Hull of all concatenations `(p, q)` of a vertex of `p` and a vertex of `q`.
pub fn product_body(p: &PolytopeV, q: &PolytopeV) -> Result<PolytopeV> {
    let dim = p.dim + q.dim;
    if dim > 3 {
        return Err(Error::DimensionOverflow(dim));
    }
    let mut points = Vec::with_capacity(p.vertices.len() * q.vertices.len());
    for a in &p.vertices {
        for b in &q.vertices {
            let mut v = [0.0; 3];
            v[..p.dim].copy_from_slice(&a[..p.dim]);
            v[p.dim..dim].copy_from_slice(&b[..q.dim]);
            points.push(v);
        }
    }
    PolytopeV::hull_padded(dim, &points)
}

/// Hull of `pairs` antipodal pairs `±r u` with `u` uniform on the sphere and
/// `r` uniform in `[0.5, 2]`. Retries with fresh draws if the sample is
/// degenerate.
pub fn random_symmetric(dim: usize, pairs: usize, seed: u64) -> Result<PolytopeV> {
    if !(1..=3).contains(&dim) {
        return Err(Error::DimensionOverflow(dim));
    }
    if pairs < dim {
        return Err(Error::Degenerate(format!(
            "{pairs} antipodal pairs cannot span dimension {dim}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..100 {
        let mut points = Vec::with_capacity(2 * pairs);
        for _ in 0..pairs {
            let u = match dim {
                1 => [1.0, 0.0, 0.0],
                2 => {
                    let t = rng.gen_range(0.0..2.0 * PI);
                    [t.cos(), t.sin(), 0.0]
                }
                _ => {
                    let z: f64 = rng.gen_range(-1.0..1.0);
                    let t = rng.gen_range(0.0..2.0 * PI);
                    let s = (1.0 - z * z).sqrt();
                    [s * t.cos(), s * t.sin(), z]
                }
            };
            let r = rng.gen_range(0.5..=2.0);
            points.push([r * u[0], r * u[1], r * u[2]]);
            points.push([-r * u[0], -r * u[1], -r * u[2]]);
        }
        match PolytopeV::hull_padded(dim, &points) {
            Ok(p) if p.contains_origin() => return Ok(p),
            Ok(_) | Err(Error::Degenerate(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::Degenerate("could not draw a full-dimensional sample".into()))
}
