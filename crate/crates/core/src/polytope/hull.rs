//! Convex hulls in dimension 1 to 3 with exact orientation predicates.

use std::collections::HashMap;

use robust::{orient2d, orient3d, Coord, Coord3D};

use crate::error::{Error, Result};

pub type Point3 = [f64; 3];

/// Relative distance below which adjacent hull triangles count as coplanar.
pub const COPLANAR_TOL: f64 = 1e-9;

#[inline]
fn c2(p: Point3) -> Coord<f64> {
    Coord { x: p[0], y: p[1] }
}

#[inline]
fn c3(p: Point3) -> Coord3D<f64> {
    Coord3D {
        x: p[0],
        y: p[1],
        z: p[2],
    }
}

#[inline]
pub(crate) fn sub(a: Point3, b: Point3) -> Point3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub(crate) fn cross(a: Point3, b: Point3) -> Point3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub(crate) fn dot(a: Point3, b: Point3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Positive when `d` lies on the inner side of the counterclockwise
/// (seen from outside) triangle `a, b, c`.
#[inline]
fn side(a: Point3, b: Point3, c: Point3, d: Point3) -> f64 {
    orient3d(c3(a), c3(b), c3(c), c3(d))
}

/// Facet as a counterclockwise (seen from outside) ring of indices into the
/// hull's vertex list.
#[derive(Clone, Debug, PartialEq)]
pub struct RawFacet {
    pub ring: Vec<usize>,
}

/// Hull vertices (extreme points only) and facet rings.
pub struct RawHull {
    pub vertices: Vec<Point3>,
    pub facets: Vec<RawFacet>,
}

pub fn hull1(points: &[Point3]) -> Result<RawHull> {
    let lo = points.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
    let hi = points.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
    if !(hi > lo) {
        return Err(Error::Degenerate("all points coincide".into()));
    }
    Ok(RawHull {
        vertices: vec![[lo, 0.0, 0.0], [hi, 0.0, 0.0]],
        facets: vec![RawFacet { ring: vec![0] }, RawFacet { ring: vec![1] }],
    })
}

/// Monotone chain; collinear boundary points are dropped.
pub fn hull2(points: &[Point3]) -> Result<RawHull> {
    let mut pts: Vec<Point3> = points.to_vec();
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return Err(Error::Degenerate("fewer than three distinct points".into()));
    }
    let mut chain: Vec<Point3> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = chain.len();
        let iter: Box<dyn Iterator<Item = &Point3>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while chain.len() >= start + 2
                && orient2d(c2(chain[chain.len() - 2]), c2(chain[chain.len() - 1]), c2(p)) <= 0.0
            {
                chain.pop();
            }
            chain.push(p);
        }
        chain.pop();
    }
    if chain.len() < 3 {
        return Err(Error::Degenerate("points are collinear".into()));
    }
    let m = chain.len();
    Ok(RawHull {
        vertices: chain,
        facets: (0..m).map(|k| RawFacet { ring: vec![k, (k + 1) % m] }).collect(),
    })
}

#[derive(Clone, Copy)]
struct Triangle {
    v: [usize; 3],
    alive: bool,
}

/// Incremental hull. Points coplanar with a face count as not visible, so
/// boundary points never become vertices.
pub fn hull3(points: &[Point3]) -> Result<RawHull> {
    let n = points.len();
    if n < 4 {
        return Err(Error::Degenerate(format!("{n} points in dimension 3")));
    }
    // initial tetrahedron from four affinely independent points
    let a = 0;
    let b = (1..n)
        .find(|&i| points[i] != points[a])
        .ok_or_else(|| Error::Degenerate("all points coincide".into()))?;
    let c = (0..n)
        .find(|&i| {
            // collinear exactly when all three coordinate projections are
            orient2d(c2(points[a]), c2(points[b]), c2(points[i])) != 0.0
                || orient2d(
                    Coord { x: points[a][1], y: points[a][2] },
                    Coord { x: points[b][1], y: points[b][2] },
                    Coord { x: points[i][1], y: points[i][2] },
                ) != 0.0
                || orient2d(
                    Coord { x: points[a][0], y: points[a][2] },
                    Coord { x: points[b][0], y: points[b][2] },
                    Coord { x: points[i][0], y: points[i][2] },
                ) != 0.0
        })
        .ok_or_else(|| Error::Degenerate("points are collinear".into()))?;
    let d = (0..n)
        .find(|&i| side(points[a], points[b], points[c], points[i]) != 0.0)
        .ok_or_else(|| Error::Degenerate("points are coplanar".into()))?;

    let mut tris: Vec<Triangle> = Vec::new();
    let orient = |x: usize, y: usize, z: usize, inside: usize| -> [usize; 3] {
        if side(points[x], points[y], points[z], points[inside]) > 0.0 {
            [x, y, z]
        } else {
            [x, z, y]
        }
    };
    tris.push(Triangle { v: orient(a, b, c, d), alive: true });
    tris.push(Triangle { v: orient(a, b, d, c), alive: true });
    tris.push(Triangle { v: orient(a, c, d, b), alive: true });
    tris.push(Triangle { v: orient(b, c, d, a), alive: true });

    for p in 0..n {
        if p == a || p == b || p == c || p == d {
            continue;
        }
        let visible: Vec<usize> = (0..tris.len())
            .filter(|&t| {
                let tr = tris[t];
                tr.alive && side(points[tr.v[0]], points[tr.v[1]], points[tr.v[2]], points[p]) < 0.0
            })
            .collect();
        if visible.is_empty() {
            continue;
        }
        // directed edges of visible faces; a horizon edge has no reversed twin
        let mut edges: HashMap<(usize, usize), ()> = HashMap::new();
        for &t in &visible {
            let v = tris[t].v;
            for k in 0..3 {
                edges.insert((v[k], v[(k + 1) % 3]), ());
            }
        }
        let horizon: Vec<(usize, usize)> = edges
            .keys()
            .filter(|&&(x, y)| !edges.contains_key(&(y, x)))
            .cloned()
            .collect();
        for &t in &visible {
            tris[t].alive = false;
        }
        for (x, y) in horizon {
            tris.push(Triangle { v: [x, y, p], alive: true });
        }
    }
    let tris: Vec<[usize; 3]> = tris.into_iter().filter(|t| t.alive).map(|t| t.v).collect();
    merge_coplanar(points, &tris)
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

/// Groups adjacent coplanar triangles into polygonal facets and reindexes
/// the vertices that remain in use.
fn merge_coplanar(points: &[Point3], tris: &[[usize; 3]]) -> Result<RawHull> {
    let scale = points
        .iter()
        .flat_map(|p| p.iter())
        .fold(0.0f64, |m, x| m.max(x.abs()))
        .max(f64::MIN_POSITIVE);
    let mut owner: HashMap<(usize, usize), usize> = HashMap::new();
    for (t, v) in tris.iter().enumerate() {
        for k in 0..3 {
            owner.insert((v[k], v[(k + 1) % 3]), t);
        }
    }
    let unit_normal = |v: &[usize; 3]| {
        let n = cross(sub(points[v[1]], points[v[0]]), sub(points[v[2]], points[v[0]]));
        let len = dot(n, n).sqrt();
        [n[0] / len, n[1] / len, n[2] / len]
    };
    let mut parent: Vec<usize> = (0..tris.len()).collect();
    for (t, v) in tris.iter().enumerate() {
        for k in 0..3 {
            let (x, y) = (v[k], v[(k + 1) % 3]);
            let Some(&u) = owner.get(&(y, x)) else {
                return Err(Error::Degenerate("hull is not closed".into()));
            };
            if u <= t {
                continue;
            }
            let w = tris[u];
            let apex = *w.iter().find(|&&q| q != x && q != y).unwrap();
            let exact = side(points[v[0]], points[v[1]], points[v[2]], points[apex]) == 0.0;
            let n = unit_normal(v);
            let dist = dot(n, sub(points[apex], points[v[0]])).abs();
            if exact || dist <= COPLANAR_TOL * scale {
                let (ra, rb) = (find(&mut parent, t), find(&mut parent, u));
                parent[ra] = rb;
            }
        }
    }
    let mut groups: HashMap<usize, Vec<usize>> = HashMap::new();
    for t in 0..tris.len() {
        let r = find(&mut parent, t);
        groups.entry(r).or_default().push(t);
    }
    let mut roots: Vec<usize> = groups.keys().cloned().collect();
    roots.sort_unstable();

    let mut index: HashMap<usize, usize> = HashMap::new();
    let mut vertices = Vec::new();
    let mut facets = Vec::new();
    for r in roots {
        let members = &groups[&r];
        // boundary edges of the group, keyed by their start vertex
        let mut directed: HashMap<(usize, usize), ()> = HashMap::new();
        for &t in members {
            let v = tris[t];
            for k in 0..3 {
                directed.insert((v[k], v[(k + 1) % 3]), ());
            }
        }
        let mut next: HashMap<usize, usize> = HashMap::new();
        for &(x, y) in directed.keys() {
            if !directed.contains_key(&(y, x)) {
                next.insert(x, y);
            }
        }
        let start = *next.keys().min().unwrap();
        let mut ring = vec![start];
        let mut cur = next[&start];
        while cur != start {
            ring.push(cur);
            cur = *next
                .get(&cur)
                .ok_or_else(|| Error::Degenerate("facet boundary is not a cycle".into()))?;
            if ring.len() > next.len() {
                return Err(Error::Degenerate("facet boundary is not a simple cycle".into()));
            }
        }
        // drop vertices in the middle of a straight boundary run
        let m = ring.len();
        let n = unit_normal(&tris[members[0]]);
        let ring: Vec<usize> = (0..m)
            .filter(|&k| {
                let (p, q, s) = (points[ring[(k + m - 1) % m]], points[ring[k]], points[ring[(k + 1) % m]]);
                let turn = dot(cross(sub(q, p), sub(s, q)), n);
                let span = dot(sub(q, p), sub(q, p)).sqrt() * dot(sub(s, q), sub(s, q)).sqrt();
                turn > COPLANAR_TOL * span
            })
            .map(|k| ring[k])
            .collect();
        let ring = ring
            .into_iter()
            .map(|q| {
                *index.entry(q).or_insert_with(|| {
                    vertices.push(points[q]);
                    vertices.len() - 1
                })
            })
            .collect();
        facets.push(RawFacet { ring });
    }
    Ok(RawHull { vertices, facets })
}
