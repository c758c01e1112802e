//! Text formats: bodies and polytopes as JSON, certificates as JSON, descent
//! traces as CSV. Numbers are written with 17 significant digits so that a
//! write/read cycle is bit-exact.

use std::fmt::Write as _;
use std::path::Path;

use serde::Deserialize;

use crate::descent::DescentTrace;
use crate::error::{Error, Result};
use crate::polygon::{Certificate, PolygonSupport};
use crate::polytope::PolytopeV;
use crate::support::GridSupport;

/// A planar body as stored on disk.
#[derive(Clone, Debug, PartialEq)]
pub enum Body {
    Grid(GridSupport),
    Polygon(PolygonSupport),
}

#[derive(Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
enum BodyFile {
    Grid {
        n: usize,
        samples: Vec<f64>,
    },
    Polygon {
        #[serde(default)]
        n: Option<usize>,
        normals: Vec<f64>,
        support_values: Vec<f64>,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PolytopeFile {
    dim: usize,
    vertices: Vec<Vec<f64>>,
}

/// 17 significant digits in scientific notation (valid JSON and CSV).
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_list(xs: &[f64]) -> String {
    let items: Vec<String> = xs.iter().map(|&x| fmt_num(x)).collect();
    format!("[{}]", items.join(", "))
}

pub fn write_body(body: &Body) -> String {
    match body {
        Body::Grid(h) => format!(
            "{{\n  \"type\": \"grid\",\n  \"n\": {},\n  \"samples\": {}\n}}\n",
            h.n(),
            fmt_list(h.samples())
        ),
        Body::Polygon(p) => format!(
            "{{\n  \"type\": \"polygon\",\n  \"n\": {},\n  \"normals\": {},\n  \"support_values\": {}\n}}\n",
            p.m(),
            fmt_list(p.normals()),
            fmt_list(p.support_values())
        ),
    }
}

pub fn parse_body(text: &str) -> Result<Body> {
    let file: BodyFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    match file {
        BodyFile::Grid { n, samples } => {
            if n != samples.len() {
                return Err(Error::Parse(format!(
                    "n = {n} but {} samples given",
                    samples.len()
                )));
            }
            Ok(Body::Grid(GridSupport::new(samples)?))
        }
        BodyFile::Polygon {
            n,
            normals,
            support_values,
        } => {
            if let Some(n) = n {
                if n != normals.len() {
                    return Err(Error::Parse(format!(
                        "n = {n} but {} normals given",
                        normals.len()
                    )));
                }
            }
            Ok(Body::Polygon(PolygonSupport::from_support(normals, support_values)?))
        }
    }
}

pub fn write_polytope(p: &PolytopeV) -> String {
    let rows: Vec<String> = (0..p.num_vertices())
        .map(|i| format!("    {}", fmt_list(p.vertex(i))))
        .collect();
    format!(
        "{{\n  \"dim\": {},\n  \"vertices\": [\n{}\n  ]\n}}\n",
        p.dim(),
        rows.join(",\n")
    )
}

/// Facets are recomputed from the vertex list.
pub fn parse_polytope(text: &str) -> Result<PolytopeV> {
    let file: PolytopeFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if let Some(v) = file.vertices.iter().find(|v| v.len() != file.dim) {
        return Err(Error::Parse(format!(
            "vertex of length {} in dimension {}",
            v.len(),
            file.dim
        )));
    }
    PolytopeV::hull(&file.vertices)
}

pub fn write_certificate(c: &Certificate) -> String {
    let frame = match &c.normalized_frame {
        Some(f) => format!(
            "{{\"angles\": {}, \"masses\": {}}}",
            fmt_list(&f.angles),
            fmt_list(&f.masses)
        ),
        None => "null".to_string(),
    };
    format!(
        "{{\n  \"vertex_index\": {},\n  \"bracket\": {},\n  \"quadratic_form\": {},\n  \"normalized_frame\": {}\n}}\n",
        c.vertex_index,
        fmt_num(c.bracket),
        fmt_num(c.quadratic_form),
        frame
    )
}

pub fn write_trace_csv(trace: &DescentTrace) -> String {
    let mut out = String::from("iteration,J,step,topk_fraction,atom_count\n");
    for r in &trace.records {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.iteration,
            fmt_num(r.value),
            fmt_num(r.step),
            fmt_num(r.topk_fraction),
            r.atom_count
        );
    }
    out
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn read_body(path: &Path) -> Result<Body> {
    parse_body(&read(path)?)
}

pub fn read_polytope(path: &Path) -> Result<PolytopeV> {
    parse_polytope(&read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polygon::{certify_nonminimal, make_random_symmetric, make_regular};
    use crate::polytope::random_symmetric;

    #[test]
    fn grid_round_trip_is_exact() {
        let h = GridSupport::from_fn(16, |t| 1.0 + 0.1 * (2.0 * t).cos() + 1e-17 * t).unwrap();
        let text = write_body(&Body::Grid(h.clone()));
        assert_eq!(parse_body(&text).unwrap(), Body::Grid(h));
    }

    #[test]
    fn polygon_round_trip_is_exact() {
        for seed in 0..5 {
            let p = make_random_symmetric(5, seed).unwrap();
            let text = write_body(&Body::Polygon(p.clone()));
            let Body::Polygon(q) = parse_body(&text).unwrap() else { panic!() };
            assert_eq!(q.normals(), p.normals());
            assert_eq!(q.support_values(), p.support_values());
        }
    }

    #[test]
    fn polytope_round_trip() {
        let p = random_symmetric(3, 7, 2).unwrap();
        let q = parse_polytope(&write_polytope(&p)).unwrap();
        assert_eq!(p.vertex_set_distance(&q), 0.0);
        assert_eq!(p.facets().len(), q.facets().len());
    }

    #[test]
    fn malformed_input() {
        assert!(matches!(parse_body("{"), Err(Error::Parse(_))));
        assert!(matches!(
            parse_body(r#"{"type": "grid", "n": 3, "samples": [1, 1]}"#),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            parse_body(r#"{"type": "disc", "n": 8}"#),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            parse_body(r#"{"type": "grid", "n": 6, "samples": [1, 1, 1, 1, 1, 1]}"#),
            Err(Error::InvalidGrid(_))
        ));
        assert!(matches!(
            parse_polytope(r#"{"dim": 2, "vertices": [[0, 0, 0]]}"#),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn certificate_fields() {
        let c = certify_nonminimal(&make_regular(3, 1.0).unwrap()).unwrap().unwrap();
        let v: serde_json::Value = serde_json::from_str(&write_certificate(&c)).unwrap();
        assert_eq!(v["vertex_index"], c.vertex_index);
        assert_eq!(v["quadratic_form"].as_f64().unwrap(), c.quadratic_form);
        assert_eq!(v["normalized_frame"]["angles"].as_array().unwrap().len(), 3);
        assert_eq!(v["normalized_frame"]["masses"].as_array().unwrap().len(), 2);
    }
}
