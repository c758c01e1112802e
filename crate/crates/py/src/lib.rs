//! Python bindings: grid support functions, exact polygons, 3-D polytopes,
//! certificates and descent.

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use mahler::descent::{self, DescentOptions};
use mahler::functional;
use mahler::io::{self, Body};
use mahler::polygon::{self, PolygonSupport};
use mahler::polytope::{self, PolytopeV};
use mahler::sampling;
use mahler::support::{GridSupport, Perturbation};

create_exception!(pymahler, MahlerError, PyValueError, "Violated invariant of a body or operation.");

fn err(e: mahler::Error) -> PyErr {
    MahlerError::new_err(e.to_string())
}

fn perturbation(values: Vec<f64>) -> PyResult<Perturbation> {
    Perturbation::new(values).map_err(err)
}

/// Support function sampled on a uniform grid of the circle.
#[pyclass(name = "GridSupport", module = "pymahler", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyGrid(GridSupport);

#[pymethods]
impl PyGrid {
    #[new]
    fn new(samples: Vec<f64>) -> PyResult<Self> {
        GridSupport::new(samples).map(Self).map_err(err)
    }

    #[staticmethod]
    fn constant(n: usize, radius: f64) -> PyResult<Self> {
        GridSupport::constant(n, radius).map(Self).map_err(err)
    }

    #[staticmethod]
    #[pyo3(signature = (n, seed, symmetric = false))]
    fn random_smooth(n: usize, seed: u64, symmetric: bool) -> PyResult<Self> {
        sampling::random_smooth_support(n, seed, symmetric).map(Self).map_err(err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn samples(&self) -> Vec<f64> {
        self.0.samples().to_vec()
    }

    fn cell_measures(&self) -> Vec<f64> {
        self.0.cell_measures()
    }

    #[pyo3(signature = (tol = 1e-9))]
    fn is_convex(&self, tol: f64) -> bool {
        self.0.is_convex(tol)
    }

    fn convexify(&self) -> PyResult<Self> {
        self.0.convexify().map(Self).map_err(err)
    }

    fn symmetrize(&self) -> Self {
        Self(self.0.symmetrize())
    }

    fn area(&self) -> PyResult<f64> {
        functional::area(&self.0).map_err(err)
    }

    fn polar_area(&self) -> PyResult<f64> {
        functional::polar_area(&self.0).map_err(err)
    }

    fn mahler(&self) -> PyResult<f64> {
        functional::mahler(&self.0).map_err(err)
    }

    fn d_mahler(&self, v: Vec<f64>) -> PyResult<f64> {
        functional::d_mahler(&self.0, &perturbation(v)?).map_err(err)
    }

    fn d2_mahler(&self, v: Vec<f64>) -> PyResult<f64> {
        functional::d2_mahler(&self.0, &perturbation(v)?).map_err(err)
    }

    /// `(lhs, rhs, holds)` of the local concavity bound.
    fn concavity_check(&self, v: Vec<f64>) -> PyResult<(f64, f64, bool)> {
        let c = functional::check_concavity_bound(&self.0, &perturbation(v)?).map_err(err)?;
        Ok((c.lhs, c.rhs, c.holds))
    }

    /// Fraction of curvature mass in the `k` heaviest cells.
    #[pyo3(signature = (k = 4))]
    fn concentration(&self, k: usize) -> PyResult<f64> {
        descent::concentration_report(&self.0, k).map(|r| r.0).map_err(err)
    }

    fn to_json(&self) -> String {
        io::write_body(&Body::Grid(self.0.clone()))
    }

    fn __len__(&self) -> usize {
        self.0.n()
    }

    fn __repr__(&self) -> String {
        format!("GridSupport(n={})", self.0.n())
    }
}

/// Second-variation certificate of a symmetric critical polygon.
#[pyclass(name = "Certificate", module = "pymahler", frozen, get_all)]
struct PyCertificate {
    vertex_index: usize,
    bracket: f64,
    quadratic_form: f64,
    frame_angles: Option<[f64; 3]>,
    frame_masses: Option<[f64; 2]>,
}

#[pymethods]
impl PyCertificate {
    fn __repr__(&self) -> String {
        format!(
            "Certificate(vertex_index={}, quadratic_form={})",
            self.vertex_index, self.quadratic_form
        )
    }
}

/// Convex polygon given by outer normals and support values.
#[pyclass(name = "Polygon", module = "pymahler", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyPolygon(PolygonSupport);

#[pymethods]
impl PyPolygon {
    #[new]
    fn new(normals: Vec<f64>, support_values: Vec<f64>) -> PyResult<Self> {
        PolygonSupport::from_support(normals, support_values)
            .map(Self)
            .map_err(err)
    }

    #[staticmethod]
    fn from_vertices(points: Vec<[f64; 2]>) -> PyResult<Self> {
        PolygonSupport::from_vertices(&points).map(Self).map_err(err)
    }

    /// Regular `2·pairs`-gon.
    #[staticmethod]
    #[pyo3(signature = (pairs, apothem = 1.0))]
    fn regular(pairs: usize, apothem: f64) -> PyResult<Self> {
        polygon::make_regular(pairs, apothem).map(Self).map_err(err)
    }

    #[staticmethod]
    fn random_symmetric(pairs: usize, seed: u64) -> PyResult<Self> {
        polygon::make_random_symmetric(pairs, seed).map(Self).map_err(err)
    }

    #[getter]
    fn normals(&self) -> Vec<f64> {
        self.0.normals().to_vec()
    }

    #[getter]
    fn support_values(&self) -> Vec<f64> {
        self.0.support_values().to_vec()
    }

    #[getter]
    fn edge_lengths(&self) -> Vec<f64> {
        self.0.masses().to_vec()
    }

    fn vertices(&self) -> Vec<[f64; 2]> {
        self.0.to_vertices()
    }

    fn area(&self) -> f64 {
        self.0.area()
    }

    fn polar_area(&self) -> f64 {
        self.0.polar_area()
    }

    fn mahler(&self) -> f64 {
        self.0.mahler()
    }

    fn polar(&self) -> PyResult<Self> {
        self.0.polar().map(Self).map_err(err)
    }

    fn is_symmetric(&self) -> bool {
        self.0.is_symmetric()
    }

    fn is_parallelogram(&self) -> bool {
        self.0.is_parallelogram()
    }

    fn linear_image(&self, t: [[f64; 2]; 2]) -> PyResult<Self> {
        self.0.linear_image(t).map(Self).map_err(err)
    }

    fn foc_residual(&self) -> PyResult<Vec<f64>> {
        self.0.foc_residual().map_err(err)
    }

    fn project_to_critical(&self) -> PyResult<Self> {
        polygon::project_to_critical(&self.0).map(Self).map_err(err)
    }

    /// Most negative single-edge certificate, or `None`.
    fn certify(&self) -> PyResult<Option<PyCertificate>> {
        let c = polygon::certify_nonminimal(&self.0).map_err(err)?;
        Ok(c.map(|c| PyCertificate {
            vertex_index: c.vertex_index,
            bracket: c.bracket,
            quadratic_form: c.quadratic_form,
            frame_angles: c.normalized_frame.map(|f| f.angles),
            frame_masses: c.normalized_frame.map(|f| f.masses),
        }))
    }

    /// `(santalo_point, nonsymmetric_mahler)`.
    fn santalo(&self) -> PyResult<([f64; 2], f64)> {
        let (value, s) = polygon::nonsymmetric_mahler(&self.0).map_err(err)?;
        Ok((s.point, value))
    }

    fn sample(&self, n: usize) -> PyResult<PyGrid> {
        self.0.sample(n).map(PyGrid).map_err(err)
    }

    fn to_json(&self) -> String {
        io::write_body(&Body::Polygon(self.0.clone()))
    }

    fn __repr__(&self) -> String {
        format!("Polygon(m={})", self.0.m())
    }
}

/// Convex polytope in dimension 1 to 3 given by its vertices.
#[pyclass(name = "Polytope", module = "pymahler", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyPolytope(PolytopeV);

#[pymethods]
impl PyPolytope {
    /// Convex hull of the points.
    #[new]
    fn new(points: Vec<Vec<f64>>) -> PyResult<Self> {
        PolytopeV::hull(&points).map(Self).map_err(err)
    }

    #[staticmethod]
    #[pyo3(signature = (dim, radius = 1.0))]
    fn cube(dim: usize, radius: f64) -> PyResult<Self> {
        PolytopeV::cube(dim, radius).map(Self).map_err(err)
    }

    #[staticmethod]
    #[pyo3(signature = (dim, radius = 1.0))]
    fn cross_polytope(dim: usize, radius: f64) -> PyResult<Self> {
        PolytopeV::cross_polytope(dim, radius).map(Self).map_err(err)
    }

    #[staticmethod]
    fn random_symmetric(dim: usize, pairs: usize, seed: u64) -> PyResult<Self> {
        polytope::random_symmetric(dim, pairs, seed).map(Self).map_err(err)
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn vertices(&self) -> Vec<Vec<f64>> {
        self.0.vertices()
    }

    fn facets(&self) -> Vec<Vec<usize>> {
        self.0.facets().iter().map(|f| f.ring.clone()).collect()
    }

    fn num_edges(&self) -> usize {
        self.0.num_edges()
    }

    fn volume(&self) -> f64 {
        self.0.volume()
    }

    fn polar(&self) -> PyResult<Self> {
        self.0.polar().map(Self).map_err(err)
    }

    fn mahler(&self) -> PyResult<f64> {
        self.0.mahler().map_err(err)
    }

    fn kuperberg_gap(&self) -> PyResult<f64> {
        self.0.kuperberg_gap().map_err(err)
    }

    /// Cartesian product with `other`.
    fn product(&self, other: &PyPolytope) -> PyResult<Self> {
        polytope::product_body(&self.0, &other.0).map(Self).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!(
            "Polytope(dim={}, vertices={}, facets={})",
            self.0.dim(),
            self.0.num_vertices(),
            self.0.facets().len()
        )
    }
}

/// Outcome of a projected gradient descent run.
#[pyclass(name = "DescentResult", module = "pymahler", frozen, get_all)]
struct PyDescentResult {
    values: Vec<f64>,
    final_body: PyGrid,
    stop_reason: String,
    topk_fraction: f64,
    parallelogram_distance: Option<f64>,
}

/// Projected gradient descent of the Mahler volume from `h`.
#[pyfunction]
#[pyo3(signature = (h, seed = 0, kick = 1e-2, max_iters = 5000, symmetric = true))]
fn descend(
    py: Python<'_>,
    h: &PyGrid,
    seed: u64,
    kick: f64,
    max_iters: usize,
    symmetric: bool,
) -> PyResult<PyDescentResult> {
    let opts = DescentOptions {
        symmetric,
        max_iters,
        initial_kick: kick,
        seed,
        ..DescentOptions::default()
    };
    let h0 = h.0.clone();
    let trace = py.detach(|| descent::descend(&h0, &opts)).map_err(err)?;
    let (topk, _) = descent::concentration_report(&trace.final_body, 4).map_err(err)?;
    let fit = if symmetric {
        Some(descent::fit_parallelogram(&trace.final_body).map_err(err)?.normalized_distance)
    } else {
        None
    };
    Ok(PyDescentResult {
        values: trace.values(),
        final_body: PyGrid(trace.final_body.clone()),
        stop_reason: trace.stop_reason.as_str().to_string(),
        topk_fraction: topk,
        parallelogram_distance: fit,
    })
}

/// Parses a body file's text into a `GridSupport` or a `Polygon`.
#[pyfunction]
fn parse_body(py: Python<'_>, text: &str) -> PyResult<Py<PyAny>> {
    Ok(match io::parse_body(text).map_err(err)? {
        Body::Grid(h) => Py::new(py, PyGrid(h))?.into_any(),
        Body::Polygon(p) => Py::new(py, PyPolygon(p))?.into_any(),
    })
}

#[pymodule]
fn pymahler(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("MahlerError", m.py().get_type::<MahlerError>())?;
    m.add_class::<PyGrid>()?;
    m.add_class::<PyPolygon>()?;
    m.add_class::<PyCertificate>()?;
    m.add_class::<PyPolytope>()?;
    m.add_class::<PyDescentResult>()?;
    m.add_function(wrap_pyfunction!(descend, m)?)?;
    m.add_function(wrap_pyfunction!(parse_body, m)?)?;
    Ok(())
}
