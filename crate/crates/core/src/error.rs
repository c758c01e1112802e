use thiserror::Error;

/// Every failure mode of the toolkit. Variants name the violated invariant so
/// the CLI can report it verbatim.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid mismatch: {left} vs {right} samples")]
    GridMismatch { left: usize, right: usize },
    #[error("support function is not convex: cell {cell} has measure {measure:e}")]
    NonConvex { cell: usize, measure: f64 },
    #[error("support value {value:e} at sample {index} is below the positivity floor")]
    PositivityViolated { index: usize, value: f64 },
    #[error("halfplane intersection has empty interior")]
    EmptyBody,
    #[error("perturbation has mass {mass:e} outside (0, pi)")]
    UnsupportedPerturbation { mass: f64 },
    #[error("body is not centrally symmetric (defect {defect:e})")]
    NotSymmetric { defect: f64 },
    #[error("interval of length {length} resonates with the Dirichlet spectrum")]
    Resonance { length: f64 },
    #[error("subwindow {index} contains no atom of the curvature measure")]
    NoAtomInSubwindow { index: usize },
    #[error("slope system has only the trivial solution (smallest singular value {sigma:e})")]
    DegenerateSystem { sigma: f64 },
    #[error("invalid window: {0}")]
    InvalidWindow(String),
    #[error("points are not in strictly convex counterclockwise position (at vertex {index})")]
    NotConvexPosition { index: usize },
    #[error("origin is not strictly interior (support value {value:e} at edge {index})")]
    OriginNotInterior { index: usize, value: f64 },
    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),
    #[error("polygon is not first-order critical: max residual {residual:e}")]
    NotCritical { residual: f64 },
    #[error("normal triple around vertex {index} spans {span} > pi")]
    WideTriple { index: usize, span: f64 },
    #[error("translated polar body is unbounded")]
    NotBounded,
    #[error("normal gap {gap} is not in (0, pi)")]
    DegenerateGap { gap: f64 },
    #[error("degenerate point set: {0}")]
    Degenerate(String),
    #[error("product dimension {0} exceeds 3")]
    DimensionOverflow(usize),
    #[error("start is not admissible: {0}")]
    NonAdmissibleStart(String),
    #[error("did not converge: {0}")]
    NoConvergence(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
