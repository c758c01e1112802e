//! Numerical and closed-form tools for the Mahler volume `M(K) = |K| |K°|`
//! of convex bodies.
//!
//! - [`support`]: sampled support functions on the circle, the discrete
//!   curvature measure `h'' + h`, convexification and symmetrization.
//! - [`functional`]: the planar functional `J(h) = A(h) B(h)`, its first and
//!   second variations, concavity constants and localized perturbations.
//! - [`polygon`]: exact polygon formulas, first-order criticality, second
//!   variation certificates, affine normalization and the Santaló point.
//! - [`descent`]: projected gradient descent over admissible support functions.
//! - [`polytope`]: brute-force hulls, polars and volumes in dimension <= 3.
//! - [`io`]: text formats for bodies, polytopes, certificates and traces.

pub mod descent;
pub mod error;
pub mod functional;
pub mod io;
pub mod polygon;
pub mod polytope;
pub mod sampling;
pub mod support;

pub use error::{Error, Result};
pub use functional::{ConcavityCheck, ConcavityConstants};
pub use polygon::{Certificate, PolygonSupport};
pub use support::{CurvatureMeasure, GridSupport, Perturbation};
