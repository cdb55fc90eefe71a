//! Numerical conformal geometry: chart curvature, cylinder necks over the
//! three-sphere, Weyl functionals, Yamabe quotient estimates and
//! four-manifold invariant arithmetic.

pub mod curvature;
pub mod cylinder;
pub mod error;
pub mod grid;
pub mod invariants;
pub mod io;
pub mod linalg;
pub mod metric;
pub mod quad;
pub mod scalar;
pub mod weyl;
pub mod yamabe;

pub use error::{Error, Result};
pub use grid::{ChartGrid, Region, RegionField};
pub use metric::{ChartMetric, SymTensorField};
pub use scalar::Scalar;

pub type ChartGrid64 = ChartGrid<f64>;
pub type ChartMetric64 = ChartMetric<f64>;
pub type ChartMetric32 = ChartMetric<f32>;
pub type CurvatureBundle64 = curvature::CurvatureBundle<f64>;
