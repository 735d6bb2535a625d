//! Finsler curvature, projective parameters along geodesics, Sturm oscillation
//! analysis and chain estimates of the projectively invariant pseudo-distance.

pub mod curvature;
pub mod error;
pub mod geodesic;
pub mod jet;
pub mod linalg;
pub mod metric;
pub mod projective;
pub mod pseudo;
pub mod sturm;
pub mod verify;

pub use error::{FinslerError, Result};
pub use jet::{Dual, Jet2, Scalar};
pub use metric::{FinslerMetric, MetricDescriptor, ModelMetric, Reversed, TangentSample};
