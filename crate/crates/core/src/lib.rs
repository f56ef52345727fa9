//! Numerical laboratory for Bergman geometry on model domains.
//!
//! The crate evaluates Bergman kernels (closed forms, biholomorphic
//! pushforwards and a Gram-matrix oracle), differentiates `log K` to fourth
//! order through polarized jets, and derives the Bergman metric, curvature,
//! representative coordinates and the diastasis from them.
//! [`verify`] packages the resulting identities into reproducible suites.

pub mod domain;
pub mod error;
pub mod finite_diff;
pub mod geometry;
pub mod jet;
pub mod kernel;
pub mod polarized;
pub mod quadrature;
pub mod report;
pub mod sampling;
pub mod scalar;
pub mod verify;

pub use domain::{BiholoMap, DomainSpec};
pub use error::{Error, Result};
pub use geometry::{CurvatureTensor, GeometryReport, MetricTensor, RepCoords};
pub use kernel::{GramBasis, KernelModel, Provenance};
pub use polarized::PolarizedJet;
pub use quadrature::QuadratureRule;
pub use scalar::{Scalar, C64};
pub use verify::SuiteResult;

/// Version tag written into every JSON artifact.
pub const SCHEMA_VERSION: u32 = 1;
