//! C*-algebra-valued metric spaces over matrix algebras and a certified
//! Picard fixed-point solver.
//!
//! * [`algebra`]: `M_n(C)` arithmetic, operator norm, positivity, Löwner order.
//! * [`metric`]: C*-valued metrics, sampled axiom checks, scalarization.
//! * [`contraction`]: sandwich contraction certificates and their verification.
//! * [`solver`]: Picard iteration with a priori / a posteriori error bounds.
//! * [`instances`]: built-in certified problem families.
//! * [`cli`]: instance files, run reports and the `cstar` command.

pub mod algebra;
pub mod cli;
pub mod contraction;
pub mod error;
pub mod instances;
pub mod metric;
pub mod point;
pub mod solver;

pub use algebra::{AlgebraElement, ComplexScalar, ToleranceConfig};
pub use contraction::{ContractionCertificate, MapInstance};
pub use error::{Error, Result};
pub use metric::{AxiomReport, MetricSpaceInstance};
pub use point::{BoundingBox, Point};
pub use solver::FixedPointResult;
