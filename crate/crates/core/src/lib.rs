//! Optimal recovery of integrals, values and whole functions from Hölder-type
//! classes of functions with values in L-spaces.

// `!(x <= tol)` is deliberate: NaN must fail the check.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod domain;
pub mod error;
pub mod extremal;
pub mod lintegral;
pub mod lspace;
pub mod modulus;
pub mod numeric;
pub mod operators;
pub mod recovery;

pub use domain::{Domain, DomainSpec, Mask, Nodes, PointId, VoronoiPartition};
pub use error::{Error, Result};
pub use lintegral::{integrate, mean_value, LFunction};
pub use lspace::{Element, InstanceId};
pub use modulus::Modulus;
pub use operators::{Functional, LambdaPhiOperator, ScalarProfile};
pub use recovery::{recover, Measurement, RecoveryProblem, RecoveryReport};
