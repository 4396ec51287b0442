//! Scenario-driven front-end for the recovery solvers: parse a scenario,
//! run it, write a JSON report and optionally a pointwise profile.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod failure;
pub mod profile;
pub mod run;
pub mod scenario;

pub use failure::{Failure, FailureKind};
pub use profile::{emit_profile, ProfileFormat};
pub use run::{execute, run_scenario, Outcome, RunOptions};
pub use scenario::Scenario;

/// Scenario schema, also shipped as `schemas/scenario.schema.json`.
pub const SCENARIO_SCHEMA: &str = include_str!("../schemas/scenario.schema.json");
/// Report schema, also shipped as `schemas/report.schema.json`.
pub const REPORT_SCHEMA: &str = include_str!("../schemas/report.schema.json");
