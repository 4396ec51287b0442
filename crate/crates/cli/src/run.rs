//! Running a scenario and assembling its report.

use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde_json::{json, Value};

use lrecover_core::lspace::check_axioms;
use lrecover_core::operators::{measurement, ostrowski_bound, value_dist};
use lrecover_core::recovery::{recover_integral, recover_uniform, recover_value, RecoveryReport};
use lrecover_core::Error;

use crate::failure::{Failure, FailureKind};
use crate::scenario::{
    build_function, resolve_chi, resolve_mask, resolve_measurements, resolve_nodes, resolve_point, Problem, Scenario,
};

pub const REPORT_FORMAT: &str = "lrecover-report/1";

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Include the witness functions point by point.
    pub emit_witness: bool,
}

/// The result of a scenario that got far enough to produce a report.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Value,
    pub exit_code: i32,
    /// Explanation for a nonzero exit code.
    pub message: Option<String>,
    /// The recovery report, when the problem was a recovery problem.
    pub recovery: Option<RecoveryReport>,
}

fn solver(context: &str) -> impl Fn(Error) -> Failure + '_ {
    move |e| Failure::from_solver(context, e)
}

fn witness_summary(r: &RecoveryReport, emit: bool) -> Value {
    match &r.witness {
        None => Value::Null,
        Some(w) => {
            let mut v = json!({
                "lower_bound": w.lower_bound,
                "worst_collision_residual": w.worst_residual(),
                "collision_tolerance": w.collision_tolerance,
                "membership_pairs_checked": w.membership_f.pairs_checked,
                "membership_subsampled": w.membership_f.subsampled,
            });
            if emit {
                v["f"] = json!(w.f.values());
                v["g"] = json!(w.g.values());
            }
            v
        }
    }
}

/// Runs a parsed scenario. The returned report lacks the timestamp.
pub fn execute(scenario: &Scenario, options: RunOptions) -> Result<Outcome, Failure> {
    let instance = scenario.instance;
    let mut exit_code = 0;
    let mut message = None;
    let mut recovery = None;
    let mut grid_h = Value::Null;
    let result = match &scenario.problem {
        Problem::Axioms { trials } => {
            if *trials == 0 {
                return Err(Failure::validation("problem.trials: must be at least 1"));
            }
            let report = check_axioms(instance, *trials, scenario.seed);
            if !report.all_passed() {
                let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
                exit_code = FailureKind::Invariant.exit_code();
                message = Some(format!("axiom checks failed: {}", failed.join(", ")));
            }
            serde_json::to_value(&report).expect("serializable")
        }
        Problem::Ostrowski { t, chi, operator } => {
            let d = scenario.build_domain()?;
            grid_h = json!(d.h());
            let m = scenario.modulus()?;
            operator.validate().map_err(|e| Failure::validation(format!("problem.operator: {e}")))?;
            let t = resolve_point(&d, t, "problem.t")?;
            let chi = resolve_chi(&d, chi, "problem.chi")?;
            let phi = operator.functional();
            let bound = ostrowski_bound(&d, m, t, &chi, &phi).map_err(solver("ostrowski"))?;
            let mut out =
                json!({ "bound": bound, "t": t, "phi_chi": phi.apply(&d, chi.values()).map_err(solver("ostrowski"))? });
            if let Some(expr) = &scenario.function {
                let f = build_function(&d, m, instance, expr, scenario.seed)?;
                let mm = measurement(&d, operator, &chi, &f).map_err(solver("measurement"))?;
                let target = operator.lambda(f.at(t));
                let deviation = value_dist(&target, &mm).map_err(solver("measurement"))?;
                out["measurement"] = json!(mm);
                out["lambda_at_t"] = json!(target);
                out["deviation"] = json!(deviation);
                out["within_bound"] = json!(deviation <= bound + 1e-9);
            }
            out
        }
        Problem::RecoverIntegral { nodes, q } => {
            let d = scenario.build_domain()?;
            grid_h = json!(d.h());
            let m = scenario.modulus()?;
            let nodes = resolve_nodes(&d, nodes, "problem.nodes")?;
            let q = resolve_mask(&d, q, "problem.q")?;
            let f =
                scenario.function.as_ref().map(|e| build_function(&d, m, instance, e, scenario.seed)).transpose()?;
            let r = recover_integral(&d, m, instance, &nodes, &q, f.as_ref()).map_err(solver("recover_integral"))?;
            recovery = Some(r);
            Value::Null
        }
        Problem::RecoverValue { t, measurements } => {
            let d = scenario.build_domain()?;
            grid_h = json!(d.h());
            let m = scenario.modulus()?;
            let t = resolve_point(&d, t, "problem.t")?;
            let ms = resolve_measurements(&d, measurements)?;
            let f =
                scenario.function.as_ref().map(|e| build_function(&d, m, instance, e, scenario.seed)).transpose()?;
            let r = recover_value(&d, m, instance, t, &ms, f.as_ref()).map_err(solver("recover_value"))?;
            recovery = Some(r);
            Value::Null
        }
        Problem::RecoverUniform { nodes, eps } => {
            let d = scenario.build_domain()?;
            grid_h = json!(d.h());
            let m = scenario.modulus()?;
            if !(*eps > 0.0) {
                return Err(Failure::validation(format!("problem.eps: must be positive, got {eps}")));
            }
            let nodes = resolve_nodes(&d, nodes, "problem.nodes")?;
            let f =
                scenario.function.as_ref().map(|e| build_function(&d, m, instance, e, scenario.seed)).transpose()?;
            let r = recover_uniform(&d, m, instance, &nodes, *eps, f.as_ref()).map_err(solver("recover_uniform"))?;
            if let Some(check) = r.diagnostics.eps_condition.as_ref().filter(|c| !c.satisfied) {
                exit_code = FailureKind::Precondition.exit_code();
                message = Some(format!(
                    "eps condition violated at node {}: distance {} is neither R = {} nor >= R + 4 eps = {}",
                    check.node.unwrap_or(0),
                    check.distance.unwrap_or(f64::NAN),
                    check.radius,
                    check.threshold
                ));
            }
            recovery = Some(r);
            Value::Null
        }
    };
    let (result, witness) = match &recovery {
        Some(r) => (serde_json::to_value(r).expect("serializable"), witness_summary(r, options.emit_witness)),
        None => (result, Value::Null),
    };
    let report = json!({
        "format": REPORT_FORMAT,
        "scenario": scenario,
        "problem": scenario.problem.name(),
        "grid_h": grid_h,
        "result": result,
        "witness": witness,
        "status": { "exit_code": exit_code, "message": message },
    });
    Ok(Outcome { report, exit_code, message, recovery })
}

/// Reads, validates and runs a scenario file, then writes the report with a
/// timestamp. Failures before a report exists are returned as errors.
pub fn run_scenario(path: &Path, output: &Path, options: RunOptions) -> Result<Outcome, Failure> {
    let started = Instant::now();
    let text = std::fs::read_to_string(path).map_err(|e| Failure::validation(format!("{}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| Failure::validation(format!("scenario: {e}")))?;
    let scenario = Scenario::from_value(&value)?;
    let mut outcome = execute(&scenario, options)?;
    let unix_ms = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis() as u64).unwrap_or(0);
    outcome.report["timestamp"] = json!({ "unix_ms": unix_ms, "wall_time_s": started.elapsed().as_secs_f64() });
    write_json(output, &outcome.report)?;
    Ok(outcome)
}

pub fn write_json(path: &Path, value: &Value) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Failure::precondition(format!("{}: {e}", path.display())))
}
