//! Optimal recovery of integrals, values and whole functions from node
//! values or averaged measurements.
//!
//! Node and measurement indices in reports are 1-based.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{Domain, Mask, Nodes, PointId};
use crate::error::{Error, Result};
use crate::extremal::{
    ball_mean, capital_psi, check_eps_condition, empty_ball_center, integral_witness, uniform_witness, value_witness,
    verify_membership, EpsConditionCheck, MembershipReport, WitnessPair,
};
use crate::lintegral::{integrate, mean_value, LFunction};
use crate::lspace::{ConvexAccumulator, Element, InstanceId};
use crate::modulus::Modulus;
use crate::numeric::{compensated_sum, CompensatedSum, GEOMETRY_TOL};
use crate::operators::{measurement, ostrowski_bound, value_dist, LambdaPhiOperator, ScalarProfile};

/// A measuring device `f -> Lambda(chi f) / phi(chi)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub op: LambdaPhiOperator,
    pub chi: ScalarProfile,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RecoveryProblem {
    /// Recover `int_Q f dmu` from `f(x_1), ..., f(x_n)`.
    Integral { nodes: Nodes, q: Mask },
    /// Recover `lambda(f(t))` from measurements of `f`.
    Value { t: PointId, measurements: Vec<Measurement> },
    /// Recover `f` from its means over the balls `B(x_i, eps)`.
    Uniform { nodes: Nodes, eps: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    RecoverIntegral,
    RecoverValue,
    RecoverUniform,
}

impl RecoveryProblem {
    pub fn kind(&self) -> ProblemKind {
        match self {
            RecoveryProblem::Integral { .. } => ProblemKind::RecoverIntegral,
            RecoveryProblem::Value { .. } => ProblemKind::RecoverValue,
            RecoveryProblem::Uniform { .. } => ProblemKind::RecoverUniform,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum MethodOutput {
    Single(Element),
    PerPoint(Vec<Element>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Sharpness {
    Verified,
    Unverified { reason: String },
}

/// Deviation of the method from the true value for the supplied function.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct APosteriori {
    pub deviation: f64,
    pub allowed: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    pub tie_points: Option<usize>,
    pub i_star: Option<usize>,
    pub measurement_bounds: Option<Vec<f64>>,
    pub argmax_point: Option<Vec<f64>>,
    pub center: Option<Vec<f64>>,
    pub radius: Option<f64>,
    pub root_radius: Option<f64>,
    pub chosen_node: Option<usize>,
    pub peak: Option<f64>,
    pub ball_averages: Option<Vec<f64>>,
    pub ball_tolerance: Option<f64>,
    pub eps_condition: Option<EpsConditionCheck>,
    pub membership: Option<MembershipReport>,
    pub a_posteriori: Option<APosteriori>,
    pub collision_residuals: Option<Vec<f64>>,
    pub collision_tolerance: Option<f64>,
    pub notes: Vec<String>,
}

/// Pointwise error bound of uniform recovery.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileRow {
    pub coords: Vec<f64>,
    pub bound: f64,
    /// 1-based Voronoi label.
    pub label: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecoveryReport {
    pub problem: ProblemKind,
    pub instance: InstanceId,
    pub upper_bound: f64,
    pub method_output: Option<MethodOutput>,
    pub lower_bound: Option<f64>,
    pub gap: Option<f64>,
    /// `gap / h`, the constant in `gap <= C h`.
    pub gap_over_h: Option<f64>,
    pub sharpness: Sharpness,
    pub grid_h: f64,
    pub diagnostics: Diagnostics,
    #[serde(skip)]
    pub profile: Option<Vec<ProfileRow>>,
    #[serde(skip)]
    pub witness: Option<WitnessPair>,
}

/// `upper_bound - lower_bound`.
pub fn sharpness_gap(report: &RecoveryReport) -> Result<f64> {
    report.lower_bound.map(|l| report.upper_bound - l).ok_or(Error::LowerBoundUnavailable)
}

/// Allowed amount by which a discrete lower bound may exceed the upper one.
fn bound_tolerance(d: &Domain, m: &Modulus) -> f64 {
    2.0 * m.grid_slack(d.h()) + 1e-9
}

fn new_report(problem: ProblemKind, instance: InstanceId, d: &Domain, upper_bound: f64) -> RecoveryReport {
    RecoveryReport {
        problem,
        instance,
        upper_bound,
        method_output: None,
        lower_bound: None,
        gap: None,
        gap_over_h: None,
        sharpness: Sharpness::Unverified { reason: "no witness constructed".into() },
        grid_h: d.h(),
        diagnostics: Diagnostics::default(),
        profile: None,
        witness: None,
    }
}

fn unverified(reason: impl Into<String>) -> Sharpness {
    Sharpness::Unverified { reason: reason.into() }
}

/// Attaches a witness lower bound, or records why there is none.
fn attach_witness(report: &mut RecoveryReport, d: &Domain, m: &Modulus, witness: Result<WitnessPair>) -> Result<()> {
    match witness {
        Ok(w) => {
            report.diagnostics.collision_residuals = Some(w.collision_residuals.clone());
            report.diagnostics.collision_tolerance = Some(w.collision_tolerance);
            if w.collides() {
                let gap = report.upper_bound - w.lower_bound;
                if gap < -bound_tolerance(d, m) {
                    return Err(Error::InvariantBreach(format!(
                        "lower bound {} exceeds upper bound {}",
                        w.lower_bound, report.upper_bound
                    )));
                }
                report.lower_bound = Some(w.lower_bound);
                report.gap = Some(gap);
                report.gap_over_h = (d.h() > 0.0).then(|| gap / d.h());
                report.sharpness = Sharpness::Verified;
            } else {
                report.sharpness =
                    unverified(format!("witness information differs by {} on some coordinate", w.worst_residual()));
            }
            report.witness = Some(w);
        }
        Err(Error::NoUnitElement(instance)) => {
            report.sharpness = unverified(format!("instance {instance} has no convex invertible unit element"));
        }
        Err(Error::CollisionExceeded { coordinate, residual, tolerance }) => {
            report.sharpness = unverified(format!(
                "witness information differs by {residual} > {tolerance} on coordinate {coordinate}"
            ));
        }
        Err(e) => return Err(e),
    }
    Ok(())
}

fn check_function(
    report: &mut RecoveryReport,
    d: &Domain,
    m: &Modulus,
    instance: InstanceId,
    f: &LFunction,
) -> Result<bool> {
    f.check_domain(d)?;
    if f.instance() != instance {
        return Err(Error::InstanceMismatch { expected: instance, found: f.instance() });
    }
    let membership = verify_membership(d, f, m);
    let ok = membership.ok();
    if !ok {
        report.diagnostics.notes.push("function is not in the class; deviation check skipped".into());
    }
    report.diagnostics.membership = Some(membership);
    Ok(ok)
}

fn a_posteriori(report: &mut RecoveryReport, deviation: f64, allowed: f64, member: bool, enforce: bool) -> Result<()> {
    let passed = deviation <= allowed;
    report.diagnostics.a_posteriori = Some(APosteriori { deviation, allowed, passed });
    if member && enforce && !passed {
        return Err(Error::InvariantBreach(format!("method deviation {deviation} exceeds the bound {allowed}")));
    }
    Ok(())
}

/// `min_i omega(r(x_i, t))` at every point.
fn nearest_node_modulus(d: &Domain, m: &Modulus, nodes: &Nodes) -> Vec<f64> {
    (0..d.len())
        .into_par_iter()
        .map(|t| nodes.iter().map(|x| m.eval_unchecked(d.dist(x, PointId(t)))).fold(f64::INFINITY, f64::min))
        .collect()
}

/// Optimal recovery of `int_Q f dmu` from the node values.
pub fn recover_integral(
    d: &Domain,
    m: &Modulus,
    instance: InstanceId,
    nodes: &Nodes,
    q: &Mask,
    f: Option<&LFunction>,
) -> Result<RecoveryReport> {
    let measure_q = d.measure_of(q)?;
    if !(measure_q > 0.0) {
        return Err(Error::ZeroMeasure);
    }
    let near = nearest_node_modulus(d, m, nodes);
    let w = d.weights();
    let upper = compensated_sum(q.indices().map(|t| w[t] * near[t]));
    let mut report = new_report(ProblemKind::RecoverIntegral, instance, d, upper);

    let voronoi = d.voronoi_partition(nodes);
    report.diagnostics.tie_points = Some(voronoi.tie_points);

    if let Some(f) = f {
        let member = check_function(&mut report, d, m, instance, f)?;
        let mut cell_measure = vec![CompensatedSum::new(); nodes.len()];
        for t in q.indices() {
            cell_measure[voronoi.labels[t]].add(w[t]);
        }
        let mut acc = ConvexAccumulator::new(instance);
        for (i, x) in nodes.iter().enumerate() {
            acc.add_scaled(cell_measure[i].value(), f.at(x))?;
        }
        let method = acc.finish();
        let deviation = value_dist(&integrate(d, f, q)?, &method)?;
        let allowed = upper + m.grid_slack(d.h()) * measure_q + 1e-9;
        a_posteriori(&mut report, deviation, allowed, member, true)?;
        report.method_output = Some(MethodOutput::Single(method));
    }

    let witness = integral_witness(d, m, instance, nodes, q);
    attach_witness(&mut report, d, m, witness)?;
    Ok(report)
}

/// Ostrowski bounds of all measurements and the index of the smallest,
/// lowest index on ties.
pub fn select_measurement(
    d: &Domain,
    m: &Modulus,
    t: PointId,
    measurements: &[Measurement],
) -> Result<(Vec<f64>, usize)> {
    let first = measurements.first().ok_or(Error::NoMeasurements)?;
    if let Some(i) = measurements.iter().position(|mm| mm.op != first.op) {
        return Err(Error::MixedOperators(i + 1));
    }
    let bounds = measurements
        .iter()
        .map(|mm| ostrowski_bound(d, m, t, &mm.chi, &mm.op.functional()))
        .collect::<Result<Vec<_>>>()?;
    let mut best = 0;
    for (i, &b) in bounds.iter().enumerate() {
        if b < bounds[best] {
            best = i;
        }
    }
    Ok((bounds, best))
}

/// Optimal recovery of `lambda(f(t))` from measurements of `f`.
pub fn recover_value(
    d: &Domain,
    m: &Modulus,
    instance: InstanceId,
    t: PointId,
    measurements: &[Measurement],
    f: Option<&LFunction>,
) -> Result<RecoveryReport> {
    d.check_point(t)?;
    let (bounds, i_star) = select_measurement(d, m, t, measurements)?;
    let chosen = &measurements[i_star];
    let mut report = new_report(ProblemKind::RecoverValue, instance, d, bounds[i_star]);
    report.diagnostics.i_star = Some(i_star + 1);
    report.diagnostics.measurement_bounds = Some(bounds);
    report.diagnostics.notes.push("method returns the normalized measurement with the smallest bound".into());

    if let Some(f) = f {
        let member = check_function(&mut report, d, m, instance, f)?;
        let method = measurement(d, &chosen.op, &chosen.chi, f)?;
        let deviation = value_dist(&chosen.op.lambda(f.at(t)), &method)?;
        let enforce = chosen.op.supports_signed_decomposition();
        let allowed = report.upper_bound + 1e-9;
        a_posteriori(&mut report, deviation, allowed, member, enforce)?;
        report.method_output = Some(MethodOutput::Single(method));
    }

    if chosen.op.supports_signed_decomposition() {
        let witness = value_witness(d, m, instance, t, measurements);
        attach_witness(&mut report, d, m, witness)?;
    } else {
        report.sharpness = unverified("operator has no signed decomposition");
    }
    Ok(report)
}

struct Ball {
    points: Vec<usize>,
    weights: Vec<f64>,
    measure: f64,
}

/// Optimal recovery of `f` on the whole box from its means over
/// `B(x_i, eps)`.
pub fn recover_uniform(
    d: &Domain,
    m: &Modulus,
    instance: InstanceId,
    nodes: &Nodes,
    eps: f64,
    f: Option<&LFunction>,
) -> Result<RecoveryReport> {
    if d.dim().is_none() {
        return Err(Error::NotABox);
    }
    let masks = nodes.iter().map(|x| d.ball_mask(x, eps)).collect::<Result<Vec<_>>>()?;
    let balls: Vec<Ball> = masks
        .iter()
        .map(|mask| {
            let points: Vec<usize> = mask.indices().collect();
            let weights: Vec<f64> = points.iter().map(|&i| d.weights()[i]).collect();
            let measure = compensated_sum(weights.iter().copied());
            Ball { points, weights, measure }
        })
        .collect();

    let bounds: Vec<f64> = (0..d.len())
        .into_par_iter()
        .map(|t| {
            balls
                .iter()
                .map(|b| {
                    let mut s = CompensatedSum::new();
                    for (&p, &w) in b.points.iter().zip(&b.weights) {
                        s.add(w * m.eval_unchecked(d.dist(PointId(t), PointId(p))));
                    }
                    s.value() / b.measure
                })
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let mut argmax = 0;
    for (t, &b) in bounds.iter().enumerate() {
        if b > bounds[argmax] + GEOMETRY_TOL {
            argmax = t;
        }
    }
    let mut report = new_report(ProblemKind::RecoverUniform, instance, d, bounds[argmax]);
    report.diagnostics.argmax_point = d.coords(PointId(argmax)).map(<[f64]>::to_vec);

    let voronoi = d.voronoi_partition(nodes);
    report.diagnostics.tie_points = Some(voronoi.tie_points);
    report.profile = Some(
        d.points()
            .map(|t| ProfileRow {
                coords: d.coords(t).expect("grid").to_vec(),
                bound: bounds[t.0],
                label: voronoi.labels[t.0] + 1,
            })
            .collect(),
    );

    if let Some(f) = f {
        let member = check_function(&mut report, d, m, instance, f)?;
        let means = masks.iter().map(|b| mean_value(d, f, b)).collect::<Result<Vec<_>>>()?;
        let output: Vec<Element> = voronoi.labels.iter().map(|&l| means[l].clone()).collect();
        let deviation = f
            .values()
            .par_iter()
            .zip(&output)
            .map(|(v, o)| value_dist(&v.convexify(), o))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        let allowed = report.upper_bound + bound_tolerance(d, m);
        a_posteriori(&mut report, deviation, allowed, member, true)?;
        report.method_output = Some(MethodOutput::PerPoint(output));
    }

    match capital_psi(d, m, nodes, eps) {
        Ok(psi) => {
            let d_ = &mut report.diagnostics;
            d_.center = Some(psi.center.x_bar.clone());
            d_.radius = Some(psi.radius);
            d_.root_radius = Some(psi.root_radius);
            d_.chosen_node = Some(psi.chosen_node + 1);
            d_.peak = Some(psi.peak);
            d_.ball_averages = Some(psi.ball_averages.clone());
            d_.ball_tolerance = Some(psi.tolerance);
            d_.eps_condition = Some(check_eps_condition(&psi.center, eps, d.h()));
            if nodes.len() > 1 {
                let at_r = psi.center.node_distances.iter().filter(|&&r| (r - psi.radius).abs() <= d.h()).count();
                if at_r > 1 {
                    d_.notes.push(format!("{at_r} nodes at distance R; the lowest index is used"));
                }
            }
            let witness = uniform_witness(d, m, instance, nodes, &psi);
            attach_witness(&mut report, d, m, witness)?;
        }
        Err(e @ (Error::EpsCondition { .. } | Error::EpsTooLarge { .. })) => {
            if let Ok(center) = empty_ball_center(d, nodes) {
                report.diagnostics.center = Some(center.x_bar.clone());
                report.diagnostics.radius = Some(center.radius);
                report.diagnostics.eps_condition = Some(check_eps_condition(&center, eps, d.h()));
            }
            report.sharpness = unverified(e.to_string());
        }
        Err(e @ Error::InvalidDomain(_)) => report.sharpness = unverified(e.to_string()),
        Err(e) => return Err(e),
    }
    Ok(report)
}

/// Runs the solver for `problem`.
pub fn recover(
    d: &Domain,
    m: &Modulus,
    instance: InstanceId,
    problem: &RecoveryProblem,
    f: Option<&LFunction>,
) -> Result<RecoveryReport> {
    match problem {
        RecoveryProblem::Integral { nodes, q } => recover_integral(d, m, instance, nodes, q, f),
        RecoveryProblem::Value { t, measurements } => recover_value(d, m, instance, *t, measurements, f),
        RecoveryProblem::Uniform { nodes, eps } => recover_uniform(d, m, instance, nodes, *eps, f),
    }
}

/// Mean of `omega(r(t, .))` over a ball, exposed for checks.
pub fn mean_ball_modulus(d: &Domain, m: &Modulus, t: PointId, ball: &Mask) -> f64 {
    ball_mean(d, ball, |s| m.eval_unchecked(d.dist(t, s)))
}
