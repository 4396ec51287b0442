use serde::Serialize;

use super::bumps::{psi_chi, signed_extremal};
use super::capital_psi::{capital_psi, CapitalPsiResult};
use super::membership::{verify_membership, MembershipReport};
use crate::domain::{Domain, Mask, Nodes};
use crate::error::{Error, Result};
use crate::lintegral::{integrate, mean_value, LFunction};
use crate::lspace::{Element, InstanceId};
use crate::modulus::Modulus;
use crate::operators::{measurement, value_dist, ScalarProfile};
use crate::recovery::{select_measurement, RecoveryProblem};

/// Two functions of the class with identical information whose target
/// values are far apart, so that no method can do better than half their
/// distance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessPair {
    pub f: LFunction,
    pub g: LFunction,
    /// `dist(Lambda f, Lambda g) / 2`.
    pub lower_bound: f64,
    /// Distance between the information of `f` and `g`, per coordinate.
    pub collision_residuals: Vec<f64>,
    pub collision_tolerance: f64,
    pub membership_f: MembershipReport,
    pub membership_g: MembershipReport,
}

impl WitnessPair {
    /// Whether every information coordinate collides within tolerance.
    pub fn collides(&self) -> bool {
        self.collision_residuals.iter().all(|r| *r <= self.collision_tolerance)
    }

    pub fn worst_residual(&self) -> f64 {
        self.collision_residuals.iter().copied().fold(0.0, f64::max)
    }
}

fn unit(instance: InstanceId) -> Result<(Element, Element)> {
    let y = instance.unit_element().ok_or(Error::NoUnitElement(instance))?;
    let inv = y.try_invert().ok_or(Error::NotInvertible)?;
    Ok((y, inv))
}

#[allow(clippy::too_many_arguments)]
fn finish(
    d: &Domain,
    m: &Modulus,
    f: LFunction,
    g: LFunction,
    lower_bound: f64,
    collision_residuals: Vec<f64>,
    collision_tolerance: f64,
    guaranteed: &[usize],
) -> Result<WitnessPair> {
    let membership_f = verify_membership(d, &f, m);
    let membership_g = verify_membership(d, &g, m);
    if !membership_f.ok() || !membership_g.ok() {
        return Err(Error::InvariantBreach(format!(
            "witness leaves the class: worst excess {} and {}",
            membership_f.worst_excess, membership_g.worst_excess
        )));
    }
    for &i in guaranteed {
        if !(collision_residuals[i] <= collision_tolerance) {
            return Err(Error::CollisionExceeded {
                coordinate: i + 1,
                residual: collision_residuals[i],
                tolerance: collision_tolerance,
            });
        }
    }
    Ok(WitnessPair { f, g, lower_bound, collision_residuals, collision_tolerance, membership_f, membership_g })
}

const EXACT_COLLISION_TOL: f64 = 1e-9;

/// Integral recovery: `f = m y`, `g = m y'` with `m = min_i omega(r(x_i, .))`.
pub fn integral_witness(d: &Domain, m: &Modulus, instance: InstanceId, nodes: &Nodes, q: &Mask) -> Result<WitnessPair> {
    let (y, y_inv) = unit(instance)?;
    let profile = ScalarProfile::from_fn(d, |t| {
        nodes.iter().map(|x| m.eval_unchecked(d.dist(x, t))).fold(f64::INFINITY, f64::min)
    })?;
    let f = LFunction::sample(d, |t| y.scale(profile[t]))?;
    let g = LFunction::sample(d, |t| y_inv.scale(profile[t]))?;
    let residuals = nodes.iter().map(|x| f.at(x).dist(g.at(x))).collect::<Result<Vec<_>>>()?;
    let lower = 0.5 * value_dist(&integrate(d, &f, q)?, &integrate(d, &g, q)?)?;
    let all: Vec<usize> = (0..nodes.len()).collect();
    finish(d, m, f, g, lower, residuals, EXACT_COLLISION_TOL, &all)
}

/// Value recovery: `f = psi+ y + psi- y'` and its mirror, with `psi` built
/// from the selected measurement. The pair is guaranteed to collide on that
/// measurement only.
pub fn value_witness(
    d: &Domain,
    m: &Modulus,
    instance: InstanceId,
    t: crate::domain::PointId,
    measurements: &[crate::recovery::Measurement],
) -> Result<WitnessPair> {
    let (y, _) = unit(instance)?;
    let (_, i_star) = select_measurement(d, m, t, measurements)?;
    let chosen = &measurements[i_star];
    let psi = psi_chi(d, m, t, &chosen.chi, &chosen.op.functional())?;
    let minus = ScalarProfile::new(psi.values().iter().map(|v| -v).collect())?;
    let f = signed_extremal(d, &psi, &y)?;
    let g = signed_extremal(d, &minus, &y)?;
    let residuals = measurements
        .iter()
        .map(|mm| value_dist(&measurement(d, &mm.op, &mm.chi, &f)?, &measurement(d, &mm.op, &mm.chi, &g)?))
        .collect::<Result<Vec<_>>>()?;
    let op = &chosen.op;
    let lower = 0.5 * value_dist(&op.lambda(f.at(t)), &op.lambda(g.at(t)))?;
    finish(d, m, f, g, lower, residuals, EXACT_COLLISION_TOL, &[i_star])
}

/// Uniform recovery: `Psi y` and `Psi y'` for the radial `Psi`.
pub fn uniform_witness(
    d: &Domain,
    m: &Modulus,
    instance: InstanceId,
    nodes: &Nodes,
    psi: &CapitalPsiResult,
) -> Result<WitnessPair> {
    let (y, _) = unit(instance)?;
    let minus = ScalarProfile::new(psi.profile.values().iter().map(|v| -v).collect())?;
    let f = signed_extremal(d, &psi.profile, &y)?;
    let g = signed_extremal(d, &minus, &y)?;
    let residuals = nodes
        .iter()
        .map(|x| {
            let ball = d.ball_mask(x, psi.eps)?;
            value_dist(&mean_value(d, &f, &ball)?, &mean_value(d, &g, &ball)?)
        })
        .collect::<Result<Vec<_>>>()?;
    let widest = f
        .values()
        .iter()
        .zip(g.values())
        .map(|(a, b)| value_dist(a, b))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let all: Vec<usize> = (0..nodes.len()).collect();
    finish(d, m, f, g, 0.5 * widest, residuals, 2.0 * psi.tolerance, &all)
}

/// The extremal pair for a recovery problem.
pub fn witness_pair(d: &Domain, m: &Modulus, instance: InstanceId, problem: &RecoveryProblem) -> Result<WitnessPair> {
    match problem {
        RecoveryProblem::Integral { nodes, q } => integral_witness(d, m, instance, nodes, q),
        RecoveryProblem::Value { t, measurements } => value_witness(d, m, instance, *t, measurements),
        RecoveryProblem::Uniform { nodes, eps } => {
            unit(instance)?;
            let psi = capital_psi(d, m, nodes, *eps)?;
            uniform_witness(d, m, instance, nodes, &psi)
        }
    }
}
