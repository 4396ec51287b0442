use rayon::prelude::*;
use serde::Serialize;

use crate::domain::{Domain, Mask, Nodes, PointId};
use crate::error::{Error, Result};
use crate::modulus::Modulus;
use crate::numeric::{compensated_sum, BISECTION_TOL, GEOMETRY_TOL};
use crate::operators::ScalarProfile;

const REFINEMENT_ROUNDS: usize = 3;
const MAX_DIM: usize = 3;

/// The point of the box farthest from its nearest node.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmptyBallCenter {
    /// Coordinates of the center, refined off the grid.
    pub x_bar: Vec<f64>,
    /// Grid point the refinement started from.
    pub grid_point: PointId,
    /// Distance from the center to its nearest node.
    pub radius: f64,
    /// Distance from the center to every node.
    pub node_distances: Vec<f64>,
}

fn node_coords(d: &Domain, nodes: &Nodes) -> Vec<Vec<f64>> {
    nodes.iter().map(|x| d.coords(x).expect("grid").to_vec()).collect()
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn nearest_node_dist(x: &[f64], nodes: &[Vec<f64>]) -> f64 {
    nodes.iter().map(|c| euclid(x, c)).fold(f64::INFINITY, f64::min)
}

/// Grid argmax of the distance to the nearest node (ties to the lowest
/// index), then a few rounds of local search on a grid of half the step.
pub fn empty_ball_center(d: &Domain, nodes: &Nodes) -> Result<EmptyBallCenter> {
    let (lo, hi) = d.bounds().ok_or(Error::NotABox)?;
    let coords = node_coords(d, nodes);
    let gaps: Vec<f64> =
        (0..d.len()).into_par_iter().map(|p| nearest_node_dist(d.coords(PointId(p)).expect("grid"), &coords)).collect();
    let mut grid_point = PointId(0);
    for (p, &g) in gaps.iter().enumerate() {
        if g > gaps[grid_point.0] + GEOMETRY_TOL {
            grid_point = PointId(p);
        }
    }

    let dim = lo.len();
    let mut best = d.coords(grid_point).expect("grid").to_vec();
    let mut best_gap = gaps[grid_point.0];
    let mut step = d.cell_widths().expect("grid").to_vec();
    for _ in 0..REFINEMENT_ROUNDS {
        step.iter_mut().for_each(|s| *s /= 2.0);
        let center = best.clone();
        for code in 0..3usize.pow(dim as u32) {
            let mut c = code;
            let cand: Vec<f64> = (0..dim)
                .map(|k| {
                    let offset = (c % 3) as f64 - 1.0;
                    c /= 3;
                    (center[k] + offset * step[k]).clamp(lo[k], hi[k])
                })
                .collect();
            let g = nearest_node_dist(&cand, &coords);
            if g > best_gap + GEOMETRY_TOL {
                best_gap = g;
                best = cand;
            }
        }
    }
    let node_distances = coords.iter().map(|c| euclid(&best, c)).collect();
    Ok(EmptyBallCenter { x_bar: best, grid_point, radius: best_gap, node_distances })
}

/// Outcome of the radius condition on `eps`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpsConditionCheck {
    pub satisfied: bool,
    /// First offending node (1-based) and its distance from the center.
    pub node: Option<usize>,
    pub distance: Option<f64>,
    pub radius: f64,
    /// `R + 4 eps`.
    pub threshold: f64,
    /// Distances within this of `R` count as equal to `R`.
    pub tolerance: f64,
}

/// Every node must satisfy `|r(x_i, x_bar) - R| <= h` or
/// `r(x_i, x_bar) >= R + 4 eps`.
pub fn check_eps_condition(center: &EmptyBallCenter, eps: f64, h: f64) -> EpsConditionCheck {
    let r = center.radius;
    let threshold = r + 4.0 * eps;
    let offending = center
        .node_distances
        .iter()
        .position(|&dist| !((dist - r).abs() <= h + GEOMETRY_TOL || dist >= threshold - GEOMETRY_TOL));
    EpsConditionCheck {
        satisfied: offending.is_none(),
        node: offending.map(|i| i + 1),
        distance: offending.map(|i| center.node_distances[i]),
        radius: r,
        threshold,
        tolerance: h,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapitalPsiResult {
    pub center: EmptyBallCenter,
    pub eps: f64,
    /// `R`.
    pub radius: f64,
    /// `R_bar`, the larger root of the radial profile.
    pub root_radius: f64,
    /// Node (0-based) whose ball fixes the averaging constant.
    pub chosen_node: usize,
    /// Mean of the radial profile over the chosen node's ball.
    pub ball_constant: f64,
    /// `Psi(x_bar)`.
    pub peak: f64,
    #[serde(skip)]
    pub profile: ScalarProfile,
    /// Mean of `Psi` over every node's ball.
    pub ball_averages: Vec<f64>,
    /// Allowed absolute ball average.
    pub tolerance: f64,
}

impl CapitalPsiResult {
    pub fn averages_within_tolerance(&self) -> bool {
        self.ball_averages.iter().all(|a| a.abs() <= self.tolerance)
    }
}

/// The radial profile: `omega(R + eps) - omega(t)` up to `R + eps`, its
/// mirror image on `(R + eps, R + 3 eps]`, and constant beyond.
fn radial(m: &Modulus, r: f64, eps: f64, t: f64) -> f64 {
    let top = m.eval_unchecked(r + eps);
    if t <= r + eps {
        top - m.eval_unchecked(t)
    } else if t <= r + 3.0 * eps {
        top - m.eval_unchecked(2.0 * (r + eps) - t)
    } else {
        top - m.eval_unchecked(r - eps)
    }
}

pub(crate) fn ball_mean(d: &Domain, ball: &Mask, value: impl Fn(PointId) -> f64) -> f64 {
    let w = d.weights();
    let num = compensated_sum(ball.indices().map(|i| w[i] * value(PointId(i))));
    let den = compensated_sum(ball.indices().map(|i| w[i]));
    num / den
}

/// Builds the truncated radial extremal function around the largest empty
/// ball of the nodes.
pub fn capital_psi(d: &Domain, m: &Modulus, nodes: &Nodes, eps: f64) -> Result<CapitalPsiResult> {
    let dim = d.dim().ok_or(Error::NotABox)?;
    if dim > MAX_DIM {
        return Err(Error::InvalidDomain(format!("dimension {dim} exceeds {MAX_DIM}")));
    }
    if !(eps > 0.0) {
        return Err(Error::NonPositiveRadius(eps));
    }
    let center = empty_ball_center(d, nodes)?;
    let r = center.radius;
    if eps >= r {
        return Err(Error::EpsTooLarge { eps, radius: r });
    }
    let check = check_eps_condition(&center, eps, d.h());
    if let (Some(node), Some(distance)) = (check.node, check.distance) {
        return Err(Error::EpsCondition { node, distance, radius: r, threshold: check.threshold });
    }
    let chosen_node = center
        .node_distances
        .iter()
        .position(|&dist| (dist - r).abs() <= d.h() + GEOMETRY_TOL)
        .ok_or(Error::NoNodeAtRadius(r))?;

    let x_bar = &center.x_bar;
    let rho: Vec<f64> = d.points().map(|s| d.dist_to_coords(s, x_bar).expect("grid")).collect();
    let balls = nodes.iter().map(|x| d.ball_mask(x, eps)).collect::<Result<Vec<_>>>()?;
    let c = ball_mean(d, &balls[chosen_node], |s| radial(m, r, eps, rho[s.0]));

    let psi = |t: f64| radial(m, r, eps, t) - c;
    let (mut a, mut b) = (r + eps, r + 3.0 * eps);
    if !(psi(a) <= 0.0 && psi(b) >= 0.0) {
        return Err(Error::InvariantBreach(format!(
            "radial profile has no sign change on [{a}, {b}]: {} and {}",
            psi(a),
            psi(b)
        )));
    }
    while b - a > BISECTION_TOL {
        let mid = 0.5 * (a + b);
        if psi(mid) < 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    let root_radius = 0.5 * (a + b);

    let profile = ScalarProfile::new(rho.iter().map(|&t| if t < root_radius { psi(t) } else { 0.0 }).collect())?;
    let ball_averages = balls.iter().map(|ball| ball_mean(d, ball, |s| profile[s])).collect();
    Ok(CapitalPsiResult {
        center,
        eps,
        radius: r,
        root_radius,
        chosen_node,
        ball_constant: c,
        peak: psi(0.0),
        profile,
        ball_averages,
        tolerance: m.grid_slack(d.h()),
    })
}
