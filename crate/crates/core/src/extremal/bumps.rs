use rand::Rng;

use crate::domain::{Domain, PointId};
use crate::error::{Error, Result};
use crate::lintegral::LFunction;
use crate::lspace::{random_element, Element, InstanceId, PointSet};
use crate::modulus::Modulus;
use crate::numeric::ELEMENT_TOL;
use crate::operators::{Functional, ScalarProfile};

fn check_unit_convex(x: &Element) -> Result<()> {
    if !x.is_convex() {
        return Err(Error::NotConvex);
    }
    let r = x.dist_to_zero();
    if r > 1.0 + ELEMENT_TOL {
        return Err(Error::NotUnit(r));
    }
    Ok(())
}

/// `s -> omega(r(t0, s)) x` for convex `x` with `h(x, theta) <= 1`.
pub fn omega_bump(d: &Domain, m: &Modulus, t0: PointId, x: &Element) -> Result<LFunction> {
    d.check_point(t0)?;
    check_unit_convex(x)?;
    LFunction::sample(d, |s| x.scale(m.eval_unchecked(d.dist(t0, s))))
}

/// `t -> u+(t) x + u-(t) x'` for convex invertible `x` with
/// `h(x, theta) <= 1`.
pub fn signed_extremal(d: &Domain, profile: &ScalarProfile, x: &Element) -> Result<LFunction> {
    profile.check_domain(d)?;
    check_unit_convex(x)?;
    let inv = x.try_invert().ok_or(Error::NotInvertible)?;
    let (pos, neg) = (profile.pos(), profile.neg());
    let values = d.points().map(|t| x.scale(pos[t]).add(&inv.scale(neg[t]))).collect::<Result<Vec<_>>>()?;
    LFunction::new(values)
}

/// `psi(s) = omega(r(t, s)) - phi(omega(r(t, .)) chi) / phi(chi)`.
pub fn psi_chi(d: &Domain, m: &Modulus, t: PointId, chi: &ScalarProfile, phi: &Functional) -> Result<ScalarProfile> {
    let c = crate::operators::ostrowski_bound(d, m, t, chi, phi)?;
    let u = ScalarProfile::omega_distance(d, m, t);
    ScalarProfile::new(u.values().iter().map(|v| v - c).collect())
}

/// A random convex element with `h(x, theta) <= 1`. Point sets come out as
/// singletons unless `polygon` is set.
pub fn random_unit_convex<R: Rng>(instance: InstanceId, polygon: bool, rng: &mut R) -> Element {
    let disk = |rng: &mut R| {
        let (r, a): (f64, f64) = (rng.gen_range(0.0..1.0), rng.gen_range(0.0..std::f64::consts::TAU));
        [r * a.cos(), r * a.sin()]
    };
    match instance {
        InstanceId::RealLine => Element::Real(rng.gen_range(-1.0..1.0)),
        InstanceId::IntervalSpace => {
            let (a, b): (f64, f64) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            Element::Interval(a.min(b), a.max(b))
        }
        InstanceId::PointSet2D => {
            let k = if polygon { rng.gen_range(2..=6) } else { 1 };
            let pts: Vec<_> = (0..k).map(|_| disk(rng)).collect();
            Element::Points(PointSet::new(pts).expect("finite points").convex_hull())
        }
        InstanceId::MaxPlusRay => Element::MaxPlus(0.0),
    }
}

/// A random member of `H^omega`: a constant plus
/// `sum_j c_j omega(r(t_j, .)) x_j` with `sum_j c_j <= 1` and `x_j` convex of
/// norm at most one. For point sets at most one `x_j` is a polygon, which
/// keeps the Minkowski sums small.
pub fn random_holder_function<R: Rng>(
    d: &Domain,
    m: &Modulus,
    instance: InstanceId,
    max_terms: usize,
    rng: &mut R,
) -> Result<LFunction> {
    let terms = rng.gen_range(1..=max_terms.max(1));
    let mut c: Vec<f64> = (0..terms).map(|_| rng.gen_range(0.0..1.0)).collect();
    let total: f64 = c.iter().sum::<f64>() / rng.gen_range(0.5..1.0);
    c.iter_mut().for_each(|v| *v /= total.max(1.0));
    let polygon_term = rng.gen_range(0..terms);
    let bumps: Vec<(PointId, Element)> = c
        .iter()
        .enumerate()
        .map(|(j, &cj)| {
            let t = PointId(rng.gen_range(0..d.len()));
            (t, random_unit_convex(instance, j == polygon_term, rng).scale(cj))
        })
        .collect();
    let base = random_element(instance, rng);
    let values = d
        .points()
        .map(|s| bumps.iter().try_fold(base.clone(), |acc, (t, x)| acc.add(&x.scale(m.eval_unchecked(d.dist(*t, s))))))
        .collect::<Result<Vec<_>>>()?;
    LFunction::new(values)
}
