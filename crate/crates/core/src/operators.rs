//! Operators of (lambda, phi)-type, measuring devices and Ostrowski-type
//! bounds.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::domain::{Domain, PointId};
use crate::error::{Error, Result};
use crate::lintegral::{integrate, LFunction};
use crate::lspace::{random_element, Element, InstanceId};
use crate::modulus::Modulus;
use crate::numeric::{compensated_sum, neg_part, pos_part, ELEMENT_TOL};

/// A monotone functional on real functions over the domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Functional {
    /// `u -> sum_t w_t u(t)` with the domain weights, the integral.
    WeightedSum,
    /// `u -> max_t |u(t)|`.
    #[serde(alias = "sup")]
    SupNorm,
    /// `u -> sum_t v_t |u(t)|` with explicit nonnegative weights.
    WeightedL1(Vec<f64>),
}

impl Functional {
    pub fn validate(&self, domain: &Domain) -> Result<()> {
        if let Functional::WeightedL1(v) = self {
            if v.len() != domain.len() {
                return Err(Error::LengthMismatch { expected: domain.len(), found: v.len() });
            }
            if let Some((index, &value)) = v.iter().enumerate().find(|(_, w)| !(**w >= 0.0 && w.is_finite())) {
                return Err(Error::NegativeProfile { index, value });
            }
        }
        Ok(())
    }

    pub fn apply(&self, domain: &Domain, u: &[f64]) -> Result<f64> {
        if u.len() != domain.len() {
            return Err(Error::LengthMismatch { expected: domain.len(), found: u.len() });
        }
        self.validate(domain)?;
        Ok(match self {
            Functional::WeightedSum => compensated_sum(domain.weights().iter().zip(u).map(|(w, x)| w * x)),
            Functional::SupNorm => u.iter().fold(0.0, |m, x| m.max(x.abs())),
            Functional::WeightedL1(v) => compensated_sum(v.iter().zip(u).map(|(w, x)| w * x.abs())),
        })
    }

    fn apply_fn(&self, domain: &Domain, u: impl Fn(usize) -> f64) -> Result<f64> {
        let values: Vec<f64> = (0..domain.len()).map(u).collect();
        self.apply(domain, &values)
    }
}

/// One real value per domain point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ScalarProfile(Vec<f64>);

impl ScalarProfile {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidDomain(format!("profile value at index {i} is not finite")));
        }
        Ok(ScalarProfile(values))
    }

    pub fn from_fn(domain: &Domain, f: impl FnMut(PointId) -> f64) -> Result<Self> {
        Self::new(domain.points().map(f).collect())
    }

    pub fn constant(domain: &Domain, c: f64) -> Self {
        ScalarProfile(vec![c; domain.len()])
    }

    /// `omega(r(t, .))`.
    pub fn omega_distance(domain: &Domain, m: &Modulus, t: PointId) -> Self {
        ScalarProfile(domain.points().map(|s| m.eval_unchecked(domain.dist(t, s))).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_values(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn pos(&self) -> ScalarProfile {
        ScalarProfile(self.0.iter().map(|&v| pos_part(v)).collect())
    }

    pub fn neg(&self) -> ScalarProfile {
        ScalarProfile(self.0.iter().map(|&v| neg_part(v)).collect())
    }

    pub fn check_domain(&self, domain: &Domain) -> Result<()> {
        if self.0.len() == domain.len() {
            Ok(())
        } else {
            Err(Error::LengthMismatch { expected: domain.len(), found: self.0.len() })
        }
    }

    pub fn check_nonnegative(&self) -> Result<()> {
        match self.0.iter().position(|&v| v < 0.0) {
            Some(index) => Err(Error::NegativeProfile { index, value: self.0[index] }),
            None => Ok(()),
        }
    }

    pub fn product(&self, other: &ScalarProfile) -> ScalarProfile {
        ScalarProfile(self.0.iter().zip(&other.0).map(|(a, b)| a * b).collect())
    }
}

impl std::ops::Index<PointId> for ScalarProfile {
    type Output = f64;

    fn index(&self, p: PointId) -> &f64 {
        &self.0[p.0]
    }
}

/// The two operator kinds that ship.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum LambdaPhiOperator {
    /// `Lambda f = int f dmu` with `lambda = P` and the integral as `phi`.
    IntegralOp {},
    /// `Lambda f = ||h(f(.), theta)|| y` with `lambda(x) = h(x, theta) y`.
    NormOp { norm: Functional, y: Element },
}

impl LambdaPhiOperator {
    pub fn integral() -> Self {
        LambdaPhiOperator::IntegralOp {}
    }

    /// Requires `y` convex with `h(y, theta) <= 1`.
    pub fn norm(norm: Functional, y: Element) -> Result<Self> {
        let op = LambdaPhiOperator::NormOp { norm, y };
        op.validate()?;
        Ok(op)
    }

    pub fn validate(&self) -> Result<()> {
        if let LambdaPhiOperator::NormOp { y, .. } = self {
            if !y.is_convex() {
                return Err(Error::NotConvex);
            }
            let r = y.dist_to_zero();
            if r > 1.0 + ELEMENT_TOL {
                return Err(Error::NotUnit(r));
            }
        }
        Ok(())
    }

    pub fn functional(&self) -> Functional {
        match self {
            LambdaPhiOperator::IntegralOp {} => Functional::WeightedSum,
            LambdaPhiOperator::NormOp { norm, .. } => norm.clone(),
        }
    }

    /// Instance of the values of the operator on functions into `input`.
    pub fn codomain(&self, input: InstanceId) -> InstanceId {
        match self {
            LambdaPhiOperator::IntegralOp {} => input,
            LambdaPhiOperator::NormOp { y, .. } => y.instance(),
        }
    }

    pub fn lambda(&self, x: &Element) -> Element {
        match self {
            LambdaPhiOperator::IntegralOp {} => x.convexify(),
            LambdaPhiOperator::NormOp { y, .. } => y.scale(x.dist_to_zero()),
        }
    }

    /// Whether `Lambda(u x) = lambda(x) phi(u+) + lambda(x') phi(u-)` holds
    /// for signed `u`, which the sharpness results need.
    pub fn supports_signed_decomposition(&self) -> bool {
        matches!(self, LambdaPhiOperator::IntegralOp {})
    }

    pub fn apply(&self, domain: &Domain, f: &LFunction) -> Result<Element> {
        f.check_domain(domain)?;
        match self {
            LambdaPhiOperator::IntegralOp {} => integrate(domain, f, &domain.full_mask()),
            LambdaPhiOperator::NormOp { norm, y } => {
                let r = norm.apply_fn(domain, |i| f.values()[i].dist_to_zero())?;
                Ok(y.scale(r))
            }
        }
    }
}

/// Distance between operator values. Point sets in the range of an operator
/// are convex, and are compared as polygons.
pub fn value_dist(a: &Element, b: &Element) -> Result<f64> {
    a.hull_dist(b)
}

pub fn apply_operator(domain: &Domain, op: &LambdaPhiOperator, f: &LFunction) -> Result<Element> {
    op.apply(domain, f)
}

fn positive_functional(domain: &Domain, phi: &Functional, chi: &ScalarProfile) -> Result<f64> {
    chi.check_domain(domain)?;
    chi.check_nonnegative()?;
    let v = phi.apply(domain, chi.values())?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(Error::ZeroFunctional(v))
    }
}

/// The measuring device `Lambda(chi f) / phi(chi)`.
pub fn measurement(domain: &Domain, op: &LambdaPhiOperator, chi: &ScalarProfile, f: &LFunction) -> Result<Element> {
    let phi_chi = positive_functional(domain, &op.functional(), chi)?;
    let chi_f = f.scale_by(chi.values())?;
    Ok(op.apply(domain, &chi_f)?.scale(1.0 / phi_chi))
}

/// `phi(omega(r(t, .)) chi) / phi(chi)`.
pub fn ostrowski_bound(domain: &Domain, m: &Modulus, t: PointId, chi: &ScalarProfile, phi: &Functional) -> Result<f64> {
    domain.check_point(t)?;
    let phi_chi = positive_functional(domain, phi, chi)?;
    let u = ScalarProfile::omega_distance(domain, m, t).product(chi);
    Ok(phi.apply(domain, u.values())? / phi_chi)
}

/// `|phi(psi+ chi) - phi(psi- chi)|` for `psi = u - phi(u chi) / phi(chi)`.
pub fn chi_averaging_defect(domain: &Domain, phi: &Functional, chi: &ScalarProfile, u: &ScalarProfile) -> Result<f64> {
    u.check_domain(domain)?;
    let phi_chi = positive_functional(domain, phi, chi)?;
    let c = phi.apply(domain, u.product(chi).values())? / phi_chi;
    let psi = ScalarProfile(u.values().iter().map(|v| v - c).collect());
    let plus = phi.apply(domain, psi.pos().product(chi).values())?;
    let minus = phi.apply(domain, psi.neg().product(chi).values())?;
    Ok((plus - minus).abs())
}

/// A failed defining-property check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LambdaPhiViolation {
    pub property: &'static str,
    pub trial: usize,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LambdaPhiReport {
    pub trials: usize,
    pub seed: u64,
    /// Largest `dist(Lambda f, Lambda g) - phi(dist(lambda f, lambda g))`.
    pub lipschitz_worst_excess: f64,
    /// Largest `dist(Lambda(u x), phi(u) lambda(x))`.
    pub homogeneity_worst_error: f64,
    pub violations: Vec<LambdaPhiViolation>,
}

impl LambdaPhiReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

const MAX_REPORTED_VIOLATIONS: usize = 10;

/// Samples random `f`, `g`, nonnegative `u` and `x` and checks
/// `dist(Lambda f, Lambda g) <= phi(t -> dist(lambda f(t), lambda g(t)))`
/// and `Lambda(u x) = phi(u) lambda(x)`.
pub fn verify_lambda_phi(
    domain: &Domain,
    op: &LambdaPhiOperator,
    instance: InstanceId,
    trials: usize,
    seed: u64,
) -> Result<LambdaPhiReport> {
    op.validate()?;
    let phi = op.functional();
    phi.validate(domain)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = LambdaPhiReport {
        trials,
        seed,
        lipschitz_worst_excess: f64::NEG_INFINITY,
        homogeneity_worst_error: 0.0,
        violations: Vec::new(),
    };
    let push = |report: &mut LambdaPhiReport, v: LambdaPhiViolation| {
        if report.violations.len() < MAX_REPORTED_VIOLATIONS {
            report.violations.push(v);
        }
    };
    for trial in 0..trials {
        let f = LFunction::sample(domain, |_| random_element(instance, &mut rng))?;
        let g = LFunction::sample(domain, |_| random_element(instance, &mut rng))?;
        let lhs = value_dist(&op.apply(domain, &f)?, &op.apply(domain, &g)?)?;
        let pointwise = f
            .values()
            .iter()
            .zip(g.values())
            .map(|(a, b)| value_dist(&op.lambda(a), &op.lambda(b)))
            .collect::<Result<Vec<_>>>()?;
        let rhs = phi.apply(domain, &pointwise)?;
        let excess = lhs - rhs;
        report.lipschitz_worst_excess = report.lipschitz_worst_excess.max(excess);
        if !(excess <= 1e-9) {
            push(&mut report, LambdaPhiViolation { property: "lipschitz", trial, lhs, rhs });
        }

        let x = random_element(instance, &mut rng);
        let u: Vec<f64> = (0..domain.len()).map(|_| rng.gen_range(0.0..2.0)).collect();
        let ux = LFunction::sample(domain, |p| x.scale(u[p.0]))?;
        let lhs_el = op.apply(domain, &ux)?;
        let rhs_el = op.lambda(&x).scale(phi.apply(domain, &u)?);
        let err = value_dist(&lhs_el, &rhs_el)?;
        report.homogeneity_worst_error = report.homogeneity_worst_error.max(err);
        let tol = 1e-9 * (1.0 + rhs_el.dist_to_zero());
        if !(err <= tol) {
            push(&mut report, LambdaPhiViolation { property: "homogeneity", trial, lhs: err, rhs: tol });
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> Domain {
        Domain::interval(0.0, 1.0, n).unwrap()
    }

    fn x(d: &Domain, p: PointId) -> f64 {
        d.coords(p).unwrap()[0]
    }

    fn iv(a: f64, b: f64) -> Element {
        Element::interval(a, b).unwrap()
    }

    #[test]
    fn functionals_on_a_constant() {
        let d = grid(4);
        let u = [1.0, -2.0, 1.0, 1.0];
        assert_eq!(Functional::WeightedSum.apply(&d, &u).unwrap(), 0.25);
        assert_eq!(Functional::SupNorm.apply(&d, &u).unwrap(), 2.0);
        assert_eq!(Functional::WeightedL1(vec![1.0; 4]).apply(&d, &u).unwrap(), 5.0);
        assert!(Functional::WeightedL1(vec![1.0; 3]).apply(&d, &u).is_err());
    }

    #[test]
    fn apply_operator_examples() {
        let d = grid(1000);
        let f = LFunction::sample(&d, |p| iv(0.0, x(&d, p))).unwrap();
        let op = LambdaPhiOperator::norm(Functional::SupNorm, iv(1.0, 1.0)).unwrap();
        let v = op.apply(&d, &f).unwrap();
        assert!(v.dist(&iv(1.0, 1.0)).unwrap() <= d.h());

        let g = LFunction::sample(&d, |p| iv(x(&d, p), x(&d, p) + 1.0)).unwrap();
        let v = LambdaPhiOperator::integral().apply(&d, &g).unwrap();
        assert!(v.dist(&iv(0.5, 1.5)).unwrap() < 1e-12);

        let op = LambdaPhiOperator::norm(Functional::SupNorm, iv(0.0, 0.0)).unwrap();
        assert_eq!(op.apply(&d, &f).unwrap(), iv(0.0, 0.0));
    }

    #[test]
    fn norm_op_needs_a_small_convex_y() {
        assert_eq!(LambdaPhiOperator::norm(Functional::SupNorm, iv(0.0, 2.0)), Err(Error::NotUnit(2.0)));
        let three = Element::points(vec![[0.0, 0.0], [0.25, 0.0], [0.5, 0.0]]).unwrap();
        assert_eq!(LambdaPhiOperator::norm(Functional::SupNorm, three), Err(Error::NotConvex));
    }

    #[test]
    fn measurement_examples() {
        let d = grid(1000);
        let op = LambdaPhiOperator::integral();
        let f = LFunction::sample(&d, |p| iv(0.0, x(&d, p))).unwrap();
        let one = ScalarProfile::constant(&d, 1.0);
        assert!(measurement(&d, &op, &one, &f).unwrap().dist(&iv(0.0, 0.5)).unwrap() < 1e-12);

        let tri = Element::points(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.2, 0.2]]).unwrap();
        let chi = ScalarProfile::from_fn(&d, |p| if (0.4..=0.6).contains(&x(&d, p)) { 1.0 } else { 0.0 }).unwrap();
        let m = measurement(&d, &op, &chi, &LFunction::constant(&d, &tri)).unwrap();
        assert!(m.hull_dist(&tri.convexify()).unwrap() < 1e-12);

        let chi5 = ScalarProfile::new(chi.values().iter().map(|v| 5.0 * v).collect()).unwrap();
        let a = measurement(&d, &op, &chi, &f).unwrap();
        let b = measurement(&d, &op, &chi5, &f).unwrap();
        assert!(a.dist(&b).unwrap() < 1e-9);

        let zero = ScalarProfile::constant(&d, 0.0);
        assert_eq!(measurement(&d, &op, &zero, &f), Err(Error::ZeroFunctional(0.0)));
    }

    #[test]
    fn ostrowski_examples() {
        let d = grid(1000);
        let m = Modulus::linear();
        let t = d.nearest_point(&[0.0]).unwrap();
        let one = ScalarProfile::constant(&d, 1.0);
        let b = ostrowski_bound(&d, &m, t, &one, &Functional::WeightedSum).unwrap();
        assert!((b - 0.5).abs() <= d.h());

        let t = d.nearest_point(&[0.5]).unwrap();
        let ball = d.ball_mask(t, 0.05).unwrap();
        let chi = ScalarProfile::new(ball.as_bools().iter().map(|&b| if b { 1.0 } else { 0.0 }).collect()).unwrap();
        let b = ostrowski_bound(&d, &m, t, &chi, &Functional::WeightedSum).unwrap();
        assert!((b - 0.025).abs() <= d.h());

        let flat = Modulus::piecewise(vec![0.0], vec![0.0]).unwrap();
        assert_eq!(ostrowski_bound(&d, &flat, t, &one, &Functional::WeightedSum).unwrap(), 0.0);
    }

    #[test]
    fn chi_averaging_examples() {
        let d = grid(500);
        let u = ScalarProfile::from_fn(&d, |p| (7.0 * x(&d, p)).sin()).unwrap();
        let chi = ScalarProfile::from_fn(&d, |p| x(&d, p) * x(&d, p)).unwrap();
        assert!(chi_averaging_defect(&d, &Functional::WeightedSum, &chi, &u).unwrap() <= 1e-12);
        let c = ScalarProfile::constant(&d, 3.0);
        assert_eq!(chi_averaging_defect(&d, &Functional::SupNorm, &chi, &c).unwrap(), 0.0);
    }

    #[test]
    fn lambda_phi_properties_hold() {
        let d = grid(20);
        let r = verify_lambda_phi(&d, &LambdaPhiOperator::integral(), InstanceId::IntervalSpace, 500, 7).unwrap();
        assert!(r.passed(), "{r:?}");
        let op = LambdaPhiOperator::norm(Functional::SupNorm, iv(1.0, 1.0)).unwrap();
        let r = verify_lambda_phi(&d, &op, InstanceId::IntervalSpace, 500, 7).unwrap();
        assert!(r.passed(), "{r:?}");
        let r = verify_lambda_phi(&d, &LambdaPhiOperator::integral(), InstanceId::PointSet2D, 100, 7).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn homogeneity_spot_value() {
        let d = grid(1000);
        let seg = Element::points(vec![[0.0, 0.0], [2.0, 2.0]]).unwrap();
        let f = LFunction::sample(&d, |p| seg.scale(x(&d, p))).unwrap();
        let v = LambdaPhiOperator::integral().apply(&d, &f).unwrap();
        let expected = Element::points(vec![[0.0, 0.0], [1.0, 1.0]]).unwrap();
        assert!(v.hull_dist(&expected).unwrap() < 1e-12);
    }
}
