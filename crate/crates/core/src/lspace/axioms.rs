//! Randomized checker for the L-space axioms, the convexifying operator and
//! the inverse-distance identity.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{Element, InstanceId};
use crate::numeric::ELEMENT_TOL;

/// Concrete inputs reproducing a failed check.
#[derive(Debug, Clone, Serialize)]
pub struct Counterexample {
    pub x: Element,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y: Option<Element>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z: Option<Element>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w: Option<Element>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    /// Left side of the violated relation (a distance between the two sides
    /// for identities).
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AxiomCheck {
    pub name: &'static str,
    pub passed: bool,
    pub evaluated: usize,
    /// Largest `lhs - rhs` seen; negative when every sample had room to spare.
    pub worst_excess: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Counterexample>,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Isotropy {
    Isotropic,
    NonIsotropic {
        x: Element,
        y: Element,
        z: Element,
        /// `dist(x + z, y + z)`
        shifted: f64,
        /// `dist(x, y)`
        unshifted: f64,
    },
}

/// Where isotropy was sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IsotropyScope {
    AllElements,
    /// Point sets: the finite-set Hausdorff metric is only semi-isotropic
    /// (`{0,2} + {0,1} = {0,1,2} + {0,1}`), while the convex hulls obey the
    /// cancellation law. Isotropy is therefore sampled on convexified triples.
    ConvexElements,
}

#[derive(Debug, Clone, Serialize)]
pub struct AxiomReport {
    pub instance: InstanceId,
    pub trials: usize,
    pub seed: u64,
    pub checks: Vec<AxiomCheck>,
    pub isotropy: Isotropy,
    pub isotropy_scope: IsotropyScope,
}

impl AxiomReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn is_isotropic(&self) -> bool {
        matches!(self.isotropy, Isotropy::Isotropic)
    }
}

/// Random element generator: reals and max-plus values uniform on
/// `[-10, 10]` / `[0, 10]`, intervals from sorted pairs, point sets of 1-6
/// points with coordinates in `[-5, 5]`.
pub fn random_element<R: Rng>(instance: InstanceId, rng: &mut R) -> Element {
    match instance {
        InstanceId::RealLine => Element::Real(rng.gen_range(-10.0..=10.0)),
        InstanceId::IntervalSpace => {
            let a: f64 = rng.gen_range(-10.0..=10.0);
            let b: f64 = rng.gen_range(-10.0..=10.0);
            Element::Interval(a.min(b), a.max(b))
        }
        InstanceId::PointSet2D => {
            let n = rng.gen_range(1..=6);
            let pts = (0..n).map(|_| [rng.gen_range(-5.0..=5.0), rng.gen_range(-5.0..=5.0)]).collect();
            Element::points(pts).expect("finite nonempty")
        }
        InstanceId::MaxPlusRay => Element::MaxPlus(rng.gen_range(0.0..=10.0)),
    }
}

/// Random convex invertible element (singletons; zero for the max-plus ray).
pub fn random_convex_invertible<R: Rng>(instance: InstanceId, rng: &mut R) -> Element {
    match instance {
        InstanceId::RealLine => Element::Real(rng.gen_range(-10.0..=10.0)),
        InstanceId::IntervalSpace => {
            let a = rng.gen_range(-10.0..=10.0);
            Element::Interval(a, a)
        }
        InstanceId::PointSet2D => {
            Element::points(vec![[rng.gen_range(-5.0..=5.0), rng.gen_range(-5.0..=5.0)]]).expect("finite")
        }
        InstanceId::MaxPlusRay => Element::MaxPlus(0.0),
    }
}

struct Tally {
    check: AxiomCheck,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Tally {
            check: AxiomCheck {
                name,
                passed: true,
                evaluated: 0,
                worst_excess: f64::NEG_INFINITY,
                counterexample: None,
            },
        }
    }

    /// Records `lhs <= rhs + tol`; `example` builds the counterexample lazily.
    fn record(&mut self, lhs: f64, rhs: f64, tol: f64, example: impl FnOnce(f64, f64) -> Counterexample) {
        self.check.evaluated += 1;
        let excess = lhs - rhs;
        self.check.worst_excess = self.check.worst_excess.max(excess);
        // NaN counts as a failure
        if !(excess <= tol) && self.check.passed {
            self.check.passed = false;
            self.check.counterexample = Some(example(lhs, rhs));
        }
    }
}

fn ce(
    x: &Element,
    y: Option<&Element>,
    z: Option<&Element>,
    alpha: Option<f64>,
    beta: Option<f64>,
) -> impl FnOnce(f64, f64) -> Counterexample {
    let (x, y, z) = (x.clone(), y.cloned(), z.cloned());
    move |lhs, rhs| Counterexample { x, y, z, w: None, alpha, beta, lhs, rhs }
}

fn d(a: &Element, b: &Element) -> f64 {
    a.dist(b).expect("same instance")
}

fn plus(a: &Element, b: &Element) -> Element {
    a.add(b).expect("same instance")
}

/// Samples `trials` random configurations and checks every axiom. The
/// result is a pure function of `(instance, trials, seed)`.
pub fn check_axioms(instance: InstanceId, trials: usize, seed: u64) -> AxiomReport {
    let trials = trials.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tol = ELEMENT_TOL;
    let zero = instance.zero();

    let mut commutative = Tally::new("addition_commutative");
    let mut associative = Tally::new("addition_associative");
    let mut neutral = Tally::new("zero_neutral");
    let mut distributive = Tally::new("scalar_distributes_over_sum");
    let mut scalar_assoc = Tally::new("scalar_associative");
    let mut unit = Tally::new("unit_scalar");
    let mut annihilate = Tally::new("zero_scalar");
    let mut symmetric = Tally::new("metric_symmetric");
    let mut identity = Tally::new("metric_identity");
    let mut triangle = Tally::new("metric_triangle");
    let mut homogeneous = Tally::new("metric_homogeneous");
    let mut semi_iso = Tally::new("semi_isotropy");
    let mut sum_bound = Tally::new("sum_bound");
    let mut p_lipschitz = Tally::new("convexify_lipschitz");
    let mut p_idem = Tally::new("convexify_idempotent");
    let mut p_linear = Tally::new("convexify_linear");
    let mut p_convex = Tally::new("convexify_is_convex");
    let mut p_zero = Tally::new("convexify_zero");
    let mut inverse = Tally::new("inverse_distance");
    let mut inverse_convex = Tally::new("inverse_convex_invertible");

    let mut isotropy = Isotropy::Isotropic;
    let isotropy_scope =
        if instance == InstanceId::PointSet2D { IsotropyScope::ConvexElements } else { IsotropyScope::AllElements };

    let pz = zero.convexify();
    p_zero.record(d(&pz, &zero), 0.0, tol, ce(&zero, None, None, None, None));

    for _ in 0..trials {
        let x = random_element(instance, &mut rng);
        let y = random_element(instance, &mut rng);
        let z = random_element(instance, &mut rng);
        let w = random_element(instance, &mut rng);
        let alpha: f64 = rng.gen_range(-3.0..=3.0);
        let beta: f64 = rng.gen_range(-3.0..=3.0);

        commutative.record(d(&plus(&x, &y), &plus(&y, &x)), 0.0, tol, ce(&x, Some(&y), None, None, None));
        associative.record(
            d(&plus(&plus(&x, &y), &z), &plus(&x, &plus(&y, &z))),
            0.0,
            tol,
            ce(&x, Some(&y), Some(&z), None, None),
        );
        neutral.record(d(&plus(&x, &zero), &x), 0.0, tol, ce(&x, None, None, None, None));
        distributive.record(
            d(&plus(&x, &y).scale(alpha), &plus(&x.scale(alpha), &y.scale(alpha))),
            0.0,
            tol * (1.0 + alpha.abs()),
            ce(&x, Some(&y), None, Some(alpha), None),
        );
        scalar_assoc.record(
            d(&x.scale(beta).scale(alpha), &x.scale(alpha * beta)),
            0.0,
            tol * (1.0 + (alpha * beta).abs()),
            ce(&x, None, None, Some(alpha), Some(beta)),
        );
        unit.record(d(&x.scale(1.0), &x), 0.0, tol, ce(&x, None, None, None, None));
        annihilate.record(d(&x.scale(0.0), &zero), 0.0, tol, ce(&x, None, None, None, None));

        let dxy = d(&x, &y);
        symmetric.record((dxy - d(&y, &x)).abs(), 0.0, tol, ce(&x, Some(&y), None, None, None));
        identity.record(d(&x, &x), 0.0, tol, ce(&x, None, None, None, None));
        triangle.record(dxy, d(&x, &z) + d(&z, &y), tol, ce(&x, Some(&y), Some(&z), None, None));
        homogeneous.record(
            (d(&x.scale(alpha), &y.scale(alpha)) - alpha.abs() * dxy).abs(),
            0.0,
            tol * (1.0 + alpha.abs()),
            ce(&x, Some(&y), None, Some(alpha), None),
        );
        let shifted = d(&plus(&x, &z), &plus(&y, &z));
        semi_iso.record(shifted, dxy, tol, ce(&x, Some(&y), Some(&z), None, None));
        {
            let (x, y, z, w) = (x.clone(), y.clone(), z.clone(), w.clone());
            let lhs = d(&plus(&x, &z), &plus(&y, &w));
            let rhs = dxy + d(&z, &w);
            sum_bound.record(lhs, rhs, tol, move |lhs, rhs| Counterexample {
                x,
                y: Some(y),
                z: Some(z),
                w: Some(w),
                alpha: None,
                beta: None,
                lhs,
                rhs,
            });
        }

        if matches!(isotropy, Isotropy::Isotropic) {
            let (ix, iy, iz) = match isotropy_scope {
                IsotropyScope::AllElements => (x.clone(), y.clone(), z.clone()),
                IsotropyScope::ConvexElements => (x.convexify(), y.convexify(), z.convexify()),
            };
            let metric = |a: &Element, b: &Element| match isotropy_scope {
                IsotropyScope::AllElements => d(a, b),
                IsotropyScope::ConvexElements => a.hull_dist(b).expect("same instance"),
            };
            let unshifted = metric(&ix, &iy);
            let shifted = metric(&plus(&ix, &iz), &plus(&iy, &iz));
            if unshifted - shifted > tol {
                isotropy = Isotropy::NonIsotropic { x: ix, y: iy, z: iz, shifted, unshifted };
            }
        }

        let (px, py) = (x.convexify(), y.convexify());
        p_lipschitz.record(px.hull_dist(&py).expect("same instance"), dxy, tol, ce(&x, Some(&y), None, None, None));
        p_idem.record(d(&px.convexify(), &px), 0.0, tol, ce(&x, None, None, None, None));
        let lhs = plus(&x.scale(alpha), &y.scale(beta)).convexify();
        let rhs = plus(&px.scale(alpha), &py.scale(beta));
        p_linear.record(
            lhs.hull_dist(&rhs).expect("same instance"),
            0.0,
            tol * (1.0 + alpha.abs() + beta.abs()),
            ce(&x, Some(&y), None, Some(alpha), Some(beta)),
        );
        p_convex.record(if px.is_convex() { 0.0 } else { 1.0 }, 0.0, 0.0, ce(&x, None, None, None, None));

        let v = random_convex_invertible(instance, &mut rng);
        match v.try_invert() {
            Some(vi) => {
                inverse.record((d(&v, &vi) - 2.0 * d(&v, &zero)).abs(), 0.0, tol, ce(&v, Some(&vi), None, None, None));
                let ok = vi.is_convex() && vi.try_invert().is_some() && d(&plus(&v, &vi), &zero) <= tol;
                inverse_convex.record(if ok { 0.0 } else { 1.0 }, 0.0, 0.0, ce(&v, Some(&vi), None, None, None));
            }
            None => inverse_convex.record(1.0, 0.0, 0.0, ce(&v, None, None, None, None)),
        }
    }

    let checks = [
        commutative,
        associative,
        neutral,
        distributive,
        scalar_assoc,
        unit,
        annihilate,
        symmetric,
        identity,
        triangle,
        homogeneous,
        semi_iso,
        sum_bound,
        p_lipschitz,
        p_idem,
        p_linear,
        p_convex,
        p_zero,
        inverse,
        inverse_convex,
    ]
    .into_iter()
    .map(|t| t.check)
    .collect();

    AxiomReport { instance, trials, seed, checks, isotropy, isotropy_scope }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_line_is_isotropic() {
        let report = check_axioms(InstanceId::RealLine, 1000, 7);
        assert!(report.all_passed(), "{report:#?}");
        assert!(report.is_isotropic());
    }

    #[test]
    fn max_plus_has_a_non_isotropy_witness() {
        let report = check_axioms(InstanceId::MaxPlusRay, 1000, 7);
        assert!(report.all_passed(), "{report:#?}");
        match report.isotropy {
            Isotropy::NonIsotropic { shifted, unshifted, .. } => assert!(shifted < unshifted),
            Isotropy::Isotropic => panic!("max-plus ray must not be isotropic"),
        }
    }

    #[test]
    fn max_plus_absorbing_triple() {
        let (x, y, z) = (Element::MaxPlus(1.0), Element::MaxPlus(2.0), Element::MaxPlus(5.0));
        assert_eq!(d(&plus(&x, &z), &plus(&y, &z)), 0.0);
        assert_eq!(d(&x, &y), 1.0);
    }

    #[test]
    fn interval_singletons_satisfy_inverse_distance() {
        let report = check_axioms(InstanceId::IntervalSpace, 1000, 7);
        assert!(report.all_passed(), "{report:#?}");
        assert_eq!(report.check("inverse_distance").unwrap().evaluated, 1000);
        assert!(report.is_isotropic());
    }

    #[test]
    fn finite_point_sets_are_only_semi_isotropic() {
        let a = Element::points(vec![[0.0, 0.0], [2.0, 0.0]]).unwrap();
        let b = Element::points(vec![[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]).unwrap();
        let c = Element::points(vec![[0.0, 0.0], [1.0, 0.0]]).unwrap();
        assert_eq!(d(&plus(&a, &c), &plus(&b, &c)), 0.0);
        assert_eq!(d(&a, &b), 1.0);
        // the hulls coincide, so the convex metric sees no violation
        assert_eq!(a.hull_dist(&b).unwrap(), 0.0);
    }

    #[test]
    fn report_is_deterministic() {
        let a = serde_json::to_string(&check_axioms(InstanceId::PointSet2D, 50, 3)).unwrap();
        let b = serde_json::to_string(&check_axioms(InstanceId::PointSet2D, 50, 3)).unwrap();
        assert_eq!(a, b);
    }
}
