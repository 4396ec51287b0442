use lrecover_core::extremal::{capital_psi, omega_bump, psi_chi, signed_extremal, verify_membership, witness_pair};
use lrecover_core::lintegral::{mean_value, LFunction};
use lrecover_core::recovery::Measurement;
use lrecover_core::{
    Domain, Element, Error, Functional, InstanceId, LambdaPhiOperator, Modulus, Nodes, PointId, RecoveryProblem,
    ScalarProfile,
};

fn grid(n: usize) -> Domain {
    Domain::interval(0.0, 1.0, n).unwrap()
}

fn x(d: &Domain, p: PointId) -> f64 {
    d.coords(p).unwrap()[0]
}

fn at(d: &Domain, v: f64) -> PointId {
    d.nearest_point(&[v]).unwrap()
}

fn iv(a: f64, b: f64) -> Element {
    Element::interval(a, b).unwrap()
}

#[test]
fn bumps_are_members() {
    let d = grid(400);
    let m = Modulus::power(1.0, 0.5).unwrap();
    let tri = Element::points(vec![[0.0, 0.0], [0.6, 0.0], [0.0, 0.6]]).unwrap();
    let f = omega_bump(&d, &m, at(&d, 0.3), &tri).unwrap();
    let r = verify_membership(&d, &f, &m);
    assert!(r.ok(), "{r:?}");
    assert_eq!(r.pairs_checked, 400 * 399 / 2);
    assert!(!r.subsampled);
    assert!(verify_membership(&d, &LFunction::constant(&d, &tri), &m).ok());
}

#[test]
fn steep_function_violates_with_twice_the_distance() {
    let d = grid(200);
    let f = LFunction::sample(&d, |p| iv(3.0 * x(&d, p), 3.0 * x(&d, p))).unwrap();
    let r = verify_membership(&d, &f, &Modulus::linear());
    let v = r.violation.expect("violation");
    let gap = d.dist(v.s, v.t);
    assert!((v.excess - 2.0 * gap).abs() < 1e-12);
    assert!((gap - (1.0 - d.h())).abs() < 1e-12, "widest pair first: {gap}");
}

#[test]
fn omega_bump_examples() {
    let d = grid(1000);
    let m = Modulus::linear();
    let t0 = at(&d, 0.0);
    let f = omega_bump(&d, &m, t0, &Element::Real(1.0)).unwrap();
    for p in d.points() {
        let Element::Real(v) = f.at(p) else { panic!() };
        assert!((v - x(&d, p)).abs() <= d.h());
    }
    assert_eq!(f.at(t0), &Element::Real(0.0));

    let c = at(&d, 0.5);
    let f = omega_bump(&d, &m, c, &iv(0.0, 1.0)).unwrap();
    let p = at(&d, 0.9);
    assert!(f.at(p).dist(&iv(0.0, (x(&d, p) - x(&d, c)).abs())).unwrap() < 1e-15);
    assert_eq!(f.at(c), &iv(0.0, 0.0));

    assert_eq!(omega_bump(&d, &m, c, &iv(0.0, 2.0)), Err(Error::NotUnit(2.0)));
}

#[test]
fn signed_extremal_examples() {
    let d = grid(100);
    let profile = ScalarProfile::from_fn(&d, |p| x(&d, p) - 0.5).unwrap();
    let f = signed_extremal(&d, &profile, &iv(1.0, 1.0)).unwrap();
    for p in d.points() {
        let v = x(&d, p) - 0.5;
        assert!(f.at(p).dist(&iv(v, v)).unwrap() < 1e-15);
    }
    let unit = Element::points(vec![[1.0, 0.0]]).unwrap();
    let f = signed_extremal(&d, &ScalarProfile::constant(&d, -1.0), &unit).unwrap();
    assert!(f.values().iter().all(|v| *v == Element::points(vec![[-1.0, 0.0]]).unwrap()));
    assert_eq!(signed_extremal(&d, &profile, &iv(0.0, 1.0)), Err(Error::NotInvertible));
}

#[test]
fn psi_chi_examples() {
    let d = grid(1000);
    let m = Modulus::linear();
    let t = at(&d, 0.0);
    let one = ScalarProfile::constant(&d, 1.0);
    let psi = psi_chi(&d, &m, t, &one, &Functional::WeightedSum).unwrap();
    for p in d.points() {
        assert!((psi[p] - (x(&d, p) - 0.5)).abs() <= d.h());
    }
    assert!(psi[t] <= 0.0);
    let plus = Functional::WeightedSum.apply(&d, psi.pos().values()).unwrap();
    let minus = Functional::WeightedSum.apply(&d, psi.neg().values()).unwrap();
    assert!((plus - minus).abs() <= 1e-12);
    assert!((plus - 0.125).abs() <= d.h());

    let spike = ScalarProfile::from_fn(&d, |p| if p == t { 1.0 } else { 0.0 }).unwrap();
    let psi = psi_chi(&d, &m, t, &spike, &Functional::WeightedSum).unwrap();
    assert_eq!(psi[t], 0.0);
    let p = at(&d, 0.7);
    assert!((psi[p] - d.dist(t, p)).abs() < 1e-15);
}

#[test]
fn capital_psi_single_node() {
    let d = grid(2000);
    let m = Modulus::linear();
    let nodes = Nodes::new(&d, vec![at(&d, 0.5)]).unwrap();
    let r = capital_psi(&d, &m, &nodes, 0.05).unwrap();
    assert!((r.radius - 0.5).abs() < 1e-3);
    assert!((r.ball_constant - 0.05).abs() < 1e-3);
    assert!((r.root_radius - 0.6).abs() < 1e-3);
    assert!((r.peak - 0.5).abs() < 2e-3);
    assert!(r.root_radius > r.radius - 0.05 && r.root_radius < r.radius + 0.15);
    assert!(r.averages_within_tolerance(), "{:?}", r.ball_averages);

    let ball = d.ball_mask(nodes.get(0), 0.05).unwrap();
    let f = LFunction::sample(&d, |p| Element::Real(r.profile[p])).unwrap();
    let Element::Real(avg) = mean_value(&d, &f, &ball).unwrap() else { panic!() };
    assert!(avg.abs() <= d.h());

    let psi_f = LFunction::sample(&d, |p| Element::Real(r.profile[p])).unwrap();
    assert!(verify_membership(&d, &psi_f, &m).ok());
}

#[test]
fn capital_psi_rejects_a_node_inside_the_annulus() {
    let d = grid(2000);
    let nodes = Nodes::new(&d, vec![at(&d, 0.5), at(&d, 0.8)]).unwrap();
    let err = capital_psi(&d, &Modulus::linear(), &nodes, 0.2).unwrap_err();
    match err {
        Error::EpsCondition { node, distance, radius, threshold } => {
            assert_eq!(node, 2);
            assert!((distance - 0.8).abs() < 1e-3);
            assert!((radius - 0.5).abs() < 1e-3);
            assert!((threshold - 1.3).abs() < 1e-3);
        }
        other => panic!("{other}"),
    }
}

#[test]
fn integral_witness_lower_bound() {
    let d = grid(2000);
    let m = Modulus::linear();
    let nodes = Nodes::new(&d, vec![at(&d, 0.5)]).unwrap();
    let problem = RecoveryProblem::Integral { nodes, q: d.full_mask() };
    let w = witness_pair(&d, &m, InstanceId::IntervalSpace, &problem).unwrap();
    assert!((w.lower_bound - 0.25).abs() <= d.h());
    assert!(w.collides());
    assert!(w.membership_f.ok() && w.membership_g.ok());
}

#[test]
fn value_witness_lower_bound() {
    let d = grid(2000);
    let m = Modulus::linear();
    let t = at(&d, 0.0);
    let measurements = vec![Measurement { op: LambdaPhiOperator::integral(), chi: ScalarProfile::constant(&d, 1.0) }];
    let w = witness_pair(&d, &m, InstanceId::PointSet2D, &RecoveryProblem::Value { t, measurements }).unwrap();
    assert!((w.lower_bound - 0.5).abs() <= d.h());
    assert!(w.collides());
}

#[test]
fn maxplus_has_no_witness() {
    let d = grid(50);
    let nodes = Nodes::new(&d, vec![at(&d, 0.5)]).unwrap();
    let problem = RecoveryProblem::Integral { nodes, q: d.full_mask() };
    let err = witness_pair(&d, &Modulus::linear(), InstanceId::MaxPlusRay, &problem).unwrap_err();
    assert!(err.to_string().contains("no convex invertible unit element"));
}
