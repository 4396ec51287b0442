use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lrecover_core::extremal::random_holder_function;
use lrecover_core::lintegral::{integrate, LFunction};
use lrecover_core::lspace::{random_element, support_gap};
use lrecover_core::operators::{measurement, ostrowski_bound, value_dist};
use lrecover_core::recovery::{recover_integral, recover_uniform, recover_value, Measurement, Sharpness};
use lrecover_core::{Domain, Element, InstanceId, LambdaPhiOperator, Mask, Modulus, Nodes, PointId, ScalarProfile};

fn grid(n: usize) -> Domain {
    Domain::interval(0.0, 1.0, n).unwrap()
}

fn random_function(d: &Domain, instance: InstanceId, rng: &mut ChaCha8Rng) -> LFunction {
    LFunction::sample(d, |_| random_element(instance, rng)).unwrap()
}

fn random_mask(d: &Domain, rng: &mut ChaCha8Rng) -> Mask {
    Mask::from_bools((0..d.len()).map(|_| rng.gen_bool(0.5)).collect())
}

fn close(a: &Element, b: &Element) -> f64 {
    match (a, b) {
        (Element::Points(_), _) => support_gap(a, b, 64),
        _ => a.dist(b).unwrap(),
    }
}

/// Concave piecewise-linear modulus with decreasing slopes.
fn random_modulus(rng: &mut ChaCha8Rng) -> Modulus {
    if rng.gen_bool(0.3) {
        return Modulus::power(rng.gen_range(0.2..2.0), rng.gen_range(0.3..=1.0)).unwrap();
    }
    let k = rng.gen_range(1..5);
    let mut slope = rng.gen_range(0.5..3.0);
    let (mut t, mut v) = (vec![0.0], vec![0.0]);
    for _ in 0..k {
        let dt = rng.gen_range(0.05..0.4);
        t.push(t.last().unwrap() + dt);
        v.push(v.last().unwrap() + slope * dt);
        slope *= rng.gen_range(0.2..1.0);
    }
    Modulus::piecewise(t, v).unwrap()
}

const INSTANCES: [InstanceId; 3] = [InstanceId::RealLine, InstanceId::IntervalSpace, InstanceId::PointSet2D];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn integral_metric_bound(seed in any::<u64>(), which in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = grid(40);
        let (f, g) = (random_function(&d, INSTANCES[which], &mut rng), random_function(&d, INSTANCES[which], &mut rng));
        let mask = random_mask(&d, &mut rng);
        let lhs = value_dist(&integrate(&d, &f, &mask).unwrap(), &integrate(&d, &g, &mask).unwrap()).unwrap();
        let rhs: f64 = mask.indices().map(|i| d.weights()[i] * f.values()[i].dist(&g.values()[i]).unwrap()).sum();
        prop_assert!(lhs <= rhs + 1e-9, "{} > {}", lhs, rhs);
    }

    #[test]
    fn integral_is_convex_and_additive(seed in any::<u64>(), which in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = grid(40);
        let f = random_function(&d, INSTANCES[which], &mut rng);
        let m1 = random_mask(&d, &mut rng);
        let m2 = m1.complement().intersection(&random_mask(&d, &mut rng));
        let whole = integrate(&d, &f, &m1.union(&m2)).unwrap();
        prop_assert!(close(&whole.convexify(), &whole) <= 1e-9);
        let parts = integrate(&d, &f, &m1).unwrap().add(&integrate(&d, &f, &m2).unwrap()).unwrap();
        prop_assert!(close(&whole, &parts) <= 1e-9);
    }

    #[test]
    fn integral_is_linear(seed in any::<u64>(), which in 0usize..3, alpha in -3.0f64..3.0, beta in -3.0f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = grid(40);
        let (f, g) = (random_function(&d, INSTANCES[which], &mut rng), random_function(&d, INSTANCES[which], &mut rng));
        let full = d.full_mask();
        let lhs = integrate(&d, &f.combine(alpha, &g, beta).unwrap(), &full).unwrap();
        let rhs = integrate(&d, &f, &full).unwrap().scale(alpha).add(&integrate(&d, &g, &full).unwrap().scale(beta)).unwrap();
        prop_assert!(close(&lhs, &rhs) <= 1e-9);
    }

    #[test]
    fn measurement_ignores_the_scale_of_chi(seed in any::<u64>(), scale in 0.01f64..100.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = grid(40);
        let f = random_function(&d, InstanceId::IntervalSpace, &mut rng);
        let chi = ScalarProfile::new((0..d.len()).map(|_| rng.gen_range(0.0..1.0)).collect()).unwrap();
        let scaled = ScalarProfile::new(chi.values().iter().map(|v| v * scale).collect()).unwrap();
        let op = LambdaPhiOperator::integral();
        let a = measurement(&d, &op, &chi, &f).unwrap();
        let b = measurement(&d, &op, &scaled, &f).unwrap();
        prop_assert!(a.dist(&b).unwrap() <= 1e-9);
    }
}

#[test]
fn ostrowski_bound_holds_for_random_members() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let d = grid(200);
    for case in 0..100 {
        let m = random_modulus(&mut rng);
        let instance = INSTANCES[case % 3];
        let f = random_holder_function(&d, &m, instance, 4, &mut rng).unwrap();
        let t = PointId(rng.gen_range(0..d.len()));
        let (a, b) = (rng.gen_range(0..d.len()), rng.gen_range(0..d.len()));
        let chi = ScalarProfile::from_fn(&d, |p| {
            if (a.min(b)..=a.max(b)).contains(&p.0) {
                rng.gen_range(0.1..1.0)
            } else {
                0.0
            }
        })
        .unwrap();
        let op = LambdaPhiOperator::integral();
        let bound = ostrowski_bound(&d, &m, t, &chi, &op.functional()).unwrap();
        let dev = value_dist(&op.lambda(f.at(t)), &measurement(&d, &op, &chi, &f).unwrap()).unwrap();
        assert!(dev <= bound + 1e-9, "case {case}: {dev} > {bound}");
    }
}

#[test]
fn random_recovery_configurations_respect_their_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let d = grid(300);
    for case in 0..50 {
        let m = random_modulus(&mut rng);
        let instance = INSTANCES[case % 3];
        let f = random_holder_function(&d, &m, instance, 4, &mut rng).unwrap();
        let count = rng.gen_range(1..=4);
        let mut picks: Vec<usize> = (0..d.len()).collect();
        let picked: Vec<PointId> =
            (0..count).map(|_| PointId(picks.swap_remove(rng.gen_range(0..picks.len())))).collect();
        let nodes = Nodes::new(&d, picked.clone()).unwrap();
        let q = d.mask_where(|p| p.0 >= 30);

        let r = recover_integral(&d, &m, instance, &nodes, &q, Some(&f)).unwrap();
        let check = r.diagnostics.a_posteriori.as_ref().unwrap();
        assert!(check.passed, "integral case {case}: {check:?}");
        assert!(r.gap.is_none_or(|g| g >= -1e-9), "case {case}: gap {:?}", r.gap);

        let mut reversed = picked.clone();
        reversed.reverse();
        let r2 = recover_integral(&d, &m, instance, &Nodes::new(&d, reversed).unwrap(), &q, None).unwrap();
        assert_eq!(r.upper_bound.to_bits(), r2.upper_bound.to_bits());

        let t = PointId(rng.gen_range(0..d.len()));
        let measurements: Vec<Measurement> = (0..count)
            .map(|_| {
                let a = rng.gen_range(0..d.len() - 20);
                let w = rng.gen_range(1..20);
                let chi = ScalarProfile::from_fn(&d, |p| if (a..a + w).contains(&p.0) { 1.0 } else { 0.0 }).unwrap();
                Measurement { op: LambdaPhiOperator::integral(), chi }
            })
            .collect();
        let r = recover_value(&d, &m, instance, t, &measurements, Some(&f)).unwrap();
        assert!(r.diagnostics.a_posteriori.as_ref().unwrap().passed, "value case {case}");
        if r.sharpness == Sharpness::Verified {
            assert!(r.gap.unwrap() >= -1e-9);
        }

        let r = recover_uniform(&d, &m, instance, &nodes, 0.01, Some(&f)).unwrap();
        let check = r.diagnostics.a_posteriori.as_ref().unwrap();
        assert!(check.passed, "uniform case {case}: {check:?}");
        if let Some(gap) = r.gap {
            assert!(gap >= -2.0 * m.grid_slack(d.h()) - 1e-9, "uniform case {case}: gap {gap}");
        }
    }
}
