use hullsolve::linalg::dist;
use hullsolve::*;
use proptest::prelude::*;

fn points(dim: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-5.0..5.0f64, dim), 1..8)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn iterate_stays_convex(pts in points(3), target in prop::collection::vec(-6.0..6.0f64, 3)) {
        let inst = HullInstance::new(pts, target).unwrap();
        let cfg = HullConfig { max_iterations: Some(2000), ..HullConfig::with_epsilon(1e-3) };
        let out = run_hull(&inst, &cfg).unwrap();
        let it = out.iterate();
        let sum: f64 = it.coeffs().iter().sum();
        prop_assert!((sum - 1.0).abs() < 1e-9);
        prop_assert!(it.coeffs().iter().all(|&c| c >= 0.0));
        let fresh = it.recompute_point(&inst);
        prop_assert!(dist(&fresh, it.point()) < 1e-9 * (1.0 + inst.radius()));
    }

    #[test]
    fn gap_never_grows(pts in points(2), target in prop::collection::vec(-6.0..6.0f64, 2)) {
        let inst = HullInstance::new(pts, target).unwrap();
        let mut it = Iterate::centroid(&inst, false);
        let mut last = it.gap();
        for _ in 0..50 {
            let Some(j) = find_pivot(&inst, &it, PivotRule::MostViolated) else { break };
            let Ok(alpha) = step_size(inst.target(), &it, inst.point(j)) else { break };
            apply_step(&inst, &mut it, j, alpha);
            prop_assert!(it.gap() <= last * (1.0 + 1e-12) + 1e-12);
            last = it.gap();
        }
    }

    #[test]
    fn witness_separates(pts in points(2), off in 6.0..20.0f64) {
        let inst = HullInstance::new(pts, vec![off, -off]).unwrap();
        let out = run_hull(&inst, &HullConfig::with_epsilon(1e-6)).unwrap();
        let w = out.witness().expect("far point is outside");
        for (i, m) in w.margins.iter().enumerate() {
            prop_assert!(*m < 0.0);
            prop_assert!(dist(w.iterate.point(), inst.point(i)) < dist(inst.target(), inst.point(i)));
        }
    }
}
