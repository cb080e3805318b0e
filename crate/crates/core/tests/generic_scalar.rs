use hullsolve::generate::{mixed_sign_system, nonneg_system, rng, MatrixKind};
use hullsolve::*;

#[test]
fn f32_nonneg_matches_f64() {
    let p = nonneg_system::<f64, _>(&mut rng(11), 6, MatrixKind::PerturbedIdentity);
    let s32: LinearSystemF32 = p.system.cast();
    let o64 = solve_nonneg(&p.system, &SolveConfigF64::with_epsilon0(1e-3)).unwrap();
    let o32 = solve_nonneg(&s32, &SolveConfigF32::with_epsilon0(1e-3)).unwrap();
    assert!(o64.is_converged() && o32.is_converged());
    let x32 = o32.x.unwrap();
    assert!(s32.residual_norm(&x32) <= 1e-3 * s32.rho() * 1.01);
    for (a, b) in x32.iter().zip(o64.x.unwrap()) {
        assert!((f64::from(*a) - b).abs() < 0.05);
    }
}

#[test]
fn f32_incremental_worked_system() {
    let s = LinearSystemF32::from_rows(&[vec![2.0, -1.0], vec![1.0, 1.0]], vec![0.0, -3.0]).unwrap();
    let out = solve_incremental(&s, &IncrementalConfig::with_epsilon0(1e-4)).unwrap();
    assert!(out.is_converged(), "{:?}", out.diagnostics);
    let x = out.x.unwrap();
    assert!((x[0] + 1.0).abs() < 1e-2 && (x[1] + 2.0).abs() < 1e-2);
}

#[test]
fn f32_witness_on_singular_like_input() {
    // Columns e1, e2 and a target outside their hull.
    let inst = HullInstanceF32::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![1.0, 1.0]).unwrap();
    let out = run_hull(&inst, &HullConfigF32::with_epsilon(1e-4)).unwrap();
    let w = out.witness().expect("outside point");
    assert!(w.margins.iter().all(|&m| m < 0.0));
}

#[test]
fn incremental_mixed_sign_f64() {
    let mut r = rng(12);
    for _ in 0..10 {
        let p = mixed_sign_system::<f64, _>(&mut r, 4, MatrixKind::PerturbedIdentity);
        let out = solve_incremental(&p.system, &IncrementalConfigF64::with_epsilon0(1e-6)).unwrap();
        assert!(out.is_converged(), "{:?}", out.status);
        let x = out.x.unwrap();
        assert!(p.system.residual_norm(&x) <= 1e-6 * p.system.rho() * (1.0 + 1e-9));
    }
}
