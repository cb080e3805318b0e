//! A-priori quantities derived from `Q = AᵀA`: a lower bound on the distance
//! `Δ₀` from the origin to the column hull, and upper bounds `τ′_* ≤ τ_*` on
//! the shift `t_*` that makes the solution non-negative.
//!
//! All products of `n` norms are accumulated as logarithms; linear values are
//! only materialized when they fit in the scalar type.

use crate::error::{Error, Result};
use crate::linalg::{dot, norm, DenseMatrix, Lu};
use crate::scalar::Scalar;
use crate::system::LinearSystem;

/// `λ_min < NEAR_SINGULAR_RATIO · λ_max` is treated as singular.
pub const NEAR_SINGULAR_RATIO: f64 = 1e-14;
/// Relative change of the Rayleigh quotient that stops power iteration.
pub const EIGEN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenEstimate<T> {
    pub value: T,
    pub iterations: usize,
    pub converged: bool,
}

fn eigen_iteration_cap(n: usize) -> usize {
    (10 * n).max(200)
}

fn normalize<T: Scalar>(v: &mut [T]) -> T {
    let nv = norm(v);
    if nv > T::zero() {
        v.iter_mut().for_each(|x| *x /= nv);
    }
    nv
}

fn rayleigh<T: Scalar>(q: &DenseMatrix<T>, x: &[T]) -> T {
    dot(x, &q.mul_vec(x))
}

/// Smallest eigenvalue of a symmetric positive (semi)definite matrix by inverse
/// power iteration seeded with the all-ones vector.
pub fn smallest_eigenvalue<T: Scalar>(q: &DenseMatrix<T>) -> Result<EigenEstimate<T>> {
    let n = q.rows();
    let lu = Lu::factor(q, T::zero()).map_err(|_| Error::NearSingular { ratio: 0.0 })?;
    let mut x = vec![T::one(); n];
    normalize(&mut x);
    let mut prev = rayleigh(q, &x);
    let tol = T::lit(EIGEN_TOL);
    for k in 1..=eigen_iteration_cap(n) {
        let mut y = lu.solve(&x);
        if normalize(&mut y) == T::zero() || y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NearSingular { ratio: 0.0 });
        }
        x = y;
        let rq = rayleigh(q, &x);
        if (rq - prev).abs() <= tol * rq.abs() {
            return Ok(EigenEstimate { value: rq, iterations: k, converged: true });
        }
        prev = rq;
    }
    Ok(EigenEstimate { value: prev, iterations: eigen_iteration_cap(n), converged: false })
}

/// Largest eigenvalue of a symmetric positive semidefinite matrix by power iteration.
pub fn largest_eigenvalue<T: Scalar>(q: &DenseMatrix<T>) -> EigenEstimate<T> {
    let n = q.rows();
    let mut x = vec![T::one(); n];
    normalize(&mut x);
    let mut prev = rayleigh(q, &x);
    let tol = T::lit(EIGEN_TOL);
    for k in 1..=eigen_iteration_cap(n) {
        let mut y = q.mul_vec(&x);
        if normalize(&mut y) == T::zero() {
            // Seed orthogonal to the range; restart from a coordinate vector.
            y = vec![T::zero(); n];
            y[k % n] = T::one();
        }
        x = y;
        let rq = rayleigh(q, &x);
        if (rq - prev).abs() <= tol * rq.abs() {
            return EigenEstimate { value: rq, iterations: k, converged: true };
        }
        prev = rq;
    }
    EigenEstimate { value: prev, iterations: eigen_iteration_cap(n), converged: false }
}

/// The two candidate lower bounds on `Δ₀`.
///
/// `stated = λ_min/√n` is only valid while `λ_min ≤ 1`; the Rayleigh form
/// `√(λ_min/n)` follows from `xᵀQx ≥ λ_min‖x‖²` and `‖x‖² ≥ 1/n` on the simplex.
/// `bound` is the smaller of the two and is what callers should rely on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Delta0Bounds<T> {
    pub lambda_min: T,
    pub stated: T,
    pub rayleigh: T,
    pub bound: T,
}

impl<T: Scalar> Delta0Bounds<T> {
    /// True when the stated form exceeds the provable one.
    pub fn stated_exceeds_rayleigh(&self) -> bool {
        self.stated > self.rayleigh
    }
}

fn check_conditioning<T: Scalar>(q: &DenseMatrix<T>) -> Result<(EigenEstimate<T>, T)> {
    let lmax = largest_eigenvalue(q).value;
    let lmin = smallest_eigenvalue(q)?;
    if !(lmin.value >= T::lit(NEAR_SINGULAR_RATIO) * lmax) {
        return Err(Error::NearSingular { ratio: (lmin.value / lmax).to_f64_lossy() });
    }
    Ok((lmin, lmax))
}

pub fn delta0_lower_bounds<T: Scalar>(system: &LinearSystem<T>) -> Result<Delta0Bounds<T>> {
    let q = system.matrix().gram();
    let (lmin, _) = check_conditioning(&q)?;
    Ok(delta0_from_lambda(lmin.value, system.dim()))
}

fn delta0_from_lambda<T: Scalar>(lambda_min: T, n: usize) -> Delta0Bounds<T> {
    let sqrt_n = T::from_count(n).sqrt();
    let stated = lambda_min / sqrt_n;
    let rayleigh = lambda_min.sqrt() / sqrt_n;
    Delta0Bounds { lambda_min, stated, rayleigh, bound: stated.min(rayleigh) }
}

/// Lower bound on the distance from the origin to `conv{a₁,…,aₙ}`.
pub fn delta0_lower_bound<T: Scalar>(system: &LinearSystem<T>) -> Result<T> {
    delta0_lower_bounds(system).map(|b| b.bound)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TauBounds<T> {
    pub log_tau_star: T,
    pub log_tau_star_prime: T,
    /// `None` when the linear value would overflow.
    pub tau_star: Option<T>,
    pub tau_star_prime: Option<T>,
}

fn materialize<T: Scalar>(log_value: T) -> Option<T> {
    (log_value < T::log_overflow_guard()).then(|| log_value.exp())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemAnalysis<T> {
    pub n: usize,
    pub lambda_min: T,
    pub lambda_max: T,
    pub lambda_min_converged: bool,
    pub log_det_q: T,
    pub q_norms: Vec<T>,
    pub q_min: T,
    pub w_norm: T,
    pub delta0: Delta0Bounds<T>,
    pub tau: TauBounds<T>,
    pub notes: Vec<String>,
}

impl<T: Scalar> SystemAnalysis<T> {
    /// `λ_min/λ_max`
    pub fn eigen_ratio(&self) -> T {
        self.lambda_min / self.lambda_max
    }
}

fn analyze_inner<T: Scalar>(system: &LinearSystem<T>) -> Result<SystemAnalysis<T>> {
    let n = system.dim();
    let q = system.matrix().gram();
    let (lmin, lmax) = check_conditioning(&q)?;
    let lu = Lu::factor(&q, T::zero()).map_err(|_| Error::NearSingular { ratio: 0.0 })?;
    let log_det_q = lu.log_abs_det();
    let q_norms: Vec<T> = q.columns().map(norm).collect();
    let q_min = q_norms.iter().copied().fold(T::infinity(), T::min);
    let w_norm = norm(&system.matrix().tr_mul_vec(system.rhs()));

    let log_common: T = q_norms.iter().map(|c| c.ln()).sum::<T>() + w_norm.ln() - q_min.ln();
    let log_tau_star_prime = log_common - log_det_q;
    let log_tau_star = log_common - T::from_count(n) * lmin.value.ln();

    let delta0 = delta0_from_lambda(lmin.value, n);
    let mut notes = Vec::new();
    if delta0.stated_exceeds_rayleigh() {
        notes.push(format!(
            "lambda_min = {} > 1: stated bound {} exceeds Rayleigh bound {}; using the smaller",
            lmin.value, delta0.stated, delta0.rayleigh
        ));
    }
    if !lmin.converged {
        notes.push(format!("inverse power iteration stopped after {} iterations", lmin.iterations));
    }
    let slack = T::lit(1e-6) * log_det_q.abs().max(T::one());
    if log_det_q + slack < T::from_count(n) * lmin.value.ln() {
        notes.push("det(Q) < lambda_min^n beyond tolerance; eigenvalue estimate is inaccurate".into());
    }

    Ok(SystemAnalysis {
        n,
        lambda_min: lmin.value,
        lambda_max: lmax,
        lambda_min_converged: lmin.converged,
        log_det_q,
        q_norms,
        q_min,
        w_norm,
        delta0,
        tau: TauBounds {
            log_tau_star,
            log_tau_star_prime,
            tau_star: materialize(log_tau_star),
            tau_star_prime: materialize(log_tau_star_prime),
        },
        notes,
    })
}

/// Full report: eigenvalue extremes, `det Q`, both `Δ₀` bounds and both shift bounds.
pub fn analyze<T: Scalar>(system: &LinearSystem<T>) -> Result<SystemAnalysis<T>> {
    analyze_inner(system)
}

/// `(log τ′_*, log τ_*)` with their linear values when representable.
///
/// `τ′_* = (Πⱼ‖qⱼ‖)‖w‖ / (q_min det Q)` and `τ_*` replaces `det Q` with `λ_minⁿ`;
/// every component of `A⁻¹b` is at least `-τ′_*`.
pub fn tau_star_bounds<T: Scalar>(system: &LinearSystem<T>) -> Result<TauBounds<T>> {
    analyze_inner(system).map(|a| a.tau)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sys(rows: &[Vec<f64>], b: Vec<f64>) -> LinearSystem<f64> {
        LinearSystem::from_rows(rows, b).unwrap()
    }

    #[test]
    fn identity_bounds() {
        let s = sys(&[vec![1.0, 0.0], vec![0.0, 1.0]], vec![1.0, 1.0]);
        assert!((delta0_lower_bound(&s).unwrap() - 0.5f64.sqrt()).abs() < 1e-12);
        let t = tau_star_bounds(&s).unwrap();
        assert!((t.tau_star.unwrap() - 2f64.sqrt()).abs() < 1e-9);
        assert!((t.tau_star_prime.unwrap() - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn diagonal_bound_below_true_distance() {
        let s = sys(&[vec![1.0, 0.0], vec![0.0, 3.0]], vec![1.0, 1.0]);
        let b = delta0_lower_bounds(&s).unwrap();
        assert!((b.lambda_min - 1.0).abs() < 1e-9);
        assert!((b.bound - 0.5f64.sqrt()).abs() < 1e-9);
        assert!(b.bound <= 3.0 / 10f64.sqrt());
    }

    #[test]
    fn stated_bound_overshoots_when_lambda_exceeds_one() {
        // A = 2I: Δ₀ = √2 but λ_min/√n = 4/√2.
        let s = sys(&[vec![2.0, 0.0], vec![0.0, 2.0]], vec![1.0, 1.0]);
        let a = analyze(&s).unwrap();
        assert!(a.delta0.stated > 2f64.sqrt());
        assert!(a.delta0.bound <= 2f64.sqrt() + 1e-12);
        assert!(a.delta0.stated_exceeds_rayleigh());
        assert!(!a.notes.is_empty());
    }

    #[test]
    fn second_example_shift_bound_covers_solution() {
        let s = sys(&[vec![2.0, -1.0], vec![1.0, 1.0]], vec![0.0, -3.0]);
        let t = tau_star_bounds(&s).unwrap();
        // x* = (-1, -2)
        assert!(-t.tau_star_prime.unwrap() <= -2.0);
        assert!(t.log_tau_star >= t.log_tau_star_prime - 1e-12);
    }

    #[test]
    fn zero_rhs_gives_zero_shift_bound() {
        let s = sys(&[vec![1.0, 2.0], vec![0.0, 1.0]], vec![0.0, 0.0]);
        let t = tau_star_bounds(&s).unwrap();
        assert_eq!(t.tau_star_prime, Some(0.0));
    }

    #[test]
    fn singular_flagged() {
        let s = sys(&[vec![1.0, 2.0], vec![2.0, 4.0]], vec![1.0, 1.0]);
        assert!(matches!(delta0_lower_bound(&s), Err(Error::NearSingular { .. })));
    }

    #[test]
    fn large_products_stay_in_log_space() {
        let n = 120;
        let mut rows = vec![vec![0.0; n]; n];
        for (i, r) in rows.iter_mut().enumerate() {
            r[i] = 1e4;
            if i + 1 < n {
                r[i + 1] = 1.0;
            }
        }
        let s = sys(&rows, vec![1.0; n]);
        let t = tau_star_bounds(&s).unwrap();
        assert!(t.log_tau_star.is_finite());
        assert!(t.log_tau_star_prime.is_finite());
        if let Some(v) = t.tau_star_prime {
            assert!(((v.ln() - t.log_tau_star_prime) / t.log_tau_star_prime.abs().max(1.0)).abs() < 1e-9);
        }
    }

    #[test]
    fn eigen_extremes_of_diagonal() {
        let q =
            DenseMatrix::<f64>::from_rows(&[vec![4.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 9.0]]).unwrap();
        assert!((smallest_eigenvalue(&q).unwrap().value - 1.0).abs() < 1e-8);
        assert!((largest_eigenvalue(&q).value - 9.0).abs() < 1e-8);
    }
}
