//! Seeded random instances for tests and benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{norm, DenseMatrix};
use crate::scalar::Scalar;
use crate::system::LinearSystem;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MatrixKind {
    /// Standard normal entries, columns scaled to unit norm.
    #[default]
    GaussianUnitColumns,
    /// Entries uniform on `[0, 1)`.
    UniformPositive,
    /// Identity plus uniform `[-0.5, 0.5)/√n` noise: well conditioned.
    PerturbedIdentity,
}

pub fn random_matrix<T: Scalar, R: Rng>(rng: &mut R, n: usize, kind: MatrixKind) -> DenseMatrix<T> {
    let mut cols: Vec<Vec<f64>> = match kind {
        MatrixKind::GaussianUnitColumns => {
            (0..n).map(|_| (0..n).map(|_| StandardNormal.sample(rng)).collect()).collect()
        }
        MatrixKind::UniformPositive => (0..n).map(|_| (0..n).map(|_| rng.gen::<f64>()).collect()).collect(),
        MatrixKind::PerturbedIdentity => {
            let s = 1.0 / (n as f64).sqrt();
            (0..n)
                .map(|j| (0..n).map(|i| (rng.gen::<f64>() - 0.5) * s + if i == j { 1.0 } else { 0.0 }).collect())
                .collect()
        }
    };
    if kind == MatrixKind::GaussianUnitColumns {
        for c in &mut cols {
            let nc = norm(c);
            c.iter_mut().for_each(|v| *v /= nc);
        }
    }
    let cols: Vec<Vec<T>> = cols.into_iter().map(|c| c.into_iter().map(T::lit).collect()).collect();
    DenseMatrix::from_columns(&cols).expect("square by construction")
}

/// A system together with the solution it was built from.
#[derive(Debug, Clone)]
pub struct Planted<T> {
    pub system: LinearSystem<T>,
    pub x_star: Vec<T>,
}

fn plant<T: Scalar>(a: DenseMatrix<T>, x: Vec<f64>) -> Planted<T> {
    let x_star: Vec<T> = x.into_iter().map(T::lit).collect();
    let b = a.mul_vec(&x_star);
    Planted { system: LinearSystem::new(a, b).expect("finite planted system"), x_star }
}

/// `b = Ax*` with `x* ≥ 0` and `Σx* = 1`, which puts weight `½` on `-b`
/// in the convex combination that reaches the origin.
pub fn nonneg_system<T: Scalar, R: Rng>(rng: &mut R, n: usize, kind: MatrixKind) -> Planted<T> {
    let a = random_matrix(rng, n, kind);
    let raw: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() + 0.05).collect();
    let s: f64 = raw.iter().sum();
    plant(a, raw.into_iter().map(|v| v / s).collect())
}

/// `b = Ax*` with `x*` uniform on `[-1, 1)`, so `t_*` is usually positive.
pub fn mixed_sign_system<T: Scalar, R: Rng>(rng: &mut R, n: usize, kind: MatrixKind) -> Planted<T> {
    let a = random_matrix(rng, n, kind);
    let x = (0..n).map(|_| 2.0 * rng.gen::<f64>() - 1.0).collect();
    plant(a, x)
}

/// Points with standard normal coordinates.
pub fn gaussian_points<T: Scalar, R: Rng>(rng: &mut R, count: usize, dim: usize) -> Vec<Vec<T>> {
    (0..count).map(|_| (0..dim).map(|_| T::lit(StandardNormal.sample(rng))).collect()).collect()
}

/// A point uniform in the axis-aligned box `[lo, hi)ᵈ`.
pub fn uniform_point<T: Scalar, R: Rng>(rng: &mut R, dim: usize, lo: f64, hi: f64) -> Vec<T> {
    (0..dim).map(|_| T::lit(lo + (hi - lo) * rng.gen::<f64>())).collect()
}
