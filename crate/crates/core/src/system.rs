use crate::error::{Error, Result};
use crate::linalg::{axpy, norm, DenseMatrix};
use crate::scalar::Scalar;

/// A square system `Ax = b` together with the quantities every solver needs:
/// column norms, `ρ = max{‖a₁‖,…,‖aₙ‖,‖b‖}` and the shift direction `u = Ae`.
#[derive(Debug, Clone)]
pub struct LinearSystem<T> {
    matrix: DenseMatrix<T>,
    rhs: Vec<T>,
    col_norms: Vec<T>,
    rhs_norm: T,
    rho: T,
    shift_dir: Vec<T>,
}

impl<T: Scalar> LinearSystem<T> {
    pub fn new(matrix: DenseMatrix<T>, rhs: Vec<T>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidInput(format!("matrix must be square, got {}x{}", matrix.rows(), matrix.cols())));
        }
        let n = matrix.rows();
        if n == 0 {
            return Err(Error::InvalidInput("empty matrix".into()));
        }
        if rhs.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: rhs.len() });
        }
        if matrix.col_major().iter().chain(&rhs).any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("non-finite entry".into()));
        }
        let col_norms: Vec<T> = matrix.columns().map(norm).collect();
        if let Some(j) = col_norms.iter().position(|&c| !(c > T::zero())) {
            return Err(Error::InvalidInput(format!("column {j} is zero; matrix is singular")));
        }
        let rhs_norm = norm(&rhs);
        let rho = col_norms.iter().fold(rhs_norm, |m, &c| m.max(c));
        let shift_dir = matrix.mul_vec(&vec![T::one(); n]);
        Ok(Self { matrix, rhs, col_norms, rhs_norm, rho, shift_dir })
    }

    pub fn from_rows(rows: &[Vec<T>], rhs: Vec<T>) -> Result<Self> {
        Self::new(DenseMatrix::from_rows(rows)?, rhs)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.rhs.len()
    }

    pub fn matrix(&self) -> &DenseMatrix<T> {
        &self.matrix
    }

    #[inline]
    pub fn column(&self, j: usize) -> &[T] {
        self.matrix.column(j)
    }

    pub fn rhs(&self) -> &[T] {
        &self.rhs
    }

    pub fn col_norms(&self) -> &[T] {
        &self.col_norms
    }

    pub fn rhs_norm(&self) -> T {
        self.rhs_norm
    }

    pub fn rho(&self) -> T {
        self.rho
    }

    /// `u = Ae`
    pub fn shift_dir(&self) -> &[T] {
        &self.shift_dir
    }

    /// `b(t) = b + t·u`
    pub fn rhs_at(&self, t: T) -> Vec<T> {
        let mut v = self.rhs.clone();
        axpy(t, &self.shift_dir, &mut v);
        v
    }

    /// `ρ(t) = max{‖a₁‖,…,‖aₙ‖,‖b(t)‖}`
    pub fn rho_at(&self, t: T) -> T {
        if t == T::zero() {
            return self.rho;
        }
        let bt = norm(&self.rhs_at(t));
        self.col_norms.iter().fold(bt, |m, &c| m.max(c))
    }

    /// `Ax - b`
    pub fn residual(&self, x: &[T]) -> Vec<T> {
        let mut r = self.matrix.mul_vec(x);
        for (ri, &bi) in r.iter_mut().zip(&self.rhs) {
            *ri -= bi;
        }
        r
    }

    pub fn residual_norm(&self, x: &[T]) -> T {
        norm(&self.residual(x))
    }

    /// Columns followed by `-b(t)`: the point set of the shifted hull problem.
    pub fn hull_points(&self, t: T) -> Vec<Vec<T>> {
        let mut pts: Vec<Vec<T>> = self.matrix.columns().map(<[T]>::to_vec).collect();
        pts.push(self.rhs_at(t).into_iter().map(|v| -v).collect());
        pts
    }

    pub fn cast<U: Scalar>(&self) -> LinearSystem<U> {
        LinearSystem::new(self.matrix.cast(), self.rhs.iter().map(|&v| U::lit(v.to_f64_lossy())).collect())
            .expect("cast of a valid system stays valid")
    }
}
