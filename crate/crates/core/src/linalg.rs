//! Small dense linear algebra: vector kernels, a column-major matrix and an
//! LU factorization with partial pivoting.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[inline]
pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

#[inline]
pub fn norm_sq<T: Scalar>(a: &[T]) -> T {
    dot(a, a)
}

#[inline]
pub fn norm<T: Scalar>(a: &[T]) -> T {
    norm_sq(a).sqrt()
}

/// `‖a - b‖²`
#[inline]
pub fn dist_sq<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| {
        let d = x - y;
        acc + d * d
    })
}

#[inline]
pub fn dist<T: Scalar>(a: &[T], b: &[T]) -> T {
    dist_sq(a, b).sqrt()
}

/// `y += alpha * x`
#[inline]
pub fn axpy<T: Scalar>(alpha: T, x: &[T], y: &mut [T]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn sub<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x - y).collect()
}

pub fn scale<T: Scalar>(alpha: T, a: &[T]) -> Vec<T> {
    a.iter().map(|&x| alpha * x).collect()
}

/// Dense matrix stored column by column.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> DenseMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, T::one());
        }
        m
    }

    /// Builds a matrix from row-major nested rows.
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(nrows, ncols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != ncols {
                return Err(Error::DimensionMismatch { expected: ncols, found: row.len() });
            }
            for (j, &v) in row.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        Ok(m)
    }

    pub fn from_columns(columns: &[Vec<T>]) -> Result<Self> {
        let ncols = columns.len();
        let nrows = columns.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(nrows * ncols);
        for c in columns {
            if c.len() != nrows {
                return Err(Error::DimensionMismatch { expected: nrows, found: c.len() });
            }
            data.extend_from_slice(c);
        }
        Ok(Self { rows: nrows, cols: ncols, data })
    }

    /// Column-major raw storage.
    pub fn from_col_major(rows: usize, cols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, found: data.len() });
        }
        Ok(Self { rows, cols, data })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[j * self.rows + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[j * self.rows + i] = v;
    }

    #[inline]
    pub fn column(&self, j: usize) -> &[T] {
        &self.data[j * self.rows..(j + 1) * self.rows]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[T]> {
        self.data.chunks_exact(self.rows.max(1)).take(self.cols)
    }

    pub fn row(&self, i: usize) -> Vec<T> {
        (0..self.cols).map(|j| self.get(i, j)).collect()
    }

    pub fn col_major(&self) -> &[T] {
        &self.data
    }

    /// `A x`
    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.cols);
        let mut y = vec![T::zero(); self.rows];
        for (j, &xj) in x.iter().enumerate() {
            if xj != T::zero() {
                axpy(xj, self.column(j), &mut y);
            }
        }
        y
    }

    /// `Aᵀ x`
    pub fn tr_mul_vec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.rows);
        self.columns().map(|c| dot(c, x)).collect()
    }

    /// `AᵀA`
    pub fn gram(&self) -> Self {
        let n = self.cols;
        let mut q = Self::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = dot(self.column(i), self.column(j));
                q.set(i, j, v);
                q.set(j, i, v);
            }
        }
        q
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, &v| m.max(v.abs()))
    }

    pub fn cast<U: Scalar>(&self) -> DenseMatrix<U> {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| U::lit(v.to_f64_lossy())).collect(),
        }
    }
}

/// LU factorization `PA = LU` with partial pivoting.
#[derive(Debug, Clone)]
pub struct Lu<T> {
    n: usize,
    // L below the diagonal (unit diagonal implied), U on and above; column-major.
    factors: DenseMatrix<T>,
    perm: Vec<usize>,
    swaps: usize,
}

impl<T: Scalar> Lu<T> {
    /// Factors a square matrix; a pivot of magnitude at most `tol` is reported as singular.
    pub fn factor(a: &DenseMatrix<T>, tol: T) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch { expected: a.rows(), found: a.cols() });
        }
        let n = a.rows();
        let mut f = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0;
        for k in 0..n {
            let (p, pmax) =
                (k..n)
                    .map(|i| (i, f.get(i, k).abs()))
                    .fold((k, T::zero()), |best, cur| if cur.1 > best.1 { cur } else { best });
            if !(pmax > tol) {
                return Err(Error::SingularMatrix { column: k });
            }
            if p != k {
                for j in 0..n {
                    let tmp = f.get(k, j);
                    f.set(k, j, f.get(p, j));
                    f.set(p, j, tmp);
                }
                perm.swap(k, p);
                swaps += 1;
            }
            let pivot = f.get(k, k);
            for i in k + 1..n {
                let l = f.get(i, k) / pivot;
                f.set(i, k, l);
                if l != T::zero() {
                    for j in k + 1..n {
                        let v = f.get(i, j) - l * f.get(k, j);
                        f.set(i, j, v);
                    }
                }
            }
        }
        Ok(Self { n, factors: f, perm, swaps })
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let n = self.n;
        let mut y: Vec<T> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= self.factors.get(i, k) * y[k];
            }
            y[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..n {
                s -= self.factors.get(i, k) * y[k];
            }
            y[i] = s / self.factors.get(i, i);
        }
        y
    }

    /// `ln |det A|`, accumulated from the diagonal of `U` so it never overflows.
    pub fn log_abs_det(&self) -> T {
        (0..self.n).map(|i| self.factors.get(i, i).abs().ln()).sum()
    }

    /// Sign of `det A`.
    pub fn det_sign(&self) -> T {
        let mut s = if self.swaps.is_multiple_of(2) { T::one() } else { -T::one() };
        for i in 0..self.n {
            if self.factors.get(i, i) < T::zero() {
                s = -s;
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lu_solves_and_reports_determinant() {
        let a = DenseMatrix::<f64>::from_rows(&[vec![3.0, -2.0], vec![2.0, 1.0]]).unwrap();
        let lu = Lu::factor(&a, 0.0).unwrap();
        let x = lu.solve(&[-1.0, 4.0]);
        assert!((x[0] - 1.0).abs() < 1e-14 && (x[1] - 2.0).abs() < 1e-14);
        assert!((lu.log_abs_det() - 7f64.ln()).abs() < 1e-14);
        assert_eq!(lu.det_sign(), 1.0);
    }

    #[test]
    fn lu_flags_singular() {
        let a = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(matches!(Lu::factor(&a, 1e-12), Err(Error::SingularMatrix { column: 1 })));
    }

    #[test]
    fn column_major_layout() {
        let a = DenseMatrix::from_rows(&[vec![2.0, -1.0], vec![1.0, 1.0]]).unwrap();
        assert_eq!(a.column(0), &[2.0, 1.0]);
        assert_eq!(a.column(1), &[-1.0, 1.0]);
        assert_eq!(a.mul_vec(&[1.0, 1.0]), vec![1.0, 2.0]);
        assert_eq!(a.tr_mul_vec(&[0.0, -3.0]), vec![-3.0, -3.0]);
        let q = a.gram();
        assert_eq!(q.row(0), vec![5.0, -1.0]);
    }
}
