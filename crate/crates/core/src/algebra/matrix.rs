//! Dense matrices and exact linear solving.
//!
//! The graph matrices are small integer matrices; the constraint systems are
//! small matrices of [`Scalar`]s. Elimination is ordinary Gaussian
//! elimination over the exact field, so no rounding exists anywhere. The
//! pivot rule picks the structurally smallest eligible entry (fewest
//! polynomial terms, then lowest total degree), which keeps intermediate
//! rational functions small on gear-train systems whose entries are
//! monomials.

use num::Zero;

use super::{AlgebraError, Rational, Scalar};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Clone> Matrix<T> {
    pub fn filled(rows: usize, cols: usize, value: T) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> &T {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: T) {
        self.data[r * self.cols + c] = value;
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                data.push(self.at(r, c).clone());
            }
        }
        Matrix {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    pub fn map<U: Clone>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    /// New matrix keeping the given columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let mut data = Vec::with_capacity(self.rows * cols.len());
        for r in 0..self.rows {
            for &c in cols {
                data.push(self.at(r, c).clone());
            }
        }
        Matrix {
            rows: self.rows,
            cols: cols.len(),
            data,
        }
    }
}

impl Matrix<i64> {
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Matrix::filled(self.rows, other.cols, 0i64);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = *self.at(r, k);
                if a == 0 {
                    continue;
                }
                for c in 0..other.cols {
                    let v = out.at(r, c) + a * other.at(k, c);
                    out.set(r, c, v);
                }
            }
        }
        out
    }

    pub fn to_scalar(&self) -> Matrix<Scalar> {
        self.map(|&v| Scalar::from_integer(v))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }
}

impl Matrix<Scalar> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix::filled(rows, cols, Scalar::zero())
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Scalar::one());
        }
        m
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let v = out.at(r, c).add(&a.mul(other.at(k, c)));
                    out.set(r, c, v);
                }
            }
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.map(Scalar::neg)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Scalar::is_zero)
    }

    pub fn eval(
        &self,
        bindings: &super::Bindings,
    ) -> Result<Matrix<Rational>, AlgebraError> {
        let mut data = Vec::with_capacity(self.data.len());
        for s in &self.data {
            data.push(s.eval(bindings)?);
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }
}

impl Matrix<Rational> {
    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }
}

/// Solves `A · X = B` exactly over the scalar field.
///
/// The solution is re-checked by multiplying back before it is returned. A
/// singular `A` yields [`AlgebraError::SingularSystem`] naming the rows that
/// eliminated to zero.
pub fn solve_linear(a: &Matrix<Scalar>, b: &Matrix<Scalar>) -> Result<Matrix<Scalar>, AlgebraError> {
    assert_eq!(a.rows(), a.cols(), "coefficient matrix must be square");
    assert_eq!(a.rows(), b.rows(), "right-hand side height mismatch");
    let n = a.rows();
    let m = b.cols();
    if n == 0 {
        return Ok(Matrix::zeros(0, m));
    }

    // Augmented system, with original row indices tracked for error reports.
    let mut aug: Vec<Vec<Scalar>> = (0..n)
        .map(|r| {
            let mut row: Vec<Scalar> = a.row(r).to_vec();
            row.extend_from_slice(b.row(r));
            row
        })
        .collect();
    let mut origin: Vec<usize> = (0..n).collect();

    let mut pivot_of_col: Vec<Option<usize>> = vec![None; n];
    let mut next = 0usize; // rows before `next` hold pivots
    for col in 0..n {
        let candidate = (next..n)
            .filter(|&r| !aug[r][col].is_zero())
            .min_by_key(|&r| (aug[r][col].structural_size(), origin[r]));
        let Some(pivot_row) = candidate else {
            continue;
        };
        aug.swap(next, pivot_row);
        origin.swap(next, pivot_row);
        pivot_of_col[col] = Some(next);
        let pivot = aug[next][col].clone();
        for r in next + 1..n {
            if aug[r][col].is_zero() {
                continue;
            }
            let factor = aug[r][col].checked_div(&pivot)?;
            for c in col..n + m {
                let v = aug[r][c].sub(&factor.mul(&aug[next][c]));
                aug[r][c] = v;
            }
        }
        next += 1;
    }

    if next < n {
        let mut dependent: Vec<usize> = origin[next..].to_vec();
        dependent.sort_unstable();
        return Err(AlgebraError::SingularSystem(dependent));
    }

    // Back-substitution per right-hand column.
    let mut x = Matrix::zeros(n, m);
    for rhs in 0..m {
        for col in (0..n).rev() {
            let row = pivot_of_col[col].expect("all columns pivoted");
            let mut acc = aug[row][n + rhs].clone();
            for c in col + 1..n {
                acc = acc.sub(&aug[row][c].mul(x.at(c, rhs)));
            }
            let v = acc.checked_div(&aug[row][col])?;
            x.set(col, rhs, v);
        }
    }

    // Exactness check: A · X must reproduce B.
    let check = a.matmul(&x);
    if &check != b {
        return Err(AlgebraError::VerificationFailed);
    }
    Ok(x)
}

/// Columns that receive a pivot when eliminating in the given column order;
/// the complement spans the dependent columns.
pub fn pivot_columns_in_order(m: &Matrix<Scalar>, order: &[usize]) -> Vec<usize> {
    let rows = m.rows();
    let mut work: Vec<Vec<Scalar>> = (0..rows).map(|r| m.row(r).to_vec()).collect();
    let mut next = 0usize;
    let mut pivots = Vec::new();
    for &col in order {
        if next == rows {
            break;
        }
        let candidate = (next..rows)
            .filter(|&r| !work[r][col].is_zero())
            .min_by_key(|&r| (work[r][col].structural_size(), r));
        let Some(pivot_row) = candidate else {
            continue;
        };
        work.swap(next, pivot_row);
        let pivot = work[next][col].clone();
        for r in next + 1..rows {
            if work[r][col].is_zero() {
                continue;
            }
            let factor = work[r][col].checked_div(&pivot).expect("nonzero pivot");
            for c in 0..m.cols() {
                let v = work[r][c].sub(&factor.mul(&work[next][c]));
                work[r][c] = v;
            }
        }
        pivots.push(col);
        next += 1;
    }
    pivots
}

/// Rank by exact elimination.
pub fn rank(m: &Matrix<Scalar>) -> usize {
    let rows = m.rows();
    let cols = m.cols();
    let mut work: Vec<Vec<Scalar>> = (0..rows).map(|r| m.row(r).to_vec()).collect();
    let mut next = 0usize;
    for col in 0..cols {
        if next == rows {
            break;
        }
        let candidate = (next..rows)
            .filter(|&r| !work[r][col].is_zero())
            .min_by_key(|&r| (work[r][col].structural_size(), r));
        let Some(pivot_row) = candidate else {
            continue;
        };
        work.swap(next, pivot_row);
        let pivot = work[next][col].clone();
        for r in next + 1..rows {
            if work[r][col].is_zero() {
                continue;
            }
            let factor = work[r][col]
                .checked_div(&pivot)
                .expect("nonzero pivot");
            for c in col..cols {
                let v = work[r][c].sub(&factor.mul(&work[next][c]));
                work[r][c] = v;
            }
        }
        next += 1;
    }
    next
}
