//! Small dense complex linear algebra.
//!
//! The matrices handled here are at most a few dozen rows (4N for a handful
//! of blocks), so a straightforward row-major layout with partial pivoting
//! is all that is needed.

use std::ops::{Index, IndexMut, Mul};

use num_complex::Complex64;
use thiserror::Error;

pub type C64 = Complex64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LuError {
    #[error("matrix is exactly singular (zero pivot in column {pivot})")]
    Singular { pivot: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("right-hand side has length {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![C64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = *d;
        }
        m
    }

    /// Builds a matrix from row-major data. Returns `NotSquare` if the
    /// length is not a perfect square.
    pub fn from_row_major(data: Vec<C64>) -> Result<Self, LuError> {
        let n = (data.len() as f64).sqrt().round() as usize;
        if n * n != data.len() {
            return Err(LuError::NotSquare {
                rows: data.len(),
                cols: 1,
            });
        }
        Ok(Self { n, data })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.n).map(|i| self[(i, i)]).collect()
    }

    pub fn trace(&self) -> C64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    /// `self * diag(d)`: scales column `j` by `d[j]`.
    pub fn scale_columns(&self, d: &[C64]) -> CMatrix {
        assert_eq!(d.len(), self.n);
        let mut out = self.clone();
        for row in out.data.chunks_mut(self.n) {
            for (x, dj) in row.iter_mut().zip(d) {
                *x *= dj;
            }
        }
        out
    }

    /// `tr(self * other)` without forming the product.
    pub fn trace_of_product(&self, other: &CMatrix) -> C64 {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..n {
            for k in 0..n {
                acc += self.data[i * n + k] * other.data[k * n + i];
            }
        }
        acc
    }

    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.n + j]
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        out
    }
}

/// LU factorization with partial (row) pivoting, `P M = L U`.
///
/// `L` has a unit diagonal and is stored below the diagonal of `lu`;
/// `U` occupies the diagonal and above.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: CMatrix,
    perm: Vec<usize>,
    sign: f64,
    norm_one: f64,
}

impl Lu {
    pub fn factor(m: &CMatrix) -> Result<Self, LuError> {
        let n = m.dim();
        let norm_one = m.norm_one();
        let mut lu = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;

        for col in 0..n {
            let (pivot_row, pivot_abs) =
                (col..n)
                    .map(|r| (r, lu[(r, col)].norm()))
                    .fold(
                        (col, -1.0),
                        |best, cur| if cur.1 > best.1 { cur } else { best },
                    );
            if pivot_abs == 0.0 || !pivot_abs.is_finite() {
                return Err(LuError::Singular { pivot: col });
            }
            if pivot_row != col {
                for j in 0..n {
                    lu.data.swap(col * n + j, pivot_row * n + j);
                }
                perm.swap(col, pivot_row);
                sign = -sign;
            }
            let pivot = lu[(col, col)];
            for r in col + 1..n {
                let factor = lu[(r, col)] / pivot;
                lu[(r, col)] = factor;
                if factor == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in col + 1..n {
                    let u = lu[(col, j)];
                    lu[(r, j)] -= factor * u;
                }
            }
        }

        Ok(Self {
            lu,
            perm,
            sign,
            norm_one,
        })
    }

    pub fn dim(&self) -> usize {
        self.lu.dim()
    }

    pub fn det(&self) -> C64 {
        self.lu
            .diagonal()
            .into_iter()
            .fold(C64::new(self.sign, 0.0), |acc, d| acc * d)
    }

    pub fn abs_det(&self) -> f64 {
        self.det().norm()
    }

    pub fn solve(&self, rhs: &[C64]) -> Result<Vec<C64>, LuError> {
        let n = self.dim();
        if rhs.len() != n {
            return Err(LuError::DimensionMismatch {
                expected: n,
                got: rhs.len(),
            });
        }
        let mut x: Vec<C64> = self.perm.iter().map(|&p| rhs[p]).collect();
        for i in 0..n {
            let row = self.lu.row(i);
            let mut acc = x[i];
            for j in 0..i {
                acc -= row[j] * x[j];
            }
            x[i] = acc;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let mut acc = x[i];
            for j in i + 1..n {
                acc -= row[j] * x[j];
            }
            x[i] = acc / row[i];
        }
        Ok(x)
    }

    pub fn solve_many(&self, rhs: &[Vec<C64>]) -> Result<Vec<Vec<C64>>, LuError> {
        rhs.iter().map(|b| self.solve(b)).collect()
    }

    pub fn inverse(&self) -> CMatrix {
        let n = self.dim();
        let mut inv = CMatrix::zeros(n);
        let mut e = vec![C64::new(0.0, 0.0); n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
            e[j] = C64::new(1.0, 0.0);
            let col = self.solve(&e).expect("dimension checked");
            for i in 0..n {
                inv[(i, j)] = col[i];
            }
        }
        inv
    }

    /// Reciprocal 1-norm condition number, `1 / (|M|_1 |M^-1|_1)`.
    ///
    /// Computed from the explicit inverse, which is affordable at these sizes.
    pub fn rcond_with_inverse(&self, inverse: &CMatrix) -> f64 {
        let denom = self.norm_one * inverse.norm_one();
        if denom == 0.0 || !denom.is_finite() {
            0.0
        } else {
            1.0 / denom
        }
    }

    pub fn rcond(&self) -> f64 {
        self.rcond_with_inverse(&self.inverse())
    }
}

/// Result of [`lu_solve`]: solutions plus the diagnostics the evaluators need.
#[derive(Debug, Clone)]
pub struct LuSolution {
    pub solutions: Vec<Vec<C64>>,
    pub abs_det: f64,
    pub rcond: f64,
    pub near_singular: bool,
}

/// Reciprocal condition below which a matrix is flagged as near-singular.
pub const NEAR_SINGULAR_RCOND: f64 = 1e-12;

/// Factor `m` and solve for every right-hand side.
pub fn lu_solve(m: &CMatrix, rhs: &[Vec<C64>]) -> Result<LuSolution, LuError> {
    let lu = Lu::factor(m)?;
    let solutions = lu.solve_many(rhs)?;
    let rcond = lu.rcond();
    Ok(LuSolution {
        solutions,
        abs_det: lu.abs_det(),
        rcond,
        near_singular: rcond < NEAR_SINGULAR_RCOND,
    })
}
