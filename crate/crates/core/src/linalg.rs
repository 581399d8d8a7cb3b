//! Small dense linear algebra: row-major matrices, LU inversion, the
//! matrix exponential and rank-revealing least squares.
//!
//! Everything here targets desk-scale sizes (a few dozen rows at most), so
//! the routines favour clarity over blocking or SIMD.

use std::ops::{Index, IndexMut};

use thiserror::Error;

use crate::scalar::{norm2, Scalar};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: String, found: String },
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("matrix is singular to working precision")]
    Singular,
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    /// Builds a matrix from a row-major buffer.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<T>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::DimensionMismatch {
                expected: format!("{} entries", rows * cols),
                found: format!("{} entries", data.len()),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self, LinalgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|row| row.len() != c) {
            return Err(LinalgError::DimensionMismatch {
                expected: format!("{c} columns"),
                found: format!("{} columns", bad.len()),
            });
        }
        Ok(Self {
            rows: r,
            cols: c,
            data: rows.concat(),
        })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
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

    /// Row-major entries.
    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| a - b).collect(),
        }
    }

    /// `self += s * other`
    pub fn axpy(&mut self, s: T, other: &Self) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul inner dimension");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.data[k * other.cols + j];
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "matvec dimension");
        (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .fold(T::zero(), |acc, (&a, &b)| acc + a * b)
            })
            .collect()
    }

    /// `self·other − other·self`
    pub fn commutator(&self, other: &Self) -> Self {
        self.matmul(other).sub(&other.matmul(self))
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, &x| acc.max(x.abs()))
    }

    /// Induced 1-norm (max column sum).
    pub fn norm_one(&self) -> T {
        (0..self.cols)
            .map(|j| (0..self.rows).fold(T::zero(), |acc, i| acc + self[(i, j)].abs()))
            .fold(T::zero(), T::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    /// Inverse via LU with partial pivoting.
    pub fn inverse(&self) -> Result<Self, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::DimensionMismatch {
                expected: "square matrix".into(),
                found: format!("{}x{}", self.rows, self.cols),
            });
        }
        if !self.is_finite() {
            return Err(LinalgError::NonFinite);
        }
        let n = self.rows;
        let mut lu = self.clone();
        let mut inv = Self::identity(n);
        let scale = self.max_abs();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&a, &b| lu[(a, col)].abs().partial_cmp(&lu[(b, col)].abs()).unwrap())
                .unwrap();
            let p = lu[(pivot, col)];
            if p.abs() <= T::epsilon() * scale * T::of(n as f64) || p == T::zero() {
                return Err(LinalgError::Singular);
            }
            if pivot != col {
                lu.swap_rows(pivot, col);
                inv.swap_rows(pivot, col);
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = lu[(r, col)] / p;
                if f == T::zero() {
                    continue;
                }
                for c in 0..n {
                    let (lv, iv) = (lu[(col, c)], inv[(col, c)]);
                    lu[(r, c)] -= f * lv;
                    inv[(r, c)] -= f * iv;
                }
            }
        }
        for r in 0..n {
            let d = lu[(r, r)];
            for c in 0..n {
                inv[(r, c)] /= d;
            }
        }
        Ok(inv)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Degree of the truncated Taylor core used after scaling.
const EXPM_TAYLOR_DEGREE: usize = 18;

/// Matrix exponential by scaling and squaring.
///
/// The argument is scaled by `2^-s` until its 1-norm is at most 1/2, the
/// exponential of the scaled matrix is summed as a degree-18 Taylor
/// polynomial (Horner form), and the result is squared `s` times. At norm
/// 1/2 the truncation term is below `0.5^19 / 19!`, far under f64 epsilon.
pub fn matrix_exp<T: Scalar>(m: &Matrix<T>) -> Result<Matrix<T>, LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::DimensionMismatch {
            expected: "square matrix".into(),
            found: format!("{}x{}", m.rows(), m.cols()),
        });
    }
    if !m.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    let n = m.rows();
    let norm = m.norm_one();
    let half = T::of(0.5);
    let mut squarings = 0u32;
    if norm > half {
        squarings = (norm / half).log2().ceil().to_u32().unwrap_or(0);
    }
    let a = m.scale(T::one() / T::of(2f64.powi(squarings as i32)));

    // Horner: I + A/1 (I + A/2 (I + ... (I + A/d)))
    let id = Matrix::identity(n);
    let mut acc = id.clone();
    for k in (1..=EXPM_TAYLOR_DEGREE).rev() {
        acc = id.add(&a.matmul(&acc).scale(T::one() / T::of(k as f64)));
    }
    for _ in 0..squarings {
        acc = acc.matmul(&acc);
    }
    if !acc.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    Ok(acc)
}

/// Result of a least-squares solve.
#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquares<T> {
    /// Minimum-norm minimizer of `‖A x − b‖`.
    pub solution: Vec<T>,
    /// `‖A x − b‖` at the minimizer (distance from `b` to the column span).
    pub residual: T,
    /// Numerical rank detected by the pivoted QR.
    pub rank: usize,
}

/// Relative rank tolerance for [`lstsq`]: a pivot is treated as zero when it
/// is below this fraction of the largest column norm.
pub const RANK_TOLERANCE: f64 = 1e-10;

/// Householder QR with column pivoting. Returns the packed factorization:
/// `r` holds R in its upper triangle, `reflectors` the Householder vectors,
/// and `perm[k]` the original column placed at position `k`.
struct PivotedQr<T> {
    r: Matrix<T>,
    reflectors: Vec<(Vec<T>, T)>,
    perm: Vec<usize>,
    rank: usize,
}

fn pivoted_qr<T: Scalar>(a: &Matrix<T>, rel_tol: T) -> PivotedQr<T> {
    let (m, n) = (a.rows(), a.cols());
    let mut r = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut reflectors = Vec::new();
    let steps = m.min(n);
    let max_col_norm = (0..n).map(|j| norm2(&a.column(j))).fold(T::zero(), T::max);
    let threshold = rel_tol * max_col_norm;
    let mut rank = 0;

    for k in 0..steps {
        // Pick the remaining column with the largest trailing norm.
        let (best, best_norm) = (k..n)
            .map(|j| {
                let tail: Vec<T> = (k..m).map(|i| r[(i, j)]).collect();
                (j, norm2(&tail))
            })
            .fold((k, -T::one()), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        if best_norm <= threshold || best_norm == T::zero() {
            break;
        }
        if best != k {
            for i in 0..m {
                let tmp = r[(i, k)];
                r[(i, k)] = r[(i, best)];
                r[(i, best)] = tmp;
            }
            perm.swap(k, best);
        }
        // Householder vector for column k, rows k..m.
        let x0 = r[(k, k)];
        let alpha = if x0 >= T::zero() { -best_norm } else { best_norm };
        let mut v: Vec<T> = (k..m).map(|i| r[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm2 = v.iter().fold(T::zero(), |acc, &x| acc + x * x);
        if vnorm2 > T::zero() {
            let beta = T::of(2.0) / vnorm2;
            for j in k..n {
                let dot = (k..m).fold(T::zero(), |acc, i| acc + v[i - k] * r[(i, j)]);
                let f = beta * dot;
                for i in k..m {
                    r[(i, j)] -= f * v[i - k];
                }
            }
            reflectors.push((v, beta));
        } else {
            reflectors.push((v, T::zero()));
        }
        rank += 1;
    }
    PivotedQr {
        r,
        reflectors,
        perm,
        rank,
    }
}

/// Minimum-norm least squares `min ‖A x − b‖` via rank-revealing QR.
///
/// Rank is cut at `rel_tol` times the largest column norm. For a rank
/// deficient `A` the basic solution from the QR is orthogonally projected
/// off the null space, which yields the minimum-norm minimizer.
pub fn lstsq<T: Scalar>(a: &Matrix<T>, b: &[T], rel_tol: T) -> Result<LeastSquares<T>, LinalgError> {
    let (m, n) = (a.rows(), a.cols());
    if b.len() != m {
        return Err(LinalgError::DimensionMismatch {
            expected: format!("rhs of length {m}"),
            found: format!("length {}", b.len()),
        });
    }
    if !a.is_finite() || b.iter().any(|x| !x.is_finite()) {
        return Err(LinalgError::NonFinite);
    }
    if n == 0 {
        return Ok(LeastSquares {
            solution: Vec::new(),
            residual: norm2(b),
            rank: 0,
        });
    }
    let qr = pivoted_qr(a, rel_tol);
    let rank = qr.rank;

    // c = Qᵀ b
    let mut c = b.to_vec();
    for (k, (v, beta)) in qr.reflectors.iter().enumerate() {
        let dot = (k..m).fold(T::zero(), |acc, i| acc + v[i - k] * c[i]);
        let f = *beta * dot;
        for i in k..m {
            c[i] -= f * v[i - k];
        }
    }
    let residual = norm2(&c[rank..]);

    // Back substitution on R11 z = c[..rank].
    let mut z = vec![T::zero(); n];
    for i in (0..rank).rev() {
        let s = ((i + 1)..rank).fold(c[i], |acc, j| acc - qr.r[(i, j)] * z[j]);
        z[i] = s / qr.r[(i, i)];
    }

    if rank < n {
        // Null space of A·P: columns [-R11⁻¹ R12; I].
        let free = n - rank;
        let mut null = Matrix::zeros(n, free);
        for f in 0..free {
            let col = rank + f;
            let mut w = vec![T::zero(); rank];
            for i in (0..rank).rev() {
                let s = ((i + 1)..rank).fold(qr.r[(i, col)], |acc, j| acc - qr.r[(i, j)] * w[j]);
                w[i] = s / qr.r[(i, i)];
            }
            for i in 0..rank {
                null[(i, f)] = -w[i];
            }
            null[(col, f)] = T::one();
        }
        // Orthonormalize (modified Gram-Schmidt, twice) and project z.
        let mut basis: Vec<Vec<T>> = Vec::with_capacity(free);
        for f in 0..free {
            let mut q = null.column(f);
            for _ in 0..2 {
                for e in &basis {
                    let d = dot(e, &q);
                    for (qi, &ei) in q.iter_mut().zip(e) {
                        *qi -= d * ei;
                    }
                }
            }
            let nq = norm2(&q);
            if nq > T::zero() {
                q.iter_mut().for_each(|x| *x /= nq);
                basis.push(q);
            }
        }
        for e in &basis {
            let d = dot(e, &z);
            for (zi, &ei) in z.iter_mut().zip(e) {
                *zi -= d * ei;
            }
        }
    }

    let mut solution = vec![T::zero(); n];
    for (k, &orig) in qr.perm.iter().enumerate() {
        solution[orig] = z[k];
    }
    Ok(LeastSquares {
        solution,
        residual,
        rank,
    })
}

pub(crate) fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}
