//! Real Lie algebras from structure constants, matrix representations,
//! exponentials and adjoint actions.

use thiserror::Error;

use crate::linalg::{lstsq, matrix_exp, LinalgError, Matrix};
use crate::scalar::{all_finite, norm_inf, Scalar};

/// Jacobi-identity threshold for a valid algebra.
pub const JACOBI_TOLERANCE: f64 = 1e-12;
/// Antisymmetry threshold for a valid algebra.
pub const ANTISYMMETRY_TOLERANCE: f64 = 1e-12;
/// Threshold for `ρ([x, y]) = [ρ(x), ρ(y)]`.
pub const REPRESENTATION_TOLERANCE: f64 = 1e-10;
/// Threshold for h-exponentials fixing the base point.
pub const STABILIZER_TOLERANCE: f64 = 1e-10;
/// Max least-squares residual when reading coordinates off a matrix.
pub const COORDINATE_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LieError {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("matrix is not in the span of the generators (residual {residual:e})")]
    NotInSpan { residual: f64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Element of g in the `e_i` basis.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraVector<T> {
    pub coords: Vec<T>,
}

impl<T: Scalar> AlgebraVector<T> {
    pub fn new(coords: Vec<T>) -> Self {
        Self { coords }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            coords: vec![T::zero(); n],
        }
    }

    /// Basis vector `e_i` (0-based).
    pub fn basis(n: usize, i: usize) -> Self {
        let mut v = Self::zeros(n);
        v.coords[i] = T::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn scaled(&self, s: T) -> Self {
        Self::new(self.coords.iter().map(|&x| x * s).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(self.coords.iter().zip(&other.coords).map(|(&a, &b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new(self.coords.iter().zip(&other.coords).map(|(&a, &b)| a - b).collect())
    }

    pub fn is_finite(&self) -> bool {
        all_finite(&self.coords)
    }
}

impl<T> From<Vec<T>> for AlgebraVector<T> {
    fn from(coords: Vec<T>) -> Self {
        Self { coords }
    }
}

/// Finite-dimensional real Lie algebra, `[e_i, e_j] = Σ_k c[i][j][k] e_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct LieAlgebra<T> {
    dim: usize,
    /// Dense `c[i][j][k]` at `(i * dim + j) * dim + k`.
    constants: Vec<T>,
    labels: Vec<String>,
}

impl<T: Scalar> LieAlgebra<T> {
    /// Wraps a dense constant tensor. Only shapes are checked here; the
    /// algebraic identities are reported by [`Self::antisymmetry_residual`]
    /// and [`Self::jacobi_residual`].
    pub fn new(dim: usize, constants: Vec<T>, labels: Vec<String>) -> Result<Self, LieError> {
        if dim == 0 {
            return Err(LieError::InvalidInput("algebra dimension must be positive".into()));
        }
        if constants.len() != dim * dim * dim {
            return Err(LieError::DimensionMismatch {
                expected: dim * dim * dim,
                found: constants.len(),
            });
        }
        if labels.len() != dim {
            return Err(LieError::DimensionMismatch {
                expected: dim,
                found: labels.len(),
            });
        }
        if !all_finite(&constants) {
            return Err(LieError::InvalidInput("non-finite structure constant".into()));
        }
        Ok(Self { dim, constants, labels })
    }

    /// Builds the constants from sparse `(i, j, k, value)` entries (0-based).
    /// Each entry also sets `c[j][i][k] = −value` unless that slot is given
    /// explicitly; conflicting explicit entries are kept as-is so that the
    /// antisymmetry check can report them.
    pub fn from_entries(
        dim: usize,
        entries: &[(usize, usize, usize, T)],
        labels: Vec<String>,
    ) -> Result<Self, LieError> {
        let idx = |i: usize, j: usize, k: usize| (i * dim + j) * dim + k;
        let mut c = vec![T::zero(); dim * dim * dim];
        let mut explicit = vec![false; dim * dim * dim];
        for &(i, j, k, v) in entries {
            if i >= dim || j >= dim || k >= dim {
                return Err(LieError::InvalidInput(format!(
                    "structure constant index ({}, {}, {}) out of range for dimension {dim}",
                    i + 1,
                    j + 1,
                    k + 1
                )));
            }
            c[idx(i, j, k)] = v;
            explicit[idx(i, j, k)] = true;
        }
        for &(i, j, k, v) in entries {
            if !explicit[idx(j, i, k)] {
                c[idx(j, i, k)] = -v;
            }
        }
        Self::new(dim, c, labels)
    }

    /// so(3) with `[e1, e2] = e3`, `[e2, e3] = e1`, `[e3, e1] = e2`.
    pub fn so3() -> Self {
        let one = T::one();
        Self::from_entries(
            3,
            &[(0, 1, 2, one), (1, 2, 0, one), (2, 0, 1, one)],
            vec!["e1".into(), "e2".into(), "e3".into()],
        )
        .expect("so(3) constants are well-formed")
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    #[inline]
    pub fn constant(&self, i: usize, j: usize, k: usize) -> T {
        self.constants[(i * self.dim + j) * self.dim + k]
    }

    /// Sparse nonzero entries `(i, j, k, value)`, 0-based, with `i < j`.
    pub fn nonzero_entries(&self) -> Vec<(usize, usize, usize, T)> {
        let n = self.dim;
        let mut out = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                for k in 0..n {
                    let v = self.constant(i, j, k);
                    if v != T::zero() {
                        out.push((i, j, k, v));
                    }
                }
            }
        }
        out
    }

    fn check_dim(&self, v: &AlgebraVector<T>) -> Result<(), LieError> {
        if v.dim() != self.dim {
            return Err(LieError::DimensionMismatch {
                expected: self.dim,
                found: v.dim(),
            });
        }
        Ok(())
    }

    fn bracket_unchecked(&self, x: &[T], y: &[T]) -> Vec<T> {
        let n = self.dim;
        let mut out = vec![T::zero(); n];
        for (i, &xi) in x.iter().enumerate() {
            if xi == T::zero() {
                continue;
            }
            for (j, &yj) in y.iter().enumerate() {
                let w = xi * yj;
                if w == T::zero() {
                    continue;
                }
                let base = (i * n + j) * n;
                for (k, o) in out.iter_mut().enumerate() {
                    *o += w * self.constants[base + k];
                }
            }
        }
        out
    }

    /// `[x, y] = Σ_{i,j} x_i y_j c[i][j][·]`.
    pub fn bracket(&self, x: &AlgebraVector<T>, y: &AlgebraVector<T>) -> Result<AlgebraVector<T>, LieError> {
        self.check_dim(x)?;
        self.check_dim(y)?;
        Ok(AlgebraVector::new(self.bracket_unchecked(&x.coords, &y.coords)))
    }

    /// Matrix of `ad(x) = [x, ·]` acting on coordinate columns.
    pub fn ad_matrix(&self, x: &AlgebraVector<T>) -> Result<Matrix<T>, LieError> {
        self.check_dim(x)?;
        let n = self.dim;
        let mut m = Matrix::zeros(n, n);
        for (i, &xi) in x.coords.iter().enumerate() {
            if xi == T::zero() {
                continue;
            }
            for j in 0..n {
                for k in 0..n {
                    m[(k, j)] += xi * self.constant(i, j, k);
                }
            }
        }
        Ok(m)
    }

    /// `Ad(exp(t v)) = e^{t ad(v)}`.
    pub fn adjoint_of_group_element(&self, v: &AlgebraVector<T>, t: T) -> Result<Matrix<T>, LieError> {
        if !v.is_finite() || !t.is_finite() {
            return Err(LieError::InvalidInput("non-finite algebra element or time".into()));
        }
        Ok(matrix_exp(&self.ad_matrix(v)?.scale(t))?)
    }

    /// `max_{i,j,k} |c[i][j][k] + c[j][i][k]|`.
    pub fn antisymmetry_residual(&self) -> T {
        let n = self.dim;
        let mut worst = T::zero();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    worst = worst.max((self.constant(i, j, k) + self.constant(j, i, k)).abs());
                }
            }
        }
        worst
    }

    /// Max over basis triples of `‖[[e_i,e_j],e_k] + [[e_j,e_k],e_i] + [[e_k,e_i],e_j]‖∞`.
    pub fn jacobi_residual(&self) -> T {
        let n = self.dim;
        let e = |i: usize| AlgebraVector::<T>::basis(n, i).coords;
        let mut worst = T::zero();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let a = self.bracket_unchecked(&self.bracket_unchecked(&e(i), &e(j)), &e(k));
                    let b = self.bracket_unchecked(&self.bracket_unchecked(&e(j), &e(k)), &e(i));
                    let c = self.bracket_unchecked(&self.bracket_unchecked(&e(k), &e(i)), &e(j));
                    let s: Vec<T> = (0..n).map(|l| a[l] + b[l] + c[l]).collect();
                    worst = worst.max(norm_inf(&s));
                }
            }
        }
        worst
    }
}

/// Model realization of the base point `o = eH`.
#[derive(Debug, Clone, PartialEq)]
pub enum BasePoint<T> {
    /// `g · o = ρ(g) p`.
    Vector(Vec<T>),
    /// `g · o = ρ(g) P`, flattened row-major. With `P = I` this realizes `G/{e}`.
    Matrix(Matrix<T>),
}

impl<T: Scalar> BasePoint<T> {
    /// Number of scalars in a model point.
    pub fn len(&self) -> usize {
        match self {
            BasePoint::Vector(v) => v.len(),
            BasePoint::Matrix(m) => m.rows() * m.cols(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn as_flat(&self) -> Vec<T> {
        match self {
            BasePoint::Vector(v) => v.clone(),
            BasePoint::Matrix(m) => m.as_slice().to_vec(),
        }
    }
}

/// Faithful matrix representation of g used to realize group elements.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixRep<T> {
    size: usize,
    generators: Vec<Matrix<T>>,
    base_point: BasePoint<T>,
}

impl<T: Scalar> MatrixRep<T> {
    pub fn new(size: usize, generators: Vec<Matrix<T>>, base_point: BasePoint<T>) -> Result<Self, LieError> {
        if size == 0 {
            return Err(LieError::InvalidInput("representation size must be positive".into()));
        }
        for g in &generators {
            if g.rows() != size || g.cols() != size {
                return Err(LieError::InvalidInput(format!(
                    "generator is {}x{}, expected {size}x{size}",
                    g.rows(),
                    g.cols()
                )));
            }
            if !g.is_finite() {
                return Err(LieError::InvalidInput("non-finite generator entry".into()));
            }
        }
        match &base_point {
            BasePoint::Vector(v) if v.len() != size => {
                return Err(LieError::DimensionMismatch {
                    expected: size,
                    found: v.len(),
                })
            }
            BasePoint::Matrix(m) if m.rows() != size => {
                return Err(LieError::DimensionMismatch {
                    expected: size,
                    found: m.rows(),
                })
            }
            _ => {}
        }
        Ok(Self {
            size,
            generators,
            base_point,
        })
    }

    /// Defining 3×3 representation of so(3) by infinitesimal rotations about
    /// the coordinate axes, with the given base point.
    pub fn so3_defining(base_point: BasePoint<T>) -> Self {
        let (z, o) = (T::zero(), T::one());
        let l1 = Matrix::from_rows(&[vec![z, z, z], vec![z, z, -o], vec![z, o, z]]).unwrap();
        let l2 = Matrix::from_rows(&[vec![z, z, o], vec![z, z, z], vec![-o, z, z]]).unwrap();
        let l3 = Matrix::from_rows(&[vec![z, -o, z], vec![o, z, z], vec![z, z, z]]).unwrap();
        Self::new(3, vec![l1, l2, l3], base_point).expect("so(3) generators are 3x3")
    }

    /// su(2) generators `e_k = −(i/2) σ_k` realified as 4×4 real matrices via
    /// `A + iB ↦ [[A, −B], [B, A]]`. Same structure constants as so(3).
    pub fn su2_realified() -> Self {
        let h = T::of(0.5);
        let z = T::zero();
        // e1 = -(i/2) σx: A = 0, B = -½ [[0,1],[1,0]]
        // e2 = -(i/2) σy = -½ [[0,1],[-1,0]]: A = -½ [[0,1],[-1,0]], B = 0
        // e3 = -(i/2) σz: A = 0, B = -½ [[1,0],[0,-1]]
        let realify = |a: [[T; 2]; 2], b: [[T; 2]; 2]| {
            Matrix::from_fn(4, 4, |i, j| {
                let (bi, bj) = (i / 2, j / 2);
                let (ii, jj) = (i % 2, j % 2);
                match (bi, bj) {
                    (0, 0) | (1, 1) => a[ii][jj],
                    (0, 1) => -b[ii][jj],
                    _ => b[ii][jj],
                }
            })
        };
        let e1 = realify([[z, z], [z, z]], [[z, -h], [-h, z]]);
        let e2 = realify([[z, -h], [h, z]], [[z, z], [z, z]]);
        let e3 = realify([[z, z], [z, z]], [[-h, z], [z, h]]);
        Self::new(4, vec![e1, e2, e3], BasePoint::Matrix(Matrix::identity(4))).unwrap()
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn generators(&self) -> &[Matrix<T>] {
        &self.generators
    }

    pub fn base_point(&self) -> &BasePoint<T> {
        &self.base_point
    }

    /// `ρ(x) = Σ x_i ρ(e_i)`.
    pub fn rho(&self, x: &AlgebraVector<T>) -> Result<Matrix<T>, LieError> {
        if x.dim() != self.generators.len() {
            return Err(LieError::DimensionMismatch {
                expected: self.generators.len(),
                found: x.dim(),
            });
        }
        let mut m = Matrix::zeros(self.size, self.size);
        for (&xi, g) in x.coords.iter().zip(&self.generators) {
            if xi != T::zero() {
                m.axpy(xi, g);
            }
        }
        Ok(m)
    }

    /// `exp(ρ(x))`.
    pub fn exp(&self, x: &AlgebraVector<T>) -> Result<Matrix<T>, LieError> {
        Ok(matrix_exp(&self.rho(x)?)?)
    }

    /// Action of a represented group element on the base point, flattened.
    pub fn act(&self, g: &Matrix<T>) -> Vec<T> {
        match &self.base_point {
            BasePoint::Vector(p) => g.matvec(p),
            BasePoint::Matrix(p) => g.matmul(p).into_vec(),
        }
    }

    /// Infinitesimal action `ρ(x) · o`, flattened.
    pub fn tangent_at_base(&self, x: &AlgebraVector<T>) -> Result<Vec<T>, LieError> {
        Ok(self.act(&self.rho(x)?))
    }

    /// Least-squares coordinates of a matrix in the generator basis, with
    /// the Frobenius distance from the matrix to the span.
    pub fn project_coordinates(&self, m: &Matrix<T>) -> Result<(AlgebraVector<T>, T), LieError> {
        if m.rows() != self.size || m.cols() != self.size {
            return Err(LieError::DimensionMismatch {
                expected: self.size,
                found: m.rows(),
            });
        }
        let n2 = self.size * self.size;
        let a = Matrix::from_fn(n2, self.generators.len(), |r, c| self.generators[c].as_slice()[r]);
        let ls = lstsq(&a, m.as_slice(), T::of(crate::linalg::RANK_TOLERANCE))?;
        Ok((AlgebraVector::new(ls.solution), ls.residual))
    }

    /// Re-expresses a matrix in the generator basis by least squares.
    /// Fails with [`LieError::NotInSpan`] when the residual exceeds
    /// [`COORDINATE_TOLERANCE`].
    pub fn coordinates(&self, m: &Matrix<T>) -> Result<AlgebraVector<T>, LieError> {
        let (x, residual) = self.project_coordinates(m)?;
        if residual > T::of(COORDINATE_TOLERANCE) {
            return Err(LieError::NotInSpan {
                residual: residual.to_f64_lossy(),
            });
        }
        Ok(x)
    }

    /// `Ad(g)` as an n×n matrix computed through conjugation
    /// `ρ(g) ρ(e_j) ρ(g)⁻¹` and coordinate re-expression.
    pub fn adjoint_by_conjugation(&self, g: &Matrix<T>) -> Result<Matrix<T>, LieError> {
        let ginv = g.inverse()?;
        let n = self.generators.len();
        let mut out = Matrix::zeros(n, n);
        for (j, gen) in self.generators.iter().enumerate() {
            let conj = g.matmul(gen).matmul(&ginv);
            let col = self.coordinates(&conj)?;
            for (i, &v) in col.coords.iter().enumerate() {
                out[(i, j)] = v;
            }
        }
        Ok(out)
    }

    /// `max_{i,j} ‖ρ([e_i,e_j]) − [ρ(e_i), ρ(e_j)]‖∞`.
    pub fn representation_residual(&self, algebra: &LieAlgebra<T>) -> Result<T, LieError> {
        let n = algebra.dim();
        if self.generators.len() != n {
            return Err(LieError::DimensionMismatch {
                expected: n,
                found: self.generators.len(),
            });
        }
        let mut worst = T::zero();
        for i in 0..n {
            for j in 0..n {
                let b = algebra.bracket(&AlgebraVector::basis(n, i), &AlgebraVector::basis(n, j))?;
                let lhs = self.rho(&b)?;
                let rhs = self.generators[i].commutator(&self.generators[j]);
                worst = worst.max(lhs.sub(&rhs).max_abs());
            }
        }
        Ok(worst)
    }

    /// Worst displacement of the base point by `exp(s ρ(e_i))` over the given
    /// basis indices and a few values of `s`, together with the infinitesimal
    /// displacement `ρ(e_i) · o`.
    pub fn stabilizer_residual(&self, indices: &[usize]) -> Result<T, LieError> {
        let o = self.base_point.as_flat();
        let mut worst = T::zero();
        for &i in indices {
            let gen = self
                .generators
                .get(i)
                .ok_or_else(|| LieError::InvalidInput(format!("basis index {} has no generator", i + 1)))?;
            worst = worst.max(norm_inf(&self.act(gen)));
            for s in [0.5, 1.0, std::f64::consts::PI] {
                let g = matrix_exp(&gen.scale(T::of(s)))?;
                let moved: Vec<T> = self.act(&g).iter().zip(&o).map(|(&a, &b)| a - b).collect();
                worst = worst.max(norm_inf(&moved));
            }
        }
        Ok(worst)
    }
}
