//! Basis-aligned reductive decompositions `g = h + m`.

use serde::Serialize;
use thiserror::Error;

use crate::lie::{AlgebraVector, LieAlgebra, LieError, MatrixRep};
use crate::linalg::{lstsq, matrix_exp, LinalgError, Matrix, RANK_TOLERANCE};
use crate::scalar::{all_finite, norm2, Scalar};

/// Component residual threshold for `[h,h] ⊆ h` and `[h,m] ⊆ m`.
pub const DECOMPOSITION_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReductiveError {
    #[error("invalid decomposition: {0}")]
    InvalidDecomposition(String),
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("vector must be nonzero")]
    ZeroVector,
    #[error("vector has non-finite entries")]
    NonFinite,
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Element of m in the m-basis (coordinates ordered like `m_indices`).
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct MVector<T> {
    pub coords: Vec<T>,
}

impl<T: Scalar> MVector<T> {
    pub fn new(coords: Vec<T>) -> Self {
        Self { coords }
    }

    pub fn zeros(q: usize) -> Self {
        Self::new(vec![T::zero(); q])
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn norm(&self) -> T {
        norm2(&self.coords)
    }

    pub fn scaled(&self, s: T) -> Self {
        Self::new(self.coords.iter().map(|&x| x * s).collect())
    }

    pub fn neg(&self) -> Self {
        self.scaled(-T::one())
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::new(self.coords.iter().zip(&other.coords).map(|(&a, &b)| a - b).collect())
    }

    pub fn is_finite(&self) -> bool {
        all_finite(&self.coords)
    }
}

impl<T> From<Vec<T>> for MVector<T> {
    fn from(coords: Vec<T>) -> Self {
        Self { coords }
    }
}

/// Residuals of the reductive-decomposition checks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionCertificate<T> {
    /// Largest m-component of any `[h_i, h_j]`.
    pub subalgebra_residual: T,
    /// Largest h-component of any `[h_i, m_j]`.
    pub reductive_residual: T,
    pub tolerance: T,
    pub pass: bool,
}

/// A Lie algebra with representation and a basis-aligned split `g = h + m`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductiveSpace<T> {
    algebra: LieAlgebra<T>,
    rep: MatrixRep<T>,
    h_indices: Vec<usize>,
    m_indices: Vec<usize>,
    m_generators: Vec<Matrix<T>>,
}

impl<T: Scalar> ReductiveSpace<T> {
    /// Assembles the space after checking that the index sets partition the
    /// basis. Algebraic invariance is reported by
    /// [`Self::validate_decomposition`], not enforced here.
    pub fn new(
        algebra: LieAlgebra<T>,
        rep: MatrixRep<T>,
        h_indices: Vec<usize>,
        m_indices: Vec<usize>,
    ) -> Result<Self, ReductiveError> {
        check_partition(algebra.dim(), &h_indices, &m_indices)?;
        if rep.generators().len() != algebra.dim() {
            return Err(ReductiveError::DimensionMismatch {
                expected: algebra.dim(),
                found: rep.generators().len(),
            });
        }
        let m_generators = m_indices.iter().map(|&i| rep.generators()[i].clone()).collect();
        Ok(Self {
            algebra,
            rep,
            h_indices,
            m_indices,
            m_generators,
        })
    }

    pub fn algebra(&self) -> &LieAlgebra<T> {
        &self.algebra
    }

    pub fn rep(&self) -> &MatrixRep<T> {
        &self.rep
    }

    pub fn h_indices(&self) -> &[usize] {
        &self.h_indices
    }

    pub fn m_indices(&self) -> &[usize] {
        &self.m_indices
    }

    pub fn dim_h(&self) -> usize {
        self.h_indices.len()
    }

    pub fn dim_m(&self) -> usize {
        self.m_indices.len()
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    /// Residuals of `[h,h] ⊆ h` and `[h,m] ⊆ m`.
    pub fn validate_decomposition(&self) -> DecompositionCertificate<T> {
        let n = self.dim();
        let e = |i| AlgebraVector::<T>::basis(n, i);
        let mut sub = T::zero();
        let mut red = T::zero();
        for &i in &self.h_indices {
            for &j in &self.h_indices {
                let b = self.algebra.bracket(&e(i), &e(j)).expect("basis dims");
                sub = sub.max(
                    self.m_indices
                        .iter()
                        .fold(T::zero(), |acc, &k| acc.max(b.coords[k].abs())),
                );
            }
            for &j in &self.m_indices {
                let b = self.algebra.bracket(&e(i), &e(j)).expect("basis dims");
                red = red.max(
                    self.h_indices
                        .iter()
                        .fold(T::zero(), |acc, &k| acc.max(b.coords[k].abs())),
                );
            }
        }
        let tolerance = T::of(DECOMPOSITION_TOLERANCE);
        DecompositionCertificate {
            subalgebra_residual: sub,
            reductive_residual: red,
            tolerance,
            pass: sub <= tolerance && red <= tolerance,
        }
    }

    pub fn project_h(&self, x: &AlgebraVector<T>) -> AlgebraVector<T> {
        let mut out = AlgebraVector::zeros(x.dim());
        for &i in &self.h_indices {
            out.coords[i] = x.coords[i];
        }
        out
    }

    pub fn project_m(&self, x: &AlgebraVector<T>) -> AlgebraVector<T> {
        let mut out = AlgebraVector::zeros(x.dim());
        for &i in &self.m_indices {
            out.coords[i] = x.coords[i];
        }
        out
    }

    /// Embeds m-coordinates into g.
    pub fn embed_m(&self, y: &MVector<T>) -> AlgebraVector<T> {
        let mut out = AlgebraVector::zeros(self.dim());
        for (&i, &c) in self.m_indices.iter().zip(&y.coords) {
            out.coords[i] = c;
        }
        out
    }

    /// Embeds h-coordinates (ordered like `h_indices`) into g.
    pub fn embed_h(&self, v: &[T]) -> AlgebraVector<T> {
        let mut out = AlgebraVector::zeros(self.dim());
        for (&i, &c) in self.h_indices.iter().zip(v) {
            out.coords[i] = c;
        }
        out
    }

    /// m-coordinates of a g-vector (h-part dropped).
    pub fn m_coords(&self, x: &AlgebraVector<T>) -> MVector<T> {
        MVector::new(self.m_indices.iter().map(|&i| x.coords[i]).collect())
    }

    /// h-coordinates of a g-vector (m-part dropped).
    pub fn h_coords(&self, x: &AlgebraVector<T>) -> Vec<T> {
        self.h_indices.iter().map(|&i| x.coords[i]).collect()
    }

    /// `ρ(y)` for `y ∈ m`.
    pub fn rho_m(&self, y: &[T]) -> Matrix<T> {
        let n = self.rep.size();
        let mut m = Matrix::zeros(n, n);
        for (&c, g) in y.iter().zip(&self.m_generators) {
            if c != T::zero() {
                m.axpy(c, g);
            }
        }
        m
    }

    pub(crate) fn check_m(&self, y: &MVector<T>) -> Result<(), ReductiveError> {
        if y.dim() != self.dim_m() {
            return Err(ReductiveError::DimensionMismatch {
                expected: self.dim_m(),
                found: y.dim(),
            });
        }
        if !y.is_finite() {
            return Err(ReductiveError::NonFinite);
        }
        Ok(())
    }

    pub(crate) fn check_nonzero_m(&self, y: &MVector<T>) -> Result<(), ReductiveError> {
        self.check_m(y)?;
        if y.norm() == T::zero() {
            return Err(ReductiveError::ZeroVector);
        }
        Ok(())
    }

    /// `[x, y]` for `x ∈ g`, `y ∈ m`, returned in m-coordinates.
    pub fn bracket_into_m(&self, x: &AlgebraVector<T>, y: &MVector<T>) -> Result<MVector<T>, ReductiveError> {
        let b = self.algebra.bracket(x, &self.embed_m(y))?;
        Ok(self.m_coords(&b))
    }

    /// `{[e_i, y] : i ∈ h}` in m-coordinates; spans `[h, y]`.
    pub fn orbit_tangent_basis(&self, y: &MVector<T>) -> Result<Vec<MVector<T>>, ReductiveError> {
        self.check_nonzero_m(y)?;
        let n = self.dim();
        self.h_indices
            .iter()
            .map(|&i| self.bracket_into_m(&AlgebraVector::basis(n, i), y))
            .collect()
    }

    /// q × |h| matrix whose columns are the orbit tangent spanning set.
    pub(crate) fn orbit_tangent_matrix(&self, y: &MVector<T>) -> Result<Matrix<T>, ReductiveError> {
        let cols = self.orbit_tangent_basis(y)?;
        Ok(Matrix::from_fn(self.dim_m(), cols.len(), |r, c| cols[c].coords[r]))
    }

    /// Least-squares solve of `min_v ‖w − [v, y]‖` over `v ∈ h`.
    /// Returns the minimum-norm `v` in h-coordinates and the residual.
    pub fn solve_orbit_tangent(&self, y: &MVector<T>, w: &MVector<T>) -> Result<(Vec<T>, T), ReductiveError> {
        self.check_m(w)?;
        let a = self.orbit_tangent_matrix(y)?;
        let ls = lstsq(&a, &w.coords, T::of(RANK_TOLERANCE))?;
        Ok((ls.solution, ls.residual))
    }

    /// Euclidean distance from `w` to `[h, y]` in m-coordinates.
    pub fn tangency_residual(&self, y: &MVector<T>, w: &MVector<T>) -> Result<T, ReductiveError> {
        Ok(self.solve_orbit_tangent(y, w)?.1)
    }

    /// `Ad(exp(X))` restricted to m, for `X` given in h-coordinates.
    pub fn adjoint_on_m(&self, h_coords: &[T]) -> Result<Matrix<T>, ReductiveError> {
        if h_coords.len() != self.dim_h() {
            return Err(ReductiveError::DimensionMismatch {
                expected: self.dim_h(),
                found: h_coords.len(),
            });
        }
        let x = self.embed_h(h_coords);
        let full = matrix_exp(&self.algebra.ad_matrix(&x)?)?;
        Ok(Matrix::from_fn(self.dim_m(), self.dim_m(), |r, c| {
            full[(self.m_indices[r], self.m_indices[c])]
        }))
    }

    /// Whether the standard inner product on m-coordinates is `ad(h)`-invariant,
    /// i.e. every `ad(e_i)|_m`, `i ∈ h`, is skew-symmetric.
    pub fn m_inner_product_is_invariant(&self) -> bool {
        let n = self.dim();
        let tol = T::of(1e-12);
        self.h_indices.iter().all(|&i| {
            let ad = self.algebra.ad_matrix(&AlgebraVector::basis(n, i)).expect("basis dims");
            self.m_indices
                .iter()
                .all(|&r| self.m_indices.iter().all(|&c| (ad[(r, c)] + ad[(c, r)]).abs() <= tol))
        })
    }

    /// Representation and stabilizer residuals for this space.
    pub fn rep_residuals(&self) -> Result<(T, T), ReductiveError> {
        Ok((
            self.rep.representation_residual(&self.algebra)?,
            self.rep.stabilizer_residual(&self.h_indices)?,
        ))
    }
}

fn check_partition(n: usize, h: &[usize], m: &[usize]) -> Result<(), ReductiveError> {
    let mut seen = vec![false; n];
    for &i in h.iter().chain(m) {
        if i >= n {
            return Err(ReductiveError::InvalidDecomposition(format!(
                "basis index {} out of range for dimension {n}",
                i + 1
            )));
        }
        if seen[i] {
            return Err(ReductiveError::InvalidDecomposition(format!(
                "basis index {} assigned twice",
                i + 1
            )));
        }
        seen[i] = true;
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(ReductiveError::InvalidDecomposition(format!(
            "basis index {} belongs to neither h nor m",
            missing + 1
        )));
    }
    if m.is_empty() {
        return Err(ReductiveError::InvalidDecomposition("m must be nonempty".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::BasePoint;

    fn sphere() -> ReductiveSpace<f64> {
        ReductiveSpace::new(
            LieAlgebra::so3(),
            MatrixRep::so3_defining(BasePoint::Vector(vec![0., 0., 1.])),
            vec![2],
            vec![0, 1],
        )
        .unwrap()
    }

    fn mv(c: &[f64]) -> MVector<f64> {
        MVector::new(c.to_vec())
    }

    #[test]
    fn so3_splits_are_reductive() {
        let cert = sphere().validate_decomposition();
        assert!(cert.pass);
        assert_eq!(cert.subalgebra_residual, 0.0);
        assert_eq!(cert.reductive_residual, 0.0);

        let rep = MatrixRep::so3_defining(BasePoint::Vector(vec![1., 0., 0.]));
        let s = ReductiveSpace::new(LieAlgebra::so3(), rep.clone(), vec![0], vec![1, 2]).unwrap();
        assert!(s.validate_decomposition().pass);
        let s = ReductiveSpace::new(LieAlgebra::so3(), rep, vec![], vec![0, 1, 2]).unwrap();
        assert!(s.validate_decomposition().pass);
    }

    #[test]
    fn non_subalgebra_is_reported() {
        let rep = MatrixRep::so3_defining(BasePoint::Vector(vec![0., 0., 1.]));
        let s = ReductiveSpace::new(LieAlgebra::so3(), rep, vec![0, 1], vec![2]).unwrap();
        let cert = s.validate_decomposition();
        assert!(!cert.pass);
        assert_eq!(cert.subalgebra_residual, 1.0);
    }

    #[test]
    fn bad_index_sets_are_rejected() {
        let rep = MatrixRep::so3_defining(BasePoint::Vector(vec![0., 0., 1.]));
        for (h, m) in [(vec![2], vec![1, 2]), (vec![2], vec![0]), (vec![5], vec![0, 1])] {
            assert!(matches!(
                ReductiveSpace::new(LieAlgebra::so3(), rep.clone(), h, m),
                Err(ReductiveError::InvalidDecomposition(_))
            ));
        }
    }

    #[test]
    fn projections() {
        let s = sphere();
        let e3 = AlgebraVector::new(vec![0., 0., 1.]);
        assert_eq!(s.project_h(&e3), e3);
        assert_eq!(s.project_m(&e3), AlgebraVector::zeros(3));
        let x = AlgebraVector::new(vec![1., 0., 1.]);
        assert_eq!(s.project_m(&x), AlgebraVector::new(vec![1., 0., 0.]));
        let y = AlgebraVector::new(vec![0.3, -2.0, 7.0]);
        assert_eq!(s.project_h(&s.project_h(&y)), s.project_h(&y));
        assert_eq!(s.project_h(&y).add(&s.project_m(&y)), y);
    }

    #[test]
    fn orbit_tangents() {
        let s = sphere();
        assert_eq!(s.orbit_tangent_basis(&mv(&[1., 0.])).unwrap(), vec![mv(&[0., 1.])]);
        assert_eq!(s.orbit_tangent_basis(&mv(&[0., 2.])).unwrap(), vec![mv(&[-2., 0.])]);
        assert_eq!(s.orbit_tangent_basis(&mv(&[0., 0.])), Err(ReductiveError::ZeroVector));

        let rep = MatrixRep::so3_defining(BasePoint::Matrix(Matrix::identity(3)));
        let group = ReductiveSpace::new(LieAlgebra::so3(), rep, vec![], vec![0, 1, 2]).unwrap();
        assert!(group.orbit_tangent_basis(&mv(&[1., 0., 0.])).unwrap().is_empty());
        assert_eq!(
            group.tangency_residual(&mv(&[1., 0., 0.]), &mv(&[0., 0., 0.])).unwrap(),
            0.0
        );
    }

    #[test]
    fn tangency_residuals() {
        let s = sphere();
        let y = mv(&[1., 0.]);
        assert_eq!(s.tangency_residual(&y, &mv(&[0., 1.])).unwrap(), 0.0);
        assert_eq!(s.tangency_residual(&y, &mv(&[1., 0.])).unwrap(), 1.0);
        assert_eq!(s.tangency_residual(&y, &mv(&[0., 0.])).unwrap(), 0.0);
        // Residual is the distance to the span: (3, 4) against span{(0,1)} is 3.
        assert!((s.tangency_residual(&y, &mv(&[3., 4.])).unwrap() - 3.0).abs() < 1e-15);
    }

    #[test]
    fn adjoint_on_m_rotates_the_plane() {
        let s = sphere();
        let r = s.adjoint_on_m(&[std::f64::consts::FRAC_PI_2]).unwrap();
        let img = r.matvec(&[1., 0.]);
        assert!(img[0].abs() < 1e-15 && (img[1] - 1.0).abs() < 1e-15);
        assert!(s.m_inner_product_is_invariant());
    }
}
