//! Spray vector fields `η: m∖{0} → m` and sampled checks of the structure
//! they must carry: positive 2-homogeneity, Ad(H)-equivariance, evenness.

use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::certificate::{PropertyCertificate, SampleRecord, NOTE_SAMPLED, NOTE_SMOOTHNESS};
use crate::expr::{parse, EvalError, Expr, ParseError};
use crate::reductive::{MVector, ReductiveError, ReductiveSpace};
use crate::sampling::{rng, uniform_box, unit_sphere, unit_sphere_samples};
use crate::scalar::{dist2, Scalar};

pub const HOMOGENEITY_TOLERANCE: f64 = 1e-9;
pub const EQUIVARIANCE_TOLERANCE: f64 = 1e-8;
pub const EVENNESS_TOLERANCE: f64 = 1e-10;
/// Scales used by homogeneity checks unless overridden.
pub const DEFAULT_LAMBDAS: [f64; 3] = [0.5, 2.0, 10.0];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SprayError {
    #[error("invalid spray field: {0}")]
    Invalid(String),
    #[error("cannot parse expression {index}: {source}")]
    Parse { index: usize, source: ParseError },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Space(#[from] ReductiveError),
}

#[derive(Debug, Clone, PartialEq)]
pub enum FieldKind {
    /// `η ≡ 0`.
    Zero,
    /// `η(y) = [Σ b_i(y) e_i, y]` with one coefficient per h-basis vector.
    BracketForm(Vec<Expr>),
    /// One expression per m-coordinate.
    Components(Vec<Expr>),
}

#[derive(Debug, Clone)]
pub struct SprayField<T> {
    space: Arc<ReductiveSpace<T>>,
    kind: FieldKind,
}

impl<T: Scalar> SprayField<T> {
    pub fn new(space: Arc<ReductiveSpace<T>>, kind: FieldKind) -> Result<Self, SprayError> {
        match &kind {
            FieldKind::Zero => {}
            FieldKind::BracketForm(b) if b.len() != space.dim_h() => {
                return Err(SprayError::Invalid(format!(
                    "bracket_form needs {} coefficients (one per h-basis vector), got {}",
                    space.dim_h(),
                    b.len()
                )))
            }
            FieldKind::Components(c) if c.len() != space.dim_m() => {
                return Err(SprayError::Invalid(format!(
                    "components needs {} expressions (one per m-coordinate), got {}",
                    space.dim_m(),
                    c.len()
                )))
            }
            _ => {}
        }
        Ok(Self { space, kind })
    }

    pub fn zero(space: Arc<ReductiveSpace<T>>) -> Self {
        Self {
            space,
            kind: FieldKind::Zero,
        }
    }

    /// Parses `coefficients` (one per h-basis vector) over `y1..yq`.
    pub fn bracket_form(space: Arc<ReductiveSpace<T>>, coefficients: &[&str]) -> Result<Self, SprayError> {
        let q = space.dim_m();
        let exprs = parse_all(coefficients, q)?;
        Self::new(space, FieldKind::BracketForm(exprs))
    }

    /// Parses `components` (one per m-coordinate) over `y1..yq`.
    pub fn components(space: Arc<ReductiveSpace<T>>, components: &[&str]) -> Result<Self, SprayError> {
        let q = space.dim_m();
        let exprs = parse_all(components, q)?;
        Self::new(space, FieldKind::Components(exprs))
    }

    pub fn space(&self) -> &ReductiveSpace<T> {
        &self.space
    }

    pub fn space_arc(&self) -> &Arc<ReductiveSpace<T>> {
        &self.space
    }

    pub fn kind(&self) -> &FieldKind {
        &self.kind
    }

    pub fn is_zero(&self) -> bool {
        self.kind == FieldKind::Zero
    }

    /// `η(y)` for `y ≠ 0`.
    pub fn eval_eta(&self, y: &MVector<T>) -> Result<MVector<T>, SprayError> {
        self.space.check_nonzero_m(y)?;
        match &self.kind {
            FieldKind::Zero => Ok(MVector::zeros(self.space.dim_m())),
            FieldKind::BracketForm(coeffs) => {
                let b = coeffs
                    .iter()
                    .map(|e| e.eval(&y.coords))
                    .collect::<Result<Vec<T>, _>>()?;
                Ok(self.space.bracket_into_m(&self.space.embed_h(&b), y)?)
            }
            FieldKind::Components(comps) => {
                Ok(MVector::new(comps.iter().map(|e| e.eval(&y.coords)).collect::<Result<
                    Vec<T>,
                    _,
                >>(
                )?))
            }
        }
    }

    fn notes(&self) -> Vec<String> {
        let mut notes = vec![NOTE_SAMPLED.to_string()];
        if !self.is_zero() {
            notes.push(NOTE_SMOOTHNESS.to_string());
        }
        notes
    }

    /// Max over unit samples `y` and scales `λ` of `‖η(λy) − λ²η(y)‖ / λ²`.
    pub fn check_homogeneity(&self, samples: usize, lambdas: &[T], seed: u64) -> PropertyCertificate<T> {
        let ys = unit_sphere_samples::<T>(seed, self.space.dim_m(), samples);
        let records = ys
            .into_par_iter()
            .map(|y| {
                let yv = MVector::new(y.clone());
                let run = || -> Result<T, SprayError> {
                    let base = self.eval_eta(&yv)?;
                    let mut worst = T::zero();
                    for &l in lambdas {
                        let scaled = self.eval_eta(&yv.scaled(l))?;
                        let l2 = l * l;
                        worst = worst.max(dist2(&scaled.coords, &base.scaled(l2).coords) / l2);
                    }
                    Ok(worst)
                };
                match run() {
                    Ok(r) => SampleRecord::ok(y, r),
                    Err(e) => SampleRecord::failed(y, e.to_string()),
                }
            })
            .collect();
        PropertyCertificate::from_records("homogeneity", seed, T::of(HOMOGENEITY_TOLERANCE), records, self.notes())
    }

    /// Max over unit samples `y` and sampled `g = exp(Σ t_i e_i)`,
    /// `t ∈ [−π, π]^|h|`, of `‖η(Ad(g)y) − Ad(g)η(y)‖`. Vacuous when h = 0.
    pub fn check_equivariance(&self, samples: usize, group_samples: usize, seed: u64) -> PropertyCertificate<T> {
        let q = self.space.dim_m();
        let k = self.space.dim_h();
        let mut r = rng(seed);
        let mut draws = Vec::with_capacity(samples);
        for _ in 0..samples {
            let y: Vec<T> = unit_sphere(&mut r, q);
            let gs: Vec<Vec<T>> = (0..group_samples)
                .map(|_| uniform_box(&mut r, k, std::f64::consts::PI))
                .collect();
            draws.push((y, gs));
        }
        let mut notes = self.notes();
        if k == 0 {
            notes.push("h is trivial: equivariance holds vacuously".to_string());
        }
        let records = draws
            .into_par_iter()
            .map(|(y, gs)| {
                let yv = MVector::new(y.clone());
                let mut worst_g = None;
                let run = |worst_g: &mut Option<Vec<T>>| -> Result<T, SprayError> {
                    if k == 0 {
                        return Ok(T::zero());
                    }
                    let eta = self.eval_eta(&yv)?;
                    let mut worst = T::zero();
                    for g in &gs {
                        let ad = self.space.adjoint_on_m(g)?;
                        let lhs = self.eval_eta(&MVector::new(ad.matvec(&yv.coords)))?;
                        let rhs = ad.matvec(&eta.coords);
                        let d = dist2(&lhs.coords, &rhs);
                        if d >= worst {
                            worst = d;
                            *worst_g = Some(g.clone());
                        }
                    }
                    Ok(worst)
                };
                match run(&mut worst_g) {
                    Ok(res) => SampleRecord {
                        y,
                        residual: Some(res),
                        g: worst_g,
                        error: None,
                    },
                    Err(e) => SampleRecord::failed(y, e.to_string()),
                }
            })
            .collect();
        PropertyCertificate::from_records("equivariance", seed, T::of(EQUIVARIANCE_TOLERANCE), records, notes)
    }

    /// Max over unit samples of `‖η(y) − η(−y)‖`.
    pub fn check_evenness(&self, samples: usize, seed: u64) -> PropertyCertificate<T> {
        let ys = unit_sphere_samples::<T>(seed, self.space.dim_m(), samples);
        let records = ys
            .into_par_iter()
            .map(|y| {
                let yv = MVector::new(y.clone());
                let run = || -> Result<T, SprayError> {
                    let a = self.eval_eta(&yv)?;
                    let b = self.eval_eta(&yv.neg())?;
                    Ok(dist2(&a.coords, &b.coords))
                };
                match run() {
                    Ok(r) => SampleRecord::ok(y, r),
                    Err(e) => SampleRecord::failed(y, e.to_string()),
                }
            })
            .collect();
        PropertyCertificate::from_records("evenness", seed, T::of(EVENNESS_TOLERANCE), records, self.notes())
    }
}

fn parse_all(srcs: &[&str], q: usize) -> Result<Vec<Expr>, SprayError> {
    srcs.iter()
        .enumerate()
        .map(|(index, s)| parse(s, q).map_err(|source| SprayError::Parse { index, source }))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certificate::Verdict;
    use crate::lie::{BasePoint, LieAlgebra, MatrixRep};
    use crate::sampling::DEFAULT_SEED;

    fn sphere() -> Arc<ReductiveSpace<f64>> {
        Arc::new(
            ReductiveSpace::new(
                LieAlgebra::so3(),
                MatrixRep::so3_defining(BasePoint::Vector(vec![0., 0., 1.])),
                vec![2],
                vec![0, 1],
            )
            .unwrap(),
        )
    }

    fn mv(c: &[f64]) -> MVector<f64> {
        MVector::new(c.to_vec())
    }

    fn lambdas() -> Vec<f64> {
        DEFAULT_LAMBDAS.to_vec()
    }

    #[test]
    fn evaluation_of_each_kind() {
        let s = sphere();
        let zero = SprayField::zero(s.clone());
        assert_eq!(zero.eval_eta(&mv(&[0.3, 2.0])).unwrap(), mv(&[0., 0.]));
        let tangential = SprayField::bracket_form(s.clone(), &["norm()"]).unwrap();
        assert_eq!(tangential.eval_eta(&mv(&[1., 0.])).unwrap(), mv(&[0., 1.]));
        let radial = SprayField::components(s.clone(), &["norm()*y1", "norm()*y2"]).unwrap();
        assert_eq!(radial.eval_eta(&mv(&[0., 2.])).unwrap(), mv(&[0., 4.]));
        assert!(matches!(
            radial.eval_eta(&mv(&[0., 0.])),
            Err(SprayError::Space(ReductiveError::ZeroVector))
        ));
        let singular = SprayField::components(s, &["1/y1", "0"]).unwrap();
        assert!(matches!(singular.eval_eta(&mv(&[0., 1.])), Err(SprayError::Eval(_))));
    }

    #[test]
    fn expression_counts_are_checked() {
        let s = sphere();
        assert!(matches!(
            SprayField::components(s.clone(), &["y1"]),
            Err(SprayError::Invalid(_))
        ));
        assert!(matches!(
            SprayField::bracket_form(s.clone(), &["1", "2"]),
            Err(SprayError::Invalid(_))
        ));
        assert!(matches!(
            SprayField::components(s, &["y1", "y3"]),
            Err(SprayError::Parse { index: 1, .. })
        ));
    }

    #[test]
    fn homogeneity() {
        let s = sphere();
        let c = SprayField::zero(s.clone()).check_homogeneity(20, &lambdas(), DEFAULT_SEED);
        assert_eq!((c.verdict, c.max_residual), (Verdict::Pass, 0.0));
        let radial = SprayField::components(s.clone(), &["norm()*y1", "norm()*y2"]).unwrap();
        assert!(radial.check_homogeneity(50, &lambdas(), DEFAULT_SEED).verdict.is_pass());
        // Degree-1 field at λ = 2: ‖2y − 4y‖/4 = 1/2 on unit samples.
        let linear = SprayField::components(s, &["y1", "y2"]).unwrap();
        let c = linear.check_homogeneity(50, &[2.0], DEFAULT_SEED);
        assert_eq!(c.verdict, Verdict::Fail);
        assert!((c.max_residual - 0.5).abs() < 1e-15);
        // λ = 1 is trivially exact.
        let c = linear.check_homogeneity(10, &[1.0], DEFAULT_SEED);
        assert_eq!(c.max_residual, 0.0);
    }

    #[test]
    fn homogeneity_is_inconclusive_on_eval_failure() {
        let s = sphere();
        let f = SprayField::components(s, &["sqrt(y1)*norm()", "0"]).unwrap();
        let c = f.check_homogeneity(20, &lambdas(), DEFAULT_SEED);
        assert_eq!(c.verdict, Verdict::Inconclusive);
        assert!(c.samples.iter().any(|s| s.error.is_some()));
    }

    #[test]
    fn equivariance() {
        let s = sphere();
        assert!(SprayField::zero(s.clone())
            .check_equivariance(20, 4, DEFAULT_SEED)
            .verdict
            .is_pass());
        let radial = SprayField::components(s.clone(), &["norm()*y1", "norm()*y2"]).unwrap();
        assert!(radial.check_equivariance(50, 4, DEFAULT_SEED).verdict.is_pass());
        let tangential = SprayField::bracket_form(s.clone(), &["norm()"]).unwrap();
        assert!(tangential.check_equivariance(50, 4, DEFAULT_SEED).verdict.is_pass());
        let skewed = SprayField::components(s.clone(), &["y1^2/norm()", "0"]).unwrap();
        assert_eq!(skewed.check_equivariance(50, 4, DEFAULT_SEED).verdict, Verdict::Fail);
    }

    #[test]
    fn skewed_field_breaks_equivariance_at_quarter_turn() {
        // η(y) = (y1²/‖y‖, 0), y = (1,0), g = rotation by π/2:
        // η(Ad(g)y) = η(0,1) = 0 but Ad(g)η(y) = (0,1).
        let s = sphere();
        let skewed = SprayField::components(s.clone(), &["y1^2/norm()", "0"]).unwrap();
        let ad = s.adjoint_on_m(&[std::f64::consts::FRAC_PI_2]).unwrap();
        let y = mv(&[1., 0.]);
        let lhs = skewed.eval_eta(&MVector::new(ad.matvec(&y.coords))).unwrap();
        let rhs = ad.matvec(&skewed.eval_eta(&y).unwrap().coords);
        assert!((dist2(&lhs.coords, &rhs) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn evenness() {
        let s = sphere();
        assert!(SprayField::zero(s.clone())
            .check_evenness(10, DEFAULT_SEED)
            .verdict
            .is_pass());
        let radial = SprayField::components(s.clone(), &["norm()*y1", "norm()*y2"]).unwrap();
        let c = radial.check_evenness(50, DEFAULT_SEED);
        assert_eq!(c.verdict, Verdict::Fail);
        assert!((c.max_residual - 2.0).abs() < 1e-12);
        let squares = SprayField::components(s, &["y2^2", "y1^2"]).unwrap();
        assert!(squares.check_evenness(50, DEFAULT_SEED).verdict.is_pass());
    }

    #[test]
    fn bracket_form_fields_are_tangent_to_orbits() {
        let s = sphere();
        let f = SprayField::bracket_form(s.clone(), &["y1^2 + 3*norm()*y2"]).unwrap();
        for y in unit_sphere_samples::<f64>(3, 2, 50) {
            let y = MVector::new(y);
            let eta = f.eval_eta(&y).unwrap();
            assert!(s.tangency_residual(&y, &eta).unwrap() <= 1e-12);
        }
    }

    #[test]
    fn checks_are_deterministic() {
        let s = sphere();
        let f = SprayField::components(s, &["norm()*y1", "norm()*y2"]).unwrap();
        assert_eq!(f.check_equivariance(30, 3, 9), f.check_equivariance(30, 3, 9));
    }
}
