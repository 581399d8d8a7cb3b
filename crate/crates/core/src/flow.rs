//! Geodesics of a homogeneous spray through the integral curves of `−η`.
//!
//! A geodesic `c(t)` with `c(0) = o` is recovered from the curve `y(t)` in m
//! solving `ẏ = −η(y)`: the lifted group curve `C(t)` solves the
//! left-invariant equation `Ċ = C ρ(y(t))`, `C(0) = I`, and `c(t) = C(t)·o`.

use std::io::{self, Write};

use rayon::prelude::*;
use serde::Serialize;

use crate::certificate::{Verdict, NOTE_SAMPLED};
use crate::lie::AlgebraVector;
use crate::linalg::{matrix_exp, Matrix};
use crate::local::guard_state;
use crate::ode::{integrate, time_grid, IntegrationError, DOMAIN_EXIT_NORM};
use crate::reductive::{MVector, ReductiveError, ReductiveSpace};
use crate::scalar::{dist2, norm2, Scalar};
use crate::spray::{SprayError, SprayField};

/// Pass threshold for the closed-form integral curve comparison.
pub const CLAIM_A_TOLERANCE: f64 = 1e-6;

/// Sampled integral curve of `−η`.
#[derive(Debug, Clone, PartialEq)]
pub struct EtaFlow<T> {
    pub times: Vec<T>,
    pub y: Vec<MVector<T>>,
}

/// Sampled geodesic: `y(t)`, the lifted group curve and the model points.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "T: Scalar + Serialize")]
pub struct Trajectory<T> {
    pub times: Vec<T>,
    pub y_samples: Vec<MVector<T>>,
    #[serde(serialize_with = "serialize_matrices")]
    pub group_samples: Vec<Matrix<T>>,
    pub point_samples: Vec<Vec<T>>,
}

fn serialize_matrices<T: Scalar + Serialize, S: serde::Serializer>(m: &[Matrix<T>], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(m.iter().map(|g| g.as_slice()))
}

fn invalid(e: impl ToString) -> IntegrationError {
    IntegrationError::InvalidInput(e.to_string())
}

fn grid<T: Scalar>(t0: T, t1: T, step: T) -> Result<Vec<T>, IntegrationError> {
    time_grid(t0, t1, step).ok_or_else(|| invalid("step must be positive and finite"))
}

/// `−η(y)` with slit-domain errors reported as domain exit.
fn minus_eta<T: Scalar>(field: &SprayField<T>, t: T, y: &[T]) -> Result<Vec<T>, IntegrationError> {
    match field.eval_eta(&MVector::new(y.to_vec())) {
        Ok(eta) => Ok(eta.coords.into_iter().map(|v| -v).collect()),
        Err(SprayError::Space(ReductiveError::ZeroVector)) => Err(IntegrationError::DomainExit {
            time: t.to_f64_lossy(),
            norm: 0.0,
            threshold: DOMAIN_EXIT_NORM,
        }),
        Err(e) => Err(IntegrationError::Eval {
            time: t.to_f64_lossy(),
            message: e.to_string(),
        }),
    }
}

fn check_initial<T: Scalar>(space: &ReductiveSpace<T>, y0: &MVector<T>) -> Result<(), IntegrationError> {
    space.check_nonzero_m(y0).map_err(invalid)?;
    if y0.norm() < T::of(DOMAIN_EXIT_NORM) {
        return Err(invalid("initial vector is below the domain-exit threshold"));
    }
    Ok(())
}

/// RK4 integration of `ẏ = −η(y)` from `y0` over `[t0, t1]`.
pub fn integrate_eta_flow<T: Scalar>(
    field: &SprayField<T>,
    y0: &MVector<T>,
    t0: T,
    t1: T,
    step: T,
) -> Result<EtaFlow<T>, IntegrationError> {
    check_initial(field.space(), y0)?;
    let times = grid(t0, t1, step)?;
    let states = integrate(
        &times,
        y0.coords.clone(),
        |t, y| minus_eta(field, t, y),
        |t, y| guard_state(t, y, y),
    )?;
    Ok(EtaFlow {
        times,
        y: states.into_iter().map(MVector::new).collect(),
    })
}

/// Cubic Lagrange interpolation of sampled `y` at `t` inside interval `k`
/// (linear when fewer than four samples exist).
fn interpolate<T: Scalar>(times: &[T], ys: &[MVector<T>], k: usize, t: T) -> Vec<T> {
    let n = times.len();
    let (lo, hi) = if n >= 4 {
        let lo = k.saturating_sub(1).min(n - 4);
        (lo, lo + 4)
    } else {
        (k, (k + 2).min(n))
    };
    let q = ys[0].dim();
    let mut out = vec![T::zero(); q];
    for j in lo..hi {
        let mut w = T::one();
        for m in lo..hi {
            if m != j {
                w *= (t - times[m]) / (times[j] - times[m]);
            }
        }
        for (o, &c) in out.iter_mut().zip(&ys[j].coords) {
            *o += w * c;
        }
    }
    out
}

/// Solves `Ċ = C ρ(y(t))`, `C(0) = I` by RK4 on the sample grid, reading
/// `y(t)` off the samples by piecewise cubic interpolation.
pub fn reconstruct_group_curve<T: Scalar>(
    space: &ReductiveSpace<T>,
    times: &[T],
    y_samples: &[MVector<T>],
) -> Result<Vec<Matrix<T>>, IntegrationError> {
    if times.is_empty() || times.len() != y_samples.len() {
        return Err(invalid(format!(
            "{} times but {} samples",
            times.len(),
            y_samples.len()
        )));
    }
    for y in y_samples {
        space.check_m(y).map_err(invalid)?;
    }
    let n = space.rep().size();
    let identity = Matrix::identity(n);
    let mut out = Vec::with_capacity(times.len());
    out.push(identity);
    for k in 0..times.len() - 1 {
        let (ta, tb) = (times[k], times[k + 1]);
        let h = tb - ta;
        let c = out.last().unwrap();
        let rho = |t: T| {
            let y = if t == ta {
                y_samples[k].coords.clone()
            } else if t == tb {
                y_samples[k + 1].coords.clone()
            } else {
                interpolate(times, y_samples, k, t)
            };
            space.rho_m(&y)
        };
        let f = |t: T, cm: &Matrix<T>| cm.matmul(&rho(t));
        let half = T::of(0.5);
        let k1 = f(ta, c);
        let mut s = c.clone();
        s.axpy(half * h, &k1);
        let k2 = f(ta + half * h, &s);
        let mut s = c.clone();
        s.axpy(half * h, &k2);
        let k3 = f(ta + half * h, &s);
        let mut s = c.clone();
        s.axpy(h, &k3);
        let k4 = f(tb, &s);
        let mut next = c.clone();
        let sixth = h / T::of(6.0);
        next.axpy(sixth, &k1);
        next.axpy(sixth * T::of(2.0), &k2);
        next.axpy(sixth * T::of(2.0), &k3);
        next.axpy(sixth, &k4);
        if !next.is_finite() {
            return Err(IntegrationError::BlowUp {
                time: tb.to_f64_lossy(),
                norm: f64::INFINITY,
            });
        }
        out.push(next);
    }
    Ok(out)
}

/// Geodesic through `o` with initial vector `y0`: integrates `−η` and the
/// group curve as one RK4 system so both share the same stages.
pub fn geodesic<T: Scalar>(
    field: &SprayField<T>,
    y0: &MVector<T>,
    t0: T,
    t1: T,
    step: T,
) -> Result<Trajectory<T>, IntegrationError> {
    let space = field.space();
    check_initial(space, y0)?;
    let times = grid(t0, t1, step)?;
    let q = space.dim_m();
    let n = space.rep().size();
    let mut state0 = y0.coords.clone();
    state0.extend_from_slice(Matrix::<T>::identity(n).as_slice());
    let states = integrate(
        &times,
        state0,
        |t, s| {
            let (y, c) = s.split_at(q);
            let mut out = minus_eta(field, t, y)?;
            let c = Matrix::from_row_major(n, n, c.to_vec()).expect("state layout");
            out.extend(c.matmul(&space.rho_m(y)).into_vec());
            Ok(out)
        },
        |t, s| guard_state(t, s, &s[..q]),
    )?;
    let mut y_samples = Vec::with_capacity(states.len());
    let mut group_samples = Vec::with_capacity(states.len());
    for s in states {
        let (y, c) = s.split_at(q);
        y_samples.push(MVector::new(y.to_vec()));
        group_samples.push(Matrix::from_row_major(n, n, c.to_vec()).expect("state layout"));
    }
    let point_samples = group_samples.iter().map(|g| space.rep().act(g)).collect();
    Ok(Trajectory {
        times,
        y_samples,
        group_samples,
        point_samples,
    })
}

/// [`geodesic`] for many initial vectors, evaluated in parallel.
pub fn geodesic_batch<T: Scalar>(
    field: &SprayField<T>,
    initial: &[MVector<T>],
    t0: T,
    t1: T,
    step: T,
) -> Vec<Result<Trajectory<T>, IntegrationError>> {
    initial.par_iter().map(|y0| geodesic(field, y0, t0, t1, step)).collect()
}

/// Closed-form homogeneous geodesic `c(t) = exp(t ρ(y0 − v))·o` for `v ∈ h`,
/// sampled at `times`. The recorded `y(t)` is `Ad(exp(−t v)) y0`.
pub fn homogeneous_geodesic<T: Scalar>(
    space: &ReductiveSpace<T>,
    y0: &MVector<T>,
    v: &AlgebraVector<T>,
    times: &[T],
) -> Result<Trajectory<T>, IntegrationError> {
    space.check_nonzero_m(y0).map_err(invalid)?;
    if v.dim() != space.dim() || !v.is_finite() {
        return Err(invalid("witness must be a finite vector of g"));
    }
    if space.project_m(v).coords.iter().any(|&c| c != T::zero()) {
        return Err(invalid("witness must lie in h"));
    }
    let u = space.embed_m(y0).sub(v);
    let rho_u = space.rep().rho(&u).map_err(invalid)?;
    let v_h = space.h_coords(v);
    let mut y_samples = Vec::with_capacity(times.len());
    let mut group_samples = Vec::with_capacity(times.len());
    for &t in times {
        let g = matrix_exp(&rho_u.scale(t)).map_err(invalid)?;
        let back: Vec<T> = v_h.iter().map(|&c| -t * c).collect();
        let ad = space.adjoint_on_m(&back).map_err(invalid)?;
        y_samples.push(MVector::new(ad.matvec(&y0.coords)));
        group_samples.push(g);
    }
    let point_samples = group_samples.iter().map(|g| space.rep().act(g)).collect();
    Ok(Trajectory {
        times: times.to_vec(),
        y_samples,
        group_samples,
        point_samples,
    })
}

/// Derivative weights of the Lagrange interpolant through `nodes`, at `x`.
fn lagrange_derivative_weights<T: Scalar>(nodes: &[T], x: T) -> Vec<T> {
    let k = nodes.len();
    (0..k)
        .map(|j| {
            let mut sum = T::zero();
            for l in 0..k {
                if l == j {
                    continue;
                }
                let mut prod = T::one() / (nodes[j] - nodes[l]);
                for m in 0..k {
                    if m != j && m != l {
                        prod *= (x - nodes[m]) / (nodes[j] - nodes[m]);
                    }
                }
                sum += prod;
            }
            sum
        })
        .collect()
}

/// Five-point (or fewer) finite-difference derivative of sampled data at
/// sample `i`.
fn sampled_derivative<T: Scalar>(times: &[T], values: &[&[T]], i: usize) -> Vec<T> {
    let n = times.len();
    let width = n.min(5);
    let lo = i.saturating_sub(width / 2).min(n - width);
    let nodes = &times[lo..lo + width];
    let w = lagrange_derivative_weights(nodes, times[i]);
    let len = values[0].len();
    let mut out = vec![T::zero(); len];
    for (j, &wj) in w.iter().enumerate() {
        for (o, &v) in out.iter_mut().zip(values[lo + j]) {
            *o += wj * v;
        }
    }
    out
}

impl<T: Scalar> Trajectory<T> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Max over samples of the h-component norm of `C⁻¹Ċ`, with `Ċ` from
    /// finite differences of the sampled group curve and least-squares
    /// coordinates in the generator basis. Zero when fewer than three
    /// samples exist.
    pub fn lifting_residual(&self, space: &ReductiveSpace<T>) -> Result<T, IntegrationError> {
        if self.len() < 3 {
            return Ok(T::zero());
        }
        let n = space.rep().size();
        let flat: Vec<&[T]> = self.group_samples.iter().map(Matrix::as_slice).collect();
        let mut worst = T::zero();
        for i in 0..self.len() {
            let d = Matrix::from_row_major(n, n, sampled_derivative(&self.times, &flat, i)).expect("layout");
            let log = self.group_samples[i].inverse().map_err(invalid)?.matmul(&d);
            let (coords, _) = space.rep().project_coordinates(&log).map_err(invalid)?;
            worst = worst.max(norm2(&space.h_coords(&coords)));
        }
        Ok(worst)
    }

    /// `ċ(0)` by finite differences of the sampled model points.
    pub fn initial_point_velocity(&self) -> Vec<T> {
        if self.len() < 2 {
            return vec![T::zero(); self.point_samples.first().map_or(0, Vec::len)];
        }
        let flat: Vec<&[T]> = self.point_samples.iter().map(Vec::as_slice).collect();
        sampled_derivative(&self.times, &flat, 0)
    }

    /// Max distance between the model points of two trajectories sampled at
    /// the same times.
    pub fn max_point_deviation(&self, other: &Self) -> T {
        self.point_samples
            .iter()
            .zip(&other.point_samples)
            .map(|(a, b)| dist2(a, b))
            .fold(T::zero(), T::max)
    }

    /// Max entrywise deviation between the group curves.
    pub fn max_group_deviation(&self, other: &Self) -> T {
        self.group_samples
            .iter()
            .zip(&other.group_samples)
            .map(|(a, b)| a.sub(b).max_abs())
            .fold(T::zero(), T::max)
    }

    /// CSV header: `t, y_1..y_q, c_1..c_{N²}, point_1..point_P`.
    pub fn csv_header(&self) -> Vec<String> {
        let q = self.y_samples.first().map_or(0, MVector::dim);
        let n2 = self.group_samples.first().map_or(0, |g| g.rows() * g.cols());
        let p = self.point_samples.first().map_or(0, Vec::len);
        std::iter::once("t".to_string())
            .chain((1..=q).map(|i| format!("y_{i}")))
            .chain((1..=n2).map(|i| format!("c_{i}")))
            .chain((1..=p).map(|i| format!("point_{i}")))
            .collect()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{}", self.csv_header().join(","))?;
        for k in 0..self.len() {
            let row: Vec<String> = std::iter::once(self.times[k])
                .chain(self.y_samples[k].coords.iter().copied())
                .chain(self.group_samples[k].as_slice().iter().copied())
                .chain(self.point_samples[k].iter().copied())
                .map(|v| v.to_string())
                .collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Comparison of the numerical integral curve of `−η` with the closed form
/// `Ad(exp(−t v)) y0`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClaimACertificate<T> {
    pub verdict: Verdict,
    pub y0: Vec<T>,
    /// Witness in h-coordinates.
    pub witness: Vec<T>,
    /// Distance from `η(y0)` to `[v, y0]`.
    pub witness_residual: T,
    pub tolerance: T,
    pub max_residual: T,
    pub notes: Vec<String>,
}

/// Checks that `y(t) = Ad(exp(−t v)) y0` is the integral curve of `−η`
/// through `y0`, sampled on the RK4 grid.
pub fn verify_claim_a<T: Scalar>(
    field: &SprayField<T>,
    y0: &MVector<T>,
    v: &AlgebraVector<T>,
    t0: T,
    t1: T,
    step: T,
) -> Result<ClaimACertificate<T>, IntegrationError> {
    let space = field.space();
    let reference = homogeneous_geodesic(space, y0, v, &grid(t0, t1, step)?)?;
    let flow = integrate_eta_flow(field, y0, t0, t1, step)?;
    let max_residual = flow
        .y
        .iter()
        .zip(&reference.y_samples)
        .map(|(a, b)| dist2(&a.coords, &b.coords))
        .fold(T::zero(), T::max);
    let eta0 = field.eval_eta(y0).map_err(invalid)?;
    let bracket = space.bracket_into_m(v, y0).map_err(invalid)?;
    let witness_residual = dist2(&eta0.coords, &bracket.coords);
    let tolerance = T::of(CLAIM_A_TOLERANCE);
    Ok(ClaimACertificate {
        verdict: if max_residual <= tolerance {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        y0: y0.coords.clone(),
        witness: space.h_coords(v),
        witness_residual,
        tolerance,
        max_residual,
        notes: vec![NOTE_SAMPLED.to_string()],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::{BasePoint, LieAlgebra, MatrixRep};
    use std::sync::Arc;

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

    #[test]
    fn zero_field_flow_is_constant() {
        let f = SprayField::zero(sphere());
        let flow = integrate_eta_flow(&f, &mv(&[0.6, -0.8]), 0.0, 1.0, 0.1).unwrap();
        assert!(flow.y.iter().all(|y| *y == mv(&[0.6, -0.8])));
    }

    #[test]
    fn tangential_flow_rotates_backwards() {
        let f = SprayField::bracket_form(sphere(), &["norm()"]).unwrap();
        let flow = integrate_eta_flow(&f, &mv(&[1., 0.]), 0.0, 2.0, 1e-3).unwrap();
        for (t, y) in flow.times.iter().zip(&flow.y) {
            assert!(dist2(&y.coords, &[t.cos(), -t.sin()]) < 1e-10);
        }
    }

    #[test]
    fn radial_flows_decay_or_blow_up() {
        let s = sphere();
        // ẏ = −‖y‖y: ‖y(t)‖ = 1/(1 + t).
        let decay = SprayField::components(s.clone(), &["norm()*y1", "norm()*y2"]).unwrap();
        let flow = integrate_eta_flow(&decay, &mv(&[1., 0.]), 0.0, 2.0, 1e-3).unwrap();
        for (t, y) in flow.times.iter().zip(&flow.y) {
            assert!((y.norm() - 1.0 / (1.0 + t)).abs() < 1e-10);
        }
        // ẏ = ‖y‖y: ‖y(t)‖ = 1/(1 − t), blows up at t = 1.
        let grow = SprayField::components(s, &["-norm()*y1", "-norm()*y2"]).unwrap();
        match integrate_eta_flow(&grow, &mv(&[1., 0.]), 0.0, 2.0, 1e-3) {
            Err(IntegrationError::BlowUp { time, .. }) => assert!((0.99..1.05).contains(&time), "{time}"),
            other => panic!("expected blow-up, got {other:?}"),
        }
    }

    #[test]
    fn zero_initial_vector_is_rejected() {
        let f = SprayField::zero(sphere());
        assert!(matches!(
            integrate_eta_flow(&f, &mv(&[0., 0.]), 0.0, 1.0, 0.1),
            Err(IntegrationError::InvalidInput(_))
        ));
        assert!(matches!(
            integrate_eta_flow(&f, &mv(&[1., 0.]), 0.0, 1.0, 0.0),
            Err(IntegrationError::InvalidInput(_))
        ));
    }

    #[test]
    fn constant_y_reconstructs_one_parameter_subgroup() {
        let s = sphere();
        let y0 = mv(&[0.3, -1.1]);
        let times = time_grid(0.0, 2.0, 1e-2).unwrap();
        let ys = vec![y0.clone(); times.len()];
        let cs = reconstruct_group_curve(&s, &times, &ys).unwrap();
        for (t, c) in times.iter().zip(&cs) {
            let exact = matrix_exp(&s.rho_m(&y0.coords).scale(*t)).unwrap();
            assert!(c.sub(&exact).max_abs() < 1e-8);
        }
        let single = reconstruct_group_curve(&s, &[0.0], &[y0]).unwrap();
        assert_eq!(single, vec![Matrix::identity(3)]);
    }

    #[test]
    fn lifted_curve_factors_through_the_witness() {
        // For the tangential field the lift is exp(t(y0 − v)) exp(t v).
        let s = sphere();
        let f = SprayField::bracket_form(s.clone(), &["norm()"]).unwrap();
        let y0 = mv(&[1., 0.]);
        let flow = integrate_eta_flow(&f, &y0, 0.0, 2.0, 1e-3).unwrap();
        let cs = reconstruct_group_curve(&s, &flow.times, &flow.y).unwrap();
        let u = AlgebraVector::new(vec![1., 0., -1.]);
        let v = AlgebraVector::new(vec![0., 0., 1.]);
        for (t, c) in flow.times.iter().zip(&cs) {
            let exact = s
                .rep()
                .exp(&u.scaled(*t))
                .unwrap()
                .matmul(&s.rep().exp(&v.scaled(*t)).unwrap());
            assert!(c.sub(&exact).max_abs() < 1e-6);
        }
    }

    #[test]
    fn geodesic_on_sphere_is_great_circle() {
        let s = sphere();
        let f = SprayField::zero(s.clone());
        let tr = geodesic(&f, &mv(&[1., 0.]), 0.0, 2.0 * std::f64::consts::PI, 1e-3).unwrap();
        for (t, p) in tr.times.iter().zip(&tr.point_samples) {
            assert!(dist2(p, &[0.0, -t.sin(), t.cos()]) < 1e-9);
            assert!((norm2(p) - 1.0).abs() < 1e-9);
        }
        assert_eq!(tr.group_samples[0], Matrix::identity(3));
        let v0 = tr.initial_point_velocity();
        let expect = s.rep().tangent_at_base(&s.embed_m(&mv(&[1., 0.]))).unwrap();
        assert!(dist2(&v0, &expect) < 1e-8);
        assert!(tr.lifting_residual(&s).unwrap() < 1e-6);
    }

    #[test]
    fn geodesic_matches_homogeneous_geodesic() {
        let s = sphere();
        let f = SprayField::bracket_form(s.clone(), &["norm()"]).unwrap();
        let y0 = mv(&[1., 0.]);
        let tr = geodesic(&f, &y0, 0.0, 2.0, 1e-3).unwrap();
        let hg = homogeneous_geodesic(&s, &y0, &AlgebraVector::new(vec![0., 0., 1.]), &tr.times).unwrap();
        assert!(tr.max_point_deviation(&hg) < 1e-6);
        assert_eq!(hg.point_samples[0], vec![0., 0., 1.]);
        assert!(tr.lifting_residual(&s).unwrap() < 1e-6);
        // Wrong witness: the closed form is no longer a geodesic.
        let bad = homogeneous_geodesic(&s, &y0, &AlgebraVector::new(vec![0., 0., 2.]), &tr.times).unwrap();
        assert!(tr.max_point_deviation(&bad) > 0.1);
        assert!(homogeneous_geodesic(&s, &y0, &AlgebraVector::new(vec![1., 0., 0.]), &tr.times).is_err());
    }

    #[test]
    fn even_field_reverses_geodesics() {
        let s = sphere();
        let f = SprayField::zero(s);
        let y0 = mv(&[0.6, 0.8]);
        let fwd = geodesic(&f, &y0, 0.0, -1.0, 1e-2).unwrap();
        let rev = geodesic(&f, &y0.neg(), 0.0, 1.0, 1e-2).unwrap();
        assert!(fwd.max_point_deviation(&rev) < 1e-12);
    }

    #[test]
    fn claim_a() {
        let s = sphere();
        let zero = SprayField::zero(s.clone());
        let c = verify_claim_a(&zero, &mv(&[1., 0.]), &AlgebraVector::zeros(3), 0.0, 1.0, 1e-2).unwrap();
        assert_eq!((c.verdict, c.max_residual), (Verdict::Pass, 0.0));
        let f = SprayField::bracket_form(s, &["norm()"]).unwrap();
        let c = verify_claim_a(
            &f,
            &mv(&[1., 0.]),
            &AlgebraVector::new(vec![0., 0., 1.]),
            0.0,
            2.0,
            1e-3,
        )
        .unwrap();
        assert!(c.verdict.is_pass());
        let c = verify_claim_a(
            &f,
            &mv(&[1., 0.]),
            &AlgebraVector::new(vec![0., 0., 2.]),
            0.0,
            2.0,
            1e-3,
        )
        .unwrap();
        assert_eq!(c.verdict, Verdict::Fail);
        assert!(c.max_residual > 0.5);
    }

    #[test]
    fn csv_layout() {
        let s = sphere();
        let f = SprayField::zero(s);
        let tr = geodesic(&f, &mv(&[1., 0.]), 0.0, 0.2, 0.1).unwrap();
        let mut buf = Vec::new();
        tr.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "t,y_1,y_2,c_1,c_2,c_3,c_4,c_5,c_6,c_7,c_8,c_9,point_1,point_2,point_3"
        );
        assert_eq!(lines.next().unwrap(), "0,1,0,1,0,0,0,1,0,0,0,1,0,0,1");
        assert_eq!(text.lines().count(), 4);
    }

    #[test]
    fn batch_matches_single_runs() {
        let s = sphere();
        let f = SprayField::bracket_form(s, &["norm()"]).unwrap();
        let inits = vec![mv(&[1., 0.]), mv(&[0., 2.]), mv(&[-0.5, 0.5])];
        let batch = geodesic_batch(&f, &inits, 0.0, 1.0, 1e-2);
        for (y0, tr) in inits.iter().zip(batch) {
            assert_eq!(tr.unwrap(), geodesic(&f, y0, 0.0, 1.0, 1e-2).unwrap());
        }
    }
}
