//! Sampled decisions for the geodesic-orbit and weak-symmetry properties.
//!
//! * g.o.: every geodesic through `o` is homogeneous iff `η(y) ∈ [h, y]` for
//!   all `y ≠ 0`. [`go_witness`] solves for the `v ∈ h` with `η(y) = [v, y]`.
//! * weak symmetry: some `g ∈ H` with `Ad(g)y = −y` for every `y`, together
//!   with evenness of `η`. [`ws_search`] looks for `g` by local search over
//!   exponential coordinates of the identity component of `H`.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::certificate::{PropertyCertificate, Verdict, NOTE_SAMPLED};
use crate::flow::integrate_eta_flow;
use crate::linalg::{lstsq, Matrix, RANK_TOLERANCE};
use crate::ode::IntegrationError;
use crate::reductive::{MVector, ReductiveError, ReductiveSpace};
use crate::sampling::{rng, uniform_box, unit_sphere_samples};
use crate::scalar::{norm2, Scalar};
use crate::spray::{SprayError, SprayField};

/// Residuals at or below this count as evidence.
pub const PASS_THRESHOLD: f64 = 1e-8;
/// A residual at or above this refutes the property at that sample.
pub const FAIL_THRESHOLD: f64 = 1e-3;
/// Pass threshold for tangency along an integral curve.
pub const FLOW_TANGENCY_TOLERANCE: f64 = 1e-6;
pub const DEFAULT_SAMPLES: usize = 64;
pub const DEFAULT_RESTARTS: usize = 16;
pub const DEFAULT_ITERATIONS: usize = 100;

pub const NOTE_IDENTITY_COMPONENT: &str =
    "H is searched through exponential coordinates of its identity component only; other components are not explored";
pub const NOTE_WS_EVENNESS: &str =
    "reversed geodesics need not be geodesics when eta is not even, so the algebraic condition alone is not reported as weak symmetry; evidence requires both";
pub const NOTE_WS_POINTWISE: &str =
    "the condition is checked for the initial vector only; a single g reversing the whole geodesic is not verified separately";
pub const NOTE_WS_ALL_FAIL: &str = "algebraic condition fails at all samples";
pub const NOTE_WS_SEARCH: &str = "a failed search is not a proof that no g exists";

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error("{0}")]
    InvalidInput(String),
    #[error(transparent)]
    Space(#[from] ReductiveError),
    #[error(transparent)]
    Field(#[from] SprayError),
    #[error(transparent)]
    Flow(#[from] IntegrationError),
    #[error("precondition not met: weak-symmetry check returned {verdict:?}: {reason}")]
    Precondition { verdict: WsVerdict, reason: String },
}

/// Least-norm `v ∈ h` (h-coordinates) minimizing `‖η(y) − [v, y]‖`, and that
/// residual.
pub fn go_witness<T: Scalar>(field: &SprayField<T>, y: &MVector<T>) -> Result<(Vec<T>, T), ClassifyError> {
    let space = field.space();
    space.check_nonzero_m(y)?;
    let eta = field.eval_eta(y)?;
    Ok(space.solve_orbit_tangent(y, &eta)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GoVerdict {
    GoEvidence,
    NotGo,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GoSample<T> {
    pub y: Vec<T>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<T>,
    /// Witness in h-coordinates.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<T>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GoCertificate<T> {
    pub verdict: GoVerdict,
    pub seed: u64,
    pub tolerance: T,
    pub fail_threshold: T,
    pub max_residual: T,
    pub samples: Vec<GoSample<T>>,
    pub notes: Vec<String>,
}

/// [`check_go_at`] on seeded unit-sphere samples.
pub fn check_go<T: Scalar>(
    field: &SprayField<T>,
    samples: usize,
    seed: u64,
) -> Result<GoCertificate<T>, ClassifyError> {
    let ys = sphere_samples(field, samples, seed)?;
    check_go_at(field, &ys, seed)
}

/// Runs [`go_witness`] at each given vector.
pub fn check_go_at<T: Scalar>(
    field: &SprayField<T>,
    ys: &[MVector<T>],
    seed: u64,
) -> Result<GoCertificate<T>, ClassifyError> {
    if ys.is_empty() {
        return Err(ClassifyError::InvalidInput("at least one sample is required".into()));
    }
    let samples: Vec<GoSample<T>> = ys
        .par_iter()
        .map(|y| match go_witness(field, y) {
            Ok((v, r)) => GoSample {
                y: y.coords.clone(),
                residual: Some(r),
                witness: Some(v),
                error: None,
            },
            Err(e) => GoSample {
                y: y.coords.clone(),
                residual: None,
                witness: None,
                error: Some(e.to_string()),
            },
        })
        .collect();
    let max_residual = samples.iter().filter_map(|s| s.residual).fold(T::zero(), T::max);
    let (pass, fail) = (T::of(PASS_THRESHOLD), T::of(FAIL_THRESHOLD));
    let verdict = if samples.iter().any(|s| s.residual.is_some_and(|r| r >= fail)) {
        GoVerdict::NotGo
    } else if samples.iter().all(|s| s.residual.is_some_and(|r| r <= pass)) {
        GoVerdict::GoEvidence
    } else {
        GoVerdict::Inconclusive
    };
    let mut notes = vec![NOTE_SAMPLED.to_string()];
    if !field.is_zero() {
        notes.push(crate::certificate::NOTE_SMOOTHNESS.to_string());
    }
    Ok(GoCertificate {
        verdict,
        seed,
        tolerance: pass,
        fail_threshold: fail,
        max_residual,
        samples,
        notes,
    })
}

fn sphere_samples<T: Scalar>(
    field: &SprayField<T>,
    samples: usize,
    seed: u64,
) -> Result<Vec<MVector<T>>, ClassifyError> {
    if samples == 0 {
        return Err(ClassifyError::InvalidInput("at least one sample is required".into()));
    }
    Ok(unit_sphere_samples(seed, field.space().dim_m(), samples)
        .into_iter()
        .map(MVector::new)
        .collect())
}

/// Outcome of [`ws_search`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WsSearch<T> {
    /// Best group element found, as h-exponential coordinates.
    pub g: Vec<T>,
    /// `‖Ad(g)y + y‖` at `g`.
    pub value: T,
}

/// Minimizes `‖Ad(exp Σ tᵢeᵢ) y + y‖²` over `t ∈ R^|h|` by Gauss–Newton with
/// finite-difference Jacobians and backtracking, from `restarts` seeded
/// starting points in `[−π, π]^|h|`.
pub fn ws_search<T: Scalar>(
    space: &ReductiveSpace<T>,
    y: &MVector<T>,
    restarts: usize,
    iters: usize,
    seed: u64,
) -> Result<WsSearch<T>, ClassifyError> {
    space.check_nonzero_m(y)?;
    let k = space.dim_h();
    let residual = |t: &[T]| -> Result<Vec<T>, ClassifyError> {
        let ad = space.adjoint_on_m(t)?;
        Ok(ad
            .matvec(&y.coords)
            .iter()
            .zip(&y.coords)
            .map(|(&a, &b)| a + b)
            .collect())
    };
    let phi = |r: &[T]| r.iter().fold(T::zero(), |s, &x| s + x * x);
    if k == 0 {
        return Ok(WsSearch {
            g: Vec::new(),
            value: norm2(&residual(&[])?),
        });
    }
    let target = T::of(PASS_THRESHOLD * 1e-2) * y.norm();
    let target = target * target;
    let fd = T::epsilon().cbrt();
    let mut rng = rng(seed);
    let mut best: Option<(Vec<T>, T)> = None;
    for _ in 0..restarts.max(1) {
        let mut t: Vec<T> = uniform_box(&mut rng, k, std::f64::consts::PI);
        let mut r = residual(&t)?;
        let mut f = phi(&r);
        for _ in 0..iters {
            if f <= target {
                break;
            }
            let mut jac = Matrix::zeros(r.len(), k);
            for j in 0..k {
                let mut tp = t.clone();
                let mut tm = t.clone();
                tp[j] += fd;
                tm[j] -= fd;
                let (rp, rm) = (residual(&tp)?, residual(&tm)?);
                for i in 0..r.len() {
                    jac[(i, j)] = (rp[i] - rm[i]) / (fd + fd);
                }
            }
            let rhs: Vec<T> = r.iter().map(|&x| -x).collect();
            let Ok(step) = lstsq(&jac, &rhs, T::of(RANK_TOLERANCE)) else {
                break;
            };
            let mut alpha = T::one();
            let mut improved = false;
            for _ in 0..40 {
                let trial: Vec<T> = t.iter().zip(&step.solution).map(|(&a, &d)| a + alpha * d).collect();
                let rt = residual(&trial)?;
                let ft = phi(&rt);
                if ft < f {
                    t = trial;
                    r = rt;
                    f = ft;
                    improved = true;
                    break;
                }
                alpha *= T::of(0.5);
            }
            if !improved {
                break;
            }
        }
        if best.as_ref().is_none_or(|(_, bf)| f < *bf) {
            best = Some((t, f));
        }
        if f <= target {
            break;
        }
    }
    let (g, f) = best.expect("at least one restart");
    Ok(WsSearch { g, value: f.sqrt() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WsVerdict {
    WsAlgebraicEvidence,
    NotWs,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WsSample<T> {
    pub y: Vec<T>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<Vec<T>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<T>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WsCertificate<T> {
    pub verdict: WsVerdict,
    pub seed: u64,
    pub tolerance: T,
    pub restarts: usize,
    /// Largest achieved `‖Ad(g)y + y‖` over the samples.
    pub max_residual: T,
    pub samples: Vec<WsSample<T>>,
    pub evenness: PropertyCertificate<T>,
    pub notes: Vec<String>,
}

/// [`check_ws_at`] on seeded unit-sphere samples.
pub fn check_ws<T: Scalar>(
    field: &SprayField<T>,
    samples: usize,
    restarts: usize,
    seed: u64,
) -> Result<WsCertificate<T>, ClassifyError> {
    let ys = sphere_samples(field, samples, seed)?;
    check_ws_at(field, &ys, restarts, seed)
}

/// Runs [`ws_search`] at each given vector and the evenness check on the
/// field (with as many seeded samples).
pub fn check_ws_at<T: Scalar>(
    field: &SprayField<T>,
    ys: &[MVector<T>],
    restarts: usize,
    seed: u64,
) -> Result<WsCertificate<T>, ClassifyError> {
    if ys.is_empty() {
        return Err(ClassifyError::InvalidInput("at least one sample is required".into()));
    }
    let space = field.space();
    let samples: Vec<WsSample<T>> = ys
        .par_iter()
        .enumerate()
        .map(|(i, y)| {
            let sample_seed = seed.wrapping_add(1 + i as u64);
            match ws_search(space, y, restarts, DEFAULT_ITERATIONS, sample_seed) {
                Ok(s) => WsSample {
                    y: y.coords.clone(),
                    g: Some(s.g),
                    value: Some(s.value),
                    error: None,
                },
                Err(e) => WsSample {
                    y: y.coords.clone(),
                    g: None,
                    value: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    let evenness = field.check_evenness(ys.len(), seed);
    let pass = T::of(PASS_THRESHOLD);
    // Scale-free comparison: the value is 1-homogeneous in y.
    let relative = |s: &WsSample<T>| s.value.map(|v| v / norm2(&s.y));
    let max_residual = samples.iter().filter_map(|s| s.value).fold(T::zero(), T::max);
    let all_found = samples.iter().all(|s| relative(s).is_some_and(|v| v <= pass));
    let none_found = samples.iter().all(|s| relative(s).is_some_and(|v| v > pass));
    let verdict = match evenness.verdict {
        Verdict::Fail => WsVerdict::NotWs,
        Verdict::Pass if all_found => WsVerdict::WsAlgebraicEvidence,
        _ => WsVerdict::Inconclusive,
    };
    let mut notes = vec![
        NOTE_SAMPLED.to_string(),
        NOTE_IDENTITY_COMPONENT.to_string(),
        NOTE_WS_EVENNESS.to_string(),
        NOTE_WS_POINTWISE.to_string(),
    ];
    if verdict == WsVerdict::Inconclusive {
        notes.push(NOTE_WS_SEARCH.to_string());
    }
    if none_found {
        notes.push(NOTE_WS_ALL_FAIL.to_string());
    }
    Ok(WsCertificate {
        verdict,
        seed,
        tolerance: pass,
        restarts,
        max_residual,
        samples,
        evenness,
        notes,
    })
}

/// Sampling settings for the weak-symmetry precondition of
/// [`verify_theorem3`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WsOptions {
    pub samples: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for WsOptions {
    fn default() -> Self {
        Self {
            samples: DEFAULT_SAMPLES,
            restarts: DEFAULT_RESTARTS,
            seed: crate::sampling::DEFAULT_SEED,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Theorem3Certificate<T> {
    pub verdict: Verdict,
    pub ws_verdict: WsVerdict,
    pub y0: Vec<T>,
    pub tolerance: T,
    /// Max over the sample times of the distance from `η(y(t))` to `[h, y(t)]`.
    pub max_residual: T,
    /// Max deviation of `‖y(t)‖` from `‖y0‖`, when the inner product on m is
    /// `ad(h)`-invariant.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub norm_deviation: Option<T>,
    pub samples: usize,
    pub notes: Vec<String>,
}

/// Checks that the integral curve of `−η` through `y0` stays tangent to the
/// `Ad(H)`-orbits. Refuses unless the weak-symmetry check returns
/// [`WsVerdict::WsAlgebraicEvidence`].
pub fn verify_theorem3<T: Scalar>(
    field: &SprayField<T>,
    y0: &MVector<T>,
    t0: T,
    t1: T,
    step: T,
    options: WsOptions,
) -> Result<Theorem3Certificate<T>, ClassifyError> {
    let space = field.space();
    space.check_nonzero_m(y0)?;
    let ws = check_ws(field, options.samples, options.restarts, options.seed)?;
    if ws.verdict != WsVerdict::WsAlgebraicEvidence {
        let reason = match ws.evenness.verdict {
            Verdict::Fail => format!("eta is not even (residual {})", ws.evenness.max_residual),
            Verdict::Inconclusive => "evenness could not be evaluated at every sample".to_string(),
            Verdict::Pass => format!("no g with Ad(g)y = -y found (largest value {})", ws.max_residual),
        };
        return Err(ClassifyError::Precondition {
            verdict: ws.verdict,
            reason,
        });
    }
    let flow = integrate_eta_flow(field, y0, t0, t1, step)?;
    let mut max_residual = T::zero();
    for y in &flow.y {
        let eta = field.eval_eta(y)?;
        max_residual = max_residual.max(space.tangency_residual(y, &eta)?);
    }
    let norm_deviation = space.m_inner_product_is_invariant().then(|| {
        let n0 = y0.norm();
        flow.y.iter().map(|y| (y.norm() - n0).abs()).fold(T::zero(), T::max)
    });
    let tolerance = T::of(FLOW_TANGENCY_TOLERANCE);
    Ok(Theorem3Certificate {
        verdict: if max_residual <= tolerance {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        ws_verdict: ws.verdict,
        y0: y0.coords.clone(),
        tolerance,
        max_residual,
        norm_deviation,
        samples: flow.y.len(),
        notes: vec![NOTE_SAMPLED.to_string()],
    })
}
