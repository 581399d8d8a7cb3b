//! Sprays in a coordinate chart: coefficients `G^i(x, y)` and the geodesic
//! equation `ẍ + 2 G(x, ẋ) = 0`, integrated as a first-order system on the
//! slit tangent bundle.

use rayon::prelude::*;

use crate::certificate::{PropertyCertificate, SampleRecord, NOTE_SAMPLED};
use crate::expr::{parse_with, Expr, Grammar};
use crate::ode::{integrate, time_grid, IntegrationError, BLOW_UP_NORM, DOMAIN_EXIT_NORM};
use crate::sampling::unit_sphere_samples;
use crate::scalar::{dist2, norm2, norm_inf, Scalar};
use crate::spray::{SprayError, HOMOGENEITY_TOLERANCE};

/// Spray coefficients on a d-dimensional chart.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalSpray {
    dim: usize,
    coefficients: Vec<Expr>,
}

/// Chart samples of an integrated geodesic.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartTrajectory<T> {
    pub times: Vec<T>,
    pub x: Vec<Vec<T>>,
    pub y: Vec<Vec<T>>,
}

impl LocalSpray {
    pub fn new(dim: usize, coefficients: Vec<Expr>) -> Result<Self, SprayError> {
        if dim == 0 || coefficients.len() != dim {
            return Err(SprayError::Invalid(format!(
                "chart spray of dimension {dim} needs {dim} coefficients, got {}",
                coefficients.len()
            )));
        }
        Ok(Self { dim, coefficients })
    }

    /// Parses one coefficient per chart coordinate over `x1..xd, y1..yd`.
    pub fn parse(coefficients: &[&str]) -> Result<Self, SprayError> {
        let d = coefficients.len();
        let exprs = coefficients
            .iter()
            .enumerate()
            .map(|(index, s)| parse_with(s, Grammar::chart(d)).map_err(|source| SprayError::Parse { index, source }))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(d, exprs)
    }

    /// `G ≡ 0`: straight lines.
    pub fn flat(dim: usize) -> Self {
        Self {
            dim,
            coefficients: vec![Expr::Num(0.0); dim],
        }
    }

    /// Round unit sphere in polar coordinates `(θ, φ)`.
    pub fn round_sphere() -> Self {
        Self::parse(&["-0.5*sin(x1)*cos(x1)*y2^2", "cos(x1)/sin(x1)*y1*y2"]).expect("built-in sphere spray parses")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coefficients(&self) -> &[Expr] {
        &self.coefficients
    }

    /// `G(x, y)`.
    pub fn coefficients_at<T: Scalar>(&self, x: &[T], y: &[T]) -> Result<Vec<T>, SprayError> {
        self.check_dims(x, y)?;
        Ok(self
            .coefficients
            .iter()
            .map(|e| e.eval_with(x, y))
            .collect::<Result<Vec<T>, _>>()?)
    }

    fn check_dims<T: Scalar>(&self, x: &[T], y: &[T]) -> Result<(), SprayError> {
        if x.len() != self.dim || y.len() != self.dim {
            return Err(SprayError::Invalid(format!(
                "chart point and velocity must have dimension {}",
                self.dim
            )));
        }
        Ok(())
    }

    /// `(ẋ, ẏ) = (y, −2 G(x, y))` on the slit tangent bundle.
    pub fn geodesic_ode_rhs<T: Scalar>(&self, x: &[T], y: &[T]) -> Result<(Vec<T>, Vec<T>), SprayError> {
        self.check_dims(x, y)?;
        if norm2(y) == T::zero() {
            return Err(SprayError::Invalid("velocity must be nonzero".into()));
        }
        let g = self.coefficients_at(x, y)?;
        let two = T::of(2.0);
        Ok((y.to_vec(), g.into_iter().map(|gi| -two * gi).collect()))
    }

    /// Classic RK4 with fixed `step` from `t0` to `t1` (either direction).
    pub fn integrate_local<T: Scalar>(
        &self,
        x0: &[T],
        y0: &[T],
        t0: T,
        t1: T,
        step: T,
    ) -> Result<ChartTrajectory<T>, IntegrationError> {
        self.check_dims(x0, y0)
            .map_err(|e| IntegrationError::InvalidInput(e.to_string()))?;
        if norm2(y0) < T::of(DOMAIN_EXIT_NORM) {
            return Err(IntegrationError::InvalidInput(
                "initial velocity must be nonzero".into(),
            ));
        }
        let times = time_grid(t0, t1, step)
            .ok_or_else(|| IntegrationError::InvalidInput("step must be positive and finite".into()))?;
        let d = self.dim;
        let state0: Vec<T> = x0.iter().chain(y0).copied().collect();
        let states = integrate(
            &times,
            state0,
            |t, s| {
                let (x, y) = s.split_at(d);
                let (dx, dy) = self.geodesic_ode_rhs(x, y).map_err(|e| IntegrationError::Eval {
                    time: t.to_f64_lossy(),
                    message: e.to_string(),
                })?;
                Ok(dx.into_iter().chain(dy).collect())
            },
            |t, s| guard_state(t, s, &s[d..]),
        )?;
        let (x, y) = states.into_iter().map(|s| (s[..d].to_vec(), s[d..].to_vec())).unzip();
        Ok(ChartTrajectory { times, x, y })
    }

    /// Sampled check of `G(x, λy) = λ² G(x, y)` at a fixed chart point.
    pub fn check_homogeneity_at<T: Scalar>(
        &self,
        x: &[T],
        samples: usize,
        lambdas: &[T],
        seed: u64,
    ) -> PropertyCertificate<T> {
        let ys = unit_sphere_samples::<T>(seed, self.dim, samples);
        let records = ys
            .into_par_iter()
            .map(|y| {
                let run = || -> Result<T, SprayError> {
                    let base = self.coefficients_at(x, &y)?;
                    let mut worst = T::zero();
                    for &l in lambdas {
                        let ly: Vec<T> = y.iter().map(|&v| v * l).collect();
                        let scaled = self.coefficients_at(x, &ly)?;
                        let l2 = l * l;
                        let expect: Vec<T> = base.iter().map(|&g| g * l2).collect();
                        worst = worst.max(dist2(&scaled, &expect) / l2);
                    }
                    Ok(worst)
                };
                match run() {
                    Ok(r) => SampleRecord::ok(y, r),
                    Err(e) => SampleRecord::failed(y, e.to_string()),
                }
            })
            .collect();
        PropertyCertificate::from_records(
            "chart_homogeneity",
            seed,
            T::of(HOMOGENEITY_TOLERANCE),
            records,
            vec![NOTE_SAMPLED.to_string()],
        )
    }
}

/// Shared slit-domain and blow-up guard.
pub(crate) fn guard_state<T: Scalar>(t: T, state: &[T], velocity: &[T]) -> Result<(), IntegrationError> {
    let big = norm_inf(state);
    if !big.is_finite() || big > T::of(BLOW_UP_NORM) {
        return Err(IntegrationError::BlowUp {
            time: t.to_f64_lossy(),
            norm: big.to_f64_lossy(),
        });
    }
    let v = norm2(velocity);
    if v < T::of(DOMAIN_EXIT_NORM) {
        return Err(IntegrationError::DomainExit {
            time: t.to_f64_lossy(),
            norm: v.to_f64_lossy(),
            threshold: DOMAIN_EXIT_NORM,
        });
    }
    Ok(())
}

/// Maps model points (flattened) to chart coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointMap {
    /// Unit sphere in R³ with polar angle measured from the first axis:
    /// `θ = acos(p1)`, `φ = atan2(p3, p2)`.
    SpherePolarAxis1,
}

impl PointMap {
    pub fn name(self) -> &'static str {
        match self {
            PointMap::SpherePolarAxis1 => "sphere_polar_axis1",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "sphere_polar_axis1" => Some(PointMap::SpherePolarAxis1),
            _ => None,
        }
    }

    pub fn point_dim(self) -> usize {
        3
    }

    pub fn chart_dim(self) -> usize {
        2
    }

    pub fn to_chart<T: Scalar>(self, p: &[T]) -> Vec<T> {
        match self {
            PointMap::SpherePolarAxis1 => {
                let c = p[0].max(-T::one()).min(T::one());
                vec![c.acos(), p[2].atan2(p[1])]
            }
        }
    }

    /// Differential of [`Self::to_chart`] at `p` applied to `v`.
    pub fn pushforward<T: Scalar>(self, p: &[T], v: &[T]) -> Vec<T> {
        match self {
            PointMap::SpherePolarAxis1 => {
                let s = (T::one() - p[0] * p[0]).sqrt();
                let r2 = p[1] * p[1] + p[2] * p[2];
                vec![-v[0] / s, (p[1] * v[2] - p[2] * v[1]) / r2]
            }
        }
    }

    /// Maps a sampled curve, unwrapping angular coordinates so consecutive
    /// samples stay continuous.
    pub fn map_curve<T: Scalar>(self, points: &[Vec<T>]) -> Vec<Vec<T>> {
        let two_pi = T::of(std::f64::consts::TAU);
        let pi = T::of(std::f64::consts::PI);
        let mut out: Vec<Vec<T>> = Vec::with_capacity(points.len());
        for p in points {
            let mut c = self.to_chart(p);
            if let Some(prev) = out.last() {
                match self {
                    PointMap::SpherePolarAxis1 => {
                        while c[1] - prev[1] > pi {
                            c[1] -= two_pi;
                        }
                        while c[1] - prev[1] < -pi {
                            c[1] += two_pi;
                        }
                    }
                }
            }
            out.push(c);
        }
        out
    }
}

/// A chart spray together with the map from model points into the chart.
#[derive(Debug, Clone, PartialEq)]
pub struct Chart {
    pub spray: LocalSpray,
    pub map: PointMap,
}
