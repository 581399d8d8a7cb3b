//! Fixed-step classic Runge–Kutta driver shared by the chart, m-flow and
//! group-curve integrators.

use crate::scalar::Scalar;

/// Sample times from `t0` to `t1` with spacing `step` (> 0). The direction
/// follows the sign of `t1 − t0`; a final shorter step lands exactly on `t1`.
/// Returns `None` for a non-positive or non-finite step.
pub fn time_grid<T: Scalar>(t0: T, t1: T, step: T) -> Option<Vec<T>> {
    if step.is_nan() || step <= T::zero() || !step.is_finite() || !t0.is_finite() || !t1.is_finite() {
        return None;
    }
    let span = (t1 - t0).abs();
    let dir = if t1 >= t0 { T::one() } else { -T::one() };
    let ratio = span / step;
    let nearest = ratio.round();
    let n = if (ratio - nearest).abs() <= T::of(1e-9) * nearest.max(T::one()) {
        nearest
    } else {
        ratio.ceil()
    };
    let n = n.to_usize()?;
    let mut times: Vec<T> = (0..n).map(|k| t0 + dir * step * T::of(k as f64)).collect();
    times.push(t1);
    if n == 0 {
        times.truncate(1);
    }
    Some(times)
}

/// One classic RK4 step of `ẋ = f(t, x)`.
pub fn rk4_step<T: Scalar, E>(
    f: &mut impl FnMut(T, &[T]) -> Result<Vec<T>, E>,
    t: T,
    x: &[T],
    h: T,
) -> Result<Vec<T>, E> {
    let half = T::of(0.5);
    let shift = |x: &[T], k: &[T], s: T| -> Vec<T> { x.iter().zip(k).map(|(&a, &b)| a + s * b).collect() };
    let k1 = f(t, x)?;
    let k2 = f(t + half * h, &shift(x, &k1, half * h))?;
    let k3 = f(t + half * h, &shift(x, &k2, half * h))?;
    let k4 = f(t + h, &shift(x, &k3, h))?;
    let sixth = h / T::of(6.0);
    let two = T::of(2.0);
    Ok(x.iter()
        .enumerate()
        .map(|(i, &xi)| xi + sixth * (k1[i] + two * k2[i] + two * k3[i] + k4[i]))
        .collect())
}

/// Integrates over `times` starting from `x0`. `guard` runs on every accepted
/// state (including the initial one) and may abort the integration.
pub fn integrate<T: Scalar, E>(
    times: &[T],
    x0: Vec<T>,
    mut f: impl FnMut(T, &[T]) -> Result<Vec<T>, E>,
    mut guard: impl FnMut(T, &[T]) -> Result<(), E>,
) -> Result<Vec<Vec<T>>, E> {
    let mut states = Vec::with_capacity(times.len());
    guard(times[0], &x0)?;
    states.push(x0);
    for w in times.windows(2) {
        let next = rk4_step(&mut f, w[0], states.last().unwrap(), w[1] - w[0])?;
        guard(w[1], &next)?;
        states.push(next);
    }
    Ok(states)
}

/// Why a fixed-step integration stopped early.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IntegrationError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("velocity left the slit domain at t = {time} (norm {norm:e} below {threshold:e})")]
    DomainExit { time: f64, norm: f64, threshold: f64 },
    #[error("solution blew up at t = {time} (norm {norm:e})")]
    BlowUp { time: f64, norm: f64 },
    #[error("field evaluation failed at t = {time}: {message}")]
    Eval { time: f64, message: String },
}

/// Velocities below this norm are treated as having left `m∖{0}` (or the
/// slit tangent bundle).
pub const DOMAIN_EXIT_NORM: f64 = 1e-8;
/// States above this max-norm are reported as blow-up.
pub const BLOW_UP_NORM: f64 = 1e12;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_lands_on_endpoint() {
        let g = time_grid(0.0, 1.0, 0.3).unwrap();
        assert_eq!(g.len(), 5);
        assert_eq!(*g.last().unwrap(), 1.0);
        let g = time_grid(0.0, 2.0, 1e-3).unwrap();
        assert_eq!(g.len(), 2001);
        let g = time_grid(1.0, 0.0, 0.25).unwrap();
        assert_eq!(g, vec![1.0, 0.75, 0.5, 0.25, 0.0]);
        assert_eq!(time_grid(0.5, 0.5, 0.1).unwrap(), vec![0.5]);
        assert!(time_grid(0.0, 1.0, 0.0).is_none());
        assert!(time_grid(0.0, 1.0, -0.1).is_none());
    }

    #[test]
    fn rk4_matches_exponential_to_fourth_order() {
        let err = |h: f64| {
            let times = time_grid(0.0, 1.0, h).unwrap();
            let xs = integrate::<f64, ()>(&times, vec![1.0], |_, x| Ok(vec![x[0]]), |_, _| Ok(())).unwrap();
            (xs.last().unwrap()[0] - 1f64.exp()).abs()
        };
        let ratio = err(0.1) / err(0.05);
        assert!((14.0..18.0).contains(&ratio), "ratio {ratio}");
    }
}
