//! Seeded sampling of directions in m and of h-exponential coordinates.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::scalar::{norm2, Scalar};

/// Default seed for every sampled check.
pub const DEFAULT_SEED: u64 = 42;

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform point on the unit sphere of R^q (q ≥ 1).
pub fn unit_sphere<T: Scalar>(rng: &mut SampleRng, q: usize) -> Vec<T> {
    loop {
        let v: Vec<f64> = (0..q).map(|_| rng.sample(StandardNormal)).collect();
        let n = norm2(&v);
        if n > 1e-12 {
            return v.into_iter().map(|x| T::of(x / n)).collect();
        }
    }
}

/// `count` unit-sphere samples from a fresh generator.
pub fn unit_sphere_samples<T: Scalar>(seed: u64, q: usize, count: usize) -> Vec<Vec<T>> {
    let mut r = rng(seed);
    (0..count).map(|_| unit_sphere(&mut r, q)).collect()
}

/// Uniform point in the box `[−half_width, half_width]^k`.
pub fn uniform_box<T: Scalar>(rng: &mut SampleRng, k: usize, half_width: f64) -> Vec<T> {
    (0..k)
        .map(|_| T::of(rng.random_range(-half_width..=half_width)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_are_unit_and_reproducible() {
        let a = unit_sphere_samples::<f64>(7, 3, 50);
        let b = unit_sphere_samples::<f64>(7, 3, 50);
        assert_eq!(a, b);
        for v in &a {
            assert!((norm2(v) - 1.0).abs() < 1e-15);
        }
        assert_ne!(a, unit_sphere_samples::<f64>(8, 3, 50));
    }
}
