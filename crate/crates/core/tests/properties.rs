use std::sync::Arc;

use proptest::prelude::*;
use spraylab::classify::go_witness;
use spraylab::linalg::{lstsq, matrix_exp};
use spraylab::scalar::{dist2, norm2};
use spraylab::{AlgebraVector, BasePoint, LieAlgebra, MVector, Matrix, MatrixRep, ReductiveSpace, SprayField};

fn sphere<T: spraylab::Scalar>() -> Arc<ReductiveSpace<T>> {
    let z = T::zero();
    Arc::new(
        ReductiveSpace::new(
            LieAlgebra::so3(),
            MatrixRep::so3_defining(BasePoint::Vector(vec![z, z, T::one()])),
            vec![2],
            vec![0, 1],
        )
        .unwrap(),
    )
}

fn vec3() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0..3.0f64, 3)
}

fn nonzero2() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0..3.0f64, 2).prop_filter("nonzero", |v| norm2(v) > 1e-3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn bracket_is_bilinear_and_antisymmetric(x in vec3(), y in vec3(), z in vec3(), a in -2.0..2.0f64) {
        let alg = LieAlgebra::<f64>::so3();
        let (x, y, z) = (AlgebraVector::new(x), AlgebraVector::new(y), AlgebraVector::new(z));
        let xy = alg.bracket(&x, &y).unwrap();
        let yx = alg.bracket(&y, &x).unwrap();
        prop_assert!(norm2(&xy.add(&yx).coords) <= 1e-12);
        let lhs = alg.bracket(&x.scaled(a).add(&z), &y).unwrap();
        let rhs = xy.scaled(a).add(&alg.bracket(&z, &y).unwrap());
        prop_assert!(dist2(&lhs.coords, &rhs.coords) <= 1e-12);
    }

    #[test]
    fn adjoint_matches_conjugation(v in vec3(), t in -2.0..2.0f64) {
        let alg = LieAlgebra::<f64>::so3();
        let rep = MatrixRep::so3_defining(BasePoint::Vector(vec![0.0, 0.0, 1.0]));
        let v = AlgebraVector::new(v);
        let by_ad = alg.adjoint_of_group_element(&v, t).unwrap();
        let g = rep.exp(&v.scaled(t)).unwrap();
        let by_conj = rep.adjoint_by_conjugation(&g).unwrap();
        prop_assert!(by_ad.sub(&by_conj).max_abs() <= 1e-9);
    }

    #[test]
    fn exp_inverse_is_exp_of_negative(entries in prop::collection::vec(-4.0..4.0f64, 9)) {
        let a = Matrix::from_row_major(3, 3, entries).unwrap();
        let p = matrix_exp(&a).unwrap().matmul(&matrix_exp(&a.scale(-1.0)).unwrap());
        let scale = matrix_exp(&a).unwrap().max_abs().max(1.0);
        prop_assert!(p.sub(&Matrix::identity(3)).max_abs() <= 1e-12 * scale * scale);
    }

    #[test]
    fn least_squares_residual_is_orthogonal(entries in prop::collection::vec(-2.0..2.0f64, 8), b in prop::collection::vec(-2.0..2.0f64, 4)) {
        let a = Matrix::from_row_major(4, 2, entries).unwrap();
        let ls = lstsq(&a, &b, 1e-10).unwrap();
        prop_assert!(ls.residual <= norm2(&b) + 1e-12);
        let r: Vec<f64> = a.matvec(&ls.solution).iter().zip(&b).map(|(x, y)| y - x).collect();
        prop_assert!((norm2(&r) - ls.residual).abs() <= 1e-10);
        let atr = a.transpose().matvec(&r);
        prop_assert!(norm2(&atr) <= 1e-10);
    }

    #[test]
    fn tangency_residual_scales_and_is_subadditive(y in nonzero2(), w1 in nonzero2(), w2 in nonzero2(), l in -3.0..3.0f64) {
        let s = sphere::<f64>();
        let y = MVector::new(y);
        let (a, b) = (MVector::new(w1), MVector::new(w2));
        let ra = s.tangency_residual(&y, &a).unwrap();
        let rb = s.tangency_residual(&y, &b).unwrap();
        let sum = MVector::new(a.coords.iter().zip(&b.coords).map(|(x, y)| x + y).collect());
        prop_assert!(s.tangency_residual(&y, &sum).unwrap() <= ra + rb + 1e-12);
        prop_assert!((s.tangency_residual(&y, &a.scaled(l)).unwrap() - l.abs() * ra).abs() <= 1e-12);
        prop_assert!(ra <= a.norm() + 1e-12);
        // Invariant in the scale of the base vector too: [h, λy] = [h, y] as spaces.
        prop_assert!((s.tangency_residual(&y.scaled(2.5), &a).unwrap() - ra).abs() <= 1e-12);
    }

    #[test]
    fn go_witness_residual_is_tangency_residual(y in nonzero2()) {
        let s = sphere::<f64>();
        let f = SprayField::components(s.clone(), &["norm()*y1 + y2*y2/norm()", "abs(y1)*y2"]).unwrap();
        let y = MVector::new(y);
        let (_, r) = go_witness(&f, &y).unwrap();
        let eta = f.eval_eta(&y).unwrap();
        prop_assert_eq!(r, s.tangency_residual(&y, &eta).unwrap());
    }

    #[test]
    fn witness_reproduces_eta_on_go_field(y in nonzero2()) {
        let s = sphere::<f64>();
        let f = SprayField::bracket_form(s.clone(), &["norm() + y1^2/norm()"]).unwrap();
        let y = MVector::new(y);
        let (v, r) = go_witness(&f, &y).unwrap();
        prop_assert!(r <= 1e-12 * y.norm().max(1.0).powi(2));
        let bracket = s.bracket_into_m(&s.embed_h(&v), &y).unwrap();
        let eta = f.eval_eta(&y).unwrap();
        prop_assert!(dist2(&bracket.coords, &eta.coords) <= 1e-12 * y.norm().max(1.0).powi(2));
    }
}

#[test]
fn single_precision_geodesic() {
    let s = sphere::<f32>();
    let f = SprayField::bracket_form(s.clone(), &["norm()"]).unwrap();
    let y0 = MVector::new(vec![1.0f32, 0.0]);
    let tr = spraylab::geodesic(&f, &y0, 0.0, 1.0, 0.01).unwrap();
    let closed = spraylab::homogeneous_geodesic(&s, &y0, &s.embed_h(&[1.0]), &tr.times).unwrap();
    assert!(tr.max_point_deviation(&closed) < 1e-4);
    // Single precision cannot reach the 1e-8 evidence threshold, but it
    // stays far below the refutation threshold.
    let cert = spraylab::check_go(&f, 16, 1).unwrap();
    assert!(cert.max_residual < 1e-5);
    assert_ne!(cert.verdict, spraylab::GoVerdict::NotGo);
}
