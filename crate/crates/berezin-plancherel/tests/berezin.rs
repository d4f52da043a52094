use berezin_plancherel::b_integral::closed_form;
use berezin_plancherel::berezin::{
    b_function, b_transform_closed, b_transform_ratio, berezin_admissible, gram_min_eigenvalue, gram_report, kernel_m, random_ball_point,
    random_ball_points, spherical_transform_numeric, transform_params, ChartPoint,
};
use berezin_plancherel::geometry::{
    cayley_measure_constant, cayley_to_wedge, haar_sample_k, kak_coordinates, mobius_action, transporter, BallPoint, TorusCoord, WedgePoint,
};
use berezin_plancherel::rng::stream;
use berezin_plancherel::ComplexValue;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> ComplexValue {
    ComplexValue::new(re, im)
}

#[test]
fn kernel_examples() {
    let mut rng = stream(1, 0);
    for _ in 0..20 {
        let z = random_ball_point(2, 3, 1.0, &mut rng).unwrap();
        let u = random_ball_point(2, 3, 1.0, &mut rng).unwrap();
        assert!((kernel_m(1.7, &z, &z).unwrap() - 1.0).abs() < 1e-12);
        let m0 = kernel_m(1.7, &BallPoint::origin(2, 3), &u).unwrap();
        assert!((m0 - b_function(1.7, &ChartPoint::Ball(u.clone())).unwrap()).abs() < 1e-14);
        let m = kernel_m(1.7, &z, &u).unwrap();
        assert!(m > 0.0 && m < 1.0);
        // Invariance under g = k · (transporter of a random point).
        let g = haar_sample_k(2, 3, &mut rng).compose(&transporter(&random_ball_point(2, 3, 0.8, &mut rng).unwrap()).unwrap()).unwrap();
        let mg = kernel_m(1.7, &mobius_action(&g, &z).unwrap(), &mobius_action(&g, &u).unwrap()).unwrap();
        assert!((mg - m).abs() < 1e-9 * m);
    }
}

#[test]
fn chart_consistency() {
    let alpha = 2.3;
    for (p, q) in [(1, 1), (1, 3), (2, 2), (2, 3)] {
        assert!((b_function(alpha, &ChartPoint::Ball(BallPoint::origin(p, q))).unwrap() - 1.0).abs() < 1e-15);
        assert!((b_function(alpha, &ChartPoint::Wedge(WedgePoint::base(p, q))).unwrap() - 1.0).abs() < 1e-15);
        assert!((b_function(alpha, &ChartPoint::Torus(TorusCoord::new(vec![0.0; p]))).unwrap() - 1.0).abs() < 1e-15);
        let mut rng = stream(2, 0);
        for _ in 0..100 {
            let z = random_ball_point(p, q, 1.0, &mut rng).unwrap();
            let ball = b_function(alpha, &ChartPoint::Ball(z.clone())).unwrap();
            let t = kak_coordinates(&transporter(&z).unwrap()).unwrap();
            let torus = b_function(alpha, &ChartPoint::Torus(t)).unwrap();
            let wedge = b_function(alpha, &ChartPoint::Wedge(cayley_to_wedge(&z).unwrap())).unwrap();
            assert!((ball - torus).abs() < 1e-9 * ball, "({p},{q}) ball {ball} torus {torus}");
            assert!((ball - wedge).abs() < 1e-9 * ball, "({p},{q}) ball {ball} wedge {wedge}");
        }
    }
    let t = 0.9f64;
    assert!((b_function(3.0, &ChartPoint::Torus(TorusCoord::new(vec![t]))).unwrap() - t.cosh().powi(-3)).abs() < 1e-15);
}

#[test]
fn admissibility() {
    assert!(!berezin_admissible(0.5, 2));
    assert!(berezin_admissible(1.0, 2));
    assert!(berezin_admissible(0.001, 1));
    assert!(berezin_admissible(0.0, 3) && berezin_admissible(2.0, 3) && !berezin_admissible(1.5, 3));
}

#[test]
fn gram_examples() {
    for alpha in [0.0, 1.0, 2.5, 7.0] {
        let pts = random_ball_points(2, 3, 2, 1.0, 3).unwrap();
        assert!(gram_min_eigenvalue(alpha, &pts).unwrap() >= -1e-12);
    }
    for alpha in [1.0, 1.5, 3.0] {
        let r = gram_report(alpha, 2, 3, 20, 1.0, 4).unwrap();
        assert!(r.positive_semidefinite && r.min_eigenvalue >= -1e-8 * r.trace);
        assert!((r.trace - 20.0).abs() < 1e-12);
    }
}

#[test]
fn transform_closed_examples() {
    let v = b_transform_closed(4.0, &[c(0.0, 0.0)], 1, 1).unwrap();
    assert!((v.re - 16.0 / 6.0).abs() < 1e-13);
    assert!(b_transform_closed(4.0, &[c(0.0, 0.0)], 2, 3).is_err());
}

#[test]
fn transform_numeric_examples() {
    // p = q = 1, α = 4, s = 0: numeric equals 16/12 = closed · ratio.
    let num = spherical_transform_numeric(4.0, &[c(0.0, 0.0)], 1, 400_000, 5).unwrap();
    let closed = b_transform_closed(4.0, &[c(0.0, 0.0)], 1, 1).unwrap() * b_transform_ratio(4.0, 1, 1).unwrap();
    assert!((closed.re - 16.0 / 12.0).abs() < 1e-10);
    assert!((num.value - closed).norm() < 3.0 * num.std_error);

    let a = spherical_transform_numeric(6.0, &[c(0.0, 1.3)], 3, 200_000, 6).unwrap();
    let b = spherical_transform_numeric(6.0, &[c(0.0, -1.3)], 3, 200_000, 7).unwrap();
    assert!((a.value - b.value).norm() < 3.0 * (a.std_error.powi(2) + b.std_error.powi(2)).sqrt());

    // Finite at α = p + q.
    let at = spherical_transform_numeric(4.0, &[c(0.0, 0.5)], 3, 100_000, 8).unwrap();
    assert!(at.value.re.is_finite() && at.value.re > 0.0);
    assert!(spherical_transform_numeric(3.0, &[c(0.0, 0.5)], 3, 1000, 8).is_err());
}

#[test]
fn transform_is_a_b_integral() {
    // c · 2^{pα} · I(transform parameters) = b_transform_closed · ratio, as a Gamma identity.
    for (p, q, alpha) in [(1, 1, 3.5), (1, 3, 6.0), (2, 2, 5.5), (2, 3, 7.0), (2, 5, 9.0)] {
        for y in [0.0, 0.7, 2.1] {
            let s: Vec<ComplexValue> = (0..p).map(|k| c(0.0, y + 0.3 * k as f64)).collect();
            let lhs = closed_form(&transform_params(alpha, &s, q).unwrap()).unwrap()
                * cayley_measure_constant(p, q).unwrap()
                * 2f64.powf(p as f64 * alpha);
            let rhs = b_transform_closed(alpha, &s, p, q).unwrap() * b_transform_ratio(alpha, p, q).unwrap();
            assert!((lhs - rhs).norm() < 1e-12 * rhs.norm(), "({p},{q},{alpha},{y}): {lhs} vs {rhs}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn admissible_gram_is_psd(seed in any::<u64>(), n in 2usize..40, pq in prop::sample::select(vec![(1usize, 2usize), (2, 3), (2, 4), (3, 4)]), extra in 0.0f64..4.0, integer in any::<bool>()) {
        let (p, q) = pq;
        let alpha = if integer { (extra as usize % p) as f64 } else { p as f64 - 1.0 + 0.01 + extra };
        prop_assert!(berezin_admissible(alpha, p));
        let r = gram_report(alpha, p, q, n, 1.0, seed).unwrap();
        prop_assert!(r.min_eigenvalue >= -1e-8 * r.trace, "α={} min={}", alpha, r.min_eigenvalue);
    }

    #[test]
    fn closed_transform_weyl_invariant(alpha in 4.0f64..10.0, y in prop::collection::vec(-3.0f64..3.0, 2)) {
        let s = [c(0.0, y[0]), c(0.0, y[1])];
        let base = b_transform_closed(alpha, &s, 2, 3).unwrap();
        for g in [[s[1], s[0]], [-s[0], s[1]], [s[0], -s[1]], [-s[1], -s[0]]] {
            let v = b_transform_closed(alpha, &g, 2, 3).unwrap();
            prop_assert!((v - base).norm() <= 1e-12 * base.norm());
        }
    }
}
