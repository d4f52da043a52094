use berezin_plancherel::berezin::random_ball_point;
use berezin_plancherel::geometry::{cayley_to_wedge, Matrix, TorusCoord, WedgePoint};
use berezin_plancherel::rng::stream;
use berezin_plancherel::spherical::{
    parabolic_multiplier, parabolic_wedge_action, psi_eigenfunction, rho_vector, spherical_bound_margin, spherical_function, KAverage,
    SphericalBatch,
};
use berezin_plancherel::ComplexValue;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> ComplexValue {
    ComplexValue::new(re, im)
}

fn real(v: &[f64]) -> Vec<ComplexValue> {
    v.iter().map(|&x| c(x, 0.0)).collect()
}

fn within_combined(a: &berezin_plancherel::spherical::SphericalEstimate, b: &berezin_plancherel::spherical::SphericalEstimate) -> bool {
    let se = (a.std_error.powi(2) + b.std_error.powi(2)).sqrt();
    (a.value - b.value).norm() <= 3.0 * se
}

#[test]
fn rho_examples() {
    assert_eq!(rho_vector(1, 3).unwrap(), vec![1.0]);
    assert_eq!(rho_vector(2, 2).unwrap(), vec![1.0, 0.0]);
    assert!(rho_vector(3, 2).is_err());
}

#[test]
fn psi_trivial_points() {
    let s = [c(0.3, 1.2), c(-0.5, 0.4)];
    assert!((psi_eigenfunction(&s, &WedgePoint::base(2, 3)).unwrap() - 1.0).norm() < 1e-15);
    let rho = real(&rho_vector(2, 3).unwrap());
    let mut rng = stream(1, 0);
    for _ in 0..50 {
        let w = cayley_to_wedge(&random_ball_point(2, 3, 1.0, &mut rng).unwrap()).unwrap();
        assert!((psi_eigenfunction(&rho, &w).unwrap() - 1.0).norm() < 1e-12);
    }
}

#[test]
fn exact_values() {
    let s = [c(0.7, 2.0), c(0.1, -0.3)];
    let at_zero = spherical_function(&s, &TorusCoord::new(vec![0.0, 0.0]), 4, 1000, 3).unwrap();
    assert!((at_zero.value - 1.0).norm() < 1e-14 && at_zero.std_error < 1e-14);
    let rho = real(&rho_vector(2, 4).unwrap());
    let at_rho = spherical_function(&rho, &TorusCoord::new(vec![1.3, 0.4]), 4, 1000, 3).unwrap();
    assert!((at_rho.value - 1.0).norm() < 1e-12 && at_rho.std_error < 1e-12);
}

#[test]
fn rank_one_closed_forms() {
    // p=1, q=3: sinh(st)/(s sinh t); p=q=1: cosh(st).
    for (s, t) in [(0.4, 0.9), (1.3, 2.0), (2.5, 0.3)] {
        let b = SphericalBatch::build(1, 3, &TorusCoord::new(vec![t]), KAverage::RankOne { nodes: 64 }).unwrap();
        let v = b.estimate(&[c(s, 0.0)]).unwrap().value.re;
        assert!((v - (s * t).sinh() / (s * t.sinh())).abs() < 1e-12);
        let b = SphericalBatch::build(1, 1, &TorusCoord::new(vec![t]), KAverage::RankOne { nodes: 2 }).unwrap();
        assert!((b.estimate(&[c(s, 0.0)]).unwrap().value.re - (s * t).cosh()).abs() < 1e-12 * (s * t).cosh());
    }
    // Rank-one rule against Monte Carlo for q = 5.
    let t = TorusCoord::new(vec![0.9]);
    let s = [c(0.0, 1.1)];
    let exact = SphericalBatch::build(1, 5, &t, KAverage::RankOne { nodes: 64 }).unwrap().estimate(&s).unwrap();
    let mc = spherical_function(&s, &t, 5, 100_000, 8).unwrap();
    assert!((exact.value - mc.value).norm() < 3.0 * mc.std_error);
}

#[test]
fn weyl_symmetry_by_monte_carlo() {
    let t = TorusCoord::new(vec![0.6]);
    let a = spherical_function(&[c(0.0, 0.8)], &t, 3, 100_000, 10).unwrap();
    let b = spherical_function(&[c(0.0, -0.8)], &t, 3, 100_000, 11).unwrap();
    assert!(within_combined(&a, &b));

    let t = TorusCoord::new(vec![0.8, 0.3]);
    let base = spherical_function(&[c(0.0, 1.2), c(0.0, 0.5)], &t, 3, 100_000, 12).unwrap();
    for (k, s) in [[c(0.0, 0.5), c(0.0, 1.2)], [c(0.0, -1.2), c(0.0, 0.5)], [c(0.0, 1.2), c(0.0, -0.5)]].iter().enumerate() {
        let other = spherical_function(s, &t, 3, 100_000, 13 + k as u64).unwrap();
        assert!(within_combined(&base, &other), "{s:?}: {} vs {}", base.value, other.value);
    }
}

#[test]
fn bound_margin_cases() {
    let t = TorusCoord::new(vec![1.1, 0.4]);
    assert!(spherical_bound_margin(&[c(0.0, 0.9), c(0.0, 0.2)], &t, 3, 20_000, 1).unwrap() >= 0.0);
    assert!(spherical_bound_margin(&[c(0.8, 0.0), c(0.2, 0.0)], &t, 3, 20_000, 1).unwrap().abs() < 1e-15);
    let batch = SphericalBatch::build(2, 3, &t, KAverage::MonteCarlo { samples: 20_000, seed: 2 }).unwrap();
    let mut rng = stream(3, 0);
    use rand::Rng;
    for _ in 0..50 {
        let s: Vec<ComplexValue> = (0..2).map(|_| c(rng.random_range(-2.0..2.0), rng.random_range(-3.0..3.0))).collect();
        assert!(batch.bound_margin(&s).unwrap() >= -1e-12);
    }
}

#[test]
fn imaginary_spectrum_is_bounded() {
    for t in [0.5, 1.5, 3.0] {
        let tt = TorusCoord::new(vec![t, t / 3.0]);
        let e = spherical_function(&[c(0.0, 0.7), c(0.0, 1.9)], &tt, 4, 50_000, 4).unwrap();
        assert!(e.value.norm() <= 1.0 + 5.0 * e.std_error);
    }
}

fn lower_triangular(d: [f64; 2], off: f64) -> Matrix {
    Matrix::from_row_slice(2, 2, &[d[0], 0.0, off, d[1]])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parabolic_law(
        seed in any::<u64>(),
        d0 in 0.3f64..2.0, d1 in 0.3f64..2.0, neg0 in any::<bool>(), neg1 in any::<bool>(), off in -1.0f64..1.0,
        skew in -1.0f64..1.0, s in prop::collection::vec(-2.0f64..2.0, 4),
    ) {
        let mut rng = stream(seed, 0);
        let w = cayley_to_wedge(&random_ball_point(2, 2, 1.0, &mut rng).unwrap()).unwrap();
        let a = lower_triangular([if neg0 { -d0 } else { d0 }, if neg1 { -d1 } else { d1 }], off);
        let sk = Matrix::from_row_slice(2, 2, &[0.0, skew, -skew, 0.0]);
        let sv = [c(s[0], s[1]), c(s[2], s[3])];
        let lhs = psi_eigenfunction(&sv, &parabolic_wedge_action(&a, &sk, &w).unwrap()).unwrap();
        let rhs = parabolic_multiplier(&sv, &a) * psi_eigenfunction(&sv, &w).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-9 * rhs.norm());
    }
}
