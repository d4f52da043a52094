use berezin_plancherel::gamma_special::{
    gamma_modulus_asymptotic, gamma_product, gamma_residue_coefficient, log_gamma, ComplexValue,
};
use num::BigRational;
use proptest::prelude::*;
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> ComplexValue {
    ComplexValue::new(re, im)
}

#[test]
fn log_gamma_fixed_values() {
    assert!(log_gamma(c(1.0, 0.0)).unwrap().norm() < 1e-15);
    assert!((log_gamma(c(0.5, 0.0)).unwrap() - c(0.5 * PI.ln(), 0.0)).norm() < 1e-14);
    // ln Γ(1+i), high-precision reference.
    let reference = c(-0.650_923_199_301_856_8, -0.301_640_320_467_533_2);
    assert!((log_gamma(c(1.0, 1.0)).unwrap() - reference).norm() < 1e-12);
}

#[test]
fn products() {
    assert!((gamma_product(&[c(5.0, 0.0)], &[c(4.0, 0.0)]).unwrap() - c(4.0, 0.0)).norm() < 1e-13);
    assert_eq!(gamma_product(&[], &[]).unwrap(), c(1.0, 0.0));
    // |Γ(½+2i)|² = π / cosh(2π).
    let v = gamma_product(&[c(0.5, 2.0), c(0.5, -2.0)], &[]).unwrap();
    let exact = PI / (2.0 * PI).cosh();
    assert!((v.re - exact).abs() < 1e-10 * exact && v.im.abs() < 1e-10 * exact);
    assert!(gamma_product(&[c(-2.0, 0.0)], &[]).is_err());
    // A denominator pole gives an exact zero.
    assert_eq!(gamma_product(&[c(1.5, 0.0)], &[c(-1.0, 0.0)]).unwrap(), c(0.0, 0.0));
}

#[test]
fn asymptotic_modulus() {
    let direct = |a: f64, y: f64| log_gamma(c(a, y)).unwrap().re.exp();
    assert!((gamma_modulus_asymptotic(2.0, 10.0).unwrap() / direct(2.0, 10.0) - 1.0).abs() < 0.05);
    let formula = (2.0 * PI).sqrt() * (-10.0 * PI).exp();
    assert!((gamma_modulus_asymptotic(0.5, 20.0).unwrap() / formula - 1.0).abs() < 1e-14);
    assert!((gamma_modulus_asymptotic(1.0, 1.0).unwrap() / direct(1.0, 1.0) - 1.0).abs() < 0.25);
    for a in [0.0, 0.5, 1.0, 2.0] {
        let errs: Vec<f64> = [5.0, 10.0, 20.0].iter().map(|&y| (gamma_modulus_asymptotic(a, y).unwrap() / direct(a, y) - 1.0).abs()).collect();
        // Near-exact cases sit at rounding level instead of decreasing.
        assert!(errs.iter().all(|&e| e < 1e-12) || (errs[1] <= errs[0] && errs[2] <= errs[1]), "a={a}: {errs:?}");
    }
}

#[test]
fn residue_coefficients() {
    assert_eq!(gamma_residue_coefficient(0), BigRational::from_integer(1.into()));
    assert_eq!(gamma_residue_coefficient(1), BigRational::from_integer((-1).into()));
    assert_eq!(gamma_residue_coefficient(3), BigRational::new((-1).into(), 6.into()));
}

fn off_integers(z: ComplexValue) -> bool {
    z.im.abs() > 1e-3 || (z.re - z.re.round()).abs() > 1e-3
}

proptest! {
    #[test]
    fn recurrence(re in -20.0f64..20.0, im in -20.0f64..20.0) {
        let z = c(re, im);
        prop_assume!(z.norm() >= 1.0 && z.norm() <= 20.0 && off_integers(z));
        let lhs = log_gamma(z + 1.0).unwrap();
        let rhs = log_gamma(z).unwrap() + z.ln();
        // Compare values, not branches of the logarithm.
        let ratio = (lhs - rhs).exp();
        prop_assert!((ratio - 1.0).norm() < 1e-10);
    }

    #[test]
    fn reflection(re in -10.0f64..10.0, im in -3.0f64..3.0) {
        let z = c(re, im);
        prop_assume!(off_integers(z));
        let prod = (log_gamma(z).unwrap() + log_gamma(c(1.0, 0.0) - z).unwrap()).exp() * (z * PI).sin() / PI;
        prop_assert!((prod - 1.0).norm() < 1e-10);
    }

    #[test]
    fn conjugation(re in -10.0f64..10.0, im in -10.0f64..10.0) {
        let z = c(re, im);
        prop_assume!(off_integers(z));
        let a = log_gamma(z.conj()).unwrap();
        let b = log_gamma(z).unwrap().conj();
        prop_assert!((a - b).norm() <= 1e-12 * (1.0 + b.norm()));
    }
}
