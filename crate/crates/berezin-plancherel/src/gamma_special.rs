//! Complex log-Gamma, Gamma products with pole bookkeeping, the Stirling
//! modulus estimate used for truncation, and residue coefficients.

use num::{BigInt, BigRational, One};

use crate::error::{Error, Result};

/// Complex number used for every numeric evaluation.
pub type ComplexValue = num::complex::Complex64;

/// Distance below which an argument is treated as sitting on a pole.
pub const POLE_TOLERANCE: f64 = 1e-12;

/// Largest real part of a logarithm that still exponentiates to a finite `f64`.
const LOG_MAX: f64 = 709.0;

/// Real part above which the Stirling series is used directly.
const STIRLING_THRESHOLD: f64 = 15.0;

/// `B_{2k} / (2k (2k - 1))` for k = 1..=10.
const STIRLING_COEFFS: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
    -174611.0 / 125400.0,
];

const HALF_LN_TWO_PI: f64 = 0.918_938_533_204_672_8;

/// Returns `Some(n)` when `z` is within [`POLE_TOLERANCE`] of the pole `-n`.
pub fn pole_index(z: ComplexValue) -> Option<u64> {
    if z.im.abs() > POLE_TOLERANCE || z.re > 0.5 {
        return None;
    }
    let r = z.re.round();
    if r <= 0.0 && (z.re - r).abs() <= POLE_TOLERANCE {
        Some((-r) as u64)
    } else {
        None
    }
}

fn stirling(w: ComplexValue) -> ComplexValue {
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = ComplexValue::new(0.0, 0.0);
    let mut pow = inv;
    for c in STIRLING_COEFFS {
        series += pow * c;
        pow *= inv2;
    }
    (w - 0.5) * w.ln() - w + HALF_LN_TWO_PI + series
}

/// Principal branch of `ln Γ(z)`.
///
/// Arguments with small real part are shifted upward by the recurrence
/// `ln Γ(z) = ln Γ(z + N) - Σ ln(z + k)` before the Stirling series is
/// applied, which keeps the result continuous in the plane slit along the
/// negative real axis.  On the negative real axis the imaginary part is a
/// multiple of π carrying the sign of Γ.
pub fn log_gamma(z: ComplexValue) -> Result<ComplexValue> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::Domain(format!("non-finite argument {z}")));
    }
    if let Some(n) = pole_index(z) {
        return Err(Error::Pole(format!("Gamma has a pole at -{n} (argument {z})")));
    }
    if z.re >= STIRLING_THRESHOLD {
        return Ok(stirling(z));
    }
    let shift = (STIRLING_THRESHOLD - z.re).ceil() as usize;
    let mut acc = ComplexValue::new(0.0, 0.0);
    for k in 0..shift {
        acc += (z + k as f64).ln();
    }
    Ok(stirling(z + shift as f64) - acc)
}

/// `ln Γ(x)` for real `x`, returning `(ln |Γ(x)|, sign Γ(x))`.
pub fn log_gamma_real(x: f64) -> Result<(f64, f64)> {
    let v = log_gamma(ComplexValue::new(x, 0.0))?;
    let sign = if (v.im / std::f64::consts::PI).round().rem_euclid(2.0) == 0.0 {
        1.0
    } else {
        -1.0
    };
    Ok((v.re, sign))
}

/// `Γ(x)` for real `x`.
pub fn gamma_real(x: f64) -> Result<f64> {
    let (l, s) = log_gamma_real(x)?;
    if l > LOG_MAX {
        return Err(Error::Overflow(format!("Gamma({x}) exceeds f64 range")));
    }
    Ok(s * l.exp())
}

/// Residue of Γ at `-n`, i.e. `(-1)^n / n!`.
pub fn gamma_residue_coefficient(n: u64) -> BigRational {
    let mut fact = BigInt::one();
    for k in 2..=n {
        fact *= BigInt::from(k);
    }
    let sign = if n % 2 == 0 { BigInt::one() } else { -BigInt::one() };
    BigRational::new(sign, fact)
}

/// Floating-point residue of Γ at `-n`.
pub fn gamma_residue_f64(n: u64) -> f64 {
    let mut v = 1.0;
    for k in 1..=n {
        v /= -(k as f64);
    }
    v
}

/// `∏Γ(num) / ∏Γ(den)` evaluated in log space.
///
/// Poles are counted on both sides.  Equal counts cancel pairwise and are
/// evaluated as the ratio of residue coefficients, which is the limit when
/// every argument approaches its pole at the same rate.  A surplus of
/// denominator poles gives zero; a surplus of numerator poles is an error.
pub fn gamma_product(numerator_args: &[ComplexValue], denominator_args: &[ComplexValue]) -> Result<ComplexValue> {
    let mut log_sum = ComplexValue::new(0.0, 0.0);
    let mut residue_ratio = 1.0;
    let mut order: i64 = 0;
    for &z in numerator_args {
        match pole_index(z) {
            Some(n) => {
                order += 1;
                residue_ratio *= gamma_residue_f64(n);
            }
            None => log_sum += log_gamma(z)?,
        }
    }
    for &z in denominator_args {
        match pole_index(z) {
            Some(n) => {
                order -= 1;
                residue_ratio /= gamma_residue_f64(n);
            }
            None => log_sum -= log_gamma(z)?,
        }
    }
    if order > 0 {
        return Err(Error::Pole(format!("{order} uncancelled numerator pole(s)")));
    }
    if order < 0 {
        return Ok(ComplexValue::new(0.0, 0.0));
    }
    if log_sum.re > LOG_MAX {
        return Err(Error::Overflow(format!("log-magnitude {} exceeds range", log_sum.re)));
    }
    Ok(log_sum.exp() * residue_ratio)
}

/// Leading-order estimate `√(2π) |y|^{a-1/2} e^{-π|y|/2}` of `|Γ(a + iy)|`.
pub fn gamma_modulus_asymptotic(a: f64, y: f64) -> Result<f64> {
    if y.abs() < 1.0 {
        return Err(Error::Domain(format!("asymptotic estimate needs |y| >= 1, got {y}")));
    }
    let ay = y.abs();
    Ok((2.0 * std::f64::consts::PI).sqrt() * ay.powf(a - 0.5) * (-std::f64::consts::PI * ay / 2.0).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> ComplexValue {
        ComplexValue::new(re, im)
    }

    #[test]
    fn log_gamma_at_one_and_half() {
        assert!(log_gamma(c(1.0, 0.0)).unwrap().norm() < 1e-15);
        let v = log_gamma(c(0.5, 0.0)).unwrap();
        assert!((v.re - 0.5 * std::f64::consts::PI.ln()).abs() < 1e-14);
        assert!(v.im.abs() < 1e-15);
    }

    #[test]
    fn log_gamma_one_plus_i_matches_oracle() {
        // Frozen high-precision values of the principal branch.
        let cases = [
            (c(1.0, 1.0), c(-0.650_923_199_301_856_3, -0.301_640_320_467_533_2)),
            (c(-2.5, 0.3), c(-0.432_088_892_613_201_9, -9.093_345_421_289_741)),
            (c(0.3, -7.0), c(-10.465_674_446_702_919, -6.310_309_647_040_768)),
            (c(-20.5, 3.0), c(-51.225_303_676_603_4, -56.829_458_531_801_58)),
        ];
        for (z, oracle) in cases {
            let v = log_gamma(z).unwrap();
            assert!((v - oracle).norm() < 1e-12 * oracle.norm().max(1.0), "{z}: {v}");
        }
    }

    #[test]
    fn poles_are_rejected() {
        assert!(matches!(log_gamma(c(0.0, 0.0)), Err(Error::Pole(_))));
        assert!(matches!(log_gamma(c(-3.0, 0.0)), Err(Error::Pole(_))));
        assert!(log_gamma(c(-3.0, 1e-6)).is_ok());
    }

    #[test]
    fn negative_reals_carry_sign() {
        assert!((gamma_real(-0.5).unwrap() + 2.0 * std::f64::consts::PI.sqrt()).abs() < 1e-13);
        assert!((gamma_real(-1.5).unwrap() - 4.0 / 3.0 * std::f64::consts::PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn product_examples() {
        let v = gamma_product(&[c(5.0, 0.0)], &[c(4.0, 0.0)]).unwrap();
        assert!((v - c(4.0, 0.0)).norm() < 1e-13);
        assert_eq!(gamma_product(&[], &[]).unwrap(), c(1.0, 0.0));
        // |Γ(1/2 + 2i)|² = π / cosh(2π).
        let v = gamma_product(&[c(0.5, 2.0), c(0.5, -2.0)], &[]).unwrap();
        let oracle = std::f64::consts::PI / (2.0 * std::f64::consts::PI).cosh();
        assert!((v.re / oracle - 1.0).abs() < 1e-10 && v.im.abs() < 1e-15);
    }

    #[test]
    fn product_pole_bookkeeping() {
        // Γ(-2)/Γ(-1) = lim (-1)^2/2! / (-1) = -1/2.
        let v = gamma_product(&[c(-2.0, 0.0)], &[c(-1.0, 0.0)]).unwrap();
        assert!((v.re + 0.5).abs() < 1e-15);
        assert_eq!(gamma_product(&[c(1.0, 0.0)], &[c(0.0, 0.0)]).unwrap(), c(0.0, 0.0));
        assert!(matches!(gamma_product(&[c(0.0, 0.0)], &[]), Err(Error::Pole(_))));
        assert!(matches!(gamma_product(&[c(200.0, 0.0)], &[]), Err(Error::Overflow(_))));
    }

    #[test]
    fn residue_coefficients() {
        assert_eq!(gamma_residue_coefficient(0), BigRational::one());
        assert_eq!(gamma_residue_coefficient(1), -BigRational::one());
        assert_eq!(gamma_residue_coefficient(3), BigRational::new((-1).into(), 6.into()));
    }

    #[test]
    fn asymptotic_examples() {
        let exact = log_gamma(c(2.0, 10.0)).unwrap().re.exp();
        let est = gamma_modulus_asymptotic(2.0, 10.0).unwrap();
        assert!((est / exact - 1.0).abs() < 0.05);
        let direct = (2.0 * std::f64::consts::PI).sqrt() * (-10.0 * std::f64::consts::PI).exp();
        assert!((gamma_modulus_asymptotic(0.5, 20.0).unwrap() / direct - 1.0).abs() < 1e-14);
        let exact = log_gamma(c(1.0, 1.0)).unwrap().re.exp();
        assert!((gamma_modulus_asymptotic(1.0, 1.0).unwrap() / exact - 1.0).abs() < 0.25);
        assert!(matches!(gamma_modulus_asymptotic(1.0, 0.5), Err(Error::Domain(_))));
    }
}
