//! The Gindikin–Karpelevich density and the large-α Plancherel integrand.

use serde::Serialize;

use super::affine::{int, rat, AffineForm, Rational};
use super::expr::GammaFactorExpr;
use crate::error::{Error, Result};
use crate::gamma_special::ComplexValue;

/// Threshold on `|cos|` below which a tangent is treated as singular.
const TAN_POLE_TOLERANCE: f64 = 1e-12;

/// Structural constants of O(p,q).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeriesConstants {
    /// Rank.
    pub p: usize,
    /// Second signature index, `p ≤ q`.
    pub q: usize,
    /// `(p+q)/2 − 1`.
    #[serde(serialize_with = "ser_rational")]
    pub h: Rational,
    /// Real dimension of the ground field.
    pub dim_k: usize,
}

fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

impl SeriesConstants {
    /// Constants for O(p,q) with `1 ≤ p ≤ q`.
    pub fn new(p: usize, q: usize) -> Result<Self> {
        if p == 0 || p > q {
            return Err(Error::Precondition(format!("need 1 <= p <= q, got p={p}, q={q}")));
        }
        Ok(Self { p, q, h: rat((p + q) as i64, 2) - int(1), dim_k: 1 })
    }

    /// `(p+q)/2` as an exact rational.
    pub fn half_sum(&self) -> Rational {
        rat((self.p + self.q) as i64, 2)
    }

    /// `(p+q)/2` as a float.
    pub fn half_sum_f64(&self) -> f64 {
        (self.p + self.q) as f64 / 2.0
    }

    /// `(q−p)/2` as an exact rational.
    pub fn half_diff(&self) -> Rational {
        rat((self.q - self.p) as i64, 2)
    }
}

/// Appends the Gindikin–Karpelevich factors for the variables `vars` of `e`.
pub(crate) fn push_gk_factors(e: &mut GammaFactorExpr, c: &SeriesConstants, vars: &[usize]) {
    let n = e.nvars();
    let d = c.half_diff();
    let half = rat(1, 2);
    for &k in vars {
        let s = AffineForm::s(k, n);
        e.push_gamma(s.clone().shift(d.clone()), 1);
        e.push_gamma((-s.clone()).shift(d.clone()), 1);
        e.push_gamma(s.clone(), -1);
        e.push_gamma(-s, -1);
    }
    for (i, &k) in vars.iter().enumerate() {
        for &l in &vars[i + 1..] {
            for (a, b) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
                let form = (AffineForm::s(l, n) * int(a) + AffineForm::s(k, n) * int(b)) * half.clone();
                e.push_gamma(form.clone().shift(half.clone()), 1);
                e.push_gamma(form, -1);
            }
        }
    }
}

/// The Gindikin–Karpelevich density as an exact Gamma quotient in `s_1…s_p`.
pub fn gk_density(c: &SeriesConstants) -> GammaFactorExpr {
    let mut e = GammaFactorExpr::one(c.p);
    push_gk_factors(&mut e, c, &(0..c.p).collect::<Vec<_>>());
    e.normalize()
}

fn checked_tan(z: ComplexValue) -> Result<ComplexValue> {
    if z.cos().norm() < TAN_POLE_TOLERANCE {
        return Err(Error::Pole(format!("tangent singular at {z}")));
    }
    Ok(z.tan())
}

/// The Gindikin–Karpelevich density in elementary form.
///
/// Pairs contribute `((s_k²−s_l²)/4)·tan(π(s_k+s_l)/2)·tan(π(s_k−s_l)/2)`.
/// Each variable contributes `∏_{τ<(q−p)/2}(τ²−s²)` when `q−p` is even and
/// `−s·tan(πs)·∏_{τ≤(q−p−3)/2}((τ+½)²−s²)` when `q−p` is odd.
pub fn gk_density_elementary(c: &SeriesConstants, s: &[ComplexValue]) -> Result<ComplexValue> {
    if s.len() != c.p {
        return Err(Error::Shape(format!("expected {} spectral values, got {}", c.p, s.len())));
    }
    let pi = std::f64::consts::PI;
    let mut v = ComplexValue::new(1.0, 0.0);
    for k in 0..c.p {
        for l in k + 1..c.p {
            let (a, b) = (s[k], s[l]);
            v *= (a * a - b * b) / 4.0 * checked_tan(pi * (a + b) / 2.0)? * checked_tan(pi * (a - b) / 2.0)?;
        }
    }
    let diff = c.q - c.p;
    for &x in s {
        if diff % 2 == 0 {
            for tau in 0..diff / 2 {
                v *= (tau * tau) as f64 - x * x;
            }
        } else {
            v *= -x * checked_tan(pi * x)?;
            for tau in 0..(diff - 1) / 2 {
                let t = tau as f64 + 0.5;
                v *= t * t - x * x;
            }
        }
    }
    Ok(v)
}

/// The large-α integrand `2^α ∏_j Γ(α−j+1)^{-1} · ∏_k Γ(½(α−(p+q)/2+1±s_k)) · ℜ(s)`.
pub fn large_alpha_integrand(c: &SeriesConstants) -> GammaFactorExpr {
    let n = c.p;
    let mut e = GammaFactorExpr::one(n);
    e.two_pow = AffineForm::alpha(n);
    for j in 1..=c.p {
        e.push_gamma(AffineForm::alpha(n).shift(int(1 - j as i64)), -1);
    }
    let a = AffineForm::alpha(n).shift(int(1) - c.half_sum());
    for k in 0..n {
        let s = AffineForm::s(k, n);
        e.push_gamma((a.clone() + s.clone()) * rat(1, 2), 1);
        e.push_gamma((a.clone() - s) * rat(1, 2), 1);
    }
    push_gk_factors(&mut e, c, &(0..n).collect::<Vec<_>>());
    e.normalize()
}
