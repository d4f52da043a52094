//! Support components of the Plancherel measure: enumeration, the residue
//! cascade, the closed-form weights and densities, and vanishing analysis.

use num::{BigInt, One, Signed, Zero};
use serde::Serialize;

use super::affine::{int, rat, to_f64, AffineForm, Rational};
use super::density::{large_alpha_integrand, push_gk_factors, SeriesConstants};
use super::expr::{rpow, GammaFactorExpr};
use crate::error::{Error, Result};
use crate::gamma_special::ComplexValue;

/// Support label `(m, u)`.
pub type SupportLabel = (usize, Vec<u64>);

/// One piece of the Plancherel support.
#[derive(Clone, Debug, Serialize)]
pub struct SupportComponent {
    /// Number of pinned spectral coordinates.
    pub m: usize,
    /// Non-decreasing shifts of the pinned coordinates.
    pub u: Vec<u64>,
    /// Weight at the requested α.
    #[serde(serialize_with = "crate::report::ser_complex")]
    pub weight: ComplexValue,
    /// Density in the remaining `p − m` spectral variables.
    pub residual_density: GammaFactorExpr,
    /// The pinned spectral values.
    pub fixed_coordinates: Vec<f64>,
    /// True when the weight vanishes at this α.
    pub vanishes: bool,
}

/// The full symbolic decomposition at one α.
#[derive(Clone, Debug, Serialize)]
pub struct PlancherelDecomposition {
    /// Components in lexicographic `(m, u)` order.
    pub components: Vec<SupportComponent>,
    /// The parameter α.
    pub alpha: f64,
    /// Structural constants.
    pub constants: SeriesConstants,
    /// Global normalization constant, 1 until calibrated.
    pub calibration: f64,
}

fn factorial(n: u64) -> Rational {
    let mut f = BigInt::one();
    for k in 2..=n {
        f *= BigInt::from(k);
    }
    Rational::from_integer(f)
}

fn ru(x: u64) -> Rational {
    Rational::from_integer(BigInt::from(x))
}

/// The pinned coordinate `α − (p+q)/2 + τ + 2u_τ` as an affine form.
pub fn support_coordinate_form(c: &SeriesConstants, tau: usize, u_tau: u64, nvars: usize) -> AffineForm {
    AffineForm::alpha(nvars).shift(int(tau as i64) - c.half_sum() + ru(2 * u_tau))
}

/// The pinned coordinate `α − (p+q)/2 + τ + 2u_τ` at numeric α.
pub fn support_coordinate(c: &SeriesConstants, alpha: f64, tau: usize, u_tau: u64) -> f64 {
    alpha - c.half_sum_f64() + tau as f64 + 2.0 * u_tau as f64
}

/// All `(m, u)` with `u` non-decreasing and `α + 2u_m + m < (p+q)/2`, in lexicographic order.
pub fn enumerate_support(c: &SeriesConstants, alpha: f64) -> Vec<SupportLabel> {
    let mut out = vec![(0, vec![])];
    let hs = c.half_sum_f64();
    for m in 1..=c.p {
        let bound = hs - alpha - m as f64;
        if bound <= 0.0 {
            break;
        }
        // 2u_m < bound.
        let umax = ((bound / 2.0).ceil() as i64 - 1).max(-1);
        if umax < 0 {
            continue;
        }
        let mut u = vec![0u64; m];
        loop {
            out.push((m, u.clone()));
            // Next non-decreasing sequence with entries ≤ umax.
            let mut i = m;
            while i > 0 && u[i - 1] as i64 == umax {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            let v = u[i - 1] + 1;
            for x in u.iter_mut().skip(i - 1) {
                *x = v;
            }
        }
    }
    out
}

fn check_label(c: &SeriesConstants, m: usize, u: &[u64]) -> Result<()> {
    if m > c.p || u.len() != m {
        return Err(Error::Precondition(format!("invalid component m={m}, u={u:?} for p={}", c.p)));
    }
    if u.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Precondition(format!("u must be non-decreasing, got {u:?}")));
    }
    Ok(())
}

/// Combinatorial weight `(−4π)^m p!/(p−m)!` of the cascade.
pub fn cascade_weight(p: usize, m: usize) -> f64 {
    let mut w = 1.0;
    for tau in 0..m {
        w *= -4.0 * std::f64::consts::PI * (p - tau) as f64;
    }
    w
}

/// Symbolic output of the residue cascade.
#[derive(Clone, Debug)]
pub struct CascadeResult {
    /// The iterated residue, including the combinatorial weight, in `p − m` variables.
    pub expr: GammaFactorExpr,
    /// The detected pole locations, one per step.
    pub poles: Vec<AffineForm>,
}

/// Locates the step pole from the expression's own Gamma factors.
///
/// Candidate families are numerator factors singular along the lattice
/// `s_1 = α + b + n·δ` (α-coefficient one, no other spectral variable,
/// spacing `δ > 0`, `n ≥ 0`).  The lattice point nearest to `target` is
/// returned; ties go to the rightmost family.
pub fn detect_cascade_pole(expr: &GammaFactorExpr, target: &AffineForm) -> Result<AffineForm> {
    let n = expr.nvars();
    if n == 0 {
        return Err(Error::NoPole("no free spectral variable left".into()));
    }
    let goal = &target.c0;
    let mut best: Option<(Rational, Rational)> = None;
    for g in &expr.gamma_factors {
        let c = &g.form.c_s[0];
        if g.mult <= 0 || !(c < &Rational::zero()) || g.form.c_s[1..].iter().any(|x| !x.is_zero()) {
            continue;
        }
        if -(&g.form.c_alpha / c) != Rational::one() {
            continue;
        }
        let b = -(&g.form.c0 / c);
        let spacing = -(Rational::one() / c);
        let steps = ((goal - &b) / &spacing).round().max(Rational::zero());
        let point = &b + &spacing * steps;
        let dist = (&point - goal).abs();
        let better = match &best {
            None => true,
            Some((bp, bd)) => dist < *bd || (dist == *bd && point > *bp),
        };
        if better {
            best = Some((point, dist));
        }
    }
    let (point, _) = best.ok_or_else(|| Error::NoPole("no pole family in the expression".into()))?;
    Ok(AffineForm::alpha(n - 1).shift(point))
}

/// Symbolic residue cascade for component `(m, u)`.
pub fn cascade_expression(c: &SeriesConstants, m: usize, u: &[u64]) -> Result<CascadeResult> {
    check_label(c, m, u)?;
    let mut e = large_alpha_integrand(c).simplify();
    let mut poles = Vec::with_capacity(m);
    for (t, &ut) in u.iter().enumerate() {
        let target = support_coordinate_form(c, t + 1, ut, e.nvars() - 1);
        let pole = detect_cascade_pole(&e, &target)?;
        e = e.residue_step(0, &pole)?.simplify();
        poles.push(pole);
    }
    e.scale(&(rpow(&int(-4), m as i64) * factorial(c.p as u64) / factorial((c.p - m) as u64)));
    e.pi_pow += m as i64;
    Ok(CascadeResult { expr: e, poles })
}

fn eval_weight(free: &GammaFactorExpr, alpha: f64, nvars: usize) -> Result<ComplexValue> {
    let zeros = vec![ComplexValue::new(0.0, 0.0); nvars];
    free.evaluate(ComplexValue::new(alpha, 0.0), &zeros).map_err(|e| match e {
        Error::Pole(msg) => Error::Degenerate(format!("weight singular at α={alpha}: {msg}")),
        other => other,
    })
}

/// Weight and density of component `(m, u)` by the residue cascade.
///
/// The weight collects every spectral-free factor (including the
/// combinatorial weight) evaluated at α; the density keeps the rest.
pub fn component_by_cascade(c: &SeriesConstants, alpha: f64, m: usize, u: &[u64]) -> Result<(f64, GammaFactorExpr)> {
    let r = cascade_expression(c, m, u)?;
    let (free, dep) = r.expr.split_s_free();
    let w = eval_weight(&free, alpha, dep.nvars())?;
    Ok((w.re, dep))
}

fn closed_weight_expr(c: &SeriesConstants, m: usize, u: &[u64], uncorrected: bool) -> GammaFactorExpr {
    let mut e = GammaFactorExpr::one(0);
    let hs = c.half_sum();
    let a = -AffineForm::alpha(0) + AffineForm::constant(hs.clone(), 0);
    let alpha = AffineForm::alpha(0);
    let half = rat(1, 2);
    let uu = |t: usize| if t == 0 { 0 } else { u[t - 1] };
    e.two_pow = alpha.clone();
    e.pi_pow = m as i64;
    if uncorrected {
        e.scale(&(rpow(&int(2), m as i64) * factorial(c.p as u64) / factorial(m as u64)));
    } else {
        e.scale(&(rpow(&int(8), m as i64) * factorial(c.p as u64) / factorial((c.p - m) as u64)));
    }
    for j in 1..=c.p {
        e.push_gamma(alpha.shift(int(1 - j as i64)), -1);
    }
    for t in 1..=m {
        let (ut, up) = (ru(uu(t)), ru(uu(t - 1)));
        let tt = int(t as i64);
        e.push_poly(a.shift(-ru(2) * &ut - &tt), 1);
        e.push_gamma(alpha.shift(-int(c.p as i64) + &tt + ru(2) * &ut), 1);
        e.push_gamma((-alpha.clone()).shift(int(c.q as i64) - &tt - ru(2) * &ut), 1);
        e.scale(&factorial(uu(t) - uu(t - 1)).recip());
        e.push_gamma(a.shift(-&tt + int(1) - &ut - &up), -1);
    }
    for t in 1..=m {
        for s in 1..t {
            let (ut, us) = (ru(uu(t)), ru(uu(s)));
            let mid = rat((t + s) as i64, 2);
            let gap = rat((t - s) as i64, 2);
            e.push_poly(a.shift(-&mid - &us - &ut), 1);
            e.push_poly(AffineForm::constant(&gap + &ut - &us, 0), 1);
            e.push_gamma(AffineForm::constant(&gap + &half + &ut - &us, 0), 1);
            e.push_gamma(a.shift(-&mid - &ut - &us + &half), 1);
            if uncorrected {
                e.push_gamma(AffineForm::constant(&gap + &ut - ru(uu(s - 1)), 0), -1);
                e.push_gamma(a.shift(-&mid - &us - &ut), -1);
            } else {
                let v = ru(uu(s - 1));
                e.push_gamma(AffineForm::constant(&gap + int(1) + &ut - &v, 0), -1);
                e.push_gamma(a.shift(-&mid + int(1) - &ut - &v), -1);
            }
        }
    }
    e.normalize()
}

fn closed_density_expr(c: &SeriesConstants, m: usize, u: &[u64], uncorrected: bool) -> GammaFactorExpr {
    let n = c.p - m;
    let mut e = GammaFactorExpr::one(n);
    let hs = c.half_sum();
    let a = -AffineForm::alpha(n) + AffineForm::constant(hs.clone(), n);
    let half = rat(1, 2);
    let uu = |t: usize| if t == 0 { 0 } else { u[t - 1] };
    let um = if uncorrected { Rational::zero() } else { ru(uu(m)) };
    for k in 0..n {
        for sign in [1, -1] {
            let s = AffineForm::s(k, n) * int(sign);
            e.push_gamma((AffineForm::alpha(n).shift(-hs.clone() + int(m as i64 + 1)) + s.clone()) * half.clone() + AffineForm::constant(um.clone(), n), 1);
            for t in 1..=m {
                let (ut, up) = (ru(uu(t)), ru(uu(t - 1)));
                let tt = int(t as i64);
                if uncorrected {
                    e.push_poly((a.shift(-&tt - ru(2) * &ut) + s.clone()) * half.clone(), 1);
                    e.push_gamma((a.shift(-&tt + int(1) - ru(2) * &ut) + s.clone()) * half.clone(), 1);
                    e.push_gamma((a.shift(-&tt + int(2) + ru(2) * &up) + s.clone()) * half.clone(), -1);
                } else {
                    // Γ(½(1−σ_τ±s))/Γ(½(−σ_τ±s)) with σ_τ the pinned coordinate.
                    e.push_gamma((a.shift(-&tt + int(1) - ru(2) * &ut) + s.clone()) * half.clone(), 1);
                    e.push_gamma((a.shift(-&tt - ru(2) * &ut) + s.clone()) * half.clone(), -1);
                    // Γ(½(a+τ−1±s)+u_{τ−1})/Γ(½(a+τ−1±s)+u_τ) with a = α−(p+q)/2+1.
                    let base = (AffineForm::alpha(n).shift(-hs.clone() + &tt) + s.clone()) * half.clone();
                    e.push_gamma(base.shift(up.clone()), 1);
                    e.push_gamma(base.shift(ut.clone()), -1);
                }
            }
        }
    }
    push_gk_factors(&mut e, c, &(0..n).collect::<Vec<_>>());
    e.normalize()
}

/// Closed-form weight expression (α only) and density (in `p − m` variables).
///
/// With `uncorrected` the forms before correction are returned (other
/// constant, no `u_m` shift, other pair factors); otherwise the corrected
/// forms that agree with the residue cascade.
pub fn closed_form_expressions(c: &SeriesConstants, m: usize, u: &[u64], uncorrected: bool) -> Result<(GammaFactorExpr, GammaFactorExpr)> {
    check_label(c, m, u)?;
    Ok((closed_weight_expr(c, m, u, uncorrected), closed_density_expr(c, m, u, uncorrected)))
}

/// Closed-form weight `E_m(α, u)` and density `Y_m·ℜ_m` (corrected forms).
pub fn component_closed_form(c: &SeriesConstants, alpha: f64, m: usize, u: &[u64]) -> Result<(f64, GammaFactorExpr)> {
    let (w, d) = closed_form_expressions(c, m, u, false)?;
    let v = eval_weight(&w, alpha, 0)?;
    Ok((v.re, d))
}

/// The explicit first-residue formula at level κ (one pinned coordinate),
/// without normalization, as an expression in `p − 1` variables.
pub fn first_residue_explicit(c: &SeriesConstants, kappa: u64) -> Result<GammaFactorExpr> {
    let n = c.p - 1;
    let hs = c.half_sum();
    let a = -AffineForm::alpha(n) + AffineForm::constant(hs.clone(), n);
    let alpha = AffineForm::alpha(n);
    let half = rat(1, 2);
    let k2 = ru(2 * kappa);
    let mut e = GammaFactorExpr::one(n);
    e.scale(&(int(c.p as i64) / factorial(kappa)));
    e.pi_pow = 1;
    for j in 1..=c.p {
        e.push_gamma(alpha.shift(int(1 - j as i64)), -1);
    }
    e.push_poly(a.shift(-&k2 - int(1)), 1);
    e.push_gamma(alpha.shift(-int(c.p as i64) + int(1) + &k2), 1);
    e.push_gamma((-alpha.clone()).shift(int(c.q as i64 - 1) - &k2), 1);
    e.push_gamma(a.shift(-ru(kappa)), -1);
    for k in 0..n {
        for sign in [1, -1] {
            let s = AffineForm::s(k, n) * int(sign);
            e.push_gamma((alpha.shift(-hs.clone() + int(2) + &k2) + s.clone()) * half.clone(), 1);
            e.push_poly((a.shift(int(-1)) + s.clone()) * half.clone(), 1);
            e.push_gamma((a.shift(-&k2) + s.clone()) * half.clone(), 1);
            e.push_gamma((a.shift(int(1)) + s.clone()) * half.clone(), -1);
        }
    }
    push_gk_factors(&mut e, c, &(0..n).collect::<Vec<_>>());
    Ok(e.normalize())
}

/// Normalization `8·2^α` relating the explicit first-residue formula at
/// κ = 0 to the cascade's `m = 1, u = (0)` component.
pub fn first_residue_normalization(alpha: f64) -> f64 {
    8.0 * 2f64.powf(alpha)
}

/// Status of one component in a vanishing analysis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightStatus {
    /// The weight is nonzero.
    Nonzero,
    /// The weight vanishes.
    Zero,
    /// The weight is singular.
    Degenerate,
}

/// One row of a vanishing analysis.
#[derive(Clone, Debug, Serialize)]
pub struct VanishingEntry {
    /// Number of pinned coordinates.
    pub m: usize,
    /// Shifts.
    pub u: Vec<u64>,
    /// Status computed by exact α-pole counting on the cascade weight.
    pub status: WeightStatus,
    /// Prediction of the uncorrected rule, when one applies at this α.
    pub uncorrected_rule_nonzero: Option<bool>,
    /// Prediction of the corrected rule, when one applies at this α.
    pub corrected_rule_nonzero: Option<bool>,
}

/// Vanishing analysis at one α.
#[derive(Clone, Debug, Serialize)]
pub struct VanishingReport {
    /// The parameter α.
    pub alpha: f64,
    /// True when α is an integer not exceeding `p − 1`.
    pub special_integer: bool,
    /// One row per enumerated component.
    pub entries: Vec<VanishingEntry>,
    /// Rows where the computed status and the uncorrected rule disagree.
    pub disagreements: Vec<SupportLabel>,
}

fn uncorrected_rule(c: &SeriesConstants, alpha: f64, m: usize, u: &[u64]) -> Option<bool> {
    integer_rule(c, alpha, m, u, true)
}

/// Vanishing rule at integer `α ≤ p − 1`.
///
/// For `α = p − h ≥ 0` a component survives iff `m ≥ h` and
/// `u_1 = … = u_h = 0`.  For negative α the uncorrected form keeps
/// `m = p` with `m + 2u_m ≤ −α`; exact pole counting shows the correct
/// condition is `m = p` with `2u_m ≤ −α`.
fn integer_rule(c: &SeriesConstants, alpha: f64, m: usize, u: &[u64], uncorrected: bool) -> Option<bool> {
    if alpha.fract() != 0.0 || alpha > c.p as f64 - 1.0 {
        return None;
    }
    let ai = alpha as i64;
    if ai >= 1 {
        let h = (c.p as i64 - ai) as usize;
        Some(m >= h && u.iter().take(h).all(|&x| x == 0))
    } else if ai < 0 {
        let lead = if uncorrected { m as i64 } else { 0 };
        Some(m == c.p && (lead + 2 * u.last().copied().unwrap_or(0) as i64) <= -ai)
    } else {
        // α = 0 is the case h = p of the first rule.
        Some(m == c.p && u.iter().all(|&x| x == 0))
    }
}

/// Which enumerated components carry a nonzero weight at α.
pub fn vanishing_analysis(c: &SeriesConstants, alpha: f64) -> Result<VanishingReport> {
    let mut entries = Vec::new();
    let mut disagreements = Vec::new();
    for (m, u) in enumerate_support(c, alpha) {
        let status = match component_by_cascade(c, alpha, m, &u) {
            Ok((w, _)) if w == 0.0 => WeightStatus::Zero,
            Ok(_) => WeightStatus::Nonzero,
            Err(Error::Degenerate(_)) => WeightStatus::Degenerate,
            Err(e) => return Err(e),
        };
        let rule = uncorrected_rule(c, alpha, m, &u);
        if let Some(r) = rule {
            if r != (status == WeightStatus::Nonzero) {
                disagreements.push((m, u.clone()));
            }
        }
        let corrected = integer_rule(c, alpha, m, &u, false);
        entries.push(VanishingEntry { m, u, status, uncorrected_rule_nonzero: rule, corrected_rule_nonzero: corrected });
    }
    let special_integer = alpha.fract() == 0.0 && alpha <= c.p as f64 - 1.0;
    Ok(VanishingReport { alpha, special_integer, entries, disagreements })
}

/// The full decomposition at α, using the cascade as the canonical source.
pub fn decomposition(c: &SeriesConstants, alpha: f64) -> Result<PlancherelDecomposition> {
    let mut components = Vec::new();
    for (m, u) in enumerate_support(c, alpha) {
        let (w, d) = component_by_cascade(c, alpha, m, &u)?;
        let fixed = (1..=m).map(|t| support_coordinate(c, alpha, t, u[t - 1])).collect();
        components.push(SupportComponent {
            m,
            u,
            weight: ComplexValue::new(w, 0.0),
            residual_density: d,
            fixed_coordinates: fixed,
            vanishes: w == 0.0,
        });
    }
    Ok(PlancherelDecomposition { components, alpha, constants: c.clone(), calibration: 1.0 })
}

/// Numeric value of an affine form at real α with no spectral variables.
pub fn eval_real(f: &AffineForm, alpha: f64) -> f64 {
    to_f64(&f.c0) + alpha * to_f64(&f.c_alpha)
}
