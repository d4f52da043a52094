//! Gamma-product expressions `const · 2^(affine) · π^k · ∏Γ(affine)^m · ∏(affine)^n`.

use std::fmt;

use num::{BigInt, One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::affine::{to_f64, AffineForm, Rational};
use crate::error::{Error, Result};
use crate::gamma_special::{
    gamma_residue_coefficient, gamma_residue_f64, log_gamma, pole_index, ComplexValue, POLE_TOLERANCE,
};

/// Largest log-magnitude that still exponentiates to a finite `f64`.
const LOG_MAX: f64 = 709.0;

/// Largest integer offset expanded into a polynomial by [`GammaFactorExpr::simplify`].
const MAX_POLY_EXPANSION: i64 = 64;

/// One `Γ(form)^mult` factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaFactor {
    /// Argument of Γ.
    pub form: AffineForm,
    /// Nonzero exponent; negative values sit in the denominator.
    pub mult: i64,
}

/// One `(form)^pow` factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyFactor {
    /// The affine base.
    pub form: AffineForm,
    /// Non-negative exponent.
    pub pow: u32,
}

/// Exact symbolic Gamma-product expression in α and the free spectral variables.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ExprJson", into = "ExprJson")]
pub struct GammaFactorExpr {
    /// Rational prefactor.
    pub constant: Rational,
    /// Exponent of 2.
    pub two_pow: AffineForm,
    /// Power of π.
    pub pi_pow: i64,
    /// Gamma factors with multiplicities.
    pub gamma_factors: Vec<GammaFactor>,
    /// Polynomial factors with powers.
    pub poly_factors: Vec<PolyFactor>,
}

/// `q^e` for an integer exponent.
pub(crate) fn rpow(q: &Rational, e: i64) -> Rational {
    let mut out = Rational::one();
    for _ in 0..e.unsigned_abs() {
        out *= q;
    }
    if e < 0 {
        out.recip()
    } else {
        out
    }
}

fn factorial(n: u64) -> Rational {
    let mut f = BigInt::one();
    for k in 2..=n {
        f *= BigInt::from(k);
    }
    Rational::from_integer(f)
}

impl GammaFactorExpr {
    /// The constant expression 1 over `nvars` spectral variables.
    pub fn one(nvars: usize) -> Self {
        Self {
            constant: Rational::one(),
            two_pow: AffineForm::zero(nvars),
            pi_pow: 0,
            gamma_factors: Vec::new(),
            poly_factors: Vec::new(),
        }
    }

    /// Number of free spectral variables.
    pub fn nvars(&self) -> usize {
        self.two_pow.nvars()
    }

    /// Appends `Γ(form)^mult`.
    pub fn push_gamma(&mut self, form: AffineForm, mult: i64) {
        debug_assert_eq!(form.nvars(), self.nvars());
        if mult != 0 {
            self.gamma_factors.push(GammaFactor { form, mult });
        }
    }

    /// Appends `(form)^pow`.
    pub fn push_poly(&mut self, form: AffineForm, pow: u32) {
        debug_assert_eq!(form.nvars(), self.nvars());
        if pow != 0 {
            self.poly_factors.push(PolyFactor { form, pow });
        }
    }

    /// Multiplies the rational prefactor.
    pub fn scale(&mut self, k: &Rational) {
        self.constant *= k;
    }

    /// Product of two expressions over the same variables.
    pub fn mul(&self, other: &GammaFactorExpr) -> Result<GammaFactorExpr> {
        if self.nvars() != other.nvars() {
            return Err(Error::Shape(format!("{} vs {} free variables", self.nvars(), other.nvars())));
        }
        let mut out = self.clone();
        out.constant *= &other.constant;
        out.two_pow = out.two_pow + other.two_pow.clone();
        out.pi_pow += other.pi_pow;
        out.gamma_factors.extend(other.gamma_factors.iter().cloned());
        out.poly_factors.extend(other.poly_factors.iter().cloned());
        Ok(out.normalize())
    }

    /// Re-expresses the expression over `nvars` variables, its own placed at `offset`.
    pub fn embed(&self, nvars: usize, offset: usize) -> GammaFactorExpr {
        GammaFactorExpr {
            constant: self.constant.clone(),
            two_pow: self.two_pow.embed(nvars, offset),
            pi_pow: self.pi_pow,
            gamma_factors: self
                .gamma_factors
                .iter()
                .map(|g| GammaFactor { form: g.form.embed(nvars, offset), mult: g.mult })
                .collect(),
            poly_factors: self
                .poly_factors
                .iter()
                .map(|f| PolyFactor { form: f.form.embed(nvars, offset), pow: f.pow })
                .collect(),
        }
    }

    /// Merges identical factors and folds exact constants into the prefactor.
    ///
    /// Γ at a positive integer becomes a factorial, nonzero constant
    /// polynomial factors are absorbed, and a zero constant polynomial factor
    /// is kept so that [`Self::is_identically_zero`] can report it.
    pub fn normalize(mut self) -> GammaFactorExpr {
        let mut gammas: Vec<GammaFactor> = Vec::new();
        for g in self.gamma_factors.drain(..) {
            match gammas.iter_mut().find(|h| h.form == g.form) {
                Some(h) => h.mult += g.mult,
                None => gammas.push(g),
            }
        }
        gammas.retain(|g| g.mult != 0);
        let mut kept = Vec::new();
        for g in gammas {
            if g.form.is_constant() && g.form.c0.is_integer() && g.form.c0.is_positive() {
                if let Some(n) = num::ToPrimitive::to_u64(&g.form.c0.to_integer()) {
                    self.constant *= rpow(&factorial(n - 1), g.mult);
                    continue;
                }
            }
            kept.push(g);
        }
        self.gamma_factors = kept;

        let mut polys: Vec<PolyFactor> = Vec::new();
        for f in self.poly_factors.drain(..) {
            if f.form.is_constant() && !f.form.c0.is_zero() {
                self.constant *= rpow(&f.form.c0, f.pow as i64);
                continue;
            }
            match polys.iter_mut().find(|h| h.form == f.form) {
                Some(h) => h.pow += f.pow,
                None => polys.push(f),
            }
        }
        self.poly_factors = polys;
        self
    }

    /// Rewrites `Γ(x+n)/Γ(x)` with integer `n > 0` as `∏_{i<n}(x+i)`.
    pub fn simplify(self) -> GammaFactorExpr {
        let mut e = self.normalize();
        loop {
            let mut hit = None;
            'outer: for (i, a) in e.gamma_factors.iter().enumerate() {
                if a.mult <= 0 {
                    continue;
                }
                for (j, b) in e.gamma_factors.iter().enumerate() {
                    if b.mult >= 0 {
                        continue;
                    }
                    if let Some(n) = a.form.integer_offset(&b.form) {
                        if let Some(n) = num::ToPrimitive::to_i64(&n) {
                            if n > 0 && n <= MAX_POLY_EXPANSION {
                                hit = Some((i, j, n));
                                break 'outer;
                            }
                        }
                    }
                }
            }
            let Some((i, j, n)) = hit else { return e };
            let k = e.gamma_factors[i].mult.min(-e.gamma_factors[j].mult);
            let base = e.gamma_factors[j].form.clone();
            e.gamma_factors[i].mult -= k;
            e.gamma_factors[j].mult += k;
            for r in 0..n {
                e.push_poly(base.shift(Rational::from_integer(BigInt::from(r))), k as u32);
            }
            e = e.normalize();
        }
    }

    /// True when a polynomial factor is the exact constant zero.
    pub fn is_identically_zero(&self) -> bool {
        self.constant.is_zero() || self.poly_factors.iter().any(|f| f.form.is_zero())
    }

    /// True when some factor depends on a spectral variable.
    pub fn depends_on_s(&self) -> bool {
        self.two_pow.depends_on_s()
            || self.gamma_factors.iter().any(|g| g.form.depends_on_s())
            || self.poly_factors.iter().any(|f| f.form.depends_on_s())
    }

    /// Splits into `(spectral-free part, spectral part)` whose product is `self`.
    ///
    /// The spectral part carries prefactor 1 and no power of π.
    pub fn split_s_free(&self) -> (GammaFactorExpr, GammaFactorExpr) {
        let n = self.nvars();
        let mut free = GammaFactorExpr::one(n);
        let mut dep = GammaFactorExpr::one(n);
        free.constant = self.constant.clone();
        free.pi_pow = self.pi_pow;
        if self.two_pow.depends_on_s() {
            dep.two_pow = self.two_pow.clone();
        } else {
            free.two_pow = self.two_pow.clone();
        }
        for g in &self.gamma_factors {
            let target = if g.form.depends_on_s() { &mut dep } else { &mut free };
            target.push_gamma(g.form.clone(), g.mult);
        }
        for f in &self.poly_factors {
            let target = if f.form.depends_on_s() { &mut dep } else { &mut free };
            target.push_poly(f.form.clone(), f.pow);
        }
        (free, dep)
    }

    /// Replaces `s_k` (0-based) by `value`, an affine form over the remaining variables.
    pub fn substitute(&self, k: usize, value: &AffineForm) -> Result<GammaFactorExpr> {
        self.check_var(k, value)?;
        let mut out = GammaFactorExpr::one(self.nvars() - 1);
        out.constant = self.constant.clone();
        out.pi_pow = self.pi_pow;
        out.two_pow = self.two_pow.substitute(k, value)?;
        for g in &self.gamma_factors {
            out.push_gamma(g.form.substitute(k, value)?, g.mult);
        }
        for f in &self.poly_factors {
            out.push_poly(f.form.substitute(k, value)?, f.pow);
        }
        Ok(out.normalize())
    }

    fn check_var(&self, k: usize, value: &AffineForm) -> Result<()> {
        if k >= self.nvars() {
            return Err(Error::Index(format!("variable index {k} but only {} free variables", self.nvars())));
        }
        if value.nvars() + 1 != self.nvars() {
            return Err(Error::Shape(format!(
                "value has {} variables, expected {}",
                value.nvars(),
                self.nvars() - 1
            )));
        }
        Ok(())
    }

    /// Net order of the singularity at `s_k = pole`, counting numerator Γ
    /// poles, denominator Γ poles and polynomial zeros.
    pub fn pole_order(&self, k: usize, pole: &AffineForm) -> Result<i64> {
        self.check_var(k, pole)?;
        let mut order = 0i64;
        for g in &self.gamma_factors {
            if !g.form.c_s[k].is_zero() && g.form.substitute(k, pole)?.pole_index().is_some() {
                order += g.mult;
            }
        }
        for f in &self.poly_factors {
            if !f.form.c_s[k].is_zero() && f.form.substitute(k, pole)?.is_zero() {
                order -= f.pow as i64;
            }
        }
        Ok(order)
    }

    /// Residue `lim (s_k − pole)·expr` at a simple pole.
    ///
    /// Every factor singular at the pole contributes its exact Laurent
    /// coefficient `(Res Γ(−n) / c)^mult` (or `c^pow` for a vanishing
    /// polynomial factor), where `c` is the coefficient of `s_k`; all other
    /// factors are substituted.  The net order must be exactly one.
    pub fn residue_step(&self, k: usize, pole: &AffineForm) -> Result<GammaFactorExpr> {
        self.check_var(k, pole)?;
        let mut out = GammaFactorExpr::one(self.nvars() - 1);
        out.constant = self.constant.clone();
        out.pi_pow = self.pi_pow;
        out.two_pow = self.two_pow.substitute(k, pole)?;
        let mut order = 0i64;
        for g in &self.gamma_factors {
            let c = &g.form.c_s[k];
            let sub = g.form.substitute(k, pole)?;
            match (c.is_zero(), sub.pole_index()) {
                (false, Some(n)) => {
                    order += g.mult;
                    out.constant *= rpow(&(gamma_residue_coefficient(n) / c), g.mult);
                }
                _ => out.push_gamma(sub, g.mult),
            }
        }
        for f in &self.poly_factors {
            let c = &f.form.c_s[k];
            let sub = f.form.substitute(k, pole)?;
            if !c.is_zero() && sub.is_zero() {
                order -= f.pow as i64;
                out.constant *= rpow(c, f.pow as i64);
            } else {
                out.push_poly(sub, f.pow);
            }
        }
        match order {
            1 => Ok(out.normalize()),
            o if o >= 2 => Err(Error::PoleOrder(format!("pole of order {o} at s{} = {pole}", k + 1))),
            o => Err(Error::NoPole(format!("net order {o} at s{} = {pole}", k + 1))),
        }
    }

    /// Numeric value at `(α, s)`.
    ///
    /// Factors sitting on a pole or zero are resolved by the limit along the
    /// α direction: each contributes its leading Laurent coefficient in α,
    /// and the net order decides between a finite value, zero and a pole.
    /// A singular factor that does not involve α is a hard pole (numerator)
    /// or a hard zero (denominator or polynomial).
    pub fn evaluate(&self, alpha: ComplexValue, s: &[ComplexValue]) -> Result<ComplexValue> {
        if s.len() != self.nvars() {
            return Err(Error::Shape(format!("{} spectral values for {} variables", s.len(), self.nvars())));
        }
        if self.constant.is_zero() {
            return Ok(ComplexValue::new(0.0, 0.0));
        }
        let mut log = self.two_pow.eval(alpha, s) * std::f64::consts::LN_2
            + ComplexValue::new(self.pi_pow as f64 * std::f64::consts::PI.ln(), 0.0);
        let mut coef = to_f64(&self.constant);
        let mut order = 0i64;
        let mut hard_zero = false;
        for g in &self.gamma_factors {
            let z = g.form.eval(alpha, s);
            match pole_index(z) {
                Some(_) if g.form.c_alpha.is_zero() => {
                    if g.mult > 0 {
                        return Err(Error::Pole(format!("Γ({}) at a pole", g.form)));
                    }
                    hard_zero = true;
                }
                Some(n) => {
                    order += g.mult;
                    coef *= (gamma_residue_f64(n) / to_f64(&g.form.c_alpha)).powi(g.mult as i32);
                }
                None => log += log_gamma(z)? * g.mult as f64,
            }
        }
        for f in &self.poly_factors {
            let v = f.form.eval(alpha, s);
            if v.norm() <= POLE_TOLERANCE {
                if f.form.c_alpha.is_zero() {
                    hard_zero = true;
                } else {
                    order -= f.pow as i64;
                    coef *= to_f64(&f.form.c_alpha).powi(f.pow as i32);
                }
            } else {
                log += v.ln() * f.pow as f64;
            }
        }
        if order > 0 {
            return Err(Error::Pole(format!("net pole of order {order} in the α direction")));
        }
        if hard_zero || order < 0 {
            return Ok(ComplexValue::new(0.0, 0.0));
        }
        if log.re > LOG_MAX {
            return Err(Error::Overflow(format!("log-magnitude {} exceeds range", log.re)));
        }
        Ok(log.exp() * coef)
    }
}

impl fmt::Display for GammaFactorExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.constant)?;
        if !self.two_pow.is_zero() {
            write!(f, " · 2^({})", self.two_pow)?;
        }
        if self.pi_pow != 0 {
            write!(f, " · π^{}", self.pi_pow)?;
        }
        for g in &self.gamma_factors {
            if g.mult == 1 {
                write!(f, " · Γ({})", g.form)?;
            } else {
                write!(f, " · Γ({})^{}", g.form, g.mult)?;
            }
        }
        for p in &self.poly_factors {
            if p.pow == 1 {
                write!(f, " · ({})", p.form)?;
            } else {
                write!(f, " · ({})^{}", p.form, p.pow)?;
            }
        }
        Ok(())
    }
}

/// Wire form of an [`AffineForm`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AffineJson {
    /// Constant term as `"a/b"`.
    pub c0: String,
    /// Coefficient of α as `"a/b"`.
    pub c_alpha: String,
    /// Spectral coefficients as `"a/b"`.
    pub c_s: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct GammaJson {
    form: AffineJson,
    mult: i64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct PolyJson {
    form: AffineJson,
    pow: u32,
}

/// Wire form of a [`GammaFactorExpr`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExprJson {
    #[serde(rename = "const")]
    constant: String,
    two_pow: AffineJson,
    pi_pow: i64,
    gammas: Vec<GammaJson>,
    polys: Vec<PolyJson>,
}

fn parse_rational(s: &str) -> Result<Rational> {
    s.trim().parse::<Rational>().map_err(|e| Error::Precondition(format!("bad rational {s:?}: {e}")))
}

impl From<&AffineForm> for AffineJson {
    fn from(a: &AffineForm) -> Self {
        AffineJson {
            c0: a.c0.to_string(),
            c_alpha: a.c_alpha.to_string(),
            c_s: a.c_s.iter().map(|c| c.to_string()).collect(),
        }
    }
}

impl TryFrom<&AffineJson> for AffineForm {
    type Error = Error;
    fn try_from(a: &AffineJson) -> Result<Self> {
        Ok(AffineForm {
            c0: parse_rational(&a.c0)?,
            c_alpha: parse_rational(&a.c_alpha)?,
            c_s: a.c_s.iter().map(|c| parse_rational(c)).collect::<Result<_>>()?,
        })
    }
}

impl From<GammaFactorExpr> for ExprJson {
    fn from(e: GammaFactorExpr) -> Self {
        ExprJson {
            constant: e.constant.to_string(),
            two_pow: (&e.two_pow).into(),
            pi_pow: e.pi_pow,
            gammas: e.gamma_factors.iter().map(|g| GammaJson { form: (&g.form).into(), mult: g.mult }).collect(),
            polys: e.poly_factors.iter().map(|f| PolyJson { form: (&f.form).into(), pow: f.pow }).collect(),
        }
    }
}

impl TryFrom<ExprJson> for GammaFactorExpr {
    type Error = Error;
    fn try_from(j: ExprJson) -> Result<Self> {
        let two_pow = AffineForm::try_from(&j.two_pow)?;
        let n = two_pow.nvars();
        let mut e = GammaFactorExpr { constant: parse_rational(&j.constant)?, two_pow, pi_pow: j.pi_pow, gamma_factors: vec![], poly_factors: vec![] };
        for g in &j.gammas {
            let form = AffineForm::try_from(&g.form)?;
            if form.nvars() != n || g.mult == 0 {
                return Err(Error::Precondition("gamma factor with wrong arity or zero multiplicity".into()));
            }
            e.gamma_factors.push(GammaFactor { form, mult: g.mult });
        }
        for f in &j.polys {
            let form = AffineForm::try_from(&f.form)?;
            if form.nvars() != n {
                return Err(Error::Precondition("polynomial factor with wrong arity".into()));
            }
            e.poly_factors.push(PolyFactor { form, pow: f.pow });
        }
        Ok(e.normalize())
    }
}
