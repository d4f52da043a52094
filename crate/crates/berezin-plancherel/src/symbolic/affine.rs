//! Exact affine forms `c0 + c_alpha·α + Σ c_s[k]·s_k` over the rationals.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::{BigInt, BigRational, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::gamma_special::ComplexValue;

/// Exact rational scalar.
pub type Rational = BigRational;

/// `n / d` as an exact rational.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// The integer `n` as an exact rational.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Nearest `f64` to an exact rational.
pub fn to_f64(q: &Rational) -> f64 {
    num::ToPrimitive::to_f64(q).unwrap_or(f64::NAN)
}

/// Affine form in the parameter α and the free spectral variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffineForm {
    /// Constant term.
    pub c0: Rational,
    /// Coefficient of α.
    pub c_alpha: Rational,
    /// Coefficients of the free spectral variables, in order.
    pub c_s: Vec<Rational>,
}

impl AffineForm {
    /// The zero form over `nvars` spectral variables.
    pub fn zero(nvars: usize) -> Self {
        Self { c0: Rational::zero(), c_alpha: Rational::zero(), c_s: vec![Rational::zero(); nvars] }
    }

    /// The constant form `c`.
    pub fn constant(c: Rational, nvars: usize) -> Self {
        Self { c0: c, ..Self::zero(nvars) }
    }

    /// The form `α`.
    pub fn alpha(nvars: usize) -> Self {
        Self { c_alpha: Rational::one(), ..Self::zero(nvars) }
    }

    /// The form `s_k` (0-based).
    pub fn s(k: usize, nvars: usize) -> Self {
        let mut f = Self::zero(nvars);
        f.c_s[k] = Rational::one();
        f
    }

    /// Number of spectral variables.
    pub fn nvars(&self) -> usize {
        self.c_s.len()
    }

    /// True when the form has no α and no spectral dependence.
    pub fn is_constant(&self) -> bool {
        self.c_alpha.is_zero() && !self.depends_on_s()
    }

    /// True when some spectral coefficient is nonzero.
    pub fn depends_on_s(&self) -> bool {
        self.c_s.iter().any(|c| !c.is_zero())
    }

    /// True when the form is the exact constant zero.
    pub fn is_zero(&self) -> bool {
        self.c0.is_zero() && self.is_constant()
    }

    /// Returns the integer `n` with `self = other + n`, if it exists.
    pub fn integer_offset(&self, other: &AffineForm) -> Option<BigInt> {
        if self.c_alpha != other.c_alpha || self.c_s != other.c_s {
            return None;
        }
        let d = &self.c0 - &other.c0;
        d.is_integer().then(|| d.to_integer())
    }

    /// The constant value as a non-positive integer index `n` (form = −n).
    pub fn pole_index(&self) -> Option<u64> {
        if !self.is_constant() || !self.c0.is_integer() || self.c0.is_positive() {
            return None;
        }
        num::ToPrimitive::to_u64(&(-self.c0.to_integer()))
    }

    /// Numeric value at `(α, s)`.
    pub fn eval(&self, alpha: ComplexValue, s: &[ComplexValue]) -> ComplexValue {
        let mut v = ComplexValue::new(to_f64(&self.c0), 0.0) + alpha * to_f64(&self.c_alpha);
        for (c, x) in self.c_s.iter().zip(s) {
            if !c.is_zero() {
                v += x * to_f64(c);
            }
        }
        v
    }

    /// Replaces `s_k` by `value`, an affine form over the remaining variables.
    pub fn substitute(&self, k: usize, value: &AffineForm) -> Result<AffineForm> {
        if k >= self.nvars() {
            return Err(Error::Index(format!("variable {k} out of range for {} free variables", self.nvars())));
        }
        if value.nvars() + 1 != self.nvars() {
            return Err(Error::Shape(format!(
                "substituted value has {} variables, expected {}",
                value.nvars(),
                self.nvars() - 1
            )));
        }
        let coef = self.c_s[k].clone();
        let mut rest = self.c_s.clone();
        rest.remove(k);
        let base = AffineForm { c0: self.c0.clone(), c_alpha: self.c_alpha.clone(), c_s: rest };
        Ok(base + value.clone() * coef)
    }

    /// Embeds the form into `nvars` variables, placing its variables at `offset`.
    pub fn embed(&self, nvars: usize, offset: usize) -> AffineForm {
        let mut c_s = vec![Rational::zero(); nvars];
        for (i, c) in self.c_s.iter().enumerate() {
            c_s[offset + i] = c.clone();
        }
        AffineForm { c0: self.c0.clone(), c_alpha: self.c_alpha.clone(), c_s }
    }

    /// Adds a rational constant.
    pub fn shift(&self, c: Rational) -> AffineForm {
        AffineForm { c0: &self.c0 + c, ..self.clone() }
    }
}

impl Add for AffineForm {
    type Output = AffineForm;
    fn add(self, o: AffineForm) -> AffineForm {
        assert_eq!(self.nvars(), o.nvars(), "affine forms over different variable sets");
        AffineForm {
            c0: self.c0 + o.c0,
            c_alpha: self.c_alpha + o.c_alpha,
            c_s: self.c_s.into_iter().zip(o.c_s).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Neg for AffineForm {
    type Output = AffineForm;
    fn neg(self) -> AffineForm {
        AffineForm { c0: -self.c0, c_alpha: -self.c_alpha, c_s: self.c_s.into_iter().map(|c| -c).collect() }
    }
}

impl Sub for AffineForm {
    type Output = AffineForm;
    fn sub(self, o: AffineForm) -> AffineForm {
        self + (-o)
    }
}

impl Mul<Rational> for AffineForm {
    type Output = AffineForm;
    fn mul(self, k: Rational) -> AffineForm {
        AffineForm {
            c0: self.c0 * &k,
            c_alpha: self.c_alpha * &k,
            c_s: self.c_s.into_iter().map(|c| c * &k).collect(),
        }
    }
}

impl fmt::Display for AffineForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms: Vec<(Rational, String)> = Vec::new();
        if !self.c_alpha.is_zero() {
            terms.push((self.c_alpha.clone(), "α".into()));
        }
        for (k, c) in self.c_s.iter().enumerate() {
            if !c.is_zero() {
                terms.push((c.clone(), format!("s{}", k + 1)));
            }
        }
        if !self.c0.is_zero() || terms.is_empty() {
            terms.push((self.c0.clone(), String::new()));
        }
        for (i, (c, name)) in terms.iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            if name.is_empty() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{name}")?;
            } else {
                write!(f, "{a}{name}")?;
            }
        }
        Ok(())
    }
}
