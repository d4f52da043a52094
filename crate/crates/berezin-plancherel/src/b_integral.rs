//! The matrix B-integral over the wedge section: closed form, integrand,
//! Monte-Carlo oracle, the Hua and Dirichlet special cases, and the
//! reduction `I_{p,q} = I_{p−1,q−1} · J_{p,q}`.
//!
//! `I_{p,q}(λ; σ) = ∫ ∏_j det[W]_j^{λ_j−λ_{j+1}} det[1+M+N]_j^{−(σ_j−σ_{j+1})} det W^{−(p+q)/2} dL dM dN`
//! with `W = M − LLᵀ` and `λ_{p+1} = σ_{p+1} = 0`, equal to
//! `∏_k π^{k+(q−p)/2−1} Γ(λ_k−(q+k)/2+1) Γ(σ_k−λ_k−(p−k)/2) / Γ(σ_k−p+k)`
//! on the strip `(q+k)/2 − 1 < Re λ_k < Re σ_k − (p−k)/2`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gamma_special::{gamma_product, gamma_real, ComplexValue};
use crate::geometry::{cayley_measure_constant, operator_norm, sample_wedge, Matrix, WedgePoint, WedgeSample};
use crate::quadrature::mc_mean;
use crate::report::{ser_complex, ser_complex_vec, ser_f64};
use crate::spherical::SphericalEstimate;

/// Absolute error target of the nested Dirichlet quadrature.  Inner values
/// span many decades, so the target is set below any of them and the rule
/// runs to its full level count.
const DIRICHLET_ABS_ERROR: f64 = f64::MIN_POSITIVE;

/// Parameters `(p, q, λ, σ)` of the B-integral.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BIntegralParams {
    /// Rank.
    pub p: usize,
    /// Second index, `p ≤ q`.
    pub q: usize,
    /// `λ_1, …, λ_p`.
    #[serde(serialize_with = "ser_complex_vec")]
    pub lambda: Vec<ComplexValue>,
    /// `σ_1, …, σ_p`.
    #[serde(serialize_with = "ser_complex_vec")]
    pub sigma: Vec<ComplexValue>,
}

/// One violated strip inequality.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StripViolation {
    /// 1-based index `k`.
    pub k: usize,
    /// Lower bound `(q+k)/2 − 1` on `Re λ_k`.
    #[serde(serialize_with = "ser_f64")]
    pub lower: f64,
    /// Upper bound `Re σ_k − (p−k)/2` on `Re λ_k`.
    #[serde(serialize_with = "ser_f64")]
    pub upper: f64,
    /// `Re λ_k`.
    #[serde(serialize_with = "ser_f64")]
    pub value: f64,
}

impl BIntegralParams {
    /// Checked constructor.
    pub fn new(p: usize, q: usize, lambda: Vec<ComplexValue>, sigma: Vec<ComplexValue>) -> Result<Self> {
        if p == 0 || p > q {
            return Err(Error::Precondition(format!("need 1 <= p <= q, got p={p}, q={q}")));
        }
        if lambda.len() != p || sigma.len() != p {
            return Err(Error::Shape(format!("need {p} values of λ and σ, got {} and {}", lambda.len(), sigma.len())));
        }
        Ok(Self { p, q, lambda, sigma })
    }

    /// Real-parameter constructor.
    pub fn real(p: usize, q: usize, lambda: &[f64], sigma: &[f64]) -> Result<Self> {
        let c = |v: &[f64]| v.iter().map(|&x| ComplexValue::new(x, 0.0)).collect();
        Self::new(p, q, c(lambda), c(sigma))
    }

    /// Violated strip inequalities, empty inside the convergence strip.
    pub fn strip_violations(&self) -> Vec<StripViolation> {
        let (p, q) = (self.p as f64, self.q as f64);
        let mut out = Vec::new();
        for k in 1..=self.p {
            let kf = k as f64;
            let lower = (q + kf) / 2.0 - 1.0;
            let upper = self.sigma[k - 1].re - (p - kf) / 2.0;
            let value = self.lambda[k - 1].re;
            if !(lower < value && value < upper) {
                out.push(StripViolation { k, lower, upper, value });
            }
        }
        out
    }

    /// `Divergence` error outside the strip.
    pub fn check_strip(&self) -> Result<()> {
        match self.strip_violations().first() {
            None => Ok(()),
            Some(v) => Err(Error::Divergence(format!(
                "strip violated at k={}: need {} < Re λ_k = {} < {}",
                v.k, v.lower, v.value, v.upper
            ))),
        }
    }
}

/// π exponent `Σ_k (k + (q−p)/2 − 1) = p(q−1)/2` of the closed form.
pub fn pi_exponent(p: usize, q: usize) -> f64 {
    p as f64 * (q as f64 - 1.0) / 2.0
}

/// The closed form of `I_{p,q}(λ; σ)`.
pub fn closed_form(params: &BIntegralParams) -> Result<ComplexValue> {
    let (p, q) = (params.p as f64, params.q as f64);
    let mut num = Vec::with_capacity(2 * params.p);
    let mut den = Vec::with_capacity(params.p);
    for k in 1..=params.p {
        let kf = k as f64;
        let (l, s) = (params.lambda[k - 1], params.sigma[k - 1]);
        num.push(l - (q + kf) / 2.0 + 1.0);
        num.push(s - l - (p - kf) / 2.0);
        den.push(s - p + kf);
    }
    Ok(gamma_product(&num, &den)? * std::f64::consts::PI.powf(pi_exponent(params.p, params.q)))
}

/// The integrand at a wedge point, including `det W^{−(p+q)/2}`.
pub fn integrand(params: &BIntegralParams, w: &WedgePoint) -> Result<ComplexValue> {
    if w.p() != params.p || w.l.ncols() != params.q - params.p {
        return Err(Error::Shape("wedge point does not match (p, q)".into()));
    }
    integrand_from_minors(params, &w.log_minors()?, &w.log_shifted_minors()?)
}

/// The integrand from `ln det[W]_j` and `ln det[1+M+N]_j`.
pub fn integrand_from_minors(params: &BIntegralParams, lm: &[f64], ls: &[f64]) -> Result<ComplexValue> {
    let p = params.p;
    if lm.len() != p || ls.len() != p {
        return Err(Error::Shape(format!("need {p} leading minors")));
    }
    let zero = ComplexValue::new(0.0, 0.0);
    let mut acc = ComplexValue::new(-((p + params.q) as f64) / 2.0 * lm[p - 1], 0.0);
    for j in 0..p {
        let (l_next, s_next) = if j + 1 < p { (params.lambda[j + 1], params.sigma[j + 1]) } else { (zero, zero) };
        acc += (params.lambda[j] - l_next) * lm[j] - (params.sigma[j] - s_next) * ls[j];
    }
    Ok(acc.exp())
}

/// Importance-sampled Monte-Carlo estimate of `I_{p,q}(λ; σ)`.
pub fn monte_carlo_estimate(params: &BIntegralParams, n_samples: usize, seed: u64, proposal_scale: f64) -> Result<SphericalEstimate> {
    params.check_strip()?;
    let (p, q) = (params.p, params.q);
    mc_mean(
        |s: &WedgeSample| integrand_from_minors(params, &s.log_minors(), &s.point.log_shifted_minors()?),
        |rng| {
            let s = sample_wedge(p, q, proposal_scale, rng)?;
            let w = (-s.log_density).exp();
            Ok((s, w))
        },
        n_samples,
        seed,
    )
}

/// Parameters `λ_k = τ + (p+q)/2`, `σ_k = 2(τ + (p+q)/2)` of the Hua integral.
pub fn hua_params(p: usize, q: usize, tau: ComplexValue) -> Result<BIntegralParams> {
    let a = tau + (p + q) as f64 / 2.0;
    BIntegralParams::new(p, q, vec![a; p], vec![a * 2.0; p])
}

/// `∫_{ball} det(1 − zzᵀ)^τ dz` through the wedge section:
/// `c · 4^{p(τ + (p+q)/2)} · I_{p,q}(λ; σ)` with `c` the Cayley measure constant.
pub fn hua_specialization(p: usize, q: usize, tau: ComplexValue) -> Result<ComplexValue> {
    let params = hua_params(p, q, tau)?;
    params.check_strip()?;
    let c = cayley_measure_constant(p, q)?;
    let a = tau + (p + q) as f64 / 2.0;
    let four = (a * (p as f64) * 4f64.ln()).exp();
    Ok(closed_form(&params)? * four * c)
}

/// Ball-side Monte Carlo of `∫ det(1 − zzᵀ)^τ dz`: uniform draws in the box
/// `[−1, 1]^{pq}`, rejected outside the ball.
pub fn hua_ball_monte_carlo(p: usize, q: usize, tau: f64, n_samples: usize, seed: u64) -> Result<SphericalEstimate> {
    if !(tau > -1.0) {
        return Err(Error::Divergence(format!("the Hua integral needs τ > −1, got {tau}")));
    }
    let volume = 2f64.powi((p * q) as i32);
    mc_mean(
        |z: &Matrix| {
            if operator_norm(z) >= 1.0 {
                return Ok(ComplexValue::new(0.0, 0.0));
            }
            let d = (Matrix::identity(p, p) - z * z.transpose()).determinant();
            Ok(ComplexValue::new(d.max(0.0).powf(tau) * volume, 0.0))
        },
        |rng| {
            use rand::Rng;
            Ok((Matrix::from_fn(p, q, |_, _| rng.random_range(-1.0..1.0)), 1.0))
        },
        n_samples,
        seed,
    )
}

/// `√π Γ(τ+1)/Γ(τ+3/2) = ∫_{−1}^{1} (1−x²)^τ dx`.
pub fn hua_scalar(tau: f64) -> Result<f64> {
    Ok(std::f64::consts::PI.sqrt() * gamma_real(tau + 1.0)? / gamma_real(tau + 1.5)?)
}

fn check_positive(a: f64, b: f64, c: f64) -> Result<()> {
    if a > 0.0 && b > 0.0 && c > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("Dirichlet integral needs a, b, c > 0, got ({a}, {b}, {c})")))
    }
}

/// `Γ(a)Γ(b)Γ(c)/Γ(a+b+c)`.
pub fn dirichlet_beta(a: f64, b: f64, c: f64) -> Result<f64> {
    check_positive(a, b, c)?;
    Ok(gamma_product(
        &[ComplexValue::new(a, 0.0), ComplexValue::new(b, 0.0), ComplexValue::new(c, 0.0)],
        &[ComplexValue::new(a + b + c, 0.0)],
    )?
    .re)
}

/// `∫_0^1 f` for `f(x) ~ x^{k−1}` at 0, after `x = y^{1/k}` removes the power singularity.
fn unit_interval<F: Fn(f64) -> f64>(f: F, k: f64) -> f64 {
    let g = |y: f64| {
        if y <= 0.0 {
            return 0.0;
        }
        let x = y.powf(1.0 / k);
        f(x) * x / (k * y)
    };
    quadrature::integrate(g, 0.0, 1.0, DIRICHLET_ABS_ERROR).integral
}

/// `∫_0^∞ f` for `f(x) ~ x^{k_0−1}` at 0 and `f(x) ~ x^{−k_∞−1}` at ∞,
/// split at `scale` with `x = scale/t` on the far part.
fn half_line<F: Fn(f64) -> f64>(f: F, scale: f64, k0: f64, k_inf: f64) -> f64 {
    scale * (unit_interval(|x| f(scale * x), k0) + unit_interval(|t| f(scale / t) / (t * t), k_inf))
}

/// `∫∫_{u,v>0} u^{a−1} v^{b−1} (1+u+v)^{−a−b−c} du dv` by nested
/// double-exponential quadrature with the endpoint powers removed and the
/// inner axis split at its natural scale `1 + u`.
pub fn dirichlet_quadrature(a: f64, b: f64, c: f64) -> Result<f64> {
    check_positive(a, b, c)?;
    let e = a + b + c;
    let inner = |u: f64| half_line(|v| v.powf(b - 1.0) * (1.0 + u + v).powf(-e), 1.0 + u, b, a + c);
    Ok(half_line(|u| u.powf(a - 1.0) * inner(u), 1.0, a, c))
}

/// Both sides of `I_{p,q}(λ; σ) = I_{p−1,q−1}(λ′; σ′) · J_{p,q}(λ_p; σ_p)`.
#[derive(Clone, Debug, Serialize)]
pub struct RecurrenceReport {
    /// The input parameters.
    pub params: BIntegralParams,
    /// `(λ′, σ′)` with `λ′_k = λ_k − ½`, `σ′_k = σ_k − 1`, `k < p`.
    pub reduced: Option<BIntegralParams>,
    /// `I_{p,q}(λ; σ)`.
    #[serde(serialize_with = "ser_complex")]
    pub lhs: ComplexValue,
    /// `I_{p−1,q−1}(λ′; σ′)` (1 when `p = 1`).
    #[serde(serialize_with = "ser_complex")]
    pub reduced_value: ComplexValue,
    /// `J_{p,q} = π^{(p+q)/2−1} Γ(λ_p−(p+q)/2+1) Γ(σ_p−λ_p) / Γ(σ_p)`.
    #[serde(serialize_with = "ser_complex")]
    pub j_factor: ComplexValue,
    /// `lhs / (reduced_value · j_factor)`.
    #[serde(serialize_with = "ser_complex")]
    pub ratio: ComplexValue,
}

/// `J_{p,q}(λ_p; σ_p)`.
pub fn j_factor(p: usize, q: usize, lambda_p: ComplexValue, sigma_p: ComplexValue) -> Result<ComplexValue> {
    let h = (p + q) as f64 / 2.0;
    Ok(gamma_product(&[lambda_p - h + 1.0, sigma_p - lambda_p], &[sigma_p])? * std::f64::consts::PI.powf(h - 1.0))
}

/// Evaluates both sides of the reduction on closed forms; both sides must lie in their strips.
pub fn recurrence_check(params: &BIntegralParams) -> Result<RecurrenceReport> {
    params.check_strip()?;
    let p = params.p;
    let reduced = if p > 1 {
        let lam = params.lambda[..p - 1].iter().map(|l| l - 0.5).collect();
        let sig = params.sigma[..p - 1].iter().map(|s| s - 1.0).collect();
        let r = BIntegralParams::new(p - 1, params.q - 1, lam, sig)?;
        r.check_strip()?;
        Some(r)
    } else {
        None
    };
    let lhs = closed_form(params)?;
    let reduced_value = match &reduced {
        Some(r) => closed_form(r)?,
        None => ComplexValue::new(1.0, 0.0),
    };
    let j = j_factor(p, params.q, params.lambda[p - 1], params.sigma[p - 1])?;
    let ratio = lhs / (reduced_value * j);
    Ok(RecurrenceReport { params: params.clone(), reduced, lhs, reduced_value, j_factor: j, ratio })
}
