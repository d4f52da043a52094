//! Berezin kernels `M_α`, the matrix element `B_α` in the ball, torus and
//! wedge charts, admissibility, Gram-matrix tests, and the spherical
//! transform of `B_α`.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::b_integral::{monte_carlo_estimate, pi_exponent, BIntegralParams};
use crate::error::{Error, Result};
use crate::gamma_special::{gamma_product, ComplexValue};
use crate::geometry::{
    cayley_measure_constant, haar_sample_k, mobius_action, operator_norm, torus_ball_point, BallPoint, Matrix, TorusCoord,
    WedgePoint, MAX_TORUS_COORDINATE,
};
use crate::report::ser_f64;
use crate::rng::stream;
use crate::spherical::{psi_exponents, SphericalEstimate};

/// Proposal width used by [`spherical_transform_numeric`].
pub const TRANSFORM_PROPOSAL_SCALE: f64 = 0.5;

fn log_det_one_minus(z: &Matrix, u: &Matrix) -> Result<f64> {
    let p = z.nrows();
    let d = (Matrix::identity(p, p) - z * u.transpose()).determinant();
    if !(d > 0.0) {
        return Err(Error::Branch(format!("det(1 − z uᵀ) = {d} is not positive")));
    }
    Ok(d.ln())
}

fn check_ball(z: &BallPoint) -> Result<()> {
    if operator_norm(&z.z) < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain("point outside the open ball".into()))
    }
}

/// `M_α(z, u) = det(1−zzᵀ)^{α/2} det(1−uuᵀ)^{α/2} / det(1−zuᵀ)^α`.
pub fn kernel_m(alpha: f64, z: &BallPoint, u: &BallPoint) -> Result<f64> {
    if z.z.shape() != u.z.shape() {
        return Err(Error::Shape("ball points of different shapes".into()));
    }
    check_ball(z)?;
    check_ball(u)?;
    let lz = log_det_one_minus(&z.z, &z.z)?;
    let lu = log_det_one_minus(&u.z, &u.z)?;
    let lzu = log_det_one_minus(&z.z, &u.z)?;
    Ok((alpha / 2.0 * (lz + lu) - alpha * lzu).exp())
}

/// A point in one of the three charts.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "chart")]
pub enum ChartPoint {
    /// Matrix ball.
    Ball(BallPoint),
    /// Torus coordinates.
    Torus(TorusCoord),
    /// Wedge section.
    Wedge(WedgePoint),
}

/// `B_α` in the chart of `point`:
/// `det(1−zzᵀ)^{α/2}`, `∏ cosh^{−α} t_k`, or `2^{pα} det(M−LLᵀ)^{α/2} / det(1+M+N)^α`.
pub fn b_function(alpha: f64, point: &ChartPoint) -> Result<f64> {
    match point {
        ChartPoint::Ball(z) => {
            check_ball(z)?;
            Ok((alpha / 2.0 * log_det_one_minus(&z.z, &z.z)?).exp())
        }
        ChartPoint::Torus(t) => Ok(t.cosh_power(alpha)),
        ChartPoint::Wedge(w) => {
            let p = w.p();
            let lm = w.log_minors()?;
            let ls = w.log_shifted_minors()?;
            Ok((p as f64 * alpha * std::f64::consts::LN_2 + alpha / 2.0 * lm[p - 1] - alpha * ls[p - 1]).exp())
        }
    }
}

/// Whether `α ∈ {0, 1, …, p−1} ∪ (p−1, ∞)`.
pub fn berezin_admissible(alpha: f64, p: usize) -> bool {
    let top = p as f64 - 1.0;
    alpha > top || (alpha >= 0.0 && alpha.fract() == 0.0)
}

/// The Gram matrix `[M_α(z_i, z_j)]`.
pub fn gram_matrix(alpha: f64, points: &[BallPoint]) -> Result<Matrix> {
    let n = points.len();
    let mut g = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = kernel_m(alpha, &points[i], &points[j])?;
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    Ok(g)
}

/// Smallest eigenvalue of the Gram matrix.
pub fn gram_min_eigenvalue(alpha: f64, points: &[BallPoint]) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::Precondition("need at least one point".into()));
    }
    Ok(gram_matrix(alpha, points)?.symmetric_eigenvalues().min())
}

/// Random ball point `k · z_t` with `t_i = |scale · N(0,1)|` and Haar `k`.
pub fn random_ball_point<R: Rng + ?Sized>(p: usize, q: usize, scale: f64, rng: &mut R) -> Result<BallPoint> {
    let t: Vec<f64> = (0..p)
        .map(|_| {
            let x: f64 = StandardNormal.sample(rng);
            (scale * x).abs().min(MAX_TORUS_COORDINATE / 2.0)
        })
        .collect();
    let k = haar_sample_k(p, q, rng);
    mobius_action(&k, &torus_ball_point(&TorusCoord::new(t), q))
}

/// `n` random ball points from stream 0 of `seed`.
pub fn random_ball_points(p: usize, q: usize, n: usize, scale: f64, seed: u64) -> Result<Vec<BallPoint>> {
    let mut rng = stream(seed, 0);
    (0..n).map(|_| random_ball_point(p, q, scale, &mut rng)).collect()
}

/// Gram-matrix positivity summary.
#[derive(Clone, Debug, Serialize)]
pub struct GramReport {
    /// Kernel parameter.
    #[serde(serialize_with = "ser_f64")]
    pub alpha: f64,
    /// Rank.
    pub p: usize,
    /// Second index.
    pub q: usize,
    /// Number of points.
    pub n_points: usize,
    /// Seed of the point set.
    pub seed: u64,
    /// Whether α lies in the Berezin set.
    pub admissible: bool,
    /// Smallest eigenvalue.
    #[serde(serialize_with = "ser_f64")]
    pub min_eigenvalue: f64,
    /// Trace (equal to `n_points`).
    #[serde(serialize_with = "ser_f64")]
    pub trace: f64,
    /// `min_eigenvalue ≥ −tolerance · trace`.
    pub positive_semidefinite: bool,
    /// Relative tolerance of the test.
    #[serde(serialize_with = "ser_f64")]
    pub tolerance: f64,
}

/// Relative tolerance of [`gram_report`].
pub const GRAM_TOLERANCE: f64 = 1e-8;

/// Gram test on `n` random points.
pub fn gram_report(alpha: f64, p: usize, q: usize, n: usize, scale: f64, seed: u64) -> Result<GramReport> {
    if p == 0 || p > q {
        return Err(Error::Precondition(format!("need 1 <= p <= q, got p={p}, q={q}")));
    }
    let pts = random_ball_points(p, q, n, scale, seed)?;
    let g = gram_matrix(alpha, &pts)?;
    let trace = g.trace();
    let min = g.symmetric_eigenvalues().min();
    Ok(GramReport {
        alpha,
        p,
        q,
        n_points: n,
        seed,
        admissible: berezin_admissible(alpha, p),
        min_eigenvalue: min,
        trace,
        positive_semidefinite: min >= -GRAM_TOLERANCE * trace,
        tolerance: GRAM_TOLERANCE,
    })
}

/// Diagnostic search for a negative Gram eigenvalue: the smallest
/// `min_eigenvalue / trace` over `trials` random point sets.  No claim is
/// attached to the outcome.
pub fn negative_eigenvalue_search(alpha: f64, p: usize, q: usize, trials: usize, n_points: usize, seed: u64) -> Result<f64> {
    let mut best = f64::INFINITY;
    for t in 0..trials {
        let pts = random_ball_points(p, q, n_points, 1.0, crate::rng::derive_seed(seed, &[t as u64]))?;
        let g = gram_matrix(alpha, &pts)?;
        best = best.min(g.symmetric_eigenvalues().min() / g.trace());
    }
    Ok(best)
}

/// B-integral parameters whose integrand is `B_α Ψ_s` (up to `2^{pα}`):
/// `σ_k = α`, `λ_p = α/2 + e_p`, `λ_j = λ_{j+1} + e_j` with `e` the Ψ exponents.
pub fn transform_params(alpha: f64, s: &[ComplexValue], q: usize) -> Result<BIntegralParams> {
    let p = s.len();
    let e = psi_exponents(s, q)?;
    let mut lambda = vec![ComplexValue::new(0.0, 0.0); p];
    lambda[p - 1] = e[p - 1] + alpha / 2.0;
    for j in (0..p - 1).rev() {
        lambda[j] = lambda[j + 1] + e[j];
    }
    BIntegralParams::new(p, q, lambda, vec![ComplexValue::new(alpha, 0.0); p])
}

/// Monte-Carlo estimate of `∫ B_α Ψ_s dλ` over the wedge section, with
/// `dλ = c · det(M−LLᵀ)^{−(p+q)/2} dL dM dN` the invariant measure
/// normalized like `det(1−zzᵀ)^{−(p+q)/2} dz` on the ball.
pub fn spherical_transform_numeric(alpha: f64, s: &[ComplexValue], q: usize, mc_samples: usize, seed: u64) -> Result<SphericalEstimate> {
    let p = s.len();
    if !(alpha > (p + q) as f64 - 1.0) {
        return Err(Error::Divergence(format!("the transform needs α > p+q−1 = {}, got {alpha}", p + q - 1)));
    }
    let params = transform_params(alpha, s, q)?;
    let scale = cayley_measure_constant(p, q)? * 2f64.powf(p as f64 * alpha);
    let mut est = monte_carlo_estimate(&params, mc_samples, seed, TRANSFORM_PROPOSAL_SCALE)?;
    est.value *= scale;
    est.std_error *= scale;
    Ok(est)
}

/// `2^α / ∏_{j=1}^p Γ(α−j+1) · ∏_k Γ(½(α−(p+q)/2+1+s_k)) Γ(½(α−(p+q)/2+1−s_k))`.
pub fn b_transform_closed(alpha: f64, s: &[ComplexValue], p: usize, q: usize) -> Result<ComplexValue> {
    if s.len() != p {
        return Err(Error::Shape(format!("expected {p} spectral values, got {}", s.len())));
    }
    let a = alpha - (p + q) as f64 / 2.0 + 1.0;
    let num: Vec<ComplexValue> = s.iter().flat_map(|&sk| [(sk + a) / 2.0, (-sk + a) / 2.0]).collect();
    let den: Vec<ComplexValue> = (1..=p).map(|j| ComplexValue::new(alpha - j as f64 + 1.0, 0.0)).collect();
    Ok(gamma_product(&num, &den)? * 2f64.powf(alpha))
}

/// The exact ratio `∫ B_α Ψ_s dλ / b_transform_closed = c · 2^{(p−1)α} · π^{p(q−1)/2}`,
/// independent of `s`.
pub fn b_transform_ratio(alpha: f64, p: usize, q: usize) -> Result<f64> {
    Ok(cayley_measure_constant(p, q)? * 2f64.powf((p as f64 - 1.0) * alpha) * std::f64::consts::PI.powf(pi_exponent(p, q)))
}
