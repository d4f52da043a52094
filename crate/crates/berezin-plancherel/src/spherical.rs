//! Parabolic eigenfunctions Ψ_s on the wedge section and spherical
//! functions Φ_s as K-averages of Ψ_s along the torus section.
//!
//! Exponent convention: with `W = M − LLᵀ` and `ρ_1 = (p+q)/2 − 1`,
//! `Ψ_s = det W^{(ρ_1 − s_1)/2} · ∏_{j<p} det[W]_j^{(−1 + s_{p−j} − s_{p+1−j})/2}`,
//! which makes `Ψ_ρ ≡ 1` and Φ_s Weyl-invariant.

use std::num::NonZeroUsize;

use gauss_quad::{FiniteAboveNegOneF64, GaussJacobi};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gamma_special::ComplexValue;
use crate::geometry::{cayley_to_wedge, haar_sample_k, mobius_action, torus_ball_point, BallPoint, Matrix, TorusCoord, WedgePoint};
use crate::report::{ser_complex, ser_f64};
use crate::rng::{chunks, stream};

/// `ρ = ((p+q)/2 − 1, (p+q)/2 − 2, …, (q−p)/2)`.
pub fn rho_vector(p: usize, q: usize) -> Result<Vec<f64>> {
    if p == 0 || p > q {
        return Err(Error::Precondition(format!("need 1 <= p <= q, got p={p}, q={q}")));
    }
    let top = (p + q) as f64 / 2.0;
    Ok((1..=p).map(|j| top - j as f64).collect())
}

/// Exponents `e_j` with `Ψ_s = exp(Σ_j e_j ln det[W]_j)`, `j = 1..p`.
pub fn psi_exponents(s: &[ComplexValue], q: usize) -> Result<Vec<ComplexValue>> {
    let p = s.len();
    let rho = rho_vector(p, q)?;
    let mut e = Vec::with_capacity(p);
    for j in 1..p {
        e.push((s[p - j - 1] - s[p - j] - 1.0) / 2.0);
    }
    e.push((rho[0] - s[0]) / 2.0);
    Ok(e)
}

/// Ψ_s from precomputed exponents and log-minors.
pub fn psi_from_log_minors(exponents: &[ComplexValue], log_minors: &[f64]) -> ComplexValue {
    let mut acc = ComplexValue::new(0.0, 0.0);
    for (e, l) in exponents.iter().zip(log_minors) {
        acc += e * l;
    }
    acc.exp()
}

/// The parabolic eigenfunction Ψ_s at a wedge point.
pub fn psi_eigenfunction(s: &[ComplexValue], w: &WedgePoint) -> Result<ComplexValue> {
    let p = w.p();
    if s.len() != p {
        return Err(Error::Shape(format!("expected {p} spectral values, got {}", s.len())));
    }
    let e = psi_exponents(s, p + w.l.ncols())?;
    Ok(psi_from_log_minors(&e, &w.log_minors()?))
}

/// Affine parabolic action on the wedge for `p = q`:
/// `M + N ↦ a⁻¹ (M + N) a⁻ᵀ + S` with `a` lower triangular and `S` antisymmetric.
pub fn parabolic_wedge_action(a: &Matrix, skew: &Matrix, w: &WedgePoint) -> Result<WedgePoint> {
    let p = w.p();
    if w.l.ncols() != 0 {
        return Err(Error::Precondition("the parabolic action is implemented for p = q".into()));
    }
    if a.shape() != (p, p) || skew.shape() != (p, p) {
        return Err(Error::Shape(format!("need {p}×{p} blocks")));
    }
    if (0..p).any(|i| (i + 1..p).any(|j| a[(i, j)] != 0.0)) {
        return Err(Error::Precondition("a must be lower triangular".into()));
    }
    if (skew + skew.transpose()).amax() > 0.0 {
        return Err(Error::Precondition("S must be antisymmetric".into()));
    }
    let ai = a.clone().try_inverse().ok_or_else(|| Error::Singular("a is not invertible".into()))?;
    let m = &ai * &w.m * ai.transpose();
    let n = &ai * &w.n * ai.transpose() + skew;
    WedgePoint::new(w.l.clone(), (&m + m.transpose()) * 0.5, n)
}

/// Multiplier of Ψ_s under [`parabolic_wedge_action`]:
/// `exp{Σ_j (s_j − q + j) t_{q+1−j}}` with `t_i = ln|a_ii|`.
///
/// The exponent convention numbers the diagonal of `a` in reverse, so the
/// classical law `exp{Σ_j (s_j − q + j) t_j}` appears with `t` reversed.
pub fn parabolic_multiplier(s: &[ComplexValue], a: &Matrix) -> ComplexValue {
    let q = s.len();
    let mut acc = ComplexValue::new(0.0, 0.0);
    for j in 1..=q {
        let t = a[(q - j, q - j)].abs().ln();
        acc += (s[j - 1] - q as f64 + j as f64) * t;
    }
    acc.exp()
}

/// A K-average estimate with its standard error.
#[derive(Clone, Debug, Serialize)]
pub struct SphericalEstimate {
    /// Estimated value.
    #[serde(serialize_with = "ser_complex")]
    pub value: ComplexValue,
    /// Standard error (zero for deterministic rules).
    #[serde(serialize_with = "ser_f64")]
    pub std_error: f64,
    /// Number of samples or quadrature nodes.
    pub n_samples: usize,
    /// Seed, when the rule is random.
    pub seed: Option<u64>,
}

/// Rule used to average over K.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum KAverage {
    /// Haar Monte Carlo with `samples` draws.
    MonteCarlo {
        /// Number of Haar samples.
        samples: usize,
        /// Seed of the sample stream.
        seed: u64,
    },
    /// Exact rank-one reduction for `p = 1`: Gauss–Jacobi in the first
    /// coordinate of a uniform unit vector of ℝ^q.
    RankOne {
        /// Number of quadrature nodes.
        nodes: usize,
    },
}

/// Log-minors of Ψ at the K-orbit nodes of one torus point, reusable across `s`.
#[derive(Clone, Debug)]
pub struct SphericalBatch {
    /// Rank.
    pub p: usize,
    /// Second index.
    pub q: usize,
    /// The torus point.
    pub t: TorusCoord,
    /// `ln det[W]_j` per node.
    pub log_minors: Vec<Vec<f64>>,
    /// Node weights, summing to one.
    pub weights: Vec<f64>,
    /// The rule that produced the nodes.
    pub rule: KAverage,
}

fn log_minors_at(z: &BallPoint) -> Result<Vec<f64>> {
    cayley_to_wedge(z)?.log_minors()
}

fn rank_one_nodes(q: usize, nodes: usize) -> Result<Vec<(f64, f64)>> {
    if q == 1 {
        return Ok(vec![(-1.0, 0.5), (1.0, 0.5)]);
    }
    let n = NonZeroUsize::new(nodes).ok_or_else(|| Error::Precondition("need at least one node".into()))?;
    let a = FiniteAboveNegOneF64::new((q as f64 - 3.0) / 2.0).expect("exponent above -1 for q >= 2");
    let rule = GaussJacobi::new(n, a, a);
    let pairs: Vec<(f64, f64)> = rule.nodes().copied().zip(rule.weights().copied()).collect();
    let total: f64 = pairs.iter().map(|(_, w)| w).sum();
    Ok(pairs.into_iter().map(|(x, w)| (x, w / total)).collect())
}

impl SphericalBatch {
    /// Builds the nodes for the torus point `t` of O(p,q) under `rule`.
    pub fn build(p: usize, q: usize, t: &TorusCoord, rule: KAverage) -> Result<Self> {
        if t.t.len() != p {
            return Err(Error::Shape(format!("torus point has {} coordinates, expected {p}", t.t.len())));
        }
        rho_vector(p, q)?;
        let zt = torus_ball_point(t, q);
        let (log_minors, weights) = match rule {
            KAverage::MonteCarlo { samples, seed } => {
                if samples == 0 {
                    return Err(Error::Precondition("need at least one sample".into()));
                }
                let per_chunk: Vec<Result<Vec<Vec<f64>>>> = chunks(samples)
                    .into_par_iter()
                    .enumerate()
                    .map(|(ci, (start, end))| {
                        let mut rng = stream(seed, ci as u64);
                        (start..end)
                            .map(|_| {
                                let k = haar_sample_k(p, q, &mut rng);
                                log_minors_at(&mobius_action(&k, &zt)?)
                            })
                            .collect()
                    })
                    .collect();
                let mut all = Vec::with_capacity(samples);
                for c in per_chunk {
                    all.extend(c?);
                }
                (all, vec![1.0 / samples as f64; samples])
            }
            KAverage::RankOne { nodes } => {
                if p != 1 {
                    return Err(Error::Precondition("the rank-one rule needs p = 1".into()));
                }
                let r = t.t[0].tanh();
                let mut lm = Vec::new();
                let mut w = Vec::new();
                for (x, wt) in rank_one_nodes(q, nodes)? {
                    let mut z = Matrix::zeros(1, q);
                    z[(0, 0)] = r * x;
                    if q > 1 {
                        z[(0, 1)] = r * (1.0 - x * x).max(0.0).sqrt();
                    }
                    lm.push(log_minors_at(&BallPoint { z })?);
                    w.push(wt);
                }
                (lm, w)
            }
        };
        Ok(Self { p, q, t: t.clone(), log_minors, weights, rule })
    }

    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    /// True when the batch has no nodes.
    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Ψ_s at every node.
    pub fn psi_values(&self, s: &[ComplexValue]) -> Result<Vec<ComplexValue>> {
        if s.len() != self.p {
            return Err(Error::Shape(format!("expected {} spectral values, got {}", self.p, s.len())));
        }
        let e = psi_exponents(s, self.q)?;
        Ok(self.log_minors.iter().map(|l| psi_from_log_minors(&e, l)).collect())
    }

    /// Weighted mean of per-node values with its standard error.
    pub fn reduce(&self, values: &[ComplexValue]) -> SphericalEstimate {
        let mean: ComplexValue = values.iter().zip(&self.weights).map(|(v, w)| v * w).sum();
        let (std_error, seed) = match self.rule {
            KAverage::MonteCarlo { seed, .. } => {
                let n = values.len();
                let var = if n > 1 {
                    values.iter().map(|v| (v - mean).norm_sqr()).sum::<f64>() / ((n - 1) as f64)
                } else {
                    0.0
                };
                ((var / n as f64).sqrt(), Some(seed))
            }
            KAverage::RankOne { .. } => (0.0, None),
        };
        SphericalEstimate { value: mean, std_error, n_samples: values.len(), seed }
    }

    /// Estimate of Φ_s(t).
    pub fn estimate(&self, s: &[ComplexValue]) -> Result<SphericalEstimate> {
        Ok(self.reduce(&self.psi_values(s)?))
    }

    /// `Φ_{Re s}(t) − |Φ_s(t)|` on the shared nodes.
    pub fn bound_margin(&self, s: &[ComplexValue]) -> Result<f64> {
        let re: Vec<ComplexValue> = s.iter().map(|x| ComplexValue::new(x.re, 0.0)).collect();
        Ok(self.estimate(&re)?.value.re - self.estimate(s)?.value.norm())
    }
}

/// Monte-Carlo estimate of Φ_s(t) for O(p,q) with `p = s.len()`.
pub fn spherical_function(s: &[ComplexValue], t: &TorusCoord, q: usize, n_samples: usize, seed: u64) -> Result<SphericalEstimate> {
    SphericalBatch::build(s.len(), q, t, KAverage::MonteCarlo { samples: n_samples, seed })?.estimate(s)
}

/// `Φ_{Re s}(t) − |Φ_s(t)|` with shared Haar samples.
pub fn spherical_bound_margin(s: &[ComplexValue], t: &TorusCoord, q: usize, n_samples: usize, seed: u64) -> Result<f64> {
    SphericalBatch::build(s.len(), q, t, KAverage::MonteCarlo { samples: n_samples, seed })?.bound_margin(s)
}
