//! Tensor-product rules over products of imaginary axes with exponential
//! tail bounds, and seed-disciplined Monte-Carlo means.
//!
//! Axis integrals are written in the real variable `y` with `s = i y`.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gamma_special::ComplexValue;
use crate::report::ser_f64;
use crate::rng::{chunks, stream, Stream};
use crate::spherical::SphericalEstimate;
use crate::symbolic::affine::to_f64;
use crate::symbolic::GammaFactorExpr;

/// Largest number of axes handled by tensor-product grids.
pub const MAX_GRID_DIMS: usize = 3;

/// Smallest number of nodes per axis.
pub const MIN_NODES: usize = 8;

/// Relative tail target of [`auto_radius`].
pub const DEFAULT_TAIL_TARGET: f64 = 1e-9;

/// Largest radius tried by [`auto_radius`].
pub const MAX_RADIUS: f64 = 400.0;

/// One-dimensional rule on a truncated axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisRule {
    /// Composite trapezoid rule.
    Trapezoid,
    /// Gauss–Legendre.
    GaussLegendre,
    /// Gauss–Legendre in `x` with `y = R x²` on each half-axis, which
    /// clusters nodes near `y = 0`.
    GradedGaussLegendre,
}

/// How the rule uses the symmetry `y_k ↦ −y_k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Symmetry {
    /// Full rule on `[−R, R]`.
    None,
    /// Integrand assumed even: half-axis rule times `2^dims`.
    Even,
    /// Half-axis rule summed over all sign patterns, so odd parts cancel exactly.
    Paired,
}

/// A truncated tensor-product grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AxisGrid {
    /// Truncation radius `R`.
    #[serde(serialize_with = "ser_f64")]
    pub truncation_radius: f64,
    /// Nodes per axis (per half-axis for folded rules).
    pub nodes_per_axis: usize,
    /// The one-dimensional rule.
    pub rule: AxisRule,
}

impl AxisGrid {
    /// Checked constructor.
    pub fn new(truncation_radius: f64, nodes_per_axis: usize, rule: AxisRule) -> Result<Self> {
        if !(truncation_radius > 0.0) || !truncation_radius.is_finite() {
            return Err(Error::Precondition(format!("truncation radius must be positive, got {truncation_radius}")));
        }
        if nodes_per_axis < MIN_NODES {
            return Err(Error::Precondition(format!("need at least {MIN_NODES} nodes per axis, got {nodes_per_axis}")));
        }
        Ok(Self { truncation_radius, nodes_per_axis, rule })
    }

    /// The same grid with twice the nodes.
    pub fn refined(&self) -> Self {
        Self { nodes_per_axis: 2 * self.nodes_per_axis, ..*self }
    }

    /// Nodes and weights on `[0, R]`.
    pub fn half_axis(&self) -> Vec<(f64, f64)> {
        let r = self.truncation_radius;
        let n = self.nodes_per_axis;
        match self.rule {
            AxisRule::Trapezoid => trapezoid(0.0, r, n),
            AxisRule::GaussLegendre => legendre(0.0, r, n),
            AxisRule::GradedGaussLegendre => {
                legendre(0.0, 1.0, n).into_iter().map(|(x, w)| (r * x * x, w * 2.0 * r * x)).collect()
            }
        }
    }

    /// Nodes and weights on `[−R, R]`.
    pub fn full_axis(&self) -> Vec<(f64, f64)> {
        let r = self.truncation_radius;
        match self.rule {
            AxisRule::Trapezoid => trapezoid(-r, r, self.nodes_per_axis),
            AxisRule::GaussLegendre => legendre(-r, r, self.nodes_per_axis),
            AxisRule::GradedGaussLegendre => {
                let half = self.half_axis();
                let mut v: Vec<(f64, f64)> = half.iter().rev().map(|&(y, w)| (-y, w)).collect();
                v.extend(half);
                v
            }
        }
    }
}

fn trapezoid(a: f64, b: f64, n: usize) -> Vec<(f64, f64)> {
    let h = (b - a) / (n - 1) as f64;
    (0..n).map(|i| (a + h * i as f64, if i == 0 || i == n - 1 { h / 2.0 } else { h })).collect()
}

fn legendre(a: f64, b: f64, n: usize) -> Vec<(f64, f64)> {
    let rule = GaussLegendre::new(NonZeroUsize::new(n).expect("n >= MIN_NODES"));
    let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
    rule.nodes().zip(rule.weights()).map(|(&x, &w)| (mid + half * x, half * w)).collect()
}

/// Decay model `|f| ≲ |y|^power · e^{−rate |y|}` along one axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TailModel {
    /// Exponential rate.
    #[serde(serialize_with = "ser_f64")]
    pub rate: f64,
    /// Polynomial power.
    #[serde(serialize_with = "ser_f64")]
    pub power: f64,
}

impl TailModel {
    /// Model of a Gamma-product expression along the imaginary axis of variable `k`.
    ///
    /// Uses `|Γ(a + i c y)| ~ √(2π) |c y|^{a−½} e^{−π|c y|/2}` for every
    /// factor involving `s_k`, with `a` the real part at real `α` and
    /// imaginary values of the other variables.
    pub fn from_expr(expr: &GammaFactorExpr, alpha: f64, k: usize) -> Self {
        let mut rate = 0.0;
        let mut power = 0.0;
        for g in &expr.gamma_factors {
            let c = to_f64(&g.form.c_s[k]);
            if c == 0.0 {
                continue;
            }
            let a = to_f64(&g.form.c0) + alpha * to_f64(&g.form.c_alpha);
            rate += g.mult as f64 * c.abs() * std::f64::consts::FRAC_PI_2;
            power += g.mult as f64 * (a - 0.5);
        }
        for f in &expr.poly_factors {
            if !num::Zero::is_zero(&f.form.c_s[k]) {
                power += f.pow as f64;
            }
        }
        Self { rate, power }
    }

    /// Upper bound of `∫_R^∞ (y/R)^power e^{−rate (y−R)} dy`, infinite when the model does not decay at `R`.
    pub fn tail_factor(&self, r: f64) -> f64 {
        let eff = self.rate - self.power.max(0.0) / r;
        if eff > 0.0 {
            1.0 / eff
        } else {
            f64::INFINITY
        }
    }
}

/// Result of [`integrate_axes`].
#[derive(Clone, Copy, Debug, Serialize)]
pub struct AxisIntegral {
    /// The truncated integral.
    #[serde(serialize_with = "crate::report::ser_complex")]
    pub value: ComplexValue,
    /// Estimated bound on the discarded tail.
    #[serde(serialize_with = "ser_f64")]
    pub truncation_bound: f64,
    /// The grid used.
    pub grid: AxisGrid,
}

fn tensor_sum<F>(f: &F, axes: &[Vec<(f64, f64)>], fixed: Option<(usize, f64)>, abs: bool, signs: bool) -> Result<ComplexValue>
where
    F: Fn(&[f64]) -> Result<ComplexValue> + Sync,
{
    let dims = axes.len() + usize::from(fixed.is_some());
    let free: Vec<usize> = (0..dims).filter(|&d| fixed.map_or(true, |(k, _)| k != d)).collect();
    let eval = |y: &mut Vec<f64>, idx: &[usize]| -> Result<ComplexValue> {
        let mut w = 1.0;
        for (slot, &d) in free.iter().enumerate() {
            let (x, wx) = axes[slot][idx[slot]];
            y[d] = x;
            w *= wx;
        }
        if let Some((k, x)) = fixed {
            y[k] = x;
        }
        let mut total = ComplexValue::new(0.0, 0.0);
        let patterns = if signs { 1usize << free.len() } else { 1 };
        let base = y.clone();
        for pat in 0..patterns {
            for (slot, &d) in free.iter().enumerate() {
                y[d] = if pat >> slot & 1 == 1 { -base[d] } else { base[d] };
            }
            let v = f(y)?;
            total += if abs { ComplexValue::new(v.norm(), 0.0) } else { v };
        }
        Ok(total * w)
    };
    if free.is_empty() {
        let mut y = vec![0.0; dims];
        return eval(&mut y, &[]);
    }
    let first = axes[0].len();
    let inner: Vec<usize> = axes[1..].iter().map(Vec::len).collect();
    let inner_count: usize = inner.iter().product();
    let partial: Vec<Result<ComplexValue>> = (0..first)
        .into_par_iter()
        .map(|i0| {
            let mut y = vec![0.0; dims];
            let mut idx = vec![0usize; free.len()];
            idx[0] = i0;
            let mut acc = ComplexValue::new(0.0, 0.0);
            for flat in 0..inner_count {
                let mut r = flat;
                for (slot, &len) in inner.iter().enumerate().rev() {
                    idx[slot + 1] = r % len;
                    r /= len;
                }
                acc += eval(&mut y, &idx)?;
            }
            Ok(acc)
        })
        .collect();
    let mut sum = ComplexValue::new(0.0, 0.0);
    for p in partial {
        sum += p?;
    }
    Ok(sum)
}

/// Integral of `f` over `ℝ^dims` truncated to `[−R, R]^dims`, with a tail bound.
///
/// `tails` holds one model per axis, or a single model used for all axes.
/// The bound is `Σ_k (∫_{face k} |f|) · tail_factor_k(R)`.
pub fn integrate_axes<F>(f: F, dims: usize, grid: &AxisGrid, symmetry: Symmetry, tails: &[TailModel]) -> Result<AxisIntegral>
where
    F: Fn(&[f64]) -> Result<ComplexValue> + Sync,
{
    if dims > MAX_GRID_DIMS {
        return Err(Error::Budget(format!("{dims} axes exceed the grid limit {MAX_GRID_DIMS}; use Monte Carlo")));
    }
    if dims > 0 && tails.len() != 1 && tails.len() != dims {
        return Err(Error::Shape(format!("need 1 or {dims} tail models, got {}", tails.len())));
    }
    let half = grid.half_axis();
    let full = grid.full_axis();
    let (axis, scale, signs) = match symmetry {
        Symmetry::None => (&full, 1.0, false),
        Symmetry::Even => (&half, 2f64.powi(dims as i32), false),
        Symmetry::Paired => (&half, 1.0, true),
    };
    let axes = vec![axis.clone(); dims];
    let value = tensor_sum(&f, &axes, None, false, signs)? * scale;
    let r = grid.truncation_radius;
    let mut bound = 0.0;
    for k in 0..dims {
        let model = if tails.len() == 1 { tails[0] } else { tails[k] };
        let others = vec![full.clone(); dims - 1];
        let face = tensor_sum(&f, &others, Some((k, r)), true, false)?.re + tensor_sum(&f, &others, Some((k, -r)), true, false)?.re;
        bound += face * model.tail_factor(r);
    }
    Ok(AxisIntegral { value, truncation_bound: bound, grid: *grid })
}

/// Grows the radius by factors of 1.5 from `start` until the tail bound is
/// below `target` times the integral, keeping the node density per unit length.
pub fn auto_radius<F>(f: F, dims: usize, start: &AxisGrid, symmetry: Symmetry, tails: &[TailModel], target: f64) -> Result<AxisIntegral>
where
    F: Fn(&[f64]) -> Result<ComplexValue> + Sync,
{
    let density = start.nodes_per_axis as f64 / start.truncation_radius;
    let mut grid = *start;
    loop {
        let out = integrate_axes(&f, dims, &grid, symmetry, tails)?;
        if out.truncation_bound <= target * out.value.norm() || out.truncation_bound == 0.0 {
            return Ok(out);
        }
        let r = grid.truncation_radius * 1.5;
        if r > MAX_RADIUS {
            return Ok(out);
        }
        let n = ((density * r).ceil() as usize).max(start.nodes_per_axis);
        grid = AxisGrid::new(r, n, grid.rule)?;
    }
}

/// Nodes and weights of the tensor rule on `ℝ^dims`, with sign patterns
/// expanded for [`Symmetry::Paired`] and folded for [`Symmetry::Even`].
pub fn tensor_nodes(dims: usize, grid: &AxisGrid, symmetry: Symmetry) -> Result<Vec<(Vec<f64>, f64)>> {
    if dims > MAX_GRID_DIMS {
        return Err(Error::Budget(format!("{dims} axes exceed the grid limit {MAX_GRID_DIMS}; use Monte Carlo")));
    }
    let (axis, scale, signs) = match symmetry {
        Symmetry::None => (grid.full_axis(), 1.0, false),
        Symmetry::Even => (grid.half_axis(), 2f64.powi(dims as i32), false),
        Symmetry::Paired => (grid.half_axis(), 1.0, true),
    };
    let mut out: Vec<(Vec<f64>, f64)> = vec![(Vec::new(), scale)];
    for _ in 0..dims {
        let mut next = Vec::with_capacity(out.len() * axis.len() * if signs { 2 } else { 1 });
        for (y, w) in &out {
            for &(x, wx) in &axis {
                let flips: &[f64] = if signs { &[1.0, -1.0] } else { &[1.0] };
                for &sg in flips {
                    let mut v = y.clone();
                    v.push(sg * x);
                    next.push((v, w * wx));
                }
            }
        }
        out = next;
    }
    Ok(out)
}

/// Per-sample values `f(x)·w` for `n` draws of `sampler`, chunked by [`chunks`]
/// with chunk `i` using stream `i` of `seed`.
pub fn mc_values<T, S, F>(sampler: S, f: F, n: usize, seed: u64) -> Result<Vec<ComplexValue>>
where
    S: Fn(&mut Stream) -> Result<(T, f64)> + Sync,
    F: Fn(&T) -> Result<ComplexValue> + Sync,
{
    let parts: Vec<Result<Vec<ComplexValue>>> = chunks(n)
        .into_par_iter()
        .enumerate()
        .map(|(ci, (a, b))| {
            let mut rng = stream(seed, ci as u64);
            (a..b)
                .map(|_| {
                    let (x, w) = sampler(&mut rng)?;
                    Ok(f(&x)? * w)
                })
                .collect()
        })
        .collect();
    let mut out = Vec::with_capacity(n);
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}

/// Mean and standard error of per-sample values.
pub fn summarize(values: &[ComplexValue], seed: Option<u64>) -> SphericalEstimate {
    let n = values.len();
    let mean: ComplexValue = values.iter().sum::<ComplexValue>() / n.max(1) as f64;
    let var = if n > 1 { values.iter().map(|v| (v - mean).norm_sqr()).sum::<f64>() / (n - 1) as f64 } else { 0.0 };
    SphericalEstimate { value: mean, std_error: (var / n.max(1) as f64).sqrt(), n_samples: n, seed }
}

/// Weighted Monte-Carlo mean of `f` under `sampler`, with standard error.
pub fn mc_mean<T, S, F>(f: F, sampler: S, n: usize, seed: u64) -> Result<SphericalEstimate>
where
    S: Fn(&mut Stream) -> Result<(T, f64)> + Sync,
    F: Fn(&T) -> Result<ComplexValue> + Sync,
{
    if n == 0 {
        return Err(Error::Precondition("need at least one sample".into()));
    }
    Ok(summarize(&mc_values(sampler, f, n, seed)?, Some(seed)))
}
