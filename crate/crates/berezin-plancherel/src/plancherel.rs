//! End-to-end check of the Plancherel identity
//! `∏ cosh^{−α} t_k = C · Σ_{(m,u)} w_{m,u}(α) ∫ ρ_{m,u}(s) Φ_{σ ⊕ s}(t) dy`,
//! where `σ` are the pinned coordinates, `s = i y` the free ones, and `C`
//! a single constant calibrated at `t = 0`.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gamma_special::ComplexValue;
use crate::geometry::TorusCoord;
use crate::quadrature::{integrate_axes, tensor_nodes, AxisGrid, AxisRule, Symmetry, TailModel, DEFAULT_TAIL_TARGET};
use crate::report::{ser_complex, ser_f64, ser_f64_vec};
use crate::spherical::{psi_exponents, KAverage, SphericalBatch};
use crate::symbolic::{decomposition, GammaFactorExpr, PlancherelDecomposition, SeriesConstants, SupportLabel};

/// Radii tried when choosing the truncation automatically.
const RADIUS_LADDER: [f64; 8] = [8.0, 12.0, 16.0, 24.0, 32.0, 48.0, 64.0, 96.0];

/// Unit-roundoff multiple charged per unit of absolute mass in the error budget.
pub const ROUNDING_ULPS: f64 = 64.0;

/// Reference and check parameters of the calibration.
pub const DEFAULT_ALPHA_REF: f64 = 9.0;

/// Numerical budget of a reconstruction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Budget {
    /// K-average rule for the spherical functions.
    pub k_average: KAverage,
    /// Quadrature nodes per half-axis.
    pub nodes_per_axis: usize,
    /// One-dimensional rule.
    pub rule: AxisRule,
    /// Fixed truncation radius, or `None` to pick one from the tail bound.
    pub truncation_radius: Option<f64>,
}

impl Budget {
    /// Budget with automatic radius.
    pub fn new(k_average: KAverage, nodes_per_axis: usize, rule: AxisRule) -> Self {
        Self { k_average, nodes_per_axis, rule, truncation_radius: None }
    }
}

/// Excluded parameters: `p = q` and integer `α ∈ [1, p−1]`.
pub fn check_excluded(c: &SeriesConstants, alpha: f64) -> Result<()> {
    if c.p == c.q && alpha.fract() == 0.0 && alpha >= 1.0 && alpha <= c.p as f64 - 1.0 {
        return Err(Error::Degenerate(format!("α = {alpha} is excluded for p = q = {}", c.p)));
    }
    Ok(())
}

fn grid_for(density: &GammaFactorExpr, alpha: f64, dims: usize, budget: &Budget) -> Result<(AxisGrid, f64, f64)> {
    let tails: Vec<TailModel> = (0..dims).map(|k| TailModel::from_expr(density, alpha, k)).collect();
    let abs = |y: &[f64]| -> Result<ComplexValue> {
        let s: Vec<ComplexValue> = y.iter().map(|&v| ComplexValue::new(0.0, v)).collect();
        Ok(ComplexValue::new(density.evaluate(ComplexValue::new(alpha, 0.0), &s)?.norm(), 0.0))
    };
    let radii: Vec<f64> = match budget.truncation_radius {
        Some(r) => vec![r],
        None => RADIUS_LADDER.to_vec(),
    };
    let mut last = None;
    for r in radii {
        let grid = AxisGrid::new(r, budget.nodes_per_axis, budget.rule)?;
        let out = integrate_axes(abs, dims, &grid, Symmetry::Paired, &tails)?;
        let done = out.truncation_bound <= DEFAULT_TAIL_TARGET * out.value.re;
        last = Some((grid, out.value.re, out.truncation_bound));
        if done {
            break;
        }
    }
    Ok(last.expect("at least one radius"))
}

/// Calibration of the global constant `C`.
#[derive(Clone, Debug, Serialize)]
pub struct Calibration {
    /// `C = 1 / (w_0 ∫ ρ_0 dy)` at `α_ref`.
    #[serde(serialize_with = "ser_f64")]
    pub c: f64,
    /// Reference α.
    #[serde(serialize_with = "ser_f64")]
    pub alpha_ref: f64,
    /// `w_0 ∫ ρ_0 dy` at `α_ref`.
    #[serde(serialize_with = "ser_f64")]
    pub integral: f64,
    /// Truncation bound of the integral.
    #[serde(serialize_with = "ser_f64")]
    pub truncation_bound: f64,
    /// The grid used.
    pub grid: AxisGrid,
}

fn m0_integral(c: &SeriesConstants, alpha: f64, budget: &Budget) -> Result<(f64, f64, AxisGrid)> {
    let dec = decomposition(c, alpha)?;
    let comp = dec.components.iter().find(|x| x.m == 0).ok_or_else(|| Error::Precondition("no continuous component".into()))?;
    let (grid, _, _) = grid_for(&comp.residual_density, alpha, c.p, budget)?;
    let tails: Vec<TailModel> = (0..c.p).map(|k| TailModel::from_expr(&comp.residual_density, alpha, k)).collect();
    let dens = |y: &[f64]| -> Result<ComplexValue> {
        let s: Vec<ComplexValue> = y.iter().map(|&v| ComplexValue::new(0.0, v)).collect();
        comp.residual_density.evaluate(ComplexValue::new(alpha, 0.0), &s)
    };
    let out = integrate_axes(dens, c.p, &grid, Symmetry::Paired, &tails)?;
    let w = comp.weight.re;
    Ok((w * out.value.re, w.abs() * out.truncation_bound, grid))
}

/// `C = 1 / (w_0 ∫ ρ_0 dy)` at `α_ref`, where `Φ_s(0) = 1`.
pub fn calibrate_constant(c: &SeriesConstants, alpha_ref: f64, budget: &Budget) -> Result<Calibration> {
    let h = c.half_sum_f64() - 1.0;
    if !(alpha_ref > h) {
        return Err(Error::Precondition(format!("calibration needs α_ref > (p+q)/2 − 1 = {h}, got {alpha_ref}")));
    }
    let (integral, truncation_bound, grid) = m0_integral(c, alpha_ref, budget)?;
    if !(integral > 0.0) {
        return Err(Error::Domain(format!("calibration integral {integral} is not positive")));
    }
    Ok(Calibration { c: 1.0 / integral, alpha_ref, integral, truncation_bound: truncation_bound / (integral * integral), grid })
}

/// Contribution of one support component.
#[derive(Clone, Debug, Serialize)]
pub struct ComponentContribution {
    /// Number of pinned coordinates.
    pub m: usize,
    /// Shifts of the pinned coordinates.
    pub u: Vec<u64>,
    /// Weight `w_{m,u}(α)`.
    #[serde(serialize_with = "ser_f64")]
    pub weight: f64,
    /// Pinned coordinates.
    #[serde(serialize_with = "ser_f64_vec")]
    pub fixed_coordinates: Vec<f64>,
    /// `C · w · ∫ ρ Φ dy`.
    #[serde(serialize_with = "ser_complex")]
    pub contribution: ComplexValue,
    /// Standard error from the K-average.
    #[serde(serialize_with = "ser_f64")]
    pub std_error: f64,
    /// Tail bound `C |w| Φ_{σ⊕0}(t) · tail(∫|ρ|)`.
    #[serde(serialize_with = "ser_f64")]
    pub truncation_bound: f64,
    /// Change when the quadrature nodes are halved.
    #[serde(serialize_with = "ser_f64")]
    pub discretization_estimate: f64,
    /// `|C w| Φ_{σ⊕0}(t) ∫|ρ| dy`, the size of the summed terms before cancellation.
    #[serde(serialize_with = "ser_f64")]
    pub absolute_mass: f64,
    /// The grid used (absent for purely discrete components).
    pub grid: Option<AxisGrid>,
}

/// Result of [`reconstruct`].
#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    /// The parameter α.
    #[serde(serialize_with = "ser_f64")]
    pub alpha: f64,
    /// Torus point.
    #[serde(serialize_with = "ser_f64_vec")]
    pub t: Vec<f64>,
    /// `∏ cosh^{−α} t_k`.
    #[serde(serialize_with = "ser_f64")]
    pub lhs: f64,
    /// Sum of the component contributions.
    #[serde(serialize_with = "ser_complex")]
    pub rhs: ComplexValue,
    /// `|lhs − Re rhs|`.
    #[serde(serialize_with = "ser_f64")]
    pub abs_error: f64,
    /// `|lhs − Re rhs| / |lhs|`.
    #[serde(serialize_with = "ser_f64")]
    pub rel_error: f64,
    /// Per-component breakdown.
    pub per_component: Vec<ComponentContribution>,
    /// Standard error of the total from shared K-samples.
    #[serde(serialize_with = "ser_f64")]
    pub std_error: f64,
    /// Sum of the component truncation bounds.
    #[serde(serialize_with = "ser_f64")]
    pub truncation_bound: f64,
    /// Relative uncertainty of `C` carried over from the calibration.
    #[serde(serialize_with = "ser_f64")]
    pub calibration_bound: f64,
    /// `ROUNDING_ULPS · ε · (|lhs| + Σ absolute_mass)`.
    #[serde(serialize_with = "ser_f64")]
    pub rounding_bound: f64,
    /// `3 · std_error + truncation_bound + |rhs| · calibration_bound + rounding_bound`.
    #[serde(serialize_with = "ser_f64")]
    pub error_budget: f64,
    /// `abs_error ≤ error_budget`.
    pub within_budget: bool,
    /// Sum of the component discretization estimates, reported separately.
    #[serde(serialize_with = "ser_f64")]
    pub discretization_estimate: f64,
    /// The constant `C`.
    #[serde(serialize_with = "ser_f64")]
    pub calibration_c: f64,
    /// The numerical budget.
    pub budget: Budget,
}

/// `Σ_q coef_q · exp(e_q · ln det[W]_n)` for every K-node `n`.
fn accumulate(batch: &SphericalBatch, terms: &[(Vec<ComplexValue>, ComplexValue)]) -> Vec<ComplexValue> {
    batch
        .log_minors
        .par_iter()
        .map(|lm| {
            let mut acc = ComplexValue::new(0.0, 0.0);
            for (e, coef) in terms {
                let mut x = ComplexValue::new(0.0, 0.0);
                for (ej, l) in e.iter().zip(lm) {
                    x += ej * l;
                }
                acc += coef * x.exp();
            }
            acc
        })
        .collect()
}

fn quadrature_terms(
    c: &SeriesConstants,
    alpha: f64,
    fixed: &[f64],
    density: &GammaFactorExpr,
    scale: f64,
    grid: Option<&AxisGrid>,
) -> Result<Vec<(Vec<ComplexValue>, ComplexValue)>> {
    let dims = c.p - fixed.len();
    let nodes = match grid {
        Some(g) => tensor_nodes(dims, g, Symmetry::Paired)?,
        None => vec![(Vec::new(), 1.0)],
    };
    let a = ComplexValue::new(alpha, 0.0);
    nodes
        .par_iter()
        .map(|(y, w)| {
            let free: Vec<ComplexValue> = y.iter().map(|&v| ComplexValue::new(0.0, v)).collect();
            let mut s: Vec<ComplexValue> = fixed.iter().map(|&x| ComplexValue::new(x, 0.0)).collect();
            s.extend(&free);
            let d = density.evaluate(a, &free)?;
            Ok((psi_exponents(&s, c.q)?, d * (w * scale)))
        })
        .collect()
}

impl Calibration {
    /// Relative uncertainty of `C`.
    pub fn relative_bound(&self) -> f64 {
        self.truncation_bound / self.c.abs()
    }
}

/// Evaluates both sides of the identity at `(α, t)` with the calibrated constant.
pub fn reconstruct(c: &SeriesConstants, alpha: f64, t: &TorusCoord, calibration: &Calibration, budget: &Budget) -> Result<VerificationReport> {
    let calibration_c = calibration.c;
    check_excluded(c, alpha)?;
    if t.t.len() != c.p {
        return Err(Error::Shape(format!("torus point has {} coordinates, expected {}", t.t.len(), c.p)));
    }
    let dec = decomposition(c, alpha)?;
    let batch = SphericalBatch::build(c.p, c.q, t, budget.k_average)?;
    let lhs = t.cosh_power(alpha);
    let mut totals = vec![ComplexValue::new(0.0, 0.0); batch.len()];
    let mut per_component = Vec::new();
    for comp in &dec.components {
        let w = comp.weight.re;
        let dims = c.p - comp.m;
        let mut entry = ComponentContribution {
            m: comp.m,
            u: comp.u.clone(),
            weight: w,
            fixed_coordinates: comp.fixed_coordinates.clone(),
            contribution: ComplexValue::new(0.0, 0.0),
            std_error: 0.0,
            truncation_bound: 0.0,
            discretization_estimate: 0.0,
            absolute_mass: 0.0,
            grid: None,
        };
        if w == 0.0 {
            per_component.push(entry);
            continue;
        }
        let scale = calibration_c * w;
        let (grid, mass, tail) = if dims > 0 {
            let (g, m, tb) = grid_for(&comp.residual_density, alpha, dims, budget)?;
            (Some(g), m, tb)
        } else {
            (None, 1.0, 0.0)
        };
        let terms = quadrature_terms(c, alpha, &comp.fixed_coordinates, &comp.residual_density, scale, grid.as_ref())?;
        let values = accumulate(&batch, &terms);
        let est = batch.reduce(&values);
        let mut bound_s: Vec<ComplexValue> = comp.fixed_coordinates.iter().map(|&x| ComplexValue::new(x, 0.0)).collect();
        bound_s.resize(c.p, ComplexValue::new(0.0, 0.0));
        let phi_bound = batch.estimate(&bound_s)?.value.norm();
        entry.absolute_mass = scale.abs() * phi_bound * mass;
        if let Some(g) = &grid {
            let coarse = AxisGrid::new(g.truncation_radius, (g.nodes_per_axis / 2).max(crate::quadrature::MIN_NODES), g.rule)?;
            let coarse_terms = quadrature_terms(c, alpha, &comp.fixed_coordinates, &comp.residual_density, scale, Some(&coarse))?;
            entry.discretization_estimate = (batch.reduce(&accumulate(&batch, &coarse_terms)).value - est.value).norm();
            entry.truncation_bound = scale.abs() * phi_bound * tail;
        }
        entry.contribution = est.value;
        entry.std_error = est.std_error;
        entry.grid = grid;
        for (tot, v) in totals.iter_mut().zip(&values) {
            *tot += v;
        }
        per_component.push(entry);
    }
    let total = batch.reduce(&totals);
    let truncation_bound: f64 = per_component.iter().map(|e| e.truncation_bound).sum();
    let discretization_estimate: f64 = per_component.iter().map(|e| e.discretization_estimate).sum();
    let abs_error = (lhs - total.value.re).abs();
    let calibration_bound = calibration.relative_bound();
    let mass: f64 = per_component.iter().map(|e| e.absolute_mass).sum();
    let rounding_bound = ROUNDING_ULPS * f64::EPSILON * (lhs.abs() + mass);
    let error_budget = 3.0 * total.std_error + truncation_bound + total.value.norm() * calibration_bound + rounding_bound;
    Ok(VerificationReport {
        alpha,
        t: t.t.clone(),
        lhs,
        rhs: total.value,
        abs_error,
        rel_error: abs_error / lhs.abs(),
        per_component,
        std_error: total.std_error,
        truncation_bound,
        calibration_bound,
        rounding_bound,
        error_budget,
        within_budget: abs_error <= error_budget,
        discretization_estimate,
        calibration_c,
        budget: *budget,
    })
}

/// One pair of one-sided evaluations of [`continuity_probe`].
#[derive(Clone, Debug, Serialize)]
pub struct ProbeStep {
    /// Offset δ.
    #[serde(serialize_with = "ser_f64")]
    pub delta: f64,
    /// Reconstruction at `α_0 − δ`.
    pub below: VerificationReport,
    /// Reconstruction at `α_0 + δ`.
    pub above: VerificationReport,
    /// `|Re rhs(α_0+δ) − Re rhs(α_0−δ)|`.
    #[serde(serialize_with = "ser_f64")]
    pub gap: f64,
}

/// Result of [`continuity_probe`].
#[derive(Clone, Debug, Serialize)]
pub struct ContinuityReport {
    /// Index κ of the singular line.
    pub kappa: usize,
    /// `α_0 = (p+q)/2 − 1 − 2κ`.
    #[serde(serialize_with = "ser_f64")]
    pub alpha0: f64,
    /// Offsets in decreasing order.
    pub steps: Vec<ProbeStep>,
    /// Whether the gaps decrease strictly along the steps.
    pub gaps_shrinking: bool,
}

/// Offsets used by [`continuity_probe`].
pub const PROBE_DELTAS: [f64; 3] = [0.05, 0.02, 0.01];

/// Reconstructs on both sides of the singular line `α_0 = (p+q)/2 − 1 − 2κ`.
pub fn continuity_probe(c: &SeriesConstants, kappa: usize, t: &TorusCoord, calibration: &Calibration, budget: &Budget) -> Result<ContinuityReport> {
    if c.p == c.q {
        return Err(Error::Precondition("the continuity probe needs p ≠ q: for p = q the lines meet excluded integer α".into()));
    }
    let alpha0 = c.half_sum_f64() - 1.0 - 2.0 * kappa as f64;
    let mut steps = Vec::new();
    for &delta in &PROBE_DELTAS {
        let below = reconstruct(c, alpha0 - delta, t, calibration, budget)?;
        let above = reconstruct(c, alpha0 + delta, t, calibration, budget)?;
        let gap = (above.rhs.re - below.rhs.re).abs();
        steps.push(ProbeStep { delta, below, above, gap });
    }
    let gaps_shrinking = steps.windows(2).all(|w| w[1].gap < w[0].gap);
    Ok(ContinuityReport { kappa, alpha0, steps, gaps_shrinking })
}

/// The symbolic decomposition at α with the excluded parameters rejected.
pub fn decomposition_report(c: &SeriesConstants, alpha: f64) -> Result<PlancherelDecomposition> {
    check_excluded(c, alpha)?;
    decomposition(c, alpha)
}

/// Components with nonzero weight at α.
pub fn live_labels(c: &SeriesConstants, alpha: f64) -> Result<Vec<SupportLabel>> {
    Ok(decomposition_report(c, alpha)?.components.into_iter().filter(|x| !x.vanishes).map(|x| (x.m, x.u)).collect())
}

/// Change in the live support between two α values.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SupportChange {
    /// Starting α.
    #[serde(serialize_with = "ser_f64")]
    pub from: f64,
    /// Final α.
    #[serde(serialize_with = "ser_f64")]
    pub to: f64,
    /// Labels live at `to` but not at `from`.
    pub added: Vec<SupportLabel>,
    /// Labels live at `from` but not at `to`.
    pub removed: Vec<SupportLabel>,
}

/// Support changes along a sequence of α values.
pub fn support_changes(c: &SeriesConstants, alphas: &[f64]) -> Result<Vec<SupportChange>> {
    let live: Vec<Vec<SupportLabel>> = alphas.iter().map(|&a| live_labels(c, a)).collect::<Result<_>>()?;
    Ok(alphas
        .windows(2)
        .zip(live.windows(2))
        .map(|(a, l)| SupportChange {
            from: a[0],
            to: a[1],
            added: l[1].iter().filter(|x| !l[0].contains(x)).cloned().collect(),
            removed: l[0].iter().filter(|x| !l[1].contains(x)).cloned().collect(),
        })
        .collect())
}
