//! Truncated tensor quadrature with tail bounds derived from Gamma-product
//! asymptotics, and Monte-Carlo means with standard errors.
//!
//! Run with `cargo run --example quadrature`.

use berezin_plancherel::quadrature::{auto_radius, integrate_axes, mc_mean, AxisGrid, AxisRule, Symmetry, TailModel, DEFAULT_TAIL_TARGET};
use berezin_plancherel::symbolic::{int, AffineForm, GammaFactorExpr};
use berezin_plancherel::ComplexValue;
use rand::Rng;

fn main() -> berezin_plancherel::Result<()> {
    // ∫ e^{−|y|²} dy over ℝ² = π.
    let grid = AxisGrid::new(6.0, 40, AxisRule::GaussLegendre)?;
    let gauss = integrate_axes(
        |y| Ok(ComplexValue::new((-y.iter().map(|v| v * v).sum::<f64>()).exp(), 0.0)),
        2,
        &grid,
        Symmetry::Paired,
        &[TailModel { rate: 1.0, power: 0.0 }],
    )?;
    println!("∫ e^(−|y|²) over ℝ²: {:.14} (π = {:.14}), tail bound {:.1e}", gauss.value.re, std::f64::consts::PI, gauss.truncation_bound);

    // Γ(1+s)Γ(1−s) at s = iy equals πy/sinh(πy); its integral over ℝ is π/2.
    let mut expr = GammaFactorExpr::one(1);
    expr.push_gamma(AffineForm::s(0, 1).shift(int(1)), 1);
    expr.push_gamma(-AffineForm::s(0, 1).shift(int(-1)), 1);
    let tail = TailModel::from_expr(&expr, 0.0, 0);
    println!("tail model of Γ(1+s)Γ(1−s): rate {:.6} power {}", tail.rate, tail.power);
    let f = |y: &[f64]| expr.evaluate(ComplexValue::new(0.0, 0.0), &[ComplexValue::new(0.0, y[0])]);
    let start = AxisGrid::new(4.0, 64, AxisRule::GaussLegendre)?;
    let r = auto_radius(f, 1, &start, Symmetry::Paired, &[tail], DEFAULT_TAIL_TARGET)?;
    println!(
        "∫ πy/sinh(πy) dy: {:.14} (π/2 = {:.14}) at R = {}, tail bound {:.1e}",
        r.value.re,
        std::f64::consts::FRAC_PI_2,
        r.grid.truncation_radius,
        r.truncation_bound
    );

    // Monte-Carlo mean of U² for U uniform on [0,1].
    let est = mc_mean(|u: &f64| Ok(ComplexValue::new(u * u, 0.0)), |rng| Ok((rng.random::<f64>(), 1.0)), 100_000, 5)?;
    println!("E[U²] by MC: {:.5} ± {:.1e} (exact 1/3)", est.value.re, est.std_error);
    Ok(())
}
