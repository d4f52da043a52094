//! End-to-end Plancherel verification: calibrate the global constant,
//! reconstruct the kernel from its spectral decomposition above and below
//! the singular lines, probe continuity across a line, and track support changes.
//!
//! Run with `cargo run --release --example plancherel_verify`.

use berezin_plancherel::geometry::TorusCoord;
use berezin_plancherel::plancherel::{calibrate_constant, continuity_probe, reconstruct, support_changes, Budget, DEFAULT_ALPHA_REF};
use berezin_plancherel::quadrature::AxisRule;
use berezin_plancherel::spherical::KAverage;
use berezin_plancherel::symbolic::SeriesConstants;

fn main() -> berezin_plancherel::Result<()> {
    let c = SeriesConstants::new(1, 3)?;
    let budget = Budget::new(KAverage::RankOne { nodes: 64 }, 200, AxisRule::GaussLegendre);
    let cal = calibrate_constant(&c, DEFAULT_ALPHA_REF, &budget)?;
    println!("(1,3) calibrated constant {:.15} (1/(8π) = {:.15})", cal.c, 1.0 / (8.0 * std::f64::consts::PI));
    for alpha in [6.0, 2.5] {
        for t in [0.3, 1.5] {
            let r = reconstruct(&c, alpha, &TorusCoord::new(vec![t]), &cal, &budget)?;
            println!("  α={alpha} t={t}: lhs {:.12} rhs {:.12} rel error {:.1e} ({} components)", r.lhs, r.rhs.re, r.rel_error, r.per_component.len());
        }
    }

    let c = SeriesConstants::new(1, 5)?;
    let budget = Budget::new(KAverage::RankOne { nodes: 64 }, 200, AxisRule::GradedGaussLegendre);
    let cal = calibrate_constant(&c, DEFAULT_ALPHA_REF, &budget)?;
    for t in [0.4, 1.0] {
        let r = reconstruct(&c, 1.2, &TorusCoord::new(vec![t]), &cal, &budget)?;
        println!("(1,5) α=1.2 t={t}: rel error {:.1e} with {} components", r.rel_error, r.per_component.len());
    }
    let probe = continuity_probe(&c, 0, &TorusCoord::new(vec![0.7]), &cal, &budget)?;
    let gaps: Vec<String> = probe.steps.iter().map(|s| format!("δ={} gap={:.2e}", s.delta, s.gap)).collect();
    println!("continuity at α₀={}: {} (shrinking: {})", probe.alpha0, gaps.join(", "), probe.gaps_shrinking);

    let c = SeriesConstants::new(2, 8)?;
    for ch in support_changes(&c, &[4.5, 3.5, 2.5, 1.5, 0.5])? {
        println!("(2,8) α {} → {}: added {:?} removed {:?}", ch.from, ch.to, ch.added, ch.removed);
    }
    Ok(())
}
