//! Symbolic Plancherel densities: the Gindikin–Karpelevich density in Gamma
//! and elementary form, the large-α integrand, and the support at several α.
//!
//! Run with `cargo run --example symbolic_density`.

use berezin_plancherel::symbolic::{
    decomposition, enumerate_support, gk_density, gk_density_elementary, large_alpha_integrand, vanishing_analysis, SeriesConstants,
};
use berezin_plancherel::ComplexValue;

fn main() -> berezin_plancherel::Result<()> {
    let zero = ComplexValue::new(0.0, 0.0);
    for (p, q) in [(1, 3), (2, 3), (2, 4)] {
        let c = SeriesConstants::new(p, q)?;
        let s: Vec<ComplexValue> = (0..p).map(|k| ComplexValue::new(0.0, 0.7 + 0.4 * k as f64)).collect();
        let gamma = gk_density(&c).evaluate(zero, &s)?;
        let elem = gk_density_elementary(&c, &s)?;
        println!("(p,q)=({p},{q})  GK density at s=i·y: gamma form {:.12}  elementary {:.12}", gamma.re, elem.re);
    }

    let c = SeriesConstants::new(1, 3)?;
    println!("\nlarge-α integrand for (1,3) as JSON:\n{}", serde_json::to_string(&large_alpha_integrand(&c)).unwrap());

    let c = SeriesConstants::new(1, 5)?;
    for alpha in [3.5, 1.2, 0.5, -1.5] {
        println!("\n(1,5) α={alpha}: support {:?}", enumerate_support(&c, alpha));
        for comp in decomposition(&c, alpha)?.components {
            println!("  m={} u={:?} fixed={:?} weight={:.6e} vanishes={}", comp.m, comp.u, comp.fixed_coordinates, comp.weight.re, comp.vanishes);
        }
    }

    let c = SeriesConstants::new(2, 5)?;
    let report = vanishing_analysis(&c, -2.0)?;
    println!("\n(2,5) α=-2 vanishing analysis:");
    for e in &report.entries {
        println!("  m={} u={:?} status={:?}", e.m, e.u, e.status);
    }
    Ok(())
}
