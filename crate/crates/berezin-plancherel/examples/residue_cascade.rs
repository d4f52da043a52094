//! The residue cascade: iterated residues of the large-α integrand compared
//! with the closed-form component weights and densities.
//!
//! Run with `cargo run --example residue_cascade`.

use berezin_plancherel::symbolic::{cascade_expression, component_by_cascade, component_closed_form, enumerate_support, SeriesConstants};
use berezin_plancherel::ComplexValue;

fn main() -> berezin_plancherel::Result<()> {
    for (p, q, alpha) in [(1, 5, 0.3), (2, 8, 0.4), (2, 7, -1.3)] {
        let c = SeriesConstants::new(p, q)?;
        println!("(p,q)=({p},{q}) α={alpha}");
        for (m, u) in enumerate_support(&c, alpha) {
            if m == 0 {
                continue;
            }
            let cascade = cascade_expression(&c, m, &u)?;
            let (wc, dc) = component_by_cascade(&c, alpha, m, &u)?;
            let (wf, df) = component_closed_form(&c, alpha, m, &u)?;
            let s: Vec<ComplexValue> = (0..p - m).map(|_| ComplexValue::new(0.0, 0.9)).collect();
            let a = ComplexValue::new(alpha, 0.0);
            let (vc, vf) = (dc.evaluate(a, &s)?, df.evaluate(a, &s)?);
            println!(
                "  m={m} u={u:?}: {} poles; weight cascade {wc:.10e} closed {wf:.10e}; density cascade {:.10e} closed {:.10e}",
                cascade.poles.len(),
                vc.re,
                vf.re
            );
        }
    }
    Ok(())
}
