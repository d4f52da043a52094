//! Berezin kernels: the matrix element B_α in three charts, Gram-matrix
//! positivity on and off the admissible set, and the spherical transform.
//!
//! Run with `cargo run --release --example berezin_kernels`.

use berezin_plancherel::berezin::{
    b_function, b_transform_closed, b_transform_ratio, berezin_admissible, gram_report, spherical_transform_numeric, ChartPoint,
};
use berezin_plancherel::geometry::{cayley_to_wedge, torus_ball_point, TorusCoord};
use berezin_plancherel::ComplexValue;

fn main() -> berezin_plancherel::Result<()> {
    let (p, q, alpha) = (2, 3, 2.5);
    let t = TorusCoord::new(vec![0.6, 0.25]);
    let z = torus_ball_point(&t, q);
    let w = cayley_to_wedge(&z)?;
    for pt in [ChartPoint::Torus(t.clone()), ChartPoint::Ball(z), ChartPoint::Wedge(w)] {
        let name = serde_json::to_value(&pt).unwrap()["chart"].as_str().unwrap_or("?").to_string();
        println!("B_α in the {name:5} chart: {:.14}", b_function(alpha, &pt)?);
    }

    println!();
    for a in [0.0, 0.5, 1.0, 1.5, 3.0] {
        let r = gram_report(a, p, q, 25, 1.0, 17)?;
        println!("α={a}: admissible={} min eigenvalue {:.3e} (psd={})", berezin_admissible(a, p), r.min_eigenvalue, r.positive_semidefinite);
    }

    let (p, q) = (1, 3);
    let alpha = 7.0;
    let ratio = b_transform_ratio(alpha, p, q)?;
    println!("\nspherical transform of B_α, (1,3), α={alpha}:");
    for y in [0.0, 0.8, 2.0] {
        let s = [ComplexValue::new(0.0, y)];
        let closed = b_transform_closed(alpha, &s, p, q)? * ratio;
        let num = spherical_transform_numeric(alpha, &s, q, 400_000, 23)?;
        println!("  s={y}i: closed {:.6}  MC {:.6} ± {:.1e}", closed.re, num.value.re, num.std_error);
    }
    Ok(())
}
