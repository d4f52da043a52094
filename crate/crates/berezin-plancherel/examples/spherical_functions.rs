//! Spherical functions Φ_s(a_t) as K-averages of the parabolic eigenfunction
//! Ψ_s, checked against closed forms in rank one, plus the parabolic law.
//!
//! Run with `cargo run --release --example spherical_functions`.

use berezin_plancherel::geometry::{Matrix, TorusCoord, WedgePoint};
use berezin_plancherel::spherical::{
    parabolic_multiplier, parabolic_wedge_action, psi_eigenfunction, rho_vector, spherical_function, KAverage, SphericalBatch,
};
use berezin_plancherel::ComplexValue;

fn main() -> berezin_plancherel::Result<()> {
    let t = TorusCoord::new(vec![0.8]);
    for s in [0.3, 1.7] {
        let sv = [ComplexValue::new(s, 0.0)];
        let exact = (s * 0.8f64).sinh() / (s * 0.8f64.sinh());
        let quad = SphericalBatch::build(1, 3, &t, KAverage::RankOne { nodes: 64 })?.estimate(&sv)?;
        let mc = spherical_function(&sv, &t, 3, 100_000, 11)?;
        println!("(1,3) s={s}: closed {exact:.12}  rank-one {:.12}  MC {:.6} ± {:.1e}", quad.value.re, mc.value.re, mc.std_error);
    }

    let rho = rho_vector(2, 3)?;
    println!("\nρ for (2,3): {rho:?}  (Φ_ρ ≡ 1)");
    let rho_c: Vec<ComplexValue> = rho.iter().map(|&x| ComplexValue::new(x, 0.0)).collect();
    let t2 = TorusCoord::new(vec![0.7, 0.2]);
    println!("Φ_ρ(a_t) by MC: {:.6}", spherical_function(&rho_c, &t2, 3, 20_000, 3)?.value.re);
    let s = [ComplexValue::new(0.0, 0.9), ComplexValue::new(0.0, 0.4)];
    let est = spherical_function(&s, &t2, 3, 200_000, 5)?;
    println!("Φ_s(a_t) for s=(0.9i,0.4i): {:.6} ± {:.1e}", est.value.re, est.std_error);

    // Parabolic law for p = q = 2: Ψ_s(a⁻¹Ra⁻ᵀ + S) = χ_s(a) Ψ_s(R).
    let w = WedgePoint::new(Matrix::zeros(2, 0), Matrix::from_row_slice(2, 2, &[2.0, 0.3, 0.3, 1.5]), Matrix::from_row_slice(2, 2, &[0.0, 0.4, -0.4, 0.0]))?;
    let a = Matrix::from_row_slice(2, 2, &[1.3, 0.0, 0.5, 0.7]);
    let skew = Matrix::from_row_slice(2, 2, &[0.0, -0.2, 0.2, 0.0]);
    let s2 = [ComplexValue::new(0.4, 1.1), ComplexValue::new(-0.3, 0.2)];
    let lhs = psi_eigenfunction(&s2, &parabolic_wedge_action(&a, &skew, &w)?)?;
    let rhs = parabolic_multiplier(&s2, &a) * psi_eigenfunction(&s2, &w)?;
    println!("\nparabolic law: |lhs − rhs| / |rhs| = {:.2e}", (lhs - rhs).norm() / rhs.norm());
    Ok(())
}
