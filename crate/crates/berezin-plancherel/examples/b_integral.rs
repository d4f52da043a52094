//! The matrix B-integral: closed form against Monte Carlo, the rank
//! recurrence, the Hua integral and the Dirichlet integral.
//!
//! Run with `cargo run --release --example b_integral`.

use berezin_plancherel::b_integral::{
    closed_form, dirichlet_beta, dirichlet_quadrature, hua_ball_monte_carlo, hua_specialization, monte_carlo_estimate, recurrence_check,
    BIntegralParams,
};
use berezin_plancherel::ComplexValue;

fn main() -> berezin_plancherel::Result<()> {
    for (p, q, lambda, sigma) in [(1, 1, vec![1.2], vec![2.5]), (1, 3, vec![2.0], vec![3.5]), (2, 3, vec![2.5, 2.2], vec![5.0, 5.0])] {
        let params = BIntegralParams::real(p, q, &lambda, &sigma)?;
        let closed = closed_form(&params)?;
        let mc = monte_carlo_estimate(&params, 300_000, 42, 0.5)?;
        println!(
            "(p,q)=({p},{q}) λ={lambda:?} σ={sigma:?}: closed {:.8}  MC {:.8} ± {:.1e}  z={:.2}",
            closed.re,
            mc.value.re,
            mc.std_error,
            (mc.value - closed).norm() / mc.std_error
        );
    }

    let params = BIntegralParams::real(3, 4, &[3.0, 2.6, 2.9], &[6.0, 7.0, 8.0])?;
    println!("\nrecurrence ratio for (3,4): {:.16}", recurrence_check(&params)?.ratio.re);

    for (p, q, tau) in [(1, 2, 0.5), (2, 3, 1.0)] {
        let wedge = hua_specialization(p, q, ComplexValue::new(tau, 0.0))?;
        let ball = hua_ball_monte_carlo(p, q, tau, 400_000, 9)?;
        println!("Hua ({p},{q}) τ={tau}: wedge closed form {:.6}  ball MC {:.6} ± {:.1e}", wedge.re, ball.value.re, ball.std_error);
    }

    for (a, b, c) in [(1.0, 1.0, 1.0), (2.0, 3.0, 4.0), (0.5, 0.7, 0.9)] {
        println!("Dirichlet ({a},{b},{c}): quadrature {:.15}  Gamma ratio {:.15}", dirichlet_quadrature(a, b, c)?, dirichlet_beta(a, b, c)?);
    }
    Ok(())
}
