//! Group actions and coordinates: Möbius action on the matrix ball, KAK
//! coordinates, the Cayley map to the wedge section, and Haar samples of K.
//!
//! Run with `cargo run --example geometry_charts`.

use berezin_plancherel::geometry::{
    ball_torus_coordinates, cayley_measure_constant, cayley_to_wedge, haar_sample_k, kak_coordinates, mobius_action, torus_ball_point,
    torus_element, transporter, TorusCoord,
};
use berezin_plancherel::rng::stream;

fn main() -> berezin_plancherel::Result<()> {
    let (p, q) = (2, 3);
    let t = TorusCoord::new(vec![0.9, 0.4]);
    let mut rng = stream(7, 0);

    let k = haar_sample_k(p, q, &mut rng);
    let z = mobius_action(&k, &torus_ball_point(&t, q))?;
    println!("ball point k·z_t:\n{:.6}", z.z);
    println!("recovered torus coordinates: {:?}", ball_torus_coordinates(&z)?.canonical().t);

    let g = k.compose(&torus_element(&t, q)?)?.compose(&haar_sample_k(p, q, &mut rng))?;
    println!("KAK coordinates of k₁ a_t k₂: {:?}", kak_coordinates(&g)?.canonical().t);

    let h = transporter(&z)?;
    println!("transporter maps the origin to z: gap {:.2e}", (mobius_action(&h, &berezin_plancherel::geometry::BallPoint::origin(p, q))?.z - &z.z).amax());

    let w = cayley_to_wedge(&z)?;
    println!("wedge point: W = M − LLᵀ =\n{:.6}", w.w());
    println!("Cayley measure constant for ({p},{q}): {:.12}", cayley_measure_constant(p, q)?);
    Ok(())
}
