//! Plancherel decomposition of Berezin kernel representations of O(p,q):
//! Gamma-product densities, the residue cascade, Monte-Carlo spherical
//! functions, and matrix B-integrals.

pub mod b_integral;
pub mod berezin;
pub mod cli;
pub mod error;
pub mod gamma_special;
pub mod geometry;
pub mod quadrature;
pub mod plancherel;
pub mod report;
pub mod rng;
pub mod spherical;
pub mod symbolic;

pub use error::{Error, Result};
pub use gamma_special::ComplexValue;
