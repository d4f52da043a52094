//! Exact symbolic algebra for Gamma-product densities in α and the spectral
//! variables, the Gindikin–Karpelevich density, and the residue cascade.

pub mod affine;
pub mod density;
pub mod expr;
pub mod support;

pub use affine::{int, rat, AffineForm, Rational};
pub use density::{gk_density, gk_density_elementary, large_alpha_integrand, SeriesConstants};
pub use expr::{GammaFactor, GammaFactorExpr, PolyFactor};
pub use support::{
    cascade_expression, component_by_cascade, component_closed_form, decomposition, enumerate_support,
    vanishing_analysis, PlancherelDecomposition, SupportComponent, SupportLabel, VanishingReport, WeightStatus,
};
