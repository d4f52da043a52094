//! Error type shared by every module.

use thiserror::Error;

/// Failures raised by numeric and symbolic operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A Gamma argument sits on an uncancelled pole.
    #[error("pole: {0}")]
    Pole(String),
    /// A log-magnitude left the representable range of `f64`.
    #[error("overflow: {0}")]
    Overflow(String),
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A variable index does not name a free spectral variable.
    #[error("index error: {0}")]
    Index(String),
    /// A residue was requested at a pole of order other than one.
    #[error("pole order error: {0}")]
    PoleOrder(String),
    /// A residue was requested where the expression is regular.
    #[error("no pole: {0}")]
    NoPole(String),
    /// The component weight is singular at the requested parameter.
    #[error("degenerate parameter: {0}")]
    Degenerate(String),
    /// Matrix dimensions do not match.
    #[error("shape error: {0}")]
    Shape(String),
    /// A linear solve is numerically singular.
    #[error("singular matrix: {0}")]
    Singular(String),
    /// A real power of a non-positive determinant was requested.
    #[error("branch error: {0}")]
    Branch(String),
    /// Parameters lie outside the convergence region of an integral.
    #[error("divergence: {0}")]
    Divergence(String),
    /// A requested computation exceeds the supported budget.
    #[error("budget error: {0}")]
    Budget(String),
    /// A documented precondition does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),
}

impl Error {
    /// Short machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Pole(_) => "pole",
            Error::Overflow(_) => "overflow",
            Error::Domain(_) => "domain",
            Error::Index(_) => "index",
            Error::PoleOrder(_) => "pole_order",
            Error::NoPole(_) => "no_pole",
            Error::Degenerate(_) => "degenerate",
            Error::Shape(_) => "shape",
            Error::Singular(_) => "singular",
            Error::Branch(_) => "branch",
            Error::Divergence(_) => "divergence",
            Error::Budget(_) => "budget",
            Error::Precondition(_) => "precondition",
        }
    }

    /// Process exit code used by the command-line front end.
    ///
    /// Poles, divergences and numeric breakdowns map to 3; everything else
    /// is a precondition violation and maps to 2.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Pole(_)
            | Error::Overflow(_)
            | Error::PoleOrder(_)
            | Error::Degenerate(_)
            | Error::Singular(_)
            | Error::Divergence(_) => 3,
            _ => 2,
        }
    }
}

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
