//! Error type shared across the crate.

use std::fmt;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors reported by polynomial construction, assembly, and reconstruction.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// The sign-change scan reached the Cauchy root bound without finding
    /// a positive root. Signals a malformed polynomial.
    NoPositiveRoot { order: usize },
    /// |B_{4(n+1)}(mu_n)| fell below the machine threshold in the H_n formula.
    DegenerateDenominator { n: usize, value: f64 },
    /// A quadrature integrand sample was NaN or infinite.
    QuadratureNonFinite { k: usize },
    /// A requested grid point lies outside the declared solution domain.
    GridOutOfDomain {
        axis: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },
    /// The field vanishes at t = 0, so no normalization scale exists.
    ZeroField,
    /// A configuration invariant was violated.
    InvalidConfig(String),
    /// A pipeline stage failed; carries the expansion order it failed at.
    PipelineStage { n0: usize, source: Box<Error> },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NoPositiveRoot { order } => {
                write!(
                    f,
                    "no positive real root found for polynomial of order {order}"
                )
            }
            Error::DegenerateDenominator { n, value } => {
                write!(
                    f,
                    "degenerate denominator B_{{4({n}+1)}}(mu_{n}) = {value:e}"
                )
            }
            Error::QuadratureNonFinite { k } => {
                write!(f, "non-finite quadrature sample in integral k = {k}")
            }
            Error::GridOutOfDomain {
                axis,
                value,
                lo,
                hi,
            } => {
                write!(f, "{axis} grid point {value} outside [{lo}, {hi}]")
            }
            Error::ZeroField => write!(f, "field is zero at t = 0; cannot normalize"),
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
            Error::PipelineStage { n0, source } => {
                write!(f, "pipeline failed at N0 = {n0}: {source}")
            }
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::PipelineStage { source, .. } => Some(source),
            _ => None,
        }
    }
}
