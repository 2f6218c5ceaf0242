//! Confidence intervals for the mean of overdispersed negative binomial data.
//!
//! The crate provides:
//!
//! - [`nb`]: the negative binomial model in its mean/dispersion
//!   parameterization, with a reproducible gamma–Poisson sampler;
//! - [`special`]: the self-contained special-function kernel (log-gamma,
//!   regularized incomplete gamma, normal/gamma/chi-square quantiles);
//! - [`estimators`]: sample moments, the method-of-moments dispersion
//!   estimate, and the growth estimators with their standard errors;
//! - [`intervals`]: six interval constructions for the mean (normal, gamma,
//!   chi-square, Bernstein, growth-by-adjustment, growth-by-removal);
//! - [`simulation`]: a deterministic, parallel Monte Carlo engine measuring
//!   coverage probability and interval length across parameter grids;
//! - [`report`]: count-file parsing, the results CSV schema, and SVG plots.
//!
//! The `nbci` binary exposes the `ci`, `simulate`, and `plot` subcommands on
//! top of these modules.

pub mod estimators;
pub mod intervals;
pub mod nb;
pub mod report;
pub mod rng;
pub mod simulation;
pub mod special;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter violated its documented domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    /// The sample cannot support the requested estimate (all zeros, n too
    /// small, ...).
    #[error("degenerate sample: {0}")]
    DegenerateSample(String),
    /// A special-function evaluation failed.
    #[error(transparent)]
    Special(#[from] special::SpecialError),
    /// Malformed input text (count files, results CSV).
    #[error("parse error: {0}")]
    Parse(String),
    /// Underlying I/O failure.
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
