//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by scenario parsing, model construction, and the solvers.
#[derive(Debug, Error)]
pub enum Error {
    /// A scenario file line could not be parsed (syntax, unknown key,
    /// duplicate key, or malformed value).
    #[error("scenario line {line}: {message}")]
    ScenarioParse { line: usize, message: String },

    /// The scenario file is syntactically fine but does not describe a
    /// complete configuration.
    #[error("incomplete scenario: {0}")]
    ScenarioIncomplete(String),

    /// A parameter violates its domain constraint. Carries the offending
    /// key so CLI diagnostics can name it.
    #[error("invalid parameter `{key}`: {message}")]
    InvalidParameter { key: String, message: String },

    /// A traffic class offers load but its packets never leave the system,
    /// so the reachable state set has no finite bound.
    #[error("unbounded state space: {0}")]
    UnboundedStateSpace(String),

    /// The iterative solver was asked for a non-positive tolerance.
    #[error("convergence tolerance must be positive, got {0}")]
    InvalidTolerance(f64),

    /// The direct solver hit a singular balance system. With a state space
    /// built as the reachable closure this indicates an internal bug.
    #[error("global balance system is singular (chain not irreducible)")]
    SingularSystem,

    /// Simulation configuration violates its constraints.
    #[error("invalid simulation config: {0}")]
    InvalidSimConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
