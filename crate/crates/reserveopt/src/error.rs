//! Error type shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while building models, solving contracts
/// or ingesting data.
#[derive(Debug, Error)]
pub enum Error {
    /// Model parameters violate a constructor invariant.
    #[error("invalid model: {0}")]
    InvalidModel(String),

    /// Contract parameters violate a constructor invariant.
    #[error("invalid contract: {0}")]
    InvalidContract(String),

    /// A sustainability condition required by a solver does not hold.
    #[error("sustainability violation: {0}")]
    Sustainability(String),

    /// A state-space argument lies outside the interior of the model.
    #[error("point {x} outside the state space ({lo}, {hi})")]
    OutOfDomain { x: f64, lo: f64, hi: f64 },

    /// Quadrature for the eigenfunction integral failed its self-check.
    #[error("quadrature failed to converge: {context} (achieved {achieved:.3e}, wanted {wanted:.3e})")]
    Quadrature {
        context: String,
        achieved: f64,
        wanted: f64,
    },

    /// An optimizer or root finder could not produce a usable answer.
    #[error("solver failure: {0}")]
    Solver(String),

    /// Simulation left the state space or was configured inconsistently.
    #[error("simulation error: {0}")]
    Simulation(String),

    /// Input data is malformed or statistically unusable.
    #[error("data error: {0}")]
    Data(String),
}
