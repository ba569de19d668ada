use thiserror::Error;

/// Errors produced by graph loading and the numerical pipelines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("argument z must be nonzero")]
    ZeroArgument,

    #[error("resolvent (1/z + z - D)^-1 is singular at z = {z}")]
    ResolventSingular { z: num_complex::Complex64 },

    #[error("gamma(z) is singular at z = {z} (1-norm condition {condition:.3e})")]
    GammaSingular {
        z: num_complex::Complex64,
        condition: f64,
    },

    #[error("value outside the admissible domain: {0}")]
    Domain(String),

    #[error("numerical rank is ambiguous: {0}")]
    RankAmbiguous(String),

    #[error("eigenbranch matching is ambiguous at x = {x} (best overlap {overlap:.3})")]
    MatchingAmbiguous { x: f64, overlap: f64 },

    #[error("branch {branch} has no zero at x = {x0} (eigenvalue {value:.3e})")]
    NoCrossing { branch: usize, x0: f64, value: f64 },

    #[error("phase step still {step:.3} rad near k = {k} after maximal refinement")]
    RefinementExhausted { k: f64, step: f64 },

    #[error("accumulated phase {turns} turns is not an integer")]
    NotInteger { turns: f64 },

    #[error("quadrature stalled near k = {k}: {reason}")]
    QuadratureStalled { k: f64, reason: String },

    #[error("truncated lattice too small: {0}")]
    TruncationTooSmall(String),

    #[error("wave packet has not cleared the gadget (leakage {leakage:.3e})")]
    PacketNotCleared { leakage: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
