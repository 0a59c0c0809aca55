//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid species: {0}")]
    InvalidSpecies(String),

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("quantum number out of domain: {0}")]
    Domain(String),

    #[error("basis truncation leak: population {population:.3e} in top shells (J_max = {j_max})")]
    TruncationLeak { j_max: u32, population: f64 },

    #[error("degenerate rotor (zero angular frequency)")]
    DegenerateRotor,

    #[error("inadmissible state: {0}")]
    InadmissibleState(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("root bracketing failed: {0}")]
    BracketFailure(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
