use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("nuclear spin {0} is not a positive half-integer multiple")]
    InvalidNuclearSpin(f64),
    #[error("invalid species parameter: {0}")]
    InvalidSpecies(String),
    #[error("magnetic field must be non-negative and finite, got {0} T")]
    InvalidField(f64),
    #[error("level index {index} out of range 1..={count}")]
    LevelIndex { index: usize, count: usize },
    #[error("transition {u}->{d} has E_u < E_d at {field_t} T")]
    InvertedTransition { u: usize, d: usize, field_t: f64 },
    #[error("separation {0:e} m is below the 1 nm overlap limit")]
    Overlap(f64),
    #[error("invalid sample specification: {0}")]
    InvalidSample(String),
    #[error("invalid time grid: {0}")]
    InvalidGrid(String),
    #[error("curve does not decay below 1/e (minimum {min:.4} at t = {t_min:e} s)")]
    NotDecaying { min: f64, t_min: f64 },
    #[error("fit did not converge: {0}")]
    FitFailed(String),
    #[error("root bracket [{lo}, {hi}] does not straddle a sign change")]
    NoBracket { lo: f64, hi: f64 },
}

impl Error {
    /// Stable machine-readable identifier.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidNuclearSpin(_) => "invalid_nuclear_spin",
            Error::InvalidSpecies(_) => "invalid_species",
            Error::InvalidField(_) => "invalid_field",
            Error::LevelIndex { .. } => "level_index",
            Error::InvertedTransition { .. } => "inverted_transition",
            Error::Overlap(_) => "overlap",
            Error::InvalidSample(_) => "invalid_sample",
            Error::InvalidGrid(_) => "invalid_grid",
            Error::NotDecaying { .. } => "not_decaying",
            Error::FitFailed(_) => "fit_failed",
            Error::NoBracket { .. } => "no_bracket",
        }
    }
}
