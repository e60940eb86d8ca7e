use thiserror::Error;

/// Errors raised by lattice construction, propagation and the analytic predictions.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("lattice needs at least 2 unit cells, got {0}")]
    TooFewCells(usize),

    #[error("site {cell}{sublattice} is outside a lattice of {n_cells} cells")]
    SiteOutOfRange {
        cell: usize,
        sublattice: char,
        n_cells: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid emitter: {0}")]
    InvalidEmitter(String),

    #[error("system has no emitters")]
    NoEmitters,

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid time grid: {0}")]
    InvalidTimeGrid(String),

    #[error(
        "norm drift {drift:.3e} exceeds tolerance {tolerance:.1e} at t={time} \
         (step {step}, horizon {horizon}, spectral half-width {half_width:.4})"
    )]
    NormDrift {
        drift: f64,
        tolerance: f64,
        time: f64,
        step: f64,
        horizon: f64,
        half_width: f64,
    },

    #[error("missing trajectory data: {0}")]
    MissingData(String),

    #[error("group velocity vanishes (emitter at a band edge); use the bound-state prediction")]
    ZeroGroupVelocity,

    #[error("self-energy evaluated on its branch cut at s={0}")]
    BranchCut(num_complex::Complex64),

    #[error("no bound-state root in the search bracket: {0}")]
    NoBoundState(String),

    #[error("prediction outside its domain: {0}")]
    OutOfDomain(String),

    #[error("spectral analysis: {0}")]
    Spectral(String),

    #[error("series does not decay: {0}")]
    NotDecaying(String),
}

pub type Result<T> = std::result::Result<T, Error>;
