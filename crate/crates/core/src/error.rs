use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("field length {got} does not match grid size {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("multiplier symbol is not finite at lattice index {index}")]
    NonFiniteSymbol { index: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty mode selection: no lattice frequency carries weight above {threshold:e}")]
    EmptySelection { threshold: f64 },

    #[error("non-finite field value at t = {time} (mode {mode})")]
    NonFiniteState { time: f64, mode: usize },

    #[error("quadrature did not converge: residual {residual:e}")]
    Quadrature { residual: f64 },

    #[error("eigensolver did not converge")]
    Eigensolver,
}

pub type Result<T> = std::result::Result<T, Error>;
