use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("beta must be 1 or 2, got {0}")]
    InvalidBeta(u32),

    #[error("dimensions must satisfy 1 <= p <= n, got p={p}, n={n}")]
    InvalidDimensions { p: usize, n: usize },

    #[error("beta=1 needs n-p-1 to be even and non-negative (integer gamma), got p={p}, n={n}")]
    HalfIntegerGamma { p: usize, n: usize },

    #[error("spectrum has {spectrum} eigenvalues but the ensemble has p={p}")]
    SpectrumMismatch { spectrum: usize, p: usize },

    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("matrix is not square-compatible: {0}")]
    Shape(String),

    #[error("matrix is not antisymmetric (entry ({row}, {col}))")]
    NotAntisymmetric { row: usize, col: usize },

    #[error("quadrature did not converge on [{a}, {b}] at maximum depth")]
    QuadratureDiverged { a: f64, b: f64 },

    #[error("empty sample set")]
    EmptySamples,

    #[error("all samples are equal; histogram range is degenerate")]
    DegenerateSamples,
}
