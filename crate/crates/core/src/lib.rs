//! Smallest-eigenvalue statistics of correlated Wishart matrices.
//!
//! The crate evaluates, for an arbitrary set of population eigenvalues
//! `Λ₁ … Λ_p`, the gap probability `E_p(t)` (all eigenvalues of `WW†` lie in
//! `[t, ∞)`) and the smallest-eigenvalue density `P_min(t) = −E_p'(t)` for the
//! real (`β = 1`) and complex (`β = 2`) Gaussian Wishart ensembles. Both laws
//! are finite determinants of polynomial kernels whose size depends only on
//! the rectangularity `n − p`, so they stay cheap for large `p`.
//!
//! On the hard-edge scale `u = 4pη·t` the laws become universal Bessel-kernel
//! determinants, see [`microlaw`].
//!
//! A seeded Monte Carlo sampler ([`sampler`]) and goodness-of-fit tooling
//! ([`stats`]) are included to check the analytic laws against simulation.

pub mod error;
pub mod exactlaw;
pub mod linalg;
pub mod microlaw;
pub mod numerics;
pub mod sampler;
pub mod spectra;
pub mod stats;

pub use error::{Error, Result};
pub use exactlaw::{ExactLaw, KernelPolynomial, KernelTable};
pub use linalg::{ComplexMatrix, RealMatrix, SignedLogMatrix};
pub use microlaw::{MicroConfig, MicroLaw};
pub use numerics::SignedLog;
pub use sampler::{RngStream, SampleBatch};
pub use spectra::{EmpiricalSpectrum, EnsembleConfig};
pub use stats::{Histogram, KsReport};

/// A density value together with how it was obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Density {
    pub value: f64,
    /// Set when the closed-form kernel ratio was numerically singular and the
    /// value came from a finite difference of the gap probability instead.
    pub finite_difference: bool,
}
