//! Small dense kernels: log-domain determinants for the kernel matrices and
//! the smallest singular value of sampled data matrices.

mod determinant;
mod matrix;
mod svd;

pub use determinant::{
    is_below_noise_floor, logdet_lu, logdet_lu_with_error, sqrt_det_antisymmetric, NOISE_FLOOR, UNRELIABLE_DET_ERROR,
};
pub use matrix::{gram, ComplexMatrix, Matrix, RealMatrix, Scalar, SignedLogMatrix};
pub use svd::{bidiagonal_singular_values, singular_values, smallest_singular_value};
