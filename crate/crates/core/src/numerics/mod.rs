//! Overflow-safe scalars and the special functions shared by both laws.

mod quadrature;
mod signed_log;
mod special;

pub use quadrature::adaptive_quadrature;
pub use signed_log::SignedLog;
pub use special::{bessel_i, bessel_i_scaled, log_factorial, MAX_BESSEL_ORDER};
