//! Hermite and Laguerre functions, Gaussian tail moments, quadrature rules
//! and the independent integration oracle.

mod functions;
mod oracle;
mod quadrature;

pub use functions::{
    gaussian_tail_moment_matrix, gaussian_tail_moments, hermite_coeff_matrix, hermite_vector, laguerre_vector,
    pi_quarter_inv, TailMomentMatrix, MAX_N,
};
pub(crate) use functions::{check_n, hermite_into, laguerre_into};
pub use oracle::oracle_integrate;
pub use quadrature::{
    build_quadrature, gauss_legendre, integrate_adaptive, integrate_adaptive_scalar, AdaptiveOptions, QuadratureKind,
    QuadratureRule, QuadratureSpec, DEFAULT_SMAX,
};

/// Truncation half-width for Hermite-function integrands of size `n`.
///
/// `8` covers the Gaussian weight itself; larger `n` pushes the tails of
/// `h_{n-1}^2` out roughly like `sqrt(2n)`.
pub fn hermite_truncation(n: usize) -> f64 {
    DEFAULT_SMAX.max(4.0 + n as f64)
}

/// Truncation point for Laguerre-function integrands of size `n` on the half
/// line; `l_{n-1}^2` is below `1e-20` past it.
pub fn laguerre_truncation(n: usize) -> f64 {
    50.0 + 10.0 * n as f64
}
