use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error(
        "quadrature did not converge after {subdivisions} subdivisions \
         (best estimate {estimate}, error bound {error_bound:e})"
    )]
    QuadratureNonConvergence {
        estimate: num_complex::Complex64,
        error_bound: f64,
        subdivisions: usize,
    },

    #[error("invalid bracket: g(a) = {ga}, g(b) = {gb} have the same sign")]
    InvalidBracket { ga: f64, gb: f64 },

    #[error("root finder did not converge in {0} iterations")]
    RootNonConvergence(usize),

    #[error("bracket expansion reached |E| = {0} without a sign change")]
    BracketExpansion(f64),

    #[error("non-finite value in Volterra solve at step {step}")]
    NonFinite { step: usize },

    #[error("non-physical amplitudes: |c_m|^2 + |c_n|^2 = {0}")]
    NonPhysical(f64),

    #[error("invalid two-qubit state: {0}")]
    InvalidState(String),
}
