//! Numerical kernels shared by the physics modules.

mod quadrature;
mod roots;
mod volterra;

pub use quadrature::{integrate_interval, integrate_semi_infinite, QuadResult, MAX_SUBDIVISIONS};
pub use roots::find_root_bracketed;
pub use volterra::{
    solve_volterra_sampled, solve_volterra_scalar, uniform_grid_len, VolterraOptions,
};

/// Default absolute and relative quadrature tolerance.
pub const QUAD_TOL: f64 = 1.0e-10;
/// Default `x` and `g` tolerance for root finding.
pub const ROOT_TOL: f64 = 1.0e-10;
