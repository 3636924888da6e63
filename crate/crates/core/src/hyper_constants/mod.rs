//! Closed-form constants of the hyperbolic family and the solvers around them.

mod exponent;
mod near_diagonal;
mod params;

pub use exponent::{f_at_half, f_at_zero, f_exponent, f_exponent_quadrature};
pub use near_diagonal::{h_u, near_diagonal_bounds, unicellular_count, NearDiagonalReport};
pub use params::{
    c_p, central_binomial_partial_sums, d_mean_inv_degree, d_of_h, d_type2, drift, h_of_lambda,
    lambda_of_h, lambda_of_theta, ln_c_p, monotonicity_inequality, monotonicity_margin,
    type2_bridge, Bridge, CpValue, Drift, HyperParams, H_C, KAPPA_C, LAMBDA_C,
};
