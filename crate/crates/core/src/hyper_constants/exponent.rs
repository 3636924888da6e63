use super::params::{lambda_of_theta, LAMBDA_C};
use crate::error::{Error, Result};
use crate::numeric::integrate;

/// f(0) = log 12√3.
pub fn f_at_zero() -> f64 {
    -LAMBDA_C.ln()
}

/// f(1/2) = log(6/e).
pub fn f_at_half() -> f64 {
    6f64.ln() - 1.0
}

/// Growth exponent in τ(n, θn) = n^{2θn} exp(f(θ)n + o(n)):
///
/// f(θ) = 2θ log(12θ/e) + ∫_{2θ}^{1} log(1/λ(θ/t)) dt.
///
/// The integrand has a logarithmic singularity at t = 2θ where λ(1/2) = 0;
/// the substitution t = 2θ + s² removes it.
pub fn f_exponent(theta: f64, quad_tol: f64) -> Result<f64> {
    if !(0.0..=0.5).contains(&theta) {
        return Err(Error::Domain(format!("theta must lie in [0, 1/2], got {theta}")));
    }
    if theta == 0.0 {
        return Ok(f_at_zero());
    }
    if theta == 0.5 {
        return Ok(f_at_half());
    }
    f_exponent_quadrature(theta, quad_tol)
}

/// The quadrature form of f(θ) without the closed-form endpoint shortcuts.
pub fn f_exponent_quadrature(theta: f64, quad_tol: f64) -> Result<f64> {
    if !(0.0..=0.5).contains(&theta) {
        return Err(Error::Domain(format!("theta must lie in [0, 1/2], got {theta}")));
    }
    let first = if theta == 0.0 {
        0.0
    } else {
        2.0 * theta * (12.0 * theta).ln() - 2.0 * theta
    };
    let s_max = (1.0 - 2.0 * theta).sqrt();
    let mut failure = None;
    let integrand = |s: f64| {
        if s == 0.0 {
            return 0.0;
        }
        let t = 2.0 * theta + s * s;
        let arg = (theta / t).min(0.5);
        if arg >= 0.5 {
            return 0.0;
        }
        match lambda_of_theta(arg) {
            Ok(l) => -2.0 * s * l.ln(),
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        }
    };
    let (integral, _) = integrate(integrand, 0.0, s_max, quad_tol)?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(first + integral)
}
