//! Desk-scale trend checks of the growth exponent and the ratio limit
//! along g_n = ⌊θn⌋.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact_enum::{ln_biguint, tau_ratio, CountTable};
use crate::hyper_constants::{f_exponent, lambda_of_theta};

/// Quadrature tolerance for f(θ).
pub const QUAD_TOL: f64 = 1e-12;

#[derive(Clone, Debug, Serialize)]
pub struct TrendPoint {
    pub n: usize,
    pub g: usize,
    /// (1/n)·log(τ(n,g)/n^{2g}).
    pub scaled_log: f64,
    pub dev: f64,
    /// τ(n−1,g)/τ(n,g).
    pub ratio: f64,
    pub ratio_error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct TrendReport {
    pub theta: f64,
    pub f_theta: f64,
    pub lambda_theta: f64,
    pub points: Vec<TrendPoint>,
    pub dev_nonincreasing: bool,
    pub ratio_nonincreasing: bool,
}

pub fn genus_along(theta: f64, n: usize) -> usize {
    (theta * n as f64).floor() as usize
}

/// Builds the trend report for θ over `n_list` (increasing).
pub fn asymptotics_report(table: &CountTable, theta: f64, n_list: &[usize]) -> Result<TrendReport> {
    if n_list.is_empty() || n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain("n list must be nonempty and increasing".into()));
    }
    let f_theta = f_exponent(theta, QUAD_TOL)?;
    let lambda_theta = lambda_of_theta(theta)?;
    let mut points = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let g = genus_along(theta, n);
        let tau = table
            .tau(n, g)
            .ok_or_else(|| Error::TableTooSmall(format!("tau({n},{g}) not in table")))?;
        if tau.bits() == 0 {
            return Err(Error::Domain(format!("tau({n},{g}) = 0; theta too large for n")));
        }
        let nf = n as f64;
        let scaled_log = (ln_biguint(tau) - 2.0 * g as f64 * nf.ln()) / nf;
        let ratio = tau_ratio(table, n, g)?;
        points.push(TrendPoint {
            n,
            g,
            scaled_log,
            dev: scaled_log - f_theta,
            ratio,
            ratio_error: (ratio - lambda_theta).abs(),
        });
    }
    let nonincreasing = |key: fn(&TrendPoint) -> f64| points.windows(2).all(|w| key(&w[1]) <= key(&w[0]));
    Ok(TrendReport {
        theta,
        f_theta,
        lambda_theta,
        dev_nonincreasing: nonincreasing(|p| p.dev.abs()),
        ratio_nonincreasing: nonincreasing(|p| p.ratio_error),
        points,
    })
}

/// nmax, nmax/2, nmax/4, nmax/8 in increasing order, dropping entries below 2.
pub fn halving_ladder(n_max: usize) -> Vec<usize> {
    let mut v: Vec<usize> = (0..4).map(|k| n_max >> k).filter(|&n| n >= 2).collect();
    v.reverse();
    v.dedup();
    v
}
