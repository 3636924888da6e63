//! Numerical checks of the weak Markov property: the peeling equation for
//! a^p_v(λ) = C_p(λ)λ^v and complete monotonicity of mixtures.

use std::str::FromStr;

use nalgebra::{Matrix3, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact_enum::{
    adaptive_table, partition_function, polygon_counts_closed_form, PolygonCountTable,
};
use crate::hyper_constants::{h_of_lambda, ln_c_p, LAMBDA_C};

/// Finite mixture Σ w_i δ_{λ_i} of PSHT parameters.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MixtureSpec {
    atoms: Vec<(f64, f64)>,
}

impl MixtureSpec {
    /// Weights must be positive and sum to 1 (to 1e−12); atoms distinct.
    pub fn new(atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::Domain("mixture needs at least one atom".into()));
        }
        for &(l, w) in &atoms {
            if !(l > 0.0 && l <= LAMBDA_C) {
                return Err(Error::Domain(format!("atom {l} outside (0, lambda_c]")));
            }
            if !(w > 0.0) {
                return Err(Error::Domain(format!("weight {w} must be positive")));
            }
        }
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!("weights sum to {total}, not 1")));
        }
        for (i, a) in atoms.iter().enumerate() {
            if atoms[..i].iter().any(|b| b.0 == a.0) {
                return Err(Error::Domain(format!("repeated atom {}", a.0)));
            }
        }
        Ok(MixtureSpec { atoms })
    }

    pub fn single(lambda: f64) -> Result<Self> {
        Self::new(vec![(lambda, 1.0)])
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }
}

impl FromStr for MixtureSpec {
    type Err = Error;

    /// Parses `l1:w1,l2:w2,...`.
    fn from_str(s: &str) -> Result<Self> {
        let atoms = s
            .split(',')
            .map(|part| {
                let (l, w) = part
                    .split_once(':')
                    .ok_or_else(|| Error::Domain(format!("atom '{part}' is not l:w")))?;
                let parse = |x: &str| {
                    x.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Domain(format!("bad number '{x}'")))
                };
                Ok((parse(l)?, parse(w)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(atoms)
    }
}

/// a^p_v[μ] = Σ w_i C_p(λ_i) λ_i^v.
pub fn apv(spec: &MixtureSpec, p: usize, v: usize) -> Result<f64> {
    if p == 0 || v < p {
        return Err(Error::Domain(format!("need v >= p >= 1, got p={p}, v={v}")));
    }
    let mut total = 0.0;
    for &(l, w) in &spec.atoms {
        total += w * (ln_c_p(l, p)? + v as f64 * l.ln()).exp();
    }
    if total > 1.0 + 1e-12 {
        return Err(Error::CrossCheck(format!("a^{p}_{v} = {total} exceeds 1")));
    }
    Ok(total)
}

#[derive(Clone, Debug, Serialize)]
pub struct PeelingResidual {
    pub lambda: f64,
    pub p: usize,
    pub new_vertex_term: f64,
    /// 2 Z_{i+1} C_{p−i}/C_p for i = 0..p.
    pub swallow_terms: Vec<f64>,
    pub residual: f64,
    pub j_max: usize,
}

/// |1 − λC_{p+1}/C_p − 2 Σ_{i<p} Z_{i+1}(λ) C_{p−i}/C_p|, the peeling equation
/// divided by C_p λ^v. Ratios of C use S_{m} = Σ_{q≤m} binom(2q,q)h^q directly.
pub fn peeling_identity_residual(
    lambda: f64,
    p: usize,
    rel_tol: f64,
    table: &PolygonCountTable,
) -> Result<PeelingResidual> {
    if p == 0 {
        return Err(Error::Domain("p must be >= 1".into()));
    }
    let h = h_of_lambda(lambda)?;
    let g = 8.0 + 1.0 / h;
    let s = crate::hyper_constants::central_binomial_partial_sums(h, p);
    // C_{p'}/C_p = g^{p'−p} S_{p'−1}/S_{p−1}
    let ratio = |pp: usize| g.powi(pp as i32 - p as i32) * s[pp - 1] / s[p - 1];
    let new_vertex_term = lambda * ratio(p + 1);
    let swallow_terms = (0..p)
        .map(|i| Ok(2.0 * partition_function(i + 1, lambda, rel_tol, table)? * ratio(p - i)))
        .collect::<Result<Vec<f64>>>()?;
    let residual = (1.0 - new_vertex_term - swallow_terms.iter().sum::<f64>()).abs();
    Ok(PeelingResidual {
        lambda,
        p,
        new_vertex_term,
        swallow_terms,
        residual,
        j_max: table.j_max(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PeelingCheck {
    pub lambda: f64,
    pub tol: f64,
    pub residuals: Vec<PeelingResidual>,
    /// Residuals recomputed with the truncation doubled.
    pub doubled: Vec<f64>,
    pub max_residual: f64,
    pub max_doubling_change: f64,
    pub passed: bool,
}

/// Largest change under truncation doubling that still counts as stable.
pub const DOUBLING_TOL: f64 = 1e-9;

/// Runs the residual for p = 1..=p_max on the smallest certifying table and
/// again on one twice as long. Z sums are certified to `1e−3·tol`.
pub fn peeling_check(lambda: f64, p_max: usize, tol: f64) -> Result<PeelingCheck> {
    let z_tol = (tol * 1e-3).max(1e-14);
    let table = adaptive_table(p_max, lambda, z_tol)?;
    let longer = polygon_counts_closed_form(p_max, 2 * table.j_max())?;
    let mut residuals = Vec::with_capacity(p_max);
    let mut doubled = Vec::with_capacity(p_max);
    for p in 1..=p_max {
        residuals.push(peeling_identity_residual(lambda, p, z_tol, &table)?);
        doubled.push(peeling_identity_residual(lambda, p, z_tol, &longer)?.residual);
    }
    let max_residual = residuals.iter().map(|r| r.residual).fold(0.0, f64::max);
    let max_doubling_change = residuals
        .iter()
        .zip(&doubled)
        .map(|(a, b)| (a.residual - b).abs())
        .fold(0.0, f64::max);
    Ok(PeelingCheck {
        lambda,
        tol,
        residuals,
        doubled,
        max_residual,
        max_doubling_change,
        passed: max_residual < tol && max_doubling_change < DOUBLING_TOL,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct MonotonicityReport {
    pub holds: bool,
    pub checked: usize,
    /// Smallest (Δ^k a^p)_v / a^p_v seen, with its (p, k, v).
    pub min_relative: f64,
    pub worst: (usize, usize, usize),
}

/// Relative floor below which a negative difference counts as rounding.
pub const ROUNDING_FLOOR: f64 = -1e-14;

/// Checks (Δ^k a^p)_v ≥ 0 for p ≤ p_max, k ≤ k_max and p ≤ v with v + k ≤ v_max,
/// where (Δu)_v = u_v − u_{v+1}.
pub fn complete_monotonicity(
    spec: &MixtureSpec,
    p_max: usize,
    k_max: usize,
    v_max: usize,
) -> Result<MonotonicityReport> {
    if v_max < p_max + k_max {
        return Err(Error::Domain("v_max must be at least p_max + k_max".into()));
    }
    let mut report = MonotonicityReport {
        holds: true,
        checked: 0,
        min_relative: f64::INFINITY,
        worst: (0, 0, 0),
    };
    for p in 1..=p_max {
        let seq: Vec<f64> = (p..=v_max).map(|v| apv(spec, p, v)).collect::<Result<_>>()?;
        let mut diff = seq.clone();
        for k in 0..=k_max {
            for (idx, &d) in diff.iter().enumerate() {
                let v = p + idx;
                let rel = d / seq[idx];
                report.checked += 1;
                if rel < report.min_relative {
                    report.min_relative = rel;
                    report.worst = (p, k, v);
                }
                if rel < ROUNDING_FLOOR {
                    report.holds = false;
                }
            }
            diff = diff.windows(2).map(|w| w[0] - w[1]).collect();
            if diff.is_empty() {
                break;
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct HankelReport {
    pub eigenvalues: [f64; 3],
    pub positive_semidefinite: bool,
    pub rank: usize,
}

/// Eigenvalues below this count as zero.
pub const EIGEN_ZERO: f64 = 1e-10;

/// The 3×3 Hankel matrix of the moments m_v = a^1_{v+1}[μ] = Σ w_i λ_i^v.
pub fn hankel_moments(spec: &MixtureSpec) -> Result<HankelReport> {
    let m: Vec<f64> = (0..5).map(|v| apv(spec, 1, v + 1)).collect::<Result<_>>()?;
    let hk = Matrix3::from_fn(|i, j| m[i + j]);
    let mut eig: Vec<f64> = SymmetricEigen::new(hk).eigenvalues.iter().cloned().collect();
    eig.sort_by(|a, b| a.total_cmp(b));
    Ok(HankelReport {
        eigenvalues: [eig[0], eig[1], eig[2]],
        positive_semidefinite: eig[0] >= -EIGEN_ZERO,
        rank: eig.iter().filter(|e| e.abs() > EIGEN_ZERO).count(),
    })
}
