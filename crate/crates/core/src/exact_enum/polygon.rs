use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::count_table::{ln_biguint, CountTable};
use crate::error::{Error, Result};
use crate::hyper_constants::LAMBDA_C;

/// Exact counts t_p(j) of planar type-I triangulations of a p-gon with a
/// simple boundary and j inner vertices.
///
/// Conventions: t_1(0) = 0 (a loop cannot be filled without an inner vertex)
/// and t_2(0) = 1 (a 2-gon closes by gluing its two sides).
#[derive(Clone, Debug, PartialEq)]
pub struct PolygonCountTable {
    // t[p - 1][j]
    t: Vec<Vec<BigUint>>,
    p_max: usize,
    j_max: usize,
}

impl PolygonCountTable {
    pub fn p_max(&self) -> usize {
        self.p_max
    }

    pub fn j_max(&self) -> usize {
        self.j_max
    }

    pub fn get(&self, p: usize, j: usize) -> Option<&BigUint> {
        if p == 0 {
            return None;
        }
        self.t.get(p - 1)?.get(j)
    }

    pub fn row(&self, p: usize) -> Option<&[BigUint]> {
        self.t.get(p.checked_sub(1)?).map(|r| r.as_slice())
    }

    /// Checks t_1(j) = τ(j−1,0) against a Goulden–Jackson table for
    /// 1 ≤ j ≤ min(j_max, limit).
    pub fn check_against_planar(&self, limit: usize) -> Result<()> {
        let jm = self.j_max.min(limit);
        let planar = CountTable::build(jm.saturating_sub(1), Some(0))?;
        if !self.t[0][0].is_zero() {
            return Err(Error::CrossCheck("t_1(0) must vanish".into()));
        }
        for j in 1..=jm {
            if planar.tau(j - 1, 0) != Some(&self.t[0][j]) {
                return Err(Error::CrossCheck(format!(
                    "t_1({j}) differs from tau({},0)",
                    j - 1
                )));
            }
        }
        Ok(())
    }
}

/// Polygon counts from the root-edge peeling recurrence
///
/// t_p(j) = [p=2, j=0] + t_{p+1}(j−1) + Σ_{i<p} Σ_{j1+j2=j} t_{i+1}(j1) t_{p−i}(j2),
///
/// where the middle term is the apex being a new inner vertex and the sum
/// splits the polygon at a boundary apex. Quadratic in both indices, so meant
/// for modest sizes. The p = 1 row is cross-checked against the planar
/// genus-zero counts.
pub fn polygon_counts(p_max: usize, j_max: usize) -> Result<PolygonCountTable> {
    if p_max == 0 || j_max == 0 {
        return Err(Error::Domain("polygon_counts needs p_max, j_max >= 1".into()));
    }
    // Row j needs perimeters up to p_max + (j_max - j) + 1 because of the
    // new-vertex term.
    let width = |j: usize| p_max + (j_max - j) + 1;
    // rows[j][p - 1]
    let mut rows: Vec<Vec<BigUint>> = Vec::with_capacity(j_max + 1);
    for j in 0..=j_max {
        let w = width(j);
        let mut row = vec![BigUint::zero(); w];
        for p in 1..=w {
            let mut acc = BigUint::zero();
            if p == 2 && j == 0 {
                acc += 1u32;
            }
            if j >= 1 {
                acc += &rows[j - 1][p];
            }
            for i in 0..p {
                let (a, b) = (i + 1, p - i);
                for j1 in 0..=j {
                    let j2 = j - j1;
                    let x = if j1 == j { &row[a - 1] } else { &rows[j1][a - 1] };
                    let y = if j2 == j { &row[b - 1] } else { &rows[j2][b - 1] };
                    if !x.is_zero() && !y.is_zero() {
                        acc += x * y;
                    }
                }
            }
            row[p - 1] = acc;
        }
        rows.push(row);
    }
    let t = (1..=p_max)
        .map(|p| (0..=j_max).map(|j| rows[j][p - 1].clone()).collect())
        .collect();
    let table = PolygonCountTable { t, p_max, j_max };
    table.check_against_planar(j_max)?;
    Ok(table)
}

fn double_factorial(m: i64) -> BigUint {
    let mut r = BigUint::one();
    let mut k = m;
    while k > 1 {
        r *= k as u64;
        k -= 2;
    }
    r
}

fn factorial(m: u64) -> BigUint {
    (2..=m).fold(BigUint::one(), |acc, k| acc * k)
}

/// Closed form t_p(j) = 4^{j−1} p (2p)! (2p+3j−5)!! / ((p!)² j! (2p+j−1)!!),
/// valid for all (p,j) except (1,0).
fn closed_form(p: u64, j: u64) -> BigUint {
    if p == 1 && j == 0 {
        return BigUint::zero();
    }
    let num = BigUint::from(p)
        * factorial(2 * p)
        * double_factorial(2 * p as i64 + 3 * j as i64 - 5)
        * (BigUint::one() << (2 * j));
    let pf = factorial(p);
    let den = &pf * &pf * factorial(j) * double_factorial(2 * p as i64 + j as i64 - 1) * 4u32;
    let (q, r) = num.div_rem(&den);
    assert!(r.is_zero(), "closed form not integral at ({p},{j})");
    q
}

/// Same table as [`polygon_counts`], built from the hypergeometric closed form
/// for large j. Each row follows from two exact seeds and the two-step ratio
///
/// t_p(j+2)/t_p(j) = 16(3j+2p−3)(3j+2p−1)(3j+2p+1) / ((j+1)(j+2)(j+2p+1)).
pub fn polygon_counts_closed_form(p_max: usize, j_max: usize) -> Result<PolygonCountTable> {
    if p_max == 0 || j_max == 0 {
        return Err(Error::Domain("polygon table needs p_max, j_max >= 1".into()));
    }
    let mut t = Vec::with_capacity(p_max);
    for p in 1..=p_max as u64 {
        let mut row = vec![BigUint::zero(); j_max + 1];
        let first = if p == 1 { 1 } else { 0 };
        for j in first..(first + 2).min(j_max as u64 + 1) {
            row[j as usize] = closed_form(p, j);
        }
        for j in first..=(j_max as u64).saturating_sub(2) {
            let num = 16 * (3 * j + 2 * p - 3) * (3 * j + 2 * p - 1) * (3 * j + 2 * p + 1);
            let den = (j + 1) * (j + 2) * (j + 2 * p + 1);
            let (q, r) = (&row[j as usize] * num).div_rem(&BigUint::from(den));
            if !r.is_zero() {
                return Err(Error::NonIntegral {
                    what: format!("t_{p}({})", j + 2),
                });
            }
            row[j as usize + 2] = q;
        }
        t.push(row);
    }
    let table = PolygonCountTable { t, p_max, j_max };
    table.check_against_planar(64)?;
    Ok(table)
}

/// Terms t_p(j) λ^j of the partition function, evaluated in log space.
fn terms(row: &[BigUint], lambda: f64) -> Vec<f64> {
    let ll = lambda.ln();
    row.iter()
        .enumerate()
        .map(|(j, t)| {
            if t.is_zero() {
                0.0
            } else if t.bits() < 1000 {
                t.to_f64().unwrap() * lambda.powi(j as i32)
            } else {
                (ln_biguint(t) + j as f64 * ll).exp()
            }
        })
        .collect()
}

/// Partial sum of a series of positive terms plus a tail bound, certified once
/// the last few term ratios sit at or below `r` (the terms then decay at
/// least geometrically with ratio r).
fn certified_sum(terms: &[f64], r: f64, rel_tol: f64) -> Option<(f64, f64)> {
    const WINDOW: usize = 8;
    let n = terms.len();
    if n < WINDOW + 2 {
        return None;
    }
    let sum: f64 = terms.iter().sum();
    let last = terms[n - 1];
    let stable = terms[n - WINDOW - 1..]
        .windows(2)
        .all(|w| w[1] <= r * w[0]);
    if !stable || sum == 0.0 {
        return None;
    }
    let tail = last * r / (1.0 - r);
    (tail <= rel_tol * sum).then_some((sum, tail))
}

fn check_subcritical(lambda: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda < LAMBDA_C) {
        return Err(Error::Domain(format!(
            "partition function needs 0 < lambda < lambda_c, got {lambda}"
        )));
    }
    Ok(())
}

/// Z_p(λ) = Σ_j t_p(j) λ^j with certified relative truncation error.
pub fn partition_function(
    p: usize,
    lambda: f64,
    rel_tol: f64,
    table: &PolygonCountTable,
) -> Result<f64> {
    check_subcritical(lambda)?;
    let row = table
        .row(p)
        .ok_or_else(|| Error::TableTooSmall(format!("perimeter {p} > p_max {}", table.p_max)))?;
    let ts = terms(row, lambda);
    certified_sum(&ts, lambda / LAMBDA_C, rel_tol)
        .map(|(s, _)| s)
        .ok_or_else(|| {
            Error::TableTooSmall(format!(
                "j_max {} does not certify rel_tol {rel_tol:e} for Z_{p}({lambda})",
                table.j_max
            ))
        })
}

/// Z_p(λ) and λZ_p′(λ) from the same truncation.
pub fn partition_moments(
    p: usize,
    lambda: f64,
    rel_tol: f64,
    table: &PolygonCountTable,
) -> Result<(f64, f64)> {
    let z = partition_function(p, lambda, rel_tol, table)?;
    let row = table.row(p).unwrap();
    let ts = terms(row, lambda);
    let weighted: Vec<f64> = ts.iter().enumerate().map(|(j, x)| j as f64 * x).collect();
    // j·term has ratio (j+1)/j · r; certify with a slightly looser ratio.
    let n = weighted.len() as f64;
    let r = (lambda / LAMBDA_C) * n / (n - 1.0);
    let (dz, _) = certified_sum(&weighted, r.min(1.0 - 1e-12), rel_tol)
        .ok_or_else(|| Error::TableTooSmall(format!("j_max {} too small for Z'", table.j_max)))?;
    Ok((z, dz))
}

/// Largest truncation the adaptive driver will try.
pub const J_MAX_CAP: usize = 1 << 13;

/// Smallest power-of-two truncation (from 64) whose closed-form table
/// certifies `rel_tol` for every perimeter up to `p_max`.
pub fn adaptive_table(p_max: usize, lambda: f64, rel_tol: f64) -> Result<PolygonCountTable> {
    check_subcritical(lambda)?;
    let mut j_max = 64;
    loop {
        let table = polygon_counts_closed_form(p_max, j_max)?;
        if (1..=p_max).all(|p| partition_function(p, lambda, rel_tol, &table).is_ok()) {
            return Ok(table);
        }
        if j_max >= J_MAX_CAP {
            return Err(Error::TableTooSmall(format!(
                "no truncation up to {J_MAX_CAP} certifies rel_tol {rel_tol:e} at lambda {lambda}"
            )));
        }
        j_max *= 2;
    }
}
