use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact_enum::{ln_biguint, CountTable};

/// Bounds on τ((2+ε)g, g) from the unicellular precubic count and from the
/// handle term of the recurrence.
#[derive(Clone, Debug, Serialize)]
pub struct NearDiagonalReport {
    pub g: usize,
    pub eps: f64,
    /// n = (2+ε)g.
    pub n: usize,
    pub lower_bound_log: f64,
    pub upper_bound_log: f64,
    #[serde(serialize_with = "decimal")]
    pub unicellular_count: BigUint,
    pub h_u: f64,
    /// ln τ(n,g) when the table holds it.
    pub tau_log: Option<f64>,
}

fn decimal<S: serde::Serializer>(x: &BigUint, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_str_radix(10))
}

impl NearDiagonalReport {
    pub fn sandwich_holds(&self) -> Option<bool> {
        self.tau_log
            .map(|t| self.lower_bound_log <= t + 1e-9 && t <= self.upper_bound_log + 1e-9)
    }
}

/// h_U(ε) = 2ε log(6/ε) + (3+2ε) log(1+2ε/3).
pub fn h_u(eps: f64) -> f64 {
    if eps == 0.0 {
        return 0.0;
    }
    2.0 * eps * (6.0 / eps).ln() + (3.0 + 2.0 * eps) * (1.0 + 2.0 * eps / 3.0).ln()
}

fn factorial(m: u64) -> BigUint {
    (2..=m).fold(BigUint::one(), |acc, k| acc * k)
}

/// Precubic unicellular count 2((6+4ε)g+1)! / (12^g g! (2εg+2)! ((3+2ε)g)!),
/// written with m = εg.
pub fn unicellular_count(g: u64, m: u64) -> Result<BigUint> {
    let num = factorial(6 * g + 4 * m + 1) * 2u32;
    let den = BigUint::from(12u32).pow(g as u32)
        * factorial(g)
        * factorial(2 * m + 2)
        * factorial(3 * g + 2 * m);
    let (q, r) = num.div_rem(&den);
    if !r.is_zero() {
        return Err(Error::NonIntegral {
            what: format!("unicellular count g={g}, eps*g={m}"),
        });
    }
    Ok(q)
}

/// Near-diagonal sandwich at genus g and excess ratio ε (εg must be an integer).
///
/// The lower bound chains τ(n,g) ≥ 4n(3n−2)(3n−4)/(n+1) · τ(n−2,g−1) down to
/// the planar count τ(εg,0) read from `table`.
pub fn near_diagonal_bounds(
    table: &CountTable,
    g: usize,
    eps: Ratio<u64>,
) -> Result<NearDiagonalReport> {
    if g == 0 {
        return Err(Error::Domain("near-diagonal bounds need g >= 1".into()));
    }
    let m = eps * Ratio::from_integer(g as u64);
    if !m.is_integer() {
        return Err(Error::Domain(format!("eps*g = {m} is not an integer")));
    }
    let m = m.to_integer();
    let n = 2 * g + m as usize;
    let count = unicellular_count(g as u64, m)?;
    let upper = m as f64 * 4f64.ln() + ln_biguint(&count);

    let base = table
        .tau(m as usize, 0)
        .ok_or_else(|| Error::TableTooSmall(format!("tau({m},0) not in table")))?;
    let mut lower = ln_biguint(base);
    for k in 0..g {
        let nk = (n - 2 * k) as f64;
        lower += (4.0 * nk * (3.0 * nk - 2.0) * (3.0 * nk - 4.0) / (nk + 1.0)).ln();
    }
    let eps_f = eps.to_f64().unwrap();
    Ok(NearDiagonalReport {
        g,
        eps: eps_f,
        n,
        lower_bound_log: lower,
        upper_bound_log: upper,
        unicellular_count: count,
        h_u: h_u(eps_f),
        tau_log: table.tau(n, g).map(ln_biguint),
    })
}
