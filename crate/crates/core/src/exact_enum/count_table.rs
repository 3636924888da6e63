use std::cmp::min;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use super::limbs;
use crate::error::{Error, Result};

static ZERO: BigUint = BigUint::ZERO;

/// Exact counts τ(n,g) of rooted triangulations of genus g with 2n faces.
///
/// Internally the table keeps D(n,g) = 2f(n,g) = 2(3n+2)τ(n,g) as raw limbs,
/// which turns the recurrence into integer arithmetic with one exact division
/// by n+1 per entry. The seed f(−1,0) = 1/2 becomes D(−1,0) = 1.
///
/// A genus cap restricts the fill to g ≤ cap. This is exact for the retained
/// entries because entry (n,g) only reads entries of genus ≤ g.
#[derive(Clone, Debug)]
pub struct CountTable {
    // d[n + 1][g]
    d: Vec<Vec<Vec<u64>>>,
    // tau[n][g]
    tau: Vec<Vec<BigUint>>,
    genus_cap: Option<usize>,
    persisted: bool,
}

impl Default for CountTable {
    fn default() -> Self {
        Self::new()
    }
}

/// Largest genus with a nonzero count at size n.
pub fn max_genus(n: usize) -> usize {
    n.div_ceil(2)
}

impl CountTable {
    /// Seeded table with no rows for n ≥ 0 yet.
    pub fn new() -> Self {
        CountTable {
            d: vec![vec![vec![1]]],
            tau: Vec::new(),
            genus_cap: None,
            persisted: false,
        }
    }

    pub fn with_genus_cap(cap: usize) -> Self {
        CountTable {
            genus_cap: Some(cap),
            ..Self::new()
        }
    }

    /// Builds and fills a table in one call.
    pub fn build(n_max: usize, genus_cap: Option<usize>) -> Result<Self> {
        let mut t = match genus_cap {
            Some(c) => Self::with_genus_cap(c),
            None => Self::new(),
        };
        t.extend(n_max)?;
        Ok(t)
    }

    /// −1 for a freshly seeded table.
    pub fn n_max(&self) -> i64 {
        self.tau.len() as i64 - 1
    }

    pub fn genus_cap(&self) -> Option<usize> {
        self.genus_cap
    }

    pub fn persisted(&self) -> bool {
        self.persisted
    }

    pub(crate) fn set_persisted(&mut self, flag: bool) {
        self.persisted = flag;
    }

    /// Highest genus stored for size n.
    pub fn stored_genus(&self, n: usize) -> usize {
        match self.genus_cap {
            Some(c) => min(c, max_genus(n)),
            None => max_genus(n),
        }
    }

    /// τ(n,g). Zero when g exceeds (n+1)/2; `None` when (n,g) was not computed.
    pub fn tau(&self, n: usize, g: usize) -> Option<&BigUint> {
        let row = self.tau.get(n)?;
        if g > max_genus(n) {
            return Some(&ZERO);
        }
        row.get(g)
    }

    /// All stored τ(n,·) for one n.
    pub fn row(&self, n: usize) -> Option<&[BigUint]> {
        self.tau.get(n).map(|r| r.as_slice())
    }

    /// f(n,g) = (3n+2)τ(n,g) as an exact rational, including the n = −1 seed.
    pub fn f(&self, n: i64, g: usize) -> Option<BigRational> {
        if n == -1 {
            let v = if g == 0 { 1 } else { 0 };
            return Some(BigRational::new(v.into(), 2.into()));
        }
        let n = usize::try_from(n).ok()?;
        let t = self.tau(n, g)?;
        let f = t * BigUint::from(3 * n as u64 + 2);
        Some(BigRational::from_integer(f.into()))
    }

    fn d_limbs(&self, n: i64, g: usize) -> &[u64] {
        self.d[(n + 1) as usize]
            .get(g)
            .map(|v| v.as_slice())
            .unwrap_or(&[])
    }

    /// Fills every row up to `n_max`. Rows are sequential; entries of one row
    /// are independent and computed in parallel.
    pub fn extend(&mut self, n_max: usize) -> Result<()> {
        let start = self.tau.len();
        for n in start..=n_max {
            let gmax = self.stored_genus(n);
            let row: Vec<Vec<u64>> = (0..=gmax)
                .into_par_iter()
                .map(|g| self.compute_entry(n, g))
                .collect::<Result<_>>()?;
            let scale = 2 * (3 * n as u64 + 2);
            let mut d_row = Vec::with_capacity(row.len());
            let mut tau_row = Vec::with_capacity(row.len());
            for t in row {
                tau_row.push(limbs::to_biguint(&t));
                let mut d = Vec::with_capacity(t.len() + 1);
                limbs::mul_small_add(&mut d, &t, scale);
                limbs::trim(&mut d);
                d_row.push(d);
            }
            self.d.push(d_row);
            self.tau.push(tau_row);
        }
        Ok(())
    }

    /// τ(n,g) as limbs, assuming all rows below n are present.
    fn compute_entry(&self, n: usize, g: usize) -> Result<Vec<u64>> {
        let ni = n as i64;
        let mut acc: Vec<u64> = Vec::new();

        // Pairs with n1 < n2 counted once, then doubled.
        let mut n1 = -1i64;
        while 2 * n1 < ni - 2 {
            let n2 = ni - 2 - n1;
            self.convolve_genus(&mut acc, n1, n2, g);
            n1 += 1;
        }
        limbs::double(&mut acc);
        if (ni - 2) % 2 == 0 {
            let m = (ni - 2) / 2;
            self.convolve_genus(&mut acc, m, m, g);
        }

        if g >= 1 && n >= 1 {
            let k = 2 * n as u64 * (3 * n as u64 - 2);
            let prev = self.d_limbs(ni - 2, g - 1);
            if !prev.is_empty() && k > 0 {
                limbs::mul_small_add(&mut acc, prev, k);
            }
        }

        let rem = limbs::div_small(&mut acc, n as u64 + 1);
        if rem != 0 {
            return Err(Error::NonIntegral {
                what: format!("tau({n},{g})"),
            });
        }
        limbs::trim(&mut acc);
        Ok(acc)
    }

    fn convolve_genus(&self, acc: &mut Vec<u64>, n1: i64, n2: i64, g: usize) {
        let r1 = &self.d[(n1 + 1) as usize];
        let r2 = &self.d[(n2 + 1) as usize];
        for (g1, a) in r1.iter().enumerate().take(g + 1) {
            if let Some(b) = r2.get(g - g1) {
                limbs::mul_add(acc, a, b);
            }
        }
    }

    /// Rebuilds a table from τ rows, e.g. when reading a cache.
    pub fn from_tau_rows(rows: Vec<Vec<BigUint>>, genus_cap: Option<usize>) -> Result<Self> {
        let mut t = match genus_cap {
            Some(c) => Self::with_genus_cap(c),
            None => Self::new(),
        };
        for (n, row) in rows.into_iter().enumerate() {
            if row.len() != t.stored_genus(n) + 1 {
                return Err(Error::Format(format!(
                    "row {n} has {} entries, expected {}",
                    row.len(),
                    t.stored_genus(n) + 1
                )));
            }
            let scale = BigUint::from(2 * (3 * n as u64 + 2));
            t.d.push(row.iter().map(|x| limbs::from_biguint(&(x * &scale))).collect());
            t.tau.push(row);
        }
        Ok(t)
    }
}

/// Extends `table` so that it covers every n ≤ `n_max`.
pub fn gj_extend(mut table: CountTable, n_max: usize) -> Result<CountTable> {
    if (n_max as i64) < table.n_max() {
        return Err(Error::Domain(format!(
            "n_max {n_max} below current {}",
            table.n_max()
        )));
    }
    table.extend(n_max)?;
    table.set_persisted(false);
    Ok(table)
}

/// Natural log of a positive big integer.
pub fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().unwrap();
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// a/b in double precision without overflow, for positive b.
pub fn ratio_biguint(a: &BigUint, b: &BigUint) -> f64 {
    if a.is_zero() {
        return 0.0;
    }
    let (ba, bb) = (a.bits() as i64, b.bits() as i64);
    if (ba - bb).abs() > 900 {
        return (ln_biguint(a) - ln_biguint(b)).exp();
    }
    let shift = (ba.max(bb) - 120).max(0) as u64;
    let ta = (a >> shift).to_f64().unwrap();
    let tb = (b >> shift).to_f64().unwrap();
    ta / tb
}

/// τ(n−1,g)/τ(n,g).
pub fn tau_ratio(table: &CountTable, n: usize, g: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("tau_ratio needs n >= 1".into()));
    }
    let missing = |m: usize| Error::TableTooSmall(format!("tau({m},{g}) not in table"));
    let num = table.tau(n - 1, g).ok_or_else(|| missing(n - 1))?;
    let den = table.tau(n, g).ok_or_else(|| missing(n))?;
    if den.is_zero() || num.is_zero() {
        return Err(Error::Domain(format!(
            "tau({},{g}) or tau({n},{g}) vanishes",
            n - 1
        )));
    }
    Ok(ratio_biguint(num, den))
}
