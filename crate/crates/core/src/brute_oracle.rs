//! Exhaustive enumeration of gluings of 2n labeled triangles, used as ground
//! truth for the genus recurrence at n ≤ 3.
//!
//! Darts are 0..6n. Face f owns darts 3f, 3f+1, 3f+2 and σ rotates them.
//! A gluing is a fixed-point-free involution α; vertices are the cycles of σ∘α.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

pub const MAX_N: usize = 3;
const MAX_DARTS: usize = 6 * MAX_N;

#[inline]
pub fn sigma(d: usize) -> usize {
    if d % 3 == 2 {
        d - 2
    } else {
        d + 1
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gluing {
    pub n: usize,
    pub alpha: Vec<usize>,
}

impl Gluing {
    pub fn new(n: usize, alpha: Vec<usize>) -> Result<Self> {
        let ok = alpha.len() == 6 * n
            && alpha
                .iter()
                .enumerate()
                .all(|(d, &a)| a < 6 * n && a != d && alpha[a] == d);
        if !ok {
            return Err(Error::Domain("alpha is not a fixed-point-free involution".into()));
        }
        Ok(Gluing { n, alpha })
    }

    pub fn is_connected(&self) -> bool {
        connected(self.n, &self.alpha)
    }

    pub fn vertex_count(&self) -> usize {
        vertex_count(&self.alpha)
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Union–find over faces; α is the only thing linking them.
fn connected(n: usize, alpha: &[usize]) -> bool {
    let faces = 2 * n;
    let mut parent = [0usize; 2 * MAX_N + 64];
    let parent = &mut parent[..faces.max(1)];
    for (i, p) in parent.iter_mut().enumerate() {
        *p = i;
    }
    let mut components = faces;
    for (d, &a) in alpha.iter().enumerate() {
        if d < a {
            let (x, y) = (find(parent, d / 3), find(parent, a / 3));
            if x != y {
                parent[x] = y;
                components -= 1;
            }
        }
    }
    components == 1
}

fn vertex_count(alpha: &[usize]) -> usize {
    let mut seen = 0u64;
    let mut cycles = 0;
    for start in 0..alpha.len() {
        if seen >> start & 1 == 1 {
            continue;
        }
        cycles += 1;
        let mut d = start;
        while seen >> d & 1 == 0 {
            seen |= 1 << d;
            d = sigma(alpha[d]);
        }
    }
    cycles
}

fn genus_from(n: usize, v: usize) -> Result<usize> {
    // V − E + F = 2 − 2g with E = 3n, F = 2n.
    let num = 2 + n as i64 - v as i64;
    if num < 0 || num % 2 != 0 {
        return Err(Error::NonIntegral {
            what: format!("genus with n={n}, V={v}"),
        });
    }
    Ok((num / 2) as usize)
}

/// Genus of a connected gluing from Euler's formula.
pub fn genus_of(gluing: &Gluing) -> Result<usize> {
    if !gluing.is_connected() {
        return Err(Error::Domain("genus_of needs a connected gluing".into()));
    }
    genus_from(gluing.n, gluing.vertex_count())
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct GluingTally {
    pub involutions: u64,
    pub disconnected: u64,
    /// Connected gluings by genus.
    pub connected: BTreeMap<usize, u64>,
}

impl GluingTally {
    fn merge(mut self, other: GluingTally) -> GluingTally {
        self.involutions += other.involutions;
        self.disconnected += other.disconnected;
        for (g, c) in other.connected {
            *self.connected.entry(g).or_default() += c;
        }
        self
    }
}

struct Walker {
    n: usize,
    alpha: [usize; MAX_DARTS],
    free: u32,
    tally: GluingTally,
    by_genus: [u64; MAX_N + 2],
}

impl Walker {
    fn recurse(&mut self) {
        if self.free == 0 {
            self.leaf();
            return;
        }
        let d = self.free.trailing_zeros() as usize;
        let mut rest = self.free & !(1 << d);
        let saved = self.free;
        while rest != 0 {
            let e = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            self.alpha[d] = e;
            self.alpha[e] = d;
            self.free = saved & !(1 << d) & !(1 << e);
            self.recurse();
        }
        self.free = saved;
    }

    fn leaf(&mut self) {
        self.tally.involutions += 1;
        let alpha = &self.alpha[..6 * self.n];
        if !connected(self.n, alpha) {
            self.tally.disconnected += 1;
            return;
        }
        let g = genus_from(self.n, vertex_count(alpha)).expect("Euler parity");
        self.by_genus[g] += 1;
    }
}

/// Tallies every fixed-point-free involution on 6n darts. Work is split on
/// the partner of dart 0 and summed, so the result does not depend on the
/// schedule.
pub fn enumerate_gluings(n: usize) -> Result<GluingTally> {
    if !(1..=MAX_N).contains(&n) {
        return Err(Error::Domain(format!("oracle supports 1 <= n <= {MAX_N}, got {n}")));
    }
    let darts = 6 * n;
    let all: u32 = (1u32 << darts) - 1;
    let tally = (1..darts)
        .into_par_iter()
        .map(|partner| {
            let mut w = Walker {
                n,
                alpha: [0; MAX_DARTS],
                free: all & !1 & !(1 << partner),
                tally: GluingTally::default(),
                by_genus: [0; MAX_N + 2],
            };
            w.alpha[0] = partner;
            w.alpha[partner] = 0;
            w.recurse();
            for (g, &c) in w.by_genus.iter().enumerate() {
                if c > 0 {
                    w.tally.connected.insert(g, c);
                }
            }
            w.tally
        })
        .reduce(GluingTally::default, GluingTally::merge);
    Ok(tally)
}

/// τ(n,g) = 6n·N_conn(n,g) / ((2n)!·3^{2n}) for every genus that occurs.
pub fn enumerate_counts(n: usize) -> Result<BTreeMap<usize, BigUint>> {
    let tally = enumerate_gluings(n)?;
    let labelings: BigUint =
        (1..=2 * n as u64).product::<BigUint>() * BigUint::from(3u32).pow(2 * n as u32);
    let mut out = BTreeMap::new();
    for (&g, &c) in &tally.connected {
        let num = BigUint::from(6 * n as u64) * c;
        let (q, r) = num.div_rem(&labelings);
        if !r.is_zero() {
            return Err(Error::NonIntegral {
                what: format!("oracle count n={n}, g={g}"),
            });
        }
        out.insert(g, q);
    }
    Ok(out)
}
