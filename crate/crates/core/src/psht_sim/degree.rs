//! Root degree by peeling along the root.
//!
//! The edge peeled is always the boundary edge leaving ρ, so every revealed
//! triangle at ρ is seen. The degree is the number of triangle corners at ρ.
//! Finite holes that contain ρ on their boundary are peeled the same way
//! until closed; holes away from ρ are never materialized.

use rand::Rng;

use super::law::{decode_infinite, PeelingLaw};
use super::SimRng;
use crate::error::Result;

pub const DEFAULT_STEP_BUDGET: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DegreeOutcome {
    Degree(u64),
    Timeout,
}

struct Walk<'a> {
    law: &'a PeelingLaw,
    corners: u64,
    // Perimeters of finite holes with ρ on their boundary.
    pending: Vec<usize>,
    steps: u64,
}

impl Walk<'_> {
    /// Peels every pending hole until none is left.
    fn drain(&mut self, rng: &mut SimRng, budget: u64) -> Result<bool> {
        while let Some(q) = self.pending.pop() {
            self.steps += 1;
            if self.steps > budget {
                return Ok(false);
            }
            let k = self.law.with_finite_law(q, |c| c.sample(rng.gen()))?;
            match k {
                0 => {}
                1 => {
                    self.corners += if q == 1 { 2 } else { 1 };
                    self.pending.push(q + 1);
                }
                _ => {
                    let split = k - 1;
                    if split == q {
                        // Apex is ρ: the triangle closes a loop at ρ.
                        self.corners += if q == 1 { 3 } else { 2 };
                        self.pending.push(q);
                        self.pending.push(1);
                    } else {
                        // The part beyond the apex does not touch ρ.
                        self.corners += 1;
                        self.pending.push(q - split + 1);
                    }
                }
            }
        }
        Ok(true)
    }
}

/// Samples deg(ρ) in the PSHT described by `law`.
pub fn root_degree_with(law: &PeelingLaw, rng: &mut SimRng, budget: u64) -> Result<DegreeOutcome> {
    let mut w = Walk {
        law,
        corners: 0,
        pending: Vec::new(),
        steps: 0,
    };
    let mut p = if rng.gen::<f64>() >= law.params.beta {
        2
    } else {
        // Loop at ρ with a finite 1-gon on one side, the infinite part on the other.
        w.pending.push(1);
        1
    };
    let mut on_boundary = true;
    while on_boundary {
        w.steps += 1;
        if w.steps > budget {
            return Ok(DegreeOutcome::Timeout);
        }
        let k = law.infinite_law(p)?.sample(rng.gen());
        match decode_infinite(k) {
            None => {
                w.corners += if p == 1 { 2 } else { 1 };
                p += 1;
            }
            Some((i, side)) => {
                if p == 1 {
                    w.corners += 3;
                    w.pending.push(1);
                } else if side == 0 {
                    // The finite part lies beyond the apex.
                    if i + 1 == p {
                        w.corners += 2;
                        w.pending.push(p);
                        p = 1;
                    } else {
                        w.corners += 1;
                        p -= i;
                    }
                } else if i == 0 {
                    // Apex is ρ and the finite part is the loop at ρ.
                    w.corners += 2;
                    w.pending.push(1);
                } else {
                    // The finite part contains ρ; ρ leaves the infinite boundary.
                    w.corners += 1;
                    w.pending.push(i + 1);
                    on_boundary = false;
                }
            }
        }
        if !w.drain(rng, budget)? {
            return Ok(DegreeOutcome::Timeout);
        }
    }
    Ok(DegreeOutcome::Degree(w.corners))
}
