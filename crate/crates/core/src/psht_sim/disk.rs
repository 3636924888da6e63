use rand::Rng;
use serde::Serialize;

use super::law::PeelingLaw;
use super::{stream_rng, SimRng};
use crate::error::{Error, Result};

/// Summary of one free Boltzmann triangulation of a p-gon.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DiskSummary {
    pub perimeter: u64,
    pub inner_vertices: u64,
    pub peeling_steps: u64,
}

pub const DEFAULT_DISK_BUDGET: u64 = 10_000_000;

/// Samples a Boltzmann p-gon by peeling it to completion. Each new-vertex
/// move creates one inner vertex; splits and 2-gon closures create none.
pub fn boltzmann_disk_with(
    law: &PeelingLaw,
    p: usize,
    rng: &mut SimRng,
    budget: u64,
) -> Result<DiskSummary> {
    if p == 0 {
        return Err(Error::Domain("perimeter must be >= 1".into()));
    }
    let mut stack = vec![p];
    let mut inner = 0;
    let mut steps = 0;
    while let Some(q) = stack.pop() {
        steps += 1;
        if steps > budget {
            return Err(Error::NoConvergence(format!(
                "Boltzmann disk exceeded {budget} peeling steps"
            )));
        }
        let k = law.with_finite_law(q, |c| c.sample(rng.gen()))?;
        match k {
            0 => {}
            1 => {
                inner += 1;
                stack.push(q + 1);
            }
            _ => {
                let split = k - 1;
                stack.push(split);
                stack.push(q - split + 1);
            }
        }
    }
    Ok(DiskSummary {
        perimeter: p as u64,
        inner_vertices: inner,
        peeling_steps: steps,
    })
}

pub fn boltzmann_disk(p: usize, lambda: f64, seed: u64) -> Result<DiskSummary> {
    let law = PeelingLaw::new(lambda)?;
    boltzmann_disk_with(&law, p, &mut stream_rng(seed, 0), DEFAULT_DISK_BUDGET)
}
