use rand::Rng;
use serde::Serialize;

use super::law::{decode_infinite, PeelingLaw};
use super::{stream_rng, SimRng};
use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PeelingState {
    pub perimeter: u64,
    pub volume: u64,
    pub step: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PeelingEvent {
    NewVertex,
    Swallow {
        side: Side,
        swallowed_edges: u64,
        hole_inner_vertices: u64,
    },
}

/// The explored region around the root edge before the first peeling step.
///
/// With probability 1−β the root edge is not a loop and bounds a 2-gon hole;
/// otherwise it is a loop enclosing a finite Boltzmann 1-gon.
pub fn initial_state(law: &PeelingLaw, rng: &mut SimRng) -> PeelingState {
    if rng.gen::<f64>() >= law.params.beta {
        PeelingState {
            perimeter: 2,
            volume: 2,
            step: 0,
        }
    } else {
        let j = law.hole_volume(1).sample(rng.gen()) as u64;
        PeelingState {
            perimeter: 1,
            volume: 1 + j,
            step: 0,
        }
    }
}

/// One step of filled-in peeling on the infinite hole.
pub fn peel_step(
    law: &PeelingLaw,
    state: PeelingState,
    rng: &mut SimRng,
) -> Result<(PeelingState, PeelingEvent)> {
    let p = state.perimeter as usize;
    let k = law.infinite_law(p)?.sample(rng.gen());
    let next = match decode_infinite(k) {
        None => (
            PeelingState {
                perimeter: state.perimeter + 1,
                volume: state.volume + 1,
                step: state.step + 1,
            },
            PeelingEvent::NewVertex,
        ),
        Some((i, s)) => {
            let j = law.hole_volume(i + 1).sample(rng.gen()) as u64;
            (
                PeelingState {
                    perimeter: state.perimeter - i as u64,
                    volume: state.volume + j,
                    step: state.step + 1,
                },
                PeelingEvent::Swallow {
                    side: if s == 0 { Side::Left } else { Side::Right },
                    swallowed_edges: i as u64,
                    hole_inner_vertices: j,
                },
            )
        }
    };
    Ok(next)
}

/// Runs `k_steps` steps and returns the states at steps 0..=k_steps.
pub fn run_chain_with(law: &PeelingLaw, k_steps: u64, rng: &mut SimRng) -> Result<Vec<PeelingState>> {
    let mut state = initial_state(law, rng);
    let mut out = Vec::with_capacity(k_steps as usize + 1);
    out.push(state);
    for _ in 0..k_steps {
        state = peel_step(law, state, rng)?.0;
        out.push(state);
    }
    Ok(out)
}

/// Final state only, without storing the trajectory.
pub fn chain_endpoint(law: &PeelingLaw, k_steps: u64, rng: &mut SimRng) -> Result<PeelingState> {
    let mut state = initial_state(law, rng);
    for _ in 0..k_steps {
        state = peel_step(law, state, rng)?.0;
    }
    Ok(state)
}

/// Full (P(k), V(k)) trajectory for one seed (stream 0).
pub fn run_chain(lambda: f64, k_steps: u64, seed: u64) -> Result<Vec<PeelingState>> {
    let law = PeelingLaw::new(lambda)?;
    run_chain_with(&law, k_steps, &mut stream_rng(seed, 0))
}
