//! Monte Carlo simulation of hyperbolic triangulations by filled-in peeling.

mod chain;
mod degree;
mod disk;
mod estimate;
mod law;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use chain::{chain_endpoint, initial_state, peel_step, run_chain, run_chain_with, PeelingEvent, PeelingState, Side};
pub use degree::{root_degree_with, DegreeOutcome, DEFAULT_STEP_BUDGET};
pub use disk::{boltzmann_disk, boltzmann_disk_with, DiskSummary, DEFAULT_DISK_BUDGET};
pub use estimate::{disk_volumes, estimate_drift, estimate_inverse_degree, DriftEstimate, EstimateReport};
pub use law::{decode_infinite, ln_partition, Cdf, PeelingLaw};

pub type SimRng = ChaCha8Rng;

/// Generator for replication `stream` under `seed`. Streams never overlap.
pub fn stream_rng(seed: u64, stream: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Default seed used by the command line.
pub const DEFAULT_SEED: u64 = 0x5EED;

/// Single degree sample for one seed (stream 0).
pub fn root_degree_sample(lambda: f64, seed: u64) -> crate::Result<DegreeOutcome> {
    let law = PeelingLaw::new(lambda)?;
    root_degree_with(&law, &mut stream_rng(seed, 0), DEFAULT_STEP_BUDGET)
}
