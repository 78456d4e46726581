//! Discrete-event kernel.
//!
//! Single-threaded and deterministic: events leave the queue in timestamp
//! order with insertion order breaking ties, and every random draw comes
//! from a ChaCha8 stream seeded by the scenario seed.

mod kernel;
mod queue;

pub use kernel::{Scenario, ScenarioError, Simulator};
pub use queue::{EventKind, EventQueue, SimClock, SimError, SimEvent};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Name of the generator behind every random draw in a run.
pub const RNG_ALGORITHM: &str = "ChaCha8 (rand_chacha), one stream per subsystem";

/// Independent generator for one subsystem of a seeded run.
pub fn rng_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
