//! Monte Carlo and discrete-event oracles for the analytical model.
//!
//! Randomness comes from ChaCha8 (`rand_chacha`). A run is identified by a
//! `u64` seed; work is cut into fixed-size batches and batch `i` draws from
//! ChaCha stream `i` of that seed, so results do not depend on the number of
//! worker threads or the order in which batches finish.

mod field;
mod outage;
mod policy;
mod queue;
mod stats;

pub use field::{sample_user_field, UserSample};
pub use outage::{estimate_outage, estimate_outage_full_field, LinkBudget, MsuPlacement, OutageRequest};
pub use policy::{simulate_policy, PolicyLedger};
pub use queue::{
    simulate_energy_queue, simulate_energy_queue_until, write_trace_csv, EnergyQueueSim, QueueEvent, QueueEventKind,
    QueueTrace,
};
pub use stats::{wilson_interval, BinomialEstimate};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Samples per parallel batch.
pub const BATCH_SIZE: u64 = 4096;

/// Generator for stream `stream` of `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Splits `n` samples into `(stream, count)` batches.
pub(crate) fn batches(n: u64) -> impl Iterator<Item = (u64, u64)> {
    let full = n / BATCH_SIZE;
    let rest = n % BATCH_SIZE;
    (0..full).map(|i| (i, BATCH_SIZE)).chain((rest > 0).then_some((full, rest)))
}
