//! Random streams. Every random quantity in a run is drawn from a ChaCha12
//! generator keyed by the scenario seed; distinct uses get distinct stream
//! ids, so results never depend on thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

/// Written into output metadata.
pub const RNG_ALGORITHM: &str = "ChaCha12 (rand_chacha 0.9), stream-per-replica";

pub type SimRng = ChaCha12Rng;

fn stream(seed: u64, id: u64) -> SimRng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Initial conditions: random-single placement, then the awareness campaign.
pub fn seeding_rng(seed: u64) -> SimRng {
    stream(seed, 0)
}

/// Dynamics of replica `replica` of a single scenario.
pub fn replica_rng(seed: u64, replica: u64) -> SimRng {
    stream(seed, 1 + replica)
}

/// Dynamics of replica `replica` of sweep cell `cell`. Never collides with
/// [`replica_rng`] for replica counts below 2^32.
pub fn cell_rng(seed: u64, cell: u64, replica: u64) -> SimRng {
    stream(seed, ((cell + 1) << 32) | (replica & 0xffff_ffff))
}
