//! Shared inputs for the benchmarks.

use abex_core::penman::AmrGraph;
use abex_core::testkit::GraphGen;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// `count` seeded random graphs of at most `max_vars` variables.
pub fn graphs(count: usize, max_vars: usize, seed: u64) -> Vec<AmrGraph> {
    let gen = GraphGen {
        min_vars: max_vars / 2,
        ..GraphGen::small(max_vars)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| gen.generate(&mut rng)).collect()
}
