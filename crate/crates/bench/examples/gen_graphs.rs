//! Prints seeded random graphs as PENMAN blocks.
//!
//! Usage: gen_graphs [count] [seed]

use abex_core::penman::serialize_penman_pretty;
use abex_core::testkit::GraphGen;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut args = std::env::args().skip(1);
    let count: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(80);
    let seed: u64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(7);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gen = GraphGen::small(10);
    for i in 0..count {
        let g = gen.generate(&mut rng);
        println!("# ::id gen{i:03}");
        println!("{}\n", serialize_penman_pretty(&g));
    }
}
