// SPDX-License-Identifier: Apache-2.0
// scratch: default-seed comparison

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thehuzz_core::config::Config;
use thehuzz_core::engine::{fuzz_loop, FuzzMode};
use thehuzz_core::optimizer::{greedy_cover, profile, WeightTable, DEFAULT_RUNS_PER_PAIR};

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(Config::default().rng_seed);
    let matrix = profile(DEFAULT_RUNS_PER_PAIR, &mut rng);
    let weights = greedy_cover(&matrix).expect("feasible");
    let mut cfg = Config::default();
    cfg.max_inputs = u64::MAX;
    cfg.max_instructions = 100_000;
    let fb = fuzz_loop(&cfg, FuzzMode::Feedback, &weights);
    let rnd = fuzz_loop(&cfg, FuzzMode::Random, &WeightTable::empty());
    println!("default seed {}: feedback {} random {}", cfg.rng_seed, fb.feedback_hits, rnd.feedback_hits);
}
