// SPDX-License-Identifier: Apache-2.0
// scratch: isolate weights vs retention effects

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thehuzz_core::config::Config;
use thehuzz_core::engine::{fuzz_loop, FuzzMode};
use thehuzz_core::optimizer::{greedy_cover, profile, WeightTable};

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let matrix = profile(5, &mut rng);
    let weights = greedy_cover(&matrix).expect("feasible");
    let empty = WeightTable::empty();
    for seed in [0u64, 1, 2, 3, 4] {
        let mut cfg = Config::default();
        cfg.max_inputs = u64::MAX;
        cfg.max_instructions = 100_000;
        cfg.rng_seed = seed;
        let fb_w = fuzz_loop(&cfg, FuzzMode::Feedback, &weights).feedback_hits;
        let fb_u = fuzz_loop(&cfg, FuzzMode::Feedback, &empty).feedback_hits;
        let rnd_u = fuzz_loop(&cfg, FuzzMode::Random, &empty).feedback_hits;
        let rnd_w = fuzz_loop(&cfg, FuzzMode::Random, &weights).feedback_hits;
        println!("seed {seed}: fb+w {fb_w}  fb+uniform {fb_u}  rnd+uniform {rnd_u}  rnd+w {rnd_w}");
    }
}
