// SPDX-License-Identifier: Apache-2.0
// scratch: weighted-feedback vs random comparison at a fixed TI budget

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thehuzz_core::config::Config;
use thehuzz_core::engine::{fuzz_loop, FuzzMode};
use thehuzz_core::optimizer::{greedy_cover, profile, WeightTable, DEFAULT_RUNS_PER_PAIR};

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    let matrix = profile(DEFAULT_RUNS_PER_PAIR, &mut rng);
    let weights = greedy_cover(&matrix).expect("feasible");

    let mut wins = 0;
    let mut ok = 0;
    for seed in 0..10u64 {
        let mut cfg = Config::default();
        cfg.max_inputs = u64::MAX;
        cfg.max_instructions = 100_000;
        cfg.rng_seed = seed;
        let fb = fuzz_loop(&cfg, FuzzMode::Feedback, &weights);
        let rnd = fuzz_loop(&cfg, FuzzMode::Random, &WeightTable::empty());
        let (f, r) = (fb.feedback_hits, rnd.feedback_hits);
        println!(
            "seed {seed}: feedback {f} random {r} {}",
            if f > r { "WIN" } else if f == r { "tie" } else { "LOSS" }
        );
        if f >= r {
            ok += 1;
        }
        if f > r {
            wins += 1;
        }
    }
    println!("ge {ok}/10 strict {wins}/10");
}
