// SPDX-License-Identifier: Apache-2.0
// scratch: per-family hit subs in each mode

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thehuzz_core::config::Config;
use thehuzz_core::engine::{fuzz_loop, FuzzMode};
use thehuzz_core::optimizer::{greedy_cover, profile, WeightTable};

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let matrix = profile(5, &mut rng);
    let weights = greedy_cover(&matrix).expect("feasible");
    let units = ["expr_warm_op", "fsm_warm_depth", "cond_warm_class"];
    for seed in 0u64..10 { for (mode, w) in [(FuzzMode::Feedback, &weights), (FuzzMode::Random, &WeightTable::empty())] {
        let mut cfg = Config::default();
        cfg.max_inputs = u64::MAX;
        cfg.max_instructions = 100_000;
        cfg.rng_seed = seed;
        let r = fuzz_loop(&cfg, mode, w);
        print!("seed {seed} {:?} hits {} retained {}", mode, r.feedback_hits, r.retained);
        let man = r.coverage.manifest().clone();
        for u in units {
            let mut subs = vec![];
            for idx in 0..man.total_points() {
                if r.coverage.contains(idx) {
                    let p = man.point_at(idx);
                    if p.unit == u {
                        subs.push(p.sub);
                    }
                }
            }
            print!("  {}:{}", u, subs.len());
        }
        println!();
    } }
}
