// SPDX-License-Identifier: Apache-2.0
// scratch: which six-metric points does each campaign hit exclusively?

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thehuzz_core::config::Config;
use thehuzz_core::engine::{fuzz_loop, FuzzMode};
use thehuzz_core::optimizer::{greedy_cover, profile, WeightTable, DEFAULT_RUNS_PER_PAIR};

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let matrix = profile(DEFAULT_RUNS_PER_PAIR, &mut rng);
    let weights = greedy_cover(&matrix).expect("feasible");
    println!("weight table rows: {}", weights.len());

    let mut cfg = Config::default();
    cfg.max_inputs = u64::MAX;
    cfg.max_instructions = 100_000;
    cfg.rng_seed = 0;
    let fb = fuzz_loop(&cfg, FuzzMode::Feedback, &weights);
    let rnd = fuzz_loop(&cfg, FuzzMode::Random, &WeightTable::empty());

    let man = fb.coverage.manifest().clone();
    let mask = man.metric_mask(&cfg.feedback);
    println!("fb hits {}, rnd hits {}", fb.feedback_hits, rnd.feedback_hits);
    println!("fb corpus {} retained {}", fb.corpus_len, fb.retained);
    let mut rnd_only = 0;
    let mut fb_only = 0;
    for idx in 0..man.total_points() {
        if mask[idx / 64] >> (idx % 64) & 1 == 0 {
            continue;
        }
        let f = fb.coverage.contains(idx);
        let r = rnd.coverage.contains(idx);
        if f == r {
            continue;
        }
        let p = man.point_at(idx);
        let who = if r { "RND-only" } else { "FB-only " };
        if r {
            rnd_only += 1;
        } else {
            fb_only += 1;
        }
        println!("{who} {:?}/{}/{}", p.metric, p.unit, p.sub);
    }
    println!("rnd_only {rnd_only} fb_only {fb_only}");
}
