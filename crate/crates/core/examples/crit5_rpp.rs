// SPDX-License-Identifier: Apache-2.0
// scratch: effect of runs-per-pair on cover breadth and campaign outcome

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thehuzz_core::config::Config;
use thehuzz_core::engine::{fuzz_loop, FuzzMode};
use thehuzz_core::optimizer::{greedy_cover, profile, WeightTable};

fn main() {
    for rpp in [5usize, 10, 20, 40] {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let matrix = profile(rpp, &mut rng);
        let weights = greedy_cover(&matrix).expect("feasible");
        let n_instr: std::collections::BTreeSet<_> =
            weights.pairs().iter().map(|(i, _)| *i).collect();
        print!("rpp {rpp}: |Q|={} |w_I|={} points={}", weights.len(), n_instr.len(), matrix.points.len());
        let mut wins = 0;
        let mut ok = 0;
        for seed in 0..4u64 {
            let mut cfg = Config::default();
            cfg.max_inputs = u64::MAX;
            cfg.max_instructions = 100_000;
            cfg.rng_seed = seed;
            let fb = fuzz_loop(&cfg, FuzzMode::Feedback, &weights);
            let rnd = fuzz_loop(&cfg, FuzzMode::Random, &WeightTable::empty());
            if fb.feedback_hits >= rnd.feedback_hits { ok += 1; }
            if fb.feedback_hits > rnd.feedback_hits { wins += 1; }
            print!("  s{seed} {}v{}", fb.feedback_hits, rnd.feedback_hits);
        }
        println!("  ge {ok}/4 strict {wins}/4");
    }
}
