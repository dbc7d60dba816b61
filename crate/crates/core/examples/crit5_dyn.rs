// SPDX-License-Identifier: Apache-2.0
// scratch: campaign dynamics comparison

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thehuzz_core::config::Config;
use thehuzz_core::coverage::Metric;
use thehuzz_core::engine::{fuzz_loop, FuzzMode};
use thehuzz_core::optimizer::{greedy_cover, profile, WeightTable};

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let matrix = profile(5, &mut rng);
    let weights = greedy_cover(&matrix).expect("feasible");
    let mut cfg = Config::default();
    cfg.max_inputs = u64::MAX;
    cfg.max_instructions = 100_000;
    cfg.rng_seed = 0;
    for (mode, w) in [(FuzzMode::Feedback, &weights), (FuzzMode::Random, &WeightTable::empty())] {
        let r = fuzz_loop(&cfg, mode, w);
        println!(
            "{:?}: inputs {} retained {} corpus {} hits {} stop {}",
            mode, r.total_inputs, r.retained, r.corpus_len, r.feedback_hits, r.stop_reason
        );
        // chain fsm points hit
        let man = r.coverage.manifest().clone();
        let mut states = vec![];
        for idx in 0..man.total_points() {
            if r.coverage.contains(idx) {
                let p = man.point_at(idx);
                if p.unit == "fsm_raw_chain" {
                    states.push(p.sub);
                }
            }
        }
        println!("  chain subs: {:?}", states);
        for mt in r.coverage.totals() {
            if matches!(mt.metric, Metric::Statement | Metric::Branch | Metric::Condition | Metric::Expression | Metric::Toggle | Metric::Fsm) {
                print!("  {}={}/{}", mt.metric.name(), mt.hit, mt.universe);
            }
        }
        println!();
    }
}
