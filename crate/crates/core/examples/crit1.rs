// SPDX-License-Identifier: Apache-2.0
// scratch: bugs-off differential soundness at 200k TIs

use std::time::Instant;
use thehuzz_core::config::Config;
use thehuzz_core::engine::{fuzz_loop, FuzzMode};
use thehuzz_core::optimizer::WeightTable;

fn main() {
    let cfg = Config {
        max_inputs: u64::MAX,
        max_instructions: 200_000,
        ..Config::default()
    };
    let t = Instant::now();
    let r = fuzz_loop(&cfg, FuzzMode::Feedback, &WeightTable::empty());
    println!(
        "inputs {} tis {} mismatches {} wall {:.1}s",
        r.total_inputs,
        r.total_instructions,
        r.mismatches.len(),
        t.elapsed().as_secs_f64()
    );
}
