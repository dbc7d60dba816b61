// SPDX-License-Identifier: Apache-2.0

//! Measures the first-discovery point (retired test instructions) for
//! each bug toggle under the default campaign config. Used to calibrate
//! the frozen regression budgets in the acceptance suite.

use thehuzz_core::config::Config;
use thehuzz_core::dut::BugConfig;
use thehuzz_core::engine::{fuzz_loop, FuzzMode};
use thehuzz_core::optimizer::WeightTable;

fn main() {
    let budget: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2_000_000);
    for &bug in BugConfig::NAMES {
        if bug.starts_with("CS_") {
            continue;
        }
        let cfg = Config {
            bugs: BugConfig::with(bug).unwrap(),
            max_inputs: u64::MAX,
            max_instructions: budget,
            ..Config::default()
        };
        let r = fuzz_loop(&cfg, FuzzMode::Feedback, &WeightTable::empty());
        match r.mismatches.first() {
            Some(m) => println!("{bug:<18} first mismatch at {} retired TIs ({})", m.instructions, m.field),
            None => println!("{bug:<18} NOT FOUND within {} TIs", r.total_instructions),
        }
    }
}
