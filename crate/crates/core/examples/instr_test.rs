// SPDX-License-Identifier: Apache-2.0
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::time::Instant;
use thehuzz_core::dut::{dut_manifest, dut_reset, dut_run, BugConfig};
use thehuzz_core::engine::run_input;
use thehuzz_core::grm::{grm_reset, grm_run};
use thehuzz_core::optimizer::WeightTable;
use thehuzz_core::stimulus::gen_seed;

fn main() {
    let manifest = dut_manifest();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let w = WeightTable::empty();
    let progs: Vec<_> = (0..2000).map(|_| gen_seed(&mut rng, &w)).collect();
    let t = Instant::now();
    let mut n = 0u64;
    for p in &progs {
        let out = run_input(p, BugConfig::default(), 2000, &manifest);
        n += out.dut_trace.events.len() as u64;
    }
    println!("run_input: {:?}/input, {} events", t.elapsed() / 2000, n);
    let t = Instant::now();
    for p in &progs {
        let image = p.image();
        let mut g = grm_reset(&image, p.entry_pc()).unwrap();
        let tr = grm_run(&mut g, p.instr_budget(), p.halt_pc());
        n += tr.events.len() as u64;
    }
    println!("grm only: {:?}/input", t.elapsed() / 2000);
    let t = Instant::now();
    for p in &progs {
        let image = p.image();
        let mut d = dut_reset(&image, p.entry_pc(), BugConfig::default(), &manifest).unwrap();
        let (tr, _, _) = dut_run(&mut d, 2000, p.instr_budget(), p.halt_pc());
        n += tr.events.len() as u64;
    }
    println!("dut only: {:?}/input ({n})", t.elapsed() / 2000);
}
