// SPDX-License-Identifier: Apache-2.0
// scratch: verify run-event cross bits

use thehuzz_core::dut::{dut_manifest, dut_reset, dut_run, BugConfig};
use thehuzz_core::isa::{self, encode, Mnemonic, Operands};

fn main() {
    let words = [
        encode(Mnemonic::Lui, Operands::u(1, 0x40000)).unwrap(),
        encode(Mnemonic::Add, Operands::r(2, 1, 1)).unwrap(),
        isa::NOP_WORD,
    ];
    let mut bytes = Vec::new();
    for w in &words {
        bytes.extend_from_slice(&w.to_le_bytes());
    }
    let man = dut_manifest();
    let mut d = dut_reset(&bytes, 0, BugConfig::default(), &man).unwrap();
    let (_, cov, st) = dut_run(&mut d, 2000, 200, (words.len() as u32 - 1) * 4);
    println!("status {st:?}");
    for idx in 0..man.total_points() {
        if cov.contains(idx) {
            let p = man.point_at(idx);
            if p.unit == "cond_run_events" || p.unit == "fsm_alu_ovf" {
                println!("{} {}", p.unit, p.sub);
            }
        }
    }
}
