// SPDX-License-Identifier: Apache-2.0

//! One hand-written trigger input per bug toggle. Each pipeline witness
//! mismatches against the reference model when its bug is enabled and
//! runs bit-exact when it is not; the two controller witnesses do the
//! same against the golden controller.

use crate::controller::{IN_DEBUG_EN, IN_FLUSH, IN_IPASS};
use crate::isa::{self, encode, Mnemonic, Operands};
use crate::stimulus::Program;

#[derive(Debug, Clone)]
pub enum WitnessInput {
    /// A 20-TI program for the pipelined device.
    Pipeline(Program),
    /// A cycle-by-cycle 5-bit input sequence for the cache controller.
    Controller(Vec<u8>),
}

#[derive(Debug, Clone)]
pub struct Witness {
    pub bug: &'static str,
    pub input: WitnessInput,
}

fn program_of(words: &[u32]) -> Program {
    let mut tis = words.to_vec();
    tis.resize(20, isa::NOP_WORD);
    Program::new(tis)
}

fn enc(m: Mnemonic, ops: Operands) -> u32 {
    encode(m, ops).expect("legal witness instruction")
}

fn pipeline(bug: &'static str, words: &[u32]) -> Witness {
    Witness { bug, input: WitnessInput::Pipeline(program_of(words)) }
}

pub fn all_witnesses() -> Vec<Witness> {
    use Mnemonic::*;
    let ti = |i: u32| isa::TI_BASE + 4 * i;
    vec![
        // FENCE.I with a nonzero imm field: reserved bits must be ignored,
        // the bug rejects them as illegal
        pipeline("FENCE_FIELDS", &[enc(FenceI, Operands::i(0, 0, 0)) | 5 << 20]),
        // jump into the no-fetch region: fetch fault, the bug reports a
        // bogus cause code
        pipeline(
            "EXC_TYPE",
            &[enc(Jal, Operands { rd: 0, rs1: 0, rs2: 0, imm: (isa::NOFETCH_BASE - ti(0)) as i32 })],
        ),
        // reserved opcode 0x5B: must trap, the bug executes it as ADD
        pipeline(
            "ILLEGAL_ACCEPT",
            &[
                enc(Addi, Operands::i(2, 0, 5)),
                enc(Addi, Operands::i(3, 0, 7)),
                0x5B | 1 << 7 | 2 << 15 | 3 << 20,
            ],
        ),
        // store a new instruction over an already-fetched line, then run
        // it: the bug keeps executing the stale word
        pipeline(
            "CACHE_INCOHERENCE",
            &[
                // x1 = victim address (TI 5, same cache line as the store)
                enc(Addi, Operands::i(1, 0, ti(5) as i32)),
                // x2 = replacement word: ADDI x3, x0, 2
                enc(Lui, Operands { rd: 2, rs1: 0, rs2: 0, imm: 0x00200 }),
                enc(Addi, Operands::i(2, 2, 0x193)),
                enc(Addi, Operands::i(0, 0, 0)),
                enc(Sw, Operands::s(1, 2, 0)),
                // victim: ADDI x3, x0, 1 until overwritten
                enc(Addi, Operands::i(3, 0, 1)),
            ],
        ),
        // 0 - 1 borrows: the bug inverts the carry flag for SUB
        pipeline(
            "CARRY_SUB",
            &[enc(Addi, Operands::i(1, 0, 1)), enc(Sub, Operands::r(2, 0, 1))],
        ),
        // user-mode write to a machine-only CSR: must trap, the bug skips
        // the privilege check for EPCR
        pipeline(
            "PRIV_EPCR",
            &[
                enc(Addi, Operands::i(2, 0, 0x123)),
                enc(Csrrw, Operands::i(1, 2, isa::csr::EPCR as i32)),
            ],
        ),
        // misaligned load traps; the trap must record the bad address in
        // EEAR, the bug drops the write
        pipeline(
            "EEAR_RO",
            &[enc(Addi, Operands::i(1, 0, 2)), enc(Lw, Operands::i(2, 1, 0))],
        ),
        // a write targeting x0 must not enter the forwarding network
        pipeline(
            "GPR0_FWD",
            &[enc(Addi, Operands::i(0, 0, 7)), enc(Add, Operands::r(1, 0, 0))],
        ),
        // 0x40000000^2 = 2^60: the product overflows but the accumulate
        // step (0 + 0) does not, the bug only checks the latter
        pipeline(
            "MAC_OVERFLOW",
            &[
                enc(Lui, Operands { rd: 1, rs1: 0, rs2: 0, imm: 0x40000 }),
                enc(Mac, Operands::r(2, 1, 1)),
            ],
        ),
        // INT_MIN - 1: subtraction overflow, the bug applies the addition
        // overflow formula
        pipeline(
            "OVERFLOW_SUB",
            &[
                enc(Lui, Operands { rd: 1, rs1: 0, rs2: 0, imm: 0x80000 }),
                enc(Addi, Operands::i(2, 0, 1)),
                enc(Sub, Operands::r(3, 1, 2)),
            ],
        ),
        // EBREAK must count toward INSTRET; read it back afterwards
        pipeline(
            "INSTRET_EBREAK",
            &[
                enc(Ebreak, Operands::default()),
                enc(Csrrs, Operands::i(1, 0, isa::csr::INSTRET as i32)),
            ],
        ),
        // debug read with the wrong password: ipass set must keep the
        // controller out of D_READ
        Witness {
            bug: "CS_B1",
            input: WitnessInput::Controller(vec![1 << IN_DEBUG_EN | 1 << IN_IPASS, 0, 0]),
        },
        // flush while disabled: vld must stay low
        Witness {
            bug: "CS_B2",
            input: WitnessInput::Controller(vec![1 << IN_FLUSH, 0, 0]),
        },
    ]
}

pub fn witness_for(bug: &str) -> Option<Witness> {
    all_witnesses().into_iter().find(|w| w.bug == bug)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::controller::{controller_manifest, controller_run};
    use crate::dut::{dut_manifest, BugConfig};
    use crate::engine::run_input;

    #[test]
    fn one_witness_per_toggle() {
        let names: Vec<&str> = all_witnesses().iter().map(|w| w.bug).collect();
        assert_eq!(names.len(), BugConfig::NAMES.len());
        for n in BugConfig::NAMES {
            assert!(names.contains(n), "missing witness for {n}");
        }
    }

    #[test]
    fn each_witness_fires_its_bug_and_only_then() {
        let dm = dut_manifest();
        let cm = controller_manifest();
        for w in all_witnesses() {
            let on = BugConfig::with(w.bug).unwrap();
            match &w.input {
                WitnessInput::Pipeline(p) => {
                    let buggy = run_input(p, on, 2000, &dm);
                    assert!(buggy.mismatch.is_some(), "{} witness missed", w.bug);
                    let clean = run_input(p, BugConfig::default(), 2000, &dm);
                    assert!(clean.mismatch.is_none(), "{} witness false-fires", w.bug);
                }
                WitnessInput::Controller(seq) => {
                    let (buggy, _) = controller_run(seq, on, &cm);
                    let (golden, _) = controller_run(seq, BugConfig::default(), &cm);
                    assert_ne!(buggy, golden, "{} witness missed", w.bug);
                }
            }
        }
    }
}
