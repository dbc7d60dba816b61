// SPDX-License-Identifier: Apache-2.0

//! Commit-trace types shared by the GRM and the DUT.

use serde::{Deserialize, Serialize};

/// One retired instruction's architectural effects.
///
/// A trapping instruction retires as a single event carrying the trap-side
/// CSR writes (EPCR/ESTATUS/EEAR/STATUS) explicitly and nothing else. For
/// fetch faults the word could not be read and `instr_word` is 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommitEvent {
    pub seq: u64,
    pub pc: u32,
    pub instr_word: u32,
    /// (index, value); writes to x0 are architecturally ignored and never
    /// listed.
    pub gpr_writes: Vec<(u8, u32)>,
    /// (csr address, new value)
    pub csr_writes: Vec<(u16, u32)>,
    /// (address, size in bytes, value)
    pub mem_writes: Vec<(u32, u8, u32)>,
    pub exception: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RunStatus {
    Halted,
    Budget,
    DoubleFault,
}

/// Ordered commit events plus the terminal status.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArchTrace {
    pub events: Vec<CommitEvent>,
    pub status: RunStatus,
}

impl ArchTrace {
    /// One CommitEvent per line, for the replay command.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            out.push_str(&serde_json::to_string(e).expect("serializable"));
            out.push('\n');
        }
        out
    }
}
