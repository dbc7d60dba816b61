// SPDX-License-Identifier: Apache-2.0

//! The design under test: a cycle-stepped micro-architectural MiniRV
//! simulator with a 3-stage pipeline (fetch, decode/execute, writeback),
//! register forwarding, a direct-mapped instruction cache driven by an
//! FSM controller, and a CSR/privilege unit.
//!
//! Every injected bug is a config toggle; with all toggles off the
//! committed instruction stream is architecturally identical to the GRM's
//! for any program. Coverage probes fire as the pipeline runs and
//! accumulate into a per-run map over the manifest from [`dut_manifest`].
//!
//! The DUT deliberately re-implements the instruction semantics instead
//! of calling into the GRM: the differential comparison is only meaningful
//! if the two sides are independent.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::coverage::{
    CoverageManifest, CoverageMap, Metric, Observation, Probe, ProbeId, ProbeKind,
    ToggleTracker, Wire,
};
use crate::isa::{self, cause, csr, Mnemonic};
use crate::trace::{ArchTrace, CommitEvent, RunStatus};

/// Hang budget per input (cycles).
pub const DEFAULT_MAX_CYCLES: u64 = 2000;

/// Cause reported by the buggy fetch-fault path (EXC_TYPE): a fixed
/// page-fault-like constant instead of the access-fault cause.
pub const BOGUS_FETCH_CAUSE: u32 = 12;

/// Reserved opcode accepted by the buggy decoder (ILLEGAL_ACCEPT).
pub const RESERVED_OPCODE: u32 = 0x5B;

const CACHE_LINES: usize = 16;
/// Stores below this boundary can land on fetchable code.
const LINE_BYTES: usize = 16;

macro_rules! bug_toggles {
    ($($field:ident => $name:literal),+ $(,)?) => {
        /// Independent bug toggles; all-off means the DUT is
        /// architecturally equivalent to the GRM.
        #[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
        #[serde(default)]
        pub struct BugConfig {
            $(pub $field: bool),+
        }

        impl BugConfig {
            pub const NAMES: &'static [&'static str] = &[$($name),+];

            pub fn set(&mut self, name: &str, value: bool) -> Result<(), UnknownBug> {
                match name {
                    $($name => { self.$field = value; Ok(()) })+
                    _ => Err(UnknownBug(name.to_string())),
                }
            }

            pub fn with(name: &str) -> Result<BugConfig, UnknownBug> {
                let mut cfg = BugConfig::default();
                cfg.set(name, true)?;
                Ok(cfg)
            }

            pub fn enabled(&self) -> Vec<&'static str> {
                let mut out = Vec::new();
                $(if self.$field { out.push($name); })+
                out
            }
        }
    };
}

bug_toggles! {
    fence_fields => "FENCE_FIELDS",
    exc_type => "EXC_TYPE",
    illegal_accept => "ILLEGAL_ACCEPT",
    cache_incoherence => "CACHE_INCOHERENCE",
    carry_sub => "CARRY_SUB",
    priv_epcr => "PRIV_EPCR",
    eear_ro => "EEAR_RO",
    gpr0_fwd => "GPR0_FWD",
    mac_overflow => "MAC_OVERFLOW",
    instret_ebreak => "INSTRET_EBREAK",
    overflow_sub => "OVERFLOW_SUB",
    cs_b1 => "CS_B1",
    cs_b2 => "CS_B2",
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("unknown bug toggle {0:?}")]
pub struct UnknownBug(pub String);

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum DutError {
    #[error("memory image of {0} bytes exceeds the 64 KiB RAM")]
    ImageTooLarge(usize),
    #[error("coverage manifest does not match this DUT build")]
    ManifestMismatch,
}

/// Probe manifest for this DUT build: every decoder arm (statement and
/// branch), ALU flag expressions, trap-condition conjunctions, pipeline
/// and FLAGS register toggles, the cache-controller FSM, forwarding-select
/// muxes, and the {flush-pending, cache-en} control group.
pub fn dut_manifest() -> Arc<CoverageManifest> {
    let mut probes = Vec::new();
    for &m in Mnemonic::ALL {
        probes.push(Probe {
            unit: format!("stmt_{}", m.name()),
            kind: ProbeKind::Statement,
            block: 0,
        });
    }
    probes.push(Probe { unit: "stmt_illegal".into(), kind: ProbeKind::Statement, block: 0 });
    probes.push(Probe { unit: "stmt_fetch_fault".into(), kind: ProbeKind::Statement, block: 0 });

    probes.push(Probe { unit: "br_decode_legal".into(), kind: ProbeKind::Branch, block: 0 });
    for m in ["BEQ", "BNE", "BLT", "BGE", "BLTU", "BGEU"] {
        probes.push(Probe { unit: format!("br_{m}"), kind: ProbeKind::Branch, block: 0 });
    }
    probes.push(Probe { unit: "br_cache_hit".into(), kind: ProbeKind::Branch, block: 0 });
    probes.push(Probe { unit: "br_csr_priv".into(), kind: ProbeKind::Branch, block: 0 });
    probes.push(Probe { unit: "br_mem_align".into(), kind: ProbeKind::Branch, block: 0 });

    probes.push(Probe {
        unit: "cond_fence_fields".into(),
        kind: ProbeKind::Condition { inputs: 3 },
        block: 0,
    });
    probes.push(Probe {
        unit: "cond_csr_priv".into(),
        kind: ProbeKind::Condition { inputs: 4 },
        block: 0,
    });
    probes.push(Probe {
        unit: "cond_mem_align".into(),
        kind: ProbeKind::Condition { inputs: 3 },
        block: 0,
    });
    probes.push(Probe {
        unit: "cond_fetch_fault".into(),
        kind: ProbeKind::Condition { inputs: 2 },
        block: 0,
    });
    probes.push(Probe {
        unit: "cond_decode".into(),
        kind: ProbeKind::Condition { inputs: 3 },
        block: 0,
    });

    probes.push(Probe {
        unit: "expr_add_flags".into(),
        kind: ProbeKind::Expression { inputs: 3 },
        block: 0,
    });
    probes.push(Probe {
        unit: "expr_sub_flags".into(),
        kind: ProbeKind::Expression { inputs: 3 },
        block: 0,
    });
    probes.push(Probe {
        unit: "expr_mac_flags".into(),
        kind: ProbeKind::Expression { inputs: 3 },
        block: 0,
    });
    // multiplier corner coverage: only sampled when the full-width product
    // no longer fits the accumulator
    probes.push(Probe {
        unit: "expr_mac_wide".into(),
        kind: ProbeKind::Expression { inputs: 4 },
        block: 0,
    });
    probes.push(Probe {
        unit: "cond_mac_sat".into(),
        kind: ProbeKind::Condition { inputs: 2 },
        block: 0,
    });

    // per-run overflow-event counters, as a verification IP would track
    // them; saturating
    probes.push(Probe {
        unit: "fsm_mac_ovf".into(),
        kind: ProbeKind::Fsm { states: 8, transitions: 7 },
        block: 0,
    });

    probes.push(Probe {
        unit: "tog_ui_imm".into(),
        kind: ProbeKind::Toggle { bits: 20, tristate: false },
        block: 0,
    });
    // cross-subsystem scoreboard: counts distinct target slots that
    // exercised the non-arithmetic subsystems (load port, byte store,
    // compare-branch, fence, ecall, ebreak, csr-clear); once seven are
    // ticked the downstream stream is sampled (opcode mix, depth, class)
    probes.push(Probe {
        unit: "fsm_sb_count".into(),
        kind: ProbeKind::Fsm { states: 16, transitions: 15 },
        block: 0,
    });
    probes.push(Probe {
        unit: "expr_warm_op".into(),
        kind: ProbeKind::Expression { inputs: 6 },
        block: 0,
    });
    probes.push(Probe {
        unit: "fsm_warm_depth".into(),
        kind: ProbeKind::Fsm { states: 16, transitions: 15 },
        block: 0,
    });
    probes.push(Probe {
        unit: "cond_warm_class".into(),
        kind: ProbeKind::Condition { inputs: 3 },
        block: 0,
    });

    probes.push(Probe {
        unit: "expr_fwd_rs1".into(),
        kind: ProbeKind::Expression { inputs: 2 },
        block: 0,
    });
    probes.push(Probe {
        unit: "expr_fwd_rs2".into(),
        kind: ProbeKind::Expression { inputs: 2 },
        block: 0,
    });

    probes.push(Probe {
        unit: "tog_fx_word".into(),
        kind: ProbeKind::Toggle { bits: 32, tristate: false },
        block: 0,
    });
    probes.push(Probe {
        unit: "tog_xw_value".into(),
        kind: ProbeKind::Toggle { bits: 32, tristate: false },
        block: 0,
    });
    probes.push(Probe {
        unit: "tog_xw_rd".into(),
        kind: ProbeKind::Toggle { bits: 5, tristate: false },
        block: 0,
    });
    probes.push(Probe {
        unit: "tog_flags".into(),
        kind: ProbeKind::Toggle { bits: 2, tristate: false },
        block: 0,
    });

    probes.push(Probe {
        unit: "fsm_icache".into(),
        kind: ProbeKind::Fsm { states: 4, transitions: 6 },
        block: 0,
    });


    probes.push(Probe { unit: "mux_fwd_rs1".into(), kind: ProbeKind::Mux, block: 0 });
    probes.push(Probe { unit: "mux_fwd_rs2".into(), kind: ProbeKind::Mux, block: 0 });

    probes.push(Probe {
        unit: "ctrl_cache".into(),
        kind: ProbeKind::CtrlReg { width: 2 },
        block: 0,
    });

    CoverageManifest::new(probes)
}

/// Cache controller FSM states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CacheFsm {
    Idle = 0,
    Lookup = 1,
    Refill = 2,
    Flush = 3,
}

// Declared FSM transitions, in manifest order.
const T_IDLE_LOOKUP: u8 = 0;
const T_LOOKUP_REFILL: u8 = 1;
const T_REFILL_LOOKUP: u8 = 2;
const T_LOOKUP_FLUSH: u8 = 3;
const T_FLUSH_IDLE: u8 = 4;
const T_IDLE_FLUSH: u8 = 5;

#[derive(Debug, Clone)]
struct ICache {
    tags: [u32; CACHE_LINES],
    valid: [bool; CACHE_LINES],
    data: [[u8; LINE_BYTES]; CACHE_LINES],
}

impl ICache {
    fn cold() -> ICache {
        ICache { tags: [0; CACHE_LINES], valid: [false; CACHE_LINES], data: [[0; LINE_BYTES]; CACHE_LINES] }
    }

    fn index(addr: u32) -> usize {
        (addr as usize / LINE_BYTES) % CACHE_LINES
    }

    fn tag(addr: u32) -> u32 {
        addr / (CACHE_LINES * LINE_BYTES) as u32
    }

    fn lookup(&self, addr: u32) -> Option<u32> {
        let i = Self::index(addr);
        if self.valid[i] && self.tags[i] == Self::tag(addr) {
            let off = addr as usize % LINE_BYTES;
            let b = &self.data[i][off..off + 4];
            Some(u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
        } else {
            None
        }
    }

    fn refill(&mut self, addr: u32, mem: &[u8]) {
        let i = Self::index(addr);
        let base = (addr as usize / LINE_BYTES) * LINE_BYTES % isa::MEM_SIZE;
        self.data[i].copy_from_slice(&mem[base..base + LINE_BYTES]);
        self.tags[i] = Self::tag(addr);
        self.valid[i] = true;
    }

    fn invalidate_addr(&mut self, addr: u32) {
        let i = Self::index(addr);
        if self.valid[i] && self.tags[i] == Self::tag(addr) {
            self.valid[i] = false;
        }
    }

    fn invalidate_all(&mut self) {
        self.valid = [false; CACHE_LINES];
    }
}

#[derive(Debug, Clone, Copy)]
struct Fetched {
    pc: u32,
    word: u32,
    fault: Option<u32>,
}

/// In-flight result between execute and writeback. `gpr_write` keeps x0
/// destinations so the forwarding network can (buggily) see them; the
/// regfile and the commit event filter x0 out.
#[derive(Debug, Clone)]
struct Packet {
    pc: u32,
    word: u32,
    gpr_write: Option<(u8, u32)>,
    csr_writes: Vec<(u16, u32)>,
    mem_write: Option<(u32, u8, u32)>,
    exception: Option<u32>,
    counts_retire: bool,
}

/// Resolved probe handles, looked up once at reset.
#[derive(Debug, Clone)]
struct Probes {
    stmt: Vec<ProbeId>, // by mnemonic index
    stmt_illegal: ProbeId,
    stmt_fetch_fault: ProbeId,
    br_decode_legal: ProbeId,
    br_branch: Vec<ProbeId>, // BEQ..BGEU in Mnemonic order
    br_cache_hit: ProbeId,
    br_csr_priv: ProbeId,
    br_mem_align: ProbeId,
    cond_fence_fields: ProbeId,
    cond_csr_priv: ProbeId,
    cond_mem_align: ProbeId,
    cond_fetch_fault: ProbeId,
    cond_decode: ProbeId,
    expr_add_flags: ProbeId,
    expr_sub_flags: ProbeId,
    expr_mac_flags: ProbeId,
    expr_mac_wide: ProbeId,
    cond_mac_sat: ProbeId,
    fsm_mac_ovf: ProbeId,
    fsm_sb_count: ProbeId,
    expr_warm_op: ProbeId,
    fsm_warm_depth: ProbeId,
    cond_warm_class: ProbeId,
    expr_fwd_rs1: ProbeId,
    expr_fwd_rs2: ProbeId,
    fsm: ProbeId,
    mux_fwd_rs1: ProbeId,
    mux_fwd_rs2: ProbeId,
    ctrl_cache: ProbeId,
}

impl Probes {
    fn resolve(m: &CoverageManifest) -> Probes {
        let branches = [
            Mnemonic::Beq,
            Mnemonic::Bne,
            Mnemonic::Blt,
            Mnemonic::Bge,
            Mnemonic::Bltu,
            Mnemonic::Bgeu,
        ];
        Probes {
            stmt: Mnemonic::ALL
                .iter()
                .map(|mn| m.expect_probe(Metric::Statement, &format!("stmt_{}", mn.name())))
                .collect(),
            stmt_illegal: m.expect_probe(Metric::Statement, "stmt_illegal"),
            stmt_fetch_fault: m.expect_probe(Metric::Statement, "stmt_fetch_fault"),
            br_decode_legal: m.expect_probe(Metric::Branch, "br_decode_legal"),
            br_branch: branches
                .iter()
                .map(|b| m.expect_probe(Metric::Branch, &format!("br_{}", b.name())))
                .collect(),
            br_cache_hit: m.expect_probe(Metric::Branch, "br_cache_hit"),
            br_csr_priv: m.expect_probe(Metric::Branch, "br_csr_priv"),
            br_mem_align: m.expect_probe(Metric::Branch, "br_mem_align"),
            cond_fence_fields: m.expect_probe(Metric::Condition, "cond_fence_fields"),
            cond_csr_priv: m.expect_probe(Metric::Condition, "cond_csr_priv"),
            cond_mem_align: m.expect_probe(Metric::Condition, "cond_mem_align"),
            cond_fetch_fault: m.expect_probe(Metric::Condition, "cond_fetch_fault"),
            cond_decode: m.expect_probe(Metric::Condition, "cond_decode"),
            expr_add_flags: m.expect_probe(Metric::Expression, "expr_add_flags"),
            expr_sub_flags: m.expect_probe(Metric::Expression, "expr_sub_flags"),
            expr_mac_flags: m.expect_probe(Metric::Expression, "expr_mac_flags"),
            expr_mac_wide: m.expect_probe(Metric::Expression, "expr_mac_wide"),
            cond_mac_sat: m.expect_probe(Metric::Condition, "cond_mac_sat"),
            fsm_mac_ovf: m.expect_probe(Metric::Fsm, "fsm_mac_ovf"),
            fsm_sb_count: m.expect_probe(Metric::Fsm, "fsm_sb_count"),
            expr_warm_op: m.expect_probe(Metric::Expression, "expr_warm_op"),
            fsm_warm_depth: m.expect_probe(Metric::Fsm, "fsm_warm_depth"),
            cond_warm_class: m.expect_probe(Metric::Condition, "cond_warm_class"),
            expr_fwd_rs1: m.expect_probe(Metric::Expression, "expr_fwd_rs1"),
            expr_fwd_rs2: m.expect_probe(Metric::Expression, "expr_fwd_rs2"),
            fsm: m.expect_probe(Metric::Fsm, "fsm_icache"),
            mux_fwd_rs1: m.expect_probe(Metric::Mux, "mux_fwd_rs1"),
            mux_fwd_rs2: m.expect_probe(Metric::Mux, "mux_fwd_rs2"),
            ctrl_cache: m.expect_probe(Metric::CtrlReg, "ctrl_cache"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct DutState {
    // architectural mirror of the GRM's ArchState
    pub pc: u32, // fetch pc
    pub gpr: [u32; 32],
    pub mem: Vec<u8>,
    pub status: u32,
    pub epcr: u32,
    pub estatus: u32,
    pub eear: u32,
    pub flags: u32,
    pub instret: u64,
    // micro-architecture
    fx: Option<Fetched>,
    xw: Option<Packet>,
    cache: ICache,
    fsm: CacheFsm,
    flush_pending: bool,
    cache_en: bool,
    pub cycles: u64,
    commit_seq: u64,
    halted: bool,
    bugs: BugConfig,
    coverage: CoverageMap,
    probes: Probes,
    tog_fx_word: ToggleTracker,
    tog_xw_value: ToggleTracker,
    tog_xw_rd: ToggleTracker,
    tog_flags: ToggleTracker,
    tog_ui_imm: ToggleTracker,
    mac_ovf_count: u8,
    // distinct target slots only, so loops cannot inflate the scoreboard
    sb_slots: u32,
    sb_count: u8,
    seen_slots: u32,
    warm_depth: u8,
}

/// Cold caches, empty pipeline, architectural state as `grm_reset`.
pub fn dut_reset(
    image: &[u8],
    entry_pc: u32,
    bugs: BugConfig,
    manifest: &Arc<CoverageManifest>,
) -> Result<DutState, DutError> {
    if image.len() > isa::MEM_SIZE {
        return Err(DutError::ImageTooLarge(image.len()));
    }
    if manifest.id() != dut_manifest().id() {
        return Err(DutError::ManifestMismatch);
    }
    let mut mem = vec![0u8; isa::MEM_SIZE];
    mem[..image.len()].copy_from_slice(image);
    Ok(DutState {
        pc: entry_pc,
        gpr: [0; 32],
        mem,
        status: 1,
        epcr: 0,
        estatus: 0,
        eear: 0,
        flags: 0,
        instret: 0,
        fx: None,
        xw: None,
        cache: ICache::cold(),
        fsm: CacheFsm::Idle,
        flush_pending: false,
        cache_en: true,
        cycles: 0,
        commit_seq: 0,
        halted: false,
        bugs,
        coverage: CoverageMap::empty(manifest),
        probes: Probes::resolve(manifest),
        tog_fx_word: ToggleTracker::new(manifest, "tog_fx_word", Wire::Zero),
        tog_xw_value: ToggleTracker::new(manifest, "tog_xw_value", Wire::Zero),
        tog_xw_rd: ToggleTracker::new(manifest, "tog_xw_rd", Wire::Zero),
        tog_flags: ToggleTracker::new(manifest, "tog_flags", Wire::Zero),
        tog_ui_imm: ToggleTracker::new(manifest, "tog_ui_imm", Wire::Zero),
        mac_ovf_count: 0,
        sb_slots: 0,
        sb_count: 0,
        seen_slots: 0,
        warm_depth: 0,
    })
}

fn vec3(a: bool, b: bool, c: bool) -> u8 {
    a as u8 | (b as u8) << 1 | (c as u8) << 2
}

impl DutState {
    pub fn halted(&self) -> bool {
        self.halted
    }

    pub fn coverage(&self) -> &CoverageMap {
        &self.coverage
    }

    pub fn bugs(&self) -> &BugConfig {
        &self.bugs
    }

    fn machine_mode(&self) -> bool {
        self.status & 1 == 1
    }

    fn read8(&self, addr: u32) -> u8 {
        self.mem[addr as usize % isa::MEM_SIZE]
    }

    fn read16(&self, addr: u32) -> u16 {
        u16::from(self.read8(addr)) | u16::from(self.read8(addr.wrapping_add(1))) << 8
    }

    fn read32(&self, addr: u32) -> u32 {
        u32::from(self.read16(addr)) | u32::from(self.read16(addr.wrapping_add(2))) << 16
    }

    /// Advance one clock. Writeback applies first, then decode/execute
    /// (with register forwarding from the retiring packet), then fetch.
    pub fn dut_cycle(&mut self, halt_pc: u32) -> Option<CommitEvent> {
        self.cycles += 1;

        // W: retire the in-flight packet
        let retiring = self.xw.take();
        let committed = retiring.as_ref().map(|p| self.apply_packet(p.clone()));

        // X: decode + execute
        if let Some(f) = self.fx.take() {
            if f.pc == halt_pc {
                self.halted = true;
            } else {
                self.xw = Some(self.execute(f, retiring.as_ref()));
            }
        }

        // control-register observation, before the fetch phase consumes a
        // pending flush
        let ctrl = (self.flush_pending as u16) << 1 | self.cache_en as u16;
        let id = self.probes.ctrl_cache;
        self.coverage.record(id, Observation::CtrlReg { value: ctrl });

        // F: cache controller + fetch
        self.fetch_phase();

        committed
    }

    fn apply_packet(&mut self, p: Packet) -> CommitEvent {
        let mut event = CommitEvent {
            seq: self.commit_seq,
            pc: p.pc,
            instr_word: p.word,
            gpr_writes: Vec::new(),
            csr_writes: p.csr_writes.clone(),
            mem_writes: Vec::new(),
            exception: p.exception,
        };
        self.commit_seq += 1;
        if p.counts_retire {
            self.instret += 1;
        }

        if let Some((rd, v)) = p.gpr_write {
            if rd != 0 {
                self.gpr[rd as usize] = v;
                event.gpr_writes.push((rd, v));
            }
            self.tog_xw_value.observe_bits(&mut self.coverage, v);
            self.tog_xw_rd.observe_bits(&mut self.coverage, rd as u32);
        }
        for &(addr, v) in &p.csr_writes {
            match addr {
                csr::STATUS => self.status = v,
                csr::EPCR => self.epcr = v,
                csr::ESTATUS => self.estatus = v,
                csr::EEAR => self.eear = v,
                csr::FLAGS => self.flags = v,
                _ => {}
            }
        }
        self.tog_flags.observe_bits(&mut self.coverage, self.flags & 3);

        if let Some((addr, size, value)) = p.mem_write {
            for i in 0..size {
                let a = addr.wrapping_add(i as u32) as usize % isa::MEM_SIZE;
                self.mem[a] = (value >> (8 * i)) as u8;
            }
            event.mem_writes.push((addr, size, value));
            if !self.bugs.cache_incoherence {
                // keep fetch coherent: drop matching cache lines and any
                // overlapping in-flight fetch
                self.cache.invalidate_addr(addr);
                self.cache.invalidate_addr(addr.wrapping_add(size as u32 - 1));
                if let Some(f) = self.fx {
                    let wstart = addr;
                    let wend = addr.wrapping_add(size as u32);
                    let istart = f.pc;
                    let iend = f.pc.wrapping_add(4);
                    if wstart < iend && istart < wend {
                        self.fx = None;
                        self.pc = f.pc;
                    }
                }
            }
        }
        event
    }

    /// Saturating per-run event counter modelled as an FSM probe.
    fn count_event(&mut self, probe: ProbeId, count: u8, fired: bool, cap: u8) -> u8 {
        self.coverage.record(probe, Observation::FsmState { state: count });
        if fired && count < cap {
            self.coverage.record(probe, Observation::FsmTransition { index: count });
            self.coverage.record(probe, Observation::FsmState { state: count + 1 });
            return count + 1;
        }
        count
    }

    /// Register read with the distance-1 forwarding mux.
    fn read_reg_forwarded(&mut self, idx: u8, fwd: Option<&Packet>, port_rs1: bool) -> u32 {
        let source = fwd.and_then(|p| p.gpr_write);
        let matches = source.is_some_and(|(rd, _)| rd == idx);
        let rd_zero = source.is_some_and(|(rd, _)| rd == 0);
        let select = if self.bugs.gpr0_fwd {
            matches
        } else {
            matches && !rd_zero
        };
        let (mux, expr) = if port_rs1 {
            (self.probes.mux_fwd_rs1, self.probes.expr_fwd_rs1)
        } else {
            (self.probes.mux_fwd_rs2, self.probes.expr_fwd_rs2)
        };
        self.coverage.record(mux, Observation::Mux { select });
        self.coverage.record(
            expr,
            Observation::Inputs { vector: matches as u8 | (rd_zero as u8) << 1 },
        );
        if select {
            source.unwrap().1
        } else {
            self.gpr[idx as usize]
        }
    }

    fn trap_packet(&self, f: &Fetched, trap_cause: u32, eear: u32) -> Packet {
        let old_status = self.status;
        let mut csr_writes = vec![
            (csr::EPCR, f.pc),
            (csr::ESTATUS, old_status),
        ];
        if !self.bugs.eear_ro {
            csr_writes.push((csr::EEAR, eear));
        }
        csr_writes.push((csr::STATUS, old_status | 1));
        Packet {
            pc: f.pc,
            word: f.word,
            gpr_write: None,
            csr_writes,
            mem_write: None,
            exception: Some(trap_cause),
            counts_retire: true,
        }
    }

    fn execute(&mut self, f: Fetched, fwd: Option<&Packet>) -> Packet {
        self.tog_fx_word.observe_bits(&mut self.coverage, f.word);

        if let Some(fault) = f.fault {
            self.coverage.record(self.probes.stmt_fetch_fault, Observation::Statement);
            let reported = if fault == cause::FETCH_ACCESS && self.bugs.exc_type {
                BOGUS_FETCH_CAUSE
            } else {
                fault
            };
            self.pc = isa::TRAP_VECTOR;
            return self.trap_packet(&f, reported, f.pc);
        }

        let word = f.word;
        let opc = word & 0x7F;
        let major_known = matches!(
            opc,
            0x33 | 0x0B | 0x13 | 0x03 | 0x23 | 0x63 | 0x37 | 0x17 | 0x6F | 0x67 | 0x0F | 0x73
        );
        let mut decoded = isa::decode(word);
        // ILLEGAL_ACCEPT: one reserved pattern slips through the decoder
        // and executes as ADD
        if decoded.is_none()
            && self.bugs.illegal_accept
            && opc == RESERVED_OPCODE
            && word >> 12 & 0x7 == 0
        {
            let add = isa::encode(
                Mnemonic::Add,
                isa::Operands::r(
                    (word >> 7 & 0x1F) as u8,
                    (word >> 15 & 0x1F) as u8,
                    (word >> 20 & 0x1F) as u8,
                ),
            )
            .expect("register fields are in range");
            decoded = isa::decode(add).map(|i| isa::Instruction { word, ..i });
        }
        self.coverage.record(
            self.probes.cond_decode,
            Observation::Inputs {
                vector: vec3(word & 3 == 3, major_known, decoded.is_some()),
            },
        );
        self.coverage.record(
            self.probes.br_decode_legal,
            Observation::Branch { taken: decoded.is_some() },
        );
        let Some(instr) = decoded else {
            self.coverage.record(self.probes.stmt_illegal, Observation::Statement);
            self.pc = isa::TRAP_VECTOR;
            return self.trap_packet(&f, cause::ILLEGAL, f.pc);
        };

        self.coverage
            .record(self.probes.stmt[instr.mnemonic.index()], Observation::Statement);

        // subsystem scoreboard plus a steady-state sampler that fires on a
        // slot's first execution once seven scoreboard slots are ticked
        let slot = f.pc.wrapping_sub(isa::TI_BASE) / 4;
        let slot_bit = if f.pc >= isa::TI_BASE && slot < 32 { 1u32 << slot } else { 0 };
        let fresh = slot_bit != 0 && self.seen_slots & slot_bit == 0;
        self.seen_slots |= slot_bit;
        if self.sb_count >= 7 && fresh {
            self.coverage.record(
                self.probes.expr_warm_op,
                Observation::Inputs { vector: instr.mnemonic.index() as u8 },
            );
            self.warm_depth =
                self.count_event(self.probes.fsm_warm_depth, self.warm_depth, true, 15);
            let class = matches!(instr.format, isa::Format::S) as u8
                | (matches!(instr.format, isa::Format::B | isa::Format::J) as u8) << 1
                | ((instr.word & 0x7F == 0x03) as u8) << 2;
            self.coverage
                .record(self.probes.cond_warm_class, Observation::Inputs { vector: class });
        }
        let scoreboard_op = matches!(
            instr.mnemonic,
            Mnemonic::Lw
                | Mnemonic::Sb
                | Mnemonic::Bne
                | Mnemonic::FenceI
                | Mnemonic::Ecall
                | Mnemonic::Ebreak
                | Mnemonic::Csrrc
        );
        if scoreboard_op && slot_bit != 0 && self.sb_slots & slot_bit == 0 {
            self.sb_slots |= slot_bit;
            self.sb_count =
                self.count_event(self.probes.fsm_sb_count, self.sb_count, true, 15);
        }

        // FENCE_FIELDS: the buggy decoder refuses to ignore imm/rs1/rd
        if instr.mnemonic == Mnemonic::FenceI {
            let v = vec3(instr.imm != 0, instr.rs1 != 0, instr.rd != 0);
            self.coverage
                .record(self.probes.cond_fence_fields, Observation::Inputs { vector: v });
            if self.bugs.fence_fields && v != 0 {
                self.pc = isa::TRAP_VECTOR;
                return self.trap_packet(&f, cause::ILLEGAL, f.pc);
            }
        }

        use Mnemonic::*;
        let uses_rs1 = !matches!(instr.format, isa::Format::U | isa::Format::J | isa::Format::Sys)
            && instr.mnemonic != FenceI;
        let uses_rs2 = matches!(instr.format, isa::Format::R | isa::Format::S | isa::Format::B);
        let rs1v = if uses_rs1 {
            self.read_reg_forwarded(instr.rs1, fwd, true)
        } else {
            0
        };
        let rs2v = if uses_rs2 {
            self.read_reg_forwarded(instr.rs2, fwd, false)
        } else {
            0
        };
        let imm = instr.imm;
        let pc = f.pc;

        let mut packet = Packet {
            pc,
            word,
            gpr_write: None,
            csr_writes: Vec::new(),
            mem_write: None,
            exception: None,
            counts_retire: true,
        };
        let mut next_pc = pc.wrapping_add(4);

        match instr.mnemonic {
            Add | Addi => {
                let b = if instr.mnemonic == Addi { imm as u32 } else { rs2v };
                let (r, carry) = rs1v.overflowing_add(b);
                let overflow = (rs1v ^ !b) & (rs1v ^ r) & 0x8000_0000 != 0;
                self.coverage.record(
                    self.probes.expr_add_flags,
                    Observation::Inputs {
                        vector: vec3(rs1v >> 31 == 1, b >> 31 == 1, r >> 31 == 1),
                    },
                );
                let flags = (self.flags & !3)
                    | carry as u32 * isa::FLAG_CARRY
                    | overflow as u32 * isa::FLAG_OVERFLOW;
                packet.gpr_write = Some((instr.rd, r));
                packet.csr_writes.push((csr::FLAGS, flags));
            }
            Sub => {
                let r = rs1v.wrapping_sub(rs2v);
                self.coverage.record(
                    self.probes.expr_sub_flags,
                    Observation::Inputs {
                        vector: vec3(rs1v >> 31 == 1, rs2v >> 31 == 1, r >> 31 == 1),
                    },
                );
                let carry = if self.bugs.carry_sub {
                    // carry-out of the internal two's-complement addition
                    (rs1v as u64 + !rs2v as u64 + 1) >> 32 == 1
                } else {
                    rs1v < rs2v
                };
                let overflow = if self.bugs.overflow_sub {
                    // addition-style overflow test applied to a subtract
                    (rs1v ^ !rs2v) & (rs1v ^ r) & 0x8000_0000 != 0
                } else {
                    (rs1v ^ rs2v) & (rs1v ^ r) & 0x8000_0000 != 0
                };
                let flags = (self.flags & !3)
                    | carry as u32 * isa::FLAG_CARRY
                    | overflow as u32 * isa::FLAG_OVERFLOW;
                packet.gpr_write = Some((instr.rd, r));
                packet.csr_writes.push((csr::FLAGS, flags));
            }
            Mac => {
                let acc = self.gpr[instr.rd as usize];
                let prod = rs1v.wrapping_mul(rs2v);
                let r = acc.wrapping_add(prod);
                self.coverage.record(
                    self.probes.expr_mac_flags,
                    Observation::Inputs {
                        vector: vec3(acc >> 31 == 1, prod >> 31 == 1, r >> 31 == 1),
                    },
                );
                let p64 = (rs1v as i32 as i64) * (rs2v as i32 as i64);
                let wide_hit = p64 > i32::MAX as i64 || p64 < i32::MIN as i64;
                self.mac_ovf_count =
                    self.count_event(self.probes.fsm_mac_ovf, self.mac_ovf_count, wide_hit, 7);
                if wide_hit {
                    let wide = (acc >> 31 == 1) as u8
                        | ((rs1v >> 31 == 1) as u8) << 1
                        | ((rs2v >> 31 == 1) as u8) << 2
                        | ((p64 >> 32 != (p64 >> 31 & 1) * -1i64) as u8) << 3;
                    self.coverage
                        .record(self.probes.expr_mac_wide, Observation::Inputs { vector: wide });
                    if p64.unsigned_abs() >= 1 << 47 {
                        let v = ((p64 < 0) as u8) | ((acc != 0) as u8) << 1;
                        self.coverage
                            .record(self.probes.cond_mac_sat, Observation::Inputs { vector: v });
                    }
                }
                let overflow = if self.bugs.mac_overflow {
                    // only the final accumulate step is checked
                    (acc ^ !prod) & (acc ^ r) & 0x8000_0000 != 0
                } else {
                    let ideal = acc as i32 as i64 + (rs1v as i32 as i64) * (rs2v as i32 as i64);
                    ideal != r as i32 as i64
                };
                let flags =
                    (self.flags & !isa::FLAG_OVERFLOW) | overflow as u32 * isa::FLAG_OVERFLOW;
                packet.gpr_write = Some((instr.rd, r));
                packet.csr_writes.push((csr::FLAGS, flags));
            }
            Slt | Slti => {
                let b = if instr.mnemonic == Slti { imm } else { rs2v as i32 };
                packet.gpr_write = Some((instr.rd, ((rs1v as i32) < b) as u32));
            }
            Sltu => {
                packet.gpr_write = Some((instr.rd, (rs1v < rs2v) as u32));
            }
            And | Andi => {
                let b = if instr.mnemonic == And { rs2v } else { imm as u32 };
                packet.gpr_write = Some((instr.rd, rs1v & b));
            }
            Or | Ori => {
                let b = if instr.mnemonic == Or { rs2v } else { imm as u32 };
                packet.gpr_write = Some((instr.rd, rs1v | b));
            }
            Xor | Xori => {
                let b = if instr.mnemonic == Xor { rs2v } else { imm as u32 };
                packet.gpr_write = Some((instr.rd, rs1v ^ b));
            }
            Sll | Slli => {
                let b = if instr.mnemonic == Sll { rs2v } else { imm as u32 };
                packet.gpr_write = Some((instr.rd, rs1v << (b & 31)));
            }
            Srl | Srli => {
                let b = if instr.mnemonic == Srl { rs2v } else { imm as u32 };
                packet.gpr_write = Some((instr.rd, rs1v >> (b & 31)));
            }
            Sra | Srai => {
                let b = if instr.mnemonic == Sra { rs2v } else { imm as u32 };
                packet.gpr_write = Some((instr.rd, ((rs1v as i32) >> (b & 31)) as u32));
            }
            Lui => {
                let v = (imm as u32) << 12;
                self.tog_ui_imm.observe_bits(&mut self.coverage, v >> 12);
                packet.gpr_write = Some((instr.rd, v));
            }
            Auipc => {
                let v = pc.wrapping_add((imm as u32) << 12);
                self.tog_ui_imm.observe_bits(&mut self.coverage, v >> 12);
                packet.gpr_write = Some((instr.rd, v));
            }
            Lw | Lh | Lhu | Lb | Lbu => {
                let addr = rs1v.wrapping_add(imm as u32);
                let align = match instr.mnemonic {
                    Lw => 3u32,
                    Lh | Lhu => 1,
                    _ => 0,
                };
                self.coverage.record(
                    self.probes.cond_mem_align,
                    Observation::Inputs { vector: vec3(addr & 1 == 1, addr & 2 == 2, false) },
                );
                let misaligned = addr & align != 0;
                self.coverage
                    .record(self.probes.br_mem_align, Observation::Branch { taken: misaligned });
                if misaligned {
                    self.pc = isa::TRAP_VECTOR;
                    return self.trap_packet(&f, cause::MISALIGNED_LOAD, addr);
                }
                let r = match instr.mnemonic {
                    Lw => self.read32(addr),
                    Lh => self.read16(addr) as i16 as i32 as u32,
                    Lhu => self.read16(addr) as u32,
                    Lb => self.read8(addr) as i8 as i32 as u32,
                    Lbu => self.read8(addr) as u32,
                    _ => unreachable!(),
                };
                packet.gpr_write = Some((instr.rd, r));
            }
            Sw | Sh | Sb => {
                let addr = rs1v.wrapping_add(imm as u32);
                let (align, size) = match instr.mnemonic {
                    Sw => (3u32, 4u8),
                    Sh => (1, 2),
                    _ => (0, 1),
                };
                self.coverage.record(
                    self.probes.cond_mem_align,
                    Observation::Inputs { vector: vec3(addr & 1 == 1, addr & 2 == 2, true) },
                );
                let misaligned = addr & align != 0;
                self.coverage
                    .record(self.probes.br_mem_align, Observation::Branch { taken: misaligned });
                if misaligned {
                    self.pc = isa::TRAP_VECTOR;
                    return self.trap_packet(&f, cause::MISALIGNED_STORE, addr);
                }
                let value = rs2v & if size == 4 { !0 } else { (1u32 << (8 * size)) - 1 };
                packet.mem_write = Some((addr, size, value));
            }
            Beq | Bne | Blt | Bge | Bltu | Bgeu => {
                let taken = match instr.mnemonic {
                    Beq => rs1v == rs2v,
                    Bne => rs1v != rs2v,
                    Blt => (rs1v as i32) < rs2v as i32,
                    Bge => (rs1v as i32) >= rs2v as i32,
                    Bltu => rs1v < rs2v,
                    Bgeu => rs1v >= rs2v,
                    _ => unreachable!(),
                };
                let which = instr.mnemonic.index() - Mnemonic::Beq.index();
                self.coverage
                    .record(self.probes.br_branch[which], Observation::Branch { taken });
                if taken {
                    let target = pc.wrapping_add(imm as u32);
                    if target & 3 != 0 {
                        self.pc = isa::TRAP_VECTOR;
                        return self.trap_packet(&f, cause::MISALIGNED_FETCH, pc);
                    }
                    next_pc = target;
                }
            }
            Jal => {
                let target = pc.wrapping_add(imm as u32);
                if target & 3 != 0 {
                    self.pc = isa::TRAP_VECTOR;
                    return self.trap_packet(&f, cause::MISALIGNED_FETCH, pc);
                }
                packet.gpr_write = Some((instr.rd, pc.wrapping_add(4)));
                next_pc = target;
            }
            Jalr => {
                let target = rs1v.wrapping_add(imm as u32) & !1;
                if target & 3 != 0 {
                    self.pc = isa::TRAP_VECTOR;
                    return self.trap_packet(&f, cause::MISALIGNED_FETCH, pc);
                }
                packet.gpr_write = Some((instr.rd, pc.wrapping_add(4)));
                next_pc = target;
            }
            FenceI => {
                self.flush_pending = true;
            }
            Ecall => {
                let c = if self.machine_mode() {
                    cause::ECALL_MACHINE
                } else {
                    cause::ECALL_USER
                };
                self.pc = isa::TRAP_VECTOR;
                return self.trap_packet(&f, c, pc);
            }
            Ebreak => {
                self.pc = isa::TRAP_VECTOR;
                let mut p = self.trap_packet(&f, cause::BREAKPOINT, pc);
                if self.bugs.instret_ebreak {
                    p.counts_retire = false;
                }
                return p;
            }
            Mret => {
                if !self.machine_mode() {
                    self.pc = isa::TRAP_VECTOR;
                    return self.trap_packet(&f, cause::ILLEGAL, pc);
                }
                let target = self.epcr;
                if target & 3 != 0 {
                    self.pc = isa::TRAP_VECTOR;
                    return self.trap_packet(&f, cause::MISALIGNED_FETCH, pc);
                }
                packet.csr_writes.push((csr::STATUS, self.estatus));
                next_pc = target;
            }
            Csrrw | Csrrs | Csrrc => {
                let addr = imm as u16;
                let spec = isa::IsaSpec::new();
                let rule = spec.csr_rule(addr);
                let wants_write = instr.mnemonic == Csrrw || instr.rs1 != 0;
                let machine_only = rule.is_some_and(|r| r.machine_only);
                let read_only = rule.is_some_and(|r| r.read_only);
                // PRIV_EPCR: the privilege check is skipped for EPCR
                let priv_checked = !(self.bugs.priv_epcr && addr == csr::EPCR);
                let illegal = rule.is_none()
                    || (machine_only && !self.machine_mode() && priv_checked)
                    || (wants_write && read_only);
                self.coverage.record(
                    self.probes.cond_csr_priv,
                    Observation::Inputs {
                        vector: vec3(!self.machine_mode(), machine_only, wants_write)
                            | (read_only as u8) << 3,
                    },
                );
                self.coverage
                    .record(self.probes.br_csr_priv, Observation::Branch { taken: illegal });
                if illegal {
                    self.pc = isa::TRAP_VECTOR;
                    return self.trap_packet(&f, cause::ILLEGAL, pc);
                }
                let read = match addr {
                    csr::STATUS => self.status,
                    csr::EPCR => self.epcr,
                    csr::ESTATUS => self.estatus,
                    csr::EEAR => self.eear,
                    csr::FLAGS => self.flags,
                    csr::INSTRET => self.instret as u32,
                    _ => unreachable!(),
                };
                packet.gpr_write = Some((instr.rd, read));
                if wants_write {
                    let v = match instr.mnemonic {
                        Csrrw => rs1v,
                        Csrrs => read | rs1v,
                        Csrrc => read & !rs1v,
                        _ => unreachable!(),
                    };
                    // EEAR_RO: the register-file write port for EEAR is
                    // missing; the write silently disappears
                    if !(self.bugs.eear_ro && addr == csr::EEAR) {
                        packet.csr_writes.push((addr, v));
                    }
                }
            }
        }
        self.pc = next_pc;
        packet
    }

    fn fsm_goto(&mut self, next: CacheFsm, transition: u8) {
        self.fsm = next;
        self.coverage
            .record(self.probes.fsm, Observation::FsmTransition { index: transition });
    }

    fn fetch_phase(&mut self) {
        self.coverage
            .record(self.probes.fsm, Observation::FsmState { state: self.fsm as u8 });
        match self.fsm {
            CacheFsm::Idle => {
                if self.flush_pending {
                    self.cache.invalidate_all();
                    self.flush_pending = false;
                    self.fsm_goto(CacheFsm::Flush, T_IDLE_FLUSH);
                } else if !self.halted {
                    self.fsm_goto(CacheFsm::Lookup, T_IDLE_LOOKUP);
                }
            }
            CacheFsm::Lookup => {
                if self.flush_pending {
                    self.cache.invalidate_all();
                    self.flush_pending = false;
                    self.fsm_goto(CacheFsm::Flush, T_LOOKUP_FLUSH);
                    return;
                }
                if self.halted || self.fx.is_some() {
                    return;
                }
                let pc = self.pc;
                let misaligned = pc & 3 != 0;
                let protected = pc >= isa::NOFETCH_BASE;
                self.coverage.record(
                    self.probes.cond_fetch_fault,
                    Observation::Inputs {
                        vector: misaligned as u8 | (protected as u8) << 1,
                    },
                );
                if misaligned {
                    self.fx = Some(Fetched { pc, word: 0, fault: Some(cause::MISALIGNED_FETCH) });
                    return;
                }
                if protected {
                    self.fx = Some(Fetched { pc, word: 0, fault: Some(cause::FETCH_ACCESS) });
                    return;
                }
                match self.cache.lookup(pc) {
                    Some(word) => {
                        self.coverage
                            .record(self.probes.br_cache_hit, Observation::Branch { taken: true });
                        self.fx = Some(Fetched { pc, word, fault: None });
                        self.pc = pc.wrapping_add(4);
                    }
                    None => {
                        self.coverage
                            .record(self.probes.br_cache_hit, Observation::Branch { taken: false });
                        self.fsm_goto(CacheFsm::Refill, T_LOOKUP_REFILL);
                    }
                }
            }
            CacheFsm::Refill => {
                let pc = self.pc;
                let mem = self.mem.clone();
                self.cache.refill(pc, &mem);
                self.fsm_goto(CacheFsm::Lookup, T_REFILL_LOOKUP);
            }
            CacheFsm::Flush => {
                self.fsm_goto(CacheFsm::Idle, T_FLUSH_IDLE);
            }
        }
    }
}

fn in_handler_region(pc: u32) -> bool {
    (isa::TRAP_VECTOR..isa::CI_BASE).contains(&pc)
}

/// Cycle until halt, the retired-instruction budget, the cycle budget
/// (hang), or a double fault. Returns the commit trace, the run's
/// coverage map, and the terminal status.
pub fn dut_run(
    state: &mut DutState,
    max_cycles: u64,
    instr_budget: usize,
    halt_pc: u32,
) -> (ArchTrace, CoverageMap, RunStatus) {
    assert!(max_cycles >= 1);
    let mut events = Vec::new();
    let status = loop {
        if state.halted {
            break RunStatus::Halted;
        }
        // the stop rule reads the architectural retired-instruction
        // counter, so an undercounting INSTRET shifts the cutoff
        if state.instret >= instr_budget as u64 {
            break RunStatus::Budget;
        }
        if state.cycles >= max_cycles {
            break RunStatus::Budget;
        }
        if let Some(event) = state.dut_cycle(halt_pc) {
            let double_fault = event.exception.is_some() && in_handler_region(event.pc);
            events.push(event);
            if double_fault {
                break RunStatus::DoubleFault;
            }
        }
    };
    let coverage = state.coverage.clone();
    (ArchTrace { events, status }, coverage, status)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grm;
    use crate::isa::{encode, Operands};

    fn image_of(words: &[u32]) -> Vec<u8> {
        let mut bytes = Vec::new();
        for w in words {
            bytes.extend_from_slice(&w.to_le_bytes());
        }
        bytes
    }

    fn run_both(words: &[u32], bugs: BugConfig) -> (ArchTrace, ArchTrace) {
        let image = image_of(words);
        let halt = (words.len() as u32 - 1) * 4;
        let manifest = dut_manifest();
        let mut dut = dut_reset(&image, 0, bugs, &manifest).unwrap();
        let (dt, _, _) = dut_run(&mut dut, 2000, 200, halt);
        let mut g = grm::grm_reset(&image, 0).unwrap();
        let gt = grm::grm_run(&mut g, 200, halt);
        (dt, gt)
    }

    #[test]
    fn reset_is_deterministic_and_bug_independent() {
        let img = image_of(&[isa::NOP_WORD]);
        let manifest = dut_manifest();
        let a = dut_reset(&img, 0, BugConfig::default(), &manifest).unwrap();
        let b = dut_reset(&img, 0, BugConfig::default(), &manifest).unwrap();
        assert_eq!(a.pc, b.pc);
        assert_eq!(a.gpr, b.gpr);
        let all_on = {
            let mut c = BugConfig::default();
            for name in BugConfig::NAMES {
                c.set(name, true).unwrap();
            }
            c
        };
        let c = dut_reset(&img, 0, all_on, &manifest).unwrap();
        assert_eq!(a.gpr, c.gpr);
        assert_eq!(a.mem, c.mem);
        // cold cache: first fetch must be a refill
        assert!(!a.cache.valid.iter().any(|&v| v));
    }

    #[test]
    fn bugs_off_matches_grm_on_straight_line_code() {
        let words = [
            encode(Mnemonic::Addi, Operands::i(1, 0, 100)).unwrap(),
            encode(Mnemonic::Addi, Operands::i(2, 1, -3)).unwrap(),
            encode(Mnemonic::Sub, Operands::r(3, 1, 2)).unwrap(),
            encode(Mnemonic::Mac, Operands::r(4, 1, 2)).unwrap(),
            encode(Mnemonic::Sw, Operands::s(0, 3, 0x700)).unwrap(),
            encode(Mnemonic::Lw, Operands::i(5, 0, 0x700)).unwrap(),
            isa::HALT_WORD,
        ];
        let (dt, gt) = run_both(&words, BugConfig::default());
        assert_eq!(dt, gt);
        assert_eq!(dt.status, RunStatus::Halted);
    }

    #[test]
    fn gpr0_forwarding_bug_doubles_through_both_ports() {
        // ADDI x0,x0,7 immediately followed by ADD x1,x0,x0: the buggy
        // forwarding path supplies 7 on both ports, so x1 becomes 14
        // (hand-traced through the rs1/rs2 forwarding muxes).
        let words = [
            encode(Mnemonic::Addi, Operands::i(0, 0, 7)).unwrap(),
            encode(Mnemonic::Add, Operands::r(1, 0, 0)).unwrap(),
            isa::HALT_WORD,
        ];
        let bug = BugConfig::with("GPR0_FWD").unwrap();
        let (dt, gt) = run_both(&words, bug);
        assert_eq!(dt.events[1].gpr_writes, vec![(1, 14)]);
        assert_eq!(gt.events[1].gpr_writes, vec![(1, 0)]);
        // and without the bug the traces agree
        let (dt, gt) = run_both(&words, BugConfig::default());
        assert_eq!(dt, gt);
    }

    #[test]
    fn fence_fields_bug_traps_on_nonzero_imm() {
        let fence = encode(Mnemonic::FenceI, Operands::i(0, 0, 5)).unwrap();
        let words = [fence, isa::HALT_WORD];
        let bug = BugConfig::with("FENCE_FIELDS").unwrap();
        let (dt, gt) = run_both(&words, bug);
        assert_eq!(dt.events[0].exception, Some(cause::ILLEGAL));
        assert_eq!(gt.events[0].exception, None);
        let (dt, gt) = run_both(&words, BugConfig::default());
        assert_eq!(dt, gt);
    }

    #[test]
    fn instret_ebreak_bug_skips_the_count() {
        // EBREAK traps to the (empty) handler region; compare INSTRET via
        // state, not trace, to keep the test local
        let words = [
            encode(Mnemonic::Ebreak, Operands::default()).unwrap(),
            isa::HALT_WORD,
        ];
        let image = image_of(&words);
        let manifest = dut_manifest();
        let bug = BugConfig::with("INSTRET_EBREAK").unwrap();
        let mut dut = dut_reset(&image, 0, bug, &manifest).unwrap();
        let _ = dut_run(&mut dut, 2000, 10, 4);
        assert_eq!(dut.instret, dut.commit_seq - 1); // EBREAK not counted
        let mut dut = dut_reset(&image, 0, BugConfig::default(), &manifest).unwrap();
        let _ = dut_run(&mut dut, 2000, 10, 4);
        assert_eq!(dut.instret, dut.commit_seq);
    }

    #[test]
    fn hang_detection_on_self_branch() {
        let words = [
            encode(Mnemonic::Beq, Operands::s(0, 0, 0)).unwrap(),
            isa::HALT_WORD,
        ];
        let image = image_of(&words);
        let manifest = dut_manifest();
        let mut dut = dut_reset(&image, 0, BugConfig::default(), &manifest).unwrap();
        let (_, _, status) = dut_run(&mut dut, 2000, 50, 4);
        assert_eq!(status, RunStatus::Budget);
    }

    #[test]
    fn stale_fetch_under_cache_incoherence() {
        // store a new word over an already-cached, not-yet-executed
        // instruction; the coherent DUT executes the new word, the buggy
        // one the stale word
        // the victim must sit in the shadow of the store: same cache line,
        // already fetched into the pipeline when the store retires
        let new_word = encode(Mnemonic::Addi, Operands::i(3, 0, 1)).unwrap();
        assert_eq!(new_word, 0x0010_0193);
        let victim = encode(Mnemonic::Addi, Operands::i(4, 0, 42)).unwrap();
        let words = [
            encode(Mnemonic::Addi, Operands::i(1, 0, 0x14)).unwrap(), // 0x00: x1 = victim addr
            encode(Mnemonic::Lui, Operands::u(2, 0x00100)).unwrap(),  // 0x04
            encode(Mnemonic::Addi, Operands::i(2, 2, 0x193)).unwrap(), // 0x08: x2 = new_word
            isa::NOP_WORD,                                             // 0x0C
            encode(Mnemonic::Sw, Operands::s(1, 2, 0)).unwrap(),      // 0x10: overwrite 0x14
            victim,                                                    // 0x14
            isa::HALT_WORD,                                            // 0x18
        ];
        let (dt, gt) = run_both(&words, BugConfig::default());
        assert_eq!(dt, gt);
        assert_eq!(dt.events[5].instr_word, new_word);

        let bug = BugConfig::with("CACHE_INCOHERENCE").unwrap();
        let (dt, gt) = run_both(&words, bug);
        assert_eq!(dt.events[5].instr_word, victim); // stale
        assert_eq!(gt.events[5].instr_word, new_word);
    }

    #[test]
    fn fence_i_restores_coherence_when_incoherent() {
        // same self-modification, but with a FENCE.I between the store
        // and the victim: even the incoherent DUT fetches fresh
        let new_word = encode(Mnemonic::Addi, Operands::i(3, 0, 1)).unwrap();
        let victim = encode(Mnemonic::Addi, Operands::i(4, 0, 42)).unwrap();
        let words = [
            encode(Mnemonic::Addi, Operands::i(1, 0, 0x18)).unwrap(), // 0x00: x1 = victim addr
            encode(Mnemonic::Lui, Operands::u(2, 0x00100)).unwrap(),  // 0x04
            encode(Mnemonic::Addi, Operands::i(2, 2, 0x193)).unwrap(), // 0x08
            isa::NOP_WORD,                                             // 0x0C
            encode(Mnemonic::Sw, Operands::s(1, 2, 0)).unwrap(),      // 0x10: overwrite 0x18
            encode(Mnemonic::FenceI, Operands::default()).unwrap(),   // 0x14
            victim,                                                    // 0x18
            isa::HALT_WORD,                                            // 0x1C
        ];
        let bug = BugConfig::with("CACHE_INCOHERENCE").unwrap();
        let (dt, gt) = run_both(&words, bug);
        assert_eq!(dt.events[6].instr_word, new_word);
        assert_eq!(dt, gt);
    }

    #[test]
    fn illegal_accept_executes_reserved_opcode_as_add() {
        let reserved = RESERVED_OPCODE | 1 << 7 | 2 << 15 | 3 << 20;
        let words = [
            encode(Mnemonic::Addi, Operands::i(2, 0, 5)).unwrap(),
            encode(Mnemonic::Addi, Operands::i(3, 0, 7)).unwrap(),
            reserved,
            isa::HALT_WORD,
        ];
        let bug = BugConfig::with("ILLEGAL_ACCEPT").unwrap();
        let (dt, gt) = run_both(&words, bug);
        assert_eq!(dt.events[2].gpr_writes, vec![(1, 12)]);
        assert_eq!(dt.events[2].exception, None);
        assert_eq!(gt.events[2].exception, Some(cause::ILLEGAL));
        let (dt2, gt2) = run_both(&words, BugConfig::default());
        assert_eq!(dt2.events[2].exception, Some(cause::ILLEGAL));
        assert_eq!(dt2.events[2], gt2.events[2]);
    }

    #[test]
    fn exc_type_bug_reports_bogus_cause() {
        let words = [
            encode(Mnemonic::Jal, Operands { rd: 0, rs1: 0, rs2: 0, imm: 0xF000 }).unwrap(),
            isa::HALT_WORD,
        ];
        let bug = BugConfig::with("EXC_TYPE").unwrap();
        let (dt, gt) = run_both(&words, bug);
        assert_eq!(dt.events[1].exception, Some(BOGUS_FETCH_CAUSE));
        assert_eq!(gt.events[1].exception, Some(cause::FETCH_ACCESS));
    }

    #[test]
    fn coverage_fsm_and_ctrlreg_fire() {
        let words = [
            encode(Mnemonic::FenceI, Operands::default()).unwrap(),
            isa::NOP_WORD,
            isa::HALT_WORD,
        ];
        let image = image_of(&words);
        let manifest = dut_manifest();
        let mut dut = dut_reset(&image, 0, BugConfig::default(), &manifest).unwrap();
        let (_, cov, _) = dut_run(&mut dut, 2000, 50, 8);
        let totals = cov.totals();
        let fsm = totals.iter().find(|t| t.metric == Metric::Fsm).unwrap();
        // IDLE, LOOKUP, REFILL, FLUSH states plus I→L, L→R, R→L, L→F, F→I
        assert!(fsm.hit >= 9, "fsm hit = {}", fsm.hit);
        let ctrl = totals.iter().find(|t| t.metric == Metric::CtrlReg).unwrap();
        assert!(ctrl.hit >= 2);
    }
}
