// SPDX-License-Identifier: Apache-2.0

//! Golden reference model: a clean architectural interpreter of MiniRV.
//!
//! No pipeline, no cache — one instruction per step, exactly as the ISA
//! manual specifies. The DUT keeps its own independent implementation of
//! the same semantics; this module is the trusted side of the comparison.

use crate::isa::{self, cause, csr, Mnemonic};
use crate::trace::{ArchTrace, CommitEvent, RunStatus};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum ResetError {
    #[error("memory image of {0} bytes exceeds the 64 KiB RAM")]
    ImageTooLarge(usize),
}

/// Architectural state: what the ISA manual says a MiniRV machine has.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArchState {
    pub pc: u32,
    pub gpr: [u32; 32],
    pub mem: Vec<u8>,
    /// STATUS bit0 is the privilege mode: 1 = machine, 0 = user.
    pub status: u32,
    pub epcr: u32,
    pub estatus: u32,
    pub eear: u32,
    pub flags: u32,
    pub instret: u64,
}

impl ArchState {
    pub fn machine_mode(&self) -> bool {
        self.status & 1 == 1
    }

    fn write_gpr(&mut self, index: u8, value: u32) {
        if index != 0 {
            self.gpr[index as usize] = value;
        }
    }

    fn read8(&self, addr: u32) -> u8 {
        self.mem[addr as usize % isa::MEM_SIZE]
    }

    fn read16(&self, addr: u32) -> u16 {
        u16::from(self.read8(addr)) | u16::from(self.read8(addr.wrapping_add(1))) << 8
    }

    pub fn read32(&self, addr: u32) -> u32 {
        u32::from(self.read16(addr)) | u32::from(self.read16(addr.wrapping_add(2))) << 16
    }

    fn write8(&mut self, addr: u32, value: u8) {
        let i = addr as usize % isa::MEM_SIZE;
        self.mem[i] = value;
    }

    fn write_mem(&mut self, addr: u32, size: u8, value: u32) {
        for i in 0..size {
            self.write8(addr.wrapping_add(i as u32), (value >> (8 * i)) as u8);
        }
    }
}

/// gprs zeroed, machine mode, instret 0, CSRs cleared.
pub fn grm_reset(image: &[u8], entry_pc: u32) -> Result<ArchState, ResetError> {
    if image.len() > isa::MEM_SIZE {
        return Err(ResetError::ImageTooLarge(image.len()));
    }
    let mut mem = vec![0u8; isa::MEM_SIZE];
    mem[..image.len()].copy_from_slice(image);
    Ok(ArchState {
        pc: entry_pc,
        gpr: [0; 32],
        mem,
        status: 1,
        epcr: 0,
        estatus: 0,
        eear: 0,
        flags: 0,
        instret: 0,
    })
}

/// Carry/overflow computation for ADD-family operations.
fn add_flags(a: u32, b: u32) -> (u32, bool, bool) {
    let (r, carry) = a.overflowing_add(b);
    let overflow = (a as i32).overflowing_add(b as i32).1;
    (r, carry, overflow)
}

/// SUB: carry is the unsigned borrow, overflow the signed overflow.
fn sub_flags(a: u32, b: u32) -> (u32, bool, bool) {
    let r = a.wrapping_sub(b);
    let borrow = a < b;
    let overflow = (a as i32).overflowing_sub(b as i32).1;
    (r, borrow, overflow)
}

/// MAC: rd + rs1*rs2 (low 32 bits). Overflow is judged against the exact
/// signed result of acc + rs1*rs2.
fn mac_result(acc: u32, a: u32, b: u32) -> (u32, bool) {
    let r = acc.wrapping_add(a.wrapping_mul(b));
    let ideal = acc as i32 as i64 + (a as i32 as i64) * (b as i32 as i64);
    let overflow = ideal != r as i32 as i64;
    (r, overflow)
}

enum CsrOutcome {
    Ok { read: u32, write: Option<u32> },
    Illegal,
}

fn csr_access(state: &ArchState, addr: u16, kind: Mnemonic, rs1val: u32, rs1: u8) -> CsrOutcome {
    let spec = isa::IsaSpec::new();
    let Some(rule) = spec.csr_rule(addr) else {
        return CsrOutcome::Illegal;
    };
    if rule.machine_only && !state.machine_mode() {
        return CsrOutcome::Illegal;
    }
    let writes = match kind {
        Mnemonic::Csrrw => true,
        Mnemonic::Csrrs | Mnemonic::Csrrc => rs1 != 0,
        _ => unreachable!(),
    };
    if writes && rule.read_only {
        return CsrOutcome::Illegal;
    }
    let read = match addr {
        csr::STATUS => state.status,
        csr::EPCR => state.epcr,
        csr::ESTATUS => state.estatus,
        csr::EEAR => state.eear,
        csr::FLAGS => state.flags,
        csr::INSTRET => state.instret as u32,
        _ => unreachable!(),
    };
    let write = if writes {
        Some(match kind {
            Mnemonic::Csrrw => rs1val,
            Mnemonic::Csrrs => read | rs1val,
            Mnemonic::Csrrc => read & !rs1val,
            _ => unreachable!(),
        })
    } else {
        None
    };
    CsrOutcome::Ok { read, write }
}

fn apply_csr_write(state: &mut ArchState, addr: u16, value: u32) {
    match addr {
        csr::STATUS => state.status = value,
        csr::EPCR => state.epcr = value,
        csr::ESTATUS => state.estatus = value,
        csr::EEAR => state.eear = value,
        csr::FLAGS => state.flags = value,
        _ => {}
    }
}

/// Trap: EPCR<-PC, ESTATUS<-STATUS, EEAR<-effective address for memory
/// faults else PC, mode<-machine, PC<-trap vector.
fn take_trap(state: &mut ArchState, event: &mut CommitEvent, trap_cause: u32, eear: u32) {
    event.gpr_writes.clear();
    event.csr_writes.clear();
    event.mem_writes.clear();
    event.exception = Some(trap_cause);
    let old_status = state.status;
    state.epcr = event.pc;
    state.estatus = old_status;
    state.eear = eear;
    state.status = old_status | 1;
    state.pc = isa::TRAP_VECTOR;
    event.csr_writes.push((csr::EPCR, event.pc));
    event.csr_writes.push((csr::ESTATUS, old_status));
    event.csr_writes.push((csr::EEAR, eear));
    event.csr_writes.push((csr::STATUS, state.status));
}

/// Execute exactly one instruction. Illegal words, faults, and traps all
/// retire as exception events; instret counts every retired event,
/// EBREAK included.
pub fn grm_step(state: &mut ArchState) -> CommitEvent {
    let pc = state.pc;
    let mut event = CommitEvent {
        seq: state.instret,
        pc,
        instr_word: 0,
        gpr_writes: Vec::new(),
        csr_writes: Vec::new(),
        mem_writes: Vec::new(),
        exception: None,
    };

    'exec: {
        if pc & 3 != 0 {
            take_trap(state, &mut event, cause::MISALIGNED_FETCH, pc);
            break 'exec;
        }
        if pc >= isa::NOFETCH_BASE {
            take_trap(state, &mut event, cause::FETCH_ACCESS, pc);
            break 'exec;
        }
        let word = state.read32(pc);
        event.instr_word = word;
        let Some(instr) = isa::decode(word) else {
            take_trap(state, &mut event, cause::ILLEGAL, pc);
            break 'exec;
        };

        use Mnemonic::*;
        let rs1v = state.gpr[instr.rs1 as usize];
        let rs2v = state.gpr[instr.rs2 as usize];
        let imm = instr.imm;
        let mut next_pc = pc.wrapping_add(4);

        match instr.mnemonic {
            Add | Addi | Sub => {
                let b = if instr.mnemonic == Addi { imm as u32 } else { rs2v };
                let (r, carry, overflow) = if instr.mnemonic == Sub {
                    sub_flags(rs1v, b)
                } else {
                    add_flags(rs1v, b)
                };
                let flags = (state.flags & !(isa::FLAG_CARRY | isa::FLAG_OVERFLOW))
                    | (carry as u32) * isa::FLAG_CARRY
                    | (overflow as u32) * isa::FLAG_OVERFLOW;
                state.flags = flags;
                state.write_gpr(instr.rd, r);
                if instr.rd != 0 {
                    event.gpr_writes.push((instr.rd, r));
                }
                event.csr_writes.push((csr::FLAGS, flags));
            }
            Mac => {
                let acc = state.gpr[instr.rd as usize];
                let (r, overflow) = mac_result(acc, rs1v, rs2v);
                let flags =
                    (state.flags & !isa::FLAG_OVERFLOW) | (overflow as u32) * isa::FLAG_OVERFLOW;
                state.flags = flags;
                state.write_gpr(instr.rd, r);
                if instr.rd != 0 {
                    event.gpr_writes.push((instr.rd, r));
                }
                event.csr_writes.push((csr::FLAGS, flags));
            }
            Slt | Slti => {
                let b = if instr.mnemonic == Slti { imm } else { rs2v as i32 };
                let r = ((rs1v as i32) < b) as u32;
                state.write_gpr(instr.rd, r);
                if instr.rd != 0 {
                    event.gpr_writes.push((instr.rd, r));
                }
            }
            Sltu => {
                let r = (rs1v < rs2v) as u32;
                state.write_gpr(instr.rd, r);
                if instr.rd != 0 {
                    event.gpr_writes.push((instr.rd, r));
                }
            }
            And | Or | Xor | Andi | Ori | Xori | Sll | Srl | Sra | Slli | Srli | Srai => {
                let b = match instr.mnemonic {
                    And | Or | Xor | Sll | Srl | Sra => rs2v,
                    _ => imm as u32,
                };
                let r = match instr.mnemonic {
                    And | Andi => rs1v & b,
                    Or | Ori => rs1v | b,
                    Xor | Xori => rs1v ^ b,
                    Sll | Slli => rs1v << (b & 31),
                    Srl | Srli => rs1v >> (b & 31),
                    Sra | Srai => ((rs1v as i32) >> (b & 31)) as u32,
                    _ => unreachable!(),
                };
                state.write_gpr(instr.rd, r);
                if instr.rd != 0 {
                    event.gpr_writes.push((instr.rd, r));
                }
            }
            Lui => {
                let r = (imm as u32) << 12;
                state.write_gpr(instr.rd, r);
                if instr.rd != 0 {
                    event.gpr_writes.push((instr.rd, r));
                }
            }
            Auipc => {
                let r = pc.wrapping_add((imm as u32) << 12);
                state.write_gpr(instr.rd, r);
                if instr.rd != 0 {
                    event.gpr_writes.push((instr.rd, r));
                }
            }
            Lw | Lh | Lhu | Lb | Lbu => {
                let addr = rs1v.wrapping_add(imm as u32);
                let align = match instr.mnemonic {
                    Lw => 3,
                    Lh | Lhu => 1,
                    _ => 0,
                };
                if addr & align != 0 {
                    take_trap(state, &mut event, cause::MISALIGNED_LOAD, addr);
                    break 'exec;
                }
                let r = match instr.mnemonic {
                    Lw => state.read32(addr),
                    Lh => state.read16(addr) as i16 as i32 as u32,
                    Lhu => state.read16(addr) as u32,
                    Lb => state.read8(addr) as i8 as i32 as u32,
                    Lbu => state.read8(addr) as u32,
                    _ => unreachable!(),
                };
                state.write_gpr(instr.rd, r);
                if instr.rd != 0 {
                    event.gpr_writes.push((instr.rd, r));
                }
            }
            Sw | Sh | Sb => {
                let addr = rs1v.wrapping_add(imm as u32);
                let (align, size) = match instr.mnemonic {
                    Sw => (3, 4),
                    Sh => (1, 2),
                    _ => (0, 1),
                };
                if addr & align != 0 {
                    take_trap(state, &mut event, cause::MISALIGNED_STORE, addr);
                    break 'exec;
                }
                let value = rs2v & if size == 4 { !0 } else { (1 << (8 * size)) - 1 };
                state.write_mem(addr, size, value);
                event.mem_writes.push((addr, size, value));
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
                if taken {
                    let target = pc.wrapping_add(imm as u32);
                    if target & 3 != 0 {
                        take_trap(state, &mut event, cause::MISALIGNED_FETCH, pc);
                        break 'exec;
                    }
                    next_pc = target;
                }
            }
            Jal => {
                let target = pc.wrapping_add(imm as u32);
                if target & 3 != 0 {
                    take_trap(state, &mut event, cause::MISALIGNED_FETCH, pc);
                    break 'exec;
                }
                state.write_gpr(instr.rd, pc.wrapping_add(4));
                if instr.rd != 0 {
                    event.gpr_writes.push((instr.rd, pc.wrapping_add(4)));
                }
                next_pc = target;
            }
            Jalr => {
                let target = rs1v.wrapping_add(imm as u32) & !1;
                if target & 3 != 0 {
                    take_trap(state, &mut event, cause::MISALIGNED_FETCH, pc);
                    break 'exec;
                }
                state.write_gpr(instr.rd, pc.wrapping_add(4));
                if instr.rd != 0 {
                    event.gpr_writes.push((instr.rd, pc.wrapping_add(4)));
                }
                next_pc = target;
            }
            FenceI => {
                // no cache: architecturally a no-op
            }
            Ecall => {
                let c = if state.machine_mode() {
                    cause::ECALL_MACHINE
                } else {
                    cause::ECALL_USER
                };
                take_trap(state, &mut event, c, pc);
                break 'exec;
            }
            Ebreak => {
                take_trap(state, &mut event, cause::BREAKPOINT, pc);
                break 'exec;
            }
            Mret => {
                if !state.machine_mode() {
                    take_trap(state, &mut event, cause::ILLEGAL, pc);
                    break 'exec;
                }
                let target = state.epcr;
                if target & 3 != 0 {
                    take_trap(state, &mut event, cause::MISALIGNED_FETCH, pc);
                    break 'exec;
                }
                state.status = state.estatus;
                event.csr_writes.push((csr::STATUS, state.status));
                next_pc = target;
            }
            Csrrw | Csrrs | Csrrc => {
                match csr_access(state, imm as u16, instr.mnemonic, rs1v, instr.rs1) {
                    CsrOutcome::Illegal => {
                        take_trap(state, &mut event, cause::ILLEGAL, pc);
                        break 'exec;
                    }
                    CsrOutcome::Ok { read, write } => {
                        state.write_gpr(instr.rd, read);
                        if instr.rd != 0 {
                            event.gpr_writes.push((instr.rd, read));
                        }
                        if let Some(v) = write {
                            apply_csr_write(state, imm as u16, v);
                            event.csr_writes.push((imm as u16, v));
                        }
                    }
                }
            }
        }
        state.pc = next_pc;
    }

    state.instret += 1;
    event
}

fn in_handler_region(pc: u32) -> bool {
    (isa::TRAP_VECTOR..isa::CI_BASE).contains(&pc)
}

/// Step until `halt_pc` is fetched, `max_instructions` retire, or a trap
/// occurs inside the handler region (double fault).
pub fn grm_run(state: &mut ArchState, max_instructions: usize, halt_pc: u32) -> ArchTrace {
    assert!(max_instructions >= 1);
    let mut events = Vec::new();
    let status = loop {
        if state.pc == halt_pc {
            break RunStatus::Halted;
        }
        if events.len() >= max_instructions {
            break RunStatus::Budget;
        }
        let faulting_in_handler = in_handler_region(state.pc);
        let event = grm_step(state);
        let double_fault = event.exception.is_some() && faulting_in_handler;
        events.push(event);
        if double_fault {
            break RunStatus::DoubleFault;
        }
    };
    ArchTrace { events, status }
}
