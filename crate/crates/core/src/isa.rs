// SPDX-License-Identifier: Apache-2.0

//! MiniRV-32 instruction set definition.
//!
//! MiniRV-32 reuses the RV32I encodings for every shared opcode and adds a
//! custom MAC instruction (opcode 0x0B) plus an OpenRISC-style FLAGS CSR.
//! The full field layouts, CSR table, and trap table live in
//! `docs/isa-manual.md`; encodings here are bit-exact against that manual.

use serde::{Deserialize, Serialize};

/// Memory is a flat 64 KiB little-endian RAM.
pub const MEM_SIZE: usize = 64 * 1024;
/// Trap handler entry point.
pub const TRAP_VECTOR: u32 = 0x0100;
/// Handler scratch slot (the handler spills one GPR here).
pub const HANDLER_SAVE_SLOT: u32 = 0x00F0;
/// Configuration-instruction region base.
pub const CI_BASE: u32 = 0x0200;
/// Test-instruction region base.
pub const TI_BASE: u32 = 0x0400;
/// Fetching at or above this address is an instruction access fault.
pub const NOFETCH_BASE: u32 = 0xF000;
/// Canonical NOP: ADDI x0, x0, 0.
pub const NOP_WORD: u32 = 0x0000_0013;
/// Halt sentinel: JAL x0, 0 (self-loop).
pub const HALT_WORD: u32 = 0x0000_006F;

/// CSR addresses.
pub mod csr {
    pub const STATUS: u16 = 0x300;
    pub const EPCR: u16 = 0x341;
    pub const ESTATUS: u16 = 0x342;
    pub const EEAR: u16 = 0x343;
    pub const FLAGS: u16 = 0x800;
    pub const INSTRET: u16 = 0xC02;
}

/// FLAGS CSR bit positions.
pub const FLAG_CARRY: u32 = 1 << 0;
pub const FLAG_OVERFLOW: u32 = 1 << 1;

/// Trap cause codes.
pub mod cause {
    pub const MISALIGNED_FETCH: u32 = 0;
    pub const FETCH_ACCESS: u32 = 1;
    pub const ILLEGAL: u32 = 2;
    pub const BREAKPOINT: u32 = 3;
    pub const MISALIGNED_LOAD: u32 = 4;
    pub const MISALIGNED_STORE: u32 = 6;
    pub const ECALL_USER: u32 = 8;
    pub const ECALL_MACHINE: u32 = 11;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Format {
    R,
    I,
    S,
    B,
    U,
    J,
    Sys,
}

macro_rules! mnemonics {
    ($($name:ident => $text:literal),+ $(,)?) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        pub enum Mnemonic { $($name),+ }

        impl Mnemonic {
            pub const ALL: &'static [Mnemonic] = &[$(Mnemonic::$name),+];

            pub fn name(self) -> &'static str {
                match self { $(Mnemonic::$name => $text),+ }
            }

            pub fn from_name(s: &str) -> Option<Mnemonic> {
                match s { $($text => Some(Mnemonic::$name),)+ _ => None }
            }
        }
    };
}

mnemonics! {
    Add => "ADD",
    Sub => "SUB",
    Addi => "ADDI",
    Slt => "SLT",
    Sltu => "SLTU",
    Slti => "SLTI",
    And => "AND",
    Or => "OR",
    Xor => "XOR",
    Andi => "ANDI",
    Ori => "ORI",
    Xori => "XORI",
    Sll => "SLL",
    Srl => "SRL",
    Sra => "SRA",
    Slli => "SLLI",
    Srli => "SRLI",
    Srai => "SRAI",
    Lui => "LUI",
    Auipc => "AUIPC",
    Lw => "LW",
    Lh => "LH",
    Lhu => "LHU",
    Lb => "LB",
    Lbu => "LBU",
    Sw => "SW",
    Sh => "SH",
    Sb => "SB",
    Beq => "BEQ",
    Bne => "BNE",
    Blt => "BLT",
    Bge => "BGE",
    Bltu => "BLTU",
    Bgeu => "BGEU",
    Jal => "JAL",
    Jalr => "JALR",
    FenceI => "FENCE.I",
    Ecall => "ECALL",
    Ebreak => "EBREAK",
    Mret => "MRET",
    Csrrw => "CSRRW",
    Csrrs => "CSRRS",
    Csrrc => "CSRRC",
    Mac => "MAC",
}

impl Mnemonic {
    /// Stable index into [`Mnemonic::ALL`] (optimizer tie-break order).
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn format(self) -> Format {
        use Mnemonic::*;
        match self {
            Add | Sub | Slt | Sltu | And | Or | Xor | Sll | Srl | Sra | Mac => Format::R,
            Addi | Slti | Andi | Ori | Xori | Slli | Srli | Srai | Lw | Lh | Lhu | Lb | Lbu
            | Jalr | FenceI | Csrrw | Csrrs | Csrrc => Format::I,
            Sw | Sh | Sb => Format::S,
            Beq | Bne | Blt | Bge | Bltu | Bgeu => Format::B,
            Lui | Auipc => Format::U,
            Jal => Format::J,
            Ecall | Ebreak | Mret => Format::Sys,
        }
    }

    /// Shift-immediate instructions carry funct7 in the opcode bits.
    fn is_shift_imm(self) -> bool {
        matches!(self, Mnemonic::Slli | Mnemonic::Srli | Mnemonic::Srai)
    }

    fn opcode(self) -> u32 {
        use Mnemonic::*;
        match self {
            Add | Sub | Slt | Sltu | And | Or | Xor | Sll | Srl | Sra => 0x33,
            Mac => 0x0B,
            Addi | Slti | Andi | Ori | Xori | Slli | Srli | Srai => 0x13,
            Lw | Lh | Lhu | Lb | Lbu => 0x03,
            Sw | Sh | Sb => 0x23,
            Beq | Bne | Blt | Bge | Bltu | Bgeu => 0x63,
            Jal => 0x6F,
            Jalr => 0x67,
            Lui => 0x37,
            Auipc => 0x17,
            FenceI => 0x0F,
            Ecall | Ebreak | Mret | Csrrw | Csrrs | Csrrc => 0x73,
        }
    }

    fn funct3(self) -> u32 {
        use Mnemonic::*;
        match self {
            Add | Sub | Addi | Lb | Sb | Beq | Jalr | Ecall | Ebreak | Mret | Mac => 0,
            Sll | Slli | Lh | Sh | Bne | FenceI | Csrrw => 1,
            Slt | Slti | Lw | Sw | Csrrs => 2,
            Sltu | Csrrc => 3,
            Xor | Xori | Lbu | Blt => 4,
            Srl | Sra | Srli | Srai | Lhu | Bge => 5,
            Or | Ori | Bltu => 6,
            And | Andi | Bgeu => 7,
            Lui | Auipc | Jal => 0,
        }
    }

    fn funct7(self) -> u32 {
        use Mnemonic::*;
        match self {
            Sub | Sra | Srai => 0x20,
            _ => 0,
        }
    }
}

/// Operand fields for [`encode`]. Unused fields for a format must be zero
/// free to ignore; immediates follow the format's natural range.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Operands {
    pub rd: u8,
    pub rs1: u8,
    pub rs2: u8,
    /// I/S/B/J: sign-extended immediate. U: raw 20-bit value (not shifted).
    /// Shifts: shamt. CSR ops: CSR address.
    pub imm: i32,
}

impl Operands {
    pub fn r(rd: u8, rs1: u8, rs2: u8) -> Self {
        Operands { rd, rs1, rs2, imm: 0 }
    }

    pub fn i(rd: u8, rs1: u8, imm: i32) -> Self {
        Operands { rd, rs1, rs2: 0, imm }
    }

    pub fn s(rs1: u8, rs2: u8, imm: i32) -> Self {
        Operands { rd: 0, rs1, rs2, imm }
    }

    pub fn u(rd: u8, imm: i32) -> Self {
        Operands { rd, rs1: 0, rs2: 0, imm }
    }
}

/// A decoded legal instruction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Instruction {
    pub word: u32,
    pub mnemonic: Mnemonic,
    pub format: Format,
    pub rd: u8,
    pub rs1: u8,
    pub rs2: u8,
    /// Semantics follow [`Operands::imm`].
    pub imm: i32,
}

impl Instruction {
    pub fn operands(&self) -> Operands {
        Operands { rd: self.rd, rs1: self.rs1, rs2: self.rs2, imm: self.imm }
    }

    pub fn opcode_bits(&self) -> u32 {
        !self.data_bits()
    }

    pub fn data_bits(&self) -> u32 {
        format_data_mask(self.mnemonic)
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum EncodeError {
    #[error("register index {0} out of range")]
    RegisterRange(u8),
    #[error("immediate {imm} does not fit {mnemonic:?}")]
    ImmediateRange { mnemonic: Mnemonic, imm: i32 },
}

const FIELDS_RD: u32 = 0x0000_0F80;
const FIELDS_RS1: u32 = 0x000F_8000;
const FIELDS_RS2: u32 = 0x01F0_0000;
const FIELDS_IMM_I: u32 = 0xFFF0_0000;
const FIELDS_IMM_SB: u32 = 0xFE00_0F80;
const FIELDS_IMM_UJ: u32 = 0xFFFF_F000;

/// Data-bit mask (rd/rs1/rs2/imm fields) by mnemonic.
fn format_data_mask(m: Mnemonic) -> u32 {
    match m.format() {
        Format::R => FIELDS_RD | FIELDS_RS1 | FIELDS_RS2,
        Format::I => {
            if m.is_shift_imm() {
                // funct7 is legality-determining, shamt is data
                FIELDS_RD | FIELDS_RS1 | FIELDS_RS2
            } else {
                FIELDS_RD | FIELDS_RS1 | FIELDS_IMM_I
            }
        }
        Format::S | Format::B => FIELDS_RS1 | FIELDS_RS2 | FIELDS_IMM_SB,
        Format::U | Format::J => FIELDS_RD | FIELDS_IMM_UJ,
        Format::Sys => 0,
    }
}

/// Data-bit mask for an arbitrary word: per-format for legal words, the
/// full word for illegal ones (all bits treated as data).
pub fn data_mask(word: u32) -> u32 {
    match decode(word) {
        Some(instr) => instr.data_bits(),
        None => 0xFFFF_FFFF,
    }
}

pub fn opcode_mask(word: u32) -> u32 {
    !data_mask(word)
}

fn check_reg(r: u8) -> Result<(), EncodeError> {
    if r < 32 {
        Ok(())
    } else {
        Err(EncodeError::RegisterRange(r))
    }
}

/// Encode a legal MiniRV instruction. RV32I-shared opcodes are bit-exact
/// with the RV32I encodings.
pub fn encode(m: Mnemonic, ops: Operands) -> Result<u32, EncodeError> {
    use Mnemonic::*;
    check_reg(ops.rd)?;
    check_reg(ops.rs1)?;
    check_reg(ops.rs2)?;
    let rd = ops.rd as u32;
    let rs1 = ops.rs1 as u32;
    let rs2 = ops.rs2 as u32;
    let imm = ops.imm;
    let range_err = || EncodeError::ImmediateRange { mnemonic: m, imm };
    let opc = m.opcode();
    let f3 = m.funct3() << 12;
    let f7 = m.funct7() << 25;
    let word = match m.format() {
        Format::R => opc | rd << 7 | f3 | rs1 << 15 | rs2 << 20 | f7,
        Format::I => {
            let imm_bits = if m.is_shift_imm() {
                if !(0..=31).contains(&imm) {
                    return Err(range_err());
                }
                (imm as u32) << 20 | f7
            } else if matches!(m, Csrrw | Csrrs | Csrrc) {
                if !(0..=0xFFF).contains(&imm) {
                    return Err(range_err());
                }
                (imm as u32) << 20
            } else {
                if !(-2048..=2047).contains(&imm) {
                    return Err(range_err());
                }
                ((imm as u32) & 0xFFF) << 20
            };
            opc | rd << 7 | f3 | rs1 << 15 | imm_bits
        }
        Format::S => {
            if !(-2048..=2047).contains(&imm) {
                return Err(range_err());
            }
            let u = imm as u32;
            opc | (u & 0x1F) << 7 | f3 | rs1 << 15 | rs2 << 20 | (u >> 5 & 0x7F) << 25
        }
        Format::B => {
            if !(-4096..=4094).contains(&imm) || imm & 1 != 0 {
                return Err(range_err());
            }
            let u = imm as u32;
            opc | (u >> 11 & 1) << 7
                | (u >> 1 & 0xF) << 8
                | f3
                | rs1 << 15
                | rs2 << 20
                | (u >> 5 & 0x3F) << 25
                | (u >> 12 & 1) << 31
        }
        Format::U => {
            if !(0..=0xF_FFFF).contains(&imm) {
                return Err(range_err());
            }
            opc | rd << 7 | (imm as u32) << 12
        }
        Format::J => {
            if !(-(1 << 20)..=(1 << 20) - 2).contains(&imm) || imm & 1 != 0 {
                return Err(range_err());
            }
            let u = imm as u32;
            opc | rd << 7
                | (u >> 12 & 0xFF) << 12
                | (u >> 11 & 1) << 20
                | (u >> 1 & 0x3FF) << 21
                | (u >> 20 & 1) << 31
        }
        Format::Sys => {
            let funct12 = match m {
                Ecall => 0x000,
                Ebreak => 0x001,
                Mret => 0x302,
                _ => unreachable!(),
            };
            opc | funct12 << 20
        }
    };
    Ok(word)
}

fn sext(value: u32, bits: u32) -> i32 {
    let shift = 32 - bits;
    ((value << shift) as i32) >> shift
}

fn imm_i(word: u32) -> i32 {
    sext(word >> 20, 12)
}

fn imm_s(word: u32) -> i32 {
    sext((word >> 25 & 0x7F) << 5 | (word >> 7 & 0x1F), 12)
}

fn imm_b(word: u32) -> i32 {
    sext(
        (word >> 31 & 1) << 12 | (word >> 7 & 1) << 11 | (word >> 25 & 0x3F) << 5
            | (word >> 8 & 0xF) << 1,
        13,
    )
}

fn imm_j(word: u32) -> i32 {
    sext(
        (word >> 31 & 1) << 20 | (word >> 12 & 0xFF) << 12 | (word >> 20 & 1) << 11
            | (word >> 21 & 0x3FF) << 1,
        21,
    )
}

/// Decode any 32-bit word. `None` means the word is not a legal MiniRV
/// encoding; this is a value, not an error — decode is total.
pub fn decode(word: u32) -> Option<Instruction> {
    use Mnemonic::*;
    let opc = word & 0x7F;
    let rd = (word >> 7 & 0x1F) as u8;
    let f3 = word >> 12 & 0x7;
    let rs1 = (word >> 15 & 0x1F) as u8;
    let rs2 = (word >> 20 & 0x1F) as u8;
    let f7 = word >> 25 & 0x7F;

    let (mnemonic, imm) = match opc {
        0x33 => {
            let m = match (f7, f3) {
                (0x00, 0) => Add,
                (0x20, 0) => Sub,
                (0x00, 1) => Sll,
                (0x00, 2) => Slt,
                (0x00, 3) => Sltu,
                (0x00, 4) => Xor,
                (0x00, 5) => Srl,
                (0x20, 5) => Sra,
                (0x00, 6) => Or,
                (0x00, 7) => And,
                _ => return None,
            };
            (m, 0)
        }
        0x0B => {
            if f3 != 0 || f7 != 0 {
                return None;
            }
            (Mac, 0)
        }
        0x13 => match f3 {
            0 => (Addi, imm_i(word)),
            1 if f7 == 0x00 => (Slli, rs2 as i32),
            2 => (Slti, imm_i(word)),
            4 => (Xori, imm_i(word)),
            5 if f7 == 0x00 => (Srli, rs2 as i32),
            5 if f7 == 0x20 => (Srai, rs2 as i32),
            6 => (Ori, imm_i(word)),
            7 => (Andi, imm_i(word)),
            _ => return None,
        },
        0x03 => {
            let m = match f3 {
                0 => Lb,
                1 => Lh,
                2 => Lw,
                4 => Lbu,
                5 => Lhu,
                _ => return None,
            };
            (m, imm_i(word))
        }
        0x23 => {
            let m = match f3 {
                0 => Sb,
                1 => Sh,
                2 => Sw,
                _ => return None,
            };
            (m, imm_s(word))
        }
        0x63 => {
            let m = match f3 {
                0 => Beq,
                1 => Bne,
                4 => Blt,
                5 => Bge,
                6 => Bltu,
                7 => Bgeu,
                _ => return None,
            };
            (m, imm_b(word))
        }
        0x37 => (Lui, (word >> 12) as i32),
        0x17 => (Auipc, (word >> 12) as i32),
        0x6F => (Jal, imm_j(word)),
        0x67 => {
            if f3 != 0 {
                return None;
            }
            (Jalr, imm_i(word))
        }
        // FENCE.I: legality depends only on opcode+funct3; imm/rs1/rd are
        // ignored fields but preserved as data bits.
        0x0F => {
            if f3 != 1 {
                return None;
            }
            (FenceI, imm_i(word))
        }
        0x73 => match f3 {
            0 => match word {
                0x0000_0073 => (Ecall, 0),
                0x0010_0073 => (Ebreak, 0),
                0x3020_0073 => (Mret, 0),
                _ => return None,
            },
            1 => (Csrrw, (word >> 20) as i32),
            2 => (Csrrs, (word >> 20) as i32),
            3 => (Csrrc, (word >> 20) as i32),
            _ => return None,
        },
        _ => return None,
    };

    let format = mnemonic.format();
    let (rd, rs1, rs2) = match format {
        Format::R => (rd, rs1, rs2),
        Format::I => (rd, rs1, 0),
        Format::S | Format::B => (0, rs1, rs2),
        Format::U | Format::J => (rd, 0, 0),
        Format::Sys => (0, 0, 0),
    };
    Some(Instruction { word, mnemonic, format, rd, rs1, rs2, imm })
}

/// Access rule for one CSR.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CsrRule {
    pub addr: u16,
    pub machine_only: bool,
    pub read_only: bool,
}

/// The MiniRV-32 ISA spec: instruction universe, safe subset, CSR table.
#[derive(Debug, Clone)]
pub struct IsaSpec {
    pub legal_ops: Vec<Mnemonic>,
    pub safe_ops: Vec<Mnemonic>,
    pub csr_map: Vec<CsrRule>,
    pub trap_vector: u32,
    pub nop_word: u32,
}

impl Default for IsaSpec {
    fn default() -> Self {
        IsaSpec::new()
    }
}

impl IsaSpec {
    pub fn new() -> Self {
        use Mnemonic::*;
        // Safe ops: no branch, jump, memory, or system instruction.
        let safe_ops = vec![
            Add, Sub, Addi, Slt, Sltu, Slti, And, Or, Xor, Andi, Ori, Xori, Sll, Srl, Sra,
            Slli, Srli, Srai, Lui, Auipc, Mac,
        ];
        let csr_map = vec![
            CsrRule { addr: csr::STATUS, machine_only: true, read_only: false },
            CsrRule { addr: csr::EPCR, machine_only: true, read_only: false },
            CsrRule { addr: csr::ESTATUS, machine_only: true, read_only: false },
            CsrRule { addr: csr::EEAR, machine_only: true, read_only: false },
            CsrRule { addr: csr::FLAGS, machine_only: false, read_only: false },
            CsrRule { addr: csr::INSTRET, machine_only: false, read_only: true },
        ];
        IsaSpec {
            legal_ops: Mnemonic::ALL.to_vec(),
            safe_ops,
            csr_map,
            trap_vector: TRAP_VECTOR,
            nop_word: NOP_WORD,
        }
    }

    pub fn csr_rule(&self, addr: u16) -> Option<&CsrRule> {
        self.csr_map.iter().find(|r| r.addr == addr)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Cross-checked byte-for-byte against clang's RISC-V integrated
    // assembler (riscv32, rv32i) for every RV32I-shared encoding.
    pub(crate) const ASSEMBLER_ORACLE: &[(u32, Mnemonic, Operands)] = &[
        (0x00000013, Mnemonic::Addi, Operands { rd: 0, rs1: 0, rs2: 0, imm: 0 }),
        (0x003100B3, Mnemonic::Add, Operands { rd: 1, rs1: 2, rs2: 3, imm: 0 }),
        (0x40628233, Mnemonic::Sub, Operands { rd: 4, rs1: 5, rs2: 6, imm: 0 }),
        (0x009423B3, Mnemonic::Slt, Operands { rd: 7, rs1: 8, rs2: 9, imm: 0 }),
        (0x00C5B533, Mnemonic::Sltu, Operands { rd: 10, rs1: 11, rs2: 12, imm: 0 }),
        (0x00F776B3, Mnemonic::And, Operands { rd: 13, rs1: 14, rs2: 15, imm: 0 }),
        (0x0128E833, Mnemonic::Or, Operands { rd: 16, rs1: 17, rs2: 18, imm: 0 }),
        (0x015A49B3, Mnemonic::Xor, Operands { rd: 19, rs1: 20, rs2: 21, imm: 0 }),
        (0x018B9B33, Mnemonic::Sll, Operands { rd: 22, rs1: 23, rs2: 24, imm: 0 }),
        (0x41BD5CB3, Mnemonic::Sra, Operands { rd: 25, rs1: 26, rs2: 27, imm: 0 }),
        (0xFEF10093, Mnemonic::Addi, Operands { rd: 1, rs1: 2, rs2: 0, imm: -17 }),
        (0x06422193, Mnemonic::Slti, Operands { rd: 3, rs1: 4, rs2: 0, imm: 100 }),
        (0x0FF37293, Mnemonic::Andi, Operands { rd: 5, rs1: 6, rs2: 0, imm: 0xFF }),
        (0x00D41393, Mnemonic::Slli, Operands { rd: 7, rs1: 8, rs2: 0, imm: 13 }),
        (0x41F55493, Mnemonic::Srai, Operands { rd: 9, rs1: 10, rs2: 0, imm: 31 }),
        (0x000002B7, Mnemonic::Lui, Operands { rd: 5, rs1: 0, rs2: 0, imm: 0 }),
        (0xFFFFF5B7, Mnemonic::Lui, Operands { rd: 11, rs1: 0, rs2: 0, imm: 0xFFFFF }),
        (0x12345617, Mnemonic::Auipc, Operands { rd: 12, rs1: 0, rs2: 0, imm: 0x12345 }),
        (0x00872683, Mnemonic::Lw, Operands { rd: 13, rs1: 14, rs2: 0, imm: 8 }),
        (0xFFF80783, Mnemonic::Lb, Operands { rd: 15, rs1: 16, rs2: 0, imm: -1 }),
        (0x7FF95883, Mnemonic::Lhu, Operands { rd: 17, rs1: 18, rs2: 0, imm: 2047 }),
        (0x013A2623, Mnemonic::Sw, Operands { rd: 0, rs1: 20, rs2: 19, imm: 12 }),
        (0x815B0023, Mnemonic::Sb, Operands { rd: 0, rs1: 22, rs2: 21, imm: -2048 }),
        (0x00208063, Mnemonic::Beq, Operands { rd: 0, rs1: 1, rs2: 2, imm: 0 }),
        (0x00419263, Mnemonic::Bne, Operands { rd: 0, rs1: 3, rs2: 4, imm: 4 }),
        (0xFE62CEE3, Mnemonic::Blt, Operands { rd: 0, rs1: 5, rs2: 6, imm: -4 }),
        (0x0083F463, Mnemonic::Bgeu, Operands { rd: 0, rs1: 7, rs2: 8, imm: 8 }),
        (0x004000EF, Mnemonic::Jal, Operands { rd: 1, rs1: 0, rs2: 0, imm: 4 }),
        (0x0000006F, Mnemonic::Jal, Operands { rd: 0, rs1: 0, rs2: 0, imm: 0 }),
        (0x00418167, Mnemonic::Jalr, Operands { rd: 2, rs1: 3, rs2: 0, imm: 4 }),
        (0x800110F3, Mnemonic::Csrrw, Operands { rd: 1, rs1: 2, rs2: 0, imm: 0x800 }),
        (0x341021F3, Mnemonic::Csrrs, Operands { rd: 3, rs1: 0, rs2: 0, imm: 0x341 }),
        (0x3002B073, Mnemonic::Csrrc, Operands { rd: 0, rs1: 5, rs2: 0, imm: 0x300 }),
        (0x00000073, Mnemonic::Ecall, Operands { rd: 0, rs1: 0, rs2: 0, imm: 0 }),
        (0x00100073, Mnemonic::Ebreak, Operands { rd: 0, rs1: 0, rs2: 0, imm: 0 }),
        (0x30200073, Mnemonic::Mret, Operands { rd: 0, rs1: 0, rs2: 0, imm: 0 }),
        (0x0000100F, Mnemonic::FenceI, Operands { rd: 0, rs1: 0, rs2: 0, imm: 0 }),
    ];

    #[test]
    fn encode_matches_assembler_oracle() {
        for &(word, m, ops) in ASSEMBLER_ORACLE {
            assert_eq!(encode(m, ops), Ok(word), "{:?} {:?}", m, ops);
        }
    }

    #[test]
    fn decode_matches_assembler_oracle() {
        for &(word, m, ops) in ASSEMBLER_ORACLE {
            let instr = decode(word).unwrap_or_else(|| panic!("{m:?} decoded illegal"));
            assert_eq!(instr.mnemonic, m);
            assert_eq!(instr.operands(), ops, "{:?}", m);
        }
    }

    #[test]
    fn all_zero_word_is_illegal() {
        assert_eq!(decode(0x0000_0000), None);
    }

    #[test]
    fn fence_i_ignores_data_fields() {
        // legality must not depend on imm/rs1/rd
        let w = encode(Mnemonic::FenceI, Operands::i(3, 7, 0x5)).unwrap();
        let instr = decode(w).unwrap();
        assert_eq!(instr.mnemonic, Mnemonic::FenceI);
        assert_eq!(instr.imm, 0x5);
        assert_eq!(instr.rd, 3);
        assert_eq!(instr.rs1, 7);
        assert_ne!(instr.data_bits() & 0xFFF0_0000, 0);
    }

    #[test]
    fn unknown_mnemonic_fields_overflow() {
        assert!(encode(Mnemonic::Addi, Operands::i(32, 0, 0)).is_err());
        assert!(encode(Mnemonic::Addi, Operands::i(0, 0, 2048)).is_err());
        assert!(encode(Mnemonic::Slli, Operands::i(0, 0, 32)).is_err());
        assert!(encode(Mnemonic::Beq, Operands::s(0, 0, 3)).is_err());
        assert!(encode(Mnemonic::Lui, Operands::u(0, 1 << 20)).is_err());
    }

    #[test]
    fn data_mask_by_format() {
        let r = encode(Mnemonic::Add, Operands::r(1, 2, 3)).unwrap();
        assert_eq!(data_mask(r), 0x01FF_8F80);
        let j = encode(Mnemonic::Jal, Operands::u(1, 0)).unwrap();
        assert_eq!(data_mask(j), 0xFFFF_FF80);
        assert_eq!(data_mask(0x0000_0000), 0xFFFF_FFFF);
        // system words have no data bits
        assert_eq!(data_mask(0x0000_0073), 0x0000_0000);
    }

    #[test]
    fn mask_partition() {
        for &(word, _, _) in ASSEMBLER_ORACLE {
            assert_eq!(data_mask(word) ^ opcode_mask(word), 0xFFFF_FFFF);
            assert_eq!(data_mask(word) & opcode_mask(word), 0);
        }
    }

    #[test]
    fn safe_ops_subset_excludes_control_memory_system() {
        let spec = IsaSpec::new();
        for &m in &spec.safe_ops {
            assert!(spec.legal_ops.contains(&m));
            assert!(!matches!(
                m.format(),
                Format::B | Format::J | Format::S | Format::Sys
            ));
            assert!(!matches!(
                m,
                Mnemonic::Lw
                    | Mnemonic::Lh
                    | Mnemonic::Lhu
                    | Mnemonic::Lb
                    | Mnemonic::Lbu
                    | Mnemonic::Jalr
                    | Mnemonic::FenceI
                    | Mnemonic::Csrrw
                    | Mnemonic::Csrrs
                    | Mnemonic::Csrrc
            ));
        }
    }

    #[test]
    fn csr_map_unique_addresses() {
        let spec = IsaSpec::new();
        for (i, a) in spec.csr_map.iter().enumerate() {
            for b in &spec.csr_map[i + 1..] {
                assert_ne!(a.addr, b.addr);
            }
        }
    }
}
