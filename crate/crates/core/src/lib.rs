// SPDX-License-Identifier: Apache-2.0

//! Coverage-guided differential fuzzing of a small buggy CPU against its
//! golden reference model: ISA definition, the two models, coverage
//! instrumentation, stimulus generation/mutation, instruction-mutation
//! pair profiling, and the campaign engine.

pub mod config;
pub mod controller;
pub mod coverage;
pub mod dut;
pub mod engine;
pub mod grm;
pub mod isa;
pub mod optimizer;
pub mod stimulus;
pub mod trace;
pub mod witness;
