// SPDX-License-Identifier: Apache-2.0

//! Differential fuzzing campaign: run each input on the pipelined device
//! and the reference model in lockstep, compare commit traces, and feed
//! coverage deltas back into corpus retention.

use std::sync::Arc;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::config::Config;
use crate::coverage::{CoverageManifest, CoverageMap, MetricTotal};
use crate::dut::{dut_manifest, dut_reset, dut_run, BugConfig};
use crate::grm::{grm_reset, grm_run};
use crate::optimizer::WeightTable;
use crate::stimulus::{gen_seed, mutate, select_im, Corpus, Program};
use crate::trace::{ArchTrace, CommitEvent, RunStatus};

/// One trace divergence. Only the first differing field of the first
/// differing event is reported per input.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct MismatchReport {
    /// SHA-256 of the serialized input program.
    pub program_sha256: String,
    pub event_index: usize,
    /// "pc" | "instr_word" | "gpr_writes" | "csr_writes" | "mem_writes" |
    /// "exception" | "trace_length"
    pub field: String,
    pub dut: serde_json::Value,
    pub grm: serde_json::Value,
    pub bugs: Vec<String>,
    pub rng_seed: u64,
    /// Total retired test instructions when this input finished.
    pub instructions: u64,
}

fn sorted<T: Ord + Clone>(v: &[T]) -> Vec<T> {
    let mut v = v.to_vec();
    v.sort();
    v
}

/// Compare two commit traces field by field; at most one report comes
/// back, for the earliest divergence. Identity metadata is left blank for
/// the caller to fill in.
pub fn diff_traces(dut: &ArchTrace, grm: &ArchTrace) -> Option<MismatchReport> {
    let blank = |event_index, field: &str, d: serde_json::Value, g: serde_json::Value| {
        Some(MismatchReport {
            program_sha256: String::new(),
            event_index,
            field: field.to_string(),
            dut: d,
            grm: g,
            bugs: Vec::new(),
            rng_seed: 0,
            instructions: 0,
        })
    };
    for (i, (d, g)) in dut.events.iter().zip(&grm.events).enumerate() {
        if d.pc != g.pc {
            return blank(i, "pc", json!(d.pc), json!(g.pc));
        }
        if d.instr_word != g.instr_word {
            return blank(i, "instr_word", json!(d.instr_word), json!(g.instr_word));
        }
        let (dg, gg) = (sorted(&d.gpr_writes), sorted(&g.gpr_writes));
        if dg != gg {
            return blank(i, "gpr_writes", json!(dg), json!(gg));
        }
        let (dc, gc) = (sorted(&d.csr_writes), sorted(&g.csr_writes));
        if dc != gc {
            return blank(i, "csr_writes", json!(dc), json!(gc));
        }
        let (dm, gm) = (sorted(&d.mem_writes), sorted(&g.mem_writes));
        if dm != gm {
            return blank(i, "mem_writes", json!(dm), json!(gm));
        }
        if d.exception != g.exception {
            return blank(i, "exception", json!(d.exception), json!(g.exception));
        }
    }
    if dut.events.len() != grm.events.len() {
        let i = dut.events.len().min(grm.events.len());
        return blank(
            i,
            "trace_length",
            json!(dut.events.len()),
            json!(grm.events.len()),
        );
    }
    None
}

#[derive(Debug)]
pub struct RunOutcome {
    pub dut_trace: ArchTrace,
    pub grm_trace: ArchTrace,
    pub coverage: CoverageMap,
    pub mismatch: Option<MismatchReport>,
    pub dut_status: RunStatus,
    /// Test instructions this input retired on the device.
    pub retired_tis: u64,
}

fn count_retired_tis(events: &[CommitEvent], program: &Program) -> u64 {
    let (lo, hi) = (program.ti_base(), program.halt_pc());
    events.iter().filter(|e| (lo..hi).contains(&e.pc)).count() as u64
}

/// Execute one program on both models and diff the traces.
pub fn run_input(
    program: &Program,
    bugs: BugConfig,
    max_cycles: u64,
    manifest: &Arc<CoverageManifest>,
) -> RunOutcome {
    let image = program.image();
    let mut dut = dut_reset(&image, program.entry_pc(), bugs, manifest)
        .expect("program image fits memory");
    let (dut_trace, coverage, dut_status) =
        dut_run(&mut dut, max_cycles, program.instr_budget(), program.halt_pc());
    let mut grm = grm_reset(&image, program.entry_pc()).expect("program image fits memory");
    let grm_trace = grm_run(&mut grm, program.instr_budget(), program.halt_pc());
    let mismatch = diff_traces(&dut_trace, &grm_trace);
    let retired_tis = count_retired_tis(&dut_trace.events, program);
    RunOutcome { dut_trace, grm_trace, coverage, mismatch, dut_status, retired_tis }
}

pub fn program_sha256(program: &Program) -> String {
    let mut h = Sha256::new();
    h.update(program.to_bytes());
    format!("{:x}", h.finalize())
}

/// Corpus policy: `Feedback` mutates retained entries, `Random` draws a
/// fresh seed for every input (the baseline the feedback mode is measured
/// against).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FuzzMode {
    Feedback,
    Random,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct CurvePoint {
    pub instructions: u64,
    pub inputs: u64,
    pub hits: usize,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct CampaignReport {
    pub config: Config,
    pub mode: String,
    pub total_inputs: u64,
    pub total_instructions: u64,
    pub wall_secs: f64,
    pub stop_reason: String,
    /// Feedback-metric hits over time, sampled once per input.
    pub curve: Vec<CurvePoint>,
    pub coverage_totals: Vec<MetricTotal>,
    /// Feedback-metric hits at the end of the run.
    pub feedback_hits: usize,
    pub feedback_universe: usize,
    pub corpus_len: usize,
    pub retained: usize,
    pub hangs: u64,
    pub mismatches: Vec<MismatchReport>,
    #[serde(skip)]
    pub coverage: CoverageMap,
}

struct Campaign {
    cfg: Config,
    manifest: Arc<CoverageManifest>,
    mask: Vec<u64>,
    global: CoverageMap,
    corpus: Corpus,
    rng: ChaCha8Rng,
    weights: WeightTable,
    inputs: u64,
    instructions: u64,
    hangs: u64,
    mismatches: Vec<MismatchReport>,
    curve: Vec<CurvePoint>,
    started: Instant,
}

impl Campaign {
    fn stop_reason(&mut self, mutants_run: u64) -> Option<&'static str> {
        if mutants_run >= self.cfg.max_inputs {
            return Some("max_inputs");
        }
        if self.cfg.max_instructions != 0 && self.instructions >= self.cfg.max_instructions {
            return Some("max_instructions");
        }
        if let Some(wall) = self.cfg.max_wall {
            if self.started.elapsed() >= wall {
                return Some("max_wall");
            }
        }
        None
    }

    /// Run one program, fold its results into the campaign, and report
    /// whether it covered anything new on the feedback metrics.
    fn absorb(&mut self, program: &Program) -> bool {
        let out = run_input(program, self.cfg.bugs, self.cfg.max_cycles, &self.manifest);
        self.fold(program, out)
    }

    fn fold(&mut self, program: &Program, out: RunOutcome) -> bool {
        self.inputs += 1;
        self.instructions += out.retired_tis;
        if out.dut_status == RunStatus::Budget {
            self.hangs += 1;
        }
        if let Some(mut m) = out.mismatch {
            m.program_sha256 = program_sha256(program);
            m.bugs = self.cfg.bugs.enabled().iter().map(|s| s.to_string()).collect();
            m.rng_seed = self.cfg.rng_seed;
            m.instructions = self.instructions;
            self.mismatches.push(m);
        }
        let new = self
            .global
            .delta_nonempty_masked(&out.coverage, &self.mask)
            .expect("same manifest");
        self.global.merge_from(&out.coverage).expect("same manifest");
        self.curve.push(CurvePoint {
            instructions: self.instructions,
            inputs: self.inputs,
            hits: self.global.hit_count_masked(&self.mask),
        });
        new
    }
}

/// Run a full campaign. The seed programs always execute; `max_inputs`
/// budgets the inputs after them.
pub fn fuzz_loop(cfg: &Config, mode: FuzzMode, weights: &WeightTable) -> CampaignReport {
    let manifest = dut_manifest();
    let mask = manifest.metric_mask(&cfg.feedback);
    let feedback_universe: usize = manifest
        .universe_by_metric()
        .iter()
        .filter(|(m, _)| cfg.feedback.contains(m))
        .map(|&(_, n)| n)
        .sum();
    let mut c = Campaign {
        cfg: cfg.clone(),
        manifest: manifest.clone(),
        mask,
        global: CoverageMap::empty(&manifest),
        corpus: Corpus::new(),
        rng: ChaCha8Rng::seed_from_u64(cfg.rng_seed),
        weights: weights.clone(),
        inputs: 0,
        instructions: 0,
        hangs: 0,
        mismatches: Vec::new(),
        curve: Vec::new(),
        started: Instant::now(),
    };

    for _ in 0..c.cfg.seeds {
        let seed = gen_seed(&mut c.rng, &c.weights);
        c.absorb(&seed);
        c.corpus.push(seed);
    }

    let mut mutants_run = 0u64;
    let stop_reason = 'outer: loop {
        if let Some(r) = c.stop_reason(mutants_run) {
            break r;
        }
        match mode {
            FuzzMode::Random => {
                let program = gen_seed(&mut c.rng, &c.weights);
                c.absorb(&program);
                mutants_run += 1;
            }
            FuzzMode::Feedback => {
                let entry = match c.corpus.dequeue() {
                    Some(e) => e,
                    None => {
                        // queue drained: reseed rather than stall
                        let seed = gen_seed(&mut c.rng, &c.weights);
                        c.absorb(&seed);
                        seed
                    }
                };
                // draw the whole batch before running any of it, so lane
                // count never changes what the RNG produces
                let children: Vec<Program> = (0..c.cfg.mutants_per_entry)
                    .map(|_| {
                        let (ti, m) = select_im(&c.weights, &entry.ti_words, &mut c.rng);
                        mutate(&entry, ti, m, &mut c.rng)
                    })
                    .collect();
                let outcomes: Vec<RunOutcome> = if c.cfg.lanes > 1 {
                    let pool = rayon::ThreadPoolBuilder::new()
                        .num_threads(c.cfg.lanes)
                        .build()
                        .expect("thread pool");
                    pool.install(|| {
                        use rayon::prelude::*;
                        children
                            .par_iter()
                            .map(|p| run_input(p, c.cfg.bugs, c.cfg.max_cycles, &c.manifest))
                            .collect()
                    })
                } else {
                    children
                        .iter()
                        .map(|p| run_input(p, c.cfg.bugs, c.cfg.max_cycles, &c.manifest))
                        .collect()
                };
                // results are folded in batch order: retention decisions
                // match the sequential run exactly
                for (child, out) in children.into_iter().zip(outcomes) {
                    if let Some(r) = c.stop_reason(mutants_run) {
                        break 'outer r;
                    }
                    let new = c.fold(&child, out);
                    c.corpus.retain(&child, new);
                    mutants_run += 1;
                }
            }
        }
    };

    CampaignReport {
        config: c.cfg.clone(),
        mode: match mode {
            FuzzMode::Feedback => "feedback".to_string(),
            FuzzMode::Random => "random".to_string(),
        },
        total_inputs: c.inputs,
        total_instructions: c.instructions,
        wall_secs: c.started.elapsed().as_secs_f64(),
        stop_reason: stop_reason.to_string(),
        curve: c.curve,
        coverage_totals: c.global.totals(),
        feedback_hits: c.global.hit_count_masked(&c.mask),
        feedback_universe,
        corpus_len: c.corpus.len(),
        retained: c.corpus.retained(),
        hangs: c.hangs,
        mismatches: c.mismatches,
        coverage: c.global,
    }
}

impl CampaignReport {
    pub fn to_campaign_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("serializable");
        // mismatches live in their own jsonl file; keep only the count here
        let obj = v.as_object_mut().unwrap();
        let n = self.mismatches.len();
        obj.remove("mismatches");
        obj.insert("mismatch_count".into(), json!(n));
        obj.insert("version".into(), json!(1));
        serde_json::to_string_pretty(&v).expect("serializable")
    }

    pub fn to_mismatches_jsonl(&self) -> String {
        let mut out = String::new();
        for m in &self.mismatches {
            out.push_str(&serde_json::to_string(m).expect("serializable"));
            out.push('\n');
        }
        out
    }

    pub fn to_coverage_json(&self) -> String {
        let v = json!({
            "version": 1,
            "manifest_id": self.coverage.manifest_id(),
            "totals": self.coverage_totals,
            "feedback_hits": self.feedback_hits,
            "feedback_universe": self.feedback_universe,
        });
        serde_json::to_string_pretty(&v).expect("serializable")
    }
}
