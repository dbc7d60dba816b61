// SPDX-License-Identifier: Apache-2.0

//! Operator surface. Exit codes: 0 clean, 10 at least one mismatch found,
//! 2 usage/config error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use thehuzz_core::config::Config;
use thehuzz_core::controller::{casestudy_fuzz, controller_manifest};
use thehuzz_core::coverage::Metric;
use thehuzz_core::dut::dut_manifest;
use thehuzz_core::engine::{diff_traces, fuzz_loop, run_input, FuzzMode};
use thehuzz_core::optimizer::{
    greedy_cover, profile, ProfileMatrix, WeightTable, DEFAULT_RUNS_PER_PAIR,
};
use thehuzz_core::stimulus::Program;

const EXIT_MISMATCH: u8 = 10;
const EXIT_CONFIG: u8 = 2;

#[derive(Parser)]
#[command(name = "thehuzz", about = "coverage-guided differential fuzzer for a pipelined CPU")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct ConfigArgs {
    /// Line-oriented key=value campaign config.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Inline overrides, e.g. --set fuzz.max_inputs=500 (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a fuzzing campaign; writes campaign.json, mismatches.jsonl,
    /// coverage.json under the output directory.
    Fuzz {
        #[command(flatten)]
        config: ConfigArgs,
        /// Instruction-mutation weight table from `optimize`.
        #[arg(long)]
        weights: Option<PathBuf>,
        /// Fresh random seed per input instead of corpus mutation.
        #[arg(long)]
        random: bool,
    },
    /// Profile every (instruction, mutation) pair; writes profile.json.
    Profile {
        #[command(flatten)]
        config: ConfigArgs,
        /// Profiling repetitions per pair.
        #[arg(long, default_value_t = DEFAULT_RUNS_PER_PAIR)]
        runs: usize,
    },
    /// Reduce a profile to a covering weight table; writes weights.json.
    Optimize {
        /// profile.json from `profile`.
        profile: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Re-run one stored input and print both commit traces up to the
    /// first divergence.
    Replay {
        /// A .thzi input file.
        input: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
    },
    /// Print the per-metric coverage table from a campaign output.
    CovReport {
        /// coverage.json, or a directory containing one.
        path: PathBuf,
    },
    /// Fuzz the standalone cache controller under three feedback metric
    /// sets and compare what each can see.
    Casestudy {
        #[command(flatten)]
        config: ConfigArgs,
    },
}

fn load_config(args: &ConfigArgs) -> Result<Config, String> {
    let mut text = match &args.config {
        Some(p) => fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?,
        None => String::new(),
    };
    for s in &args.sets {
        text.push('\n');
        text.push_str(s);
    }
    let mut cfg = Config::parse(&text).map_err(|e| e.to_string())?;
    if let Ok(out) = std::env::var("THEHUZZ_OUT") {
        cfg.out = Some(PathBuf::from(out));
    }
    Ok(cfg)
}

fn out_dir(cfg: &Config) -> Result<PathBuf, String> {
    let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("out"));
    fs::create_dir_all(&dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    Ok(dir)
}

fn write(path: &Path, contents: &str) -> Result<(), String> {
    fs::write(path, contents).map_err(|e| format!("{}: {e}", path.display()))
}

fn cmd_fuzz(args: &ConfigArgs, weights: Option<&Path>, random: bool) -> Result<u8, String> {
    let cfg = load_config(args)?;
    let table = match weights {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
            WeightTable::from_json(&text).map_err(|e| e.to_string())?
        }
        None => WeightTable::empty(),
    };
    let mode = if random { FuzzMode::Random } else { FuzzMode::Feedback };
    let report = fuzz_loop(&cfg, mode, &table);
    let dir = out_dir(&cfg)?;
    write(&dir.join("campaign.json"), &report.to_campaign_json())?;
    write(&dir.join("mismatches.jsonl"), &report.to_mismatches_jsonl())?;
    write(&dir.join("coverage.json"), &report.to_coverage_json())?;
    println!(
        "{} inputs, {} instructions, {}/{} feedback points, {} mismatches ({})",
        report.total_inputs,
        report.total_instructions,
        report.feedback_hits,
        report.feedback_universe,
        report.mismatches.len(),
        report.stop_reason,
    );
    println!("reports in {}", dir.display());
    Ok(if report.mismatches.is_empty() { 0 } else { EXIT_MISMATCH })
}

fn cmd_profile(args: &ConfigArgs, runs: usize) -> Result<u8, String> {
    let cfg = load_config(args)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let matrix = profile(runs, &mut rng);
    let dir = out_dir(&cfg)?;
    write(&dir.join("profile.json"), &matrix.to_json())?;
    println!(
        "{} pairs x {} coverage points -> {}",
        matrix.pairs.len(),
        matrix.points.len(),
        dir.join("profile.json").display(),
    );
    Ok(0)
}

fn cmd_optimize(profile_path: &Path, args: &ConfigArgs) -> Result<u8, String> {
    let cfg = load_config(args)?;
    let text =
        fs::read_to_string(profile_path).map_err(|e| format!("{}: {e}", profile_path.display()))?;
    let matrix = ProfileMatrix::from_json(&text).map_err(|e| e.to_string())?;
    let table = greedy_cover(&matrix).map_err(|e| e.to_string())?;
    let dir = out_dir(&cfg)?;
    write(&dir.join("weights.json"), &table.to_json())?;
    println!(
        "{} of {} pairs cover all {} points -> {}",
        table.len(),
        matrix.pairs.len(),
        matrix.points.len(),
        dir.join("weights.json").display(),
    );
    Ok(0)
}

fn print_event(label: &str, e: &thehuzz_core::trace::CommitEvent) {
    let ex = e.exception.map(|c| format!(" exc={c}")).unwrap_or_default();
    println!(
        "  {label} #{:<3} pc={:#06x} word={:#010x} gpr={:?} csr={:?} mem={:?}{ex}",
        e.seq, e.pc, e.instr_word, e.gpr_writes, e.csr_writes, e.mem_writes,
    );
}

fn cmd_replay(input: &Path, args: &ConfigArgs) -> Result<u8, String> {
    let cfg = load_config(args)?;
    let bytes = fs::read(input).map_err(|e| format!("{}: {e}", input.display()))?;
    let program = Program::from_bytes(&bytes).map_err(|e| format!("{}: {e}", input.display()))?;
    let out = run_input(&program, cfg.bugs, cfg.max_cycles, &dut_manifest());
    let mismatch = diff_traces(&out.dut_trace, &out.grm_trace);
    let upto = mismatch.as_ref().map_or(out.dut_trace.events.len(), |m| m.event_index + 1);
    for i in 0..upto {
        if let Some(e) = out.dut_trace.events.get(i) {
            print_event("dut", e);
        }
        if let Some(e) = out.grm_trace.events.get(i) {
            print_event("grm", e);
        }
    }
    match mismatch {
        Some(m) => {
            println!(
                "mismatch at event {}: {} dut={} grm={}",
                m.event_index, m.field, m.dut, m.grm
            );
            Ok(EXIT_MISMATCH)
        }
        None => {
            println!("traces identical ({} events, {:?})", out.dut_trace.events.len(), out.dut_status);
            Ok(0)
        }
    }
}

fn cmd_cov_report(path: &Path) -> Result<u8, String> {
    let file = if path.is_dir() { path.join("coverage.json") } else { path.to_path_buf() };
    let text = fs::read_to_string(&file).map_err(|e| format!("{}: {e}", file.display()))?;
    let v: serde_json::Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    let totals = v["totals"].as_array().ok_or("coverage.json: missing totals")?;
    println!("{:<12} {:>6} {:>9} {:>7}", "metric", "hit", "universe", "pct");
    for t in totals {
        let (hit, uni) = (t["hit"].as_u64().unwrap_or(0), t["universe"].as_u64().unwrap_or(0));
        let pct = if uni == 0 { 0.0 } else { 100.0 * hit as f64 / uni as f64 };
        println!("{:<12} {:>6} {:>9} {:>6.1}%", t["metric"].as_str().unwrap_or("?"), hit, uni, pct);
    }
    if let (Some(h), Some(u)) = (v["feedback_hits"].as_u64(), v["feedback_universe"].as_u64()) {
        println!("feedback: {h}/{u}");
    }
    Ok(0)
}

fn cmd_casestudy(args: &ConfigArgs) -> Result<u8, String> {
    let cfg = load_config(args)?;
    let manifest = controller_manifest();
    // the two buggy combinational blocks
    for block in [4u32, 6] {
        let expr = manifest.block_universe(block, Metric::Expression);
        let mux = manifest.block_universe(block, Metric::Mux);
        let ctrl = manifest.block_universe(block, Metric::CtrlReg);
        println!("block {block}: expression={expr} mux={mux} ctrlreg={ctrl} points");
        if mux != 0 || ctrl != 0 {
            return Err(format!("block {block}: expected zero mux/ctrlreg points"));
        }
    }
    println!("ctrlreg universe: {} values", manifest.block_universe(7, Metric::CtrlReg));
    let runs: [(&str, &[Metric]); 3] = [
        ("all-six", Metric::FEEDBACK_DEFAULT),
        ("mux-only", &[Metric::Mux]),
        ("ctrlreg-only", &[Metric::CtrlReg]),
    ];
    for (label, metrics) in runs {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
        let r = casestudy_fuzz(metrics, 10_000, &mut rng);
        println!(
            "{label:<12} feedback {} / {} in {} cycles; expr(blocks 4+6) {}/{}; b1={} b2={}",
            r.hit, r.universe, r.cycles, r.expr_blocks_hit, r.expr_blocks_universe,
            r.b1_found, r.b2_found,
        );
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Cmd::Fuzz { config, weights, random } => cmd_fuzz(config, weights.as_deref(), *random),
        Cmd::Profile { config, runs } => cmd_profile(config, *runs),
        Cmd::Optimize { profile, config } => cmd_optimize(profile, config),
        Cmd::Replay { input, config } => cmd_replay(input, config),
        Cmd::CovReport { path } => cmd_cov_report(path),
        Cmd::Casestudy { config } => cmd_casestudy(config),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}
