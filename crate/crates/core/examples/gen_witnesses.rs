// SPDX-License-Identifier: Apache-2.0

//! Regenerates the checked-in `witnesses/` corpus from the catalog.
//! Usage: cargo run -p thehuzz-core --example gen_witnesses [dir]

use std::fs;
use std::path::PathBuf;

use thehuzz_core::witness::{all_witnesses, WitnessInput};

fn main() {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "witnesses".to_string());
    let dir = PathBuf::from(dir);
    fs::create_dir_all(&dir).expect("create witnesses dir");
    for w in all_witnesses() {
        let name = w.bug.to_lowercase();
        match &w.input {
            WitnessInput::Pipeline(p) => {
                let path = dir.join(format!("{name}.thzi"));
                fs::write(&path, p.to_bytes()).expect("write witness");
                println!("{}", path.display());
            }
            WitnessInput::Controller(seq) => {
                // controller inputs: one 5-bit value per line
                let path = dir.join(format!("{name}.inputs"));
                let text: String = seq.iter().map(|v| format!("{v:#07b}\n")).collect();
                fs::write(&path, text).expect("write witness");
                println!("{}", path.display());
            }
        }
    }
}
