// SPDX-License-Identifier: Apache-2.0
// scratch: inspect the greedy cover selection

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thehuzz_core::optimizer::{greedy_cover, profile, DEFAULT_RUNS_PER_PAIR};

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let matrix = profile(DEFAULT_RUNS_PER_PAIR, &mut rng);
    println!("pairs {}, points {}", matrix.pairs.len(), matrix.points.len());
    let weights = greedy_cover(&matrix).expect("feasible");
    for (i, m) in weights.pairs() {
        println!("Q: {:?} {:?}", i, m);
    }
    // row sizes of the fattest rows
    let mut sizes: Vec<(usize, usize)> = matrix
        .rows
        .iter()
        .enumerate()
        .map(|(p, r)| (r.len(), p))
        .collect();
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    for &(len, p) in sizes.iter().take(10) {
        let (i, m) = matrix.pairs[p];
        println!("fat row {:?} {:?}: {}", i, m, len);
    }
    // who covers stmt_LH?
    for (c, pt) in matrix.points.iter().enumerate() {
        if pt.unit == "stmt_LH" {
            let owners: Vec<_> = matrix
                .rows
                .iter()
                .enumerate()
                .filter(|(_, r)| r.binary_search(&c).is_ok())
                .map(|(p, _)| matrix.pairs[p])
                .collect();
            println!("stmt_LH covered by {} rows: {:?}", owners.len(), &owners[..owners.len().min(12)]);
        }
    }
}
