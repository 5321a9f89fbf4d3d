//! Runs the 50 x 50 m, three-density sweep and prints the summary table.
//!
//! `cargo run --release -p rail-core --example sweep -- [base_seed] [runs]`

use std::time::Instant;

use rail_core::experiment::{run_experiment, ExperimentConfig};

fn main() {
    let mut args = std::env::args().skip(1);
    let mut cfg = ExperimentConfig::table2();
    if let Some(seed) = args.next() {
        cfg.base_seed = seed.parse().expect("base seed");
    }
    if let Some(runs) = args.next() {
        cfg.runs_per_density = runs.parse().expect("runs per density");
    }
    let start = Instant::now();
    let report = run_experiment(&cfg).expect("sweep");
    print!("{}", report.summary_table());
    println!("elapsed: {:.2?}", start.elapsed());
}
