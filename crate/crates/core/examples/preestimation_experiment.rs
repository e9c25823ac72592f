//! A reduced random-circuit experiment comparing cut and uncut estimation errors.
//!
//! Usage: `cargo run --release --example preestimation_experiment -- [OUT_DIR]`
use std::env;
use std::path::PathBuf;

use mczcut::harness::{cmd_experiment, ExperimentConfig, RandomCircuitSpec};
use mczcut::sampler::Mode;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = ExperimentConfig {
        num_qubits: 5,
        k: 3,
        epsilon: 0.01,
        mode: Mode::PreEstimation,
        repetitions: 4,
        circuits_per_repetition: 5,
        seed: 2024,
        shots: None,
        kappa_budget: 6.0,
        circuit: RandomCircuitSpec::default(),
        out: env::args().nth(1).map(PathBuf::from),
    };
    let result = cmd_experiment(&config)?;
    let cut = result.summary.cut.expect("more than one run");
    let uncut = result.summary.uncut.expect("more than one run");
    println!("{} runs at N = {}", result.summary.runs, result.summary.shots);
    println!("cut   error std-dev {:.2e}, 95% |error| {:.2e}", cut.std_dev, cut.abs_q95);
    println!("uncut error std-dev {:.2e}, 95% |error| {:.2e}", uncut.std_dev, uncut.abs_q95);
    if let Some(dir) = &config.out {
        result.write_to(dir)?;
        println!("wrote {}", dir.display());
    }
    Ok(())
}
