//! Prints and verifies the decomposition of an MCZ split across two partitions.
//!
//! Usage: `cargo run --example decompose_mcz -- [ORDER] [K]`
use std::env;

use mczcut::cutter::{self, CutError};

fn main() -> Result<(), CutError> {
    let args: Vec<usize> = env::args().skip(1).map(|a| a.parse().expect("integer argument")).collect();
    let order = args.first().copied().unwrap_or(4);
    let k = args.get(1).copied().unwrap_or(order / 2);

    let d = cutter::decompose_mcz(k, order - k)?;
    print!("{d}");
    if order <= mczcut::densesim::MAX_SUPEROP_QUBITS {
        let report = cutter::verify(&d)?;
        println!("superoperator residual {:.2e}", report.residual);
        println!("H-box channel residual {:.2e}", report.channel_form_residual);
    }
    let contracted = cutter::decompose_mcz_contracted(k, order - k)?;
    println!(
        "{} terms before the projector rewrite, {} after canonicalization",
        contracted.len(),
        d.len()
    );
    Ok(())
}
