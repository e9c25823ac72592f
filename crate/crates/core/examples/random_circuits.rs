//! Seeded random benchmark circuits with a central MCZ.
//!
//! Usage: `cargo run --example random_circuits -- [K] [M] [SEED]`
use std::env;

use mczcut::harness::{gen_random_circuit, mcz_impact, RandomCircuitSpec};
use mczcut::sampler::stream_rng;
use mczcut::Observable;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<u64> = env::args().skip(1).map(|a| a.parse().expect("integer argument")).collect();
    let k = args.first().copied().unwrap_or(1) as usize;
    let m = args.get(1).copied().unwrap_or(2) as usize;
    let seed = args.get(2).copied().unwrap_or(7);

    let spec = RandomCircuitSpec::default();
    let mut rng = stream_rng(seed, 0);
    for i in 0..3 {
        let c = gen_random_circuit(&spec, k, m, &mut rng)?;
        let cut = c.find_cut()?;
        let impact = mcz_impact(&c, cut.cut_gate_index, &Observable::ZString)?;
        println!("circuit {i}: {} gates, MCZ at {}, impact {impact:.3}", c.gates.len(), cut.cut_gate_index);
    }
    let c = gen_random_circuit(&spec, k, m, &mut stream_rng(seed, 1))?;
    println!("{}", c.serialize());
    Ok(())
}
