//! Per-shot sampling of a cut CCZ circuit with a Hoeffding shot budget.
use mczcut::harness::{gen_random_circuit, RandomCircuitSpec};
use mczcut::sampler::{self, stream_rng, CutProblem, ShotBudget, DEFAULT_DELTA};
use mczcut::Observable;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let circuit = gen_random_circuit(&RandomCircuitSpec::default(), 1, 2, &mut stream_rng(11, 0))?;
    let problem = CutProblem::from_cut(&circuit.find_cut()?, &Observable::ZString)?;
    println!("exact ⟨ZZZ⟩ = {:.6}, kappa = {}", problem.exact_value(), problem.kappa());

    for epsilon in [0.2, 0.1, 0.05] {
        let budget = ShotBudget::hoeffding(epsilon, DEFAULT_DELTA, problem.kappa(), 1)?;
        let rec = sampler::sample_circuit_mode(&problem, &budget, 3);
        println!(
            "epsilon {epsilon:<5} shots {:>7}  estimate {:+.5}  error {:+.5}  largest |shot| {:.2}",
            rec.shots,
            rec.estimate,
            rec.estimate - problem.exact_value(),
            rec.max_abs_shot.unwrap_or(0.0)
        );
    }
    Ok(())
}
