//! Brute-force superoperators: the MCZ channel against the sum of local channels.
use mczcut::cutter;
use mczcut::densesim::superop_of_mcz;

fn main() -> Result<(), cutter::CutError> {
    for (k, m) in [(1, 1), (1, 2), (2, 2), (1, 4), (3, 3)] {
        let d = cutter::decompose_mcz(k, m)?;
        let sum = cutter::decomposition_superop(&d)?;
        let target = superop_of_mcz(k + m);
        let broken = cutter::decomposition_superop(&d.with_flipped_coefficient(0))?;
        println!(
            "({k}, {m}): {:>2} terms, distance {:.2e}, with one sign flipped {:.3}",
            d.len(),
            sum.frobenius_distance(&target),
            broken.frobenius_distance(&target)
        );
    }
    Ok(())
}
