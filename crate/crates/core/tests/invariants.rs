use proptest::prelude::*;

use mczcut::cutter;
use mczcut::harness::{gen_random_circuit, RandomCircuitSpec};
use mczcut::sampler::{self, stream_rng, CutProblem, Mode, ShotBudget};
use mczcut::Observable;

fn split() -> impl Strategy<Value = (usize, usize)> {
    (2usize..=5).prop_flat_map(|n| (1..n).prop_map(move |k| (k, n - k)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn reconstruction_is_exact((k, m) in split(), seed in any::<u64>()) {
        let c = gen_random_circuit(&RandomCircuitSpec::default(), k, m, &mut stream_rng(seed, 0)).unwrap();
        let cut = c.find_cut().unwrap();
        prop_assert!(cutter::reconstruction_residual(&cut, &Observable::ZString).unwrap() < 1e-9);
    }

    #[test]
    fn allocation_conserves_half_budget((k, m) in split(), total in 24u64..5_000_000) {
        let d = cutter::decompose_mcz(k, m).unwrap();
        let alloc = sampler::allocate(&d, total).unwrap();
        prop_assert_eq!(alloc.iter().map(|a| a.shots).sum::<u64>(), total / 2);
        prop_assert!(alloc.iter().all(|a| a.shots >= 1));
    }

    #[test]
    fn estimates_are_seed_deterministic((k, m) in split(), seed in any::<u64>(), preest in any::<bool>()) {
        let c = gen_random_circuit(&RandomCircuitSpec::default(), k, m, &mut stream_rng(seed, 1)).unwrap();
        let problem = CutProblem::from_cut(&c.find_cut().unwrap(), &Observable::ZString).unwrap();
        let budget = ShotBudget::fixed(2000, 0.1, problem.kappa());
        let mode = if preest { Mode::PreEstimation } else { Mode::CircuitSampling };
        let a = sampler::estimate(&problem, mode, &budget, seed).unwrap();
        let b = sampler::estimate(&problem, mode, &budget, seed).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert!(a.estimate.abs() <= problem.kappa() + 1e-12);
    }
}
