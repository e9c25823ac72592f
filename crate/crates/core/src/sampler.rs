//! Shot budgets and the two Monte-Carlo estimators for cut circuits.
//!
//! Circuit-sampling mode draws one term per shot with probability `|a_i|/κ`
//! and returns `κ · sign(a_i) · ξ_A f_A(s_A) · ξ_B f_B(s_B)`. Pre-estimation
//! mode spends `N_i` shots on each side of each term and combines the side
//! means as `Σ a_i f̂_i^A f̂_i^B`.
//!
//! Every random draw comes from a ChaCha stream keyed by `(seed, stream)`,
//! so results do not depend on the number of worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Circuit, CircuitError, Observable, ObservableError, PartitionedCut};
use crate::cutter::{self, CircuitPair, CutError, Decomposition, SubcircuitPlan};
use crate::densesim::{self, DiscreteSampler, SimError, StateVector};

/// Default failure probability for Hoeffding budgets.
pub const DEFAULT_DELTA: f64 = 0.05;
/// Shots per independently seeded block in circuit-sampling mode.
const SHOT_BLOCK: u64 = 1 << 16;
/// Relative slack absorbed before rounding a budget up, so that values like
/// `1.44e6 + 2e-10` do not round to `1 440 001`.
const CEIL_SLACK: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SamplerError {
    #[error("{name} = {value} is outside its domain")]
    Domain { name: &'static str, value: f64 },
    #[error("budget of {shots} shots cannot cover {terms} terms on both sides")]
    BudgetTooSmall { shots: u64, terms: usize },
    #[error("need at least {needed} records, got {got}")]
    TooFewRecords { needed: usize, got: usize },
    #[error("decomposition failed verification (residual {0:.3e})")]
    Unverified(f64),
    #[error("decomposition has no terms")]
    EmptyDecomposition,
    #[error(transparent)]
    Observable(#[from] ObservableError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Cut(#[from] CutError),
}

/// Independent generator for one `(seed, stream)` pair.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Deterministic 64-bit mix of a seed and an index.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn ceil_budget(x: f64) -> u64 {
    (x - x.abs() * CEIL_SLACK).ceil().max(1.0) as u64
}

fn check_open_unit(name: &'static str, value: f64) -> Result<(), SamplerError> {
    if value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(SamplerError::Domain { name, value })
    }
}

/// Smallest `N` with `N ≥ 2 κ^{2K} ln(2/δ) / ε²`.
pub fn hoeffding_shots(epsilon: f64, delta: f64, kappa: f64, cuts: u32) -> Result<u64, SamplerError> {
    check_open_unit("epsilon", epsilon)?;
    check_open_unit("delta", delta)?;
    if !(kappa >= 1.0) || !kappa.is_finite() {
        return Err(SamplerError::Domain { name: "kappa", value: kappa });
    }
    if cuts == 0 {
        return Err(SamplerError::Domain { name: "cuts", value: 0.0 });
    }
    let range = kappa.powi(cuts as i32);
    Ok(ceil_budget(2.0 * range * range / (epsilon * epsilon) * (2.0 / delta).ln()))
}

/// `N = ⌈4 κ² / ε²⌉`.
pub fn preestimation_budget(epsilon: f64, kappa: f64) -> Result<u64, SamplerError> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(SamplerError::Domain {
            name: "epsilon",
            value: epsilon,
        });
    }
    if !(kappa > 0.0) || !kappa.is_finite() {
        return Err(SamplerError::Domain { name: "kappa", value: kappa });
    }
    Ok(ceil_budget(4.0 * kappa * kappa / (epsilon * epsilon)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    CircuitSampling,
    PreEstimation,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShotBudget {
    pub total: u64,
    pub epsilon: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    pub kappa: f64,
    pub cuts: u32,
}

impl ShotBudget {
    pub fn hoeffding(epsilon: f64, delta: f64, kappa: f64, cuts: u32) -> Result<Self, SamplerError> {
        Ok(ShotBudget {
            total: hoeffding_shots(epsilon, delta, kappa, cuts)?,
            epsilon,
            delta: Some(delta),
            kappa,
            cuts,
        })
    }

    pub fn preestimation(epsilon: f64, kappa: f64) -> Result<Self, SamplerError> {
        Ok(ShotBudget {
            total: preestimation_budget(epsilon, kappa)?,
            epsilon,
            delta: None,
            kappa,
            cuts: 1,
        })
    }

    pub fn fixed(total: u64, epsilon: f64, kappa: f64) -> Self {
        ShotBudget {
            total,
            epsilon,
            delta: None,
            kappa,
            cuts: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermAllocation {
    pub term: usize,
    /// Shots spent on each of the two subcircuits of the term.
    pub shots: u64,
}

/// `N_i ≈ |a_i| N / (2κ)` with largest-remainder rounding so that `Σ N_i = ⌊N/2⌋`.
pub fn allocate(d: &Decomposition, total: u64) -> Result<Vec<TermAllocation>, SamplerError> {
    let terms = d.terms.len();
    if terms == 0 {
        return Err(SamplerError::EmptyDecomposition);
    }
    if total < 2 * terms as u64 {
        return Err(SamplerError::BudgetTooSmall { shots: total, terms });
    }
    let half = total / 2;
    let exact: Vec<f64> = d
        .terms
        .iter()
        .map(|t| t.coefficient.abs() * total as f64 / (2.0 * d.kappa))
        .collect();
    let mut shots: Vec<u64> = exact.iter().map(|x| x.floor() as u64).collect();
    let assigned: u64 = shots.iter().sum();
    let mut order: Vec<usize> = (0..terms).collect();
    order.sort_by(|&i, &j| {
        let (ri, rj) = (exact[i] - exact[i].floor(), exact[j] - exact[j].floor());
        rj.total_cmp(&ri).then(i.cmp(&j))
    });
    let mut remaining = half.saturating_sub(assigned);
    for &i in order.iter().cycle() {
        if remaining == 0 {
            break;
        }
        shots[i] += 1;
        remaining -= 1;
    }
    for i in 0..terms {
        if shots[i] == 0 {
            let donor = (0..terms).max_by_key(|&j| (shots[j], std::cmp::Reverse(j))).expect("terms");
            shots[donor] -= 1;
            shots[i] = 1;
        }
    }
    Ok(shots
        .into_iter()
        .enumerate()
        .map(|(term, shots)| TermAllocation { term, shots })
        .collect())
}

/// Distribution of the per-shot value `ξ · f(s)` of one subcircuit, binned by value.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueDistribution {
    pub values: Vec<f64>,
    pub probabilities: Vec<f64>,
}

impl ValueDistribution {
    pub fn from_branches(branches: &[cutter::Branch], obs: &Observable) -> Self {
        let mut keys: Vec<(f64, f64)> = Vec::new();
        let mut probabilities: Vec<f64> = Vec::new();
        for b in branches {
            for (s, p) in b.state.probabilities().into_iter().enumerate() {
                if p == 0.0 {
                    continue;
                }
                let key = (b.sign, obs.value(s));
                let weight = b.probability * p;
                match keys.iter().position(|k| *k == key) {
                    Some(i) => probabilities[i] += weight,
                    None => {
                        keys.push(key);
                        probabilities.push(weight);
                    }
                }
            }
        }
        ValueDistribution {
            values: keys.iter().map(|(sign, f)| sign * f).collect(),
            probabilities,
        }
    }

    pub fn of_state(state: &StateVector, obs: &Observable) -> Self {
        let branch = cutter::Branch {
            probability: 1.0,
            sign: 1.0,
            state: state.clone(),
        };
        Self::from_branches(std::slice::from_ref(&branch), obs)
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().zip(&self.probabilities).map(|(v, p)| v * p).sum()
    }

    /// Same bins with every value negated.
    pub fn negated(&self) -> Self {
        ValueDistribution {
            values: self.values.iter().map(|v| -v).collect(),
            probabilities: self.probabilities.clone(),
        }
    }

    /// Multinomial bin counts for `shots` independent draws.
    pub fn draw_counts<R: rand::Rng + ?Sized>(&self, shots: u64, rng: &mut R) -> Vec<u64> {
        let total: f64 = self.probabilities.iter().sum();
        let mut left = shots;
        let mut mass = total;
        let mut counts = Vec::with_capacity(self.values.len());
        for (i, &p) in self.probabilities.iter().enumerate() {
            if i + 1 == self.probabilities.len() {
                counts.push(left);
                break;
            }
            let c = if left == 0 || mass <= 0.0 {
                0
            } else {
                let q = (p / mass).clamp(0.0, 1.0);
                Binomial::new(left, q).expect("valid binomial").sample(rng)
            };
            counts.push(c);
            left -= c;
            mass -= p;
        }
        counts
    }

    /// Sample mean and unbiased sample variance of `shots` draws.
    pub fn sample_moments<R: rand::Rng + ?Sized>(&self, shots: u64, rng: &mut R) -> (f64, f64) {
        let counts = self.draw_counts(shots, rng);
        moments_from_counts(&self.values, &counts)
    }
}

fn moments_from_counts(values: &[f64], counts: &[u64]) -> (f64, f64) {
    let n: u64 = counts.iter().sum();
    if n == 0 {
        return (0.0, 0.0);
    }
    let nf = n as f64;
    let mean = values.iter().zip(counts).map(|(v, &c)| v * c as f64).sum::<f64>() / nf;
    if n < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = values
        .iter()
        .zip(counts)
        .map(|(v, &c)| c as f64 * (v - mean) * (v - mean))
        .sum();
    (mean, ss / (nf - 1.0))
}

/// Per-shot sampler of one subcircuit: branch, then bitstring.
#[derive(Debug, Clone)]
struct SideSampler {
    branch: DiscreteSampler,
    signs: Vec<f64>,
    bitstrings: Vec<DiscreteSampler>,
    values: ValueDistribution,
}

impl SideSampler {
    fn new(plan: &SubcircuitPlan, obs: &Observable) -> Self {
        let branches = plan.branches();
        let probs: Vec<f64> = branches.iter().map(|b| b.probability).collect();
        SideSampler {
            branch: DiscreteSampler::new(&probs),
            signs: branches.iter().map(|b| b.sign).collect(),
            bitstrings: branches.iter().map(|b| b.state.sampler()).collect(),
            values: ValueDistribution::from_branches(&branches, obs),
        }
    }

    fn shot<R: rand::Rng + ?Sized>(&self, obs: &Observable, rng: &mut R) -> f64 {
        let b = self.branch.sample(rng);
        let s = self.bitstrings[b].sample(rng);
        self.signs[b] * obs.value(s)
    }
}

/// A cut circuit ready for sampling: circuit pairs, side observables and samplers.
#[derive(Debug, Clone)]
pub struct CutProblem {
    pub decomposition: Decomposition,
    pub pairs: Vec<CircuitPair>,
    pub obs_a: Observable,
    pub obs_b: Observable,
    samplers: Vec<(SideSampler, SideSampler)>,
}

impl CutProblem {
    /// Embeds `d` into the cut. Without `force`, `d` must pass the superoperator oracle.
    pub fn new(cut: &PartitionedCut, d: Decomposition, obs: &Observable, force: bool) -> Result<Self, SamplerError> {
        if d.terms.is_empty() {
            return Err(SamplerError::EmptyDecomposition);
        }
        if !force {
            let report = cutter::verify(&d)?;
            if !report.passed() {
                return Err(SamplerError::Unverified(report.residual));
            }
        }
        let partition = cut.circuit.partition.as_ref().ok_or(CircuitError::NoPartition)?;
        let (obs_a, obs_b) = obs.factorize(partition)?;
        let pairs = cutter::embed(&d, cut)?;
        let samplers = pairs
            .iter()
            .map(|p| (SideSampler::new(&p.a, &obs_a), SideSampler::new(&p.b, &obs_b)))
            .collect();
        Ok(CutProblem {
            decomposition: d,
            pairs,
            obs_a,
            obs_b,
            samplers,
        })
    }

    /// Uses the merged MCZ decomposition for the cut's split.
    pub fn from_cut(cut: &PartitionedCut, obs: &Observable) -> Result<Self, SamplerError> {
        let d = cutter::decompose_mcz(cut.k, cut.m)?;
        Self::new(cut, d, obs, true)
    }

    pub fn kappa(&self) -> f64 {
        self.decomposition.kappa
    }

    /// Exact `Σ a_i ⟨O_A⟩_i ⟨O_B⟩_i`.
    pub fn exact_value(&self) -> f64 {
        self.decomposition
            .terms
            .iter()
            .zip(&self.samplers)
            .map(|(t, (a, b))| t.coefficient * a.values.mean() * b.values.mean())
            .sum()
    }

    /// Per-shot value distributions `(A, B)` of term `i`.
    pub fn value_distributions(&self, i: usize) -> (&ValueDistribution, &ValueDistribution) {
        (&self.samplers[i].0.values, &self.samplers[i].1.values)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermEstimate {
    pub term: usize,
    pub coefficient: f64,
    pub shots: u64,
    pub mean_a: f64,
    pub mean_b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateRecord {
    pub seed: u64,
    pub mode: Mode,
    pub budget: ShotBudget,
    pub allocations: Vec<TermAllocation>,
    pub estimate: f64,
    /// Estimated standard deviation of `estimate`.
    pub std_dev: f64,
    pub shots: u64,
    pub per_term: Vec<TermEstimate>,
    /// Largest `|f̂|` over all shots (circuit-sampling mode).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_abs_shot: Option<f64>,
}

impl EstimateRecord {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("records always serialize")
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct ShotStats {
    count: u64,
    sum: f64,
    sum_sq: f64,
    max_abs: f64,
}

/// Per-shot estimator with one term drawn per shot.
pub fn sample_circuit_mode(problem: &CutProblem, budget: &ShotBudget, seed: u64) -> EstimateRecord {
    let d = &problem.decomposition;
    let kappa = d.kappa;
    let weights: Vec<f64> = d.terms.iter().map(|t| t.coefficient.abs()).collect();
    let term_sampler = DiscreteSampler::new(&weights);
    let total = budget.total;
    let blocks = total.div_ceil(SHOT_BLOCK);
    let per_block: Vec<(ShotStats, Vec<(u64, f64, f64)>)> = (0..blocks)
        .into_par_iter()
        .map(|block| {
            let mut rng = stream_rng(seed, block);
            let shots = SHOT_BLOCK.min(total - block * SHOT_BLOCK);
            let mut stats = ShotStats::default();
            let mut per_term = vec![(0u64, 0.0, 0.0); d.terms.len()];
            for _ in 0..shots {
                let i = term_sampler.sample(&mut rng);
                let (sa, sb) = &problem.samplers[i];
                let va = sa.shot(&problem.obs_a, &mut rng);
                let vb = sb.shot(&problem.obs_b, &mut rng);
                let f = kappa * d.terms[i].coefficient.signum() * va * vb;
                stats.count += 1;
                stats.sum += f;
                stats.sum_sq += f * f;
                stats.max_abs = stats.max_abs.max(f.abs());
                let slot = &mut per_term[i];
                slot.0 += 1;
                slot.1 += va;
                slot.2 += vb;
            }
            (stats, per_term)
        })
        .collect();

    let mut stats = ShotStats::default();
    let mut per_term = vec![(0u64, 0.0, 0.0); d.terms.len()];
    for (s, t) in &per_block {
        stats.count += s.count;
        stats.sum += s.sum;
        stats.sum_sq += s.sum_sq;
        stats.max_abs = stats.max_abs.max(s.max_abs);
        for (acc, x) in per_term.iter_mut().zip(t) {
            acc.0 += x.0;
            acc.1 += x.1;
            acc.2 += x.2;
        }
    }
    let n = stats.count.max(1) as f64;
    let mean = stats.sum / n;
    let var = if stats.count > 1 {
        ((stats.sum_sq - n * mean * mean) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    EstimateRecord {
        seed,
        mode: Mode::CircuitSampling,
        budget: *budget,
        allocations: Vec::new(),
        estimate: mean,
        std_dev: (var / n).sqrt(),
        shots: stats.count,
        per_term: per_term
            .iter()
            .enumerate()
            .map(|(i, &(c, sa, sb))| TermEstimate {
                term: i,
                coefficient: d.terms[i].coefficient,
                shots: c,
                mean_a: if c > 0 { sa / c as f64 } else { 0.0 },
                mean_b: if c > 0 { sb / c as f64 } else { 0.0 },
            })
            .collect(),
        max_abs_shot: Some(stats.max_abs),
    }
}

/// Independent side estimates with allocated shots, combined as `Σ a_i f̂_i^A f̂_i^B`.
pub fn preestimation_mode(problem: &CutProblem, budget: &ShotBudget, seed: u64) -> Result<EstimateRecord, SamplerError> {
    let d = &problem.decomposition;
    let allocations = allocate(d, budget.total)?;
    let results: Vec<(TermEstimate, f64)> = allocations
        .par_iter()
        .map(|alloc| {
            let i = alloc.term;
            let (sa, sb) = &problem.samplers[i];
            let n = alloc.shots;
            let (ma, va) = sa.values.sample_moments(n, &mut stream_rng(seed, 2 * i as u64));
            let (mb, vb) = sb.values.sample_moments(n, &mut stream_rng(seed, 2 * i as u64 + 1));
            let a = d.terms[i].coefficient;
            let nf = n as f64;
            let (ea, eb) = (va / nf, vb / nf);
            let var = a * a * (ea * (mb * mb + eb) + eb * ma * ma);
            (
                TermEstimate {
                    term: i,
                    coefficient: a,
                    shots: n,
                    mean_a: ma,
                    mean_b: mb,
                },
                var,
            )
        })
        .collect();
    let estimate = results.iter().map(|(t, _)| t.coefficient * t.mean_a * t.mean_b).sum();
    let variance: f64 = results.iter().map(|(_, v)| v).sum();
    let shots = 2 * allocations.iter().map(|a| a.shots).sum::<u64>();
    Ok(EstimateRecord {
        seed,
        mode: Mode::PreEstimation,
        budget: *budget,
        allocations,
        estimate,
        std_dev: variance.sqrt(),
        shots,
        per_term: results.into_iter().map(|(t, _)| t).collect(),
        max_abs_shot: None,
    })
}

/// Runs either estimator.
pub fn estimate(problem: &CutProblem, mode: Mode, budget: &ShotBudget, seed: u64) -> Result<EstimateRecord, SamplerError> {
    match mode {
        Mode::CircuitSampling => Ok(sample_circuit_mode(problem, budget, seed)),
        Mode::PreEstimation => preestimation_mode(problem, budget, seed),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UncutEstimate {
    pub estimate: f64,
    pub std_dev: f64,
    pub shots: u64,
}

/// Plain shot-noise estimate of `⟨O⟩` on the uncut circuit.
pub fn sample_uncut(circuit: &Circuit, obs: &Observable, shots: u64, seed: u64) -> Result<UncutEstimate, SamplerError> {
    obs.check_size(circuit.num_qubits)?;
    let state = densesim::run(circuit, &StateVector::zero(circuit.num_qubits))?;
    let dist = ValueDistribution::of_state(&state, obs);
    let (mean, var) = dist.sample_moments(shots, &mut stream_rng(seed, 0));
    Ok(UncutEstimate {
        estimate: mean,
        std_dev: (var / shots.max(1) as f64).sqrt(),
        shots,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorSummary {
    pub count: usize,
    pub mean: f64,
    pub std_dev: f64,
    pub q05: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub q95: f64,
    /// 95% quantile of `|error|`.
    pub abs_q95: f64,
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Mean, sample standard deviation and box-plot quantiles of a list of errors.
pub fn empirical_variance_report(errors: &[f64]) -> Result<ErrorSummary, SamplerError> {
    if errors.len() < 2 {
        return Err(SamplerError::TooFewRecords {
            needed: 2,
            got: errors.len(),
        });
    }
    let n = errors.len() as f64;
    let mean = errors.iter().sum::<f64>() / n;
    let var = errors.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / (n - 1.0);
    let mut sorted = errors.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut abs: Vec<f64> = errors.iter().map(|e| e.abs()).collect();
    abs.sort_by(f64::total_cmp);
    Ok(ErrorSummary {
        count: errors.len(),
        mean,
        std_dev: var.sqrt(),
        q05: quantile(&sorted, 0.05),
        q25: quantile(&sorted, 0.25),
        median: quantile(&sorted, 0.5),
        q75: quantile(&sorted, 0.75),
        q95: quantile(&sorted, 0.95),
        abs_q95: quantile(&abs, 0.95),
    })
}

/// Summary of the estimate errors of a batch of records against one exact value.
pub fn summarize_records(records: &[EstimateRecord], exact: f64) -> Result<ErrorSummary, SamplerError> {
    let errors: Vec<f64> = records.iter().map(|r| r.estimate - exact).collect();
    empirical_variance_report(&errors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Gate;
    use crate::cutter::{decompose_mcz, DecompositionTerm, LocalOperation};

    fn bell_cut() -> PartitionedCut {
        Circuit::with_gates(2, vec![Gate::h(0), Gate::h(1), Gate::cz(0, 1), Gate::h(1)])
            .with_split(1)
            .find_cut()
            .unwrap()
    }

    #[test]
    fn hoeffding_values() {
        assert_eq!(hoeffding_shots(0.1, 0.05, 1.0, 1).unwrap(), 738);
        assert_eq!(hoeffding_shots(0.1, 0.05, 6.0, 1).unwrap(), 26560);
        assert_eq!(
            hoeffding_shots(0.05, 0.05, 3.0, 2).unwrap(),
            hoeffding_shots(0.05, 0.05, 9.0, 1).unwrap()
        );
        assert!(hoeffding_shots(0.0, 0.05, 1.0, 1).is_err());
        assert!(hoeffding_shots(0.1, 1.0, 1.0, 1).is_err());
        assert!(hoeffding_shots(0.1, 0.05, 0.5, 1).is_err());
        assert!(hoeffding_shots(0.1, 0.05, 2.0, 0).is_err());
    }

    #[test]
    fn preestimation_values() {
        assert_eq!(preestimation_budget(0.01, 6.0).unwrap(), 1_440_000);
        assert_eq!(preestimation_budget(0.001, 6.0).unwrap(), 144_000_000);
        assert_eq!(preestimation_budget(2.0, 1.0).unwrap(), 1);
        assert!(preestimation_budget(0.0, 1.0).is_err());
    }

    fn uniform(terms: usize, a: f64) -> Decomposition {
        let t = DecompositionTerm {
            coefficient: a,
            op_a: LocalOperation::identity(1),
            op_b: LocalOperation::identity(1),
        };
        Decomposition::new(1, 1, vec![t; terms])
    }

    #[test]
    fn allocation_examples() {
        let d = uniform(6, 0.5);
        assert_eq!(d.kappa, 3.0);
        let alloc = allocate(&d, 600).unwrap();
        assert!(alloc.iter().all(|a| a.shots == 50));

        // |a| = 0.5 with κ = 6 (twelve equal terms): 0.5 · 1.44e6 / 12.
        let d = uniform(12, 0.5);
        let alloc = allocate(&d, 1_440_000).unwrap();
        assert!(alloc.iter().all(|a| a.shots == 60_000));

        assert!(matches!(allocate(&uniform(6, 0.5), 11), Err(SamplerError::BudgetTooSmall { .. })));
    }

    #[test]
    fn allocation_conserves_total() {
        let d = decompose_mcz(2, 3).unwrap();
        for n in [2 * d.len() as u64, 1001, 77_777, 1_440_000] {
            let alloc = allocate(&d, n).unwrap();
            assert_eq!(alloc.iter().map(|a| a.shots).sum::<u64>(), n / 2, "N = {n}");
            assert!(alloc.iter().all(|a| a.shots >= 1));
        }
    }

    #[test]
    fn bell_circuit_sampling() {
        let cut = bell_cut();
        let problem = CutProblem::new(&cut, decompose_mcz(1, 1).unwrap(), &Observable::ZString, false).unwrap();
        assert!((problem.exact_value() - 1.0).abs() < 1e-12);
        let budget = ShotBudget::hoeffding(0.05, 0.05, problem.kappa(), 1).unwrap();
        let rec = sample_circuit_mode(&problem, &budget, 11);
        assert!((rec.estimate - 1.0).abs() < 0.05, "{}", rec.estimate);
        assert!(rec.max_abs_shot.unwrap() <= problem.kappa());
        assert_eq!(rec.shots, budget.total);
    }

    #[test]
    fn fixed_seed_is_reproducible() {
        let cut = bell_cut();
        let problem = CutProblem::from_cut(&cut, &Observable::ZString).unwrap();
        let budget = ShotBudget::fixed(200_000, 0.05, problem.kappa());
        let a = sample_circuit_mode(&problem, &budget, 5).to_json();
        let b = sample_circuit_mode(&problem, &budget, 5).to_json();
        assert_eq!(a, b);
        let a = preestimation_mode(&problem, &budget, 5).unwrap().to_json();
        let b = preestimation_mode(&problem, &budget, 5).unwrap().to_json();
        assert_eq!(a, b);
    }

    #[test]
    fn unverified_decomposition_rejected() {
        let cut = bell_cut();
        let d = Decomposition::identity(1, 1);
        assert!(matches!(
            CutProblem::new(&cut, d.clone(), &Observable::ZString, false),
            Err(SamplerError::Unverified(_))
        ));
        assert!(CutProblem::new(&cut, d, &Observable::ZString, true).is_ok());
    }

    #[test]
    fn identity_term_reduces_to_plain_sampling() {
        // With the gate replaced by I ⊗ I the estimator samples the gate-free circuit.
        let cut = bell_cut();
        let problem = CutProblem::new(&cut, Decomposition::identity(1, 1), &Observable::ZString, true).unwrap();
        let mut plain = cut.circuit.clone();
        plain.gates.remove(cut.cut_gate_index);
        let state = densesim::run(&plain, &StateVector::zero(2)).unwrap();
        let exact = densesim::expval(&state, &Observable::ZString).unwrap();
        let n = 40_000;
        let rec = sample_circuit_mode(&problem, &ShotBudget::fixed(n, 0.01, 1.0), 3);
        let binomial_sd = ((1.0 - exact * exact) / n as f64).sqrt().max(1.0 / n as f64);
        assert!((rec.estimate - exact).abs() < 3.0 * binomial_sd + 1e-12);
        let pre = preestimation_mode(&problem, &ShotBudget::fixed(n, 0.01, 1.0), 3).unwrap();
        assert_eq!(pre.per_term.len(), 1);
        assert_eq!(pre.estimate, pre.per_term[0].mean_a * pre.per_term[0].mean_b);
    }

    #[test]
    fn flipped_signs_flip_contribution() {
        let cut = Circuit::with_gates(
            3,
            vec![Gate::h(0), Gate::ry(1, 0.4), Gate::h(2), Gate::mcz(vec![0, 1, 2]), Gate::rx(2, 0.9)],
        )
        .with_split(1)
        .find_cut()
        .unwrap();
        let problem = CutProblem::from_cut(&cut, &Observable::ZString).unwrap();
        let idx = problem
            .pairs
            .iter()
            .position(|p| p.b.has_measurement())
            .expect("signed projector term");
        let (_, dist) = problem.value_distributions(idx);
        for seed in [1u64, 2, 3] {
            let (m, _) = dist.sample_moments(10_000, &mut stream_rng(seed, 9));
            let (mf, _) = dist.negated().sample_moments(10_000, &mut stream_rng(seed, 9));
            assert_eq!(m, -mf);
        }
    }

    #[test]
    fn multinomial_counts_sum() {
        let dist = ValueDistribution {
            values: vec![1.0, -1.0, 0.0],
            probabilities: vec![0.2, 0.5, 0.3],
        };
        let counts = dist.draw_counts(10_000, &mut stream_rng(1, 0));
        assert_eq!(counts.iter().sum::<u64>(), 10_000);
        assert!((counts[1] as f64 / 10_000.0 - 0.5).abs() < 0.03);
    }

    #[test]
    fn uncut_sampling_matches_exact() {
        let c = Circuit::with_gates(2, vec![Gate::ry(0, 1.0), Gate::h(1)]);
        let r = sample_uncut(&c, &Observable::ZString, 100_000, 4).unwrap();
        assert!(r.estimate.abs() < 4.0 * r.std_dev.max(1e-3));
    }

    #[test]
    fn summary_statistics() {
        let s = empirical_variance_report(&[0.5; 10]).unwrap();
        assert_eq!(s.std_dev, 0.0);
        assert_eq!(s.q05, 0.5);
        assert!(matches!(
            empirical_variance_report(&[1.0]),
            Err(SamplerError::TooFewRecords { .. })
        ));
        let s = empirical_variance_report(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        assert_eq!(s.median, 3.0);
        assert_eq!(s.q25, 2.0);
        assert!((s.std_dev - 2.5f64.sqrt()).abs() < 1e-15);
    }
}
