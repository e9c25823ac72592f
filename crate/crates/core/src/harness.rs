//! Random benchmark circuits, the verification suite and sampling experiments.
//!
//! Everything the command-line tool does lives here so that examples and
//! tests can drive the same code paths.

use std::f64::consts::PI;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Circuit, CircuitError, Gate, Observable, PartitionedCut};
use crate::cutter::{self, CutError, Decomposition, VerificationReport, MAX_GENERATED_ORDER, MAX_REWRITE_QUBITS};
use crate::densesim::{self, SimError, StateVector, MAX_SUPEROP_QUBITS};
use crate::sampler::{
    self, derive_seed, stream_rng, CutProblem, EstimateRecord, ErrorSummary, Mode, SamplerError, ShotBudget,
};
use crate::zhcalc::{self, ZhError};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("no circuit reached impact {threshold} within {attempts} attempts")]
    ThresholdUnreachable { threshold: f64, attempts: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Cut(#[from] CutError),
    #[error(transparent)]
    Sampler(#[from] SamplerError),
    #[error(transparent)]
    Zh(#[from] ZhError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RandomCircuitSpec {
    pub rotations: usize,
    pub cnots: usize,
    /// Minimum `|⟨O⟩_with − ⟨O⟩_without|` for an accepted circuit.
    pub threshold: f64,
    pub max_attempts: usize,
}

impl Default for RandomCircuitSpec {
    fn default() -> Self {
        RandomCircuitSpec {
            rotations: 30,
            cnots: 10,
            threshold: 0.2,
            max_attempts: 1000,
        }
    }
}

/// Share of `total` given to a side holding `part` of `whole` qubits.
fn proportional(total: usize, part: usize, whole: usize) -> usize {
    if whole == 0 {
        0
    } else {
        ((total * part) as f64 / whole as f64).round() as usize
    }
}

fn side_gates<R: Rng + ?Sized>(qubits: &[usize], rotations: usize, cnots: usize, rng: &mut R) -> Vec<Gate> {
    let mut gates = Vec::with_capacity(rotations + cnots);
    for _ in 0..rotations {
        let q = qubits[rng.random_range(0..qubits.len())];
        let angle = rng.random_range(0.0..2.0 * PI);
        gates.push(match rng.random_range(0..3) {
            0 => Gate::rx(q, angle),
            1 => Gate::ry(q, angle),
            _ => Gate::rz(q, angle),
        });
    }
    for _ in 0..cnots {
        let c = rng.random_range(0..qubits.len());
        let mut t = rng.random_range(0..qubits.len() - 1);
        if t >= c {
            t += 1;
        }
        gates.push(Gate::cnot(qubits[c], qubits[t]));
    }
    gates.shuffle(rng);
    gates
}

/// Change of `⟨O⟩` caused by the central MCZ.
pub fn mcz_impact(circuit: &Circuit, cut_index: usize, obs: &Observable) -> Result<f64, SimError> {
    let zero = StateVector::zero(circuit.num_qubits);
    let with = densesim::expval(&densesim::run(circuit, &zero)?, obs)?;
    let mut without = circuit.clone();
    without.gates.remove(cut_index);
    let without = densesim::expval(&densesim::run(&without, &zero)?, obs)?;
    Ok((with - without).abs())
}

/// One unfiltered draw: local gates on each side, split around a central MCZ.
pub fn random_candidate<R: Rng + ?Sized>(spec: &RandomCircuitSpec, k: usize, m: usize, rng: &mut R) -> Circuit {
    let n = k + m;
    let qa: Vec<usize> = (0..k).collect();
    let qb: Vec<usize> = (k..n).collect();
    let rot_a = proportional(spec.rotations, k, n);
    let rot_b = spec.rotations - rot_a;
    let eligible_a = if k >= 2 { k } else { 0 };
    let eligible_b = if m >= 2 { m } else { 0 };
    let cnot_a = proportional(spec.cnots, eligible_a, eligible_a + eligible_b);
    let cnot_b = if eligible_a + eligible_b == 0 { 0 } else { spec.cnots - cnot_a };
    let ga = side_gates(&qa, rot_a, cnot_a, rng);
    let gb = side_gates(&qb, rot_b, cnot_b, rng);
    let (before_a, after_a) = ga.split_at(ga.len() / 2);
    let (before_b, after_b) = gb.split_at(gb.len() / 2);
    let mut gates: Vec<Gate> = before_a.iter().chain(before_b).cloned().collect();
    gates.push(Gate::mcz((0..n).collect::<Vec<_>>()));
    gates.extend(after_a.iter().chain(after_b).cloned());
    Circuit::with_gates(n, gates).with_split(k)
}

/// Random partitioned circuit whose central MCZ moves `⟨Z…Z⟩` by more than the threshold.
pub fn gen_random_circuit<R: Rng + ?Sized>(
    spec: &RandomCircuitSpec,
    k: usize,
    m: usize,
    rng: &mut R,
) -> Result<Circuit, HarnessError> {
    if k == 0 || m == 0 || k + m > MAX_SUPEROP_QUBITS {
        return Err(HarnessError::InvalidConfig(format!(
            "split ({k}, {m}) must have both sides non-empty and at most {MAX_SUPEROP_QUBITS} qubits"
        )));
    }
    for _ in 0..spec.max_attempts {
        let c = random_candidate(spec, k, m, rng);
        let cut_index = c.gates.iter().position(|g| g.qubits.len() == k + m).expect("central gate");
        if mcz_impact(&c, cut_index, &Observable::ZString)? > spec.threshold {
            return Ok(c);
        }
    }
    Err(HarnessError::ThresholdUnreachable {
        threshold: spec.threshold,
        attempts: spec.max_attempts,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
}

impl CheckResult {
    fn new(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        CheckResult {
            name: name.into(),
            residual,
            tolerance,
        }
    }

    pub fn passed(&self) -> bool {
        self.residual <= self.tolerance
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(CheckResult::passed)
    }

    pub fn find(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{:4}  {:<40} residual {:.3e} (tolerance {:.0e})",
                if c.passed() { "PASS" } else { "FAIL" },
                c.name,
                c.residual,
                c.tolerance
            )?;
        }
        let failed = self.checks.iter().filter(|c| !c.passed()).count();
        write!(f, "{} checks, {} failed", self.checks.len(), failed)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct VerifyOptions {
    /// Restrict order-dependent checks to these qubit counts.
    pub orders: Option<Vec<usize>>,
    /// Flip the sign of the leading term of every decomposition before checking.
    pub corrupt: bool,
}

impl VerifyOptions {
    fn wants(&self, n: usize) -> bool {
        self.orders.as_ref().is_none_or(|o| o.contains(&n))
    }
}

pub const THETA_GRID: [f64; 8] = [
    -0.75 * PI,
    -0.5 * PI,
    -0.25 * PI,
    0.0,
    0.25 * PI,
    0.5 * PI,
    0.75 * PI,
    PI,
];

pub const ZH_TOLERANCE: f64 = 1e-12;
pub const Q_TOLERANCE: f64 = 1e-14;
pub const MAX_ZH_QUBITS: usize = 8;
pub const MAX_FUSION_LEGS: usize = 10;

/// ZH identities: fusion, contraction with phase and difference vectors,
/// copy-spider diagonals, the MCZ diagram and the Q expansion.
pub fn zh_checks(options: &VerifyOptions) -> Result<Vec<CheckResult>, HarnessError> {
    let mut checks = Vec::new();
    for legs in 1..=MAX_FUSION_LEGS {
        if !options.wants(legs) {
            continue;
        }
        let worst = (0..=legs)
            .map(|m| zhcalc::check_fusion_rule(m, legs - m))
            .try_fold(0.0f64, |acc, r| r.map(|x| acc.max(x)))?;
        checks.push(CheckResult::new(format!("hbox fusion, {legs} legs"), worst, ZH_TOLERANCE));
    }
    let mut rng = stream_rng(0x5eed, 0);
    for n in 1..=MAX_ZH_QUBITS {
        if !options.wants(n) {
            continue;
        }
        let phase = THETA_GRID
            .iter()
            .map(|&t| zhcalc::phase_identity_residual(n, t))
            .try_fold(0.0f64, |acc, r| r.map(|x| acc.max(x)))?;
        checks.push(CheckResult::new(format!("phase vector into hbox, n = {n}"), phase, ZH_TOLERANCE));
        checks.push(CheckResult::new(
            format!("difference vector into hbox, n = {n}"),
            zhcalc::projector_identity_residual(n)?,
            ZH_TOLERANCE,
        ));
        let v: Vec<zhcalc::C64> = (0..1usize << n)
            .map(|_| zhcalc::C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        checks.push(CheckResult::new(
            format!("copy-spider diagonal, n = {n}"),
            zhcalc::check_diag_lemma(&v, n)?,
            ZH_TOLERANCE,
        ));
        checks.push(CheckResult::new(
            format!("mcz diagram, n = {n}"),
            zhcalc::check_mcz_representation(n)?,
            0.0,
        ));
    }
    let q = zhcalc::check_q_expansion()?;
    checks.push(CheckResult::new("q matrix", q.q_matrix, Q_TOLERANCE));
    checks.push(CheckResult::new("q pauli expansion", q.pauli, Q_TOLERANCE));
    checks.push(CheckResult::new("x substitution", q.x_substitution, Q_TOLERANCE));
    Ok(checks)
}

/// Projector rewrite and decomposition oracles for every split up to order six.
pub fn decomposition_checks(options: &VerifyOptions) -> Result<Vec<CheckResult>, HarnessError> {
    let mut checks = Vec::new();
    for n in 1..=MAX_REWRITE_QUBITS {
        if !options.wants(n) {
            continue;
        }
        let cert = cutter::rewrite_projector(n)?;
        checks.push(CheckResult::new(
            format!("projector rewrite, n = {n}"),
            cert.matrix_residual.max(cert.state_residual),
            ZH_TOLERANCE,
        ));
    }
    checks.push(CheckResult::new(
        "q rank-one expansion (exact)",
        cutter::decompose_q().reconstruction_residual(),
        0.0,
    ));
    let splits: Vec<(usize, usize)> = (2..=MAX_SUPEROP_QUBITS)
        .filter(|&order| options.wants(order))
        .flat_map(|order| (1..order).map(move |k| (k, order - k)))
        .collect();
    let reports: Vec<Result<VerificationReport, CutError>> = splits
        .iter()
        .map(|&(k, m)| {
            let mut d = cutter::decompose_mcz(k, m)?;
            if options.corrupt {
                d = d.with_flipped_coefficient(0);
            }
            cutter::verify(&d)
        })
        .collect();
    for ((k, m), report) in splits.iter().zip(reports) {
        let report = report?;
        checks.push(CheckResult::new(
            format!("mcz decomposition ({k}, {m})"),
            report.residual,
            cutter::VERIFY_TOLERANCE,
        ));
        checks.push(CheckResult::new(
            format!("hbox channel form ({k}, {m})"),
            report.channel_form_residual,
            cutter::VERIFY_TOLERANCE,
        ));
    }
    if options.wants(3) {
        let mut hand = cutter::decompose_ccz_handwritten();
        if options.corrupt {
            hand = hand.with_flipped_coefficient(0);
        }
        checks.push(CheckResult::new(
            "ccz hand form",
            cutter::verify(&hand)?.residual,
            cutter::VERIFY_TOLERANCE,
        ));
        let same = cutter::canonicalize(&hand) == cutter::decompose_mcz(1, 2)?;
        checks.push(CheckResult::new("ccz forms agree", if same { 0.0 } else { 1.0 }, 0.0));
    }
    Ok(checks)
}

/// Full verification suite.
pub fn cmd_verify(options: &VerifyOptions) -> Result<VerifyReport, HarnessError> {
    let mut checks = zh_checks(options)?;
    checks.extend(decomposition_checks(options)?);
    Ok(VerifyReport { checks })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecomposeOutput {
    pub decomposition: Decomposition,
    /// Present for orders the superoperator oracle can handle.
    pub verification: Option<VerificationReport>,
}

pub fn cmd_decompose(order: usize, k: usize) -> Result<DecomposeOutput, HarnessError> {
    if !(2..=MAX_GENERATED_ORDER).contains(&order) || k == 0 || k >= order {
        return Err(HarnessError::InvalidConfig(format!(
            "need 2 <= order <= {MAX_GENERATED_ORDER} and 1 <= cut < order, got order {order}, cut {k}"
        )));
    }
    let decomposition = cutter::decompose_mcz(k, order - k)?;
    let verification = if order <= MAX_SUPEROP_QUBITS {
        Some(cutter::verify(&decomposition)?)
    } else {
        None
    };
    Ok(DecomposeOutput {
        decomposition,
        verification,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KappaRow {
    pub label: String,
    pub k: usize,
    pub m: usize,
    pub kappa: f64,
}

/// κ for CZ, CCZ, one-qubit-removed splits of orders 3 to 6, and balanced splits up to order 6.
pub fn cmd_kappa_table() -> Result<Vec<KappaRow>, HarnessError> {
    let mut rows = Vec::new();
    let mut push = |label: String, k: usize, m: usize| -> Result<(), HarnessError> {
        rows.push(KappaRow {
            label,
            k,
            m,
            kappa: cutter::decompose_mcz(k, m)?.kappa,
        });
        Ok(())
    };
    push("CZ".into(), 1, 1)?;
    push("CCZ".into(), 1, 2)?;
    for order in 3..=MAX_SUPEROP_QUBITS {
        push(format!("one qubit removed, order {order}"), 1, order - 1)?;
    }
    for order in 4..=MAX_SUPEROP_QUBITS {
        for k in 2..=order / 2 {
            push(format!("general, order {order}"), k, order - k)?;
        }
    }
    Ok(rows)
}

pub fn format_kappa_table(rows: &[KappaRow]) -> String {
    let mut out = format!("{:<32} {:>3} {:>3} {:>10}\n", "gate", "k", "m", "kappa");
    for r in rows {
        out.push_str(&format!("{:<32} {:>3} {:>3} {:>10.6}\n", r.label, r.k, r.m, r.kappa));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleOutcome {
    pub exact: f64,
    pub kappa: f64,
    pub record: EstimateRecord,
}

/// Samples a partitioned circuit under either mode with the budget implied by `epsilon`.
pub fn cmd_sample(circuit: &Circuit, mode: Mode, epsilon: f64, seed: u64) -> Result<SampleOutcome, HarnessError> {
    let cut = circuit.find_cut()?;
    let obs = Observable::ZString;
    let problem = CutProblem::from_cut(&cut, &obs)?;
    let kappa = problem.kappa();
    let budget = match mode {
        Mode::CircuitSampling => ShotBudget::hoeffding(epsilon, sampler::DEFAULT_DELTA, kappa, 1)?,
        Mode::PreEstimation => ShotBudget::preestimation(epsilon, kappa)?,
    };
    let record = sampler::estimate(&problem, mode, &budget, seed)?;
    Ok(SampleOutcome {
        exact: cutter::uncut_expectation(&cut, &obs)?,
        kappa,
        record,
    })
}

fn default_kappa_budget() -> f64 {
    6.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub num_qubits: usize,
    /// MCZ qubits on side A; side B holds the rest.
    pub k: usize,
    pub epsilon: f64,
    pub mode: Mode,
    pub repetitions: usize,
    pub circuits_per_repetition: usize,
    pub seed: u64,
    /// Total shots per arm; defaults to `⌈4 κ_budget² / ε²⌉`.
    #[serde(default)]
    pub shots: Option<u64>,
    #[serde(default = "default_kappa_budget")]
    pub kappa_budget: f64,
    #[serde(default)]
    pub circuit: RandomCircuitSpec,
    /// Output directory; the command line can override it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: String| Err(HarnessError::InvalidConfig(msg));
        if self.k == 0 || self.k >= self.num_qubits {
            return bad(format!("k = {} must lie in 1..{}", self.k, self.num_qubits));
        }
        if self.num_qubits > MAX_SUPEROP_QUBITS {
            return bad(format!("at most {MAX_SUPEROP_QUBITS} qubits"));
        }
        if self.repetitions == 0 || self.circuits_per_repetition == 0 {
            return bad("repetitions and circuits_per_repetition must be positive".into());
        }
        if !(self.epsilon > 0.0) {
            return bad("epsilon must be positive".into());
        }
        Ok(())
    }

    pub fn total_shots(&self) -> Result<u64, HarnessError> {
        match self.shots {
            Some(n) => Ok(n),
            None => Ok(sampler::preestimation_budget(self.epsilon, self.kappa_budget)?),
        }
    }

    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        let config: ExperimentConfig = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub repetition: usize,
    pub circuit: usize,
    pub seed: u64,
    pub mode: Mode,
    pub shots: u64,
    pub kappa: f64,
    pub impact: f64,
    pub exact: f64,
    pub cut_estimate: f64,
    pub cut_error: f64,
    pub cut_std_dev: f64,
    pub uncut_estimate: f64,
    pub uncut_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub runs: usize,
    pub shots: u64,
    pub epsilon: f64,
    pub mode: Mode,
    pub cut: Option<ErrorSummary>,
    pub uncut: Option<ErrorSummary>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub runs: Vec<RunRecord>,
    pub summary: ExperimentSummary,
}

fn run_one(config: &ExperimentConfig, shots: u64, repetition: usize, circuit: usize) -> Result<RunRecord, HarnessError> {
    let index = (repetition * config.circuits_per_repetition + circuit) as u64;
    let seed = derive_seed(config.seed, index);
    let m = config.num_qubits - config.k;
    let c = gen_random_circuit(&config.circuit, config.k, m, &mut stream_rng(seed, 0))?;
    let cut: PartitionedCut = c.find_cut()?;
    let obs = Observable::ZString;
    let exact = cutter::uncut_expectation(&cut, &obs)?;
    let impact = mcz_impact(&c, cut.cut_gate_index, &obs)?;
    let uncut = sampler::sample_uncut(&c, &obs, shots, derive_seed(seed, 1))?;
    let problem = CutProblem::from_cut(&cut, &obs)?;
    let budget = ShotBudget::fixed(shots, config.epsilon, problem.kappa());
    let record = sampler::estimate(&problem, config.mode, &budget, derive_seed(seed, 2))?;
    Ok(RunRecord {
        repetition,
        circuit,
        seed,
        mode: config.mode,
        shots,
        kappa: problem.kappa(),
        impact,
        exact,
        cut_estimate: record.estimate,
        cut_error: record.estimate - exact,
        cut_std_dev: record.std_dev,
        uncut_estimate: uncut.estimate,
        uncut_error: uncut.estimate - exact,
    })
}

/// Runs every `(repetition, circuit)` pair in parallel; records come back in index order.
pub fn cmd_experiment(config: &ExperimentConfig) -> Result<ExperimentResult, HarnessError> {
    config.validate()?;
    let shots = config.total_shots()?;
    let jobs: Vec<(usize, usize)> = (0..config.repetitions)
        .flat_map(|r| (0..config.circuits_per_repetition).map(move |c| (r, c)))
        .collect();
    let runs = jobs
        .par_iter()
        .map(|&(r, c)| run_one(config, shots, r, c))
        .collect::<Result<Vec<_>, _>>()?;
    let errors = |f: fn(&RunRecord) -> f64| -> Vec<f64> { runs.iter().map(f).collect() };
    let summary = ExperimentSummary {
        runs: runs.len(),
        shots,
        epsilon: config.epsilon,
        mode: config.mode,
        cut: sampler::empirical_variance_report(&errors(|r| r.cut_error)).ok(),
        uncut: sampler::empirical_variance_report(&errors(|r| r.uncut_error)).ok(),
    };
    Ok(ExperimentResult {
        config: config.clone(),
        runs,
        summary,
    })
}

impl ExperimentResult {
    pub fn runs_csv(&self) -> Result<String, HarnessError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.runs {
            w.serialize(r)?;
        }
        let bytes = w.into_inner().map_err(|e| HarnessError::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn summary_json(&self) -> String {
        serde_json::to_string_pretty(&self.summary).expect("summaries always serialize")
    }

    /// Writes `runs.csv` and `summary.json` into `dir`, creating it if needed.
    pub fn write_to(&self, dir: &Path) -> Result<(), HarnessError> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("runs.csv"), self.runs_csv()?)?;
        fs::write(dir.join("summary.json"), self.summary_json() + "\n")?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_circuit_has_impact() {
        let spec = RandomCircuitSpec::default();
        let c = gen_random_circuit(&spec, 3, 2, &mut stream_rng(7, 0)).unwrap();
        let cut = c.find_cut().unwrap();
        assert_eq!((cut.k, cut.m), (3, 2));
        assert!(mcz_impact(&c, cut.cut_gate_index, &Observable::ZString).unwrap() > 0.2);
        let rotations = c.gates.iter().filter(|g| g.angle.is_some()).count();
        let cnots = c.gates.iter().filter(|g| g.qubits.len() == 2).count();
        assert_eq!((rotations, cnots), (30, 10));
    }

    #[test]
    fn ccz_circuit_puts_cnots_on_pair_side() {
        let c = gen_random_circuit(&RandomCircuitSpec::default(), 1, 2, &mut stream_rng(3, 0)).unwrap();
        assert_eq!(c.num_qubits, 3);
        assert!(c
            .gates
            .iter()
            .filter(|g| g.qubits.len() == 2)
            .all(|g| g.qubits.iter().all(|&q| q >= 1)));
        assert_eq!(c.find_cut().unwrap().order(), 3);
    }

    #[test]
    fn random_circuit_is_deterministic() {
        let spec = RandomCircuitSpec::default();
        let a = gen_random_circuit(&spec, 2, 2, &mut stream_rng(9, 0)).unwrap();
        let b = gen_random_circuit(&spec, 2, 2, &mut stream_rng(9, 0)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn impossible_threshold() {
        let spec = RandomCircuitSpec {
            threshold: 2.5,
            max_attempts: 20,
            ..Default::default()
        };
        assert!(matches!(
            gen_random_circuit(&spec, 1, 1, &mut stream_rng(1, 0)),
            Err(HarnessError::ThresholdUnreachable { attempts: 20, .. })
        ));
    }

    #[test]
    fn verify_cz_only() {
        let options = VerifyOptions {
            orders: Some(vec![2]),
            corrupt: false,
        };
        let report = cmd_verify(&options).unwrap();
        assert!(report.all_passed(), "{report}");
        assert!(report.find("mcz decomposition (1, 1)").is_some());
        assert!(report.find("mcz decomposition (1, 2)").is_none());
    }

    #[test]
    fn verify_detects_corruption() {
        let options = VerifyOptions {
            orders: Some(vec![2, 3]),
            corrupt: true,
        };
        let report = cmd_verify(&options).unwrap();
        assert!(!report.all_passed());
        assert!(!report.find("mcz decomposition (1, 1)").unwrap().passed());
    }

    #[test]
    fn decompose_limits() {
        assert_eq!(cmd_decompose(2, 1).unwrap().decomposition.kappa, 3.0);
        assert_eq!(cmd_decompose(3, 1).unwrap().decomposition.kappa, 4.5);
        let big = cmd_decompose(10, 5).unwrap();
        assert!(big.verification.is_none());
        assert!(big.decomposition.kappa < 6.0);
        assert!(cmd_decompose(13, 1).is_err());
        assert!(cmd_decompose(3, 3).is_err());
        assert!(cmd_decompose(3, 0).is_err());
    }

    #[test]
    fn kappa_table_rows() {
        let rows = cmd_kappa_table().unwrap();
        assert_eq!(rows[0].kappa, 3.0);
        assert_eq!(rows[1].kappa, 4.5);
        let general: Vec<&KappaRow> = rows.iter().filter(|r| r.label.starts_with("general")).collect();
        assert!(general.iter().all(|r| r.kappa < 6.0));
        assert!(general.iter().any(|r| (r.k, r.m) == (3, 3)));
        assert!(format_kappa_table(&rows).contains("CCZ"));
    }

    #[test]
    fn smoke_experiment() {
        let config = ExperimentConfig {
            num_qubits: 3,
            k: 1,
            epsilon: 0.05,
            mode: Mode::PreEstimation,
            repetitions: 1,
            circuits_per_repetition: 2,
            seed: 1,
            shots: Some(10_000),
            kappa_budget: 6.0,
            circuit: RandomCircuitSpec::default(),
            out: None,
        };
        let result = cmd_experiment(&config).unwrap();
        assert_eq!(result.runs.len(), 2);
        let csv = result.runs_csv().unwrap();
        assert_eq!(csv.lines().count(), 3);
        assert!(csv.starts_with("repetition,circuit,seed,mode"));
        assert_eq!(result.summary.cut.unwrap().count, 2);
        let again = cmd_experiment(&config).unwrap();
        assert_eq!(again.runs_csv().unwrap(), csv);
    }

    #[test]
    fn config_parsing() {
        let text = r#"{"num_qubits": 5, "k": 3, "epsilon": 0.01, "mode": "pre-estimation",
            "repetitions": 20, "circuits_per_repetition": 5, "seed": 42}"#;
        let config = ExperimentConfig::parse(text).unwrap();
        assert_eq!(config.total_shots().unwrap(), 1_440_000);
        assert_eq!(config.circuit, RandomCircuitSpec::default());
        assert!(ExperimentConfig::parse(&text.replace("\"k\": 3", "\"k\": 5")).is_err());
        assert!(ExperimentConfig::parse(&text.replace("\"seed\"", "\"sed\"")).is_err());
    }

    #[test]
    fn sample_command() {
        let c = Circuit::with_gates(2, vec![Gate::h(0), Gate::h(1), Gate::cz(0, 1), Gate::h(1)]).with_split(1);
        let out = cmd_sample(&c, Mode::CircuitSampling, 0.05, 1).unwrap();
        assert!((out.exact - 1.0).abs() < 1e-12);
        assert!((out.record.estimate - 1.0).abs() < 0.05);
    }
}
