//! Dense statevector and superoperator simulation.
//!
//! Gates are applied with in-place strided kernels. Full matrices only
//! appear in the superoperator routines, which double as the brute-force
//! oracle for checking decompositions.
//!
//! Density matrices are vectorized column-major (`vec(ρ)[c·d + r] = ρ[r, c]`),
//! so the channel `ρ ↦ UρU†` has matrix `conj(U) ⊗ U`.

use std::f64::consts::FRAC_1_SQRT_2;

use ndarray::Array2;
use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

use crate::circuit::{Circuit, Gate, GateKind};
use crate::cutter::{LocalOp, LocalOperation};

pub type C64 = Complex64;

/// Largest register the statevector backend accepts.
pub const MAX_STATE_QUBITS: usize = 20;
/// Largest register for which dense superoperators are built.
pub const MAX_SUPEROP_QUBITS: usize = 6;

const NORM_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("dimension mismatch: expected {expected} qubits, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("{0} qubits exceeds the dense simulation limit")]
    TooLarge(usize),
    #[error("state is not normalized (norm² = {0})")]
    NotNormalized(f64),
    #[error("amplitude vector length {0} is not a power of two")]
    BadLength(usize),
    #[error("outcome has zero probability")]
    ZeroProbability,
    #[error("matrix is not square with power-of-two dimension")]
    BadMatrix,
    #[error("matrix is not unitary (deviation {0:e})")]
    NotUnitary(f64),
    #[error("invalid circuit: {0}")]
    Circuit(#[from] crate::circuit::CircuitError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<C64>,
}

impl StateVector {
    /// `|0…0⟩` on `n` qubits.
    pub fn zero(n: usize) -> Self {
        Self::basis(n, 0)
    }

    pub fn basis(n: usize, index: usize) -> Self {
        assert!(n <= MAX_STATE_QUBITS, "register too large");
        let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
        amps[index] = C64::new(1.0, 0.0);
        StateVector { n, amps }
    }

    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self, SimError> {
        let len = amps.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(SimError::BadLength(len));
        }
        let n = len.trailing_zeros() as usize;
        if n > MAX_STATE_QUBITS {
            return Err(SimError::TooLarge(n));
        }
        Ok(StateVector { n, amps })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalize(&mut self) {
        let norm = self.norm_sqr().sqrt();
        if norm > 0.0 {
            for a in &mut self.amps {
                *a /= norm;
            }
        }
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    #[inline]
    fn stride(&self, q: usize) -> usize {
        1 << (self.n - 1 - q)
    }

    /// Applies a 2×2 matrix `[[m00, m01], [m10, m11]]` to qubit `q`.
    pub fn apply_single(&mut self, q: usize, m: [[C64; 2]; 2]) {
        let stride = self.stride(q);
        let len = self.amps.len();
        let mut base = 0;
        while base < len {
            for i in base..base + stride {
                let a0 = self.amps[i];
                let a1 = self.amps[i + stride];
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i + stride] = m[1][0] * a0 + m[1][1] * a1;
            }
            base += 2 * stride;
        }
    }

    pub fn apply_cnot(&mut self, control: usize, target: usize) {
        let cbit = self.stride(control);
        let tbit = self.stride(target);
        for i in 0..self.amps.len() {
            if i & cbit != 0 && i & tbit == 0 {
                self.amps.swap(i, i | tbit);
            }
        }
    }

    /// Multiplies every amplitude whose bits in `mask` are all set by `phase`.
    pub fn apply_controlled_phase(&mut self, mask: usize, phase: C64) {
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & mask == mask {
                *a *= phase;
            }
        }
    }

    /// Applies Z on every qubit whose bit is set in `mask`.
    pub fn apply_z_mask(&mut self, mask: usize) {
        for (i, a) in self.amps.iter_mut().enumerate() {
            if (i & mask).count_ones() % 2 == 1 {
                *a = -*a;
            }
        }
    }

    /// Basis-index mask with the bits of `qubits` set.
    pub fn mask_of(&self, qubits: &[usize]) -> usize {
        qubits.iter().fold(0, |m, &q| m | self.stride(q))
    }

    pub fn apply_gate(&mut self, gate: &Gate) {
        let q = &gate.qubits;
        let angle = gate.angle.unwrap_or(0.0);
        match gate.kind {
            GateKind::Rx => self.apply_single(q[0], rx_matrix(angle)),
            GateKind::Ry => self.apply_single(q[0], ry_matrix(angle)),
            GateKind::Rz => self.apply_single(q[0], rz_matrix(angle)),
            GateKind::X => {
                let o = C64::new(0.0, 0.0);
                let l = C64::new(1.0, 0.0);
                self.apply_single(q[0], [[o, l], [l, o]])
            }
            GateKind::H => {
                let h = C64::new(FRAC_1_SQRT_2, 0.0);
                self.apply_single(q[0], [[h, h], [h, -h]])
            }
            GateKind::S => self.apply_controlled_phase(self.mask_of(q), C64::i()),
            GateKind::Sdg => self.apply_controlled_phase(self.mask_of(q), -C64::i()),
            GateKind::Z | GateKind::Cz | GateKind::Mcz => {
                self.apply_controlled_phase(self.mask_of(q), C64::new(-1.0, 0.0))
            }
            GateKind::Cnot => self.apply_cnot(q[0], q[1]),
            GateKind::Mcp => self.apply_controlled_phase(self.mask_of(q), C64::from_polar(1.0, angle)),
        }
    }

    pub fn apply_gates<'a>(&mut self, gates: impl IntoIterator<Item = &'a Gate>) {
        for g in gates {
            self.apply_gate(g);
        }
    }

    /// Draws one basis index with probability `|⟨s|ψ⟩|²`.
    pub fn sample_bitstring<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random::<f64>() * self.norm_sqr();
        let mut acc = 0.0;
        for (i, a) in self.amps.iter().enumerate() {
            acc += a.norm_sqr();
            if u < acc {
                return i;
            }
        }
        // Rounding can leave u just above the final partial sum.
        self.amps
            .iter()
            .rposition(|a| a.norm_sqr() > 0.0)
            .unwrap_or(0)
    }

    /// Precomputed sampler for drawing many bitstrings from this state.
    pub fn sampler(&self) -> DiscreteSampler {
        DiscreteSampler::new(&self.probabilities())
    }

    /// Extracts the bits of `qubits` (first listed = most significant) from `index`.
    pub fn outcome_bits(&self, index: usize, qubits: &[usize]) -> usize {
        qubits
            .iter()
            .fold(0, |acc, &q| acc << 1 | (index >> (self.n - 1 - q) & 1))
    }

    /// Unnormalized `P_outcome |ψ⟩` for a computational-basis outcome on `qubits`.
    pub fn projected(&self, qubits: &[usize], outcome: usize) -> StateVector {
        let amps = self
            .amps
            .iter()
            .enumerate()
            .map(|(i, &a)| {
                if self.outcome_bits(i, qubits) == outcome {
                    a
                } else {
                    C64::new(0.0, 0.0)
                }
            })
            .collect();
        StateVector { n: self.n, amps }
    }

    /// Projects onto `outcome` and renormalizes; returns the outcome probability.
    pub fn project(&self, qubits: &[usize], outcome: usize) -> Result<(StateVector, f64), SimError> {
        let mut post = self.projected(qubits, outcome);
        let p = post.norm_sqr() / self.norm_sqr();
        if p <= 1e-300 {
            return Err(SimError::ZeroProbability);
        }
        post.normalize();
        Ok((post, p))
    }

    /// Samples a measurement of `qubits`, returning `(outcome, post-state, probability)`.
    pub fn measure<R: Rng + ?Sized>(&self, qubits: &[usize], rng: &mut R) -> (usize, StateVector, f64) {
        let outcomes = 1usize << qubits.len();
        let mut probs = vec![0.0; outcomes];
        for (i, a) in self.amps.iter().enumerate() {
            probs[self.outcome_bits(i, qubits)] += a.norm_sqr();
        }
        let outcome = DiscreteSampler::new(&probs).sample(rng);
        let (post, p) = self
            .project(qubits, outcome)
            .expect("sampled outcomes have positive probability");
        (outcome, post, p)
    }
}

/// Projects `state` onto `outcome` of `qubits`.
pub fn project(state: &StateVector, qubits: &[usize], outcome: usize) -> Result<(StateVector, f64), SimError> {
    state.project(qubits, outcome)
}

pub fn rx_matrix(theta: f64) -> [[C64; 2]; 2] {
    let c = C64::new((theta / 2.0).cos(), 0.0);
    let s = C64::new(0.0, -(theta / 2.0).sin());
    [[c, s], [s, c]]
}

pub fn ry_matrix(theta: f64) -> [[C64; 2]; 2] {
    let c = C64::new((theta / 2.0).cos(), 0.0);
    let s = C64::new((theta / 2.0).sin(), 0.0);
    [[c, -s], [s, c]]
}

pub fn rz_matrix(theta: f64) -> [[C64; 2]; 2] {
    let o = C64::new(0.0, 0.0);
    [[C64::from_polar(1.0, -theta / 2.0), o], [o, C64::from_polar(1.0, theta / 2.0)]]
}

/// Applies every gate of `circuit` to `initial`.
pub fn run(circuit: &Circuit, initial: &StateVector) -> Result<StateVector, SimError> {
    circuit.validate()?;
    if circuit.num_qubits != initial.n {
        return Err(SimError::DimensionMismatch {
            expected: circuit.num_qubits,
            got: initial.n,
        });
    }
    let norm = initial.norm_sqr();
    if (norm - 1.0).abs() > NORM_TOLERANCE {
        return Err(SimError::NotNormalized(norm));
    }
    let mut state = initial.clone();
    state.apply_gates(&circuit.gates);
    Ok(state)
}

/// `Σ_s |⟨s|ψ⟩|² f(s)`.
pub fn expval(state: &StateVector, obs: &crate::circuit::Observable) -> Result<f64, SimError> {
    obs.check_size(state.n).map_err(|_| SimError::DimensionMismatch {
        expected: state.n,
        got: 0,
    })?;
    Ok(state
        .amps
        .iter()
        .enumerate()
        .map(|(s, a)| a.norm_sqr() * obs.value(s))
        .sum())
}

/// Inverse-CDF sampler over a finite distribution.
#[derive(Debug, Clone)]
pub struct DiscreteSampler {
    cumulative: Vec<f64>,
}

impl DiscreteSampler {
    pub fn new(weights: &[f64]) -> Self {
        let mut acc = 0.0;
        let cumulative = weights
            .iter()
            .map(|w| {
                acc += w.max(0.0);
                acc
            })
            .collect();
        DiscreteSampler { cumulative }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let total = *self.cumulative.last().expect("non-empty distribution");
        let u = rng.random::<f64>() * total;
        let idx = self.cumulative.partition_point(|&c| c <= u);
        if idx < self.cumulative.len() {
            return idx;
        }
        // u landed on the top edge through rounding: take the last positive weight.
        let mut i = self.cumulative.len() - 1;
        while i > 0 && self.cumulative[i] == self.cumulative[i - 1] {
            i -= 1;
        }
        i
    }
}

/// Diagonal of `MCP(θ)` on `n` qubits: `diag(1, …, 1, e^{iθ})`.
pub fn mcp_diagonal(n: usize, theta: f64) -> Vec<C64> {
    let mut d = vec![C64::new(1.0, 0.0); 1 << n];
    let last = d.len() - 1;
    d[last] = C64::from_polar(1.0, theta);
    d
}

/// Diagonal of the MCZ gate on `n` qubits.
pub fn mcz_diagonal(n: usize) -> Vec<C64> {
    let mut d = vec![C64::new(1.0, 0.0); 1 << n];
    let last = d.len() - 1;
    d[last] = C64::new(-1.0, 0.0);
    d
}

/// Diagonal of `Z^{k₁} ⊗ … ⊗ Z^{kₙ}` where bit `n-1-i` of `mask` is `kᵢ`.
pub fn z_layer_diagonal(n: usize, mask: usize) -> Vec<C64> {
    (0..1usize << n)
        .map(|i| {
            if (i & mask).count_ones().is_multiple_of(2) {
                C64::new(1.0, 0.0)
            } else {
                C64::new(-1.0, 0.0)
            }
        })
        .collect()
}

/// Dense matrix of `gate` acting on an `n`-qubit register.
pub fn gate_matrix(gate: &Gate, n: usize) -> Array2<C64> {
    let dim = 1usize << n;
    let mut m = Array2::zeros((dim, dim));
    for col in 0..dim {
        let mut s = StateVector::basis(n, col);
        s.apply_gate(gate);
        for (row, a) in s.amps.iter().enumerate() {
            m[[row, col]] = *a;
        }
    }
    m
}

#[derive(Debug, Clone, PartialEq)]
enum SuperMatrix {
    Dense(Array2<C64>),
    /// Diagonal entries of a diagonal superoperator.
    Diagonal(Vec<C64>),
}

/// Matrix of a linear map on `n`-qubit density matrices (column-major vectorization).
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    n: usize,
    matrix: SuperMatrix,
}

impl Superoperator {
    pub fn zero_diagonal(n: usize) -> Self {
        Superoperator {
            n,
            matrix: SuperMatrix::Diagonal(vec![C64::new(0.0, 0.0); 1 << (2 * n)]),
        }
    }

    pub fn identity(n: usize) -> Self {
        Superoperator {
            n,
            matrix: SuperMatrix::Diagonal(vec![C64::new(1.0, 0.0); 1 << (2 * n)]),
        }
    }

    pub fn from_dense(n: usize, m: Array2<C64>) -> Self {
        assert_eq!(m.dim(), (1 << (2 * n), 1 << (2 * n)));
        Superoperator {
            n,
            matrix: SuperMatrix::Dense(m),
        }
    }

    /// Map `ρ ↦ L ρ R†` for diagonal `L = diag(l)` and `R = diag(r)`.
    pub fn from_diagonal_sandwich(n: usize, l: &[C64], r: &[C64]) -> Self {
        let d = 1usize << n;
        assert!(l.len() == d && r.len() == d);
        let mut diag = Vec::with_capacity(d * d);
        for c in 0..d {
            let rc = r[c].conj();
            for &lr in l {
                diag.push(rc * lr);
            }
        }
        Superoperator {
            n,
            matrix: SuperMatrix::Diagonal(diag),
        }
    }

    /// Channel `ρ ↦ DρD†` for a diagonal unitary `D = diag(d)`.
    pub fn from_diagonal_unitary(n: usize, d: &[C64]) -> Self {
        Self::from_diagonal_sandwich(n, d, d)
    }

    /// Map `ρ ↦ P_l ρ P_l` for the computational-basis projector `P_l`.
    pub fn basis_projector(n: usize, l: usize) -> Self {
        let mut p = vec![C64::new(0.0, 0.0); 1 << n];
        p[l] = C64::new(1.0, 0.0);
        Self::from_diagonal_sandwich(n, &p, &p)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << (2 * self.n)
    }

    pub fn is_diagonal(&self) -> bool {
        matches!(self.matrix, SuperMatrix::Diagonal(_))
    }

    /// Diagonal entries, when the map is stored diagonally.
    pub fn diagonal(&self) -> Option<&[C64]> {
        match &self.matrix {
            SuperMatrix::Diagonal(d) => Some(d),
            SuperMatrix::Dense(_) => None,
        }
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        match &self.matrix {
            SuperMatrix::Dense(m) => m[[row, col]],
            SuperMatrix::Diagonal(d) => {
                if row == col {
                    d[row]
                } else {
                    C64::new(0.0, 0.0)
                }
            }
        }
    }

    pub fn to_dense(&self) -> Array2<C64> {
        match &self.matrix {
            SuperMatrix::Dense(m) => m.clone(),
            SuperMatrix::Diagonal(d) => {
                let mut m = Array2::zeros((d.len(), d.len()));
                for (i, v) in d.iter().enumerate() {
                    m[[i, i]] = *v;
                }
                m
            }
        }
    }

    pub fn scale(&mut self, c: f64) {
        match &mut self.matrix {
            SuperMatrix::Dense(m) => m.mapv_inplace(|v| v * c),
            SuperMatrix::Diagonal(d) => d.iter_mut().for_each(|v| *v *= c),
        }
    }

    pub fn scaled(mut self, c: f64) -> Self {
        self.scale(c);
        self
    }

    /// `self += c · other`.
    pub fn add_scaled(&mut self, c: f64, other: &Superoperator) {
        assert_eq!(self.n, other.n, "superoperator size mismatch");
        match (&mut self.matrix, &other.matrix) {
            (SuperMatrix::Diagonal(a), SuperMatrix::Diagonal(b)) => {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y * c;
                }
            }
            (SuperMatrix::Dense(a), SuperMatrix::Dense(b)) => a.scaled_add(C64::new(c, 0.0), b),
            (SuperMatrix::Dense(a), SuperMatrix::Diagonal(b)) => {
                for (i, y) in b.iter().enumerate() {
                    a[[i, i]] += y * c;
                }
            }
            (SuperMatrix::Diagonal(_), SuperMatrix::Dense(b)) => {
                let mut a = self.to_dense();
                a.scaled_add(C64::new(c, 0.0), b);
                self.matrix = SuperMatrix::Dense(a);
            }
        }
    }

    /// Superoperator of the product map `self ⊗ other`, with the qubits of
    /// `self` preceding those of `other`.
    pub fn tensor(&self, other: &Superoperator) -> Superoperator {
        let (na, nb) = (self.n, other.n);
        let (da, db) = (1usize << na, 1usize << nb);
        let d = da * db;
        // Index of vec(ρ) entry (r, c) given its A and B parts.
        let split = |idx: usize| {
            let (r, c) = (idx % d, idx / d);
            let (ra, rb) = (r / db, r % db);
            let (ca, cb) = (c / db, c % db);
            (ca * da + ra, cb * db + rb)
        };
        let n = na + nb;
        match (&self.matrix, &other.matrix) {
            (SuperMatrix::Diagonal(a), SuperMatrix::Diagonal(b)) => {
                let diag = (0..d * d)
                    .map(|i| {
                        let (ia, ib) = split(i);
                        a[ia] * b[ib]
                    })
                    .collect();
                Superoperator {
                    n,
                    matrix: SuperMatrix::Diagonal(diag),
                }
            }
            _ => {
                assert!(n <= MAX_SUPEROP_QUBITS, "dense superoperator too large");
                let dim = d * d;
                let mut m = Array2::zeros((dim, dim));
                for i in 0..dim {
                    let (ia, ib) = split(i);
                    for j in 0..dim {
                        let (ja, jb) = split(j);
                        m[[i, j]] = self.entry(ia, ja) * other.entry(ib, jb);
                    }
                }
                Superoperator {
                    n,
                    matrix: SuperMatrix::Dense(m),
                }
            }
        }
    }

    /// Applies the map to the density matrix `rho`.
    pub fn apply(&self, rho: &Array2<C64>) -> Array2<C64> {
        let d = 1usize << self.n;
        assert_eq!(rho.dim(), (d, d));
        let vec_in: Vec<C64> = (0..d * d).map(|i| rho[[i % d, i / d]]).collect();
        let vec_out: Vec<C64> = match &self.matrix {
            SuperMatrix::Diagonal(diag) => diag.iter().zip(&vec_in).map(|(a, b)| a * b).collect(),
            SuperMatrix::Dense(m) => (0..d * d)
                .map(|i| (0..d * d).map(|j| m[[i, j]] * vec_in[j]).sum())
                .collect(),
        };
        Array2::from_shape_fn((d, d), |(r, c)| vec_out[c * d + r])
    }

    /// Frobenius norm of `self − other`.
    pub fn frobenius_distance(&self, other: &Superoperator) -> f64 {
        assert_eq!(self.n, other.n, "superoperator size mismatch");
        match (&self.matrix, &other.matrix) {
            (SuperMatrix::Diagonal(a), SuperMatrix::Diagonal(b)) => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y).norm_sqr())
                .sum::<f64>()
                .sqrt(),
            _ => {
                let dim = self.dim();
                let mut acc = 0.0;
                for i in 0..dim {
                    for j in 0..dim {
                        acc += (self.entry(i, j) - other.entry(i, j)).norm_sqr();
                    }
                }
                acc.sqrt()
            }
        }
    }

    /// Largest deviation of `tr(S(ρ))` from `tr(ρ)` over the matrix-unit basis.
    pub fn trace_preservation_error(&self) -> f64 {
        let d = 1usize << self.n;
        let mut worst: f64 = 0.0;
        for j in 0..d * d {
            let traced: C64 = (0..d).map(|c| self.entry(c * d + c, j)).sum();
            let expected = if j % d == j / d { 1.0 } else { 0.0 };
            worst = worst.max((traced - expected).norm());
        }
        worst
    }
}

/// Channel `ρ ↦ UρU†`. With `strict`, non-unitary input is rejected.
pub fn superop_of_unitary(u: &Array2<C64>, strict: bool) -> Result<Superoperator, SimError> {
    let (rows, cols) = u.dim();
    if rows != cols || !rows.is_power_of_two() {
        return Err(SimError::BadMatrix);
    }
    let n = rows.trailing_zeros() as usize;
    if strict {
        let dev = unitarity_deviation(u);
        if dev > NORM_TOLERANCE {
            return Err(SimError::NotUnitary(dev));
        }
    }
    let is_diag = u
        .indexed_iter()
        .all(|((r, c), v)| r == c || *v == C64::new(0.0, 0.0));
    if is_diag {
        let d: Vec<C64> = (0..rows).map(|i| u[[i, i]]).collect();
        return Ok(Superoperator::from_diagonal_unitary(n, &d));
    }
    if n > MAX_SUPEROP_QUBITS {
        return Err(SimError::TooLarge(n));
    }
    let dim = rows * rows;
    let mut m = Array2::zeros((dim, dim));
    // conj(U) ⊗ U: row (c, r), column (c', r').
    for c in 0..rows {
        for cp in 0..rows {
            let uc = u[[c, cp]].conj();
            if uc == C64::new(0.0, 0.0) {
                continue;
            }
            for r in 0..rows {
                for rp in 0..rows {
                    m[[c * rows + r, cp * rows + rp]] = uc * u[[r, rp]];
                }
            }
        }
    }
    Ok(Superoperator::from_dense(n, m))
}

fn unitarity_deviation(u: &Array2<C64>) -> f64 {
    let prod = u.t().mapv(|v| v.conj()).dot(u);
    prod.indexed_iter()
        .map(|((r, c), v)| {
            let target = if r == c { 1.0 } else { 0.0 };
            (v - target).norm()
        })
        .fold(0.0, f64::max)
}

/// Channel of the MCZ gate of the given order.
pub fn superop_of_mcz(order: usize) -> Superoperator {
    Superoperator::from_diagonal_unitary(order, &mcz_diagonal(order))
}

/// Superoperator of one local operation of a cut decomposition.
pub fn superop_of_local_operation(op: &LocalOperation) -> Superoperator {
    let n = op.num_qubits;
    match op.kind {
        LocalOp::Unitary(theta) => Superoperator::from_diagonal_unitary(n, &mcp_diagonal(n, theta.radians())),
        LocalOp::ZLayer(mask) => Superoperator::from_diagonal_unitary(n, &z_layer_diagonal(n, mask)),
        LocalOp::ZMix | LocalOp::ZMixNonIdentity => {
            let start = if op.kind == LocalOp::ZMix { 0 } else { 1 };
            let layers = (1usize << n) - start;
            let mut acc = Superoperator::zero_diagonal(n);
            for mask in start..1usize << n {
                let layer = Superoperator::from_diagonal_unitary(n, &z_layer_diagonal(n, mask));
                acc.add_scaled(1.0 / layers as f64, &layer);
            }
            acc
        }
        LocalOp::SignedProjector => {
            let d = 1usize << n;
            let mut acc = Superoperator::zero_diagonal(n);
            for l in 0..d {
                let sign = if l == d - 1 { -1.0 } else { 1.0 };
                acc.add_scaled(sign, &Superoperator::basis_projector(n, l));
            }
            acc
        }
        LocalOp::Projector => Superoperator::basis_projector(n, (1 << n) - 1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Observable;
    use crate::cutter::PhaseAngle;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_unitary(n: usize, rng: &mut ChaCha8Rng) -> Array2<C64> {
        // Product of random single-qubit rotations and CNOT layers.
        let mut gates = Vec::new();
        for _ in 0..4 {
            for q in 0..n {
                gates.push(Gate::rx(q, rng.random::<f64>() * 6.0));
                gates.push(Gate::rz(q, rng.random::<f64>() * 6.0));
            }
            for q in 1..n {
                gates.push(Gate::cnot(q - 1, q));
            }
        }
        let dim = 1 << n;
        let mut u = Array2::zeros((dim, dim));
        for col in 0..dim {
            let mut s = StateVector::basis(n, col);
            s.apply_gates(&gates);
            for (r, a) in s.amplitudes().iter().enumerate() {
                u[[r, col]] = *a;
            }
        }
        u
    }

    fn random_density(n: usize, rng: &mut ChaCha8Rng) -> Array2<C64> {
        let d = 1 << n;
        let a = Array2::from_shape_fn((d, d), |_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        let rho = a.dot(&a.t().mapv(|v| v.conj()));
        let tr: C64 = (0..d).map(|i| rho[[i, i]]).sum();
        rho.mapv(|v| v / tr)
    }

    fn max_diff(a: &Array2<C64>, b: &Array2<C64>) -> f64 {
        a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn hadamard_on_zero() {
        let c1 = Circuit::with_gates(1, vec![Gate::h(0)]);
        let out = run(&c1, &StateVector::zero(1)).unwrap();
        let h = FRAC_1_SQRT_2;
        assert!((out.amplitudes()[0] - c(h, 0.0)).norm() < 1e-15);
        assert!((out.amplitudes()[1] - c(h, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn bell_preparation() {
        let circ = Circuit::with_gates(2, vec![Gate::h(0), Gate::h(1), Gate::cz(0, 1), Gate::h(1)]);
        let out = run(&circ, &StateVector::zero(2)).unwrap();
        let h = FRAC_1_SQRT_2;
        let expected = [h, 0.0, 0.0, h];
        for (a, e) in out.amplitudes().iter().zip(expected) {
            assert!((a - c(e, 0.0)).norm() < 1e-15);
        }
        assert!((expval(&out, &Observable::ZString).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn mcz_flips_all_ones() {
        let circ = Circuit::with_gates(5, vec![Gate::mcz(vec![0, 1, 2, 3, 4])]);
        let out = run(&circ, &StateVector::basis(5, 31)).unwrap();
        assert_eq!(out.amplitudes()[31], c(-1.0, 0.0));
        let out = run(&circ, &StateVector::basis(5, 30)).unwrap();
        assert_eq!(out.amplitudes()[30], c(1.0, 0.0));
    }

    #[test]
    fn run_rejects_mismatch() {
        let circ = Circuit::with_gates(2, vec![Gate::h(0)]);
        assert!(matches!(
            run(&circ, &StateVector::zero(3)),
            Err(SimError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn expval_examples() {
        assert_eq!(expval(&StateVector::zero(3), &Observable::ZString).unwrap(), 1.0);
        let h = FRAC_1_SQRT_2;
        let s = StateVector::from_amplitudes(vec![c(h, 0.0), c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!(expval(&s, &Observable::ZString).unwrap().abs() < 1e-15);
    }

    #[test]
    fn sampling_basics() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = StateVector::basis(2, 0b10);
        for _ in 0..100 {
            assert_eq!(s.sample_bitstring(&mut rng), 0b10);
        }
        let plus = run(&Circuit::with_gates(1, vec![Gate::h(0)]), &StateVector::zero(1)).unwrap();
        let shots = 100_000;
        let ones = (0..shots).filter(|_| plus.sample_bitstring(&mut rng) == 1).count();
        assert!((ones as f64 / shots as f64 - 0.5).abs() < 0.01);

        let draw = |seed| {
            let mut r = ChaCha8Rng::seed_from_u64(seed);
            (0..50).map(|_| plus.sample_bitstring(&mut r)).collect::<Vec<_>>()
        };
        assert_eq!(draw(11), draw(11));
    }

    #[test]
    fn chi_square_three_qubits() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let u = random_unitary(3, &mut rng);
        let amps: Vec<C64> = (0..8).map(|r| u[[r, 0]]).collect();
        let s = StateVector::from_amplitudes(amps).unwrap();
        let probs = s.probabilities();
        let shots = 100_000;
        let mut counts = [0usize; 8];
        let sampler = s.sampler();
        for _ in 0..shots {
            counts[sampler.sample(&mut rng)] += 1;
        }
        let chi2: f64 = counts
            .iter()
            .zip(&probs)
            .map(|(&o, &p)| {
                let e = p * shots as f64;
                (o as f64 - e).powi(2) / e
            })
            .sum();
        // Upper 0.001 quantile of χ² with 7 degrees of freedom.
        assert!(chi2 < 24.322, "chi2 = {chi2}");
    }

    #[test]
    fn projection_examples() {
        let plus = run(&Circuit::with_gates(1, vec![Gate::h(0)]), &StateVector::zero(1)).unwrap();
        let (post, p) = project(&plus, &[0], 1).unwrap();
        assert!((p - 0.5).abs() < 1e-15);
        assert!((post.amplitudes()[1] - c(1.0, 0.0)).norm() < 1e-15);

        let h = FRAC_1_SQRT_2;
        let bell = StateVector::from_amplitudes(vec![c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)]).unwrap();
        let (post, p) = project(&bell, &[0], 0).unwrap();
        assert!((p - 0.5).abs() < 1e-15);
        assert!((post.amplitudes()[0] - c(1.0, 0.0)).norm() < 1e-15);

        assert_eq!(project(&StateVector::zero(1), &[0], 1), Err(SimError::ZeroProbability));
    }

    #[test]
    fn measurement_probabilities_complete() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u = random_unitary(3, &mut rng);
        let s = StateVector::from_amplitudes((0..8).map(|r| u[[r, 0]]).collect()).unwrap();
        let total: f64 = (0..4).map(|o| s.projected(&[2, 0], o).norm_sqr()).sum();
        assert!((total - 1.0).abs() < 1e-10);
        let (outcome, post, p) = s.measure(&[1], &mut rng);
        assert!(outcome < 2 && p > 0.0);
        assert!((post.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn superop_small_examples() {
        let id = Array2::from_diag(&ndarray::arr1(&[c(1.0, 0.0), c(1.0, 0.0)]));
        let s = superop_of_unitary(&id, true).unwrap();
        assert_eq!(s.to_dense(), Array2::from_diag(&ndarray::arr1(&[c(1.0, 0.0); 4])));

        let z = Array2::from_diag(&ndarray::arr1(&[c(1.0, 0.0), c(-1.0, 0.0)]));
        let s = superop_of_unitary(&z, true).unwrap();
        let expected = [1.0, -1.0, -1.0, 1.0];
        for (i, e) in expected.iter().enumerate() {
            assert_eq!(s.entry(i, i), c(*e, 0.0));
        }

        // CZ: conj(CZ) ⊗ CZ built by explicit Kronecker product.
        let cz = gate_matrix(&Gate::cz(0, 1), 2);
        let s = superop_of_unitary(&cz, true).unwrap();
        let mut kron = Array2::<C64>::zeros((16, 16));
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    for l in 0..4 {
                        kron[[i * 4 + k, j * 4 + l]] = cz[[i, j]].conj() * cz[[k, l]];
                    }
                }
            }
        }
        assert_eq!(s.to_dense(), kron);
        assert!(s.to_dense().iter().all(|v| v.im == 0.0 && (v.re == 0.0 || v.re.abs() == 1.0)));

        let bad = Array2::from_diag(&ndarray::arr1(&[c(2.0, 0.0), c(1.0, 0.0)]));
        assert!(matches!(superop_of_unitary(&bad, true), Err(SimError::NotUnitary(_))));
        assert!(superop_of_unitary(&bad, false).is_ok());
    }

    #[test]
    fn superop_matches_conjugation_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for trial in 0..100 {
            let n = 1 + trial % 3;
            let u = random_unitary(n, &mut rng);
            let rho = random_density(n, &mut rng);
            let s = superop_of_unitary(&u, true).unwrap();
            let direct = u.dot(&rho).dot(&u.t().mapv(|v| v.conj()));
            assert!(max_diff(&s.apply(&rho), &direct) < 1e-10);
            let out = s.apply(&rho);
            let tr: C64 = (0..1 << n).map(|i| out[[i, i]]).sum();
            assert!((tr - 1.0).norm() < 1e-10);
            assert!(max_diff(&out, &out.t().mapv(|v| v.conj())) < 1e-10);
        }
    }

    #[test]
    fn local_operation_superops() {
        let zmix = superop_of_local_operation(&LocalOperation::new(LocalOp::ZMix, 1));
        let expected = [1.0, 0.0, 0.0, 1.0];
        for (i, e) in expected.iter().enumerate() {
            assert!((zmix.entry(i, i) - c(*e, 0.0)).norm() < 1e-15);
        }
        let p1 = superop_of_local_operation(&LocalOperation::new(LocalOp::Projector, 1));
        let dense = p1.to_dense();
        for ((r, cc), v) in dense.indexed_iter() {
            let e = if r == 3 && cc == 3 { 1.0 } else { 0.0 };
            assert_eq!(*v, c(e, 0.0));
        }
        let s = superop_of_local_operation(&LocalOperation::new(LocalOp::Unitary(PhaseAngle::HalfPi), 1));
        assert!((s.entry(3, 3) - c(1.0, 0.0)).norm() < 1e-15);
        assert!((s.entry(1, 1) - c(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn projector_rewrite_identity_as_matrices() {
        for n in 1..=5 {
            let p1 = superop_of_local_operation(&LocalOperation::new(LocalOp::Projector, n));
            let mut rhs = superop_of_local_operation(&LocalOperation::new(LocalOp::ZMix, n));
            rhs.add_scaled(-1.0, &superop_of_local_operation(&LocalOperation::new(LocalOp::SignedProjector, n)));
            assert!(p1.scaled(2.0).frobenius_distance(&rhs) < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn projector_completeness_is_trace_preserving() {
        for n in 1..=3 {
            let mut acc = Superoperator::zero_diagonal(n);
            for l in 0..1 << n {
                acc.add_scaled(1.0, &Superoperator::basis_projector(n, l));
            }
            assert!(acc.trace_preservation_error() < 1e-10);
        }
    }

    #[test]
    fn tensor_matches_product_channel() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let ua = random_unitary(1, &mut rng);
        let ub = random_unitary(2, &mut rng);
        let sa = superop_of_unitary(&ua, true).unwrap();
        let sb = superop_of_unitary(&ub, true).unwrap();
        let mut full = Array2::<C64>::zeros((8, 8));
        for i in 0..8 {
            for j in 0..8 {
                full[[i, j]] = ua[[i / 4, j / 4]] * ub[[i % 4, j % 4]];
            }
        }
        let direct = superop_of_unitary(&full, true).unwrap();
        assert!(sa.tensor(&sb).frobenius_distance(&direct) < 1e-12);

        let da = superop_of_mcz(1);
        let db = superop_of_unitary(&gate_matrix(&Gate::s(1), 2), true).unwrap();
        let prod = da.tensor(&db);
        assert!(prod.is_diagonal());
        let direct = superop_of_unitary(&gate_matrix(&Gate::z(0), 3).dot(&gate_matrix(&Gate::s(2), 3)), true).unwrap();
        assert!(prod.frobenius_distance(&direct) < 1e-14);
    }
}
