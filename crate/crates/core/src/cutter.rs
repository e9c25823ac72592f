//! Quasi-probability decompositions of the MCZ channel across a bipartition.
//!
//! The decomposition is generated, not transcribed: the rank-one expansion
//! of the 4×4 matrix joining the two halves is contracted with H-boxes, the
//! basis projector is rewritten as a Z-mixture minus a signed projector,
//! and terms with equal local operations are merged. Every result can be
//! checked against the dense superoperator of the gate.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Circuit, CircuitError, Gate, Observable, PartitionedCut, Side};
use crate::densesim::{
    self, mcz_diagonal, superop_of_local_operation, superop_of_mcz, SimError, StateVector, Superoperator,
    MAX_SUPEROP_QUBITS,
};

/// Coefficients below this magnitude are dropped after merging.
pub const ZERO_TOLERANCE: f64 = 1e-14;
/// Frobenius residual under which a decomposition is accepted.
pub const VERIFY_TOLERANCE: f64 = 1e-10;
/// Largest order `decompose_mcz` will generate.
pub const MAX_GENERATED_ORDER: usize = 12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CutError {
    #[error("invalid partition sizes k = {k}, m = {m}")]
    InvalidSizes { k: usize, m: usize },
    #[error("order {order} exceeds the limit {max}")]
    TooLarge { order: usize, max: usize },
    #[error("decomposition is for (k, m) = ({dk}, {dm}) but the cut has ({ck}, {cm})")]
    OrderMismatch { dk: usize, dm: usize, ck: usize, cm: usize },
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

/// Phase of a multi-controlled phase gate appearing in a decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PhaseAngle {
    Zero,
    HalfPi,
    MinusHalfPi,
    Pi,
}

impl PhaseAngle {
    pub const ALL: [PhaseAngle; 4] = [PhaseAngle::MinusHalfPi, PhaseAngle::Zero, PhaseAngle::HalfPi, PhaseAngle::Pi];

    pub fn radians(self) -> f64 {
        match self {
            PhaseAngle::Zero => 0.0,
            PhaseAngle::HalfPi => FRAC_PI_2,
            PhaseAngle::MinusHalfPi => -FRAC_PI_2,
            PhaseAngle::Pi => PI,
        }
    }

    /// Sign attached to same-angle terms of the rank-one expansion.
    fn alpha(self) -> f64 {
        if self == PhaseAngle::Pi {
            -1.0
        } else {
            1.0
        }
    }
}

/// Kind of a local channel acting on one side's MCZ qubits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LocalOp {
    /// `MCP(θ)`: identity at θ = 0, MCZ at θ = π.
    Unitary(PhaseAngle),
    /// Product of Z gates on the qubits whose bit is set (qubit 0 is the MSB).
    ZLayer(usize),
    /// Uniform mixture over all `2^n` Z-layers.
    ZMix,
    /// Uniform mixture over the `2^n − 1` non-identity Z-layers.
    ZMixNonIdentity,
    /// `Σ_l ξ_l P_l ρ P_l` with `ξ = −1` only at the all-ones outcome.
    SignedProjector,
    /// `P_{1…1} ρ P_{1…1}`.
    Projector,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LocalOperation {
    pub kind: LocalOp,
    pub num_qubits: usize,
}

impl LocalOperation {
    pub fn new(kind: LocalOp, num_qubits: usize) -> Self {
        LocalOperation { kind, num_qubits }
    }

    pub fn identity(num_qubits: usize) -> Self {
        Self::new(LocalOp::Unitary(PhaseAngle::Zero), num_qubits)
    }

    /// Number of equally weighted unitaries this operation mixes, if it is a mixture.
    pub fn mixture_size(&self) -> Option<usize> {
        match self.kind {
            LocalOp::ZMix => Some(1 << self.num_qubits),
            LocalOp::ZMixNonIdentity => Some((1 << self.num_qubits) - 1),
            _ => None,
        }
    }

    pub fn is_measurement(&self) -> bool {
        matches!(self.kind, LocalOp::SignedProjector | LocalOp::Projector)
    }

    /// `(weight, atom)` pairs with the mixtures spelled out as Z-layers.
    fn atoms(&self) -> Vec<(f64, LocalOp)> {
        let n = self.num_qubits;
        let canon = |kind| canonical_atom(kind, n);
        match self.kind {
            LocalOp::ZMix => {
                let w = 1.0 / (1u64 << n) as f64;
                (0..1usize << n).map(|mask| (w, canon(LocalOp::ZLayer(mask)))).collect()
            }
            LocalOp::ZMixNonIdentity => {
                let w = 1.0 / ((1u64 << n) - 1) as f64;
                (1..1usize << n).map(|mask| (w, canon(LocalOp::ZLayer(mask)))).collect()
            }
            kind => vec![(1.0, canon(kind))],
        }
    }

    fn label(&self) -> String {
        let n = self.num_qubits;
        match self.kind {
            LocalOp::Unitary(PhaseAngle::Zero) => "I".into(),
            LocalOp::Unitary(PhaseAngle::Pi) if n == 1 => "Z".into(),
            LocalOp::Unitary(PhaseAngle::Pi) => "MCZ".into(),
            LocalOp::Unitary(PhaseAngle::HalfPi) if n == 1 => "S".into(),
            LocalOp::Unitary(PhaseAngle::HalfPi) => "MCS".into(),
            LocalOp::Unitary(PhaseAngle::MinusHalfPi) if n == 1 => "Sdg".into(),
            LocalOp::Unitary(PhaseAngle::MinusHalfPi) => "MCSdg".into(),
            LocalOp::ZLayer(mask) => (0..n)
                .map(|q| if mask >> (n - 1 - q) & 1 == 1 { 'Z' } else { 'I' })
                .collect(),
            LocalOp::ZMix => "Zmix".into(),
            LocalOp::ZMixNonIdentity => "Zmix'".into(),
            LocalOp::SignedProjector => "Psigned".into(),
            LocalOp::Projector => "P1".into(),
        }
    }
}

impl fmt::Display for LocalOperation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

fn canonical_atom(kind: LocalOp, n: usize) -> LocalOp {
    match kind {
        LocalOp::ZLayer(0) => LocalOp::Unitary(PhaseAngle::Zero),
        LocalOp::ZLayer(1) if n == 1 => LocalOp::Unitary(PhaseAngle::Pi),
        other => other,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecompositionTerm {
    pub coefficient: f64,
    pub op_a: LocalOperation,
    pub op_b: LocalOperation,
}

/// Weighted sum of product channels replacing one cut MCZ.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub k: usize,
    pub m: usize,
    pub terms: Vec<DecompositionTerm>,
    pub kappa: f64,
}

impl Decomposition {
    pub fn new(k: usize, m: usize, terms: Vec<DecompositionTerm>) -> Self {
        let kappa = terms.iter().map(|t| t.coefficient.abs()).sum();
        Decomposition { k, m, terms, kappa }
    }

    /// The trivial single-term list `1 · I ⊗ I`, which is not a valid MCZ decomposition.
    pub fn identity(k: usize, m: usize) -> Self {
        Self::new(
            k,
            m,
            vec![DecompositionTerm {
                coefficient: 1.0,
                op_a: LocalOperation::identity(k),
                op_b: LocalOperation::identity(m),
            }],
        )
    }

    pub fn order(&self) -> usize {
        self.k + self.m
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Copy with the sign of term `index` flipped.
    pub fn with_flipped_coefficient(&self, index: usize) -> Decomposition {
        let mut terms = self.terms.clone();
        terms[index].coefficient = -terms[index].coefficient;
        Decomposition::new(self.k, self.m, terms)
    }

    pub fn to_document(&self) -> DecompositionDocument {
        let op_doc = |op: &LocalOperation| {
            let (variant, theta, mask) = match op.kind {
                LocalOp::Unitary(a) => ("Unitary", Some(a.radians()), None),
                LocalOp::ZLayer(mask) => ("ZLayer", None, Some(mask)),
                LocalOp::ZMix => ("ZMix", None, None),
                LocalOp::ZMixNonIdentity => ("ZMixNonIdentity", None, None),
                LocalOp::SignedProjector => ("SignedProjector", None, None),
                LocalOp::Projector => ("Projector", None, None),
            };
            OperationDocument {
                variant: variant.to_string(),
                num_qubits: op.num_qubits,
                theta,
                mask,
                label: op.label(),
            }
        };
        DecompositionDocument {
            order: self.order(),
            k: self.k,
            m: self.m,
            kappa: self.kappa,
            terms: self
                .terms
                .iter()
                .map(|t| TermDocument {
                    coefficient: t.coefficient,
                    op_a: op_doc(&t.op_a),
                    op_b: op_doc(&t.op_b),
                })
                .collect(),
        }
    }
}

impl fmt::Display for Decomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "MCZ order {} split ({}, {}), kappa = {}", self.order(), self.k, self.m, self.kappa)?;
        for t in &self.terms {
            writeln!(f, "  {:+.10} {} ⊗ {}", t.coefficient, t.op_a, t.op_b)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperationDocument {
    pub variant: String,
    pub num_qubits: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mask: Option<usize>,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermDocument {
    pub coefficient: f64,
    #[serde(rename = "opA")]
    pub op_a: OperationDocument,
    #[serde(rename = "opB")]
    pub op_b: OperationDocument,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionDocument {
    pub order: usize,
    pub k: usize,
    pub m: usize,
    pub kappa: f64,
    pub terms: Vec<TermDocument>,
}

/// A 2-vector of the rank-one expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum QVector {
    /// One-leg X-spider with the given phase.
    Phase(PhaseAngle),
    /// `(1, −1)`.
    Difference,
}

pub type Gaussian2 = [[(i32, i32); 2]; 2];

impl QVector {
    /// `v v†` as exact Gaussian integers `(re, im)`.
    pub fn outer_exact(self) -> Gaussian2 {
        match self {
            QVector::Phase(PhaseAngle::Zero) => [[(2, 0), (0, 0)], [(0, 0), (0, 0)]],
            QVector::Phase(PhaseAngle::Pi) => [[(0, 0), (0, 0)], [(0, 0), (2, 0)]],
            QVector::Phase(PhaseAngle::HalfPi) => [[(1, 0), (0, 1)], [(0, -1), (1, 0)]],
            QVector::Phase(PhaseAngle::MinusHalfPi) => [[(1, 0), (0, -1)], [(0, 1), (1, 0)]],
            QVector::Difference => [[(1, 0), (-1, 0)], [(-1, 0), (1, 0)]],
        }
    }

    pub fn components(self) -> [crate::zhcalc::C64; 2] {
        match self {
            QVector::Phase(a) => crate::zhcalc::phase_vector(a.radians()),
            QVector::Difference => crate::zhcalc::projector_vector(),
        }
    }

    /// Channel produced by closing an H-box leg with this vector on both ket and bra,
    /// as `(scale, operation)`.
    fn contracted(self) -> (f64, LocalOp) {
        match self {
            // √2·MCP(θ) on each side of ρ.
            QVector::Phase(a) => (2.0, LocalOp::Unitary(a)),
            // 2·P₁…₁ on each side of ρ.
            QVector::Difference => (4.0, LocalOp::Projector),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QTerm {
    pub coefficient: f64,
    pub a: QVector,
    pub b: QVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QDecomposition {
    pub terms: Vec<QTerm>,
}

impl QDecomposition {
    /// `Σ c · (a a†) ⊗ (b b†)` in exact arithmetic, doubled to keep entries integral.
    pub fn reconstruct_doubled(&self) -> [[(i64, i64); 4]; 4] {
        let mut out = [[(0i64, 0i64); 4]; 4];
        for t in &self.terms {
            let c2 = (2.0 * t.coefficient).round() as i64;
            assert_eq!(c2 as f64, 2.0 * t.coefficient, "coefficients are half-integers");
            let (oa, ob) = (t.a.outer_exact(), t.b.outer_exact());
            for r in 0..4 {
                for c in 0..4 {
                    let (x, y) = oa[r / 2][c / 2];
                    let (u, v) = ob[r % 2][c % 2];
                    let (re, im) = (x as i64 * u as i64 - y as i64 * v as i64, x as i64 * v as i64 + y as i64 * u as i64);
                    out[r][c].0 += c2 * re;
                    out[r][c].1 += c2 * im;
                }
            }
        }
        out
    }

    /// Largest entrywise deviation from the ±1 matrix, in exact arithmetic.
    pub fn reconstruction_residual(&self) -> f64 {
        let target = crate::zhcalc::literal_q();
        let doubled = self.reconstruct_doubled();
        let mut worst: f64 = 0.0;
        for r in 0..4 {
            for c in 0..4 {
                let (re, im) = doubled[r][c];
                let dre = (re - 2 * target[r][c].re as i64) as f64 / 2.0;
                let dim = im as f64 / 2.0;
                worst = worst.max(dre.hypot(dim));
            }
        }
        worst
    }

    pub fn one_norm(&self) -> f64 {
        self.terms.iter().map(|t| t.coefficient.abs()).sum()
    }
}

/// Eight-term rank-one expansion of the ±1 matrix joining the two sides.
pub fn decompose_q() -> QDecomposition {
    let mut terms: Vec<QTerm> = PhaseAngle::ALL
        .iter()
        .map(|&a| QTerm {
            coefficient: 0.5 * a.alpha(),
            a: QVector::Phase(a),
            b: QVector::Phase(a),
        })
        .collect();
    for a in [PhaseAngle::Zero, PhaseAngle::Pi] {
        let c = -0.5 * a.alpha();
        terms.push(QTerm {
            coefficient: c,
            a: QVector::Phase(a),
            b: QVector::Difference,
        });
        terms.push(QTerm {
            coefficient: c,
            a: QVector::Difference,
            b: QVector::Phase(a),
        });
    }
    QDecomposition { terms }
}

fn check_sizes(k: usize, m: usize, max_order: usize) -> Result<(), CutError> {
    if k == 0 || m == 0 {
        return Err(CutError::InvalidSizes { k, m });
    }
    if k + m > max_order {
        return Err(CutError::TooLarge {
            order: k + m,
            max: max_order,
        });
    }
    Ok(())
}

/// Decomposition straight from the contracted expansion, before any rewriting (κ = 6).
pub fn decompose_mcz_contracted(k: usize, m: usize) -> Result<Decomposition, CutError> {
    check_sizes(k, m, MAX_GENERATED_ORDER)?;
    let terms = decompose_q()
        .terms
        .iter()
        .map(|t| {
            let (sa, oa) = t.a.contracted();
            let (sb, ob) = t.b.contracted();
            DecompositionTerm {
                // The channel carries an overall factor 1/4.
                coefficient: 0.25 * t.coefficient * sa * sb,
                op_a: LocalOperation::new(oa, k),
                op_b: LocalOperation::new(ob, m),
            }
        })
        .collect();
    Ok(Decomposition::new(k, m, terms))
}

/// Replaces each basis projector by `½ Z-mixture − ½ signed projector`, without merging.
pub fn decompose_mcz_rewritten(k: usize, m: usize) -> Result<Decomposition, CutError> {
    let contracted = decompose_mcz_contracted(k, m)?;
    let split = |op: LocalOperation| -> Vec<(f64, LocalOperation)> {
        if op.kind == LocalOp::Projector {
            vec![
                (0.5, LocalOperation::new(LocalOp::ZMix, op.num_qubits)),
                (-0.5, LocalOperation::new(LocalOp::SignedProjector, op.num_qubits)),
            ]
        } else {
            vec![(1.0, op)]
        }
    };
    let mut terms = Vec::new();
    for t in &contracted.terms {
        for (wa, op_a) in split(t.op_a) {
            for (wb, op_b) in split(t.op_b) {
                terms.push(DecompositionTerm {
                    coefficient: t.coefficient * wa * wb,
                    op_a,
                    op_b,
                });
            }
        }
    }
    Ok(Decomposition::new(k, m, terms))
}

/// The MCZ decomposition after projector rewriting and merging of equal terms.
pub fn decompose_mcz(k: usize, m: usize) -> Result<Decomposition, CutError> {
    let rewritten = decompose_mcz_rewritten(k, m)?;
    Ok(canonicalize(&rewritten))
}

type TermMap = BTreeMap<(LocalOp, LocalOp), f64>;

/// Expands mixtures, merges equal signatures, regroups uniform Z-layer blocks
/// into mixtures and sorts the result.
pub fn canonicalize(d: &Decomposition) -> Decomposition {
    let (k, m) = (d.k, d.m);
    let mut map = TermMap::new();
    for t in &d.terms {
        for (wa, a) in t.op_a.atoms() {
            for (wb, b) in t.op_b.atoms() {
                *map.entry((a, b)).or_insert(0.0) += t.coefficient * wa * wb;
            }
        }
    }
    map.retain(|_, c| c.abs() >= ZERO_TOLERANCE);
    let map = regroup(map, Side::B, m);
    let mut map = regroup(map, Side::A, k);
    map.retain(|_, c| c.abs() >= ZERO_TOLERANCE);

    let mut terms: Vec<DecompositionTerm> = map
        .into_iter()
        .map(|((a, b), coefficient)| DecompositionTerm {
            coefficient,
            op_a: LocalOperation::new(a, k),
            op_b: LocalOperation::new(b, m),
        })
        .collect();
    sort_terms(&mut terms);
    Decomposition::new(k, m, terms)
}

pub fn sort_terms(terms: &mut [DecompositionTerm]) {
    terms.sort_by(|x, y| {
        y.coefficient
            .abs()
            .total_cmp(&x.coefficient.abs())
            .then_with(|| x.op_a.cmp(&y.op_a))
            .then_with(|| x.op_b.cmp(&y.op_b))
            .then_with(|| x.coefficient.total_cmp(&y.coefficient))
    });
}

fn regroup(map: TermMap, side: Side, n: usize) -> TermMap {
    if n < 2 {
        return map;
    }
    let pick = |key: &(LocalOp, LocalOp)| match side {
        Side::A => (key.0, key.1),
        Side::B => (key.1, key.0),
    };
    let join = |own: LocalOp, other: LocalOp| match side {
        Side::A => (own, other),
        Side::B => (other, own),
    };
    let others: Vec<LocalOp> = {
        let mut v: Vec<LocalOp> = map.keys().map(|k| pick(k).1).collect();
        v.dedup();
        v.sort();
        v.dedup();
        v
    };
    let mut map = map;
    let layers = (1usize << n) - 1;
    for other in others {
        let first = match map.get(&join(LocalOp::ZLayer(1), other)) {
            Some(&c) => c,
            None => continue,
        };
        let uniform = (1..=layers).all(|mask| {
            map.get(&join(LocalOp::ZLayer(mask), other))
                .is_some_and(|&c| (c - first).abs() <= ZERO_TOLERANCE)
        });
        if !uniform {
            continue;
        }
        for mask in 1..=layers {
            map.remove(&join(LocalOp::ZLayer(mask), other));
        }
        let identity_key = join(LocalOp::Unitary(PhaseAngle::Zero), other);
        let absorbs_identity = map
            .get(&identity_key)
            .is_some_and(|&c| (c - first).abs() <= ZERO_TOLERANCE);
        let (kind, weight) = if absorbs_identity {
            map.remove(&identity_key);
            (LocalOp::ZMix, first * (layers + 1) as f64)
        } else {
            (LocalOp::ZMixNonIdentity, first * layers as f64)
        };
        *map.entry(join(kind, other)).or_insert(0.0) += weight;
    }
    map
}

/// The CCZ decomposition in its hand-written form, with the single qubit on side A.
pub fn decompose_ccz_handwritten() -> Decomposition {
    let one = |kind| LocalOperation::new(kind, 1);
    let two = |kind| LocalOperation::new(kind, 2);
    let u = LocalOp::Unitary;
    let term = |coefficient, op_a, op_b| DecompositionTerm {
        coefficient,
        op_a,
        op_b,
    };
    let mut terms = vec![
        term(0.5, one(u(PhaseAngle::HalfPi)), two(u(PhaseAngle::HalfPi))),
        term(0.5, one(u(PhaseAngle::MinusHalfPi)), two(u(PhaseAngle::MinusHalfPi))),
    ];
    for (j, angle) in [(0, PhaseAngle::Zero), (1, PhaseAngle::Pi)] {
        let sign = if j == 0 { 1.0 } else { -1.0 };
        terms.push(term(0.5 * sign, one(u(angle)), two(LocalOp::SignedProjector)));
        terms.push(term(0.5 * sign, one(LocalOp::SignedProjector), two(u(angle))));
        terms.push(term(0.25 * sign, one(u(angle)), two(u(PhaseAngle::Pi))));
        // −2 · ¼ {ZI + IZ + ZZ − II}
        for (w, layer) in [(1.0, 0b10), (1.0, 0b01), (1.0, 0b11), (-1.0, 0b00)] {
            terms.push(term(-0.5 * 0.25 * sign * w, one(u(angle)), two(LocalOp::ZLayer(layer))));
        }
    }
    Decomposition::new(1, 2, terms)
}

/// The CCZ decomposition, canonicalized.
pub fn decompose_ccz() -> Decomposition {
    canonicalize(&decompose_ccz_handwritten())
}

pub fn kappa(d: &Decomposition) -> f64 {
    d.terms.iter().map(|t| t.coefficient.abs()).sum()
}

/// Superoperator of `Σ a_i F_i^A ⊗ F_i^B`. Terms are built in parallel and summed in order.
pub fn decomposition_superop(d: &Decomposition) -> Result<Superoperator, CutError> {
    check_sizes(d.k, d.m, MAX_SUPEROP_QUBITS)?;
    let parts: Vec<Superoperator> = d
        .terms
        .par_iter()
        .map(|t| superop_of_local_operation(&t.op_a).tensor(&superop_of_local_operation(&t.op_b)))
        .collect();
    let mut acc = Superoperator::zero_diagonal(d.order());
    for (t, s) in d.terms.iter().zip(&parts) {
        acc.add_scaled(t.coefficient, s);
    }
    Ok(acc)
}

/// `¼ Σ Q_{(ab),(a′b′)} (D_a ⊗ D_b) ρ (D_a′ ⊗ D_b′)†` with `D_0 = I`, `D_1 = MCZ`.
pub fn channel_form_superop(k: usize, m: usize) -> Result<Superoperator, CutError> {
    check_sizes(k, m, MAX_SUPEROP_QUBITS)?;
    let (da, db) = (1usize << k, 1usize << m);
    let (za, zb) = (mcz_diagonal(k), mcz_diagonal(m));
    let local = |a: usize, b: usize| -> Vec<densesim::C64> {
        (0..da * db)
            .map(|idx| {
                let (ia, ib) = (idx / db, idx % db);
                let fa = if a == 1 { za[ia] } else { densesim::C64::new(1.0, 0.0) };
                let fb = if b == 1 { zb[ib] } else { densesim::C64::new(1.0, 0.0) };
                fa * fb
            })
            .collect()
    };
    let q = crate::zhcalc::literal_q();
    let mut acc = Superoperator::zero_diagonal(k + m);
    for row in 0..4 {
        let left = local(row >> 1, row & 1);
        for col in 0..4 {
            let right = local(col >> 1, col & 1);
            let s = Superoperator::from_diagonal_sandwich(k + m, &left, &right);
            acc.add_scaled(0.25 * q[row][col].re, &s);
        }
    }
    Ok(acc)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerificationReport {
    pub k: usize,
    pub m: usize,
    /// Frobenius distance between the decomposition and the MCZ channel.
    pub residual: f64,
    /// Frobenius distance between the H-box/Q channel form and the MCZ channel.
    pub channel_form_residual: f64,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.residual < VERIFY_TOLERANCE && self.channel_form_residual < VERIFY_TOLERANCE
    }
}

pub fn verify(d: &Decomposition) -> Result<VerificationReport, CutError> {
    let target = superop_of_mcz(d.order());
    let residual = decomposition_superop(d)?.frobenius_distance(&target);
    let channel_form_residual = channel_form_superop(d.k, d.m)?.frobenius_distance(&target);
    Ok(VerificationReport {
        k: d.k,
        m: d.m,
        residual,
        channel_form_residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectorRewriteCertificate {
    pub num_qubits: usize,
    /// Frobenius distance between `2·P₁…₁` and `Z-mixture − signed projector`.
    pub matrix_residual: f64,
    /// Largest entry difference of both sides applied to `|+…+⟩⟨+…+|`.
    pub state_residual: f64,
}

pub const MAX_REWRITE_QUBITS: usize = 5;

pub fn rewrite_projector(n: usize) -> Result<ProjectorRewriteCertificate, CutError> {
    if n == 0 {
        return Err(CutError::InvalidSizes { k: n, m: 0 });
    }
    if n > MAX_REWRITE_QUBITS {
        return Err(CutError::TooLarge {
            order: n,
            max: MAX_REWRITE_QUBITS,
        });
    }
    let op = |kind| superop_of_local_operation(&LocalOperation::new(kind, n));
    let lhs = op(LocalOp::Projector).scaled(2.0);
    let mut rhs = op(LocalOp::ZMix);
    rhs.add_scaled(-1.0, &op(LocalOp::SignedProjector));
    let matrix_residual = lhs.frobenius_distance(&rhs);

    let d = 1usize << n;
    let rho = ndarray::Array2::from_elem((d, d), densesim::C64::new(1.0 / d as f64, 0.0));
    let (l, r) = (lhs.apply(&rho), rhs.apply(&rho));
    let state_residual = l.iter().zip(r.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    Ok(ProjectorRewriteCertificate {
        num_qubits: n,
        matrix_residual,
        state_residual,
    })
}

/// What replaces the cut MCZ inside one subcircuit.
#[derive(Debug, Clone, PartialEq)]
pub enum Directive {
    /// Fixed diagonal gates.
    Gates(Vec<Gate>),
    /// Apply one uniformly drawn Z-layer on `targets`.
    ZMix { targets: Vec<usize>, include_identity: bool },
    /// Measure `targets` mid-circuit and continue on the projected state.
    /// With `signed`, the all-ones outcome carries weight −1; otherwise only
    /// the all-ones outcome carries weight 1 and the rest 0.
    Measure { targets: Vec<usize>, signed: bool },
}

/// One side of a circuit pair, over that side's qubits in increasing global order.
#[derive(Debug, Clone, PartialEq)]
pub struct SubcircuitPlan {
    pub num_qubits: usize,
    pub before: Vec<Gate>,
    pub directive: Directive,
    pub after: Vec<Gate>,
}

/// A possible execution path of a subcircuit: its probability, sign and final state.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub probability: f64,
    pub sign: f64,
    pub state: StateVector,
}

fn layer_gates(targets: &[usize], mask: usize) -> Vec<Gate> {
    let n = targets.len();
    targets
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> (n - 1 - i) & 1 == 1)
        .map(|(_, &q)| Gate::z(q))
        .collect()
}

fn unitary_gates(targets: &[usize], angle: PhaseAngle) -> Vec<Gate> {
    match (angle, targets.len()) {
        (PhaseAngle::Zero, _) => Vec::new(),
        (PhaseAngle::Pi, 1) => vec![Gate::z(targets[0])],
        (PhaseAngle::HalfPi, 1) => vec![Gate::s(targets[0])],
        (PhaseAngle::MinusHalfPi, 1) => vec![Gate::sdg(targets[0])],
        (PhaseAngle::Pi, _) => vec![Gate::mcz(targets.to_vec())],
        (a, _) => vec![Gate::mcp(targets.to_vec(), a.radians())],
    }
}

impl Directive {
    fn for_operation(op: &LocalOperation, targets: &[usize]) -> Directive {
        let targets = targets.to_vec();
        match op.kind {
            LocalOp::Unitary(a) => Directive::Gates(unitary_gates(&targets, a)),
            LocalOp::ZLayer(mask) => Directive::Gates(layer_gates(&targets, mask)),
            LocalOp::ZMix => Directive::ZMix {
                targets,
                include_identity: true,
            },
            LocalOp::ZMixNonIdentity => Directive::ZMix {
                targets,
                include_identity: false,
            },
            LocalOp::SignedProjector => Directive::Measure { targets, signed: true },
            LocalOp::Projector => Directive::Measure { targets, signed: false },
        }
    }
}

impl SubcircuitPlan {
    /// Plain circuit when the directive is a fixed gate list.
    pub fn as_circuit(&self) -> Option<Circuit> {
        match &self.directive {
            Directive::Gates(g) => {
                let gates = self.before.iter().chain(g).chain(&self.after).cloned().collect();
                Some(Circuit::with_gates(self.num_qubits, gates))
            }
            _ => None,
        }
    }

    pub fn has_measurement(&self) -> bool {
        matches!(self.directive, Directive::Measure { .. })
    }

    /// Every execution path with nonzero probability, in a fixed order.
    pub fn branches(&self) -> Vec<Branch> {
        let mut start = StateVector::zero(self.num_qubits);
        start.apply_gates(&self.before);
        let finish = |mut s: StateVector, probability: f64, sign: f64| {
            s.apply_gates(&self.after);
            Branch {
                probability,
                sign,
                state: s,
            }
        };
        match &self.directive {
            Directive::Gates(g) => {
                start.apply_gates(g);
                vec![finish(start, 1.0, 1.0)]
            }
            Directive::ZMix {
                targets,
                include_identity,
            } => {
                let first = if *include_identity { 0 } else { 1 };
                let count = (1usize << targets.len()) - first;
                (first..1usize << targets.len())
                    .map(|mask| {
                        let mut s = start.clone();
                        s.apply_gates(&layer_gates(targets, mask));
                        finish(s, 1.0 / count as f64, 1.0)
                    })
                    .collect()
            }
            Directive::Measure { targets, signed } => {
                let all_ones = (1usize << targets.len()) - 1;
                (0..=all_ones)
                    .filter_map(|outcome| {
                        let (s, p) = start.project(targets, outcome).ok()?;
                        let sign = match (*signed, outcome == all_ones) {
                            (true, true) => -1.0,
                            (true, false) => 1.0,
                            (false, true) => 1.0,
                            (false, false) => 0.0,
                        };
                        Some(finish(s, p, sign))
                    })
                    .collect()
            }
        }
    }

    /// Exact `tr(O F(ρ))` for this side's channel.
    pub fn exact_expectation(&self, obs: &Observable) -> Result<f64, SimError> {
        self.branches()
            .iter()
            .map(|b| Ok(b.probability * b.sign * densesim::expval(&b.state, obs)?))
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CircuitPair {
    pub coefficient: f64,
    pub a: SubcircuitPlan,
    pub b: SubcircuitPlan,
}

/// Replaces the cut MCZ by each term's local operations, producing one circuit pair per term.
pub fn embed(d: &Decomposition, cut: &PartitionedCut) -> Result<Vec<CircuitPair>, CutError> {
    if d.k != cut.k || d.m != cut.m {
        return Err(CutError::OrderMismatch {
            dk: d.k,
            dm: d.m,
            ck: cut.k,
            cm: cut.m,
        });
    }
    let circuit = &cut.circuit;
    let partition = circuit.partition.as_ref().ok_or(CircuitError::NoPartition)?;
    let qubits_a = circuit.side_qubits(Side::A);
    let qubits_b = circuit.side_qubits(Side::B);
    let local = |q: usize| -> usize {
        let side = if partition[q] == Side::A { &qubits_a } else { &qubits_b };
        side.iter().position(|&x| x == q).expect("qubit on its side")
    };
    let split = |gates: &[Gate], side: Side| -> Vec<Gate> {
        gates
            .iter()
            .filter(|g| partition[g.qubits[0]] == side)
            .map(|g| g.remapped(local))
            .collect()
    };
    let before = &circuit.gates[..cut.cut_gate_index];
    let after = &circuit.gates[cut.cut_gate_index + 1..];
    let cut_gate = cut.cut_gate();
    let mut targets_a: Vec<usize> = Vec::new();
    let mut targets_b: Vec<usize> = Vec::new();
    for &q in &cut_gate.qubits {
        match partition[q] {
            Side::A => targets_a.push(local(q)),
            Side::B => targets_b.push(local(q)),
        }
    }
    targets_a.sort_unstable();
    targets_b.sort_unstable();
    let (before_a, after_a) = (split(before, Side::A), split(after, Side::A));
    let (before_b, after_b) = (split(before, Side::B), split(after, Side::B));
    Ok(d.terms
        .iter()
        .map(|t| CircuitPair {
            coefficient: t.coefficient,
            a: SubcircuitPlan {
                num_qubits: qubits_a.len(),
                before: before_a.clone(),
                directive: Directive::for_operation(&t.op_a, &targets_a),
                after: after_a.clone(),
            },
            b: SubcircuitPlan {
                num_qubits: qubits_b.len(),
                before: before_b.clone(),
                directive: Directive::for_operation(&t.op_b, &targets_b),
                after: after_b.clone(),
            },
        })
        .collect())
}

/// Exact `Σ a_i ⟨O_A⟩_i ⟨O_B⟩_i` over the circuit pairs.
pub fn reconstruct_exact(pairs: &[CircuitPair], obs_a: &Observable, obs_b: &Observable) -> Result<f64, SimError> {
    pairs
        .iter()
        .map(|p| Ok(p.coefficient * p.a.exact_expectation(obs_a)? * p.b.exact_expectation(obs_b)?))
        .sum()
}

/// Exact expectation of the uncut circuit with the cut gate in place.
pub fn uncut_expectation(cut: &PartitionedCut, obs: &Observable) -> Result<f64, SimError> {
    let state = densesim::run(&cut.circuit, &StateVector::zero(cut.circuit.num_qubits))?;
    densesim::expval(&state, obs)
}

/// Builds the decomposition for a cut and checks the exact reconstruction.
pub fn reconstruction_residual(cut: &PartitionedCut, obs: &Observable) -> Result<f64, CutError> {
    let d = decompose_mcz(cut.k, cut.m)?;
    let partition = cut.circuit.partition.as_ref().ok_or(CircuitError::NoPartition)?;
    let (obs_a, obs_b) = obs
        .factorize(partition)
        .map_err(|e| CutError::Circuit(CircuitError::Malformed(e.to_string())))?;
    let pairs = embed(&d, cut)?;
    let rebuilt = reconstruct_exact(&pairs, &obs_a, &obs_b)?;
    Ok((rebuilt - uncut_expectation(cut, obs)?).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Closed forms worked out by hand from the merge of identity-like terms.
    fn expected_kappa(k: usize, m: usize) -> f64 {
        let (lo, hi) = (k.min(m), k.max(m));
        match (lo, hi) {
            (1, 1) => 3.0,
            (1, h) => 5.0 - 2f64.powi(1 - h as i32),
            (l, h) => 6.0 - 2f64.powi(-(l as i32)) - 2f64.powi(-(h as i32)),
        }
    }

    #[test]
    fn q_decomposition_is_exact() {
        let q = decompose_q();
        assert_eq!(q.terms.len(), 8);
        assert_eq!(q.reconstruction_residual(), 0.0);
        assert_eq!(q.one_norm(), 4.0);
    }

    #[test]
    fn exact_outer_products_match_vectors() {
        let vectors = PhaseAngle::ALL
            .iter()
            .map(|&a| QVector::Phase(a))
            .chain([QVector::Difference]);
        for v in vectors {
            let comps = v.components();
            let exact = v.outer_exact();
            for r in 0..2 {
                for c in 0..2 {
                    let got = comps[r] * comps[c].conj();
                    let (re, im) = exact[r][c];
                    assert!((got - densesim::C64::new(re as f64, im as f64)).norm() < 1e-14, "{v:?}");
                }
            }
        }
    }

    #[test]
    fn contracted_and_rewritten_forms_have_kappa_six() {
        for (k, m) in [(1, 1), (2, 3), (3, 3)] {
            let c = decompose_mcz_contracted(k, m).unwrap();
            assert_eq!(c.len(), 8);
            assert_eq!(c.kappa, 6.0);
            assert!(verify(&c).unwrap().passed());
            let r = decompose_mcz_rewritten(k, m).unwrap();
            assert_eq!(r.len(), 12);
            assert_eq!(r.kappa, 6.0);
            assert!(verify(&r).unwrap().passed());
        }
    }

    #[test]
    fn kappa_values() {
        assert_eq!(decompose_mcz(1, 1).unwrap().kappa, 3.0);
        assert_eq!(decompose_mcz(1, 2).unwrap().kappa, 4.5);
        assert_eq!(decompose_mcz(2, 1).unwrap().kappa, 4.5);
        assert_eq!(decompose_mcz(1, 4).unwrap().kappa, 4.875);
        assert_eq!(decompose_mcz(2, 2).unwrap().kappa, 5.5);
        assert_eq!(decompose_mcz(2, 3).unwrap().kappa, 5.625);
        assert_eq!(decompose_mcz(3, 3).unwrap().kappa, 5.75);
        for k in 1..=6 {
            for m in 1..=6 {
                let d = decompose_mcz(k, m).unwrap();
                assert_eq!(d.kappa, expected_kappa(k, m), "({k}, {m})");
                assert_eq!(d.kappa, kappa(&d));
                assert!(d.kappa < 6.0);
            }
        }
    }

    #[test]
    fn one_side_single_qubit_bounded_by_five() {
        for m in 1..=11 {
            let d = decompose_mcz(1, m).unwrap();
            assert!(d.kappa <= 5.0);
        }
        assert!(5.0 - decompose_mcz(1, 11).unwrap().kappa < 1e-2);
    }

    #[test]
    fn cz_terms() {
        let d = decompose_mcz(1, 1).unwrap();
        assert_eq!(d.len(), 6);
        assert!(d.terms.iter().all(|t| t.coefficient.abs() == 0.5));
    }

    #[test]
    fn invalid_sizes() {
        assert_eq!(decompose_mcz(0, 2), Err(CutError::InvalidSizes { k: 0, m: 2 }));
        assert!(matches!(decompose_mcz(7, 6), Err(CutError::TooLarge { .. })));
        let d = decompose_mcz(4, 3).unwrap();
        assert!(matches!(verify(&d), Err(CutError::TooLarge { .. })));
    }

    #[test]
    fn oracle_small_orders() {
        for (k, m) in [(1, 1), (1, 2), (2, 1), (3, 2)] {
            let report = verify(&decompose_mcz(k, m).unwrap()).unwrap();
            assert!(report.passed(), "{report:?}");
        }
    }

    #[test]
    fn corrupted_term_fails() {
        let d = decompose_mcz(2, 1).unwrap().with_flipped_coefficient(0);
        let report = verify(&d).unwrap();
        assert!(!report.passed());
        assert!(report.residual > 0.1);
    }

    #[test]
    fn ccz_forms_agree() {
        let hand = decompose_ccz_handwritten();
        assert!(verify(&hand).unwrap().passed());
        let ccz = decompose_ccz();
        assert_eq!(ccz.kappa, 4.5);
        assert_eq!(ccz, decompose_mcz(1, 2).unwrap());
        assert!(verify(&ccz).unwrap().residual < 1e-10);
    }

    #[test]
    fn structure_independent_of_split() {
        let signature = |k, m| {
            let mut v: Vec<(LocalOp, LocalOp)> = decompose_mcz(k, m)
                .unwrap()
                .terms
                .iter()
                .map(|t| (t.op_a.kind, t.op_b.kind))
                .collect();
            v.sort();
            v
        };
        let reference = signature(2, 2);
        for (k, m) in [(2, 3), (3, 2), (3, 3), (2, 4), (4, 2), (5, 5)] {
            assert_eq!(signature(k, m), reference, "({k}, {m})");
        }
    }

    #[test]
    fn projector_rewrite() {
        for n in 1..=MAX_REWRITE_QUBITS {
            let cert = rewrite_projector(n).unwrap();
            assert!(cert.matrix_residual < 1e-12);
            assert!(cert.state_residual < 1e-12);
        }
        assert!(rewrite_projector(6).is_err());
    }

    #[test]
    fn signed_projector_weights() {
        let plan = SubcircuitPlan {
            num_qubits: 2,
            before: vec![Gate::h(0), Gate::h(1)],
            directive: Directive::Measure {
                targets: vec![0, 1],
                signed: true,
            },
            after: vec![],
        };
        let branches = plan.branches();
        assert_eq!(branches.len(), 4);
        let total: f64 = branches.iter().map(|b| b.sign.abs()).sum();
        assert_eq!(total, 4.0);
        assert_eq!(branches.iter().filter(|b| b.sign < 0.0).count(), 1);
        assert_eq!(branches[3].sign, -1.0);
    }

    fn bell_cut() -> PartitionedCut {
        Circuit::with_gates(2, vec![Gate::h(0), Gate::h(1), Gate::cz(0, 1), Gate::h(1)])
            .with_split(1)
            .find_cut()
            .unwrap()
    }

    #[test]
    fn bell_embedding_reconstructs() {
        let cut = bell_cut();
        let d = decompose_mcz(1, 1).unwrap();
        let pairs = embed(&d, &cut).unwrap();
        assert_eq!(pairs.len(), 6);
        let norm: f64 = pairs.iter().map(|p| p.coefficient.abs()).sum();
        assert_eq!(norm, d.kappa);
        let value = reconstruct_exact(&pairs, &Observable::ZString, &Observable::ZString).unwrap();
        assert!((value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn projector_term_carries_measurement() {
        let cut = bell_cut();
        let d = Decomposition::new(
            1,
            1,
            vec![DecompositionTerm {
                coefficient: 1.0,
                op_a: LocalOperation::new(LocalOp::Projector, 1),
                op_b: LocalOperation::identity(1),
            }],
        );
        let pairs = embed(&d, &cut).unwrap();
        assert_eq!(
            pairs[0].a.directive,
            Directive::Measure {
                targets: vec![0],
                signed: false
            }
        );
        assert!(pairs[0].b.as_circuit().is_some());
    }

    #[test]
    fn embed_rejects_mismatch() {
        let d = decompose_mcz(1, 2).unwrap();
        assert!(matches!(embed(&d, &bell_cut()), Err(CutError::OrderMismatch { .. })));
    }

    #[test]
    fn document_roundtrip() {
        let doc = decompose_mcz(2, 3).unwrap().to_document();
        let text = serde_json::to_string(&doc).unwrap();
        assert!(text.contains("\"opA\""));
        let back: DecompositionDocument = serde_json::from_str(&text).unwrap();
        assert_eq!(back, doc);
        assert_eq!(doc.order, 5);
    }

    #[test]
    fn unitary_ops_are_diagonal_phases() {
        for a in PhaseAngle::ALL {
            for n in 1..=4 {
                let s = superop_of_local_operation(&LocalOperation::new(LocalOp::Unitary(a), n));
                let diag = s.diagonal().expect("diagonal");
                assert!(diag.iter().all(|v| (v.norm() - 1.0).abs() < 1e-15));
            }
        }
    }

    proptest! {
        #[test]
        fn oracle_holds_for_all_small_splits(k in 1usize..=5, m in 1usize..=5) {
            prop_assume!(k + m <= 6);
            let report = verify(&decompose_mcz(k, m).unwrap()).unwrap();
            prop_assert!(report.passed());
        }

        #[test]
        fn swapping_sides_preserves_kappa(k in 1usize..=6, m in 1usize..=6) {
            prop_assert_eq!(decompose_mcz(k, m).unwrap().kappa, decompose_mcz(m, k).unwrap().kappa);
        }
    }
}
