//! Circuit and observable data model.
//!
//! Qubit 0 is the most significant bit of every basis-state index. A
//! bitstring restricted to a subset of qubits keeps the relative order of
//! those qubits, so the lowest-numbered qubit of the subset is again the
//! most significant bit.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Absolute tolerance used when comparing gate angles.
pub const ANGLE_TOLERANCE: f64 = 1e-12;

/// Version tag written into every circuit document.
pub const DOCUMENT_VERSION: u32 = 1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CircuitError {
    #[error("circuit must have at least one qubit")]
    NoQubits,
    #[error("gate {gate}: qubit index {qubit} out of range for {num_qubits} qubits")]
    QubitOutOfRange {
        gate: usize,
        qubit: usize,
        num_qubits: usize,
    },
    #[error("gate {gate}: duplicate qubit {qubit}")]
    DuplicateQubit { gate: usize, qubit: usize },
    #[error("gate {gate}: {kind} expects {expected} qubits, got {got}")]
    WrongArity {
        gate: usize,
        kind: GateKind,
        expected: &'static str,
        got: usize,
    },
    #[error("gate {gate}: {kind} requires an angle")]
    MissingAngle { gate: usize, kind: GateKind },
    #[error("gate {gate}: {kind} does not take an angle")]
    UnexpectedAngle { gate: usize, kind: GateKind },
    #[error("gate {gate}: angle {angle} is not a finite value in the allowed range")]
    BadAngle { gate: usize, angle: f64 },
    #[error("partition not covering: {got} labels for {num_qubits} qubits")]
    PartitionNotCovering { got: usize, num_qubits: usize },
    #[error("partition side {0} is empty")]
    EmptySide(Side),
    #[error("multiple cross-partition gates (gates {first} and {second})")]
    MultipleCrossGates { first: usize, second: usize },
    #[error("circuit has no partition assignment")]
    NoPartition,
    #[error("no cross-partition gate")]
    NoCrossGate,
    #[error("cross-partition gate {gate} is a {kind}, not an MCZ")]
    CrossGateNotMcz { gate: usize, kind: GateKind },
    #[error("malformed circuit document: {0}")]
    Malformed(String),
    #[error("unsupported document version {found}, expected {expected}")]
    VersionMismatch { found: u32, expected: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum GateKind {
    Rx,
    Ry,
    Rz,
    X,
    H,
    S,
    Sdg,
    Z,
    Cnot,
    Cz,
    Mcz,
    Mcp,
}

impl GateKind {
    pub fn takes_angle(self) -> bool {
        matches!(self, GateKind::Rx | GateKind::Ry | GateKind::Rz | GateKind::Mcp)
    }

    fn arity_ok(self, n: usize) -> Result<(), &'static str> {
        let (ok, expected) = match self {
            GateKind::Mcz | GateKind::Mcp => (n >= 2, ">= 2"),
            GateKind::Cz | GateKind::Cnot => (n == 2, "exactly 2"),
            _ => (n == 1, "exactly 1"),
        };
        if ok {
            Ok(())
        } else {
            Err(expected)
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GateKind::Rx => "RX",
            GateKind::Ry => "RY",
            GateKind::Rz => "RZ",
            GateKind::X => "X",
            GateKind::H => "H",
            GateKind::S => "S",
            GateKind::Sdg => "SDG",
            GateKind::Z => "Z",
            GateKind::Cnot => "CNOT",
            GateKind::Cz => "CZ",
            GateKind::Mcz => "MCZ",
            GateKind::Mcp => "MCP",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Gate {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angle: Option<f64>,
}

impl Gate {
    fn plain(kind: GateKind, qubits: Vec<usize>) -> Self {
        Gate {
            kind,
            qubits,
            angle: None,
        }
    }

    fn angled(kind: GateKind, qubits: Vec<usize>, angle: f64) -> Self {
        Gate {
            kind,
            qubits,
            angle: Some(angle),
        }
    }

    pub fn rx(q: usize, angle: f64) -> Self {
        Self::angled(GateKind::Rx, vec![q], angle)
    }
    pub fn ry(q: usize, angle: f64) -> Self {
        Self::angled(GateKind::Ry, vec![q], angle)
    }
    pub fn rz(q: usize, angle: f64) -> Self {
        Self::angled(GateKind::Rz, vec![q], angle)
    }
    pub fn x(q: usize) -> Self {
        Self::plain(GateKind::X, vec![q])
    }
    pub fn h(q: usize) -> Self {
        Self::plain(GateKind::H, vec![q])
    }
    pub fn s(q: usize) -> Self {
        Self::plain(GateKind::S, vec![q])
    }
    pub fn sdg(q: usize) -> Self {
        Self::plain(GateKind::Sdg, vec![q])
    }
    pub fn z(q: usize) -> Self {
        Self::plain(GateKind::Z, vec![q])
    }
    pub fn cnot(control: usize, target: usize) -> Self {
        Self::plain(GateKind::Cnot, vec![control, target])
    }
    pub fn cz(a: usize, b: usize) -> Self {
        Self::plain(GateKind::Cz, vec![a, b])
    }
    pub fn mcz(qubits: impl Into<Vec<usize>>) -> Self {
        Self::plain(GateKind::Mcz, qubits.into())
    }
    pub fn mcp(qubits: impl Into<Vec<usize>>, angle: f64) -> Self {
        Self::angled(GateKind::Mcp, qubits.into(), angle)
    }

    /// Copy of the gate with every qubit index passed through `map`.
    pub fn remapped(&self, map: impl Fn(usize) -> usize) -> Gate {
        Gate {
            kind: self.kind,
            qubits: self.qubits.iter().map(|&q| map(q)).collect(),
            angle: self.angle,
        }
    }

    /// Structural equality with angles compared at [`ANGLE_TOLERANCE`].
    pub fn approx_eq(&self, other: &Gate) -> bool {
        self.kind == other.kind
            && self.qubits == other.qubits
            && match (self.angle, other.angle) {
                (None, None) => true,
                (Some(a), Some(b)) => (a - b).abs() <= ANGLE_TOLERANCE,
                _ => false,
            }
    }

    fn check(&self, index: usize, num_qubits: usize) -> Result<(), CircuitError> {
        if let Err(expected) = self.kind.arity_ok(self.qubits.len()) {
            return Err(CircuitError::WrongArity {
                gate: index,
                kind: self.kind,
                expected,
                got: self.qubits.len(),
            });
        }
        for (i, &q) in self.qubits.iter().enumerate() {
            if q >= num_qubits {
                return Err(CircuitError::QubitOutOfRange {
                    gate: index,
                    qubit: q,
                    num_qubits,
                });
            }
            if self.qubits[..i].contains(&q) {
                return Err(CircuitError::DuplicateQubit {
                    gate: index,
                    qubit: q,
                });
            }
        }
        match (self.kind.takes_angle(), self.angle) {
            (true, None) => {
                return Err(CircuitError::MissingAngle {
                    gate: index,
                    kind: self.kind,
                })
            }
            (false, Some(_)) => {
                return Err(CircuitError::UnexpectedAngle {
                    gate: index,
                    kind: self.kind,
                })
            }
            (true, Some(angle)) => {
                let in_range = if self.kind == GateKind::Mcp {
                    angle > -PI && angle <= PI + ANGLE_TOLERANCE
                } else {
                    true
                };
                if !angle.is_finite() || !in_range {
                    return Err(CircuitError::BadAngle { gate: index, angle });
                }
            }
            (false, None) => {}
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::A => "A",
            Side::B => "B",
        })
    }
}

/// Ordered gate list over `num_qubits` qubits with an optional A/B partition.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub num_qubits: usize,
    pub gates: Vec<Gate>,
    pub partition: Option<Vec<Side>>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Circuit {
            num_qubits,
            gates: Vec::new(),
            partition: None,
        }
    }

    pub fn with_gates(num_qubits: usize, gates: Vec<Gate>) -> Self {
        Circuit {
            num_qubits,
            gates,
            partition: None,
        }
    }

    /// Partition where the first `k` qubits form side A and the rest side B.
    pub fn with_split(mut self, k: usize) -> Self {
        self.partition = Some(
            (0..self.num_qubits)
                .map(|q| if q < k { Side::A } else { Side::B })
                .collect(),
        );
        self
    }

    pub fn with_partition(mut self, partition: Vec<Side>) -> Self {
        self.partition = Some(partition);
        self
    }

    pub fn push(&mut self, gate: Gate) -> &mut Self {
        self.gates.push(gate);
        self
    }

    /// Qubits on `side` in increasing order.
    pub fn side_qubits(&self, side: Side) -> Vec<usize> {
        match &self.partition {
            Some(p) => (0..self.num_qubits).filter(|&q| p[q] == side).collect(),
            None => Vec::new(),
        }
    }

    fn crosses(partition: &[Side], gate: &Gate) -> bool {
        let first = partition[gate.qubits[0]];
        gate.qubits.iter().any(|&q| partition[q] != first)
    }

    /// Checks every structural invariant; the error names the first violation.
    pub fn validate(&self) -> Result<(), CircuitError> {
        if self.num_qubits == 0 {
            return Err(CircuitError::NoQubits);
        }
        for (i, g) in self.gates.iter().enumerate() {
            g.check(i, self.num_qubits)?;
        }
        if let Some(p) = &self.partition {
            if p.len() != self.num_qubits {
                return Err(CircuitError::PartitionNotCovering {
                    got: p.len(),
                    num_qubits: self.num_qubits,
                });
            }
            for side in [Side::A, Side::B] {
                if !p.contains(&side) {
                    return Err(CircuitError::EmptySide(side));
                }
            }
            let mut first_cross: Option<usize> = None;
            for (i, g) in self.gates.iter().enumerate() {
                if Self::crosses(p, g) {
                    if let Some(first) = first_cross {
                        return Err(CircuitError::MultipleCrossGates { first, second: i });
                    }
                    first_cross = Some(i);
                }
            }
        }
        Ok(())
    }

    /// Locates the unique cross-partition MCZ (or CZ).
    pub fn find_cut(&self) -> Result<PartitionedCut, CircuitError> {
        let partition = self.partition.as_ref().ok_or(CircuitError::NoPartition)?;
        self.validate()?;
        let (index, gate) = self
            .gates
            .iter()
            .enumerate()
            .find(|(_, g)| Self::crosses(partition, g))
            .ok_or(CircuitError::NoCrossGate)?;
        if !matches!(gate.kind, GateKind::Mcz | GateKind::Cz) {
            return Err(CircuitError::CrossGateNotMcz {
                gate: index,
                kind: gate.kind,
            });
        }
        let k = gate
            .qubits
            .iter()
            .filter(|&&q| partition[q] == Side::A)
            .count();
        let m = gate.qubits.len() - k;
        Ok(PartitionedCut {
            circuit: self.clone(),
            cut_gate_index: index,
            k,
            m,
        })
    }

    pub fn to_document(&self) -> CircuitDocument {
        CircuitDocument {
            version: DOCUMENT_VERSION,
            num_qubits: self.num_qubits,
            partition: self.partition.clone(),
            gates: self.gates.clone(),
        }
    }

    pub fn serialize(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("circuit documents always serialize")
    }

    pub fn parse(text: &str) -> Result<Circuit, CircuitError> {
        let doc: CircuitDocument =
            serde_json::from_str(text).map_err(|e| CircuitError::Malformed(e.to_string()))?;
        doc.into_circuit()
    }
}

/// On-disk circuit representation. Unknown fields are rejected.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitDocument {
    pub version: u32,
    pub num_qubits: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<Vec<Side>>,
    pub gates: Vec<Gate>,
}

impl CircuitDocument {
    pub fn into_circuit(self) -> Result<Circuit, CircuitError> {
        if self.version != DOCUMENT_VERSION {
            return Err(CircuitError::VersionMismatch {
                found: self.version,
                expected: DOCUMENT_VERSION,
            });
        }
        let circuit = Circuit {
            num_qubits: self.num_qubits,
            gates: self.gates,
            partition: self.partition,
        };
        circuit.validate()?;
        Ok(circuit)
    }
}

/// A partitioned circuit together with its single cross-partition MCZ.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionedCut {
    pub circuit: Circuit,
    pub cut_gate_index: usize,
    /// MCZ qubits on side A.
    pub k: usize,
    /// MCZ qubits on side B.
    pub m: usize,
}

impl PartitionedCut {
    pub fn cut_gate(&self) -> &Gate {
        &self.circuit.gates[self.cut_gate_index]
    }

    pub fn order(&self) -> usize {
        self.k + self.m
    }
}

/// Diagonal observable defined by a post-processing function on bitstrings.
#[derive(Debug, Clone, Default, PartialEq)]
pub enum Observable {
    /// Parity of the measured bits, i.e. Z on every qubit.
    #[default]
    ZString,
    /// Explicit table `f(s)` indexed by basis state.
    Table(Vec<f64>),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ObservableError {
    #[error("table has {got} entries, expected {expected}")]
    WrongLength { got: usize, expected: usize },
    #[error("|f(s)| exceeds 1 at s = {0}")]
    OutOfRange(usize),
    #[error("observable does not factorize over the partition")]
    NotFactorizing,
}


impl Observable {
    pub fn table(values: Vec<f64>) -> Result<Self, ObservableError> {
        if let Some(s) = values.iter().position(|v| !(v.abs() <= 1.0)) {
            return Err(ObservableError::OutOfRange(s));
        }
        Ok(Observable::Table(values))
    }

    /// `f(s)` for basis index `s` of an `n`-qubit register.
    pub fn value(&self, s: usize) -> f64 {
        match self {
            Observable::ZString => {
                if s.count_ones().is_multiple_of(2) {
                    1.0
                } else {
                    -1.0
                }
            }
            Observable::Table(t) => t[s],
        }
    }

    pub fn check_size(&self, num_qubits: usize) -> Result<(), ObservableError> {
        match self {
            Observable::ZString => Ok(()),
            Observable::Table(t) => {
                let expected = 1usize << num_qubits;
                if t.len() == expected {
                    Ok(())
                } else {
                    Err(ObservableError::WrongLength {
                        got: t.len(),
                        expected,
                    })
                }
            }
        }
    }

    /// Splits `f` into `(f_A, f_B)` with `f(s) = f_A(s_A) f_B(s_B)`.
    pub fn factorize(&self, partition: &[Side]) -> Result<(Observable, Observable), ObservableError> {
        let n = partition.len();
        self.check_size(n)?;
        let table = match self {
            Observable::ZString => return Ok((Observable::ZString, Observable::ZString)),
            Observable::Table(t) => t,
        };
        let a_qubits: Vec<usize> = (0..n).filter(|&q| partition[q] == Side::A).collect();
        let b_qubits: Vec<usize> = (0..n).filter(|&q| partition[q] == Side::B).collect();
        let join = |sa: usize, sb: usize| {
            let mut s = 0usize;
            for (i, &q) in a_qubits.iter().enumerate() {
                if sa >> (a_qubits.len() - 1 - i) & 1 == 1 {
                    s |= 1 << (n - 1 - q);
                }
            }
            for (i, &q) in b_qubits.iter().enumerate() {
                if sb >> (b_qubits.len() - 1 - i) & 1 == 1 {
                    s |= 1 << (n - 1 - q);
                }
            }
            s
        };
        let (na, nb) = (1usize << a_qubits.len(), 1usize << b_qubits.len());
        let pivot = (0..table.len())
            .max_by(|&x, &y| table[x].abs().total_cmp(&table[y].abs()))
            .expect("non-empty table");
        if table[pivot] == 0.0 {
            return Ok((
                Observable::Table(vec![0.0; na]),
                Observable::Table(vec![0.0; nb]),
            ));
        }
        let (mut pa, mut pb) = (0usize, 0usize);
        for sa in 0..na {
            for sb in 0..nb {
                if join(sa, sb) == pivot {
                    pa = sa;
                    pb = sb;
                }
            }
        }
        let fa: Vec<f64> = (0..na).map(|sa| table[join(sa, pb)]).collect();
        let fb: Vec<f64> = (0..nb).map(|sb| table[join(pa, sb)] / table[pivot]).collect();
        for sa in 0..na {
            for sb in 0..nb {
                if (fa[sa] * fb[sb] - table[join(sa, sb)]).abs() > 1e-12 {
                    return Err(ObservableError::NotFactorizing);
                }
            }
        }
        Ok((Observable::Table(fa), Observable::Table(fb)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ccz_circuit() -> Circuit {
        let mut c = Circuit::new(3).with_split(1);
        c.push(Gate::h(0))
            .push(Gate::ry(1, 0.3))
            .push(Gate::cnot(1, 2))
            .push(Gate::mcz(vec![0, 1, 2]))
            .push(Gate::rx(2, -1.25));
        c
    }

    #[test]
    fn validate_accepts_cz_example() {
        let c = Circuit::with_gates(2, vec![Gate::h(0), Gate::cz(0, 1)])
            .with_partition(vec![Side::A, Side::B]);
        assert_eq!(c.validate(), Ok(()));
    }

    #[test]
    fn validate_rejects_duplicate_qubit() {
        let c = Circuit::with_gates(2, vec![Gate::cnot(0, 0)]);
        let err = c.validate().unwrap_err();
        assert!(err.to_string().contains("duplicate qubit"), "{err}");
    }

    #[test]
    fn validate_rejects_short_partition() {
        let c = Circuit::with_gates(2, vec![Gate::h(0)]).with_partition(vec![Side::A]);
        let err = c.validate().unwrap_err();
        assert!(err.to_string().contains("partition not covering"), "{err}");
    }

    #[test]
    fn validate_rejects_out_of_range_and_arity() {
        let c = Circuit::with_gates(2, vec![Gate::h(2)]);
        assert!(matches!(c.validate(), Err(CircuitError::QubitOutOfRange { .. })));
        let c = Circuit::with_gates(2, vec![Gate::mcz(vec![0])]);
        assert!(matches!(c.validate(), Err(CircuitError::WrongArity { .. })));
        let c = Circuit::with_gates(2, vec![Gate::mcp(vec![0, 1], 4.0)]);
        assert!(matches!(c.validate(), Err(CircuitError::BadAngle { .. })));
        let c = Circuit::with_gates(2, vec![Gate::mcp(vec![0, 1], PI)]);
        assert_eq!(c.validate(), Ok(()));
    }

    #[test]
    fn validate_rejects_empty_side_and_multiple_cross_gates() {
        let c = Circuit::with_gates(2, vec![Gate::cz(0, 1)]).with_split(2);
        assert_eq!(c.validate(), Err(CircuitError::EmptySide(Side::B)));
        let c = Circuit::with_gates(3, vec![Gate::mcz(vec![0, 1, 2]), Gate::cz(0, 2)]).with_split(1);
        assert!(matches!(c.validate(), Err(CircuitError::MultipleCrossGates { .. })));
    }

    #[test]
    fn find_cut_five_qubit_three_two_split() {
        let c = Circuit::with_gates(5, vec![Gate::h(0), Gate::mcz(vec![0, 1, 2, 3, 4])]).with_split(3);
        let cut = c.find_cut().unwrap();
        assert_eq!((cut.k, cut.m, cut.cut_gate_index), (3, 2, 1));
    }

    #[test]
    fn find_cut_cz() {
        let c = Circuit::with_gates(2, vec![Gate::cnot(0, 1)]).with_split(1);
        assert!(matches!(c.find_cut(), Err(CircuitError::CrossGateNotMcz { .. })));
        let c = Circuit::with_gates(2, vec![Gate::cz(0, 1)]).with_split(1);
        assert_eq!(c.find_cut().unwrap().order(), 2);
        let c = Circuit::with_gates(2, vec![Gate::mcz(vec![0, 1])]).with_split(1);
        let cut = c.find_cut().unwrap();
        assert_eq!((cut.k, cut.m), (1, 1));
    }

    #[test]
    fn find_cut_errors() {
        let c = Circuit::with_gates(2, vec![Gate::h(0)]).with_split(1);
        assert_eq!(c.find_cut(), Err(CircuitError::NoCrossGate));
        let c = Circuit::with_gates(2, vec![Gate::mcz(vec![0, 1])]);
        assert_eq!(c.find_cut(), Err(CircuitError::NoPartition));
        let c = Circuit::with_gates(3, vec![Gate::mcz(vec![0, 1, 2]), Gate::mcz(vec![0, 2])]).with_split(1);
        assert!(c.find_cut().is_err());
    }

    #[test]
    fn document_round_trip() {
        let c = ccz_circuit();
        let text = c.serialize();
        assert_eq!(Circuit::parse(&text).unwrap(), c);
    }

    #[test]
    fn parse_rejects_bad_documents() {
        let unknown_kind = r#"{"version":1,"num_qubits":1,"gates":[{"kind":"XYZ","qubits":[0]}]}"#;
        assert!(matches!(Circuit::parse(unknown_kind), Err(CircuitError::Malformed(_))));
        let no_angle = r#"{"version":1,"num_qubits":2,"gates":[{"kind":"MCP","qubits":[0,1]}]}"#;
        assert!(matches!(Circuit::parse(no_angle), Err(CircuitError::MissingAngle { .. })));
        let version = r#"{"version":2,"num_qubits":1,"gates":[]}"#;
        assert!(matches!(Circuit::parse(version), Err(CircuitError::VersionMismatch { .. })));
        let extra = r#"{"version":1,"num_qubits":1,"gates":[],"extra":3}"#;
        assert!(matches!(Circuit::parse(extra), Err(CircuitError::Malformed(_))));
        let partition = r#"{"version":1,"num_qubits":2,"partition":["A","B"],"gates":[{"kind":"CZ","qubits":[0,1]}]}"#;
        assert!(Circuit::parse(partition).is_ok());
    }

    #[test]
    fn zstring_factorizes() {
        let p = vec![Side::A, Side::B, Side::B];
        let (a, b) = Observable::ZString.factorize(&p).unwrap();
        assert_eq!((a, b), (Observable::ZString, Observable::ZString));
    }

    #[test]
    fn table_factorization() {
        // f(s) = parity(s_0) * g(s_1 s_2) with qubit 1 on side A.
        let p = vec![Side::B, Side::A, Side::B];
        let g = [0.5, -0.25, 1.0, 0.0];
        let table: Vec<f64> = (0..8)
            .map(|s: usize| {
                let q0 = s >> 2 & 1;
                let q1 = s >> 1 & 1;
                let q2 = s & 1;
                let za = if q1 == 0 { 1.0 } else { -1.0 };
                za * g[q0 << 1 | q2]
            })
            .collect();
        let obs = Observable::table(table.clone()).unwrap();
        let (fa, fb) = obs.factorize(&p).unwrap();
        for s in 0..8usize {
            let sa = s >> 1 & 1;
            let sb = (s >> 2 & 1) << 1 | (s & 1);
            assert!((fa.value(sa) * fb.value(sb) - table[s]).abs() < 1e-12);
        }
        let mut broken = table;
        broken[0] = -0.9;
        assert_eq!(
            Observable::Table(broken).factorize(&p),
            Err(ObservableError::NotFactorizing)
        );
        assert!(Observable::table(vec![1.5, 0.0]).is_err());
    }
}
