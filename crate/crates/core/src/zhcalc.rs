//! Dense ZH-calculus tensors and the numerical identity checks built on them.
//!
//! This is an oracle, not a rewriting engine: every diagram is contracted to
//! a dense tensor and compared entrywise. All wires have dimension 2.
//!
//! Tensor legs are ordered outputs first, then inputs, with leg 0 as the most
//! significant bit of the flat index. A tensor with `n` outputs and `m`
//! inputs therefore reads as a row-major `2^n × 2^m` matrix.

use std::f64::consts::SQRT_2;

use num_complex::Complex64;
use thiserror::Error;

pub type C64 = Complex64;

/// Largest node the dense builder accepts.
pub const MAX_NODE_LEGS: usize = 12;
/// Largest tensor (open wires or intermediate) a contraction may produce.
pub const MAX_CONTRACTION_LEGS: usize = 18;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ZhError {
    #[error("tensor with {0} legs exceeds the dense limit")]
    TooLarge(usize),
    #[error("node needs at least one leg")]
    NoLegs,
    #[error("port {0} is connected {1} times")]
    PortUse(String, usize),
    #[error("unknown node {0}")]
    UnknownNode(usize),
    #[error("contraction order must be a permutation of the node indices")]
    BadOrder,
    #[error("diagram contains non-spider tensors and cannot be mirrored")]
    NotMirrorable,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NodeKind {
    ZSpider { phase: f64 },
    XSpider { phase: f64 },
    HBox,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub kind: NodeKind,
    pub inputs: usize,
    pub outputs: usize,
}

impl Node {
    pub fn z(inputs: usize, outputs: usize, phase: f64) -> Self {
        Node {
            kind: NodeKind::ZSpider { phase },
            inputs,
            outputs,
        }
    }

    pub fn x(inputs: usize, outputs: usize, phase: f64) -> Self {
        Node {
            kind: NodeKind::XSpider { phase },
            inputs,
            outputs,
        }
    }

    pub fn h(inputs: usize, outputs: usize) -> Self {
        Node {
            kind: NodeKind::HBox,
            inputs,
            outputs,
        }
    }

    pub fn legs(&self) -> usize {
        self.inputs + self.outputs
    }

    /// Same node with inputs and outputs swapped and the phase negated.
    pub fn mirrored(&self) -> Node {
        let kind = match self.kind {
            NodeKind::ZSpider { phase } => NodeKind::ZSpider { phase: -phase },
            NodeKind::XSpider { phase } => NodeKind::XSpider { phase: -phase },
            NodeKind::HBox => NodeKind::HBox,
        };
        Node {
            kind,
            inputs: self.outputs,
            outputs: self.inputs,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor {
    legs: usize,
    data: Vec<C64>,
}

impl DenseTensor {
    pub fn new(legs: usize, data: Vec<C64>) -> Self {
        assert_eq!(data.len(), 1 << legs, "tensor data length must be 2^legs");
        DenseTensor { legs, data }
    }

    pub fn scalar(v: C64) -> Self {
        DenseTensor { legs: 0, data: vec![v] }
    }

    pub fn vector(v: &[C64]) -> Self {
        assert!(v.len().is_power_of_two());
        DenseTensor {
            legs: v.len().trailing_zeros() as usize,
            data: v.to_vec(),
        }
    }

    pub fn legs(&self) -> usize {
        self.legs
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn get(&self, index: usize) -> C64 {
        self.data[index]
    }

    pub fn scaled(&self, c: C64) -> DenseTensor {
        DenseTensor {
            legs: self.legs,
            data: self.data.iter().map(|v| v * c).collect(),
        }
    }

    /// Largest entrywise absolute difference.
    pub fn max_abs_diff(&self, other: &DenseTensor) -> f64 {
        assert_eq!(self.legs, other.legs, "tensor shape mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Reorders legs so that new leg `i` is old leg `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> DenseTensor {
        assert_eq!(perm.len(), self.legs);
        let l = self.legs;
        let data = (0..self.data.len())
            .map(|new_idx| {
                let mut old_idx = 0usize;
                for (i, &p) in perm.iter().enumerate() {
                    let bit = new_idx >> (l - 1 - i) & 1;
                    old_idx |= bit << (l - 1 - p);
                }
                self.data[old_idx]
            })
            .collect();
        DenseTensor { legs: l, data }
    }

    /// Entry of the tensor read as a `2^outputs × 2^(legs-outputs)` matrix.
    pub fn matrix_entry(&self, outputs: usize, row: usize, col: usize) -> C64 {
        self.data[row << (self.legs - outputs) | col]
    }
}

/// Dense tensor of a spider or H-box.
pub fn tensor_of(node: &Node) -> Result<DenseTensor, ZhError> {
    let legs = node.legs();
    if legs == 0 {
        return Err(ZhError::NoLegs);
    }
    if legs > MAX_NODE_LEGS {
        return Err(ZhError::TooLarge(legs));
    }
    let size = 1usize << legs;
    let all_ones = size - 1;
    let data = (0..size)
        .map(|idx| match node.kind {
            NodeKind::ZSpider { phase } => {
                if idx == 0 {
                    C64::new(1.0, 0.0)
                } else if idx == all_ones {
                    C64::from_polar(1.0, phase)
                } else {
                    C64::new(0.0, 0.0)
                }
            }
            NodeKind::XSpider { phase } => {
                // ⟨j|+…+⟩⟨+…+|i⟩ + e^{iα} ⟨j|−…−⟩⟨−…−|i⟩
                let sign = if idx.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                let scale = 0.5f64.powf(legs as f64 / 2.0);
                (C64::new(1.0, 0.0) + C64::from_polar(sign, phase)) * scale
            }
            NodeKind::HBox => {
                if idx == all_ones {
                    C64::new(-1.0, 0.0)
                } else {
                    C64::new(1.0, 0.0)
                }
            }
        })
        .collect();
    Ok(DenseTensor { legs, data })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Port {
    Out(usize),
    In(usize),
}

/// One end of a wire: a node port or an open boundary position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum End {
    Node(usize, Port),
    Output(usize),
    Input(usize),
}

#[derive(Debug, Clone)]
struct DiagramNode {
    tensor: DenseTensor,
    outputs: usize,
    spec: Option<Node>,
}

/// A tensor network of nodes joined by wires, with ordered open boundaries.
#[derive(Debug, Clone)]
pub struct Diagram {
    nodes: Vec<DiagramNode>,
    wires: Vec<(End, End)>,
    inputs: usize,
    outputs: usize,
}

#[derive(Debug, Clone)]
struct Labeled {
    labels: Vec<usize>,
    data: Vec<C64>,
}

impl Diagram {
    pub fn new(inputs: usize, outputs: usize) -> Self {
        Diagram {
            nodes: Vec::new(),
            wires: Vec::new(),
            inputs,
            outputs,
        }
    }

    pub fn add_node(&mut self, node: Node) -> Result<usize, ZhError> {
        let tensor = tensor_of(&node)?;
        self.nodes.push(DiagramNode {
            tensor,
            outputs: node.outputs,
            spec: Some(node),
        });
        Ok(self.nodes.len() - 1)
    }

    /// Adds an arbitrary tensor whose legs are all outputs.
    pub fn add_tensor(&mut self, tensor: DenseTensor) -> usize {
        let outputs = tensor.legs();
        self.nodes.push(DiagramNode {
            tensor,
            outputs,
            spec: None,
        });
        self.nodes.len() - 1
    }

    pub fn connect(&mut self, a: End, b: End) -> &mut Self {
        self.wires.push((a, b));
        self
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn num_inputs(&self) -> usize {
        self.inputs
    }

    pub fn num_outputs(&self) -> usize {
        self.outputs
    }

    fn leg_of(&self, node: usize, port: Port) -> Result<usize, ZhError> {
        let n = self.nodes.get(node).ok_or(ZhError::UnknownNode(node))?;
        let leg = match port {
            Port::Out(i) => i,
            Port::In(i) => n.outputs + i,
        };
        let within = match port {
            Port::Out(i) => i < n.outputs,
            Port::In(i) => i < n.tensor.legs() - n.outputs,
        };
        if !within {
            return Err(ZhError::PortUse(format!("{node}:{port:?}"), 0));
        }
        Ok(leg)
    }

    /// Builds the labeled tensor list and the boundary label order.
    fn labeled(&self) -> Result<(Vec<Labeled>, Vec<usize>), ZhError> {
        let mut node_labels: Vec<Vec<Option<usize>>> =
            self.nodes.iter().map(|n| vec![None; n.tensor.legs()]).collect();
        let mut boundary: Vec<Option<usize>> = vec![None; self.outputs + self.inputs];
        let mut extra: Vec<Labeled> = Vec::new();
        let mut next = 0usize;

        for &(a, b) in &self.wires {
            let same_node = matches!((a, b), (End::Node(x, _), End::Node(y, _)) if x == y);
            let both_boundary = !matches!(a, End::Node(..)) && !matches!(b, End::Node(..));
            let (la, lb) = if same_node || both_boundary {
                // Route through an explicit identity so every label sits on two tensors.
                let (la, lb) = (next, next + 1);
                next += 2;
                extra.push(Labeled {
                    labels: vec![la, lb],
                    data: vec![
                        C64::new(1.0, 0.0),
                        C64::new(0.0, 0.0),
                        C64::new(0.0, 0.0),
                        C64::new(1.0, 0.0),
                    ],
                });
                (la, lb)
            } else {
                next += 1;
                (next - 1, next - 1)
            };
            for (end, label) in [(a, la), (b, lb)] {
                let slot = match end {
                    End::Node(node, port) => {
                        let leg = self.leg_of(node, port)?;
                        &mut node_labels[node][leg]
                    }
                    End::Output(i) if i < self.outputs => &mut boundary[i],
                    End::Input(i) if i < self.inputs => &mut boundary[self.outputs + i],
                    _ => return Err(ZhError::PortUse(format!("{end:?}"), 0)),
                };
                if slot.is_some() {
                    return Err(ZhError::PortUse(format!("{end:?}"), 2));
                }
                *slot = Some(label);
            }
        }

        let mut tensors = Vec::with_capacity(self.nodes.len() + extra.len());
        for (i, (n, labels)) in self.nodes.iter().zip(node_labels).enumerate() {
            let labels = labels
                .into_iter()
                .enumerate()
                .map(|(leg, l)| l.ok_or_else(|| ZhError::PortUse(format!("node {i} leg {leg}"), 0)))
                .collect::<Result<Vec<_>, _>>()?;
            tensors.push(Labeled {
                labels,
                data: n.tensor.data.clone(),
            });
        }
        tensors.extend(extra);
        let boundary = boundary
            .into_iter()
            .enumerate()
            .map(|(i, l)| l.ok_or_else(|| ZhError::PortUse(format!("boundary {i}"), 0)))
            .collect::<Result<Vec<_>, _>>()?;
        if boundary.len() > MAX_CONTRACTION_LEGS {
            return Err(ZhError::TooLarge(boundary.len()));
        }
        Ok((tensors, boundary))
    }

    /// Contracts the diagram, greedily merging the pair with the smallest result.
    pub fn contract(&self) -> Result<DenseTensor, ZhError> {
        let (mut tensors, boundary) = self.labeled()?;
        while tensors.len() > 1 {
            let mut best: Option<(usize, usize, usize, bool)> = None;
            for i in 0..tensors.len() {
                for j in i + 1..tensors.len() {
                    let shared = tensors[i]
                        .labels
                        .iter()
                        .filter(|l| tensors[j].labels.contains(l))
                        .count();
                    let size = tensors[i].labels.len() + tensors[j].labels.len() - 2 * shared;
                    let key = (size, shared > 0);
                    let better = match best {
                        None => true,
                        Some((_, _, bs, bshared)) => (key.1 && !bshared) || (key.1 == bshared && key.0 < bs),
                    };
                    if better {
                        best = Some((i, j, size, shared > 0));
                    }
                }
            }
            let (i, j, _, _) = best.expect("at least two tensors");
            let b = tensors.swap_remove(j);
            let a = tensors.swap_remove(i);
            tensors.push(contract_pair(&a, &b)?);
        }
        finish(tensors.pop(), &boundary)
    }

    /// Contracts nodes sequentially in the given order (a permutation of node indices).
    pub fn contract_in_order(&self, order: &[usize]) -> Result<DenseTensor, ZhError> {
        let mut seen = vec![false; self.nodes.len()];
        if order.len() != self.nodes.len() {
            return Err(ZhError::BadOrder);
        }
        for &i in order {
            if i >= seen.len() || seen[i] {
                return Err(ZhError::BadOrder);
            }
            seen[i] = true;
        }
        let (tensors, boundary) = self.labeled()?;
        let mut acc: Option<Labeled> = None;
        // Auxiliary identity tensors follow the nodes and are merged last.
        let sequence = order.iter().copied().chain(self.nodes.len()..tensors.len());
        for idx in sequence {
            acc = Some(match acc {
                None => tensors[idx].clone(),
                Some(a) => contract_pair(&a, &tensors[idx])?,
            });
        }
        finish(acc, &boundary)
    }

    /// Hermitian-conjugate diagram: wires flipped left-right, phases negated.
    pub fn mirrored(&self) -> Result<Diagram, ZhError> {
        let mut out = Diagram::new(self.outputs, self.inputs);
        for n in &self.nodes {
            let spec = n.spec.ok_or(ZhError::NotMirrorable)?;
            out.add_node(spec.mirrored())?;
        }
        let flip = |e: End| match e {
            End::Node(i, Port::Out(p)) => End::Node(i, Port::In(p)),
            End::Node(i, Port::In(p)) => End::Node(i, Port::Out(p)),
            End::Output(i) => End::Input(i),
            End::Input(i) => End::Output(i),
        };
        for &(a, b) in &self.wires {
            out.connect(flip(a), flip(b));
        }
        Ok(out)
    }
}

/// Contracts a diagram with the greedy order.
pub fn contract(diagram: &Diagram) -> Result<DenseTensor, ZhError> {
    diagram.contract()
}

fn finish(result: Option<Labeled>, boundary: &[usize]) -> Result<DenseTensor, ZhError> {
    let result = result.unwrap_or(Labeled {
        labels: Vec::new(),
        data: vec![C64::new(1.0, 0.0)],
    });
    let legs = result.labels.len();
    debug_assert_eq!(legs, boundary.len());
    let tensor = DenseTensor {
        legs,
        data: result.data,
    };
    let perm: Vec<usize> = boundary
        .iter()
        .map(|l| result.labels.iter().position(|x| x == l).expect("boundary label survives"))
        .collect();
    Ok(tensor.permuted(&perm))
}

/// Bit offsets (within a flat index) for an ordered list of leg positions.
fn leg_shifts(total_legs: usize, positions: &[usize]) -> Vec<usize> {
    positions.iter().map(|&p| total_legs - 1 - p).collect()
}

fn scatter(value: usize, shifts: &[usize]) -> usize {
    let k = shifts.len();
    shifts
        .iter()
        .enumerate()
        .fold(0, |acc, (i, &s)| acc | ((value >> (k - 1 - i) & 1) << s))
}

fn contract_pair(a: &Labeled, b: &Labeled) -> Result<Labeled, ZhError> {
    let (la, lb) = (a.labels.len(), b.labels.len());
    let shared: Vec<usize> = a.labels.iter().copied().filter(|l| b.labels.contains(l)).collect();
    let a_free: Vec<usize> = (0..la).filter(|&p| !shared.contains(&a.labels[p])).collect();
    let b_free: Vec<usize> = (0..lb).filter(|&p| !shared.contains(&b.labels[p])).collect();
    let out_legs = a_free.len() + b_free.len();
    if out_legs > MAX_CONTRACTION_LEGS {
        return Err(ZhError::TooLarge(out_legs));
    }
    let a_shared_pos: Vec<usize> = shared
        .iter()
        .map(|l| a.labels.iter().position(|x| x == l).unwrap())
        .collect();
    let b_shared_pos: Vec<usize> = shared
        .iter()
        .map(|l| b.labels.iter().position(|x| x == l).unwrap())
        .collect();
    let a_sh = leg_shifts(la, &a_shared_pos);
    let b_sh = leg_shifts(lb, &b_shared_pos);
    let a_fr = leg_shifts(la, &a_free);
    let b_fr = leg_shifts(lb, &b_free);
    let shared_count = 1usize << shared.len();
    let a_shared_idx: Vec<usize> = (0..shared_count).map(|s| scatter(s, &a_sh)).collect();
    let b_shared_idx: Vec<usize> = (0..shared_count).map(|s| scatter(s, &b_sh)).collect();

    let nb_free = b_free.len();
    let data = (0..1usize << out_legs)
        .map(|out| {
            let base_a = scatter(out >> nb_free, &a_fr);
            let base_b = scatter(out & ((1 << nb_free) - 1), &b_fr);
            (0..shared_count)
                .map(|s| a.data[base_a | a_shared_idx[s]] * b.data[base_b | b_shared_idx[s]])
                .sum()
        })
        .collect();
    let labels = a_free
        .iter()
        .map(|&p| a.labels[p])
        .chain(b_free.iter().map(|&p| b.labels[p]))
        .collect();
    Ok(Labeled { labels, data })
}

/// Single-leg X-spider with phase θ: `√2 e^{iθ/2} (cos θ/2, −i sin θ/2)`.
///
/// Contracted into an H-box it yields `√2·MCP(θ)`. Its Z-basis counterpart
/// `(1, e^{iθ})` is the Hadamard image of this vector.
pub fn phase_vector(theta: f64) -> [C64; 2] {
    let t = tensor_of(&Node::x(0, 1, theta)).expect("single leg");
    [t.get(0), t.get(1)]
}

/// The vector `(1, −1)`, whose H-box contraction is `2·P₁…₁`.
pub fn projector_vector() -> [C64; 2] {
    [C64::new(1.0, 0.0), C64::new(-1.0, 0.0)]
}

/// Copy spiders on `n` through-wires, each feeding one leg of `state_node`'s
/// first `n` legs. Produces `diag(v)` for the vector `v` carried by those legs.
fn diagonal_from_state(diagram: &mut Diagram, state_node: usize, n: usize) -> Result<(), ZhError> {
    for q in 0..n {
        let s = diagram.add_node(Node::z(1, 2, 0.0))?;
        diagram
            .connect(End::Input(q), End::Node(s, Port::In(0)))
            .connect(End::Node(s, Port::Out(0)), End::Output(q))
            .connect(End::Node(s, Port::Out(1)), End::Node(state_node, Port::Out(q)));
    }
    Ok(())
}

/// Diagram of an `n`-qubit MCZ: copy spiders joined to one H-box with no inputs.
pub fn mcz_diagram(n: usize) -> Result<Diagram, ZhError> {
    let mut d = Diagram::new(n, n);
    let h = d.add_node(Node::h(0, n))?;
    diagonal_from_state(&mut d, h, n)?;
    Ok(d)
}

fn diag_matrix_residual(t: &DenseTensor, n: usize, diag: &[C64]) -> f64 {
    let dim = 1usize << n;
    let mut worst: f64 = 0.0;
    for r in 0..dim {
        for c in 0..dim {
            let expected = if r == c { diag[r] } else { C64::new(0.0, 0.0) };
            worst = worst.max((t.matrix_entry(n, r, c) - expected).norm());
        }
    }
    worst
}

/// Residual of the MCZ diagram against `diag(1, …, 1, −1)`.
pub fn check_mcz_representation(n: usize) -> Result<f64, ZhError> {
    let t = mcz_diagram(n)?.contract()?;
    let mut diag = vec![C64::new(1.0, 0.0); 1 << n];
    diag[(1 << n) - 1] = C64::new(-1.0, 0.0);
    Ok(diag_matrix_residual(&t, n, &diag))
}

/// Copy spiders contracted with an arbitrary `n`-qubit vector give `diag(v)`.
pub fn check_diag_lemma(v: &[C64], n: usize) -> Result<f64, ZhError> {
    assert_eq!(v.len(), 1 << n, "vector length must be 2^n");
    let mut d = Diagram::new(n, n);
    let state = d.add_tensor(DenseTensor::vector(v));
    diagonal_from_state(&mut d, state, n)?;
    Ok(diag_matrix_residual(&d.contract()?, n, v))
}

/// H-box fusion: `HBox(m+n) = ½ · [HBox(m+1) – HBox(2) – HBox(n+1)]`.
pub fn check_fusion_rule(m: usize, n: usize) -> Result<f64, ZhError> {
    let lhs = tensor_of(&Node::h(0, m + n))?;
    let mut d = Diagram::new(0, m + n);
    let left = d.add_node(Node::h(0, m + 1))?;
    let right = d.add_node(Node::h(0, n + 1))?;
    let link = d.add_node(Node::h(0, 2))?;
    for i in 0..m {
        d.connect(End::Node(left, Port::Out(i)), End::Output(i));
    }
    for j in 0..n {
        d.connect(End::Node(right, Port::Out(j)), End::Output(m + j));
    }
    d.connect(End::Node(left, Port::Out(m)), End::Node(link, Port::Out(0)))
        .connect(End::Node(right, Port::Out(n)), End::Node(link, Port::Out(1)));
    let rhs = d.contract()?;
    Ok(lhs.max_abs_diff(&rhs.scaled(C64::new(0.5, 0.0))))
}

/// H-box with `n+1` legs, its extra leg closed by `w`, then diagonalized by copy spiders.
pub fn hbox_contracted_with(w: [C64; 2], n: usize) -> Result<DenseTensor, ZhError> {
    let mut d = Diagram::new(n, n);
    let h = d.add_node(Node::h(0, n + 1))?;
    let v = d.add_tensor(DenseTensor::vector(&w));
    d.connect(End::Node(h, Port::Out(n)), End::Node(v, Port::Out(0)));
    diagonal_from_state(&mut d, h, n)?;
    d.contract()
}

/// Residual of `HBox ∘ phase_vector(θ) = √2·MCP(θ)` on `n` qubits.
pub fn phase_identity_residual(n: usize, theta: f64) -> Result<f64, ZhError> {
    let t = hbox_contracted_with(phase_vector(theta), n)?;
    let mut diag = vec![C64::new(SQRT_2, 0.0); 1 << n];
    diag[(1 << n) - 1] = C64::from_polar(SQRT_2, theta);
    Ok(diag_matrix_residual(&t, n, &diag))
}

/// Residual of `HBox ∘ (1, −1) = 2·P₁…₁` on `n` qubits.
pub fn projector_identity_residual(n: usize) -> Result<f64, ZhError> {
    let t = hbox_contracted_with(projector_vector(), n)?;
    let mut diag = vec![C64::new(0.0, 0.0); 1 << n];
    diag[(1 << n) - 1] = C64::new(2.0, 0.0);
    Ok(diag_matrix_residual(&t, n, &diag))
}

/// Larger of the phase-vector and projector-vector identity residuals.
pub fn check_contraction_identities(n: usize, theta: f64) -> Result<f64, ZhError> {
    Ok(phase_identity_residual(n, theta)?.max(projector_identity_residual(n)?))
}

pub type Mat4 = [[C64; 4]; 4];
pub type Mat2 = [[C64; 2]; 2];

/// The matrix joining the two partitions: two 2-legged H-boxes, rows `(a, b)`
/// on the ket side and columns `(a′, b′)` on the bra side.
pub fn q_matrix() -> Result<Mat4, ZhError> {
    let mut d = Diagram::new(2, 2);
    let ket = d.add_node(Node::h(0, 2))?;
    let bra = d.add_node(Node::h(2, 0))?;
    d.connect(End::Node(ket, Port::Out(0)), End::Output(0))
        .connect(End::Node(ket, Port::Out(1)), End::Output(1))
        .connect(End::Input(0), End::Node(bra, Port::In(0)))
        .connect(End::Input(1), End::Node(bra, Port::In(1)));
    let t = d.contract()?;
    let mut q = [[C64::new(0.0, 0.0); 4]; 4];
    for (r, row) in q.iter_mut().enumerate() {
        for (c, v) in row.iter_mut().enumerate() {
            *v = t.matrix_entry(2, r, c);
        }
    }
    Ok(q)
}

pub fn pauli(name: char) -> Mat2 {
    let o = C64::new(0.0, 0.0);
    let l = C64::new(1.0, 0.0);
    let i = C64::i();
    match name {
        'I' => [[l, o], [o, l]],
        'X' => [[o, l], [l, o]],
        'Y' => [[o, -i], [i, o]],
        'Z' => [[l, o], [o, -l]],
        _ => panic!("unknown Pauli {name}"),
    }
}

/// Kronecker product of two 2×2 matrices.
pub fn kron2(a: &Mat2, b: &Mat2) -> Mat4 {
    let mut out = [[C64::new(0.0, 0.0); 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            out[r][c] = a[r / 2][c / 2] * b[r % 2][c % 2];
        }
    }
    out
}

/// `v v†`.
pub fn outer(v: &[C64; 2]) -> Mat2 {
    let mut out = [[C64::new(0.0, 0.0); 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            out[r][c] = v[r] * v[c].conj();
        }
    }
    out
}

pub fn max_abs_diff4(a: &Mat4, b: &Mat4) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QExpansionResiduals {
    /// Contracted H-box pair against the literal ±1 matrix.
    pub q_matrix: f64,
    /// `Q − (I⊗I + Y⊗Y + Z⊗X + X⊗Z)`.
    pub pauli: f64,
    /// `X − (½ φ₀φ₀† + ½ φ_πφ_π† − r r†)` with `r = (1, −1)`.
    pub x_substitution: f64,
}

impl QExpansionResiduals {
    pub fn max(&self) -> f64 {
        self.q_matrix.max(self.pauli).max(self.x_substitution)
    }
}

pub fn literal_q() -> Mat4 {
    let row = [1.0, 1.0, 1.0, -1.0];
    let mut q = [[C64::new(0.0, 0.0); 4]; 4];
    for r in 0..4 {
        for c in 0..4 {
            q[r][c] = C64::new(row[r] * row[c], 0.0);
        }
    }
    q
}

pub fn check_q_expansion() -> Result<QExpansionResiduals, ZhError> {
    let q = q_matrix()?;
    let literal = literal_q();
    let q_res = max_abs_diff4(&q, &literal);

    let mut expansion = [[C64::new(0.0, 0.0); 4]; 4];
    for (a, b) in [('I', 'I'), ('Y', 'Y'), ('Z', 'X'), ('X', 'Z')] {
        let term = kron2(&pauli(a), &pauli(b));
        for r in 0..4 {
            for c in 0..4 {
                expansion[r][c] += term[r][c];
            }
        }
    }
    let pauli_res = max_abs_diff4(&q, &expansion);

    let p0 = outer(&phase_vector(0.0));
    let ppi = outer(&phase_vector(std::f64::consts::PI));
    let r = outer(&projector_vector());
    let x = pauli('X');
    let mut x_res: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            let sub = p0[i][j] * 0.5 + ppi[i][j] * 0.5 - r[i][j];
            x_res = x_res.max((x[i][j] - sub).norm());
        }
    }
    Ok(QExpansionResiduals {
        q_matrix: q_res,
        pauli: pauli_res,
        x_substitution: x_res,
    })
}
