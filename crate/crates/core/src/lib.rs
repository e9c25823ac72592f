//! Cutting multi-controlled-Z gates into partition-local channels.
//!
//! - [`circuit`]: gates, partitioned circuits, observables and their JSON form.
//! - [`densesim`]: state-vector simulation and superoperator oracles.
//! - [`zhcalc`]: dense ZH-calculus tensors and identity checks.
//! - [`cutter`]: decompositions of the MCZ channel, verification and embedding.
//! - [`sampler`]: shot budgets, allocation and the two Monte-Carlo estimators.
//! - [`harness`]: random circuits, verification suites and experiments.

pub mod circuit;
pub mod cutter;
pub mod densesim;
pub mod harness;
pub mod sampler;
pub mod zhcalc;

pub use circuit::{Circuit, Gate, GateKind, Observable, PartitionedCut, Side};
pub use cutter::{decompose_ccz, decompose_mcz, Decomposition, DecompositionTerm, LocalOp, LocalOperation, PhaseAngle};
pub use densesim::{StateVector, Superoperator};
