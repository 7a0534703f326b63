//! Gate application, entangled resource preparation, and exhaustive
//! measurement-branch enumeration.
//!
//! Measurement never samples: [`measure_branches`] returns every outcome
//! with its exact probability and post-measurement state, so downstream
//! statistics are deterministic sums over branches.

use crate::qmath::{c64, mat_identity, mat_kron, scatter_bits, C64, StateVector};
use crate::{Error, Result};

/// Branches with probability at or below this floor are dropped by
/// [`measure_branches`]; genuinely impossible outcomes otherwise survive as
/// numerical dust and have no normalizable post-state.
pub const BRANCH_PROBABILITY_FLOOR: f64 = 1e-15;

/// Quantum gates over register qubit indices (qubit 0 is the most
/// significant bit of a basis index).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gate {
    Hadamard(usize),
    PauliX(usize),
    PauliY(usize),
    PauliZ(usize),
    Cnot { control: usize, target: usize },
}

impl Gate {
    /// Qubits the gate acts on.
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::Hadamard(q) | Gate::PauliX(q) | Gate::PauliY(q) | Gate::PauliZ(q) => vec![q],
            Gate::Cnot { control, target } => vec![control, target],
        }
    }
}

fn check_qubit(q: usize, n: usize) -> Result<()> {
    if q >= n {
        return Err(Error::QubitOutOfRange {
            qubit: q,
            n_qubits: n,
        });
    }
    Ok(())
}

/// Applies a gate to a state, returning the new state.
pub fn apply_gate(state: &StateVector, gate: &Gate) -> Result<StateVector> {
    let n = state.n_qubits();
    let dim = state.len();
    let mut out = state.clone();
    match *gate {
        Gate::Hadamard(q) => {
            check_qubit(q, n)?;
            let mask = 1usize << (n - 1 - q);
            let amps = out.amps_mut();
            let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
            for i in 0..dim {
                if i & mask == 0 {
                    let a = amps[i];
                    let b = amps[i | mask];
                    amps[i] = (a + b) * inv_sqrt2;
                    amps[i | mask] = (a - b) * inv_sqrt2;
                }
            }
        }
        Gate::PauliX(q) => {
            check_qubit(q, n)?;
            let mask = 1usize << (n - 1 - q);
            let amps = out.amps_mut();
            for i in 0..dim {
                if i & mask == 0 {
                    amps.swap(i, i | mask);
                }
            }
        }
        Gate::PauliY(q) => {
            check_qubit(q, n)?;
            let mask = 1usize << (n - 1 - q);
            let amps = out.amps_mut();
            for i in 0..dim {
                if i & mask == 0 {
                    let a = amps[i];
                    let b = amps[i | mask];
                    amps[i] = c64(0.0, -1.0) * b;
                    amps[i | mask] = c64(0.0, 1.0) * a;
                }
            }
        }
        Gate::PauliZ(q) => {
            check_qubit(q, n)?;
            let mask = 1usize << (n - 1 - q);
            let amps = out.amps_mut();
            for (i, amp) in amps.iter_mut().enumerate() {
                if i & mask != 0 {
                    *amp = -*amp;
                }
            }
        }
        Gate::Cnot { control, target } => {
            check_qubit(control, n)?;
            check_qubit(target, n)?;
            if control == target {
                return Err(Error::DuplicateQubit { qubit: control });
            }
            let cmask = 1usize << (n - 1 - control);
            let tmask = 1usize << (n - 1 - target);
            let amps = out.amps_mut();
            for i in 0..dim {
                if i & cmask != 0 && i & tmask == 0 {
                    amps.swap(i, i | tmask);
                }
            }
        }
    }
    Ok(out)
}

/// Applies a sequence of gates left to right.
pub fn apply_circuit(state: &StateVector, gates: &[Gate]) -> Result<StateVector> {
    let mut s = state.clone();
    for g in gates {
        s = apply_gate(&s, g)?;
    }
    Ok(s)
}

/// Dense `2^n x 2^n` unitary for a gate on an `n`-qubit register.
///
/// Built independently of [`apply_gate`]'s index sweeps (Kronecker embedding
/// for single-qubit gates, explicit basis permutation for CNOT) so the two
/// can cross-check each other in tests.
pub fn gate_unitary(gate: &Gate, n_qubits: usize) -> Result<Vec<C64>> {
    let n = n_qubits;
    match *gate {
        Gate::Hadamard(q) | Gate::PauliX(q) | Gate::PauliY(q) | Gate::PauliZ(q) => {
            check_qubit(q, n)?;
            let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
            let g: Vec<C64> = match *gate {
                Gate::Hadamard(_) => vec![
                    c64(inv_sqrt2, 0.0),
                    c64(inv_sqrt2, 0.0),
                    c64(inv_sqrt2, 0.0),
                    c64(-inv_sqrt2, 0.0),
                ],
                Gate::PauliX(_) => vec![c64(0.0, 0.0), c64(1.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0)],
                Gate::PauliY(_) => vec![c64(0.0, 0.0), c64(0.0, -1.0), c64(0.0, 1.0), c64(0.0, 0.0)],
                Gate::PauliZ(_) => vec![c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(-1.0, 0.0)],
                Gate::Cnot { .. } => unreachable!(),
            };
            let left = mat_identity(1usize << q);
            let right = mat_identity(1usize << (n - 1 - q));
            let lg = mat_kron(1usize << q, &left, 2, &g);
            Ok(mat_kron(
                1usize << (q + 1),
                &lg,
                1usize << (n - 1 - q),
                &right,
            ))
        }
        Gate::Cnot { control, target } => {
            check_qubit(control, n)?;
            check_qubit(target, n)?;
            if control == target {
                return Err(Error::DuplicateQubit { qubit: control });
            }
            let dim = 1usize << n;
            let cmask = 1usize << (n - 1 - control);
            let tmask = 1usize << (n - 1 - target);
            let mut u = vec![c64(0.0, 0.0); dim * dim];
            for col in 0..dim {
                let row = if col & cmask != 0 { col ^ tmask } else { col };
                u[row * dim + col] = c64(1.0, 0.0);
            }
            Ok(u)
        }
    }
}

/// Dense unitary of a whole gate sequence (later gates multiplied on the
/// left).
pub fn circuit_unitary(gates: &[Gate], n_qubits: usize) -> Result<Vec<C64>> {
    let dim = 1usize << n_qubits;
    let mut u = mat_identity(dim);
    for g in gates {
        u = crate::qmath::mat_mul(dim, &gate_unitary(g, n_qubits)?, &u);
    }
    Ok(u)
}

/// Entangled resource families the protocols can distribute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResourceKind {
    /// Two-qubit maximally entangled pair (|00> + |11>)/sqrt(2).
    Epr,
    /// Three-qubit (|000> + |111>)/sqrt(2).
    Ghz,
    /// Three-qubit (|100> + |010> + |001>)/sqrt(3).
    W,
}

impl ResourceKind {
    pub fn n_qubits(&self) -> usize {
        match self {
            ResourceKind::Epr => 2,
            ResourceKind::Ghz | ResourceKind::W => 3,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ResourceKind::Epr => "epr",
            ResourceKind::Ghz => "ghz",
            ResourceKind::W => "w",
        }
    }
}

impl std::str::FromStr for ResourceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "epr" => Ok(ResourceKind::Epr),
            "ghz" => Ok(ResourceKind::Ghz),
            "w" => Ok(ResourceKind::W),
            other => Err(Error::BadConfig {
                reason: format!("unknown resource kind \"{other}\" (expected epr, ghz, or w)"),
            }),
        }
    }
}

/// Prepares the named resource state.
pub fn make_resource(kind: ResourceKind) -> StateVector {
    match kind {
        ResourceKind::Epr => {
            let h = c64(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            let mut amps = vec![c64(0.0, 0.0); 4];
            amps[0b00] = h;
            amps[0b11] = h;
            StateVector::from_raw(2, amps)
        }
        ResourceKind::Ghz => {
            let h = c64(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            let mut amps = vec![c64(0.0, 0.0); 8];
            amps[0b000] = h;
            amps[0b111] = h;
            StateVector::from_raw(3, amps)
        }
        ResourceKind::W => {
            let t = c64(1.0 / 3f64.sqrt(), 0.0);
            let mut amps = vec![c64(0.0, 0.0); 8];
            amps[0b100] = t;
            amps[0b010] = t;
            amps[0b001] = t;
            StateVector::from_raw(3, amps)
        }
    }
}

/// One branch of an exhaustive computational-basis measurement.
#[derive(Debug, Clone)]
pub struct MeasurementBranch {
    /// Measured bits, in the order the qubits were listed.
    pub outcome: Vec<u8>,
    /// Exact Born probability of this outcome.
    pub probability: f64,
    /// Normalized state of the unmeasured qubits (ascending original
    /// index).
    pub post_state: StateVector,
}

impl MeasurementBranch {
    /// Outcome bits packed as an integer, first listed qubit most
    /// significant.
    pub fn outcome_index(&self) -> usize {
        self.outcome
            .iter()
            .fold(0usize, |acc, &b| (acc << 1) | b as usize)
    }
}

/// Measures the listed qubits in the computational basis, returning every
/// outcome with nonzero probability (above [`BRANCH_PROBABILITY_FLOOR`]),
/// ordered by outcome index.
pub fn measure_branches(state: &StateVector, qubits: &[usize]) -> Result<Vec<MeasurementBranch>> {
    let n = state.n_qubits();
    // Validate, but keep the caller's qubit order for outcome bits.
    crate::qmath::checked_sorted_qubits(n, qubits)?;
    let rest: Vec<usize> = (0..n).filter(|q| !qubits.contains(q)).collect();
    let m = qubits.len();
    let dr = 1usize << rest.len();
    let mut branches = Vec::new();
    for outcome in 0..(1usize << m) {
        let base = scatter_bits(n, qubits, outcome);
        let mut probability = 0.0;
        let mut amps = vec![c64(0.0, 0.0); dr];
        for (r, amp_slot) in amps.iter_mut().enumerate() {
            let idx = scatter_bits(n, &rest, r) | base;
            let a = state.amp(idx);
            probability += a.norm_sqr();
            *amp_slot = a;
        }
        if probability <= BRANCH_PROBABILITY_FLOOR {
            continue;
        }
        let scale = 1.0 / probability.sqrt();
        for a in &mut amps {
            *a *= scale;
        }
        branches.push(MeasurementBranch {
            outcome: (0..m).map(|t| ((outcome >> (m - 1 - t)) & 1) as u8).collect(),
            probability,
            post_state: StateVector::from_raw(rest.len(), amps),
        });
    }
    Ok(branches)
}

/// Probability of every outcome (including zeros) of measuring the listed
/// qubits, indexed by packed outcome.
pub fn outcome_probabilities(state: &StateVector, qubits: &[usize]) -> Result<Vec<f64>> {
    let n = state.n_qubits();
    crate::qmath::checked_sorted_qubits(n, qubits)?;
    let rest: Vec<usize> = (0..n).filter(|q| !qubits.contains(q)).collect();
    let m = qubits.len();
    let dr = 1usize << rest.len();
    let mut probs = vec![0.0; 1usize << m];
    for (outcome, slot) in probs.iter_mut().enumerate() {
        let base = scatter_bits(n, qubits, outcome);
        *slot = (0..dr)
            .map(|r| state.amp(scatter_bits(n, &rest, r) | base).norm_sqr())
            .sum();
    }
    Ok(probs)
}
