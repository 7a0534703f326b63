//! Deterministic simulation of teleportation-based quantum network coding,
//! plus the quantum-correlation toolbox needed to analyse the channels it
//! runs over.
//!
//! The crate answers two families of questions:
//!
//! * **Network coding.** K senders each teleport one qubit across a shared
//!   network whose only inter-relay link is a classical bottleneck. With
//!   adjacent-pair XOR coding the bottleneck carries exactly `2(K-1)` bits
//!   per round, and every target still recovers its message with fidelity 1
//!   when the shared resources are EPR pairs (or GHZ states reduced to EPR
//!   pairs). See [`protocols`] and [`network`].
//! * **Correlations.** How much mutual information, classical correlation
//!   and quantum discord a two-qubit channel state carries, whether it is
//!   PPT-separable, and what output fidelity a single teleportation through
//!   a Bell-diagonal channel achieves. See [`correlations`] and
//!   [`discord_teleport`].
//!
//! Everything is exhaustive and deterministic: measurements enumerate all
//! outcome branches with exact probabilities instead of sampling, floating
//! point work happens in a fixed order, and repeated runs produce identical
//! bytes. Registers stay small by design (up to ~18 qubits for state
//! vectors, 2^5-dimensional density operators), so all linear algebra is
//! dense and hand-rolled, including the cyclic-Jacobi eigensolver in
//! [`qmath`].
//!
//! Module map:
//!
//! * [`qmath`] — state vectors, density matrices, Hermitian eigensolver,
//!   entropy, fidelity.
//! * [`circuits`] — gates, resource states (EPR/GHZ/W), exhaustive
//!   measurement-branch enumeration.
//! * [`network`] — directed acyclic topologies, traffic ledgers, capacity
//!   validation, the butterfly and K-pair builders.
//! * [`protocols`] — single teleportation, the K-pair coded/passthrough
//!   protocols, XOR bottleneck encoding/decoding.
//! * [`correlations`] — mutual information, classical correlation, quantum
//!   discord, PPT separability, Bell-diagonal states.
//! * [`discord_teleport`] — teleportation through Bell-diagonal channels:
//!   closed-form output state, independent circuit route, fidelity sweeps,
//!   and the two-pair butterfly run over correlated channels.

pub mod circuits;
pub mod correlations;
pub mod discord_teleport;
pub mod network;
pub mod protocols;
pub mod qmath;

use thiserror::Error;

/// Crate-wide error type.
///
/// Variants carry enough context to print a one-line diagnosis; positional
/// information (e.g. `edges[3]: ...`) is embedded in the message for parser
/// errors.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} contains a non-finite component")]
    NonFinite { what: &'static str },
    #[error("expected {expected} entries, got {got}")]
    BadLength { expected: usize, got: usize },
    #[error("dimension {dim} is not a power of two")]
    NotPowerOfTwo { dim: usize },
    #[error("operand dimensions {left} and {right} are incompatible")]
    DimensionMismatch { left: usize, right: usize },
    #[error("state norm is {norm:.17}, expected 1 within {tol:e}")]
    NotNormalized { norm: f64, tol: f64 },
    #[error("matrix is not Hermitian: max |a_ij - conj(a_ji)| = {max_asymmetry:.3e}")]
    NotHermitian { max_asymmetry: f64 },
    #[error("matrix trace is {trace:.17}, expected 1 within {tol:e}")]
    TraceNotOne { trace: f64, tol: f64 },
    #[error("operator is unphysical: minimum eigenvalue {min_eigenvalue:.6e}")]
    Unphysical { min_eigenvalue: f64 },
    #[error("qubit index {qubit} out of range for a {n_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },
    #[error("qubit index {qubit} listed more than once")]
    DuplicateQubit { qubit: usize },
    #[error("qubit list must not be empty")]
    EmptyQubitList,
    #[error("{what} = {value} is outside [{min}, {max}]")]
    OutOfRange {
        what: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },
    #[error("invalid permutation: {reason}")]
    BadPermutation { reason: String },
    #[error("permutation has a fixed point at index {index} (coded routing requires a derangement)")]
    FixedPoint { index: usize },
    #[error("invalid protocol configuration: {reason}")]
    BadConfig { reason: String },
    #[error("invalid topology: {reason}")]
    BadTopology { reason: String },
    #[error("topology JSON is malformed: {0}")]
    TopologyJson(#[from] serde_json::Error),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
