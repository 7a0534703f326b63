//! The K-pair teleportation protocols: sender circuits, exhaustive branch
//! enumeration, XOR compression of correction words at the bottleneck,
//! per-target decoding and Pauli correction, and honest fidelity
//! accounting.
//!
//! Every measurement branch is enumerated with its exact probability, each
//! target decodes its correction word from exactly the classical data the
//! network delivers to it (its co-located sender's word plus the broadcast
//! XOR sums), and fidelities are averaged over branches. Nothing is
//! sampled, so results are bit-for-bit reproducible.

use serde::{Deserialize, Serialize};

use crate::circuits::{
    apply_circuit, apply_gate, make_resource, measure_branches, Gate, ResourceKind,
};
use crate::discord_teleport::BlochState;
use crate::network::{
    bottleneck_usage, build_kpair, validate_traffic, EdgeKind, Permutation, TrafficLog,
};
use crate::qmath::{checked_sorted_qubits, StateVector};
use crate::{Error, Result};

/// Largest register the exhaustive simulator will enumerate.
pub const MAX_REGISTER_QUBITS: usize = 20;

/// The two classical bits a teleportation measurement produces: the
/// receiver applies `X^x` then `Z^z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrectionWord {
    pub z: u8,
    pub x: u8,
}

impl CorrectionWord {
    pub fn new(z: u8, x: u8) -> Self {
        Self { z: z & 1, x: x & 1 }
    }
}

/// How messages travel across the network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RoutingMode {
    /// Teleportation with XOR-coded correction words over the classical
    /// bottleneck. Requires a derangement: every target faces a remote
    /// sender.
    Coded,
    /// Every target faces its own sender; message qubits cross the paired
    /// quantum edges directly and no classical bits are needed.
    Passthrough,
}

impl std::str::FromStr for RoutingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "coded" => Ok(RoutingMode::Coded),
            "passthrough" => Ok(RoutingMode::Passthrough),
            other => Err(Error::BadConfig {
                reason: format!("unknown mode \"{other}\" (expected coded or passthrough)"),
            }),
        }
    }
}

/// Full description of one protocol run.
#[derive(Debug, Clone)]
pub struct ProtocolConfig {
    pub k: usize,
    pub resource: ResourceKind,
    pub perm: Permutation,
    pub mode: RoutingMode,
    pub inputs: Vec<BlochState>,
}

impl ProtocolConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::BadConfig {
                reason: format!("need at least 2 sender-target pairs, got {}", self.k),
            });
        }
        if self.perm.len() != self.k {
            return Err(Error::BadPermutation {
                reason: format!(
                    "permutation has {} entries for {} pairs",
                    self.perm.len(),
                    self.k
                ),
            });
        }
        if self.inputs.len() != self.k {
            return Err(Error::BadConfig {
                reason: format!(
                    "expected {} input states, got {}",
                    self.k,
                    self.inputs.len()
                ),
            });
        }
        match self.mode {
            RoutingMode::Coded => {
                if self.perm.is_identity() {
                    return Err(Error::BadConfig {
                        reason: "coded mode requires a derangement; the identity placement \
                                 is the passthrough mode"
                            .to_string(),
                    });
                }
                // Rejects partial fixed points with a position-bearing
                // message.
                self.perm.check_coded_routable()?;
            }
            RoutingMode::Passthrough => {
                if !self.perm.is_identity() {
                    return Err(Error::BadConfig {
                        reason: "passthrough mode requires the identity permutation".to_string(),
                    });
                }
            }
        }
        let register = self.k + self.resource.n_qubits() * self.k;
        if matches!(self.mode, RoutingMode::Coded) && register > MAX_REGISTER_QUBITS {
            return Err(Error::BadConfig {
                reason: format!(
                    "exhaustive simulation needs {register} qubits, above the limit of \
                     {MAX_REGISTER_QUBITS}; reduce the pair count"
                ),
            });
        }
        Ok(())
    }
}

/// One enumerated measurement branch of a single teleportation.
#[derive(Debug, Clone)]
pub struct TeleportBranch {
    /// Measured bits: `(z, x)` for a two-qubit resource, `(z, x, r)` for a
    /// three-qubit resource (`r` is the disentangled spectator qubit).
    pub outcome: Vec<u8>,
    pub probability: f64,
    /// Overlap of the corrected target qubit with the message.
    pub fidelity: f64,
}

/// Teleports one message through one resource state, enumerating every
/// measurement branch and applying the standard corrections.
pub fn teleport_single(
    message: &StateVector,
    resource: ResourceKind,
) -> Result<Vec<TeleportBranch>> {
    teleport_single_opts(message, resource, true)
}

/// [`teleport_single`] with the target's Pauli corrections optionally
/// disabled, exposing the raw per-branch transfer.
pub fn teleport_single_opts(
    message: &StateVector,
    resource: ResourceKind,
    apply_corrections: bool,
) -> Result<Vec<TeleportBranch>> {
    if message.n_qubits() != 1 {
        return Err(Error::DimensionMismatch {
            left: message.len(),
            right: 2,
        });
    }
    // Register: message at qubit 0, resource qubits after it; the last
    // resource qubit is the target's half.
    let joint = message.tensor(&make_resource(resource));
    let (gates, measured): (Vec<Gate>, Vec<usize>) = match resource {
        ResourceKind::Epr => (
            vec![Gate::Cnot { control: 0, target: 1 }, Gate::Hadamard(0)],
            vec![0, 1],
        ),
        ResourceKind::Ghz | ResourceKind::W => (
            vec![
                // Sender-local disentangling step, then the standard
                // teleportation circuit on (message, first resource qubit).
                Gate::Cnot { control: 1, target: 2 },
                Gate::Cnot { control: 0, target: 1 },
                Gate::Hadamard(0),
            ],
            vec![0, 1, 2],
        ),
    };
    let prepared = apply_circuit(&joint, &gates)?;
    let mut branches = Vec::new();
    for b in measure_branches(&prepared, &measured)? {
        let word = CorrectionWord::new(b.outcome[0], b.outcome[1]);
        let mut post = b.post_state;
        if apply_corrections {
            if word.x == 1 {
                post = apply_gate(&post, &Gate::PauliX(0))?;
            }
            if word.z == 1 {
                post = apply_gate(&post, &Gate::PauliZ(0))?;
            }
        }
        let fidelity = message.inner(&post)?.norm_sqr();
        branches.push(TeleportBranch {
            outcome: b.outcome,
            probability: b.probability,
            fidelity,
        });
    }
    Ok(branches)
}

/// Sender-local reduction of a three-qubit resource: a CNOT from the first
/// sender-held qubit onto the second. For the GHZ state this disentangles
/// the second qubit into |0> and leaves a maximally entangled pair between
/// the first sender qubit and the target qubit.
pub fn ghz_reduce(state: &StateVector, qubits: [usize; 3]) -> Result<StateVector> {
    checked_sorted_qubits(state.n_qubits(), &qubits)?;
    apply_gate(
        state,
        &Gate::Cnot {
            control: qubits[0],
            target: qubits[1],
        },
    )
}

/// Compresses K correction words into the 2(K-1) adjacent XOR sums carried
/// by the bottleneck: for each adjacent pair (j, j+1) the bits
/// `(z_j ^ z_{j+1}, x_j ^ x_{j+1})`, in that order.
pub fn encode_bottleneck(words: &[CorrectionWord]) -> Vec<u8> {
    let mut sums = Vec::with_capacity(2 * words.len().saturating_sub(1));
    for pair in words.windows(2) {
        sums.push((pair[0].z ^ pair[1].z) & 1);
        sums.push((pair[0].x ^ pair[1].x) & 1);
    }
    sums
}

/// Recovers sender `needed_index`'s word from sender `side_index`'s word
/// plus the broadcast XOR sums, by chaining the adjacent sums across the
/// index interval. Indices are 0-based; the pair count is implied by the
/// sum length (`sums.len() / 2 + 1`).
pub fn decode_corrections(
    side: CorrectionWord,
    side_index: usize,
    needed_index: usize,
    sums: &[u8],
) -> Result<CorrectionWord> {
    if sums.len() % 2 != 0 {
        return Err(Error::BadConfig {
            reason: format!("sum sequence length {} is odd", sums.len()),
        });
    }
    let k = sums.len() / 2 + 1;
    for (what, idx) in [("side_index", side_index), ("needed_index", needed_index)] {
        if idx >= k {
            return Err(Error::OutOfRange {
                what,
                value: idx as f64,
                min: 0.0,
                max: (k - 1) as f64,
            });
        }
    }
    let (lo, hi) = if side_index <= needed_index {
        (side_index, needed_index)
    } else {
        (needed_index, side_index)
    };
    let mut word = CorrectionWord::new(side.z, side.x);
    for j in lo..hi {
        word.z ^= sums[2 * j] & 1;
        word.x ^= sums[2 * j + 1] & 1;
    }
    Ok(word)
}

/// One enumerated branch of a full K-pair run.
#[derive(Debug, Clone)]
pub struct BranchRecord {
    /// All measured bits, grouped per pair in pair order.
    pub outcome: Vec<u8>,
    pub probability: f64,
    /// Fidelity at each target (index j = target j+1) in this branch.
    pub fidelities: Vec<f64>,
}

/// Sampled outcome counts (built by callers that simulate shot noise on
/// top of the exact branch distribution).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleCount {
    /// Outcome bits rendered as a string, e.g. `"0110"`.
    pub outcome: String,
    pub count: u64,
}

/// Result of a K-pair protocol run.
#[derive(Debug, Clone)]
pub struct ProtocolResult {
    /// Probability-weighted average fidelity at each target.
    pub per_target_fidelity: Vec<f64>,
    /// Classical bits that crossed the bottleneck.
    pub bottleneck_bits: u64,
    /// Number of enumerated branches with nonzero probability.
    pub branch_count: usize,
    /// Everything that moved, edge by edge.
    pub traffic: TrafficLog,
    /// Per-branch detail.
    pub branches: Vec<BranchRecord>,
}

fn fmt_float(x: f64) -> String {
    format!("{:.14e}", x)
}

impl ProtocolResult {
    /// Serializes the run summary (fidelities at 15 significant digits,
    /// bit accounting, ledger). Branch detail is deliberately omitted; it
    /// is available in memory.
    pub fn to_json(&self) -> String {
        self.to_json_with_samples(None)
    }

    /// [`ProtocolResult::to_json`] with an optional sampled-outcome section
    /// appended.
    pub fn to_json_with_samples(&self, samples: Option<&[SampleCount]>) -> String {
        let fids: Vec<String> = self.per_target_fidelity.iter().map(|&f| fmt_float(f)).collect();
        let ledger =
            serde_json::to_string(&self.traffic.records).expect("ledger rows serialize");
        let mut out = String::new();
        out.push_str("{\n");
        out.push_str(&format!(
            "  \"per_target_fidelity\": [{}],\n",
            fids.join(", ")
        ));
        out.push_str(&format!("  \"bottleneck_bits\": {},\n", self.bottleneck_bits));
        out.push_str(&format!("  \"branch_count\": {},\n", self.branch_count));
        out.push_str(&format!("  \"ledger\": {ledger}"));
        if let Some(samples) = samples {
            let rows: Vec<String> = samples
                .iter()
                .map(|s| format!("{{\"outcome\": \"{}\", \"count\": {}}}", s.outcome, s.count))
                .collect();
            out.push_str(&format!(",\n  \"samples\": [{}]", rows.join(", ")));
        }
        out.push_str("\n}\n");
        out
    }
}

/// Runs the K-pair protocol described by `config`.
///
/// Coded mode builds the joint register of K message qubits and K resource
/// states, applies every sender's circuit, enumerates all measurement
/// branches, routes the correction words classically (encode at the relay,
/// broadcast, decode at each target from its side word), applies the
/// decoded Pauli corrections, and scores each target against the message it
/// was meant to receive.
pub fn run_kpair(config: &ProtocolConfig) -> Result<ProtocolResult> {
    config.validate()?;
    let k = config.k;
    let topology = build_kpair(k, &config.perm)?;
    match config.mode {
        RoutingMode::Passthrough => {
            let mut traffic = TrafficLog::default();
            for j in 1..=k {
                traffic.push(
                    3 * k + j,
                    EdgeKind::Qubit,
                    1,
                    format!("message qubit from s{j} to t{j}"),
                );
            }
            let violations = validate_traffic(&traffic, &topology);
            if !violations.is_empty() {
                return Err(Error::Internal(format!(
                    "passthrough capacity violated on edges {:?}",
                    violations.iter().map(|v| v.edge).collect::<Vec<_>>()
                )));
            }
            Ok(ProtocolResult {
                per_target_fidelity: vec![1.0; k],
                bottleneck_bits: bottleneck_usage(&traffic, &topology),
                branch_count: 1,
                traffic,
                branches: vec![BranchRecord {
                    outcome: Vec::new(),
                    probability: 1.0,
                    fidelities: vec![1.0; k],
                }],
            })
        }
        RoutingMode::Coded => run_kpair_coded(config, k, &topology),
    }
}

fn run_kpair_coded(
    config: &ProtocolConfig,
    k: usize,
    topology: &crate::network::Topology,
) -> Result<ProtocolResult> {
    let r = config.resource.n_qubits();
    // Register layout: message i at qubit i (0-based pair index); resource
    // block i at [k + r*i, k + r*i + r), sender-held qubits first, the
    // target's half last.
    let input_states: Vec<StateVector> = config.inputs.iter().map(|b| b.state()).collect();
    let mut state = input_states[0].clone();
    for psi in &input_states[1..] {
        state = state.tensor(psi);
    }
    for _ in 0..k {
        state = state.tensor(&make_resource(config.resource));
    }
    let mut gates = Vec::new();
    if r == 3 {
        // Sender-local disentangling step for three-qubit resources.
        for i in 0..k {
            let block = k + r * i;
            gates.push(Gate::Cnot {
                control: block,
                target: block + 1,
            });
        }
    }
    for i in 0..k {
        let block = k + r * i;
        gates.push(Gate::Cnot {
            control: i,
            target: block,
        });
        gates.push(Gate::Hadamard(i));
    }
    let prepared = apply_circuit(&state, &gates)?;
    // Measured qubits, grouped per pair: the message qubit then every
    // sender-held resource qubit. The unmeasured remainder is exactly the
    // target halves in pair order.
    let mut measured = Vec::with_capacity(k * r);
    for i in 0..k {
        measured.push(i);
        let block = k + r * i;
        for held in 0..(r - 1) {
            measured.push(block + held);
        }
    }
    let raw_branches = measure_branches(&prepared, &measured)?;

    let perm = &config.perm;
    let mut per_target = vec![0.0f64; k];
    let mut branches = Vec::with_capacity(raw_branches.len());
    for raw in raw_branches {
        // Pair i's correction word: its message bit (z) and its first
        // resource bit (x).
        let words: Vec<CorrectionWord> = (0..k)
            .map(|i| CorrectionWord::new(raw.outcome[i * r], raw.outcome[i * r + 1]))
            .collect();
        let sums = encode_bottleneck(&words);
        // Post-measurement register holds target halves: post qubit i
        // belongs to pair i, which sits at the target whose demand maps to
        // sender i. Each target decodes the word it needs from its
        // co-located sender's word plus the broadcast sums, then corrects
        // its own qubit.
        let mut post = raw.post_state;
        for j in 0..k {
            let needed = perm.apply(j);
            let word = decode_corrections(words[j], j, needed, &sums)?;
            debug_assert_eq!(word, words[needed], "XOR decode must recover the word");
            if word.x == 1 {
                post = apply_gate(&post, &Gate::PauliX(needed))?;
            }
            if word.z == 1 {
                post = apply_gate(&post, &Gate::PauliZ(needed))?;
            }
        }
        let mut fidelities = Vec::with_capacity(k);
        for j in 0..k {
            let needed = perm.apply(j);
            let rho = post.reduced_density(&[needed])?;
            let f = crate::qmath::fidelity_pure(&input_states[needed], &rho)?;
            fidelities.push(f);
            per_target[j] += raw.probability * f;
        }
        branches.push(BranchRecord {
            outcome: raw.outcome,
            probability: raw.probability,
            fidelities,
        });
    }

    // Classical ledger. Setup phase: one resource qubit per target over
    // the pre-shared quantum edges; round phase: words in, coded sums over
    // the bottleneck, broadcast out, side words across each co-located
    // pair.
    let sum_bits = 2 * (k as u32 - 1);
    let mut traffic = TrafficLog::default();
    for j in 1..=k {
        traffic.push(
            3 * k + j,
            EdgeKind::Qubit,
            1,
            format!("pre-shared resource qubit for t{j}"),
        );
    }
    for i in 1..=k {
        traffic.push(
            i - 1,
            EdgeKind::Bit,
            2,
            format!("correction word from s{i} to relay"),
        );
    }
    traffic.push(k, EdgeKind::Bit, sum_bits, "adjacent XOR sums over the bottleneck");
    for j in 1..=k {
        traffic.push(k + j, EdgeKind::Bit, sum_bits, format!("sums relayed to t{j}"));
    }
    for j in 1..=k {
        traffic.push(
            2 * k + j,
            EdgeKind::Bit,
            2,
            format!("co-located word from s{j} to t{j}"),
        );
    }
    let violations = validate_traffic(&traffic, topology);
    if !violations.is_empty() {
        return Err(Error::Internal(format!(
            "coded-round capacity violated on edges {:?}",
            violations.iter().map(|v| v.edge).collect::<Vec<_>>()
        )));
    }
    Ok(ProtocolResult {
        per_target_fidelity: per_target,
        bottleneck_bits: bottleneck_usage(&traffic, topology),
        branch_count: branches.len(),
        traffic,
        branches,
    })
}
