//! Teleportation through Bell-diagonal (maximally-mixed-marginal) channels,
//! the closed-form output state and fidelity, a printed-formula cross-check,
//! fidelity surface sweeps with a pinned CSV schema, and the two-pair
//! butterfly protocol driven by such channels.
//!
//! Three independent routes compute the teleportation output and are tested
//! against each other:
//!
//! 1. [`output_state`] — the closed-form 2x2 matrix;
//! 2. [`teleport_circuit`] — full 3-qubit protocol simulation (Bell
//!    measurement plus Pauli corrections, summed over outcomes);
//! 3. [`teleport_operator_sum`] — the channel's Bell-weight operator-sum
//!    `sum_k w_k sigma_k rho sigma_k`.
//!
//! The CSV column names `fidelity_eq21` / `fidelity_eq22_*` are a pinned
//! wire format consumed by downstream tooling; do not rename them.

use crate::circuits::{circuit_unitary, Gate};
use crate::correlations::{bell_diagonal, BellDiagonalParams};
use crate::network::{
    bottleneck_usage, butterfly_with_capacity, validate_traffic, EdgeKind, TrafficLog,
};
use crate::qmath::{
    c64, fidelity_pure, mat_adjoint, mat_kron, mat_mul, C64, DensityMatrix, StateVector,
};
use crate::{Error, Result};

/// A pure qubit state named by its Bloch-sphere angles:
/// `cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct BlochState {
    theta: f64,
    phi: f64,
}

impl BlochState {
    /// Requires `theta` in `[0, pi]` and `phi` in `[0, 2 pi)`.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !phi.is_finite() {
            return Err(Error::NonFinite { what: "Bloch angle" });
        }
        if !(0.0..=std::f64::consts::PI).contains(&theta) {
            return Err(Error::OutOfRange {
                what: "theta",
                value: theta,
                min: 0.0,
                max: std::f64::consts::PI,
            });
        }
        let two_pi = 2.0 * std::f64::consts::PI;
        if !(0.0..two_pi).contains(&phi) {
            return Err(Error::OutOfRange {
                what: "phi",
                value: phi,
                min: 0.0,
                max: two_pi,
            });
        }
        Ok(Self { theta, phi })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// The state vector on one qubit.
    pub fn state(&self) -> StateVector {
        state_raw(self.theta, self.phi)
    }
}

fn state_raw(theta: f64, phi: f64) -> StateVector {
    let c = (theta / 2.0).cos();
    let s = (theta / 2.0).sin();
    StateVector::from_raw(1, vec![c64(c, 0.0), C64::from_polar(s, phi)])
}

/// Convenience: validated Bloch angles straight to a state vector.
pub fn bloch_state(theta: f64, phi: f64) -> Result<StateVector> {
    Ok(BlochState::new(theta, phi)?.state())
}

/// The two transfer weights of the one-parameter channel family:
/// `flip = 1 - c3` multiplies the input's bit-flipped component and
/// `keep = 1 + c3` the preserved component in the output state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferWeights {
    pub flip: f64,
    pub keep: f64,
}

impl TransferWeights {
    pub fn from_c3(c3: f64) -> Self {
        Self {
            flip: 1.0 - c3,
            keep: 1.0 + c3,
        }
    }
}

fn output_state_raw(theta: f64, phi: f64, c3: f64) -> DensityMatrix {
    let TransferWeights { flip: t1, keep: t2 } = TransferWeights::from_c3(c3);
    let ch = (theta / 2.0).cos();
    let sh = (theta / 2.0).sin();
    let e_minus = C64::from_polar(1.0, -phi);
    let e_plus = C64::from_polar(1.0, phi);
    let cross = 0.5 * ch * sh;
    let m00 = c64(0.5 * (t1 * sh * sh + t2 * ch * ch), 0.0);
    let m01 = (t1 * e_minus + t2 * e_plus) * cross;
    let m10 = (t2 * e_minus + t1 * e_plus) * cross;
    let m11 = c64(0.5 * (t2 * sh * sh + t1 * ch * ch), 0.0);
    DensityMatrix::new(2, vec![m00, m01, m10, m11])
        .expect("closed-form output is Hermitian with unit trace")
}

/// Closed-form output of teleporting `input` through the channel
/// `bell_diagonal(1, c3, c3)`. Hermitian and trace-one for every `c3`;
/// positive (a physical state) only when the channel itself is physical.
pub fn output_state(input: &BlochState, c3: f64) -> DensityMatrix {
    output_state_raw(input.theta, input.phi, c3)
}

fn output_fidelity_raw(theta: f64, phi: f64, c3: f64) -> f64 {
    fidelity_pure(&state_raw(theta, phi), &output_state_raw(theta, phi, c3))
        .expect("dimensions match by construction")
}

/// Canonical teleportation fidelity `<psi_in| rho_out |psi_in>` through the
/// `bell_diagonal(1, c3, c3)` channel.
pub fn output_fidelity(input: &BlochState, c3: f64) -> f64 {
    output_fidelity_raw(input.theta, input.phi, c3)
}

fn fidelity_formula_raw(theta: f64, phi: f64, c3: f64) -> C64 {
    let t1 = 1.0 - c3;
    let c2h = (theta / 2.0).cos().powi(2);
    let s2h = (theta / 2.0).sin().powi(2);
    let ct = theta.cos();
    let cp = phi.cos();
    let sp = phi.sin();
    let first = C64::from_polar(1.0, 2.0 * phi)
        * c2h
        * c64(
            (2.0 - t1 * ct) * cp,
            -sp * (1.0 + c3 * (-1.0 + 2.0 * ct)),
        );
    let second = s2h
        * c64(
            (-2.0 - t1 * ct) * cp,
            sp * (-1.0 + c3 * (1.0 + 2.0 * ct)),
        );
    0.5 * C64::from_polar(1.0, -phi) * (first - second)
}

/// A published closed-form fidelity expression for the same channel,
/// transcribed literally as a complex-valued formula.
///
/// It is kept as a cross-check against [`output_fidelity`], which is the
/// value trusted everywhere else; the sweep records the deviation per cell
/// rather than assuming the two agree.
pub fn fidelity_formula(input: &BlochState, c3: f64) -> C64 {
    fidelity_formula_raw(input.theta, input.phi, c3)
}

/// Full teleportation-protocol simulation through an arbitrary two-qubit
/// channel operator.
///
/// Register: qubit 0 = message, qubit 1 = channel half at the sender,
/// qubit 2 = channel half at the target. The sender applies
/// CNOT(0 -> 1) and H(0), both measured qubits are projected onto each of
/// the four outcomes `(z, x)`, the target applies `X^x` then `Z^z`, and the
/// four corrected conditional outputs are summed with their Born weights.
///
/// The channel must be Hermitian with unit trace; positivity is *not*
/// required (the algebra is linear), so formally non-positive channel
/// operators propagate their non-positivity into the output, where
/// [`DensityMatrix::is_physical`] exposes it.
pub fn teleport_circuit(message: &StateVector, channel: &DensityMatrix) -> Result<DensityMatrix> {
    if message.n_qubits() != 1 {
        return Err(Error::DimensionMismatch {
            left: message.len(),
            right: 2,
        });
    }
    if channel.dim() != 4 {
        return Err(Error::DimensionMismatch {
            left: channel.dim(),
            right: 4,
        });
    }
    let msg_rho = DensityMatrix::from_pure(message);
    let rho8 = mat_kron(2, msg_rho.entries(), 4, channel.entries());
    let u = circuit_unitary(
        &[Gate::Cnot { control: 0, target: 1 }, Gate::Hadamard(0)],
        3,
    )?;
    let evolved = mat_mul(8, &mat_mul(8, &u, &rho8), &mat_adjoint(8, &u));
    let x_mat = [c64(0.0, 0.0), c64(1.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0)];
    let z_mat = [c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(-1.0, 0.0)];
    let id2 = [c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0)];
    let mut total = vec![c64(0.0, 0.0); 4];
    for z in 0..2usize {
        for x in 0..2usize {
            // Unnormalized conditional block of the target qubit for
            // measurement outcome (z, x).
            let base = z * 4 + x * 2;
            let mut block = vec![c64(0.0, 0.0); 4];
            for b in 0..2 {
                for bp in 0..2 {
                    block[b * 2 + bp] = evolved[(base + b) * 8 + (base + bp)];
                }
            }
            // Correction X^x then Z^z.
            let mut corr = id2.to_vec();
            if x == 1 {
                corr = mat_mul(2, &x_mat, &corr);
            }
            if z == 1 {
                corr = mat_mul(2, &z_mat, &corr);
            }
            let fixed = mat_mul(2, &mat_mul(2, &corr, &block), &mat_adjoint(2, &corr));
            for (t, f) in total.iter_mut().zip(&fixed) {
                *t += f;
            }
        }
    }
    DensityMatrix::new(2, total)
}

/// Operator-sum route: decompose the Bell-diagonal channel into its Bell
/// weights and apply the equivalent Pauli mixture
/// `w1 rho + w2 Z rho Z + w3 X rho X + w4 (XZ) rho (XZ)^dagger`.
///
/// Algebraically identical to [`teleport_circuit`] on
/// [`bell_diagonal`] channels for any parameters, physical or not; used as
/// an independent verification route.
pub fn teleport_operator_sum(
    message: &StateVector,
    params: &BellDiagonalParams,
) -> Result<DensityMatrix> {
    if message.n_qubits() != 1 {
        return Err(Error::DimensionMismatch {
            left: message.len(),
            right: 2,
        });
    }
    let weights = params.bell_weights();
    let rho = DensityMatrix::from_pure(message);
    let id2 = vec![c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0)];
    let x_mat = vec![c64(0.0, 0.0), c64(1.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0)];
    let z_mat = vec![c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(-1.0, 0.0)];
    let xz = mat_mul(2, &x_mat, &z_mat);
    // Kraus directions matched to the Bell-weight order
    // (|00>+|11>, |00>-|11>, |01>+|10>, |01>-|10>): identity, phase flip,
    // bit flip, and both.
    let ops = [&id2, &z_mat, &x_mat, &xz];
    let mut total = vec![c64(0.0, 0.0); 4];
    for (w, op) in weights.iter().zip(ops) {
        let term = mat_mul(2, &mat_mul(2, op, rho.entries()), &mat_adjoint(2, op));
        for (t, v) in total.iter_mut().zip(&term) {
            *t += *w * v;
        }
    }
    DensityMatrix::new(2, total)
}

/// One grid cell of a fidelity sweep.
#[derive(Debug, Clone, Copy)]
pub struct SurfaceCell {
    pub theta: f64,
    pub phi: f64,
    /// Canonical fidelity (overlap of input with the closed-form output).
    pub fidelity: f64,
    /// The literal printed-formula evaluation (complex).
    pub formula: C64,
    /// `|fidelity - formula|` as a complex modulus.
    pub abs_diff: f64,
}

/// Row-major fidelity surface over a theta x phi grid at fixed `c3`.
#[derive(Debug, Clone)]
pub struct FidelitySurface {
    theta_axis: Vec<f64>,
    phi_axis: Vec<f64>,
    c3: f64,
    physical: bool,
    cells: Vec<SurfaceCell>,
}

impl FidelitySurface {
    pub fn theta_axis(&self) -> &[f64] {
        &self.theta_axis
    }

    pub fn phi_axis(&self) -> &[f64] {
        &self.phi_axis
    }

    pub fn c3(&self) -> f64 {
        self.c3
    }

    /// Whether the underlying channel operator is a physical state.
    pub fn is_physical(&self) -> bool {
        self.physical
    }

    pub fn cells(&self) -> &[SurfaceCell] {
        &self.cells
    }

    /// Cell at theta index `i`, phi index `j`.
    pub fn cell(&self, i: usize, j: usize) -> &SurfaceCell {
        &self.cells[i * self.phi_axis.len() + j]
    }

    /// The cell with the largest canonical fidelity (first in row-major
    /// order among exact ties).
    pub fn max_cell(&self) -> &SurfaceCell {
        let mut best = &self.cells[0];
        for cell in &self.cells[1..] {
            if cell.fidelity > best.fidelity {
                best = cell;
            }
        }
        best
    }

    /// Largest deviation between the canonical fidelity and the printed
    /// formula over the grid.
    pub fn max_abs_diff(&self) -> f64 {
        self.cells.iter().map(|c| c.abs_diff).fold(0.0, f64::max)
    }

    /// Renders the pinned CSV schema. Floats carry 15 significant digits;
    /// the header and column order are a wire format and must not change.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.cells.len() * 96 + 96);
        out.push_str(
            "theta,phi,c3,fidelity_eq21,fidelity_eq22_re,fidelity_eq22_im,abs_diff,physical\n",
        );
        for cell in &self.cells {
            out.push_str(&format!(
                "{:.14e},{:.14e},{:.14e},{:.14e},{:.14e},{:.14e},{:.14e},{}\n",
                cell.theta,
                cell.phi,
                self.c3,
                cell.fidelity,
                cell.formula.re,
                cell.formula.im,
                cell.abs_diff,
                self.physical
            ));
        }
        out
    }
}

/// Default grid resolution for [`sweep_fidelity`] (one-degree steps over
/// inclusive axes).
pub const DEFAULT_SWEEP_STEPS: usize = 181;

/// Sweeps the canonical fidelity and the printed formula over an inclusive
/// `[0, pi] x [0, 2 pi]` grid with the given number of points per axis
/// (at least 2 each).
pub fn sweep_fidelity(theta_steps: usize, phi_steps: usize, c3: f64) -> Result<FidelitySurface> {
    if theta_steps < 2 || phi_steps < 2 {
        return Err(Error::BadConfig {
            reason: format!(
                "sweep needs at least 2 points per axis, got {theta_steps} x {phi_steps}"
            ),
        });
    }
    let pi = std::f64::consts::PI;
    let theta_axis: Vec<f64> = (0..theta_steps)
        .map(|i| pi * i as f64 / (theta_steps - 1) as f64)
        .collect();
    let phi_axis: Vec<f64> = (0..phi_steps)
        .map(|j| 2.0 * pi * j as f64 / (phi_steps - 1) as f64)
        .collect();
    sweep_fidelity_axes(&theta_axis, &phi_axis, c3)
}

/// [`sweep_fidelity`] over explicit axes (each nonempty; singleton axes are
/// allowed, which is how a fixed-phi line sweep is expressed).
pub fn sweep_fidelity_axes(
    theta_axis: &[f64],
    phi_axis: &[f64],
    c3: f64,
) -> Result<FidelitySurface> {
    if theta_axis.is_empty() || phi_axis.is_empty() {
        return Err(Error::BadConfig {
            reason: "sweep axes must be nonempty".to_string(),
        });
    }
    if theta_axis.iter().chain(phi_axis).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { what: "sweep axis" });
    }
    // Validates |c3| <= 1 and determines the physicality flag.
    let params = BellDiagonalParams::new(1.0, c3, c3)?;
    let physical = params.is_physical();
    let mut cells = Vec::with_capacity(theta_axis.len() * phi_axis.len());
    for &theta in theta_axis {
        for &phi in phi_axis {
            let fidelity = output_fidelity_raw(theta, phi, c3);
            let formula = fidelity_formula_raw(theta, phi, c3);
            let abs_diff = (formula - c64(fidelity, 0.0)).norm();
            cells.push(SurfaceCell {
                theta,
                phi,
                fidelity,
                formula,
                abs_diff,
            });
        }
    }
    Ok(FidelitySurface {
        theta_axis: theta_axis.to_vec(),
        phi_axis: phi_axis.to_vec(),
        c3,
        physical,
        cells,
    })
}

/// Result of the two-pair butterfly protocol with Bell-diagonal channels.
#[derive(Debug, Clone)]
pub struct ButterflyOutcome {
    /// Fidelity at targets 1 and 2 against their intended inputs.
    pub fidelity: [f64; 2],
    /// Physicality of each channel operator.
    pub physical: [bool; 2],
    /// Classical traffic, validated against the butterfly capacities.
    pub traffic: TrafficLog,
    /// Classical bits crossing the bottleneck (always 2: one z-sum, one
    /// x-sum).
    pub bottleneck_bits: u64,
}

/// Runs the butterfly network with each message teleported through its own
/// Bell-diagonal channel and the four correction bits compressed to two
/// XOR sums at the bottleneck.
///
/// Every edge carries two classical bits (the qubit-equivalent round: one
/// teleported qubit costs exactly two bits), so capacities hold by
/// construction; a violation is reported as an internal error.
pub fn run_butterfly_discord(
    in1: &BlochState,
    in2: &BlochState,
    ch1: &BellDiagonalParams,
    ch2: &BellDiagonalParams,
) -> Result<ButterflyOutcome> {
    let topology = butterfly_with_capacity(2);
    let inputs = [in1, in2];
    let channels = [ch1, ch2];
    let mut fidelity = [0.0f64; 2];
    let mut physical = [false; 2];
    for k in 0..2 {
        let psi = inputs[k].state();
        let channel = bell_diagonal(channels[k]);
        physical[k] = channel.is_physical();
        let out = teleport_circuit(&psi, &channel)?;
        fidelity[k] = fidelity_pure(&psi, &out)?;
    }
    // Classical layer: both senders forward their (z, x) word to the relay,
    // the relay sends the two XOR sums over the bottleneck for broadcast,
    // and each sender's word also reaches the opposite target directly, so
    // each target can un-XOR the word it needs.
    let mut traffic = TrafficLog::default();
    traffic.push(0, EdgeKind::Bit, 2, "correction word from s1 to relay");
    traffic.push(1, EdgeKind::Bit, 2, "correction word from s2 to relay");
    traffic.push(2, EdgeKind::Bit, 2, "XOR sums (z1^z2, x1^x2) over the bottleneck");
    traffic.push(3, EdgeKind::Bit, 2, "sums relayed to t1");
    traffic.push(4, EdgeKind::Bit, 2, "sums relayed to t2");
    traffic.push(5, EdgeKind::Bit, 2, "word from s1 for decoding at t2");
    traffic.push(6, EdgeKind::Bit, 2, "word from s2 for decoding at t1");
    let violations = validate_traffic(&traffic, &topology);
    if !violations.is_empty() {
        return Err(Error::Internal(format!(
            "butterfly capacity violated on edges {:?}",
            violations.iter().map(|v| v.edge).collect::<Vec<_>>()
        )));
    }
    let bottleneck_bits = bottleneck_usage(&traffic, &topology);
    Ok(ButterflyOutcome {
        fidelity,
        physical,
        traffic,
        bottleneck_bits,
    })
}
