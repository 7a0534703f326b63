//! Independent density-matrix oracle for teleportation through a W
//! resource.
//!
//! The oracle never touches the simulator's state-vector evolution: it
//! builds the full 16x16 unitary from hand-written gate constants,
//! projects each measurement outcome with explicit projector matrices,
//! traces out the measured qubits, applies the Pauli correction as a 2x2
//! matrix product, and scores the overlap by direct summation. Agreement
//! with the branch simulator is then evidence for both.

use qnetcode::circuits::ResourceKind;
use qnetcode::discord_teleport::bloch_state;
use qnetcode::protocols::teleport_single;
use qnetcode::qmath::{c64, mat_partial_trace, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PI: f64 = std::f64::consts::PI;

/// Column-vector Kronecker product.
fn vec_kron(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &x in a {
        for &y in b {
            out.push(x * y);
        }
    }
    out
}

/// Square-matrix Kronecker product (row-major), written out longhand so
/// the oracle does not depend on the library's own helper.
fn kron(da: usize, a: &[C64], db: usize, b: &[C64]) -> Vec<C64> {
    let d = da * db;
    let mut out = vec![c64(0.0, 0.0); d * d];
    for ra in 0..da {
        for ca in 0..da {
            for rb in 0..db {
                for cb in 0..db {
                    out[(ra * db + rb) * d + (ca * db + cb)] = a[ra * da + ca] * b[rb * db + cb];
                }
            }
        }
    }
    out
}

fn matmul(d: usize, a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = vec![c64(0.0, 0.0); d * d];
    for r in 0..d {
        for k in 0..d {
            let ark = a[r * d + k];
            if ark.norm_sqr() == 0.0 {
                continue;
            }
            for c in 0..d {
                out[r * d + c] += ark * b[k * d + c];
            }
        }
    }
    out
}

fn dagger(d: usize, a: &[C64]) -> Vec<C64> {
    let mut out = vec![c64(0.0, 0.0); d * d];
    for r in 0..d {
        for c in 0..d {
            out[c * d + r] = a[r * d + c].conj();
        }
    }
    out
}

fn identity(d: usize) -> Vec<C64> {
    let mut out = vec![c64(0.0, 0.0); d * d];
    for i in 0..d {
        out[i * d + i] = c64(1.0, 0.0);
    }
    out
}

struct OracleBranch {
    outcome: [u8; 3],
    probability: f64,
    fidelity: f64,
}

/// Exact outcome table for the W teleportation schedule: message on qubit
/// 0, W state on qubits 1..3 (qubit 3 is the target's). Circuit:
/// CNOT(1->2), CNOT(0->1), H(0); measure qubits 0,1,2; correct with
/// Z^{m0} X^{m1} on qubit 3.
fn oracle_branches(theta: f64, phi: f64) -> Vec<OracleBranch> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let hadamard = [c64(h, 0.0), c64(h, 0.0), c64(h, 0.0), c64(-h, 0.0)];
    // Control is the first (most significant) qubit of the pair.
    let mut cnot = vec![c64(0.0, 0.0); 16];
    for (col, row) in [(0usize, 0usize), (1, 1), (2, 3), (3, 2)] {
        cnot[row * 4 + col] = c64(1.0, 0.0);
    }
    let pauli_x = [c64(0.0, 0.0), c64(1.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0)];
    let pauli_z = [c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(-1.0, 0.0)];
    let ket0 = [c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0)];
    let ket1 = [c64(0.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0)];

    // Message and resource as raw vectors; basis index bit 3 is qubit 0.
    let alpha = c64((theta / 2.0).cos(), 0.0);
    let beta = C64::from_polar((theta / 2.0).sin(), phi);
    let msg = [alpha, beta];
    let s3 = 1.0 / 3.0f64.sqrt();
    let mut w = vec![c64(0.0, 0.0); 8];
    w[0b100] = c64(s3, 0.0);
    w[0b010] = c64(s3, 0.0);
    w[0b001] = c64(s3, 0.0);
    let psi = vec_kron(&msg, &w);

    // U = (H on qubit 0) . (CNOT on 0,1) . (CNOT on 1,2), each embedded in
    // the 16-dimensional register.
    let u1 = kron(2, &identity(2), 8, &kron(4, &cnot, 2, &identity(2)));
    let u2 = kron(4, &cnot, 4, &identity(4));
    let u3 = kron(2, &hadamard, 8, &identity(8));
    let u = matmul(16, &u3, &matmul(16, &u2, &u1));

    let mut rho = vec![c64(0.0, 0.0); 256];
    for r in 0..16 {
        for c in 0..16 {
            rho[r * 16 + c] = psi[r] * psi[c].conj();
        }
    }
    let rho = matmul(16, &u, &matmul(16, &rho, &dagger(16, &u)));

    let mut branches = Vec::new();
    for m0 in 0..2u8 {
        for m1 in 0..2u8 {
            for m2 in 0..2u8 {
                let pick = |b: u8| if b == 0 { &ket0 } else { &ket1 };
                let proj = kron(
                    2,
                    pick(m0),
                    8,
                    &kron(2, pick(m1), 4, &kron(2, pick(m2), 2, &identity(2))),
                );
                let projected = matmul(16, &proj, &matmul(16, &rho, &proj));
                let p: f64 = (0..16).map(|i| projected[i * 16 + i].re).sum();
                if p <= 1e-12 {
                    continue;
                }
                let (dim, reduced) = mat_partial_trace(4, &projected, &[3]).unwrap();
                assert_eq!(dim, 2);
                let target: Vec<C64> = reduced.iter().map(|z| z / p).collect();
                // Z^{m0} X^{m1}, applied as C rho C^dagger.
                let mut corr = identity(2);
                if m1 == 1 {
                    corr = matmul(2, &pauli_x, &corr);
                }
                if m0 == 1 {
                    corr = matmul(2, &pauli_z, &corr);
                }
                let corrected = matmul(2, &corr, &matmul(2, &target, &dagger(2, &corr)));
                let mut fid = c64(0.0, 0.0);
                for r in 0..2 {
                    for c in 0..2 {
                        fid += msg[r].conj() * corrected[r * 2 + c] * msg[c];
                    }
                }
                branches.push(OracleBranch {
                    outcome: [m0, m1, m2],
                    probability: p,
                    fidelity: fid.re,
                });
            }
        }
    }
    branches
}

fn oracle_average(theta: f64, phi: f64) -> f64 {
    oracle_branches(theta, phi)
        .iter()
        .map(|b| b.probability * b.fidelity)
        .sum()
}

fn simulated_average(theta: f64, phi: f64) -> f64 {
    teleport_single(&bloch_state(theta, phi).unwrap(), ResourceKind::W)
        .unwrap()
        .iter()
        .map(|b| b.probability * b.fidelity)
        .sum()
}

#[test]
fn oracle_probabilities_sum_to_one() {
    for (theta, phi) in [(0.0, 0.0), (PI / 2.0, 0.0), (1.234, 4.2), (PI, 1.0)] {
        let total: f64 = oracle_branches(theta, phi).iter().map(|b| b.probability).sum();
        assert!((total - 1.0).abs() < 1e-12, "theta={theta} phi={phi}: {total}");
    }
}

#[test]
fn oracle_matches_hand_derived_branch_table() {
    // For message alpha|0> + beta|1>, the eight outcomes (m0, m1, m2) have
    //   p(0,1,1) = p(0,0,1) = |alpha+beta|^2 / 6
    //   p(1,1,1) = p(1,0,1) = |alpha-beta|^2 / 6
    //   p(0,0,0) = p(1,0,0) = |alpha|^2 / 3 ... split as |alpha|^2/6 each
    //   p(0,1,0) = p(1,1,0) = |beta|^2 / 6
    // with corrected fidelities |beta|^2, |alpha|^2, |beta|^2, |alpha|^2
    // paired as below.
    let theta = 1.1f64;
    let phi = 0.7f64;
    let alpha = c64((theta / 2.0).cos(), 0.0);
    let beta = C64::from_polar((theta / 2.0).sin(), phi);
    let plus = (alpha + beta).norm_sqr() / 6.0;
    let minus = (alpha - beta).norm_sqr() / 6.0;
    let a2 = alpha.norm_sqr();
    let b2 = beta.norm_sqr();
    let expect: Vec<([u8; 3], f64, f64)> = vec![
        ([0, 0, 0], a2 / 6.0, b2),
        ([0, 0, 1], plus, a2),
        ([0, 1, 0], b2 / 6.0, a2),
        ([0, 1, 1], plus, b2),
        ([1, 0, 0], a2 / 6.0, b2),
        ([1, 0, 1], minus, a2),
        ([1, 1, 0], b2 / 6.0, a2),
        ([1, 1, 1], minus, b2),
    ];
    let got = oracle_branches(theta, phi);
    assert_eq!(got.len(), 8);
    for (outcome, p, f) in expect {
        let row = got.iter().find(|b| b.outcome == outcome).unwrap();
        assert!(
            (row.probability - p).abs() < 1e-12,
            "{outcome:?}: p {} vs {p}",
            row.probability
        );
        assert!(
            (row.fidelity - f).abs() < 1e-12,
            "{outcome:?}: f {} vs {f}",
            row.fidelity
        );
    }
}

#[test]
fn simulator_agrees_with_oracle_branch_by_branch() {
    let mut rng = ChaCha8Rng::seed_from_u64(20260815);
    for _ in 0..10 {
        let theta = rng.gen_range(0.0..PI);
        let phi = rng.gen_range(0.0..2.0 * PI);
        let oracle = oracle_branches(theta, phi);
        let sim = teleport_single(&bloch_state(theta, phi).unwrap(), ResourceKind::W).unwrap();
        assert_eq!(oracle.len(), sim.len(), "theta={theta} phi={phi}");
        for ob in &oracle {
            let sb = sim
                .iter()
                .find(|b| b.outcome == ob.outcome)
                .unwrap_or_else(|| panic!("missing outcome {:?}", ob.outcome));
            assert!((sb.probability - ob.probability).abs() < 1e-12);
            assert!((sb.fidelity - ob.fidelity).abs() < 1e-12);
        }
    }
}

#[test]
fn simulator_average_matches_oracle_for_random_inputs() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10 {
        let theta = rng.gen_range(0.0..PI);
        let phi = rng.gen_range(0.0..2.0 * PI);
        let sim = simulated_average(theta, phi);
        let ora = oracle_average(theta, phi);
        assert!(
            (sim - ora).abs() < 1e-9,
            "theta={theta} phi={phi}: sim {sim} vs oracle {ora}"
        );
        // Both track the closed expression 1/3 + sin^2(theta)/6.
        let formula = 1.0 / 3.0 + theta.sin().powi(2) / 6.0;
        assert!((sim - formula).abs() < 1e-12);
    }
}

#[test]
fn frozen_reference_points() {
    // Basis input: average 1/3 and only six reachable outcomes.
    assert!((oracle_average(0.0, 0.0) - 1.0 / 3.0).abs() < 1e-12);
    assert_eq!(oracle_branches(0.0, 0.0).len(), 6);
    assert!((simulated_average(0.0, 0.0) - 1.0 / 3.0).abs() < 1e-12);
    // Equator input at zero phase: alpha = beta, so the two
    // |alpha - beta|^2 outcomes vanish and six branches remain.
    assert!((oracle_average(PI / 2.0, 0.0) - 0.5).abs() < 1e-12);
    assert_eq!(oracle_branches(PI / 2.0, 0.0).len(), 6);
    assert!((simulated_average(PI / 2.0, 0.0) - 0.5).abs() < 1e-12);
    // A nonzero phase revives them; the average stays 1/2.
    assert_eq!(oracle_branches(PI / 2.0, 2.5).len(), 8);
    assert!((simulated_average(PI / 2.0, 2.5) - 0.5).abs() < 1e-12);
}
