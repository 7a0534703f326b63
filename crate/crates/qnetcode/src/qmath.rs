//! Dense complex linear algebra for small quantum registers.
//!
//! Conventions used across the crate:
//!
//! * Qubit 0 is the **most significant** bit of a basis index, so the basis
//!   state |q0 q1 ... q_{n-1}> has index `q0*2^(n-1) + ... + q_{n-1}`.
//! * Matrices are stored row-major as flat `Vec<C64>`.
//! * All tolerances are fixed constants, declared below, so behaviour is
//!   identical across runs and platforms.
//!
//! The eigensolver is a cyclic Jacobi iteration specialised for the complex
//! Hermitian matrices this crate produces (dimension at most 2^5); its
//! ordering and eigenvector phases are canonicalised so that equal inputs
//! yield byte-identical outputs.

use num_complex::Complex64;

use crate::{Error, Result};

/// Complex scalar used throughout the crate.
pub type C64 = Complex64;

/// Shorthand constructor for a complex scalar.
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// State vectors must stay normalized to within this tolerance.
pub const NORM_TOL: f64 = 1e-12;
/// Maximum permitted |a_ij - conj(a_ji)| for matrices declared Hermitian.
pub const HERMITICITY_TOL: f64 = 1e-10;
/// Density-operator traces must equal 1 to within this tolerance.
pub const TRACE_TOL: f64 = 1e-10;
/// A density operator is physical when its minimum eigenvalue is at least
/// `-PSD_TOL`; eigenvalues in `[-PSD_TOL, 0)` are treated as zero by the
/// entropy routines.
pub const PSD_TOL: f64 = 1e-9;

fn all_finite(values: &[C64]) -> bool {
    values.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Number of qubits for a power-of-two dimension, or an error.
pub(crate) fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::NotPowerOfTwo { dim });
    }
    Ok(dim.trailing_zeros() as usize)
}

/// Validates that `qubits` are distinct and in range for an `n`-qubit
/// register, returning a sorted copy.
pub(crate) fn checked_sorted_qubits(n: usize, qubits: &[usize]) -> Result<Vec<usize>> {
    if qubits.is_empty() {
        return Err(Error::EmptyQubitList);
    }
    let mut sorted = qubits.to_vec();
    sorted.sort_unstable();
    for pair in sorted.windows(2) {
        if pair[0] == pair[1] {
            return Err(Error::DuplicateQubit { qubit: pair[0] });
        }
    }
    if let Some(&q) = sorted.last() {
        if q >= n {
            return Err(Error::QubitOutOfRange {
                qubit: q,
                n_qubits: n,
            });
        }
    }
    Ok(sorted)
}

/// Places the bits of `value` (MSB-first over `positions`) at the stated
/// qubit positions of an `n`-qubit basis index.
pub(crate) fn scatter_bits(n: usize, positions: &[usize], value: usize) -> usize {
    let m = positions.len();
    let mut index = 0;
    for (t, &q) in positions.iter().enumerate() {
        let bit = (value >> (m - 1 - t)) & 1;
        index |= bit << (n - 1 - q);
    }
    index
}

// ---------------------------------------------------------------------------
// Raw matrix helpers
// ---------------------------------------------------------------------------

/// `dim x dim` identity matrix.
pub fn mat_identity(dim: usize) -> Vec<C64> {
    let mut m = vec![C64::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        m[i * dim + i] = C64::new(1.0, 0.0);
    }
    m
}

/// Product of two square `dim x dim` matrices.
pub fn mat_mul(dim: usize, a: &[C64], b: &[C64]) -> Vec<C64> {
    assert_eq!(a.len(), dim * dim);
    assert_eq!(b.len(), dim * dim);
    let mut out = vec![C64::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        for k in 0..dim {
            let aik = a[i * dim + k];
            if aik.re == 0.0 && aik.im == 0.0 {
                continue;
            }
            for j in 0..dim {
                out[i * dim + j] += aik * b[k * dim + j];
            }
        }
    }
    out
}

/// Conjugate transpose of a square matrix.
pub fn mat_adjoint(dim: usize, a: &[C64]) -> Vec<C64> {
    assert_eq!(a.len(), dim * dim);
    let mut out = vec![C64::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            out[j * dim + i] = a[i * dim + j].conj();
        }
    }
    out
}

/// Kronecker product of a `da x da` and a `db x db` matrix.
pub fn mat_kron(da: usize, a: &[C64], db: usize, b: &[C64]) -> Vec<C64> {
    assert_eq!(a.len(), da * da);
    assert_eq!(b.len(), db * db);
    let dim = da * db;
    let mut out = vec![C64::new(0.0, 0.0); dim * dim];
    for ia in 0..da {
        for ja in 0..da {
            let f = a[ia * da + ja];
            for ib in 0..db {
                for jb in 0..db {
                    out[(ia * db + ib) * dim + (ja * db + jb)] = f * b[ib * db + jb];
                }
            }
        }
    }
    out
}

/// Trace of a square matrix.
pub fn mat_trace(dim: usize, a: &[C64]) -> C64 {
    (0..dim).map(|i| a[i * dim + i]).sum()
}

/// Partial trace of a `2^n x 2^n` matrix, keeping the listed qubits.
///
/// The result is ordered by ascending original qubit index regardless of the
/// order of `keep`. Returns `(kept_dim, entries)`.
pub fn mat_partial_trace(n_qubits: usize, a: &[C64], keep: &[usize]) -> Result<(usize, Vec<C64>)> {
    let dim = 1usize << n_qubits;
    if a.len() != dim * dim {
        return Err(Error::BadLength {
            expected: dim * dim,
            got: a.len(),
        });
    }
    let keep = checked_sorted_qubits(n_qubits, keep)?;
    let traced: Vec<usize> = (0..n_qubits).filter(|q| !keep.contains(q)).collect();
    let dk = 1usize << keep.len();
    let dt = 1usize << traced.len();
    let mut out = vec![C64::new(0.0, 0.0); dk * dk];
    for r in 0..dt {
        let base = scatter_bits(n_qubits, &traced, r);
        for i in 0..dk {
            let row = scatter_bits(n_qubits, &keep, i) | base;
            for j in 0..dk {
                let col = scatter_bits(n_qubits, &keep, j) | base;
                out[i * dk + j] += a[row * dim + col];
            }
        }
    }
    Ok((dk, out))
}

// ---------------------------------------------------------------------------
// StateVector
// ---------------------------------------------------------------------------

/// Pure state of an `n`-qubit register: `2^n` amplitudes, unit norm.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<C64>,
}

impl StateVector {
    /// Builds a state from explicit amplitudes, validating length,
    /// finiteness and normalization.
    pub fn new(n_qubits: usize, amps: Vec<C64>) -> Result<Self> {
        let expected = 1usize << n_qubits;
        if amps.len() != expected {
            return Err(Error::BadLength {
                expected,
                got: amps.len(),
            });
        }
        if !all_finite(&amps) {
            return Err(Error::NonFinite {
                what: "state vector",
            });
        }
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized {
                norm,
                tol: NORM_TOL,
            });
        }
        Ok(Self { n_qubits, amps })
    }

    /// Computational basis state |index> of an `n`-qubit register.
    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let dim = 1usize << n_qubits;
        assert!(index < dim, "basis index {index} out of range");
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[index] = C64::new(1.0, 0.0);
        Self { n_qubits, amps }
    }

    /// Internal constructor for amplitudes produced by unitary kernels,
    /// which preserve the norm by construction.
    pub(crate) fn from_raw(n_qubits: usize, amps: Vec<C64>) -> Self {
        debug_assert_eq!(amps.len(), 1usize << n_qubits);
        debug_assert!(
            (amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() - 1.0).abs() < 1e-9,
            "internal state lost normalization"
        );
        Self { n_qubits, amps }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn amp(&self, index: usize) -> C64 {
        self.amps[index]
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub(crate) fn amps_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Inner product `<self|other>`.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Tensor product; `self`'s qubits come first (more significant).
    pub fn tensor(&self, other: &Self) -> Self {
        let mut amps = Vec::with_capacity(self.len() * other.len());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Self {
            n_qubits: self.n_qubits + other.n_qubits,
            amps,
        }
    }

    /// Reduced density operator on the kept qubits (ascending original
    /// order), computed directly from the amplitudes.
    pub fn reduced_density(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let keep = checked_sorted_qubits(self.n_qubits, keep)?;
        let rest: Vec<usize> = (0..self.n_qubits).filter(|q| !keep.contains(q)).collect();
        let dk = 1usize << keep.len();
        let dr = 1usize << rest.len();
        let mut entries = vec![C64::new(0.0, 0.0); dk * dk];
        let mut slice = vec![C64::new(0.0, 0.0); dk];
        for r in 0..dr {
            let base = scatter_bits(self.n_qubits, &rest, r);
            for (i, s) in slice.iter_mut().enumerate() {
                *s = self.amps[scatter_bits(self.n_qubits, &keep, i) | base];
            }
            for i in 0..dk {
                for j in 0..dk {
                    entries[i * dk + j] += slice[i] * slice[j].conj();
                }
            }
        }
        DensityMatrix::new(dk, entries)
    }
}

// ---------------------------------------------------------------------------
// DensityMatrix
// ---------------------------------------------------------------------------

/// Mixed state: a Hermitian, trace-one matrix.
///
/// Positivity is *not* required: formally useful non-positive operators
/// (e.g. members of a parametrised channel family outside their physical
/// range) are representable, with the minimum eigenvalue computed at
/// construction and exposed through [`DensityMatrix::is_physical`].
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    dim: usize,
    entries: Vec<C64>,
    min_eigenvalue: f64,
}

impl DensityMatrix {
    /// Validates Hermiticity (within [`HERMITICITY_TOL`]) and unit trace
    /// (within [`TRACE_TOL`]), then computes and stores the minimum
    /// eigenvalue for the physicality flag.
    pub fn new(dim: usize, entries: Vec<C64>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::BadLength {
                expected: dim * dim,
                got: entries.len(),
            });
        }
        if !all_finite(&entries) {
            return Err(Error::NonFinite {
                what: "density matrix",
            });
        }
        let mut max_asym = 0.0f64;
        for i in 0..dim {
            for j in i..dim {
                let asym = (entries[i * dim + j] - entries[j * dim + i].conj()).norm();
                max_asym = max_asym.max(asym);
            }
        }
        if max_asym > HERMITICITY_TOL {
            return Err(Error::NotHermitian {
                max_asymmetry: max_asym,
            });
        }
        let trace = mat_trace(dim, &entries);
        if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
            return Err(Error::TraceNotOne {
                trace: trace.re,
                tol: TRACE_TOL,
            });
        }
        let spectrum = jacobi_spectrum(dim, &entries);
        let min_eigenvalue = spectrum
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        Ok(Self {
            dim,
            entries,
            min_eigenvalue,
        })
    }

    /// Projector |psi><psi| of a pure state.
    pub fn from_pure(psi: &StateVector) -> Self {
        let dim = psi.len();
        let mut entries = vec![C64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                entries[i * dim + j] = psi.amp(i) * psi.amp(j).conj();
            }
        }
        // A projector is Hermitian, trace-one and PSD by construction.
        Self {
            dim,
            entries,
            min_eigenvalue: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.entries[i * self.dim + j]
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn trace(&self) -> C64 {
        mat_trace(self.dim, &self.entries)
    }

    /// Minimum eigenvalue, computed once at construction.
    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalue
    }

    /// True when the operator is positive semidefinite up to [`PSD_TOL`].
    pub fn is_physical(&self) -> bool {
        self.min_eigenvalue >= -PSD_TOL
    }

    /// Tensor product; `self`'s qubits come first.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let entries = mat_kron(self.dim, &self.entries, other.dim, &other.entries);
        Self::new(self.dim * other.dim, entries)
    }

    /// Partial trace keeping the listed qubits (ascending original order).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        let n = qubits_for_dim(self.dim)?;
        let (dk, entries) = mat_partial_trace(n, &self.entries, keep)?;
        Self::new(dk, entries)
    }

    /// Conjugation `U rho U^dagger` by a square matrix of the same
    /// dimension (normally unitary, so trace and Hermiticity survive the
    /// re-validation in the constructor).
    pub fn evolve(&self, op: &[C64]) -> Result<Self> {
        if op.len() != self.dim * self.dim {
            return Err(Error::BadLength {
                expected: self.dim * self.dim,
                got: op.len(),
            });
        }
        let tmp = mat_mul(self.dim, op, &self.entries);
        let entries = mat_mul(self.dim, &tmp, &mat_adjoint(self.dim, op));
        Self::new(self.dim, entries)
    }

    /// Eigendecomposition of the stored matrix.
    pub fn spectrum(&self) -> HermitianSpectrum {
        jacobi_spectrum(self.dim, &self.entries)
    }

    /// Von Neumann entropy in bits: `S = -sum_i lambda_i log2 lambda_i`.
    ///
    /// Eigenvalues in `[-PSD_TOL, 0)` are clamped to zero; anything below
    /// `-PSD_TOL` makes the operator unphysical and is an error.
    pub fn von_neumann_entropy(&self) -> Result<f64> {
        let spectrum = self.spectrum();
        entropy_from_eigenvalues(&spectrum.eigenvalues)
    }
}

/// Entropy in bits from a set of eigenvalues, with the clamping rules used
/// across the crate (`0 log 0 := 0`; tiny negatives are rounding dust).
pub fn entropy_from_eigenvalues(eigenvalues: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for &lambda in eigenvalues {
        if lambda < -PSD_TOL {
            return Err(Error::Unphysical {
                min_eigenvalue: lambda,
            });
        }
        if lambda > 0.0 {
            s -= lambda * lambda.log2();
        }
    }
    // Eigenvalues a hair above 1 can push the sum to -1e-16; entropy is
    // non-negative by definition.
    Ok(if s < 0.0 { 0.0 } else { s })
}

/// Overlap `<psi| rho |psi>` of a pure state with a density operator.
///
/// The value is returned unclamped: for formally non-positive operators it
/// may leave `[0, 1]`, and the caller decides what to make of that via
/// [`DensityMatrix::is_physical`].
pub fn fidelity_pure(psi: &StateVector, rho: &DensityMatrix) -> Result<f64> {
    if psi.len() != rho.dim() {
        return Err(Error::DimensionMismatch {
            left: psi.len(),
            right: rho.dim(),
        });
    }
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..rho.dim() {
        for j in 0..rho.dim() {
            acc += psi.amp(i).conj() * rho.entry(i, j) * psi.amp(j);
        }
    }
    Ok(acc.re)
}

// ---------------------------------------------------------------------------
// Hermitian eigendecomposition (cyclic Jacobi)
// ---------------------------------------------------------------------------

/// Eigendecomposition of a Hermitian matrix.
///
/// Eigenvalues are sorted descending; the eigenvector for `eigenvalues[k]`
/// is stored contiguously and returned by [`HermitianSpectrum::eigenvector`].
/// Ordering and phases are canonical: each eigenvector is rotated so its
/// largest-magnitude component is real and positive, and exact eigenvalue
/// ties are broken by the first differing component (real part, then
/// imaginary part, descending).
#[derive(Debug, Clone)]
pub struct HermitianSpectrum {
    dim: usize,
    eigenvalues: Vec<f64>,
    vectors: Vec<C64>,
}

impl HermitianSpectrum {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// k-th eigenvector (unit norm).
    pub fn eigenvector(&self, k: usize) -> &[C64] {
        &self.vectors[k * self.dim..(k + 1) * self.dim]
    }

    /// Rebuilds `sum_k lambda_k |v_k><v_k|`; used to bound decomposition
    /// error in tests.
    pub fn reconstruct(&self) -> Vec<C64> {
        let dim = self.dim;
        let mut out = vec![C64::new(0.0, 0.0); dim * dim];
        for k in 0..dim {
            let lambda = self.eigenvalues[k];
            let v = self.eigenvector(k);
            for i in 0..dim {
                for j in 0..dim {
                    out[i * dim + j] += lambda * v[i] * v[j].conj();
                }
            }
        }
        out
    }
}

/// Eigendecomposition of a complex Hermitian matrix via cyclic Jacobi
/// rotations. Rejects non-Hermitian input (asymmetry above
/// [`HERMITICITY_TOL`]).
pub fn hermitian_eigs(dim: usize, entries: &[C64]) -> Result<HermitianSpectrum> {
    if entries.len() != dim * dim {
        return Err(Error::BadLength {
            expected: dim * dim,
            got: entries.len(),
        });
    }
    if !all_finite(entries) {
        return Err(Error::NonFinite {
            what: "matrix for eigendecomposition",
        });
    }
    let mut max_asym = 0.0f64;
    for i in 0..dim {
        for j in i..dim {
            max_asym = max_asym.max((entries[i * dim + j] - entries[j * dim + i].conj()).norm());
        }
    }
    if max_asym > HERMITICITY_TOL {
        return Err(Error::NotHermitian {
            max_asymmetry: max_asym,
        });
    }
    Ok(jacobi_spectrum(dim, entries))
}

/// Core Jacobi loop. The caller guarantees the input is Hermitian to within
/// [`HERMITICITY_TOL`]; the residual asymmetry is removed by symmetrizing.
fn jacobi_spectrum(dim: usize, entries: &[C64]) -> HermitianSpectrum {
    let mut a: Vec<C64> = vec![C64::new(0.0, 0.0); dim * dim];
    for i in 0..dim {
        a[i * dim + i] = C64::new(entries[i * dim + i].re, 0.0);
        for j in (i + 1)..dim {
            let sym = (entries[i * dim + j] + entries[j * dim + i].conj()) * 0.5;
            a[i * dim + j] = sym;
            a[j * dim + i] = sym.conj();
        }
    }
    let mut v = mat_identity(dim);
    let scale_sq: f64 = a.iter().map(|z| z.norm_sqr()).sum::<f64>().max(1.0);
    let off_tol_sq = 1e-28 * scale_sq;
    const MAX_SWEEPS: usize = 64;
    for _ in 0..MAX_SWEEPS {
        let off_sq: f64 = (0..dim)
            .flat_map(|p| ((p + 1)..dim).map(move |q| (p, q)))
            .map(|(p, q)| a[p * dim + q].norm_sqr())
            .sum();
        if off_sq <= off_tol_sq {
            break;
        }
        for p in 0..dim {
            for q in (p + 1)..dim {
                jacobi_rotate(dim, &mut a, &mut v, p, q);
            }
        }
    }
    let mut eigenvalues: Vec<f64> = (0..dim).map(|i| a[i * dim + i].re).collect();
    // Canonical phase: largest-magnitude component real positive.
    for k in 0..dim {
        let mut best = 0usize;
        let mut best_mag = 0.0f64;
        for i in 0..dim {
            let mag = v[i * dim + k].norm();
            if mag > best_mag + 1e-12 {
                best_mag = mag;
                best = i;
            }
        }
        if best_mag > 0.0 {
            let phase = v[best * dim + k] / best_mag;
            let correction = phase.conj();
            for i in 0..dim {
                v[i * dim + k] *= correction;
            }
        }
    }
    // Deterministic order: descending eigenvalue; ties broken by the first
    // differing eigenvector component, larger (real, then imaginary) first.
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&x, &y| {
        match eigenvalues[y].partial_cmp(&eigenvalues[x]).unwrap() {
            std::cmp::Ordering::Equal => {}
            non_eq => return non_eq,
        }
        for i in 0..dim {
            let vx = v[i * dim + x];
            let vy = v[i * dim + y];
            if (vx.re - vy.re).abs() > 1e-9 {
                return vy.re.partial_cmp(&vx.re).unwrap();
            }
            if (vx.im - vy.im).abs() > 1e-9 {
                return vy.im.partial_cmp(&vx.im).unwrap();
            }
        }
        std::cmp::Ordering::Equal
    });
    let mut vectors = vec![C64::new(0.0, 0.0); dim * dim];
    for (slot, &k) in order.iter().enumerate() {
        for i in 0..dim {
            vectors[slot * dim + i] = v[i * dim + k];
        }
    }
    eigenvalues = order.iter().map(|&k| eigenvalues[k]).collect();
    HermitianSpectrum {
        dim,
        eigenvalues,
        vectors,
    }
}

/// One Jacobi rotation annihilating the (p, q) off-diagonal element of the
/// Hermitian matrix `a`, accumulating the rotation into `v`.
fn jacobi_rotate(dim: usize, a: &mut [C64], v: &mut [C64], p: usize, q: usize) {
    let apq = a[p * dim + q];
    let r = apq.norm();
    if r <= 1e-300 {
        a[p * dim + q] = C64::new(0.0, 0.0);
        a[q * dim + p] = C64::new(0.0, 0.0);
        return;
    }
    let phase = apq / r; // e^{i arg(a_pq)}
    let theta = (a[q * dim + q].re - a[p * dim + p].re) / (2.0 * r);
    // Smaller-magnitude root of t^2 - 2*theta*t - 1 = 0, which zeroes the
    // rotated off-diagonal element.
    let t = if theta >= 0.0 {
        -1.0 / (theta + (theta * theta + 1.0).sqrt())
    } else {
        1.0 / (-theta + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let sp = s * phase;
    let spc = s * phase.conj();
    // Column update (right-multiplication by the rotation).
    for k in 0..dim {
        let akp = a[k * dim + p];
        let akq = a[k * dim + q];
        a[k * dim + p] = c * akp + spc * akq;
        a[k * dim + q] = -sp * akp + c * akq;
    }
    // Row update (left-multiplication by the adjoint rotation).
    for k in 0..dim {
        let apk = a[p * dim + k];
        let aqk = a[q * dim + k];
        a[p * dim + k] = c * apk + sp * aqk;
        a[q * dim + k] = -spc * apk + c * aqk;
    }
    // Accumulate eigenvectors as columns of v.
    for k in 0..dim {
        let vkp = v[k * dim + p];
        let vkq = v[k * dim + q];
        v[k * dim + p] = c * vkp + spc * vkq;
        v[k * dim + q] = -sp * vkp + c * vkq;
    }
    a[p * dim + q] = C64::new(0.0, 0.0);
    a[q * dim + p] = C64::new(0.0, 0.0);
    a[p * dim + p] = C64::new(a[p * dim + p].re, 0.0);
    a[q * dim + q] = C64::new(a[q * dim + q].re, 0.0);
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn random_hermitian(rng: &mut ChaCha8Rng, dim: usize) -> Vec<C64> {
        let mut m = vec![C64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            m[i * dim + i] = C64::new(rng.gen_range(-1.0..1.0), 0.0);
            for j in (i + 1)..dim {
                let z = c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                m[i * dim + j] = z;
                m[j * dim + i] = z.conj();
            }
        }
        m
    }

    fn random_state(rng: &mut ChaCha8Rng, n_qubits: usize) -> StateVector {
        let dim = 1usize << n_qubits;
        let mut amps: Vec<C64> = (0..dim)
            .map(|_| c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for a in &mut amps {
            *a /= norm;
        }
        StateVector::new(n_qubits, amps).unwrap()
    }

    /// Random physical density matrix (Ginibre construction G G^dag / tr).
    fn random_density(rng: &mut ChaCha8Rng, dim: usize) -> DensityMatrix {
        let g: Vec<C64> = (0..dim * dim)
            .map(|_| c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let gg = mat_mul(dim, &g, &mat_adjoint(dim, &g));
        let trace = mat_trace(dim, &gg).re;
        let entries: Vec<C64> = gg.into_iter().map(|z| z / trace).collect();
        DensityMatrix::new(dim, entries).unwrap()
    }

    fn max_entry_diff(a: &[C64], b: &[C64]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn basis_states_are_orthonormal() {
        let e0 = StateVector::basis(2, 0);
        let e3 = StateVector::basis(2, 3);
        assert_eq!(e0.inner(&e0).unwrap(), c64(1.0, 0.0));
        assert_eq!(e0.inner(&e3).unwrap(), c64(0.0, 0.0));
    }

    #[test]
    fn state_constructor_rejects_bad_input() {
        assert!(matches!(
            StateVector::new(1, vec![c64(1.0, 0.0)]),
            Err(Error::BadLength { .. })
        ));
        assert!(matches!(
            StateVector::new(1, vec![c64(1.0, 0.0), c64(1.0, 0.0)]),
            Err(Error::NotNormalized { .. })
        ));
        assert!(matches!(
            StateVector::new(1, vec![c64(f64::NAN, 0.0), c64(0.0, 0.0)]),
            Err(Error::NonFinite { .. })
        ));
    }

    #[test]
    fn density_constructor_enforces_hermitian_trace() {
        // Non-Hermitian.
        let m = vec![c64(0.5, 0.0), c64(0.1, 0.0), c64(0.3, 0.0), c64(0.5, 0.0)];
        assert!(matches!(
            DensityMatrix::new(2, m),
            Err(Error::NotHermitian { .. })
        ));
        // Trace 2.
        let m = vec![c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0)];
        assert!(matches!(
            DensityMatrix::new(2, m),
            Err(Error::TraceNotOne { .. })
        ));
    }

    #[test]
    fn non_positive_operators_are_representable_but_flagged() {
        let m = vec![c64(1.5, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(-0.5, 0.0)];
        let rho = DensityMatrix::new(2, m).unwrap();
        assert!(!rho.is_physical());
        assert!((rho.min_eigenvalue() + 0.5).abs() < 1e-12);
        assert!(matches!(
            rho.von_neumann_entropy(),
            Err(Error::Unphysical { .. })
        ));
    }

    #[test]
    fn entropy_of_diagonal_three_quarters_one_quarter() {
        let m = vec![c64(0.75, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(0.25, 0.0)];
        let rho = DensityMatrix::new(2, m).unwrap();
        // Binary entropy H(1/4) = 2 - 0.75*log2(3).
        assert!((rho.von_neumann_entropy().unwrap() - 0.811_278_124_459_132_8).abs() < 1e-12);
    }

    #[test]
    fn entropy_extremes() {
        let pure = DensityMatrix::from_pure(&StateVector::basis(1, 0));
        assert!(pure.von_neumann_entropy().unwrap().abs() < 1e-12);
        let mixed = DensityMatrix::new(
            2,
            vec![c64(0.5, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(0.5, 0.0)],
        )
        .unwrap();
        assert!((mixed.von_neumann_entropy().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn entropy_is_additive_over_tensor_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let a = random_density(&mut rng, 2);
            let b = random_density(&mut rng, 4);
            let ab = a.tensor(&b).unwrap();
            let lhs = ab.von_neumann_entropy().unwrap();
            let rhs = a.von_neumann_entropy().unwrap() + b.von_neumann_entropy().unwrap();
            assert!((lhs - rhs).abs() < 1e-9, "additivity violated: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn entropy_respects_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..200 {
            let rho = random_density(&mut rng, 4);
            let s = rho.von_neumann_entropy().unwrap();
            assert!((0.0..=2.0 + 1e-12).contains(&s));
        }
    }

    #[test]
    fn pauli_z_spectrum_is_canonical() {
        let z = vec![c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(-1.0, 0.0)];
        let s = hermitian_eigs(2, &z).unwrap();
        assert_eq!(s.eigenvalues(), &[1.0, -1.0]);
        assert!(max_entry_diff(s.eigenvector(0), &[c64(1.0, 0.0), c64(0.0, 0.0)]) < 1e-12);
        assert!(max_entry_diff(s.eigenvector(1), &[c64(0.0, 0.0), c64(1.0, 0.0)]) < 1e-12);
    }

    #[test]
    fn pauli_x_spectrum_has_positive_leading_components() {
        let x = vec![c64(0.0, 0.0), c64(1.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0)];
        let s = hermitian_eigs(2, &x).unwrap();
        assert!((s.eigenvalues()[0] - 1.0).abs() < 1e-12);
        assert!((s.eigenvalues()[1] + 1.0).abs() < 1e-12);
        let plus = [c64(FRAC_1_SQRT_2, 0.0), c64(FRAC_1_SQRT_2, 0.0)];
        let minus = [c64(FRAC_1_SQRT_2, 0.0), c64(-FRAC_1_SQRT_2, 0.0)];
        assert!(max_entry_diff(s.eigenvector(0), &plus) < 1e-12);
        assert!(max_entry_diff(s.eigenvector(1), &minus) < 1e-12);
    }

    #[test]
    fn x_correlated_channel_spectrum_is_half_half_zero_zero() {
        // 1/4 * (I (x) I + sigma_x (x) sigma_x): corners and middle block 1/4.
        let q = c64(0.25, 0.0);
        let o = c64(0.0, 0.0);
        #[rustfmt::skip]
        let m = vec![
            q, o, o, q,
            o, q, q, o,
            o, q, q, o,
            q, o, o, q,
        ];
        let s = hermitian_eigs(4, &m).unwrap();
        let expect = [0.5, 0.5, 0.0, 0.0];
        for (got, want) in s.eigenvalues().iter().zip(expect) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn jacobi_reconstructs_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(20260815);
        for trial in 0..1000 {
            let dim = if trial % 2 == 0 { 4 } else { 8 };
            let m = random_hermitian(&mut rng, dim);
            let s = hermitian_eigs(dim, &m).unwrap();
            let rebuilt = s.reconstruct();
            assert!(
                max_entry_diff(&m, &rebuilt) < 1e-9,
                "reconstruction error too large at trial {trial}"
            );
            // Gram matrix of eigenvectors should be the identity.
            for i in 0..dim {
                for j in 0..dim {
                    let dot: C64 = (0..dim)
                        .map(|k| s.eigenvector(i)[k].conj() * s.eigenvector(j)[k])
                        .sum();
                    let expect = if i == j { 1.0 } else { 0.0 };
                    assert!(
                        (dot - c64(expect, 0.0)).norm() < 1e-9,
                        "gram deviation at trial {trial}"
                    );
                }
            }
        }
    }

    #[test]
    fn hermitian_eigs_rejects_non_hermitian() {
        let m = vec![c64(0.0, 0.0), c64(1.0, 0.0), c64(0.5, 0.0), c64(0.0, 0.0)];
        assert!(matches!(
            hermitian_eigs(2, &m),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn partial_trace_of_bell_pair_is_maximally_mixed() {
        let mut amps = vec![c64(0.0, 0.0); 4];
        amps[0] = c64(FRAC_1_SQRT_2, 0.0);
        amps[3] = c64(FRAC_1_SQRT_2, 0.0);
        let bell = StateVector::new(2, amps).unwrap();
        let rho = DensityMatrix::from_pure(&bell);
        for keep in [&[0usize][..], &[1usize][..]] {
            let red = rho.partial_trace(keep).unwrap();
            assert!((red.entry(0, 0).re - 0.5).abs() < 1e-12);
            assert!((red.entry(1, 1).re - 0.5).abs() < 1e-12);
            assert!(red.entry(0, 1).norm() < 1e-12);
        }
    }

    #[test]
    fn partial_trace_of_product_state_recovers_factors() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = random_state(&mut rng, 1);
        let b = random_state(&mut rng, 2);
        let joint = DensityMatrix::from_pure(&a.tensor(&b));
        let ra = joint.partial_trace(&[0]).unwrap();
        let rb = joint.partial_trace(&[1, 2]).unwrap();
        assert!(max_entry_diff(ra.entries(), DensityMatrix::from_pure(&a).entries()) < 1e-12);
        assert!(max_entry_diff(rb.entries(), DensityMatrix::from_pure(&b).entries()) < 1e-12);
    }

    #[test]
    fn partial_trace_preserves_trace_and_hermiticity() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..100 {
            let rho = random_density(&mut rng, 8);
            let red = rho.partial_trace(&[0, 2]).unwrap();
            assert!((red.trace().re - 1.0).abs() < 1e-12);
            assert!(red.trace().im.abs() < 1e-12);
        }
    }

    #[test]
    fn reduced_density_matches_partial_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let psi = random_state(&mut rng, 4);
            let direct = psi.reduced_density(&[1, 3]).unwrap();
            let via_full = DensityMatrix::from_pure(&psi)
                .partial_trace(&[1, 3])
                .unwrap();
            assert!(max_entry_diff(direct.entries(), via_full.entries()) < 1e-12);
        }
    }

    #[test]
    fn partial_trace_rejects_bad_qubit_lists() {
        let rho = DensityMatrix::from_pure(&StateVector::basis(2, 0));
        assert!(matches!(
            rho.partial_trace(&[]),
            Err(Error::EmptyQubitList)
        ));
        assert!(matches!(
            rho.partial_trace(&[0, 0]),
            Err(Error::DuplicateQubit { .. })
        ));
        assert!(matches!(
            rho.partial_trace(&[2]),
            Err(Error::QubitOutOfRange { .. })
        ));
    }

    #[test]
    fn fidelity_pure_basics() {
        let plus = StateVector::new(1, vec![c64(FRAC_1_SQRT_2, 0.0), c64(FRAC_1_SQRT_2, 0.0)])
            .unwrap();
        let rho_plus = DensityMatrix::from_pure(&plus);
        assert!((fidelity_pure(&plus, &rho_plus).unwrap() - 1.0).abs() < 1e-12);
        let zero = StateVector::basis(1, 0);
        assert!((fidelity_pure(&zero, &rho_plus).unwrap() - 0.5).abs() < 1e-12);
        let two_qubit = DensityMatrix::from_pure(&StateVector::basis(2, 0));
        assert!(matches!(
            fidelity_pure(&zero, &two_qubit),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn kron_and_mul_agree_with_tensor_evolution() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let a = random_density(&mut rng, 2);
        let b = random_density(&mut rng, 2);
        let ab = a.tensor(&b).unwrap();
        let raw = mat_kron(2, a.entries(), 2, b.entries());
        assert!(max_entry_diff(ab.entries(), &raw) < 1e-15);
        let id = mat_identity(4);
        assert!(max_entry_diff(&mat_mul(4, &id, &raw), &raw) < 1e-15);
    }

    proptest! {
        #[test]
        fn tensor_dimension_law(n1 in 1usize..3, n2 in 1usize..3, seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_state(&mut rng, n1);
            let b = random_state(&mut rng, n2);
            let t = a.tensor(&b);
            prop_assert_eq!(t.len(), a.len() * b.len());
            prop_assert!((t.norm() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn scatter_bits_is_a_bijection(n in 1usize..6, value in 0usize..32) {
            let positions: Vec<usize> = (0..n).collect();
            let value = value & ((1 << n) - 1);
            let idx = scatter_bits(n, &positions, value);
            prop_assert_eq!(idx, value);
        }
    }
}
