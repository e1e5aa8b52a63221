//! Dense multi-qubit states.
//!
//! Qubits are addressed by zero-based index. Qubit 0 occupies the most
//! significant bit of a computational-basis index, so for a four-qubit
//! register `|q0 q1 q2 q3>` has index `8*q0 + 4*q1 + 2*q2 + q3`. The
//! protocol's "qubit 1..4" are indices `0..3`.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance for algebraic identities (trace, Hermiticity, normalization).
pub const ALGEBRA_TOL: f64 = 1e-10;
/// Slack allowed below zero on eigenvalues of a positive semidefinite matrix.
pub const PSD_TOL: f64 = 1e-9;
/// Largest register this crate handles.
pub const MAX_QUBITS: usize = 4;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Value of bit `qubit` in basis index `index` of an `n`-qubit register.
#[inline]
pub(crate) fn qubit_bit(index: usize, n: usize, qubit: usize) -> usize {
    (index >> (n - 1 - qubit)) & 1
}

#[inline]
pub(crate) fn qubit_mask(n: usize, qubit: usize) -> usize {
    1 << (n - 1 - qubit)
}

/// Label of one of the four two-qubit Bell states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BellLabel {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellLabel {
    pub const ALL: [BellLabel; 4] = [BellLabel::PhiPlus, BellLabel::PhiMinus, BellLabel::PsiPlus, BellLabel::PsiMinus];

    /// Two-bit key encoding: Φ+ → 00, Φ− → 01, Ψ+ → 10, Ψ− → 11.
    pub fn bits(self) -> u8 {
        match self {
            BellLabel::PhiPlus => 0b00,
            BellLabel::PhiMinus => 0b01,
            BellLabel::PsiPlus => 0b10,
            BellLabel::PsiMinus => 0b11,
        }
    }

    pub fn from_bits(bits: u8) -> Option<BellLabel> {
        match bits {
            0b00 => Some(BellLabel::PhiPlus),
            0b01 => Some(BellLabel::PhiMinus),
            0b10 => Some(BellLabel::PsiPlus),
            0b11 => Some(BellLabel::PsiMinus),
            _ => None,
        }
    }

    /// Position in [`BellLabel::ALL`].
    pub fn index(self) -> usize {
        self.bits() as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            BellLabel::PhiPlus => "phi+",
            BellLabel::PhiMinus => "phi-",
            BellLabel::PsiPlus => "psi+",
            BellLabel::PsiMinus => "psi-",
        }
    }
}

impl fmt::Display for BellLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BellLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BellLabel::ALL
            .into_iter()
            .find(|l| l.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown Bell label `{s}`")))
    }
}

/// Normalized state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl PureState {
    pub fn new(n_qubits: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if n_qubits > MAX_QUBITS {
            return Err(Error::invalid(format!("{n_qubits} qubits exceeds the maximum of {MAX_QUBITS}")));
        }
        if amplitudes.len() != 1 << n_qubits {
            return Err(Error::invalid(format!("{} amplitudes for {n_qubits} qubits", amplitudes.len())));
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > ALGEBRA_TOL {
            return Err(Error::invalid(format!("state has squared norm {norm}")));
        }
        Ok(PureState { n_qubits, amplitudes })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PureState) -> Complex64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `|ψ><ψ|`.
    pub fn density(&self) -> DensityMatrix {
        let d = self.amplitudes.len();
        let m = DMatrix::from_fn(d, d, |i, j| self.amplitudes[i] * self.amplitudes[j].conj());
        DensityMatrix::from_parts(self.n_qubits, m)
    }
}

/// Positive semidefinite unit-trace matrix on `n_qubits` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    m: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Validating constructor: the matrix must be Hermitian, have unit trace
    /// and no eigenvalue below `-PSD_TOL`.
    pub fn from_matrix(n_qubits: usize, m: DMatrix<Complex64>) -> Result<Self> {
        if n_qubits > MAX_QUBITS {
            return Err(Error::invalid(format!("{n_qubits} qubits exceeds the maximum of {MAX_QUBITS}")));
        }
        let d = 1 << n_qubits;
        if m.nrows() != d || m.ncols() != d {
            return Err(Error::invalid(format!("{}x{} matrix for {n_qubits} qubits", m.nrows(), m.ncols())));
        }
        let rho = DensityMatrix { n_qubits, m };
        rho.validate()?;
        Ok(rho)
    }

    /// Trusted constructor for results of trace-preserving operations.
    pub(crate) fn from_parts(n_qubits: usize, m: DMatrix<Complex64>) -> Self {
        debug_assert_eq!(m.nrows(), 1 << n_qubits);
        DensityMatrix { n_qubits, m }
    }

    /// `I / 2^n`.
    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let d = 1 << n_qubits;
        let m = DMatrix::from_diagonal_element(d, d, Complex64::new(1.0 / d as f64, 0.0));
        DensityMatrix { n_qubits, m }
    }

    /// Projector onto a computational basis state.
    pub fn basis_state(n_qubits: usize, index: usize) -> Result<Self> {
        let d = 1 << n_qubits;
        if index >= d {
            return Err(Error::invalid(format!("basis index {index} out of range")));
        }
        let mut m = DMatrix::from_element(d, d, ZERO);
        m[(index, index)] = ONE;
        Ok(DensityMatrix { n_qubits, m })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.m[(row, col)]
    }

    pub fn trace(&self) -> f64 {
        self.m.trace().re
    }

    /// `Tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        // Tr(ρ²) = Σ |ρ_ij|² for Hermitian ρ.
        self.m.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.m)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        max_abs_diff(&self.m, &other.m)
    }

    pub fn approx_eq(&self, other: &DensityMatrix, tol: f64) -> bool {
        self.n_qubits == other.n_qubits && self.max_abs_diff(other) <= tol
    }

    /// Check every density-matrix invariant.
    pub fn validate(&self) -> Result<()> {
        let herm = max_abs_diff(&self.m, &self.m.adjoint());
        if herm > ALGEBRA_TOL {
            return Err(Error::invalid(format!("matrix is not Hermitian (deviation {herm:e})")));
        }
        let tr = self.m.trace();
        if (tr.re - 1.0).abs() > ALGEBRA_TOL || tr.im.abs() > ALGEBRA_TOL {
            return Err(Error::invalid(format!("trace is {tr}, expected 1")));
        }
        let min = self.min_eigenvalue();
        if min < -PSD_TOL {
            return Err(Error::invalid(format!("matrix has negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    /// Reorder qubits: qubit `k` of the result is qubit `order[k]` of `self`.
    pub fn permute_qubits(&self, order: &[usize]) -> Result<Self> {
        let n = self.n_qubits;
        let mut seen = vec![false; n];
        if order.len() != n || order.iter().any(|&q| q >= n || std::mem::replace(&mut seen[q], true)) {
            return Err(Error::invalid(format!("{order:?} is not a permutation of {n} qubits")));
        }
        let map = |idx: usize| -> usize { (0..n).fold(0, |acc, k| acc | (qubit_bit(idx, n, order[k]) << (n - 1 - k))) };
        let d = self.dim();
        let perm: Vec<usize> = (0..d).map(map).collect();
        let m = DMatrix::from_fn(d, d, |i, j| self.m[(perm[i], perm[j])]);
        Ok(DensityMatrix { n_qubits: n, m })
    }
}

/// Hermitian matrix that need not be positive, such as a partial transpose.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    n_qubits: usize,
    m: DMatrix<Complex64>,
}

impl HermitianOperator {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    pub fn trace(&self) -> f64 {
        self.m.trace().re
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.m)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        max_abs_diff(&self.m, &self.m.adjoint()) <= tol
    }
}

fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn bell_state(label: BellLabel) -> PureState {
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let amplitudes = match label {
        BellLabel::PhiPlus => vec![h, ZERO, ZERO, h],
        BellLabel::PhiMinus => vec![h, ZERO, ZERO, -h],
        BellLabel::PsiPlus => vec![ZERO, h, h, ZERO],
        BellLabel::PsiMinus => vec![ZERO, h, -h, ZERO],
    };
    PureState { n_qubits: 2, amplitudes }
}

/// `|B><B| ⊗ |B><B|`: both pairs in the same Bell state.
pub fn bell_pair_product(label: BellLabel) -> DensityMatrix {
    let b = bell_state(label).density();
    tensor(&b, &b)
}

/// The four-qubit Smolin state, an equal mixture of `|B><B|₀₁ ⊗ |B><B|₂₃`
/// over the four Bell states.
pub fn smolin_state() -> DensityMatrix {
    let mut m = DMatrix::from_element(16, 16, ZERO);
    for label in BellLabel::ALL {
        m += bell_pair_product(label).m;
    }
    m /= Complex64::new(4.0, 0.0);
    DensityMatrix { n_qubits: 4, m }
}

/// Mix with white noise: `(1 − p)·I/2ⁿ + p·ρ`.
pub fn depolarize(rho: &DensityMatrix, p: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!("depolarizing parameter {p} outside [0, 1]")));
    }
    let d = rho.dim();
    let mut m = rho.m.scale(p);
    let noise = Complex64::new((1.0 - p) / d as f64, 0.0);
    for i in 0..d {
        m[(i, i)] += noise;
    }
    Ok(DensityMatrix { n_qubits: rho.n_qubits, m })
}

/// Kronecker product; the qubits of `a` come first.
pub fn tensor(a: &DensityMatrix, b: &DensityMatrix) -> DensityMatrix {
    DensityMatrix { n_qubits: a.n_qubits + b.n_qubits, m: a.m.kronecker(&b.m) }
}

fn check_qubit_set(n: usize, set: &[usize], what: &str) -> Result<Vec<usize>> {
    let mut sorted = set.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != set.len() {
        return Err(Error::invalid(format!("{what} {set:?} repeats a qubit")));
    }
    if let Some(&q) = sorted.iter().find(|&&q| q >= n) {
        return Err(Error::invalid(format!("{what} names qubit {q} of a {n}-qubit state")));
    }
    Ok(sorted)
}

/// Spread the bits of `value` over the register positions of `qubits`
/// (first listed qubit takes the most significant bit of `value`).
pub(crate) fn scatter_bits(value: usize, qubits: &[usize], n: usize) -> usize {
    let k = qubits.len();
    qubits.iter().enumerate().fold(0, |acc, (i, &q)| acc | (((value >> (k - 1 - i)) & 1) << (n - 1 - q)))
}

/// Reduced state on `keep`. Kept qubits retain their relative order.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let n = rho.n_qubits;
    if keep.is_empty() {
        return Err(Error::invalid("partial trace needs at least one kept qubit"));
    }
    let keep = check_qubit_set(n, keep, "keep set")?;
    let rest: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
    Ok(trace_out_sorted(rho, &keep, &rest))
}

/// Trace out `rest`, keeping `keep`. Both sorted and disjoint; `keep` may be empty.
pub(crate) fn trace_out_sorted(rho: &DensityMatrix, keep: &[usize], rest: &[usize]) -> DensityMatrix {
    let n = rho.n_qubits;
    let kd = 1 << keep.len();
    let keep_idx: Vec<usize> = (0..kd).map(|v| scatter_bits(v, keep, n)).collect();
    let rest_idx: Vec<usize> = (0..1 << rest.len()).map(|v| scatter_bits(v, rest, n)).collect();
    let m = DMatrix::from_fn(kd, kd, |i, j| rest_idx.iter().map(|&r| rho.m[(keep_idx[i] | r, keep_idx[j] | r)]).sum());
    DensityMatrix { n_qubits: keep.len(), m }
}

/// Transpose the tensor factors of `subsystem`, leaving the rest untouched.
pub fn partial_transpose(rho: &DensityMatrix, subsystem: &[usize]) -> Result<HermitianOperator> {
    let n = rho.n_qubits;
    let sub = check_qubit_set(n, subsystem, "subsystem")?;
    let mask = sub.iter().fold(0, |acc, &q| acc | qubit_mask(n, q));
    let d = rho.dim();
    let m = DMatrix::from_fn(d, d, |i, j| {
        let r = (i & !mask) | (j & mask);
        let c = (j & !mask) | (i & mask);
        rho.m[(r, c)]
    });
    Ok(HermitianOperator { n_qubits: n, m })
}
