//! Born-rule projective measurements on [`DensityMatrix`] values.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qstate::{
    bell_state, qubit_bit, scatter_bits, trace_out_sorted, BellLabel, DensityMatrix, ALGEBRA_TOL, ZERO,
};
use crate::rng::Rng;

/// Branches with a smaller Born probability are treated as impossible.
pub const DEGENERATE_PROBABILITY: f64 = 1e-12;

type Mat2 = [[Complex64; 2]; 2];

/// A ±1-valued single-qubit observable `n·σ`, given by its Bloch direction `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementSetting {
    direction: [f64; 3],
}

impl MeasurementSetting {
    pub fn new(direction: [f64; 3]) -> Result<Self> {
        let norm = direction.iter().map(|c| c * c).sum::<f64>().sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > ALGEBRA_TOL {
            return Err(Error::invalid(format!("setting direction {direction:?} has norm {norm}")));
        }
        Ok(MeasurementSetting { direction })
    }

    /// Normalizes `v`; fails on the zero vector.
    pub fn from_vector(v: [f64; 3]) -> Result<Self> {
        let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
        if !norm.is_finite() || norm < 1e-12 {
            return Err(Error::invalid(format!("cannot normalize {v:?}")));
        }
        Ok(MeasurementSetting { direction: v.map(|c| c / norm) })
    }

    pub fn x() -> Self {
        MeasurementSetting { direction: [1.0, 0.0, 0.0] }
    }

    pub fn y() -> Self {
        MeasurementSetting { direction: [0.0, 1.0, 0.0] }
    }

    pub fn z() -> Self {
        MeasurementSetting { direction: [0.0, 0.0, 1.0] }
    }

    /// Bloch direction `(a + b)/√2` for orthonormal unit directions `a`, `b`.
    pub(crate) fn diagonal(a: [f64; 3], b: [f64; 3], sign: f64) -> Self {
        MeasurementSetting { direction: [0, 1, 2].map(|i| (a[i] + sign * b[i]) * FRAC_1_SQRT_2) }
    }

    pub fn direction(&self) -> [f64; 3] {
        self.direction
    }

    /// Rotate the direction by `angle` radians about `axis` (Rodrigues).
    pub fn rotated(&self, axis: [f64; 3], angle: f64) -> Result<Self> {
        let k = MeasurementSetting::from_vector(axis)?.direction;
        let v = self.direction;
        let (s, c) = angle.sin_cos();
        let cross = [k[1] * v[2] - k[2] * v[1], k[2] * v[0] - k[0] * v[2], k[0] * v[1] - k[1] * v[0]];
        let dot = k[0] * v[0] + k[1] * v[1] + k[2] * v[2];
        MeasurementSetting::from_vector([0, 1, 2].map(|i| v[i] * c + cross[i] * s + k[i] * dot * (1.0 - c)))
    }

    /// 2×2 matrix of `n·σ`.
    pub fn observable(&self) -> [[Complex64; 2]; 2] {
        let [x, y, z] = self.direction;
        [[Complex64::new(z, 0.0), Complex64::new(x, -y)], [Complex64::new(x, y), Complex64::new(-z, 0.0)]]
    }

    /// Projector `(I ± n·σ)/2` onto the eigenspace of `outcome`.
    pub fn projector(&self, outcome: Outcome) -> [[Complex64; 2]; 2] {
        let s = outcome.value() as f64;
        let o = self.observable();
        let mut p = [[ZERO; 2]; 2];
        for (a, row) in p.iter_mut().enumerate() {
            for (b, entry) in row.iter_mut().enumerate() {
                let id = if a == b { 1.0 } else { 0.0 };
                *entry = (Complex64::new(id, 0.0) + o[a][b] * s) * 0.5;
            }
        }
        p
    }
}

impl fmt::Display for MeasurementSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [x, y, z] = self.direction;
        write!(f, "({x:.6}, {y:.6}, {z:.6})")
    }
}

/// Result of a ±1 measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub fn value(self) -> i8 {
        match self {
            Outcome::Plus => 1,
            Outcome::Minus => -1,
        }
    }

    fn from_bit(bit: usize) -> Outcome {
        if bit == 0 {
            Outcome::Plus
        } else {
            Outcome::Minus
        }
    }
}

#[derive(Debug, Clone)]
pub struct MeasurementOutcome {
    pub outcome: Outcome,
    pub probability: f64,
    /// `P ρ P / p`, still on all qubits of the input.
    pub post_state: DensityMatrix,
}

impl MeasurementOutcome {
    pub fn value(&self) -> i8 {
        self.outcome.value()
    }
}

fn check_qubit(rho: &DensityMatrix, qubit: usize) -> Result<()> {
    if qubit >= rho.n_qubits() {
        return Err(Error::invalid(format!("qubit {qubit} out of range for a {}-qubit state", rho.n_qubits())));
    }
    Ok(())
}

/// `Tr(P ρ)` for a single-qubit operator `P` on `qubit`.
fn local_trace(rho: &DensityMatrix, qubit: usize, op: &Mat2) -> f64 {
    let n = rho.n_qubits();
    let rest: Vec<usize> = (0..n).filter(|&q| q != qubit).collect();
    let reduced = trace_out_sorted(rho, &[qubit], &rest);
    let r = reduced.matrix();
    let mut t = ZERO;
    for a in 0..2 {
        for b in 0..2 {
            t += op[a][b] * r[(b, a)];
        }
    }
    t.re
}

/// `P ρ P` with `P` acting on `qubit`.
fn sandwich(rho: &DensityMatrix, qubit: usize, p: &Mat2) -> DMatrix<Complex64> {
    let n = rho.n_qubits();
    let d = rho.dim();
    let bitmask = 1 << (n - 1 - qubit);
    let m = rho.matrix();
    let apply_left = |i: usize, j: usize, src: &dyn Fn(usize, usize) -> Complex64| {
        let a = qubit_bit(i, n, qubit);
        let base = i & !bitmask;
        p[a][0] * src(base, j) + p[a][1] * src(base | bitmask, j)
    };
    let left = DMatrix::from_fn(d, d, |i, j| apply_left(i, j, &|r, c| m[(r, c)]));
    // (P ρ) P: P is Hermitian, so right multiplication mirrors the left one.
    DMatrix::from_fn(d, d, |i, j| {
        let b = qubit_bit(j, n, qubit);
        let base = j & !bitmask;
        left[(i, base)] * p[0][b] + left[(i, base | bitmask)] * p[1][b]
    })
}

/// Born probabilities `(p₊, p₋)` for measuring `setting` on `qubit`.
pub fn branch_probabilities(rho: &DensityMatrix, qubit: usize, setting: &MeasurementSetting) -> Result<[f64; 2]> {
    check_qubit(rho, qubit)?;
    let plus = local_trace(rho, qubit, &setting.projector(Outcome::Plus)).clamp(0.0, 1.0);
    Ok([plus, (1.0 - plus).clamp(0.0, 1.0)])
}

/// Project onto a chosen branch. Fails with [`Error::DegenerateBranch`] if
/// that branch has probability below [`DEGENERATE_PROBABILITY`].
pub fn measure_qubit_forced(
    rho: &DensityMatrix,
    qubit: usize,
    setting: &MeasurementSetting,
    outcome: Outcome,
) -> Result<MeasurementOutcome> {
    let probs = branch_probabilities(rho, qubit, setting)?;
    let probability = match outcome {
        Outcome::Plus => probs[0],
        Outcome::Minus => probs[1],
    };
    if probability < DEGENERATE_PROBABILITY {
        return Err(Error::DegenerateBranch { probability });
    }
    let proj = setting.projector(outcome);
    let mut m = sandwich(rho, qubit, &proj);
    let tr = m.trace().re;
    m /= Complex64::new(tr, 0.0);
    Ok(MeasurementOutcome { outcome, probability, post_state: DensityMatrix::from_parts(rho.n_qubits(), m) })
}

/// Sample a ±1 outcome of `setting` on `qubit` with Born probabilities.
pub fn measure_qubit(
    rho: &DensityMatrix,
    qubit: usize,
    setting: &MeasurementSetting,
    rng: &mut Rng,
) -> Result<MeasurementOutcome> {
    let [plus, minus] = branch_probabilities(rho, qubit, setting)?;
    let outcome = if plus < DEGENERATE_PROBABILITY {
        Outcome::Minus
    } else if minus < DEGENERATE_PROBABILITY || rng.uniform() < plus {
        Outcome::Plus
    } else {
        Outcome::Minus
    };
    measure_qubit_forced(rho, qubit, setting, outcome)
}

/// Per-qubit outcomes of a full product measurement. Bit `n−1−q` of `mask`
/// is set when qubit `q` gave −1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Outcomes {
    pub n_qubits: usize,
    pub mask: usize,
}

impl Outcomes {
    pub fn outcome(&self, qubit: usize) -> Outcome {
        Outcome::from_bit(qubit_bit(self.mask, self.n_qubits, qubit))
    }

    /// Product of all ±1 values.
    pub fn product(&self) -> i8 {
        if self.mask.count_ones().is_multiple_of(2) {
            1
        } else {
            -1
        }
    }
}

/// Measure every qubit in order `0..n` with [`measure_qubit`].
pub fn measure_all(rho: &DensityMatrix, settings: &[MeasurementSetting], rng: &mut Rng) -> Result<Outcomes> {
    check_settings(rho, settings)?;
    let n = rho.n_qubits();
    let mut state = rho.clone();
    let mut mask = 0;
    for (q, s) in settings.iter().enumerate() {
        let m = measure_qubit(&state, q, s, rng)?;
        if m.outcome == Outcome::Minus {
            mask |= 1 << (n - 1 - q);
        }
        state = m.post_state;
    }
    Ok(Outcomes { n_qubits: n, mask })
}

fn check_settings(rho: &DensityMatrix, settings: &[MeasurementSetting]) -> Result<()> {
    if settings.len() != rho.n_qubits() {
        return Err(Error::invalid(format!("{} settings for a {}-qubit state", settings.len(), rho.n_qubits())));
    }
    Ok(())
}

/// `Tr(ρ ⊗ᵢ Oᵢ)` for one 2×2 operator per qubit.
fn product_trace(rho: &DensityMatrix, ops: &[Mat2]) -> f64 {
    let n = rho.n_qubits();
    let d = rho.dim();
    let m = rho.matrix();
    let mut t = ZERO;
    for i in 0..d {
        for j in 0..d {
            let rij = m[(i, j)];
            if rij == ZERO {
                continue;
            }
            // (⊗O)_{ji}
            let mut o = Complex64::new(1.0, 0.0);
            for (q, op) in ops.iter().enumerate() {
                o *= op[qubit_bit(j, n, q)][qubit_bit(i, n, q)];
                if o == ZERO {
                    break;
                }
            }
            t += rij * o;
        }
    }
    t.re
}

/// Exact correlation `Tr(ρ ⊗ᵢ (nᵢ·σ))`.
pub fn expectation(rho: &DensityMatrix, settings: &[MeasurementSetting]) -> Result<f64> {
    check_settings(rho, settings)?;
    let ops: Vec<Mat2> = settings.iter().map(|s| s.observable()).collect();
    Ok(product_trace(rho, &ops).clamp(-1.0, 1.0))
}

/// Exact joint Born distribution of a product measurement, indexed by
/// [`Outcomes::mask`].
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeTable {
    n_qubits: usize,
    probs: Vec<f64>,
}

impl OutcomeTable {
    pub fn new(rho: &DensityMatrix, settings: &[MeasurementSetting]) -> Result<Self> {
        check_settings(rho, settings)?;
        let n = rho.n_qubits();
        let projectors: Vec<[Mat2; 2]> =
            settings.iter().map(|s| [s.projector(Outcome::Plus), s.projector(Outcome::Minus)]).collect();
        let probs = (0..1usize << n)
            .map(|mask| {
                let ops: Vec<Mat2> = (0..n).map(|q| projectors[q][qubit_bit(mask, n, q)]).collect();
                product_trace(rho, &ops).max(0.0)
            })
            .collect();
        Ok(OutcomeTable { n_qubits: n, probs })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    /// Expected product of all outcomes.
    pub fn product_expectation(&self) -> f64 {
        self.probs.iter().enumerate().map(|(mask, p)| if mask.count_ones() % 2 == 0 { *p } else { -p }).sum()
    }

    /// Sample qubit by qubit in order `0..n`, each conditioned on the earlier
    /// outcomes. `draw(q)` supplies the uniform variate for qubit `q`, which
    /// lets each party use its own stream. The law equals that of
    /// [`measure_all`].
    pub fn sample(&self, mut draw: impl FnMut(usize) -> f64) -> Outcomes {
        let n = self.n_qubits;
        let mut mask = 0;
        for q in 0..n {
            let bit = 1 << (n - 1 - q);
            // Outcomes whose first q qubits agree with the prefix.
            let prefix_bits = !((1usize << (n - q)) - 1) & ((1 << n) - 1);
            let (mut plus, mut minus) = (0.0, 0.0);
            for (m, p) in self.probs.iter().enumerate() {
                if m & prefix_bits == mask {
                    if m & bit == 0 {
                        plus += p;
                    } else {
                        minus += p;
                    }
                }
            }
            let total = plus + minus;
            let p_plus = if total > 0.0 { plus / total } else { 0.5 };
            let take_plus = if p_plus * total < DEGENERATE_PROBABILITY {
                false
            } else if (1.0 - p_plus) * total < DEGENERATE_PROBABILITY {
                true
            } else {
                draw(q) < p_plus
            };
            if !take_plus {
                mask |= bit;
            }
        }
        Outcomes { n_qubits: n, mask }
    }
}

/// Unnormalized `⟨B|ρ|B⟩` on the qubits outside `pair`, together with the
/// sorted list of those qubits.
fn bell_branch(rho: &DensityMatrix, pair: (usize, usize), label: BellLabel) -> (DMatrix<Complex64>, usize) {
    let n = rho.n_qubits();
    let rest: Vec<usize> = (0..n).filter(|&q| q != pair.0 && q != pair.1).collect();
    let pair_list = [pair.0, pair.1];
    let b = bell_state(label);
    let amps = b.amplitudes();
    let pair_idx: Vec<usize> = (0..4).map(|v| scatter_bits(v, &pair_list, n)).collect();
    let rd = 1 << rest.len();
    let rest_idx: Vec<usize> = (0..rd).map(|v| scatter_bits(v, &rest, n)).collect();
    let m = rho.matrix();
    let out = DMatrix::from_fn(rd, rd, |i, j| {
        let mut acc = ZERO;
        for (x, ax) in amps.iter().enumerate() {
            if *ax == ZERO {
                continue;
            }
            for (y, ay) in amps.iter().enumerate() {
                if *ay == ZERO {
                    continue;
                }
                acc += ax.conj() * ay * m[(rest_idx[i] | pair_idx[x], rest_idx[j] | pair_idx[y])];
            }
        }
        acc
    });
    (out, rest.len())
}

fn check_pair(rho: &DensityMatrix, pair: (usize, usize)) -> Result<()> {
    check_qubit(rho, pair.0)?;
    check_qubit(rho, pair.1)?;
    if pair.0 == pair.1 {
        return Err(Error::invalid(format!("Bell measurement on the same qubit twice ({})", pair.0)));
    }
    Ok(())
}

/// Born probabilities of the four Bell outcomes on `pair`, in [`BellLabel::ALL`] order.
pub fn bell_probabilities(rho: &DensityMatrix, pair: (usize, usize)) -> Result<[f64; 4]> {
    check_pair(rho, pair)?;
    Ok(BellLabel::ALL.map(|l| bell_branch(rho, pair, l).0.trace().re.max(0.0)))
}

/// Project `pair` onto Bell state `label`. Returns the branch probability
/// and the normalized state of the remaining qubits.
pub fn bell_project(rho: &DensityMatrix, pair: (usize, usize), label: BellLabel) -> Result<(f64, DensityMatrix)> {
    check_pair(rho, pair)?;
    let (mut m, n_rest) = bell_branch(rho, pair, label);
    let probability = m.trace().re;
    if probability < DEGENERATE_PROBABILITY {
        return Err(Error::DegenerateBranch { probability });
    }
    m /= Complex64::new(probability, 0.0);
    Ok((probability, DensityMatrix::from_parts(n_rest, m)))
}

/// Joint Bell-basis measurement on `pair`. Returns the sampled label and
/// the normalized state of the remaining qubits (pair traced out).
pub fn bell_measure(rho: &DensityMatrix, pair: (usize, usize), rng: &mut Rng) -> Result<(BellLabel, DensityMatrix)> {
    let probs = bell_probabilities(rho, pair)?;
    let label = sample_label(&probs, rng.uniform());
    let (_, post) = bell_project(rho, pair, label)?;
    Ok((label, post))
}

/// Inverse-CDF selection skipping numerically impossible labels.
fn sample_label(probs: &[f64; 4], u: f64) -> BellLabel {
    let total: f64 = probs.iter().filter(|&&p| p >= DEGENERATE_PROBABILITY).sum();
    let target = u * total;
    let mut acc = 0.0;
    let mut last = None;
    for (l, &p) in BellLabel::ALL.iter().zip(probs) {
        if p < DEGENERATE_PROBABILITY {
            continue;
        }
        acc += p;
        last = Some(*l);
        if target < acc {
            return *l;
        }
    }
    last.expect("at least one Bell branch has positive probability")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{smolin_state, tensor};

    fn born_enumeration(rho: &DensityMatrix, settings: &[MeasurementSetting]) -> Vec<f64> {
        // Sequential forced projections: P(a) = Π p(a_q | a_<q).
        let n = rho.n_qubits();
        (0..1usize << n)
            .map(|mask| {
                let mut state = rho.clone();
                let mut p = 1.0;
                for (q, s) in settings.iter().enumerate() {
                    let o = Outcome::from_bit(qubit_bit(mask, n, q));
                    match measure_qubit_forced(&state, q, s, o) {
                        Ok(m) => {
                            p *= m.probability;
                            state = m.post_state;
                        }
                        Err(_) => return 0.0,
                    }
                }
                p
            })
            .collect()
    }

    #[test]
    fn setting_validation() {
        assert!(MeasurementSetting::new([1.0, 1.0, 0.0]).is_err());
        assert!(MeasurementSetting::from_vector([0.0; 3]).is_err());
        let s = MeasurementSetting::from_vector([1.0, 1.0, 0.0]).unwrap();
        assert!((s.direction()[0] - FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn mixed_state_is_unbiased() {
        let rho = DensityMatrix::maximally_mixed(4);
        for s in [
            MeasurementSetting::x(),
            MeasurementSetting::y(),
            MeasurementSetting::from_vector([0.3, -0.2, 0.9]).unwrap(),
        ] {
            let [p, m] = branch_probabilities(&rho, 0, &s).unwrap();
            assert!((p - 0.5).abs() < 1e-12 && (m - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn phi_plus_z_outcomes_agree() {
        let phi = bell_state(BellLabel::PhiPlus).density();
        let z = MeasurementSetting::z();
        let mut rng = Rng::new(5);
        for _ in 0..200 {
            let a = measure_qubit(&phi, 0, &z, &mut rng).unwrap();
            let b = measure_qubit(&a.post_state, 1, &z, &mut rng).unwrap();
            assert_eq!(a.outcome, b.outcome);
            assert!((b.probability - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn forcing_impossible_branch_errors() {
        let up = DensityMatrix::basis_state(1, 0).unwrap();
        let err = measure_qubit_forced(&up, 0, &MeasurementSetting::z(), Outcome::Minus).unwrap_err();
        assert!(matches!(err, Error::DegenerateBranch { .. }));
        let mut rng = Rng::new(0);
        for _ in 0..20 {
            assert_eq!(measure_qubit(&up, 0, &MeasurementSetting::z(), &mut rng).unwrap().outcome, Outcome::Plus);
        }
        assert!(measure_qubit(&up, 1, &MeasurementSetting::z(), &mut rng).is_err());
    }

    #[test]
    fn smolin_xxxx_parity_always_even() {
        let s = smolin_state();
        let xs = [MeasurementSetting::x(); 4];
        let probs = born_enumeration(&s, &xs);
        for (mask, p) in probs.iter().enumerate() {
            if mask.count_ones() % 2 == 1 {
                assert!(*p < 1e-12, "odd parity {mask:04b} has probability {p}");
            }
        }
        let mut rng = Rng::new(99);
        for _ in 0..100 {
            assert_eq!(measure_all(&s, &xs, &mut rng).unwrap().product(), 1);
        }
    }

    #[test]
    fn expectation_examples() {
        let s = smolin_state();
        let (x, y) = (MeasurementSetting::x(), MeasurementSetting::y());
        assert!((expectation(&s, &[x, x, x, x]).unwrap() - 1.0).abs() < 1e-12);
        assert!(expectation(&s, &[x, x, y, y]).unwrap().abs() < 1e-12);
        let mixed = DensityMatrix::maximally_mixed(4);
        assert!(expectation(&mixed, &[x, y, x, MeasurementSetting::z()]).unwrap().abs() < 1e-12);
        assert!(expectation(&s, &[x, x, x]).is_err());
    }

    #[test]
    fn outcome_table_matches_sequential_projection() {
        let s = crate::qstate::depolarize(&smolin_state(), 0.8).unwrap();
        let settings = [
            MeasurementSetting::diagonal([1.0, 0.0, 0.0], [0.0, 1.0, 0.0], 1.0),
            MeasurementSetting::x(),
            MeasurementSetting::y(),
            MeasurementSetting::from_vector([0.2, 0.5, 0.7]).unwrap(),
        ];
        let table = OutcomeTable::new(&s, &settings).unwrap();
        let oracle = born_enumeration(&s, &settings);
        for (a, b) in table.probabilities().iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-12);
        }
        let e = expectation(&s, &settings).unwrap();
        assert!((table.product_expectation() - e).abs() < 1e-12);
    }

    #[test]
    fn bell_measure_on_smolin_is_uniform_and_correlated() {
        let s = smolin_state();
        let probs = bell_probabilities(&s, (0, 1)).unwrap();
        for p in probs {
            assert!((p - 0.25).abs() < 1e-12);
        }
        let mut rng = Rng::new(3);
        for _ in 0..200 {
            let (a, rest) = bell_measure(&s, (0, 1), &mut rng).unwrap();
            assert_eq!(rest.n_qubits(), 2);
            let (b, none) = bell_measure(&rest, (0, 1), &mut rng).unwrap();
            assert_eq!(a, b);
            assert_eq!(none.n_qubits(), 0);
        }
    }

    #[test]
    fn bell_eigenstate_is_certain() {
        let rho = tensor(&bell_state(BellLabel::PsiMinus).density(), &DensityMatrix::maximally_mixed(2));
        let probs = bell_probabilities(&rho, (0, 1)).unwrap();
        assert!((probs[BellLabel::PsiMinus.index()] - 1.0).abs() < 1e-12);
        let mut rng = Rng::new(1);
        for _ in 0..50 {
            assert_eq!(bell_measure(&rho, (0, 1), &mut rng).unwrap().0, BellLabel::PsiMinus);
        }
        assert!(matches!(bell_project(&rho, (0, 1), BellLabel::PhiPlus), Err(Error::DegenerateBranch { .. })));
    }

    #[test]
    fn bell_measure_rejects_repeated_qubit() {
        let mut rng = Rng::new(1);
        assert!(bell_measure(&smolin_state(), (2, 2), &mut rng).is_err());
        assert!(bell_measure(&smolin_state(), (2, 4), &mut rng).is_err());
    }

    #[test]
    fn rotation_preserves_norm_and_moves_direction() {
        let r = MeasurementSetting::x().rotated([0.0, 0.0, 1.0], std::f64::consts::FRAC_PI_2).unwrap();
        let d = r.direction();
        assert!(d[0].abs() < 1e-12 && (d[1] - 1.0).abs() < 1e-12);
    }
}
