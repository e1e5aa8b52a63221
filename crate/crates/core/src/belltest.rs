//! Two-setting Bell functionals.
//!
//! A functional is four correlation terms `E(c)` combined with signs
//! `(+, +, +, −)`, where each term `c` picks setting 0 or 1 for every qubit.
//! The four-qubit functional bounds local models by 2; the Smolin state
//! reaches `2√2` under [`default_settings`].

use std::f64::consts::SQRT_2;
use std::fmt;

use crate::error::{Error, Result};
use crate::measurement::{expectation, MeasurementSetting, OutcomeTable};
use crate::qstate::DensityMatrix;
use crate::rng::Rng;
use crate::stats::{combine_terms, SampleAccumulator, CHSH_SIGNS};

/// Bound obeyed by every local hidden-variable model.
pub const LOCAL_BOUND: f64 = 2.0;
/// Quantum value `2√2` on the Smolin state.
pub const SMOLIN_VALUE: f64 = 2.0 * SQRT_2;
/// Exact values within this distance of the bound count as non-violating,
/// so roundoff cannot turn `2√2·(1/√2)` into a violation.
pub const VERDICT_MARGIN: f64 = 1e-10;
/// Default one-sided confidence multiplier for the security verdict.
pub const DEFAULT_VERDICT_K: f64 = 3.0;

/// Setting indices per qubit for each term of the four-qubit functional.
///
/// Written as `E(s₂, s₃, s₄, s₁)` the terms are `E(1,1,1,1)`, `E(1,1,1,2)`,
/// `E(2,2,2,1)` and `E(2,2,2,2)`: the last slot drives Alice's rotated
/// qubit 0 and the first three drive qubits 1..3 together. Indices here are
/// zero-based and listed in qubit order.
pub const CHSH4_TERMS: [[usize; 4]; 4] = [[0, 0, 0, 0], [1, 0, 0, 0], [0, 1, 1, 1], [1, 1, 1, 1]];

/// Terms of the standard two-qubit CHSH functional `E(a₁b₁)+E(a₁b₂)+E(a₂b₁)−E(a₂b₂)`.
pub const CHSH2_TERMS: [[usize; 2]; 4] = [[0, 0], [0, 1], [1, 0], [1, 1]];

/// Two settings for each of four qubits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SettingsTable {
    pub qubits: [[MeasurementSetting; 2]; 4],
}

impl SettingsTable {
    /// Settings for one term of the functional.
    pub fn term_settings(&self, term: usize) -> [MeasurementSetting; 4] {
        let idx = CHSH4_TERMS[term];
        [0, 1, 2, 3].map(|q| self.qubits[q][idx[q]])
    }
}

/// Qubit 0: `(X+Y)/√2` and `(X−Y)/√2`; qubits 1..3: `X` and `Y`.
pub fn default_settings() -> SettingsTable {
    let (x, y) = (MeasurementSetting::x(), MeasurementSetting::y());
    let (xd, yd) = (x.direction(), y.direction());
    SettingsTable {
        qubits: [
            [MeasurementSetting::diagonal(xd, yd, 1.0), MeasurementSetting::diagonal(xd, yd, -1.0)],
            [x, y],
            [x, y],
            [x, y],
        ],
    }
}

/// Two settings for each of two qubits.
pub type PairSettings = [[MeasurementSetting; 2]; 2];

/// Qubit 0 measures `Z`, `X`; qubit 1 measures `(Z±X)/√2`. Optimal for `|Φ+⟩`.
pub fn optimal_pair_settings() -> PairSettings {
    let (z, x) = (MeasurementSetting::z(), MeasurementSetting::x());
    let (zd, xd) = (z.direction(), x.direction());
    [[z, x], [MeasurementSetting::diagonal(zd, xd, 1.0), MeasurementSetting::diagonal(zd, xd, -1.0)]]
}

fn pair_term_settings(settings: &PairSettings, term: usize) -> [MeasurementSetting; 2] {
    let idx = CHSH2_TERMS[term];
    [settings[0][idx[0]], settings[1][idx[1]]]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvaluationMode {
    Exact,
    Sampled,
}

/// Value of a Bell functional, exact or estimated.
#[derive(Debug, Clone, PartialEq)]
pub struct BellFunctionalResult {
    pub value: f64,
    /// The four correlation terms before signs are applied.
    pub components: [f64; 4],
    pub mode: EvaluationMode,
    /// Total number of rounds (0 when exact).
    pub sample_count: u64,
    /// Rounds per term (all 0 when exact).
    pub term_counts: [u64; 4],
    pub std_error: f64,
}

impl BellFunctionalResult {
    fn exact(components: [f64; 4]) -> Self {
        let (value, _) = combine_terms(&components, &[0.0; 4], &CHSH_SIGNS);
        BellFunctionalResult {
            value,
            components,
            mode: EvaluationMode::Exact,
            sample_count: 0,
            term_counts: [0; 4],
            std_error: 0.0,
        }
    }

    /// A sampled estimate with an empty term cannot be judged.
    pub fn is_inconclusive(&self) -> bool {
        self.mode == EvaluationMode::Sampled && self.term_counts.contains(&0)
    }
}

/// Per-term tallies of ±1 products. Tallies from disjoint rounds merge.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CorrelationTally {
    terms: [SampleAccumulator; 4],
}

impl CorrelationTally {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, term: usize, product: i8) -> Result<()> {
        self.terms.get_mut(term).ok_or_else(|| Error::invalid(format!("term index {term} out of range")))?.push(product)
    }

    pub fn merge(&self, other: &CorrelationTally) -> CorrelationTally {
        CorrelationTally { terms: [0, 1, 2, 3].map(|t| self.terms[t].merge(&other.terms[t])) }
    }

    pub fn term(&self, term: usize) -> &SampleAccumulator {
        &self.terms[term]
    }

    /// Combine per-term means with signs `(+, +, +, −)`. Empty terms
    /// contribute 0 and leave the result inconclusive.
    pub fn finish(&self) -> BellFunctionalResult {
        let means = self.terms.map(|t| t.mean().unwrap_or(0.0));
        let errs = self.terms.map(|t| t.std_error().unwrap_or(0.0));
        let (value, std_error) = combine_terms(&means, &errs, &CHSH_SIGNS);
        let term_counts = self.terms.map(|t| t.count());
        BellFunctionalResult {
            value,
            components: means,
            mode: EvaluationMode::Sampled,
            sample_count: term_counts.iter().sum(),
            term_counts,
            std_error,
        }
    }
}

/// How sampled rounds are assigned to terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Schedule {
    /// Each round draws its term uniformly at random.
    #[default]
    Uniform,
    /// Round `r` uses term `r mod 4`.
    RoundRobin,
}

impl Schedule {
    pub fn term(self, round: u64, rng: &mut Rng) -> usize {
        match self {
            Schedule::Uniform => rng.below(4),
            Schedule::RoundRobin => (round % 4) as usize,
        }
    }
}

fn require_qubits(rho: &DensityMatrix, n: usize) -> Result<()> {
    if rho.n_qubits() != n {
        return Err(Error::invalid(format!("expected a {n}-qubit state, got {} qubits", rho.n_qubits())));
    }
    Ok(())
}

/// Exact four-qubit functional.
pub fn chsh4_exact(rho: &DensityMatrix, table: &SettingsTable) -> Result<BellFunctionalResult> {
    require_qubits(rho, 4)?;
    let mut components = [0.0; 4];
    for (t, c) in components.iter_mut().enumerate() {
        *c = expectation(rho, &table.term_settings(t))?;
    }
    Ok(BellFunctionalResult::exact(components))
}

/// Outcome tables for the four terms of the four-qubit functional on `rho`.
pub fn chsh4_tables(rho: &DensityMatrix, table: &SettingsTable) -> Result<[OutcomeTable; 4]> {
    require_qubits(rho, 4)?;
    Ok([
        OutcomeTable::new(rho, &table.term_settings(0))?,
        OutcomeTable::new(rho, &table.term_settings(1))?,
        OutcomeTable::new(rho, &table.term_settings(2))?,
        OutcomeTable::new(rho, &table.term_settings(3))?,
    ])
}

/// Monte Carlo estimate of the four-qubit functional from `rounds` fresh
/// copies of `rho`, terms drawn uniformly per round.
pub fn chsh4_sampled(
    rho: &DensityMatrix,
    table: &SettingsTable,
    rounds: u64,
    rng: &mut Rng,
) -> Result<BellFunctionalResult> {
    chsh4_sampled_with(rho, table, rounds, rng, Schedule::Uniform)
}

pub fn chsh4_sampled_with(
    rho: &DensityMatrix,
    table: &SettingsTable,
    rounds: u64,
    rng: &mut Rng,
    schedule: Schedule,
) -> Result<BellFunctionalResult> {
    if rounds < 4 {
        return Err(Error::invalid(format!("{rounds} rounds; at least 4 are needed")));
    }
    let tables = chsh4_tables(rho, table)?;
    sample_terms(&tables, rounds, rng, schedule)
}

fn sample_terms(
    tables: &[OutcomeTable; 4],
    rounds: u64,
    rng: &mut Rng,
    schedule: Schedule,
) -> Result<BellFunctionalResult> {
    let mut tally = CorrelationTally::new();
    for round in 0..rounds {
        let term = schedule.term(round, rng);
        let outcomes = tables[term].sample(|_| rng.uniform());
        tally.record(term, outcomes.product())?;
    }
    Ok(tally.finish())
}

/// Exact two-qubit CHSH value `E(a₁b₁)+E(a₁b₂)+E(a₂b₁)−E(a₂b₂)`.
pub fn chsh2_exact(rho: &DensityMatrix, settings: &PairSettings) -> Result<f64> {
    Ok(chsh2_exact_result(rho, settings)?.value)
}

pub fn chsh2_exact_result(rho: &DensityMatrix, settings: &PairSettings) -> Result<BellFunctionalResult> {
    require_qubits(rho, 2)?;
    let mut components = [0.0; 4];
    for (t, c) in components.iter_mut().enumerate() {
        *c = expectation(rho, &pair_term_settings(settings, t))?;
    }
    Ok(BellFunctionalResult::exact(components))
}

pub fn chsh2_tables(rho: &DensityMatrix, settings: &PairSettings) -> Result<[OutcomeTable; 4]> {
    require_qubits(rho, 2)?;
    Ok([0, 1, 2, 3].map(|t| OutcomeTable::new(rho, &pair_term_settings(settings, t)).expect("qubit count checked")))
}

/// Monte Carlo estimate of the two-qubit CHSH value.
pub fn chsh2_sampled(
    rho: &DensityMatrix,
    settings: &PairSettings,
    rounds: u64,
    rng: &mut Rng,
) -> Result<BellFunctionalResult> {
    if rounds < 4 {
        return Err(Error::invalid(format!("{rounds} rounds; at least 4 are needed")));
    }
    let tables = chsh2_tables(rho, settings)?;
    sample_terms(&tables, rounds, rng, Schedule::Uniform)
}

/// Outcome of the security test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Secure,
    Insecure,
    /// Some term received no samples.
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Secure => "secure",
            Verdict::Insecure => "insecure",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Secure iff `value − k·std_error > 2` (by more than [`VERDICT_MARGIN`]).
pub fn violation_threshold_check(result: &BellFunctionalResult, confidence_k: f64) -> Verdict {
    if result.is_inconclusive() {
        return Verdict::Inconclusive;
    }
    let err = match result.mode {
        EvaluationMode::Exact => 0.0,
        EvaluationMode::Sampled => result.std_error,
    };
    if result.value - confidence_k * err > LOCAL_BOUND + VERDICT_MARGIN {
        Verdict::Secure
    } else {
        Verdict::Insecure
    }
}
