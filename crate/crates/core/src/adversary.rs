//! Eavesdropper models acting on qubits 2 and 3 (Bob's and Charlie's) while
//! they travel from Alice.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::measurement::{bell_measure, bell_probabilities, bell_project, DEGENERATE_PROBABILITY};
use crate::protocol::KeyMaterial;
use crate::qstate::{bell_state, depolarize, tensor, BellLabel, DensityMatrix};
use crate::rng::Rng;

/// Largest surviving fraction `p` a cloning attack can leave.
pub const CLONE_BOUND: f64 = 2.0 / 3.0;

/// Qubits in transit.
pub const TRANSIT_PAIR: (usize, usize) = (2, 3);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AttackKind {
    /// Intercept, clone and redistribute; seen by the parties as white noise.
    CloneDepolarize,
    /// Bell-measure the transit pair and resend a fresh pair in the observed state.
    BellResend,
}

impl AttackKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AttackKind::CloneDepolarize => "clone",
            AttackKind::BellResend => "bell-resend",
        }
    }
}

impl fmt::Display for AttackKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AttackKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "clone" => Ok(AttackKind::CloneDepolarize),
            "bell-resend" => Ok(AttackKind::BellResend),
            _ => Err(Error::invalid(format!("unknown attack `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttackSpec {
    pub kind: AttackKind,
    /// Surviving fraction for [`AttackKind::CloneDepolarize`]; ignored otherwise.
    pub p: f64,
    /// Chance that Eve attacks any given copy.
    pub copy_probability: f64,
    /// Permit `p > 2/3` for threshold experiments.
    pub allow_above_bound: bool,
}

impl AttackSpec {
    pub fn clone_depolarize(p: f64) -> Result<Self> {
        let spec = AttackSpec { kind: AttackKind::CloneDepolarize, p, copy_probability: 1.0, allow_above_bound: false };
        spec.validate()?;
        Ok(spec)
    }

    pub fn bell_resend() -> Self {
        AttackSpec { kind: AttackKind::BellResend, p: 1.0, copy_probability: 1.0, allow_above_bound: false }
    }

    pub fn with_copy_probability(mut self, q: f64) -> Result<Self> {
        self.copy_probability = q;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.copy_probability) {
            return Err(Error::invalid(format!(
                "per-copy attack probability {} outside [0, 1]",
                self.copy_probability
            )));
        }
        if self.kind == AttackKind::CloneDepolarize {
            if !(0.0..=1.0).contains(&self.p) {
                return Err(Error::invalid(format!("clone parameter p = {} outside [0, 1]", self.p)));
            }
            if self.p > CLONE_BOUND && !self.allow_above_bound {
                return Err(Error::invalid(format!(
                    "clone parameter p = {} exceeds 2/3; set the override to allow it",
                    self.p
                )));
            }
        }
        Ok(())
    }
}

fn require_four_qubits(rho: &DensityMatrix) -> Result<()> {
    if rho.n_qubits() != 4 {
        return Err(Error::invalid(format!("attack expects a 4-qubit copy, got {} qubits", rho.n_qubits())));
    }
    Ok(())
}

/// Cloning attack: the copy decays to `(1 − p)·I/16 + p·ρ`.
pub fn attack_clone(copy_state: &DensityMatrix, p: f64) -> Result<DensityMatrix> {
    require_four_qubits(copy_state)?;
    depolarize(copy_state, p)
}

/// Bell-measure qubits 2, 3 and replace them with a fresh pair in the
/// observed Bell state. Returns the new copy and Eve's label.
pub fn attack_bell_resend(copy_state: &DensityMatrix, rng: &mut Rng) -> Result<(DensityMatrix, BellLabel)> {
    require_four_qubits(copy_state)?;
    let (label, alice_side) = bell_measure(copy_state, TRANSIT_PAIR, rng)?;
    Ok((tensor(&alice_side, &bell_state(label).density()), label))
}

/// The attacked copy averaged over Eve's outcomes.
pub fn bell_resend_ensemble(copy_state: &DensityMatrix) -> Result<DensityMatrix> {
    require_four_qubits(copy_state)?;
    let probs = bell_probabilities(copy_state, TRANSIT_PAIR)?;
    let mut acc: Option<nalgebra::DMatrix<num_complex::Complex64>> = None;
    for (label, p) in BellLabel::ALL.into_iter().zip(probs) {
        if p < DEGENERATE_PROBABILITY {
            continue;
        }
        let (p, alice_side) = bell_project(copy_state, TRANSIT_PAIR, label)?;
        let branch = tensor(&alice_side, &bell_state(label).density()).matrix().scale(p);
        acc = Some(match acc {
            Some(m) => m + branch,
            None => branch,
        });
    }
    let m = acc.expect("Bell outcome probabilities sum to one");
    DensityMatrix::from_matrix(4, m)
}

/// Eve's classical record: the Bell label she saw, per record number.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EveLog {
    labels: BTreeMap<u32, BellLabel>,
}

impl EveLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, record_number: u32, label: BellLabel) {
        self.labels.insert(record_number, label);
    }

    pub fn get(&self, record_number: u32) -> Option<BellLabel> {
        self.labels.get(&record_number).copied()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Fraction of Alice's key bits that Eve's log determines. Copies Eve has no
/// label for contribute nothing, so an empty log gives 0.
pub fn eve_key_knowledge(log: &EveLog, alice_key: &KeyMaterial) -> f64 {
    let total = alice_key.bit_len();
    if total == 0 {
        return 0.0;
    }
    let known: u32 = alice_key
        .entries()
        .filter_map(|(record, label)| log.get(record).map(|eve| 2 - (eve.bits() ^ label.bits()).count_ones()))
        .sum();
    known as f64 / total as f64
}
