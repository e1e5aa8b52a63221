//! The three-party secret sharing session.
//!
//! Alice prepares `N` Smolin copies, keeps qubits 0 and 1, and sends qubit 2
//! to Bob and qubit 3 to Charlie. She then spends `M` randomly chosen copies
//! on the four-qubit Bell test. If the channel passes, she Bell-measures her
//! pair on every remaining copy; Bob and Charlie can only read her outcome
//! by measuring their two qubits jointly.
//!
//! Randomness is split per party, per phase and per copy from the master
//! seed, so the transcript is a pure function of the configuration.

mod key;
mod transcript;

use std::collections::hash_map::Entry;
use std::collections::HashMap;
use std::sync::Arc;

pub use key::KeyMaterial;
pub use transcript::{Event, EventKind, Party, Phase, Transcript, TranscriptDetail};

use crate::adversary::{attack_bell_resend, attack_clone, AttackKind, AttackSpec, EveLog};
use crate::belltest::{
    chsh2_tables, chsh4_tables, default_settings, optimal_pair_settings, violation_threshold_check,
    BellFunctionalResult, CorrelationTally, Schedule, SettingsTable, Verdict, DEFAULT_VERDICT_K,
};
use crate::error::{Error, Result};
use crate::measurement::{bell_measure, OutcomeTable};
use crate::qstate::{partial_trace, smolin_state, tensor, BellLabel, DensityMatrix};
use crate::rng::Rng;

/// Qubit positions of the shares in a fresh copy.
pub const ALICE_PAIR: (usize, usize) = (0, 1);
pub const BOB_QUBIT: usize = 2;
pub const CHARLIE_QUBIT: usize = 3;

const PAIR_TEST_STREAM: u64 = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct SessionConfig {
    /// Number of Smolin copies `N`.
    pub n_copies: usize,
    /// Fraction of copies spent on the Bell test; `M = round(fraction·N)`.
    pub check_fraction: f64,
    pub master_seed: u64,
    pub attack: Option<AttackSpec>,
    /// Confidence multiplier `k` of the verdict rule.
    pub verdict_k: f64,
    pub schedule: Schedule,
    pub detail: TranscriptDetail,
}

impl Default for SessionConfig {
    fn default() -> Self {
        SessionConfig {
            n_copies: 1000,
            check_fraction: 0.5,
            master_seed: 0,
            attack: None,
            verdict_k: DEFAULT_VERDICT_K,
            schedule: Schedule::Uniform,
            detail: TranscriptDetail::Full,
        }
    }
}

impl SessionConfig {
    /// `M`, the number of check copies.
    pub fn check_count(&self) -> usize {
        (self.check_fraction * self.n_copies as f64).round() as usize
    }

    pub fn key_count(&self) -> usize {
        self.n_copies.saturating_sub(self.check_count())
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_copies < 2 {
            return Err(Error::invalid(format!("{} copies; at least 2 are needed", self.n_copies)));
        }
        if self.n_copies > u32::MAX as usize {
            return Err(Error::invalid("too many copies"));
        }
        if !(self.check_fraction > 0.0 && self.check_fraction < 1.0) {
            return Err(Error::invalid(format!("check fraction {} outside (0, 1)", self.check_fraction)));
        }
        let m = self.check_count();
        if m == 0 || m >= self.n_copies {
            return Err(Error::invalid(format!(
                "check fraction {} gives M = {m} of N = {}; need 1 ≤ M ≤ N−1",
                self.check_fraction, self.n_copies
            )));
        }
        if !(self.verdict_k.is_finite() && self.verdict_k >= 0.0) {
            return Err(Error::invalid(format!("verdict k = {} must be finite and non-negative", self.verdict_k)));
        }
        if let Some(a) = &self.attack {
            a.validate()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    /// Not yet assigned by the security check.
    Pending,
    Check,
    Key,
}

/// A qubit of a copy and who holds it. `label` is the protocol's 1-based
/// qubit number.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QubitHandle {
    pub label: u8,
    pub holder: Party,
}

/// One Smolin copy and who holds which of its qubits.
#[derive(Debug, Clone)]
pub struct CopyRecord {
    pub record_number: u32,
    pub role: Role,
    /// Joint state of the qubits in `qubits`, in that order. `None` once the
    /// copy has been fully measured.
    state: Option<Arc<DensityMatrix>>,
    qubits: Vec<QubitHandle>,
}

impl CopyRecord {
    pub fn state(&self) -> Option<&DensityMatrix> {
        self.state.as_deref()
    }

    pub fn qubits(&self) -> &[QubitHandle] {
        &self.qubits
    }

    /// Position within [`CopyRecord::state`] of the qubit held by `party`,
    /// if that party holds exactly one.
    pub fn position_of(&self, party: Party) -> Option<usize> {
        let mut held = self.qubits.iter().enumerate().filter(|(_, h)| h.holder == party);
        match (held.next(), held.next()) {
            (Some((i, _)), None) => Some(i),
            _ => None,
        }
    }

    /// Reduced state of the qubits held by `party`.
    pub fn share_state(&self, party: Party) -> Result<DensityMatrix> {
        let state = self.state().ok_or_else(|| Error::invalid("copy already consumed"))?;
        let keep: Vec<usize> =
            self.qubits.iter().enumerate().filter(|(_, h)| h.holder == party).map(|(i, _)| i).collect();
        partial_trace(state, &keep)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SecurityReport {
    pub estimate: BellFunctionalResult,
    pub verdict: Verdict,
    pub check_count: usize,
    pub verdict_k: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Stage {
    Created,
    Distributed,
    Checked,
    Transferred,
    Reconstructed,
}

/// A session in progress. Phases must run in order.
#[derive(Debug, Clone)]
pub struct Session {
    cfg: SessionConfig,
    master: Rng,
    stage: Stage,
    copies: Vec<CopyRecord>,
    transcript: Transcript,
    eve_log: EveLog,
    report: Option<SecurityReport>,
    settings: SettingsTable,
}

impl Session {
    pub fn new(cfg: SessionConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Session {
            master: Rng::new(cfg.master_seed),
            cfg,
            stage: Stage::Created,
            copies: Vec::new(),
            transcript: Transcript::new(),
            eve_log: EveLog::new(),
            report: None,
            settings: default_settings(),
        })
    }

    pub fn config(&self) -> &SessionConfig {
        &self.cfg
    }

    pub fn copies(&self) -> &[CopyRecord] {
        &self.copies
    }

    pub fn transcript(&self) -> &Transcript {
        &self.transcript
    }

    pub fn eve_log(&self) -> &EveLog {
        &self.eve_log
    }

    pub fn report(&self) -> Option<&SecurityReport> {
        self.report.as_ref()
    }

    /// Stream for `party` in `phase`; `record` 0 is the phase-level stream.
    fn stream(&self, party: Party, phase: Phase, record: u32) -> Rng {
        self.master.split(party.stream_id()).split(phase.stream_id()).split(record as u64)
    }

    fn full(&self) -> bool {
        self.cfg.detail == TranscriptDetail::Full
    }

    fn log(&mut self, phase: Phase, party: Party, kind: EventKind, payload: impl Into<String>) {
        self.transcript.push(phase, party, kind, payload);
    }

    fn require_stage(&self, stage: Stage, what: &str) -> Result<()> {
        if self.stage != stage {
            return Err(Error::ProtocolAbort(format!("{what} invoked out of order (session is at {:?})", self.stage)));
        }
        Ok(())
    }

    /// Prepare `N` copies and route qubit 2 to Bob and qubit 3 to Charlie,
    /// passing through Eve if an attack is configured.
    pub fn phase1_distribute(&mut self) -> Result<&[CopyRecord]> {
        self.require_stage(Stage::Created, "distribution")?;
        const PH: Phase = Phase::Distribution;
        let n = self.cfg.n_copies;
        let smolin = Arc::new(smolin_state());
        let attack = self.cfg.attack;
        let cloned = match attack {
            Some(a) if a.kind == AttackKind::CloneDepolarize => Some(Arc::new(attack_clone(&smolin, a.p)?)),
            _ => None,
        };
        let mut resent: HashMap<BellLabel, Arc<DensityMatrix>> = HashMap::new();
        let full = self.full();

        self.log(PH, Party::Alice, EventKind::Announce, format!("prepared copies={n} state=smolin"));
        let mut copies = Vec::with_capacity(n);
        for r in 1..=n as u32 {
            if full {
                self.log(PH, Party::Alice, EventKind::Send, format!("record={r} qubit=3 to=bob"));
                self.log(PH, Party::Alice, EventKind::Send, format!("record={r} qubit=4 to=charlie"));
            }
            let mut state = Arc::clone(&smolin);
            if let Some(a) = attack {
                let mut eve = self.stream(Party::Eve, PH, r);
                let hit = a.copy_probability >= 1.0 || eve.uniform() < a.copy_probability;
                if hit {
                    match a.kind {
                        AttackKind::CloneDepolarize => {
                            state = Arc::clone(cloned.as_ref().expect("clone state prepared"));
                            if full {
                                self.log(
                                    PH,
                                    Party::Eve,
                                    EventKind::Measure,
                                    format!("record={r} attack=clone p={}", a.p),
                                );
                            }
                        }
                        AttackKind::BellResend => {
                            let (attacked, label) = attack_bell_resend(&smolin, &mut eve)?;
                            state = Arc::clone(resent.entry(label).or_insert_with(|| Arc::new(attacked)));
                            self.eve_log.record(r, label);
                            if full {
                                self.log(
                                    PH,
                                    Party::Eve,
                                    EventKind::Measure,
                                    format!("record={r} attack=bell-resend outcome={label}"),
                                );
                            }
                        }
                    }
                }
            }
            if full {
                self.log(PH, Party::Bob, EventKind::Announce, format!("record={r} received qubit=3"));
                self.log(PH, Party::Charlie, EventKind::Announce, format!("record={r} received qubit=4"));
            }
            copies.push(CopyRecord {
                record_number: r,
                role: Role::Pending,
                state: Some(state),
                qubits: vec![
                    QubitHandle { label: 1, holder: Party::Alice },
                    QubitHandle { label: 2, holder: Party::Alice },
                    QubitHandle { label: 3, holder: Party::Bob },
                    QubitHandle { label: 4, holder: Party::Charlie },
                ],
            });
        }
        if !full {
            self.log(PH, Party::Bob, EventKind::Announce, format!("received copies={n}"));
            self.log(PH, Party::Charlie, EventKind::Announce, format!("received copies={n}"));
        }
        self.copies = copies;
        self.stage = Stage::Distributed;
        Ok(&self.copies)
    }

    /// Spend `M` random copies on the four-qubit Bell test and decide
    /// whether the channel is usable.
    pub fn phase2_security_check(&mut self) -> Result<SecurityReport> {
        self.require_stage(Stage::Distributed, "security check")?;
        const PH: Phase = Phase::SecurityCheck;
        let n = self.copies.len();
        let m = self.cfg.check_count();
        if m == 0 || m >= n {
            return Err(Error::invalid(format!("M = {m} check copies out of N = {n}")));
        }
        let full = self.full();

        let chosen = self.stream(Party::Alice, PH, 0).choose_indices(n, m);
        for &i in &chosen {
            self.copies[i].role = Role::Check;
        }
        for c in self.copies.iter_mut().filter(|c| c.role == Role::Pending) {
            c.role = Role::Key;
        }
        if full {
            let list: Vec<String> = chosen.iter().map(|&i| self.copies[i].record_number.to_string()).collect();
            self.log(PH, Party::Alice, EventKind::Announce, format!("check records={}", list.join(",")));
        } else {
            self.log(PH, Party::Alice, EventKind::Announce, format!("check count={m}"));
        }

        // Copies share state allocations; the cache holds each Arc so its address stays a valid key.
        let mut tables: HashMap<*const DensityMatrix, (Arc<DensityMatrix>, [OutcomeTable; 4])> = HashMap::new();
        let mut tally = CorrelationTally::new();
        for (round, &i) in chosen.iter().enumerate() {
            let r = self.copies[i].record_number;
            let state = self.copies[i].state.take().expect("fresh copy");
            let mut alice = self.stream(Party::Alice, PH, r);
            let mut bob = self.stream(Party::Bob, PH, r);
            let mut charlie = self.stream(Party::Charlie, PH, r);
            let term = self.cfg.schedule.term(round as u64, &mut alice);
            let key = Arc::as_ptr(&state);
            if let Entry::Vacant(slot) = tables.entry(key) {
                let t = chsh4_tables(&state, &self.settings)?;
                slot.insert((state, t));
            }
            let outcomes = tables[&key].1[term].sample(|q| match q {
                0 | 1 => alice.uniform(),
                BOB_QUBIT => bob.uniform(),
                _ => charlie.uniform(),
            });
            if full {
                let s = self.settings.term_settings(term);
                self.log(
                    PH,
                    Party::Alice,
                    EventKind::Announce,
                    format!("record={r} term={term} bob={} charlie={}", s[2], s[3]),
                );
                self.log(
                    PH,
                    Party::Alice,
                    EventKind::Outcome,
                    format!("record={r} q1={} q2={}", outcomes.outcome(0).value(), outcomes.outcome(1).value()),
                );
                self.log(
                    PH,
                    Party::Bob,
                    EventKind::Send,
                    format!("record={r} q3={} to=alice", outcomes.outcome(2).value()),
                );
                self.log(
                    PH,
                    Party::Charlie,
                    EventKind::Send,
                    format!("record={r} q4={} to=alice", outcomes.outcome(3).value()),
                );
            }
            tally.record(term, outcomes.product())?;
        }

        let estimate = tally.finish();
        let verdict = violation_threshold_check(&estimate, self.cfg.verdict_k);
        self.log(
            PH,
            Party::Alice,
            EventKind::Verdict,
            format!(
                "value={} std_error={} samples={} k={} verdict={verdict}",
                estimate.value, estimate.std_error, estimate.sample_count, self.cfg.verdict_k
            ),
        );
        let report = SecurityReport { estimate, verdict, check_count: m, verdict_k: self.cfg.verdict_k };
        self.report = Some(report.clone());
        self.stage = Stage::Checked;
        Ok(report)
    }

    /// Alice Bell-measures her pair on every key copy. Fails unless the
    /// security check came back Secure.
    pub fn phase3_transfer(&mut self) -> Result<KeyMaterial> {
        self.require_stage(Stage::Checked, "transfer")?;
        const PH: Phase = Phase::Transfer;
        match self.report.as_ref().map(|r| r.verdict) {
            Some(Verdict::Secure) => {}
            other => {
                return Err(Error::ProtocolAbort(format!(
                    "transfer requires a secure verdict, got {}",
                    other.map_or("none", Verdict::as_str)
                )))
            }
        }
        let full = self.full();
        let mut key = KeyMaterial::new();
        for i in 0..self.copies.len() {
            if self.copies[i].role != Role::Key {
                continue;
            }
            let r = self.copies[i].record_number;
            let mut rng = self.stream(Party::Alice, PH, r);
            let state = self.copies[i].state.take().expect("key copy untouched before transfer");
            let (label, rest) = bell_measure(&state, ALICE_PAIR, &mut rng)?;
            let copy = &mut self.copies[i];
            copy.state = Some(Arc::new(rest));
            copy.qubits.retain(|h| h.holder != Party::Alice);
            key.push(r, label);
            if full {
                self.log(PH, Party::Alice, EventKind::Measure, format!("record={r} basis=bell outcome={label}"));
            }
        }
        if key.is_empty() {
            self.log(PH, Party::Alice, EventKind::Announce, "warning: no key copies");
        }
        self.log(PH, Party::Alice, EventKind::Announce, format!("measurement finished copies={}", key.labels().len()));
        self.log(PH, Party::Alice, EventKind::KeyEmit, format!("bits={} key={}", key.bit_len(), key.to_hex()));
        self.stage = Stage::Transferred;
        Ok(key)
    }

    /// Joint Bell measurement on Bob's and Charlie's qubits of every key
    /// copy. `parties` lists who brought their qubits; both are required.
    pub fn reconstruct(&mut self, parties: &[Party]) -> Result<KeyMaterial> {
        if !(parties.contains(&Party::Bob) && parties.contains(&Party::Charlie)) {
            let names: Vec<&str> = parties.iter().map(|p| p.as_str()).collect();
            return Err(Error::InsufficientShares(format!(
                "reconstruction needs both bob and charlie, got [{}]",
                names.join(", ")
            )));
        }
        self.require_stage(Stage::Transferred, "reconstruction")?;
        const PH: Phase = Phase::Reconstruction;
        let full = self.full();
        let mut key = KeyMaterial::new();
        for i in 0..self.copies.len() {
            if self.copies[i].role != Role::Key {
                continue;
            }
            let r = self.copies[i].record_number;
            let mut rng = self.stream(Party::Bob, PH, r);
            let state = self.copies[i].state.take().expect("transferred key copy");
            let (label, _) = bell_measure(&state, (0, 1), &mut rng)?;
            self.copies[i].qubits.clear();
            key.push(r, label);
            if full {
                self.log(PH, Party::Bob, EventKind::Measure, format!("record={r} basis=bell-joint outcome={label}"));
            }
        }
        self.log(PH, Party::Bob, EventKind::KeyEmit, format!("bits={} key={}", key.bit_len(), key.to_hex()));
        self.stage = Stage::Reconstructed;
        Ok(key)
    }

    /// What `party` would decode acting alone after the transfer: the other
    /// share is replaced by a maximally mixed qubit and the pair is Bell
    /// measured. The session itself is left untouched.
    pub fn single_share_guess(&self, party: Party) -> Result<KeyMaterial> {
        if party != Party::Bob && party != Party::Charlie {
            return Err(Error::invalid(format!("{party} holds no share")));
        }
        self.require_stage(Stage::Transferred, "single-share guess")?;
        let mut guess = KeyMaterial::new();
        for c in self.copies.iter().filter(|c| c.role == Role::Key) {
            let share = c.share_state(party)?;
            let blank = DensityMatrix::maximally_mixed(1);
            let pair = if party == Party::Bob { tensor(&share, &blank) } else { tensor(&blank, &share) };
            let mut rng = self.stream(party, Phase::Reconstruction, c.record_number);
            let (label, _) = bell_measure(&pair, (0, 1), &mut rng)?;
            guess.push(c.record_number, label);
        }
        Ok(guess)
    }

    /// Two-qubit CHSH test on Alice's pair alone, one sampled round per copy,
    /// with [`optimal_pair_settings`]. Reads the copies without consuming
    /// them, and is only available between distribution and the security
    /// check.
    pub fn pair_chsh_test(&self) -> Result<BellFunctionalResult> {
        self.require_stage(Stage::Distributed, "pair test")?;
        let settings = optimal_pair_settings();
        let mut tables: HashMap<*const DensityMatrix, (Arc<DensityMatrix>, [OutcomeTable; 4])> = HashMap::new();
        let mut tally = CorrelationTally::new();
        for c in &self.copies {
            let state = c.state.clone().expect("distributed copy");
            let key = Arc::as_ptr(&state);
            if let Entry::Vacant(slot) = tables.entry(key) {
                let pair = partial_trace(&state, &[ALICE_PAIR.0, ALICE_PAIR.1])?;
                slot.insert((state, chsh2_tables(&pair, &settings)?));
            }
            let mut rng =
                self.master.split(Party::Alice.stream_id()).split(PAIR_TEST_STREAM).split(c.record_number as u64);
            let term = rng.below(4);
            let outcomes = tables[&key].1[term].sample(|_| rng.uniform());
            tally.record(term, outcomes.product())?;
        }
        Ok(tally.finish())
    }

    fn abort(&mut self, reason: &str) {
        self.log(Phase::SecurityCheck, Party::Alice, EventKind::Announce, format!("abort: {reason}"));
    }
}

/// Everything a finished session produced.
#[derive(Debug, Clone)]
pub struct SessionOutcome {
    pub session: Session,
    pub report: SecurityReport,
    /// Empty unless the verdict was Secure.
    pub alice_key: KeyMaterial,
    pub bc_key: KeyMaterial,
}

impl SessionOutcome {
    pub fn transcript(&self) -> &Transcript {
        self.session.transcript()
    }

    pub fn keys_match(&self) -> bool {
        self.alice_key == self.bc_key
    }
}

/// Run all phases. Transfer and reconstruction happen only on a Secure
/// verdict; otherwise the keys are empty.
pub fn run_session(cfg: SessionConfig) -> Result<SessionOutcome> {
    let mut session = Session::new(cfg)?;
    session.phase1_distribute()?;
    let report = session.phase2_security_check()?;
    let (alice_key, bc_key) = if report.verdict == Verdict::Secure {
        let a = session.phase3_transfer()?;
        let b = session.reconstruct(&[Party::Bob, Party::Charlie])?;
        (a, b)
    } else {
        session.abort(&format!("verdict {}", report.verdict));
        (KeyMaterial::new(), KeyMaterial::new())
    };
    Ok(SessionOutcome { session, report, alice_key, bc_key })
}
