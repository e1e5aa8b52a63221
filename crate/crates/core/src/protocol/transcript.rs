use std::fmt;

use sha2::{Digest, Sha256};

/// Session participant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Party {
    Alice,
    Bob,
    Charlie,
    Eve,
}

impl Party {
    pub fn as_str(self) -> &'static str {
        match self {
            Party::Alice => "alice",
            Party::Bob => "bob",
            Party::Charlie => "charlie",
            Party::Eve => "eve",
        }
    }

    pub(crate) fn stream_id(self) -> u64 {
        match self {
            Party::Alice => 1,
            Party::Bob => 2,
            Party::Charlie => 3,
            Party::Eve => 4,
        }
    }
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Phase {
    Distribution,
    SecurityCheck,
    Transfer,
    Reconstruction,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::Distribution => "distribution",
            Phase::SecurityCheck => "security-check",
            Phase::Transfer => "transfer",
            Phase::Reconstruction => "reconstruction",
        }
    }

    pub(crate) fn stream_id(self) -> u64 {
        match self {
            Phase::Distribution => 1,
            Phase::SecurityCheck => 2,
            Phase::Transfer => 3,
            Phase::Reconstruction => 4,
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EventKind {
    Send,
    Announce,
    Measure,
    Outcome,
    Verdict,
    KeyEmit,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::Send => "send",
            EventKind::Announce => "announce",
            EventKind::Measure => "measure",
            EventKind::Outcome => "outcome",
            EventKind::Verdict => "verdict",
            EventKind::KeyEmit => "key-emit",
        }
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event {
    pub seq: u64,
    pub phase: Phase,
    pub party: Party,
    pub kind: EventKind,
    pub payload: String,
}

impl fmt::Display for Event {
    /// `seq<TAB>phase<TAB>party<TAB>kind<TAB>payload`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}\t{}\t{}\t{}\t{}", self.seq, self.phase, self.party, self.kind, self.payload)
    }
}

/// How much per-copy detail the transcript keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TranscriptDetail {
    /// Every message, measurement and outcome.
    #[default]
    Full,
    /// Phase-level announcements, verdict and key emission only.
    Summary,
}

/// Totally ordered event log of one session.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Transcript {
    events: Vec<Event>,
}

impl Transcript {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, phase: Phase, party: Party, kind: EventKind, payload: impl Into<String>) {
        let seq = self.events.len() as u64;
        self.events.push(Event { seq, phase, party, kind, payload: payload.into() });
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// One line per event, newline-terminated.
    pub fn to_records(&self) -> String {
        let mut out = String::new();
        for e in &self.events {
            out.push_str(&e.to_string());
            out.push('\n');
        }
        out
    }

    /// Lowercase hex SHA-256 of [`Transcript::to_records`].
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        for e in &self.events {
            h.update(e.to_string().as_bytes());
            h.update(b"\n");
        }
        hex::encode(h.finalize())
    }
}
