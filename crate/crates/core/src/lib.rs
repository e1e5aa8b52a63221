//! Simulation of three-party quantum secret sharing over four-qubit Smolin
//! bound entangled states.
//!
//! The crate is organized bottom-up:
//!
//! * [`qstate`]: dense density matrices, Bell states, the Smolin state,
//!   partial trace and partial transpose.
//! * [`measurement`]: Born-rule measurements and exact correlations.
//! * [`stats`]: ±1 sample accumulators and error propagation.
//! * [`belltest`]: the two-setting four-qubit Bell functional and the
//!   two-qubit CHSH functional, exact and sampled.
//! * [`adversary`]: eavesdropper models on the distribution channel.
//! * [`protocol`]: the Alice/Bob/Charlie session and its transcript.
//! * [`config`]: flat `key = value` session configuration.
//! * [`verify`]: the exact-algebra property suite.

pub mod adversary;
pub mod belltest;
pub mod config;
pub mod error;
pub mod measurement;
pub mod protocol;
pub mod qstate;
pub mod rng;
pub mod stats;
pub mod verify;

pub use belltest::{BellFunctionalResult, SettingsTable, Verdict};
pub use error::{Error, Result};
pub use protocol::{run_session, KeyMaterial, Session, SessionConfig, SessionOutcome};
pub use qstate::{BellLabel, DensityMatrix, PureState};
pub use rng::Rng;
