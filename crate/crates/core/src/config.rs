//! Flat `key = value` session configuration.
//!
//! ```text
//! # comment
//! copies = 1000
//! check_fraction = 0.5
//! seed = 42
//! attack = clone        # none | clone | bell-resend
//! p = 0.6667
//! ```

use std::collections::BTreeMap;
use std::str::FromStr;

use crate::adversary::{AttackKind, AttackSpec, CLONE_BOUND};
use crate::belltest::Schedule;
use crate::error::{Error, Result};
use crate::protocol::{SessionConfig, TranscriptDetail};

/// Keys understood by [`session_config_from`].
pub const SESSION_KEYS: &[&str] = &[
    "seed",
    "copies",
    "check_fraction",
    "attack",
    "p",
    "attack_probability",
    "allow_strong_clone",
    "verdict_k",
    "schedule",
    "transcript",
];

fn config_err(field: &str, message: impl Into<String>) -> Error {
    Error::Config { field: field.to_string(), message: message.into() }
}

/// Parse `key = value` lines. `#` starts a comment; blank lines are skipped.
/// Keys are normalized to lowercase with `-` replaced by `_`.
pub fn parse_key_values(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            config_err(&format!("line {}", lineno + 1), format!("expected `key = value`, got `{line}`"))
        })?;
        let key = normalize_key(k);
        if key.is_empty() {
            return Err(config_err(&format!("line {}", lineno + 1), "empty key"));
        }
        if out.insert(key.clone(), v.trim().to_string()).is_some() {
            return Err(config_err(&key, "given more than once"));
        }
    }
    Ok(out)
}

pub fn normalize_key(k: &str) -> String {
    k.trim().to_ascii_lowercase().replace('-', "_")
}

fn field<T: FromStr>(map: &BTreeMap<String, String>, key: &str) -> Result<Option<T>> {
    map.get(key).map(|v| v.parse::<T>().map_err(|_| config_err(key, format!("cannot parse `{v}`")))).transpose()
}

fn parse_bool(map: &BTreeMap<String, String>, key: &str) -> Result<Option<bool>> {
    map.get(key)
        .map(|v| match v.as_str() {
            "true" | "yes" | "1" => Ok(true),
            "false" | "no" | "0" => Ok(false),
            _ => Err(config_err(key, format!("expected true or false, got `{v}`"))),
        })
        .transpose()
}

/// Build a validated [`SessionConfig`] from parsed keys. Missing keys take
/// their defaults; unknown keys are rejected.
pub fn session_config_from(map: &BTreeMap<String, String>) -> Result<SessionConfig> {
    if let Some(k) = map.keys().find(|k| !SESSION_KEYS.contains(&k.as_str())) {
        return Err(config_err(k, "unknown key"));
    }
    let mut cfg = SessionConfig::default();
    if let Some(v) = field(map, "seed")? {
        cfg.master_seed = v;
    }
    if let Some(v) = field(map, "copies")? {
        cfg.n_copies = v;
    }
    if let Some(v) = field(map, "check_fraction")? {
        cfg.check_fraction = v;
    }
    if let Some(v) = field(map, "verdict_k")? {
        cfg.verdict_k = v;
    }
    if let Some(v) = map.get("schedule") {
        cfg.schedule = match v.as_str() {
            "uniform" => Schedule::Uniform,
            "round-robin" | "round_robin" => Schedule::RoundRobin,
            _ => return Err(config_err("schedule", format!("expected uniform or round-robin, got `{v}`"))),
        };
    }
    if let Some(v) = map.get("transcript") {
        cfg.detail = match v.as_str() {
            "full" => TranscriptDetail::Full,
            "summary" => TranscriptDetail::Summary,
            _ => return Err(config_err("transcript", format!("expected full or summary, got `{v}`"))),
        };
    }

    let kind = match map.get("attack").map(String::as_str) {
        None | Some("none") => None,
        Some(s) => Some(AttackKind::from_str(s).map_err(|_| config_err("attack", format!("unknown attack `{s}`")))?),
    };
    cfg.attack = kind.map(|kind| AttackSpec { kind, p: CLONE_BOUND, copy_probability: 1.0, allow_above_bound: false });
    if let Some(a) = cfg.attack.as_mut() {
        if let Some(p) = field(map, "p")? {
            a.p = p;
        }
        if let Some(q) = field(map, "attack_probability")? {
            a.copy_probability = q;
        }
        if let Some(b) = parse_bool(map, "allow_strong_clone")? {
            a.allow_above_bound = b;
        }
        a.validate().map_err(|e| config_err(attack_field(a), e.to_string()))?;
    } else {
        // Still reject malformed values for keys that only matter with an attack.
        field::<f64>(map, "p")?;
        field::<f64>(map, "attack_probability")?;
        parse_bool(map, "allow_strong_clone")?;
    }

    cfg.validate().map_err(|e| config_err(session_field(&cfg), e.to_string()))?;
    Ok(cfg)
}

fn attack_field(a: &AttackSpec) -> &'static str {
    if !(0.0..=1.0).contains(&a.copy_probability) {
        "attack_probability"
    } else {
        "p"
    }
}

fn session_field(cfg: &SessionConfig) -> &'static str {
    if cfg.n_copies < 2 || cfg.n_copies > u32::MAX as usize {
        "copies"
    } else if !(cfg.verdict_k.is_finite() && cfg.verdict_k >= 0.0) {
        "verdict_k"
    } else {
        "check_fraction"
    }
}

/// Render `cfg` in the format [`parse_key_values`] reads.
pub fn to_key_values(cfg: &SessionConfig) -> String {
    let mut out = String::new();
    let mut put = |k: &str, v: String| {
        out.push_str(k);
        out.push_str(" = ");
        out.push_str(&v);
        out.push('\n');
    };
    put("seed", cfg.master_seed.to_string());
    put("copies", cfg.n_copies.to_string());
    put("check_fraction", cfg.check_fraction.to_string());
    put("verdict_k", cfg.verdict_k.to_string());
    put(
        "schedule",
        match cfg.schedule {
            Schedule::Uniform => "uniform",
            Schedule::RoundRobin => "round-robin",
        }
        .into(),
    );
    put(
        "transcript",
        match cfg.detail {
            TranscriptDetail::Full => "full",
            TranscriptDetail::Summary => "summary",
        }
        .into(),
    );
    match &cfg.attack {
        None => put("attack", "none".into()),
        Some(a) => {
            put("attack", a.kind.as_str().into());
            if a.kind == AttackKind::CloneDepolarize {
                put("p", a.p.to_string());
            }
            put("attack_probability", a.copy_probability.to_string());
            put("allow_strong_clone", a.allow_above_bound.to_string());
        }
    }
    out
}
