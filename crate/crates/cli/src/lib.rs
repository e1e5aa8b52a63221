//! Command implementations for the `qss` binary.
//!
//! Each command writes its report to the supplied writer and returns the
//! process exit code: 0 on success (and a secure channel for `run`), 2 when
//! `run` ends with an insecure verdict, 1 on any error.

use std::collections::BTreeMap;
use std::f64::consts::SQRT_2;
use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qss_core::adversary::eve_key_knowledge;
use qss_core::belltest::{chsh4_exact, default_settings, violation_threshold_check, Verdict, SMOLIN_VALUE};
use qss_core::config::{parse_key_values, session_config_from, to_key_values};
use qss_core::qstate::{depolarize, smolin_state};
use qss_core::{run_session, SessionConfig, SessionOutcome};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INSECURE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "qss", version, about = "Three-party secret sharing over Smolin states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one full session.
    Run(RunArgs),
    /// Tabulate the exact four-qubit Bell value against the noise parameter.
    Bellscan(ScanArgs),
    /// Run the exact-algebra property suite.
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Table,
    Records,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AttackArg {
    None,
    Clone,
    BellResend,
}

impl AttackArg {
    fn as_str(self) -> &'static str {
        match self {
            AttackArg::None => "none",
            AttackArg::Clone => "clone",
            AttackArg::BellResend => "bell-resend",
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// Flat `key = value` config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub copies: Option<usize>,
    #[arg(long)]
    pub check_fraction: Option<f64>,
    #[arg(long, value_enum)]
    pub attack: Option<AttackArg>,
    /// Surviving fraction for the clone attack.
    #[arg(long = "p")]
    pub p: Option<f64>,
    /// Chance that Eve attacks a given copy.
    #[arg(long)]
    pub attack_probability: Option<f64>,
    /// Allow clone parameters above 2/3.
    #[arg(long)]
    pub allow_strong_clone: bool,
    #[arg(long)]
    pub verdict_k: Option<f64>,
    /// uniform | round-robin
    #[arg(long)]
    pub schedule: Option<String>,
    /// full | summary
    #[arg(long)]
    pub transcript: Option<String>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Directory for transcript.log, alice.key, bc.key and report.txt.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Omit timing so reports are byte-for-byte reproducible.
    #[arg(long)]
    pub no_timing: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    #[arg(long, default_value_t = 0.0)]
    pub p_min: f64,
    #[arg(long, default_value_t = 1.0)]
    pub p_max: f64,
    #[arg(long, default_value_t = 11)]
    pub steps: usize,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
}

/// Keys the runner consumes itself rather than passing to the session.
const RUNNER_KEYS: &[&str] = &["format", "out", "no_timing"];

pub fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match &cli.command {
        Command::Run(args) => cmd_run(args, out),
        Command::Bellscan(args) => cmd_bellscan(args, out),
        Command::Verify => cmd_verify(out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}

#[derive(Debug)]
pub struct CliError(String);

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for CliError {}

impl From<qss_core::Error> for CliError {
    fn from(e: qss_core::Error) -> Self {
        CliError(e.to_string())
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError(format!("i/o: {e}"))
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

/// Runner options resolved from config file and flags.
#[derive(Debug, Clone)]
struct RunnerOptions {
    format: Format,
    out: Option<PathBuf>,
    timing: bool,
}

fn resolve_run(args: &RunArgs) -> CliResult<(SessionConfig, RunnerOptions)> {
    let mut map = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError(format!("cannot read config {}: {e}", path.display())))?;
            parse_key_values(&text)?
        }
        None => BTreeMap::new(),
    };
    let mut set = |k: &str, v: Option<String>| {
        if let Some(v) = v {
            map.insert(k.to_string(), v);
        }
    };
    set("seed", args.seed.map(|v| v.to_string()));
    set("copies", args.copies.map(|v| v.to_string()));
    set("check_fraction", args.check_fraction.map(|v| v.to_string()));
    set("attack", args.attack.map(|a| a.as_str().to_string()));
    set("p", args.p.map(|v| v.to_string()));
    set("attack_probability", args.attack_probability.map(|v| v.to_string()));
    set("allow_strong_clone", args.allow_strong_clone.then(|| "true".to_string()));
    set("verdict_k", args.verdict_k.map(|v| v.to_string()));
    set("schedule", args.schedule.clone());
    set("transcript", args.transcript.clone());

    let runner: BTreeMap<String, String> =
        RUNNER_KEYS.iter().filter_map(|k| map.remove(*k).map(|v| (k.to_string(), v))).collect();
    let format = match (args.format, runner.get("format").map(String::as_str)) {
        (Some(f), _) => f,
        (None, None | Some("table")) => Format::Table,
        (None, Some("records")) => Format::Records,
        (None, Some(other)) => {
            return Err(CliError(format!("config field `format`: expected table or records, got `{other}`")))
        }
    };
    let out = args.out.clone().or_else(|| runner.get("out").map(PathBuf::from));
    let no_timing = args.no_timing
        || match runner.get("no_timing").map(String::as_str) {
            None | Some("false") => false,
            Some("true") => true,
            Some(other) => {
                return Err(CliError(format!("config field `no_timing`: expected true or false, got `{other}`")))
            }
        };
    let cfg = session_config_from(&map)?;
    Ok((cfg, RunnerOptions { format, out, timing: !no_timing }))
}

/// Summary of one `run` invocation.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub config: SessionConfig,
    pub value: f64,
    pub std_error: f64,
    pub check_count: usize,
    pub verdict: Verdict,
    pub alice_bits: usize,
    pub bc_bits: usize,
    pub keys_match: bool,
    pub eve_knowledge: f64,
    pub transcript_hash: String,
    pub elapsed_ms: Option<f64>,
}

impl RunReport {
    fn from_outcome(cfg: &SessionConfig, o: &SessionOutcome, elapsed_ms: Option<f64>) -> Self {
        RunReport {
            config: cfg.clone(),
            value: o.report.estimate.value,
            std_error: o.report.estimate.std_error,
            check_count: o.report.check_count,
            verdict: o.report.verdict,
            alice_bits: o.alice_key.bit_len(),
            bc_bits: o.bc_key.bit_len(),
            keys_match: o.keys_match(),
            eve_knowledge: eve_key_knowledge(o.session.eve_log(), &o.alice_key),
            transcript_hash: o.transcript().hash(),
            elapsed_ms,
        }
    }

    fn fields(&self) -> Vec<(&'static str, String)> {
        let attack = self.config.attack.map_or("none".to_string(), |a| a.kind.to_string());
        let mut f = vec![
            ("seed", self.config.master_seed.to_string()),
            ("copies", self.config.n_copies.to_string()),
            ("check_fraction", self.config.check_fraction.to_string()),
            ("check_copies", self.check_count.to_string()),
            ("attack", attack),
        ];
        if let Some(a) = self.config.attack {
            f.push(("attack_p", a.p.to_string()));
            f.push(("attack_probability", a.copy_probability.to_string()));
        }
        f.extend([
            ("verdict_k", self.config.verdict_k.to_string()),
            ("bell_value", format!("{:.6}", self.value)),
            ("bell_std_error", format!("{:.6}", self.std_error)),
            ("verdict", self.verdict.to_string()),
            ("alice_key_bits", self.alice_bits.to_string()),
            ("bc_key_bits", self.bc_bits.to_string()),
            ("keys_match", self.keys_match.to_string()),
            ("eve_knowledge", format!("{:.6}", self.eve_knowledge)),
            ("transcript_sha256", self.transcript_hash.clone()),
        ]);
        if let Some(ms) = self.elapsed_ms {
            f.push(("elapsed_ms", format!("{ms:.3}")));
        }
        f
    }

    pub fn render(&self, format: Format) -> String {
        let mut s = String::new();
        match format {
            Format::Table => {
                for (k, v) in self.fields() {
                    let _ = writeln!(s, "{k:<20}{v}");
                }
            }
            Format::Records => {
                for (i, (k, v)) in self.fields().into_iter().enumerate() {
                    let _ = writeln!(s, "{i}\treport\trunner\t{k}\t{v}");
                }
            }
        }
        s
    }
}

/// Exit code for a finished session.
pub fn exit_code(report: &RunReport) -> i32 {
    match report.verdict {
        Verdict::Secure if report.keys_match => EXIT_OK,
        Verdict::Secure => EXIT_ERROR,
        Verdict::Insecure | Verdict::Inconclusive => EXIT_INSECURE,
    }
}

fn write_outputs(dir: &Path, o: &SessionOutcome, report_text: &str) -> CliResult<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("transcript.log"), o.transcript().to_records())?;
    fs::write(dir.join("alice.key"), format!("{}\n", o.alice_key.to_hex()))?;
    fs::write(dir.join("bc.key"), format!("{}\n", o.bc_key.to_hex()))?;
    fs::write(dir.join("report.txt"), report_text)?;
    Ok(())
}

/// Run a session and return `(report, outcome)` without printing.
pub fn run_with(args: &RunArgs) -> CliResult<(RunReport, SessionOutcome, String)> {
    let (cfg, opts) = resolve_run(args)?;
    let start = Instant::now();
    let outcome = run_session(cfg.clone())?;
    let elapsed = opts.timing.then(|| start.elapsed().as_secs_f64() * 1e3);
    let report = RunReport::from_outcome(&cfg, &outcome, elapsed);
    let text = report.render(opts.format);
    if let Some(dir) = &opts.out {
        let mut file_text = format!("# config\n{}", to_key_values(&cfg));
        file_text.push_str("# report\n");
        file_text.push_str(&report.render(Format::Table));
        write_outputs(dir, &outcome, &file_text)?;
    }
    Ok((report, outcome, text))
}

pub fn cmd_run(args: &RunArgs, out: &mut dyn Write) -> CliResult<i32> {
    let (report, _, text) = run_with(args)?;
    out.write_all(text.as_bytes())?;
    let code = exit_code(&report);
    if report.verdict == Verdict::Secure && !report.keys_match {
        return Err(CliError("secure verdict but reconstructed key differs from Alice's".into()));
    }
    Ok(code)
}

/// One row of the noise scan.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub p: f64,
    pub value: f64,
    pub verdict: Verdict,
}

pub fn bellscan_rows(p_min: f64, p_max: f64, steps: usize) -> CliResult<Vec<ScanRow>> {
    if !(0.0..=1.0).contains(&p_min) || !(0.0..=1.0).contains(&p_max) || p_min > p_max {
        return Err(CliError(format!("need 0 <= p_min <= p_max <= 1, got p_min={p_min} p_max={p_max}")));
    }
    if steps < 2 {
        return Err(CliError(format!("need at least 2 steps, got {steps}")));
    }
    let smolin = smolin_state();
    let table = default_settings();
    (0..steps)
        .map(|i| {
            let p = if i + 1 == steps { p_max } else { p_min + (p_max - p_min) * i as f64 / (steps - 1) as f64 };
            let r = chsh4_exact(&depolarize(&smolin, p)?, &table)?;
            Ok(ScanRow { p, value: r.value, verdict: violation_threshold_check(&r, 0.0) })
        })
        .collect()
}

pub fn cmd_bellscan(args: &ScanArgs, out: &mut dyn Write) -> CliResult<i32> {
    let rows = bellscan_rows(args.p_min, args.p_max, args.steps)?;
    let mut s = String::new();
    match args.format {
        Format::Table => {
            let _ = writeln!(s, "{:>12}  {:>12}  {:>12}  verdict", "p", "value", "value/2sqrt2");
            for r in &rows {
                let _ =
                    writeln!(s, "{:>12.6}  {:>12.6}  {:>12.6}  {}", r.p, r.value, r.value / SMOLIN_VALUE, r.verdict);
            }
        }
        Format::Records => {
            for (i, r) in rows.iter().enumerate() {
                let _ = writeln!(
                    s,
                    "{i}\tbellscan\trunner\trow\tp={} value={} ratio={} verdict={}",
                    r.p,
                    r.value,
                    r.value / (2.0 * SQRT_2),
                    r.verdict
                );
            }
        }
    }
    out.write_all(s.as_bytes())?;
    Ok(EXIT_OK)
}

pub fn cmd_verify(out: &mut dyn Write) -> CliResult<i32> {
    let results = qss_core::verify::run_all();
    let mut all = true;
    for r in &results {
        all &= r.passed;
        writeln!(out, "{}  {:<34}{}", if r.passed { "PASS" } else { "FAIL" }, r.name, r.detail)?;
    }
    let passed = results.iter().filter(|r| r.passed).count();
    writeln!(out, "{passed}/{} properties passed", results.len())?;
    Ok(if all { EXIT_OK } else { EXIT_ERROR })
}
