//! Flag/file/default resolution and the exit-code contract.
//!
//! Every subcommand takes `--config <toml>`; explicit flags beat file keys,
//! file keys beat built-in defaults. The file is flat TOML whose keys match
//! the long flag names (`seeds` is an integer array).

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use multiway_core::frame::ProtocolError;
use multiway_core::machine::{DescriptionMachine, Rm1};
use multiway_core::rule::RuleSystem;
use serde::Deserialize;

/// Failures sorted by who must fix them: the invocation (2), the peer (3),
/// or the run itself (4).
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, bad config file, bad rule file, violated preconditions.
    Usage(String),
    /// The frame stream broke the protocol.
    Protocol(ProtocolError),
    /// A well-configured run failed mid-flight: rule left its domain,
    /// output unwritable, socket dropped.
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) => ExitCode::from(2),
            CliError::Protocol(_) => ExitCode::from(3),
            CliError::Runtime(_) => ExitCode::from(4),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Protocol(e) => write!(f, "protocol error: {e}"),
            CliError::Runtime(msg) => write!(f, "{msg}"),
        }
    }
}

impl From<ProtocolError> for CliError {
    fn from(e: ProtocolError) -> Self {
        CliError::Protocol(e)
    }
}

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

pub fn runtime(msg: impl Into<String>) -> CliError {
    CliError::Runtime(msg.into())
}

/// The config-file half of the flag set. Unknown keys are rejected so a
/// typo cannot silently fall back to a default.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub rule: Option<PathBuf>,
    pub root: Option<String>,
    pub depth: Option<usize>,
    pub count: Option<u64>,
    pub seeds: Option<Vec<u64>>,
    pub machine: Option<String>,
    pub budget: Option<u64>,
    pub out: Option<PathBuf>,
    pub port: Option<u16>,
    pub tolerance: Option<f64>,
    pub arity_exponent: Option<u32>,
    pub max_len: Option<u32>,
    pub max_digits: Option<u32>,
    pub method: Option<String>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<FileConfig, CliError> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| usage(format!("bad config {}: {e}", path.display())))
    }
}

/// Flag beats file; caller supplies the default (or demands the value).
pub fn pick<T>(flag: Option<T>, file: Option<T>) -> Option<T> {
    flag.or(file)
}

pub fn require<T>(value: Option<T>, flag: &str) -> Result<T, CliError> {
    value.ok_or_else(|| usage(format!("missing --{flag} (no config key either)")))
}

pub const DEFAULT_BUDGET: u64 = 1 << 20;
pub const DEFAULT_MACHINE: &str = "rm1";

/// Description machines selectable by id.
pub fn machine_by_id(id: &str) -> Result<&'static dyn DescriptionMachine, CliError> {
    match id {
        "rm1" => Ok(&Rm1),
        other => Err(usage(format!("unknown machine id {other:?} (known: rm1)"))),
    }
}

/// Parses and compiles a rule file.
pub fn load_rule(path: &Path) -> Result<RuleSystem, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read rule file {}: {e}", path.display())))?;
    let spec = multiway_core::dsl::parse_rule(&text)
        .map_err(|e| usage(format!("{}: {e}", path.display())))?;
    multiway_core::dsl::compile(&spec)
        .map_err(|e| usage(format!("{}: invalid rule: {e}", path.display())))
}

/// Decimal root label of any size.
pub fn parse_root(s: &str) -> Result<multiway_core::label::Label, CliError> {
    let value = s
        .parse::<num_bigint::BigUint>()
        .map_err(|_| usage(format!("root must be a decimal natural, got {s:?}")))?;
    Ok(multiway_core::label::Label::new(value))
}

/// CSV (or frame bytes) go to the file when `--out` is set, else stdout.
pub fn write_output(out: Option<&Path>, contents: &[u8]) -> Result<(), CliError> {
    use std::io::Write;
    match out {
        Some(path) => std::fs::write(path, contents)
            .map_err(|e| runtime(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .lock()
            .write_all(contents)
            .map_err(|e| runtime(format!("cannot write stdout: {e}"))),
    }
}
