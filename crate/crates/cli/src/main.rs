//! `multiway` — experiment runner for k-regular state dynamics.
//!
//! Subcommands write CSV to stdout (or `--out`); verdict and status lines
//! go to stderr. Exit codes: 0 success, 2 usage or configuration error,
//! 3 protocol error on a frame stream, 4 runtime failure mid-experiment.
//! Every subcommand accepts `--config <toml>`; explicit flags override
//! file keys, which override built-in defaults.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "multiway",
    version,
    about = "Observer paths, description complexity, and the client-server stream filter"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Sample random observer paths and emit per-seed complexity profiles.
    Simulate(SimulateArgs),
    /// Exhaustive complexity table over all bitstrings up to a length.
    Complexity(ComplexityArgs),
    /// Smallest incompressible number per digit length, as CSV.
    Chaitin(ChaitinArgs),
    /// Stream BFS states as frames, to stdout or one TCP connection.
    Serve(ServeArgs),
    /// Filter a frame stream (stdin or TCP) down to progression indices.
    Client(ClientArgs),
    /// Classify per-seed growth (linear / logarithmic / bounded).
    Analyze(AnalyzeArgs),
}

#[derive(Args)]
pub struct SimulateArgs {
    /// TOML config file (flags override its keys).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Rule definition file.
    #[arg(long)]
    pub rule: Option<PathBuf>,
    /// Root label, decimal (default 1).
    #[arg(long)]
    pub root: Option<String>,
    /// Path length in steps (default 64; profiles have depth+1 rows).
    #[arg(long)]
    pub depth: Option<usize>,
    /// Comma-separated RNG seeds, one path each (default 0..=9).
    #[arg(long, value_delimiter = ',')]
    pub seeds: Option<Vec<u64>>,
    /// Description machine id (default rm1).
    #[arg(long)]
    pub machine: Option<String>,
    /// Output-bit budget per decode (default 2^20).
    #[arg(long)]
    pub budget: Option<u64>,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct ComplexityArgs {
    /// TOML config file (flags override its keys).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Description machine id (default rm1).
    #[arg(long)]
    pub machine: Option<String>,
    /// Output-bit budget per decode (default 2^20).
    #[arg(long)]
    pub budget: Option<u64>,
    /// Table covers every string of at most this many bits (default 8).
    #[arg(long)]
    pub max_len: Option<u32>,
    /// enumeration (run programs shortest-first) or inversion (per-string
    /// witness search); the two agree and the column records which ran.
    #[arg(long)]
    pub method: Option<String>,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct ChaitinArgs {
    /// TOML config file (flags override its keys).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Description machine id (default rm1).
    #[arg(long)]
    pub machine: Option<String>,
    /// Output-bit budget per decode (default 2^20).
    #[arg(long)]
    pub budget: Option<u64>,
    /// Base exponent r (digits are base 2^r). Alternative: --rule.
    #[arg(long)]
    pub arity_exponent: Option<u32>,
    /// Rule file to borrow r from when --arity-exponent is absent.
    #[arg(long)]
    pub rule: Option<PathBuf>,
    /// Longest digit length to scan (default 8).
    #[arg(long)]
    pub max_digits: Option<u32>,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct ServeArgs {
    /// TOML config file (flags override its keys).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Rule definition file.
    #[arg(long)]
    pub rule: Option<PathBuf>,
    /// Root label, decimal (default 1).
    #[arg(long)]
    pub root: Option<String>,
    /// How many states to stream (default 128).
    #[arg(long)]
    pub count: Option<u64>,
    /// Listen on 127.0.0.1:PORT for one connection (0 = ephemeral; the
    /// bound address is printed to stderr). Without it, frames go to
    /// stdout for piping.
    #[arg(long)]
    pub port: Option<u16>,
}

#[derive(Args)]
pub struct ClientArgs {
    /// TOML config file (flags override its keys).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Description machine id (default rm1).
    #[arg(long)]
    pub machine: Option<String>,
    /// Output-bit budget per decode (default 2^20).
    #[arg(long)]
    pub budget: Option<u64>,
    /// Connect to 127.0.0.1:PORT; without it, frames are read from stdin.
    #[arg(long)]
    pub port: Option<u16>,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct AnalyzeArgs {
    /// TOML config file (flags override its keys).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Rule definition file.
    #[arg(long)]
    pub rule: Option<PathBuf>,
    /// Root label, decimal (default 1).
    #[arg(long)]
    pub root: Option<String>,
    /// Path length in steps per seed (default 64).
    #[arg(long)]
    pub depth: Option<usize>,
    /// Comma-separated RNG seeds, one path each (default 0..=9).
    #[arg(long, value_delimiter = ',')]
    pub seeds: Option<Vec<u64>>,
    /// Description machine id (default rm1).
    #[arg(long)]
    pub machine: Option<String>,
    /// Output-bit budget per decode (default 2^20).
    #[arg(long)]
    pub budget: Option<u64>,
    /// Exception tolerance in bits for the density column (default 2).
    #[arg(long)]
    pub tolerance: Option<f64>,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Simulate(args) => commands::cmd_simulate(args),
        Cmd::Complexity(args) => commands::cmd_complexity(args),
        Cmd::Chaitin(args) => commands::cmd_chaitin(args),
        Cmd::Serve(args) => commands::cmd_serve(args),
        Cmd::Client(args) => commands::cmd_client(args),
        Cmd::Analyze(args) => commands::cmd_analyze(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
