//! One function per subcommand. Data goes to `--out` or stdout; verdicts,
//! statuses, and listen addresses go to stderr, so piped CSV stays clean.

use std::io::{BufReader, BufWriter, Write};
use std::net::{TcpListener, TcpStream};
use std::path::PathBuf;

use multiway_core::analysis::{classify_growth, GrowthFit};
use multiway_core::bits::BitString;
use multiway_core::chaitin::chaitin_progression;
use multiway_core::client::{client_filter, StreamStatus};
use multiway_core::complexity::{complexity_profile, ComplexityTable, ProfileRow};
use multiway_core::label::Label;
use multiway_core::machine::DescriptionMachine;
use multiway_core::multiway::{evolve_path, random_choices};
use multiway_core::rule::RuleSystem;
use multiway_core::server::{serve, ServeError};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{
    machine_by_id, parse_root, pick, require, runtime, usage, write_output, CliError, FileConfig,
    DEFAULT_BUDGET, DEFAULT_MACHINE,
};
use crate::{AnalyzeArgs, ChaitinArgs, ClientArgs, ComplexityArgs, ServeArgs, SimulateArgs};

fn default_seeds() -> Vec<u64> {
    (0..10).collect()
}

fn seeded_profile(
    rule: &RuleSystem,
    root: &Label,
    depth: usize,
    seed: u64,
    machine: &dyn DescriptionMachine,
    budget: u64,
) -> Result<Vec<ProfileRow>, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let choices = random_choices(&mut rng, rule.arity(), depth);
    let experience = evolve_path(rule, root.clone(), &choices)
        .map_err(|e| runtime(format!("seed {seed}: {e}")))?;
    Ok(complexity_profile(machine, &experience, budget))
}

pub fn cmd_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let file = FileConfig::load(args.config.as_deref())?;
    let rule = load_required_rule(args.rule, file.rule)?;
    let root = parse_root(&pick(args.root, file.root).unwrap_or_else(|| "1".into()))?;
    let depth = pick(args.depth, file.depth).unwrap_or(64);
    let seeds = pick(args.seeds, file.seeds).unwrap_or_else(default_seeds);
    let machine =
        machine_by_id(&pick(args.machine, file.machine).unwrap_or_else(|| DEFAULT_MACHINE.into()))?;
    let budget = pick(args.budget, file.budget).unwrap_or(DEFAULT_BUDGET);
    let out = pick(args.out, file.out);

    let mut per_seed: Vec<(u64, Vec<ProfileRow>)> = seeds
        .par_iter()
        .map(|&seed| {
            seeded_profile(&rule, &root, depth, seed, machine, budget).map(|rows| (seed, rows))
        })
        .collect::<Result<_, _>>()?;
    per_seed.sort_by_key(|(seed, _)| *seed);

    let mut csv = String::from("seed,n,label_bits,c_bits,exact\n");
    for (seed, rows) in &per_seed {
        for row in rows {
            match row.value {
                Some(v) => csv.push_str(&format!(
                    "{seed},{},{},{},{}\n",
                    row.n, row.label_bits, v.bits, v.exact
                )),
                None => csv.push_str(&format!("{seed},{},{},,\n", row.n, row.label_bits)),
            }
        }
    }
    write_output(out.as_deref(), csv.as_bytes())
}

pub fn cmd_complexity(args: ComplexityArgs) -> Result<(), CliError> {
    let file = FileConfig::load(args.config.as_deref())?;
    let machine =
        machine_by_id(&pick(args.machine, file.machine).unwrap_or_else(|| DEFAULT_MACHINE.into()))?;
    let budget = pick(args.budget, file.budget).unwrap_or(DEFAULT_BUDGET);
    let max_len = pick(args.max_len, file.max_len).unwrap_or(8);
    let method = pick(args.method, file.method).unwrap_or_else(|| "enumeration".into());
    let out = pick(args.out, file.out);

    if !(1..=20).contains(&max_len) {
        return Err(usage(format!(
            "--max-len {max_len} out of range (1..=20: the table is exhaustive over 2^(L+1) strings)"
        )));
    }

    let table = match method.as_str() {
        "enumeration" => {
            // A string of length L has a literal witness of L + 1 bits, and
            // by_enumeration's bound is exclusive, so max_len + 2 guarantees
            // every string up to max_len appears in the table.
            ComplexityTable::by_enumeration(machine, budget, max_len + 2).restricted(max_len)
        }
        "inversion" => {
            let strings = (0..=max_len).flat_map(BitString::all_of_len);
            ComplexityTable::by_inversion(machine, strings, budget)
        }
        other => {
            return Err(usage(format!(
                "unknown --method {other:?} (enumeration or inversion)"
            )))
        }
    };
    write_output(out.as_deref(), table.to_csv().as_bytes())
}

pub fn cmd_chaitin(args: ChaitinArgs) -> Result<(), CliError> {
    let file = FileConfig::load(args.config.as_deref())?;
    let machine =
        machine_by_id(&pick(args.machine, file.machine).unwrap_or_else(|| DEFAULT_MACHINE.into()))?;
    let budget = pick(args.budget, file.budget).unwrap_or(DEFAULT_BUDGET);
    let max_digits = pick(args.max_digits, file.max_digits).unwrap_or(8);
    let out = pick(args.out, file.out);

    // r comes from an explicit flag/key, or failing that from a rule file.
    let r = match pick(args.arity_exponent, file.arity_exponent) {
        Some(r) => r,
        None => match pick(args.rule, file.rule) {
            Some(path) => crate::config::load_rule(&path)?.arity_exponent(),
            None => return Err(usage("need --arity-exponent or --rule to fix r")),
        },
    };
    if r == 0 {
        return Err(usage("the progression needs r >= 1 (base 2^r >= 2)"));
    }
    if max_digits == 0 {
        return Err(usage("--max-digits must be at least 1"));
    }
    if r as u64 * max_digits as u64 > 40 {
        return Err(usage(format!(
            "r*max_digits = {} too large; the scan is exponential in it (limit 40)",
            r as u64 * max_digits as u64
        )));
    }

    let progression = chaitin_progression(machine, r, max_digits, budget);
    write_output(out.as_deref(), progression.to_csv().as_bytes())
}

pub fn cmd_serve(args: ServeArgs) -> Result<(), CliError> {
    let file = FileConfig::load(args.config.as_deref())?;
    let rule = load_required_rule(args.rule, file.rule)?;
    let root = parse_root(&pick(args.root, file.root).unwrap_or_else(|| "1".into()))?;
    let count = pick(args.count, file.count).unwrap_or(128);
    let port = pick(args.port, file.port);

    let outcome = match port {
        Some(port) => {
            let listener = TcpListener::bind(("127.0.0.1", port))
                .map_err(|e| runtime(format!("cannot bind 127.0.0.1:{port}: {e}")))?;
            let addr = listener
                .local_addr()
                .map_err(|e| runtime(format!("cannot read bound address: {e}")))?;
            eprintln!("listening on {addr}");
            let (stream, _) = listener
                .accept()
                .map_err(|e| runtime(format!("accept failed: {e}")))?;
            serve(&rule, root, count, &mut BufWriter::new(stream))
        }
        None => {
            let stdout = std::io::stdout();
            let mut sink = BufWriter::new(stdout.lock());
            let result = serve(&rule, root, count, &mut sink);
            sink.flush()
                .map_err(|e| runtime(format!("cannot flush stdout: {e}")))?;
            result
        }
    };
    outcome.map_err(|e| match e {
        // On rule failure the ERROR frame already went out before this.
        ServeError::Rule(rule_err) => runtime(format!("enumeration failed: {rule_err}")),
        ServeError::Io(io_err) => runtime(format!("stream write failed: {io_err}")),
    })
}

pub fn cmd_client(args: ClientArgs) -> Result<(), CliError> {
    let file = FileConfig::load(args.config.as_deref())?;
    let machine =
        machine_by_id(&pick(args.machine, file.machine).unwrap_or_else(|| DEFAULT_MACHINE.into()))?;
    let budget = pick(args.budget, file.budget).unwrap_or(DEFAULT_BUDGET);
    let port = pick(args.port, file.port);
    let out = pick(args.out, file.out);

    let history = match port {
        Some(port) => {
            let stream = TcpStream::connect(("127.0.0.1", port))
                .map_err(|e| runtime(format!("cannot connect to 127.0.0.1:{port}: {e}")))?;
            client_filter(&mut BufReader::new(stream), machine, budget)?
        }
        None => {
            let stdin = std::io::stdin();
            client_filter(&mut stdin.lock(), machine, budget)?
        }
    };

    let status = match history.status {
        StreamStatus::Complete => "complete",
        StreamStatus::Truncated => "truncated",
    };
    eprintln!(
        "status: {status}; accepted {} of {} states (rule {}, r={})",
        history.accepted.len(),
        history.states_seen,
        history.rule_name,
        history.arity_exponent
    );
    write_output(out.as_deref(), history.to_csv().as_bytes())
}

pub fn cmd_analyze(args: AnalyzeArgs) -> Result<(), CliError> {
    let file = FileConfig::load(args.config.as_deref())?;
    let rule = load_required_rule(args.rule, file.rule)?;
    let root = parse_root(&pick(args.root, file.root).unwrap_or_else(|| "1".into()))?;
    let depth = pick(args.depth, file.depth).unwrap_or(64);
    let seeds = pick(args.seeds, file.seeds).unwrap_or_else(default_seeds);
    let machine =
        machine_by_id(&pick(args.machine, file.machine).unwrap_or_else(|| DEFAULT_MACHINE.into()))?;
    let budget = pick(args.budget, file.budget).unwrap_or(DEFAULT_BUDGET);
    let tolerance = pick(args.tolerance, file.tolerance).unwrap_or(2.0);
    let out = pick(args.out, file.out);

    let mut fits: Vec<(u64, GrowthFit)> = seeds
        .par_iter()
        .map(|&seed| {
            let profile = seeded_profile(&rule, &root, depth, seed, machine, budget)?;
            let series: Vec<(u64, f64)> = profile
                .iter()
                .filter_map(|row| row.value.map(|v| (row.n, v.bits as f64)))
                .collect();
            let fit = classify_growth(&series, tolerance)
                .map_err(|e| usage(format!("seed {seed}: {e} (raise --depth)")))?;
            Ok((seed, fit))
        })
        .collect::<Result<_, CliError>>()?;
    fits.sort_by_key(|(seed, _)| *seed);

    let mut csv = String::from("seed,");
    csv.push_str(GrowthFit::csv_header());
    csv.push('\n');
    for (seed, fit) in &fits {
        csv.push_str(&format!("{seed},{}\n", fit.to_csv_row()));
    }

    let mut counts: Vec<(&str, usize)> = Vec::new();
    for (_, fit) in &fits {
        let name = fit.model.as_str();
        match counts.iter_mut().find(|(n, _)| *n == name) {
            Some((_, c)) => *c += 1,
            None => counts.push((name, 1)),
        }
    }
    counts.sort_by_key(|&(name, count)| (std::cmp::Reverse(count), name));
    let (winner, votes) = counts[0];
    eprintln!("verdict: {winner} ({votes}/{} seeds)", fits.len());

    write_output(out.as_deref(), csv.as_bytes())
}

fn load_required_rule(
    flag: Option<PathBuf>,
    file: Option<PathBuf>,
) -> Result<RuleSystem, CliError> {
    let path = require(pick(flag, file), "rule")?;
    crate::config::load_rule(&path)
}
