//! The `rscram` command line.
//!
//! Passwords are read from stdin only. Structured output goes to stdout,
//! diagnostics to stderr. Exit codes: 0 success, 1 verification mismatch
//! or failed check, 2 usage or decode error, 3 internal or resource error.

use std::collections::HashSet;
use std::ffi::OsString;
use std::io::{IsTerminal, Read, Write};
use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::time::Instant;

use clap::{ArgGroup, Args, ColorChoice, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::analysis::{
    check_superconcentrator, graph_depth, layer_dispersion_report, pebble_metrics, sequential_lower_bound,
    simulate_pebbling, CheckMode, Strategy,
};
use crate::error::{Error, Result};
use crate::graph::{export_graph, graph_for_salt, validate_structure, ExportFormat};
use crate::hasher::{evaluate, hash_call_count, hash_password, verify_password, HashParams};
use crate::hashfn::{CountingHash, Sha256Hash};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

pub const DEFAULT_GARLIC: u32 = 14;
pub const DEFAULT_LAMBDA: u32 = 2;

#[derive(Parser, Debug)]
#[command(name = "rscram", version, about = "Salt-dependent memory-hard password hashing")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Hash a password read from stdin and print its PHC string
    Hash(HashArgs),
    /// Check a password read from stdin against a PHC string
    Verify {
        phc: String,
    },
    /// Export the graph for a salt
    Graph(GraphArgs),
    /// Run structural checks on a single block
    Analyze(AnalyzeArgs),
    /// Simulate pebbling of the graph
    Pebble(PebbleArgs),
    /// Time evaluation and count hash calls over a parameter grid
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("salt").args(["salt_hex", "random_salt"])))]
struct HashArgs {
    #[arg(long, default_value_t = DEFAULT_GARLIC)]
    garlic: u32,
    #[arg(long, default_value_t = DEFAULT_LAMBDA)]
    lambda: u32,
    #[arg(long, value_parser = parse_hex)]
    salt_hex: Option<Hex>,
    /// Draw a fresh 16-byte salt (the default)
    #[arg(long)]
    random_salt: bool,
}

#[derive(Args, Debug)]
struct GraphArgs {
    #[arg(long)]
    garlic: u32,
    #[arg(long, default_value_t = 1)]
    lambda: u32,
    #[arg(long, value_parser = parse_hex)]
    salt_hex: Hex,
    #[arg(long, value_enum)]
    export: ExportArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ExportArg {
    Dot,
    Json,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("mode").args(["exhaustive", "samples"])))]
struct AnalyzeArgs {
    #[arg(long)]
    superconcentrator: bool,
    #[arg(long)]
    exhaustive: bool,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    garlic: u32,
    #[arg(long, value_parser = parse_hex)]
    salt_hex: Hex,
    #[arg(long, requires = "h")]
    dispersion: bool,
    #[arg(long, requires = "dispersion")]
    h: Option<usize>,
    /// Subset pairs drawn by the dispersion check
    #[arg(long, default_value_t = 200)]
    trials: usize,
    /// Also report structure and depth
    #[arg(long)]
    structure: bool,
    /// Worker threads for flow checks
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args, Debug)]
struct PebbleArgs {
    #[arg(long)]
    garlic: u32,
    #[arg(long, default_value_t = 1)]
    lambda: u32,
    #[arg(long, value_parser = parse_hex)]
    salt_hex: Hex,
    #[arg(long, value_enum)]
    strategy: StrategyArg,
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum StrategyArg {
    Honest,
    Greedy,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Inclusive, e.g. 8..12
    #[arg(long, value_parser = parse_range)]
    garlic_range: RangeInclusive<u32>,
    #[arg(long, value_parser = parse_range)]
    lambda_range: RangeInclusive<u32>,
}

#[derive(Clone, Debug)]
struct Hex(Vec<u8>);

fn parse_hex(s: &str) -> std::result::Result<Hex, String> {
    hex::decode(s).map(Hex).map_err(|e| format!("invalid hex: {e}"))
}

fn parse_range(s: &str) -> std::result::Result<RangeInclusive<u32>, String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected a..b, got {s:?}"))?;
    let a: u32 = a.trim().parse().map_err(|e| format!("{a:?}: {e}"))?;
    let b: u32 = b.trim().parse().map_err(|e| format!("{b:?}: {e}"))?;
    if a > b {
        return Err(format!("empty range {a}..{b}"));
    }
    Ok(a..=b)
}

/// Everything a command needs besides its arguments.
struct Io<'a> {
    stdin: &'a mut dyn Read,
    stdout: &'a mut dyn Write,
}

fn color_enabled() -> bool {
    std::env::var_os("RSCRAM_NO_COLOR").is_none() && std::io::stderr().is_terminal()
}

/// Runs the CLI and returns the process exit code.
pub fn run<I, T>(argv: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let color = color_enabled();
    let cmd = <Cli as clap::CommandFactory>::command().color(if color {
        ColorChoice::Auto
    } else {
        ColorChoice::Never
    });
    let cli = match cmd.try_get_matches_from(argv).and_then(|m| {
        <Cli as clap::FromArgMatches>::from_arg_matches(&m)
    }) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{rendered}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{rendered}");
                    EXIT_USAGE
                }
            };
        }
    };
    let mut io = Io { stdin, stdout };
    match dispatch(cli.command, &mut io) {
        Ok(code) => code,
        Err(e) => {
            let (code, label) = match e {
                Error::Usage(_) | Error::Decode(_) => (EXIT_USAGE, "error"),
                Error::Resource(_) | Error::Internal(_) => (EXIT_INTERNAL, "fatal"),
            };
            if color {
                let _ = writeln!(stderr, "\x1b[31m{label}\x1b[0m: {e}");
            } else {
                let _ = writeln!(stderr, "{label}: {e}");
            }
            code
        }
    }
}

fn io_err(e: std::io::Error) -> Error {
    Error::Resource(format!("i/o: {e}"))
}

fn read_password(stdin: &mut dyn Read) -> Result<Vec<u8>> {
    let mut pw = Vec::new();
    stdin.read_to_end(&mut pw).map_err(io_err)?;
    if pw.last() == Some(&b'\n') {
        pw.pop();
        if pw.last() == Some(&b'\r') {
            pw.pop();
        }
    }
    Ok(pw)
}

fn emit(out: &mut dyn Write, value: &serde_json::Value) -> Result<()> {
    writeln!(out, "{value}").map_err(io_err)
}

fn dispatch(cmd: Command, io: &mut Io) -> Result<i32> {
    match cmd {
        Command::Hash(a) => {
            let params = match a.salt_hex {
                Some(Hex(salt)) => HashParams::new(a.garlic, a.lambda, salt)?,
                None => HashParams::with_random_salt(a.garlic, a.lambda)?,
            };
            let pw = read_password(io.stdin)?;
            let phc = hash_password(&params, &pw)?;
            writeln!(io.stdout, "{phc}").map_err(io_err)?;
            Ok(EXIT_OK)
        }
        Command::Verify { phc } => {
            let pw = read_password(io.stdin)?;
            let ok = verify_password(&phc, &pw)?;
            emit(io.stdout, &json!({ "match": ok }))?;
            Ok(if ok { EXIT_OK } else { EXIT_MISMATCH })
        }
        Command::Graph(a) => {
            let graph = graph_for_salt(&Sha256Hash, a.garlic, &a.salt_hex.0, a.lambda)?;
            let format = match a.export {
                ExportArg::Dot => ExportFormat::Dot,
                ExportArg::Json => ExportFormat::Json,
            };
            let bytes = export_graph(&graph, format);
            match a.out {
                Some(path) => std::fs::write(&path, bytes).map_err(io_err)?,
                None => io.stdout.write_all(&bytes).map_err(io_err)?,
            }
            Ok(EXIT_OK)
        }
        Command::Analyze(a) => analyze(a, io),
        Command::Pebble(a) => pebble(a, io),
        Command::Bench(a) => bench(a, io),
    }
}

fn analyze(a: AnalyzeArgs, io: &mut Io) -> Result<i32> {
    if !a.superconcentrator && !a.dispersion && !a.structure {
        return Err(Error::Usage(
            "nothing to do: pass --superconcentrator, --dispersion or --structure".into(),
        ));
    }
    if a.superconcentrator && !a.exhaustive && a.samples.is_none() {
        return Err(Error::Usage("--superconcentrator needs --exhaustive or --samples <n>".into()));
    }
    let graph = graph_for_salt(&Sha256Hash, a.garlic, &a.salt_hex.0, 1)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = a.jobs {
        if j == 0 {
            return Err(Error::Usage("--jobs must be positive".into()));
        }
        builder = builder.num_threads(j);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Resource(format!("thread pool: {e}")))?;
    let mut all_pass = true;
    if a.structure {
        let report = validate_structure(&graph);
        all_pass &= report.pass;
        let depth = graph_depth(&graph, &HashSet::new());
        emit(
            io.stdout,
            &json!({"check": "structure", "report": report, "depth": depth, "pass": report.pass}),
        )?;
    }
    if a.superconcentrator {
        let mode = match a.samples {
            Some(samples) => CheckMode::Sampled { samples, seed: a.seed },
            None => CheckMode::Exhaustive,
        };
        let report = pool.install(|| check_superconcentrator(&graph, mode))?;
        all_pass &= report.pass;
        emit(io.stdout, &serde_json::to_value(&report).expect("report serialises"))?;
    }
    if let (true, Some(h)) = (a.dispersion, a.h) {
        let report = pool.install(|| layer_dispersion_report(&graph, 0, h, a.trials, a.seed))?;
        all_pass &= report.pass;
        emit(io.stdout, &serde_json::to_value(&report).expect("report serialises"))?;
    }
    Ok(if all_pass { EXIT_OK } else { EXIT_MISMATCH })
}

fn pebble(a: PebbleArgs, io: &mut Io) -> Result<i32> {
    let graph = graph_for_salt(&Sha256Hash, a.garlic, &a.salt_hex.0, a.lambda)?;
    let strategy = match a.strategy {
        StrategyArg::Honest => Strategy::HonestRowwise,
        StrategyArg::Greedy => Strategy::GreedyBudget,
    };
    let params = json!({"g": a.garlic, "lambda": a.lambda, "strategy": strategy, "budget": a.budget});
    match simulate_pebbling(&graph, strategy, a.budget) {
        Ok(trace) => {
            if let Some(path) = &a.csv {
                let file = std::fs::File::create(path).map_err(io_err)?;
                trace.write_csv(std::io::BufWriter::new(file)).map_err(io_err)?;
            }
            if !trace.legal {
                return Err(Error::Internal("simulator produced an illegal trace".into()));
            }
            let m = pebble_metrics(&trace)?;
            let bound = sequential_lower_bound(graph.width(), a.lambda, m.space);
            emit(
                io.stdout,
                &json!({
                    "params": params,
                    "node_count": graph.node_count(),
                    "placements": trace.placements,
                    "legal": trace.legal,
                    "metrics": m,
                    "lower_bound": bound,
                }),
            )?;
            Ok(EXIT_OK)
        }
        Err(failure) => {
            emit(io.stdout, &json!({"params": params, "failure": failure}))?;
            Ok(EXIT_MISMATCH)
        }
    }
}

fn bench(a: BenchArgs, io: &mut Io) -> Result<i32> {
    for g in a.garlic_range.clone() {
        for lambda in a.lambda_range.clone() {
            let params = HashParams::new(g, lambda, b"rscram-bench-salt".to_vec())?;
            let hash = CountingHash::new(Sha256Hash);
            let start = Instant::now();
            evaluate(&hash, b"bench", &params)?;
            let elapsed = start.elapsed();
            let predicted = hash_call_count(&Sha256Hash, &params)?;
            emit(
                io.stdout,
                &json!({
                    "g": g,
                    "lambda": lambda,
                    "wall_ms": elapsed.as_secs_f64() * 1e3,
                    "hash_calls": hash.calls(),
                    "predicted": predicted,
                }),
            )?;
        }
    }
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str], stdin: &[u8]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("rscram").chain(args.iter().copied());
        let code = run(argv, &mut &stdin[..], &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    const SALT: &str = "00112233445566778899aabbccddeeff";

    #[test]
    fn hash_then_verify() {
        let (code, phc, _) = call(&["hash", "--garlic", "4", "--lambda", "2", "--salt-hex", SALT], b"password\n");
        assert_eq!(code, 0);
        let phc = phc.trim();
        assert!(phc.starts_with("$rscram$v=1$g=4,l=2$ABEiM0RVZneImaq7zN3u/w$"));
        assert_eq!(call(&["verify", phc], b"password").0, 0);
        let (code, out, _) = call(&["verify", phc], b"passwore");
        assert_eq!((code, out.trim()), (1, r#"{"match":false}"#));
        assert_eq!(call(&["verify", "$rscram$v=1$g=4"], b"password").0, 2);
    }

    #[test]
    fn trailing_newline_handling() {
        assert_eq!(read_password(&mut &b"pw\r\n"[..]).unwrap(), b"pw");
        assert_eq!(read_password(&mut &b"pw\n\n"[..]).unwrap(), b"pw\n");
        assert_eq!(read_password(&mut &b"pw"[..]).unwrap(), b"pw");
    }

    #[test]
    fn usage_errors() {
        assert_eq!(call(&["hash", "--salt-hex", SALT, "--random-salt"], b"").0, 2);
        assert_eq!(call(&["hash", "--bogus"], b"").0, 2);
        assert_eq!(call(&["hash", "--garlic", "4", "--salt-hex", "00"], b"").0, 2);
        assert_eq!(call(&["hash", "--garlic", "4", "--salt-hex", "zz"], b"").0, 2);
        assert_eq!(call(&["analyze", "--garlic", "3", "--salt-hex", SALT], b"").0, 2);
        assert_eq!(call(&["analyze", "--superconcentrator", "--exhaustive", "--garlic", "4", "--salt-hex", SALT], b"").0, 2);
        assert_eq!(call(&["bench", "--garlic-range", "5..3", "--lambda-range", "1..1"], b"").0, 2);
        assert_eq!(call(&["--help"], b"").0, 0);
    }

    #[test]
    fn analyze_and_pebble_json() {
        let (code, out, _) = call(
            &["analyze", "--superconcentrator", "--samples", "50", "--seed", "7", "--garlic", "3", "--salt-hex", SALT, "--dispersion", "--h", "8", "--jobs", "2"],
            b"",
        );
        assert_eq!(code, 0);
        let reports: Vec<serde_json::Value> = out.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
        assert_eq!(reports.len(), 2);
        assert_eq!(reports[0]["check"], "superconcentrator");
        assert_eq!(reports[1]["check"], "layer-dispersion");
        assert!(reports.iter().all(|r| r["pass"] == true));

        let (code, out, _) = call(&["pebble", "--garlic", "3", "--salt-hex", SALT, "--strategy", "honest"], b"");
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
        assert_eq!(v["placements"], 56);
        assert_eq!(v["metrics"]["time"], 56);

        let (code, out, _) = call(&["pebble", "--garlic", "3", "--salt-hex", SALT, "--strategy", "greedy", "--budget", "4"], b"");
        assert_eq!(code, 1);
        assert!(out.contains("\"failure\""));
    }

    #[test]
    fn bench_counts_match() {
        let (code, out, _) = call(&["bench", "--garlic-range", "2..3", "--lambda-range", "1..2"], b"");
        assert_eq!(code, 0);
        let rows: Vec<serde_json::Value> = out.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
        assert_eq!(rows.len(), 4);
        for r in rows {
            let p = &r["predicted"];
            let total = p["shuffle"].as_u64().unwrap() + p["seeding"].as_u64().unwrap() + p["evaluation"].as_u64().unwrap();
            assert_eq!(r["hash_calls"].as_u64().unwrap(), total);
        }
    }
}
