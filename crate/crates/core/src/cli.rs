//! Command-line front end: argument handling, JSON/GAP output and the exit
//! code contract (0 verified, 1 verification failure, 2 invalid input).

use std::collections::{BTreeMap, BTreeSet};
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use serde::Serialize;

use crate::arith;
use crate::construct::{RealizationTrace, Realizer, DEFAULT_MAX_LEVEL};
use crate::engine::{self, DeltaSet, Engine, FactorizationSet, SquarefreeMode, DEFAULT_BUDGET};
use crate::error::{Error, Result};
use crate::monoid::NumericalMonoid;
use crate::verify;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFICATION_FAILED: i32 = 1;
pub const EXIT_INVALID_INPUT: i32 = 2;

/// Environment variable overriding the enumeration budget.
pub const BUDGET_ENV: &str = "LENGTHFORGE_BUDGET";

#[derive(Debug, Parser)]
#[command(name = "lengthforge", version, about = "Realize and certify sets of lengths in numerical monoids")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a numerical monoid and element with the given lengths and counts
    Realize(RealizeArgs),
    /// Re-verify a realization trace written by `realize` or `delta`
    Verify(VerifyArgs),
    /// Factorizations, lengths, delta set and squarefreeness of one element
    Analyze(AnalyzeArgs),
    /// Realize a monoid whose delta set contains the given distances
    Delta(DeltaArgs),
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write the realization trace here instead of stdout
    #[arg(long = "json", value_name = "PATH")]
    pub output_path: Option<PathBuf>,
    /// Also write a GAP numericalsgps script
    #[arg(long = "gap", value_name = "PATH")]
    pub gap_export_path: Option<PathBuf>,
    /// Skip the verification pass
    #[arg(long)]
    pub no_verify: bool,
    /// Largest accepted level
    #[arg(long, default_value_t = DEFAULT_MAX_LEVEL)]
    pub max_level: u64,
}

#[derive(Debug, Args)]
pub struct RealizeArgs {
    /// Comma-separated lengths, each at least 2
    #[arg(long, allow_hyphen_values = true)]
    pub lengths: String,
    /// Comma-separated counts, one per length
    #[arg(long, allow_hyphen_values = true)]
    pub counts: String,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_name = "PATH")]
    pub input: PathBuf,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Comma-separated coprime generators
    #[arg(long, allow_hyphen_values = true)]
    pub generators: String,
    #[arg(long, allow_hyphen_values = true)]
    pub element: String,
}

#[derive(Debug, Args)]
pub struct DeltaArgs {
    /// Comma-separated positive distances
    #[arg(long, allow_hyphen_values = true)]
    pub distances: String,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Parses arguments and runs one command, writing to the given streams.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return EXIT_INVALID_INPUT;
            }
            let _ = write!(out, "{e}");
            return EXIT_OK;
        }
    };
    let engine = match engine_from_env() {
        Ok(engine) => engine,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_INVALID_INPUT;
        }
    };
    let result = match &cli.command {
        Command::Realize(a) => run_realize(&engine, a, out, err),
        Command::Verify(a) => run_verify(&engine, a, out, err),
        Command::Analyze(a) => run_analyze(&engine, a, out),
        Command::Delta(a) => run_delta(&engine, a, out, err),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INVALID_INPUT
        }
    }
}

pub fn engine_from_env() -> Result<Engine> {
    match std::env::var(BUDGET_ENV) {
        Ok(text) => text
            .trim()
            .parse::<u64>()
            .map(Engine::with_budget)
            .map_err(|_| Error::invalid(format!("{BUDGET_ENV} must be a non-negative integer, got {text:?}"))),
        Err(_) => Ok(Engine::with_budget(DEFAULT_BUDGET)),
    }
}

fn parse_list(name: &str, text: &str) -> Result<Vec<u64>> {
    text.split(',')
        .map(|item| {
            let item = item.trim();
            item.parse::<u64>().map_err(|_| {
                Error::invalid(format!("{name}: {item:?} is not a non-negative integer"))
            })
        })
        .collect()
}

/// Lengths and counts as the length set and count map, validated.
pub fn parse_realize_request(lengths: &str, counts: &str) -> Result<(BTreeSet<u64>, BTreeMap<u64, u64>)> {
    let lengths = parse_list("lengths", lengths)?;
    let counts = parse_list("counts", counts)?;
    if lengths.len() != counts.len() {
        return Err(Error::invalid(format!(
            "{} lengths but {} counts",
            lengths.len(),
            counts.len()
        )));
    }
    if lengths.iter().any(|&k| k < 2) {
        return Err(Error::invalid("lengths must be ≥ 2"));
    }
    if counts.contains(&0) {
        return Err(Error::invalid("counts must be ≥ 1"));
    }
    let set: BTreeSet<u64> = lengths.iter().copied().collect();
    if set.len() != lengths.len() {
        return Err(Error::invalid("lengths must be distinct"));
    }
    Ok((set, lengths.into_iter().zip(counts).collect()))
}

fn run_realize(engine: &Engine, args: &RealizeArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let (lengths, counts) = parse_realize_request(&args.lengths, &args.counts)?;
    let trace = Realizer::new(*engine, args.output.max_level).realize(&lengths, &counts)?;
    emit_trace(&trace, &args.output, out)?;
    if args.output.no_verify {
        return Ok(EXIT_OK);
    }
    Ok(report_verification(engine, &trace, err))
}

fn run_delta(engine: &Engine, args: &DeltaArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let distances: BTreeSet<u64> = parse_list("distances", &args.distances)?.into_iter().collect();
    if distances.contains(&0) {
        return Err(Error::invalid("distances must be positive"));
    }
    let trace = Realizer::new(*engine, args.output.max_level).realize_delta_superset(&distances)?;
    emit_trace(&trace, &args.output, out)?;
    if args.output.no_verify {
        return Ok(EXIT_OK);
    }
    let code = report_verification(engine, &trace, err);
    let delta = match verify::delta_of_target(engine, &trace) {
        Ok(delta) => delta,
        Err(e) => {
            writeln!(err, "[FAIL] delta: {e}")?;
            return Ok(EXIT_VERIFICATION_FAILED);
        }
    };
    let ok = delta.0 == distances;
    writeln!(
        err,
        "[{}] delta: Δ(L({})) = {:?}, requested {:?}",
        if ok { "ok" } else { "FAIL" },
        trace.target,
        delta.0,
        distances
    )?;
    Ok(if ok { code } else { EXIT_VERIFICATION_FAILED })
}

fn emit_trace(trace: &RealizationTrace, output: &OutputArgs, out: &mut dyn Write) -> Result<()> {
    let json = trace.to_json();
    match &output.output_path {
        Some(path) => fs::write(path, format!("{json}\n"))?,
        None => writeln!(out, "{json}")?,
    }
    if let Some(path) = &output.gap_export_path {
        fs::write(path, gap_export(trace))?;
    }
    Ok(())
}

fn report_verification(engine: &Engine, trace: &RealizationTrace, err: &mut dyn Write) -> i32 {
    let report = verify::verify_realization(engine, trace);
    let _ = writeln!(err, "{report}");
    if report.passed {
        EXIT_OK
    } else {
        EXIT_VERIFICATION_FAILED
    }
}

fn run_verify(engine: &Engine, args: &VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let trace = load_trace(&args.input)?;
    let report = verify::verify_realization(engine, &trace);
    writeln!(out, "{}", serde_json::to_string(&report)?)?;
    if report.passed {
        Ok(EXIT_OK)
    } else {
        writeln!(err, "failed checks: {}", report.failures().join(", "))?;
        Ok(EXIT_VERIFICATION_FAILED)
    }
}

pub fn load_trace(path: &Path) -> Result<RealizationTrace> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))?;
    RealizationTrace::from_json(&text)
}

#[derive(Debug, Serialize)]
pub struct SquarefreeStatus {
    pub paper_literal: bool,
    pub strong: bool,
}

/// Everything `analyze` reports about one element.
#[derive(Debug, Serialize)]
pub struct ElementAnalysis {
    #[serde(flatten)]
    pub monoid: NumericalMonoid,
    #[serde(with = "arith::serde_str::integer")]
    pub element: BigInt,
    pub factorizations: FactorizationSet<BigInt>,
    pub lengths: BTreeSet<u64>,
    pub counts: BTreeMap<u64, u64>,
    pub delta: DeltaSet,
    pub squarefree: SquarefreeStatus,
}

pub fn analyze(engine: &Engine, monoid: NumericalMonoid, element: BigInt) -> Result<ElementAnalysis> {
    let factorizations = engine.factorizations(&monoid, &element)?;
    let profile = factorizations.length_profile();
    let lengths = profile.length_set();
    Ok(ElementAnalysis {
        delta: engine::delta_set(&lengths),
        squarefree: SquarefreeStatus {
            paper_literal: engine::squarefree_from_factorizations(&factorizations, SquarefreeMode::PaperLiteral),
            strong: engine::squarefree_from_factorizations(&factorizations, SquarefreeMode::Strong),
        },
        monoid,
        element,
        factorizations,
        lengths,
        counts: profile.counts,
    })
}

fn run_analyze(engine: &Engine, args: &AnalyzeArgs, out: &mut dyn Write) -> Result<i32> {
    let generators = args
        .generators
        .split(',')
        .map(|g| arith::parse_integer(g.trim()))
        .collect::<Result<Vec<_>>>()?;
    let monoid = NumericalMonoid::new(generators)?;
    let element = arith::parse_integer(args.element.trim())?;
    if element < BigInt::from(0) {
        return Err(Error::invalid("element must be non-negative"));
    }
    let analysis = analyze(engine, monoid, element)?;
    writeln!(out, "{}", serde_json::to_string(&analysis)?)?;
    Ok(EXIT_OK)
}

/// GAP script defining the realized numerical semigroup.
pub fn gap_export(trace: &RealizationTrace) -> String {
    let join = |v: Vec<String>| v.join(",");
    let lengths = join(trace.lengths.iter().map(u64::to_string).collect());
    let counts = join(trace.counts.iter().map(|(k, n)| format!("{k}:{n}")).collect());
    let generators = join(trace.numerical_generators.iter().map(BigInt::to_string).collect());
    format!(
        "# lengths: {lengths}\n# counts: {counts}\n# target: {}\nNumericalSemigroup({generators});\n",
        trace.target
    )
}
