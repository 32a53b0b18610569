//! Benchmark harness CLI.
//!
//! Subcommands: `gen` (synthetic data), `run` (masked evaluation protocol),
//! `sweep` (rank selection on training error), `ordering` (column-ordering
//! study), `preprocess` (log transform + feature agglomeration).
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use stmf_cli::config::{DcorScope, ExperimentConfig, InitStrategy, Method};
use stmf_cli::experiment::{ordering_study, preprocess, run_experiment, sweep};
use stmf_cli::report::InputDescriptor;
use stmf_core::csv::{read_csv, write_csv, write_split_sidecar};
use stmf_core::datagen::{generate_synthetic, mask_split, SyntheticSpec};
use stmf_core::seeding::derive_seed;
use stmf_core::stmf::OrderingStrategy;
use stmf_core::MaskedMatrix;

#[derive(Parser)]
#[command(
    name = "stmf",
    version,
    about = "Tropical matrix completion benchmark harness"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic (max,+) matrix as CSV
    Gen(GenArgs),
    /// Run the masked evaluation protocol on an input matrix
    Run(RunArgs),
    /// Run the protocol across several ranks and select one on training error
    Sweep(SweepArgs),
    /// Compare column-ordering strategies on achieved distance correlation
    Ordering(OrderingArgs),
    /// Apply the preprocessing chain (log2, feature agglomeration)
    Preprocess(PreprocessArgs),
}

fn positive(s: &str) -> Result<usize, String> {
    let v: usize = s.parse().map_err(|_| format!("'{s}' is not a count"))?;
    if v == 0 {
        return Err("must be at least 1".to_string());
    }
    Ok(v)
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, default_value_t = 200, value_parser = positive)]
    rows: usize,
    #[arg(long, default_value_t = 100, value_parser = positive)]
    cols: usize,
    /// True (max,+) rank of the generated matrix
    #[arg(long, default_value_t = 3, value_parser = positive)]
    rank: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Also draw a train/test split and write it to <output>.split.json
    #[arg(long = "mask-frac")]
    mask_frac: Option<f64>,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct ProtocolArgs {
    /// Input matrix CSV (fully given; empty cells are missing entries)
    input: PathBuf,
    #[arg(long, default_value = "stmf")]
    method: Method,
    #[arg(long, default_value_t = 3, value_parser = positive)]
    rank: usize,
    /// Outer iteration cap per fit
    #[arg(long = "iters", default_value_t = 500, value_parser = positive)]
    iters: usize,
    #[arg(long = "reps", default_value_t = 10, value_parser = positive)]
    reps: usize,
    /// Fraction of given entries held out as the test set each repetition
    #[arg(long = "mask-frac", default_value_t = 0.2)]
    mask_frac: f64,
    #[arg(long, default_value = "min_asc")]
    ordering: OrderingStrategy,
    /// Model initialization (default: random_acol for stmf, nndsvd for nmf)
    #[arg(long)]
    init: Option<InitStrategy>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Columns per Random Acol draw (default ceil(n/5))
    #[arg(long = "subset-size")]
    subset_size: Option<usize>,
    /// Convergence tolerance on per-scan objective improvement
    #[arg(long = "tol", default_value_t = 1e-10)]
    tol: f64,
    /// Compare dcor on the full matrices or on held-out entries only
    #[arg(long = "dcor-scope", default_value = "full")]
    dcor_scope: DcorScope,
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    protocol: ProtocolArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    protocol: ProtocolArgs,
    /// Ranks to evaluate, e.g. --ranks 1,2,3,4,5
    #[arg(long, value_delimiter = ',', required = true)]
    ranks: Vec<usize>,
}

#[derive(Args)]
struct OrderingArgs {
    #[command(flatten)]
    protocol: ProtocolArgs,
    /// Strategies to compare (default: all)
    #[arg(long, value_delimiter = ',')]
    strategies: Option<Vec<OrderingStrategy>>,
}

#[derive(Args)]
struct PreprocessArgs {
    input: PathBuf,
    /// Replace each given value x with log2(x + 1)
    #[arg(long = "log2")]
    log2: bool,
    /// Ward-agglomerate columns into this many meta-columns
    #[arg(long)]
    agglomerate: Option<usize>,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(format!("unknown format '{other}' (expected json or csv)")),
        }
    }
}

/// Marker for errors that should exit with the usage code.
#[derive(Debug)]
struct UsageError(String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for UsageError {}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0u8,
                _ => 1u8,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

fn exit_code_for(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        return 1;
    }
    match err.downcast_ref::<stmf_core::Error>() {
        Some(stmf_core::Error::EmptyMinimum { .. }) => 3,
        Some(stmf_core::Error::InvalidRank { .. })
        | Some(stmf_core::Error::InvalidFraction(_))
        | Some(stmf_core::Error::InvalidClusterCount { .. }) => 1,
        Some(_) => 2,
        None => 2,
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Run(args) => {
            let (input, desc, config) = load_protocol(&args.protocol)?;
            let report = run_experiment(&input, desc, &config)?;
            match args.protocol.format {
                Format::Json => emit_json(args.protocol.output.as_deref(), &report),
                Format::Csv => emit(args.protocol.output.as_deref(), &report.to_csv()),
            }
        }
        Command::Sweep(args) => {
            let (input, desc, config) = load_protocol(&args.protocol)?;
            let report = sweep(&input, desc, &config, &args.ranks)?;
            match args.protocol.format {
                Format::Json => emit_json(args.protocol.output.as_deref(), &report),
                Format::Csv => emit(args.protocol.output.as_deref(), &report.to_csv()),
            }
        }
        Command::Ordering(args) => {
            let (input, desc, config) = load_protocol(&args.protocol)?;
            let strategies = args
                .strategies
                .unwrap_or_else(|| OrderingStrategy::ALL.to_vec());
            let report = ordering_study(&input, desc, &config, &strategies)?;
            match args.protocol.format {
                Format::Json => emit_json(args.protocol.output.as_deref(), &report),
                Format::Csv => emit(args.protocol.output.as_deref(), &report.to_csv()),
            }
        }
        Command::Preprocess(args) => cmd_preprocess(args),
    }
}

fn cmd_gen(args: GenArgs) -> Result<()> {
    let spec = SyntheticSpec {
        rows: args.rows,
        cols: args.cols,
        true_rank: args.rank,
        seed: args.seed,
    };
    let matrix = generate_synthetic(&spec)?;
    write_csv(&args.output, &matrix, None)
        .with_context(|| format!("writing {}", args.output.display()))?;
    if let Some(fraction) = args.mask_frac {
        let split = mask_split(&matrix, fraction, derive_seed(args.seed, 0x4d41_534b))?;
        let sidecar_path = sidecar_path(&args.output, "split.json");
        write_split_sidecar(&sidecar_path, &split)
            .with_context(|| format!("writing {}", sidecar_path.display()))?;
        println!(
            "wrote {}x{} rank-{} matrix to {} with split sidecar {}",
            args.rows,
            args.cols,
            args.rank,
            args.output.display(),
            sidecar_path.display()
        );
    } else {
        println!(
            "wrote {}x{} rank-{} matrix to {}",
            args.rows,
            args.cols,
            args.rank,
            args.output.display()
        );
    }
    Ok(())
}

fn cmd_preprocess(args: PreprocessArgs) -> Result<()> {
    let parsed = read_csv(&args.input).with_context(|| format!("reading {}", args.input.display()))?;
    let (result, assignment) = preprocess(&parsed.matrix, args.log2, args.agglomerate)?;
    let header: Option<Vec<String>> = match (&assignment, &parsed.header) {
        // agglomeration invents meta-columns
        (Some(_), _) => Some((0..result.cols()).map(|c| format!("meta_{c}")).collect()),
        (None, Some(h)) => Some(h.clone()),
        (None, None) => None,
    };
    write_csv(&args.output, &result, header.as_deref())
        .with_context(|| format!("writing {}", args.output.display()))?;
    if let Some(labels) = assignment {
        let path = sidecar_path(&args.output, "clusters.json");
        let payload = serde_json::json!({
            "n_clusters": labels.iter().max().map_or(0, |m| m + 1),
            "assignment": labels,
        });
        fs::write(&path, serde_json::to_string_pretty(&payload)? + "\n")
            .with_context(|| format!("writing {}", path.display()))?;
        println!(
            "wrote {}x{} matrix to {} with cluster sidecar {}",
            result.rows(),
            result.cols(),
            args.output.display(),
            path.display()
        );
    } else {
        println!(
            "wrote {}x{} matrix to {}",
            result.rows(),
            result.cols(),
            args.output.display()
        );
    }
    Ok(())
}

fn load_protocol(args: &ProtocolArgs) -> Result<(MaskedMatrix, InputDescriptor, ExperimentConfig)> {
    let config = ExperimentConfig {
        method: args.method,
        rank: args.rank,
        max_iterations: args.iters,
        repetitions: args.reps,
        mask_fraction: args.mask_frac,
        ordering: args.ordering,
        init: args.init.unwrap_or_else(|| InitStrategy::default_for(args.method)),
        seed: args.seed,
        tolerance: args.tol,
        subset_size: args.subset_size,
        dcor_scope: args.dcor_scope,
    };
    config
        .validate()
        .map_err(|msg| anyhow::Error::new(UsageError(msg)))?;
    let parsed = read_csv(&args.input).with_context(|| format!("reading {}", args.input.display()))?;
    let desc = InputDescriptor {
        path: args.input.display().to_string(),
        rows: parsed.matrix.rows(),
        cols: parsed.matrix.cols(),
        given_entries: parsed.matrix.given_count(),
    };
    Ok((parsed.matrix, desc, config))
}

fn sidecar_path(base: &Path, suffix: &str) -> PathBuf {
    let mut name = base.as_os_str().to_os_string();
    name.push(".");
    name.push(suffix);
    PathBuf::from(name)
}

fn emit_json<T: Serialize>(path: Option<&Path>, value: &T) -> Result<()> {
    let json = serde_json::to_string_pretty(value)? + "\n";
    emit(path, &json)
}

fn emit(path: Option<&Path>, content: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, content).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{content}"),
    }
    Ok(())
}
