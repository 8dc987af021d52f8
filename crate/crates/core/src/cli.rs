//! The `qaflow` command line.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::report::{
    compute_measures, emit_plot_series, parse_oracle_file, render_table, MeasuresRequest,
    TraceDocument,
};
use crate::runner::{
    default_horizon, grover_lower_bound, run, termination_scan, Algorithm, AlgorithmConfig,
    Granularity, Oracle,
};
use crate::state::QubitSubset;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_INVARIANT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "qaflow", version, about = "Entropy traces of small quantum algorithms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one algorithm and emit its trace.
    Run {
        #[arg(value_parser = parse_algorithm)]
        algorithm: Algorithm,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Minimum-entropy termination scan.
    Scan {
        #[arg(value_enum)]
        target: ScanTarget,
        #[command(flatten)]
        opts: RunOpts,
    },
    /// Entropy measures of a JSON distribution or density matrix.
    Measures { file: PathBuf },
    /// Oracle-call lower bound.
    Bound {
        #[arg(value_enum)]
        target: ScanTarget,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0.0)]
        pe: f64,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ScanTarget {
    Grover,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GranularityArg {
    Iter,
    Substep,
}

#[derive(Debug, Args)]
struct RunOpts {
    /// Source-register width; inferred from --oracle or --marked when omitted.
    #[arg(long)]
    n: Option<usize>,
    /// Truth-table file.
    #[arg(long)]
    oracle: Option<PathBuf>,
    /// Marked item for grover.
    #[arg(long)]
    marked: Option<String>,
    #[arg(long)]
    iterations: Option<usize>,
    /// Scan horizon for grover.
    #[arg(long)]
    max_iterations: Option<usize>,
    #[arg(long)]
    scan: bool,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
    /// Write the trace here instead of stdout.
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "substep")]
    granularity: GranularityArg,
    /// Comma-separated 1-based qubit indices.
    #[arg(long)]
    subset: Option<String>,
}

fn parse_algorithm(s: &str) -> std::result::Result<Algorithm, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn build_config(algorithm: Algorithm, opts: &RunOpts) -> Result<AlgorithmConfig> {
    let oracle = match (&opts.oracle, &opts.marked) {
        (Some(_), Some(_)) => {
            return Err(Error::InvalidParameter("give either --oracle or --marked".into()))
        }
        (Some(path), None) => Oracle::Table(parse_oracle_file(path)?),
        (None, Some(bits)) => Oracle::Marked(bits.clone()),
        (None, None) => {
            return Err(Error::InvalidParameter(format!("{algorithm} needs --oracle or --marked")))
        }
    };
    let inferred = match &oracle {
        Oracle::Table(f) => f.n_in(),
        Oracle::Marked(bits) => bits.len(),
    };
    let n = opts.n.unwrap_or(inferred);
    let mut config = AlgorithmConfig::new(algorithm, n, oracle);
    if let Some(h) = opts.max_iterations {
        config.max_iterations = h;
    } else if let Some(k) = opts.iterations {
        config.max_iterations = default_horizon(n).max(k);
    }
    config.iterations = opts.iterations;
    config.scan = opts.scan;
    config.granularity = match opts.granularity {
        GranularityArg::Iter => Granularity::Iter,
        GranularityArg::Substep => Granularity::Substep,
    };
    if let Some(text) = &opts.subset {
        config.analysis_subset = Some(QubitSubset::parse(text)?);
    }
    if config.scan && config.iterations.is_some() {
        return Err(Error::InvalidParameter("--scan and --iterations are exclusive".into()));
    }
    if algorithm != Algorithm::Grover && (config.scan || config.iterations.is_some()) {
        return Err(Error::InvalidParameter(format!(
            "{algorithm} is not iterative; --scan and --iterations apply to grover"
        )));
    }
    Ok(config)
}

fn execute(
    config: &AlgorithmConfig,
    opts: &RunOpts,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<()> {
    let result = if config.scan {
        termination_scan(config)?
    } else {
        run(config)?
    };
    let doc = TraceDocument::from_run(config, &result);
    let body = match opts.format {
        Format::Json => {
            let mut json = doc.to_json()?;
            json.push('\n');
            json
        }
        Format::Csv => emit_plot_series(&doc),
        Format::Table => render_table(&doc),
    };
    let verdict = format!(
        "verdict={} stop_iteration={} outcome={}\n",
        doc.verdict, doc.stop_iteration, doc.chosen_outcome
    );
    match &opts.trace {
        Some(path) => {
            std::fs::write(path, body)?;
            out.write_all(verdict.as_bytes())?;
        }
        None if opts.format == Format::Table => {
            out.write_all(body.as_bytes())?;
            out.write_all(verdict.as_bytes())?;
        }
        None => {
            out.write_all(body.as_bytes())?;
            err.write_all(verdict.as_bytes())?;
        }
    }
    Ok(())
}

fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Run { algorithm, opts } => {
            let config = build_config(algorithm, &opts)?;
            execute(&config, &opts, out, err)
        }
        Command::Scan { target: ScanTarget::Grover, mut opts } => {
            opts.scan = true;
            let config = build_config(Algorithm::Grover, &opts)?;
            execute(&config, &opts, out, err)
        }
        Command::Measures { file } => {
            let request: MeasuresRequest = serde_json::from_str(&std::fs::read_to_string(file)?)?;
            let report = compute_measures(&request)?;
            writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
            Ok(())
        }
        Command::Bound { target: ScanTarget::Grover, n, pe } => {
            if n == 0 || n + 1 > crate::linalg::DEFAULT_MAX_QUBITS || n >= 63 {
                return Err(Error::InvalidParameter(format!("n={n} out of range")));
            }
            let big_n = 1usize << n;
            let bound = grover_lower_bound(big_n, pe)?;
            let scan = termination_scan(&AlgorithmConfig::grover(n, &"0".repeat(n)))?;
            writeln!(out, "N={big_n} pe={pe} bound={bound}")?;
            writeln!(out, "scan_stop_iteration={}", scan.stop_iteration)?;
            Ok(())
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Invariant(_) | Error::NoConvergence(_) => EXIT_INVARIANT,
        _ => EXIT_VALIDATION,
    }
}

/// Parses `args` (program name first), runs, and returns the exit status.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = err.write_all(text.as_bytes());
                EXIT_VALIDATION
            } else {
                let _ = out.write_all(text.as_bytes());
                EXIT_OK
            };
        }
    };
    match dispatch(cli, out, err) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}
