use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use singtrace_core::ideals::ModelSpec;
use singtrace_core::{Error, LimitKind, PsiSpec};

mod commands;
mod output;

const ABOUT: &str = "Finite-horizon experiments with singular traces: submajorization, \
Marcinkiewicz norms, Dixmier trace estimates and their diagnostics.";

const AFTER_HELP: &str = "\
Sequences (--seq, --a, --b, ...):
  harmonic | power:<beta> | geometric:<r> | psi-inc:<psi> | oscillating | constant:<c> | file:<csv>
Renormalizations (--psi):
  log | power:<alpha in (0,1)> | linear | dpss | file:<csv of increments>
Limit procedures (--limit):
  cesaro:<k> | logmean | dilavg:<d,...>[@k] (d in 2,3,4,8; default order 1) | tail:<fraction>

Results are printed to stdout as a JSON run record; wall time goes to stderr.
Exit status: 0 on success (including verdicts such as \"divergent\"), 2 on
invalid arguments or input files, 3 when a mathematical precondition fails.
SINGTRACE_THREADS caps the number of worker threads.";

#[derive(Parser)]
#[command(name = "singtrace", version, about = ABOUT, after_help = AFTER_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Parses counts such as `1000000` or `1e6`.
fn parse_count(s: &str) -> Result<usize, String> {
    if let Ok(n) = s.parse::<usize>() {
        return Ok(n);
    }
    match s.parse::<f64>() {
        Ok(x) if x >= 0.0 && x.fract() == 0.0 && x < 2f64.powi(53) => Ok(x as usize),
        _ => Err(format!("'{s}' is not a nonnegative integer")),
    }
}

fn parse_reals(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("'{t}' is not a number")))
        .collect()
}

fn parse_counts(s: &str) -> Result<Vec<usize>, String> {
    s.split(',').map(|t| parse_count(t.trim())).collect()
}

#[derive(Args, Clone)]
pub struct CurveArg {
    /// Write a plot-ready CSV curve (index,value) to this path.
    #[arg(long, value_name = "PATH")]
    pub curve: Option<PathBuf>,
    /// Maximum number of rows in the curve; long curves are sampled on a log-spaced grid.
    #[arg(long, default_value_t = 2000, value_name = "N")]
    pub curve_points: usize,
}

#[derive(Args, Clone)]
pub struct TraceArgs {
    /// Singular value sequence.
    #[arg(long)]
    pub seq: ModelSpec,
    /// Concave renormalization ψ.
    #[arg(long, default_value = "log")]
    pub psi: PsiSpec,
    /// Limit procedure standing in for the singular state.
    #[arg(long, default_value = "dilavg:2,4,8")]
    pub limit: LimitKind,
    /// Evaluation horizon.
    #[arg(long, default_value = "1000000", value_parser = parse_count)]
    pub horizon: usize,
    /// Band width above which the verdict is "oscillating".
    #[arg(long, default_value_t = 0.05)]
    pub band_tol: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Singular values of a matrix, or the decreasing rearrangement of a sequence.
    Mu {
        /// Real square matrix, as file:<csv>.
        #[arg(long, conflicts_with = "seq", required_unless_present = "seq")]
        matrix: Option<String>,
        #[arg(long)]
        seq: Option<ModelSpec>,
        /// Number of entries to rearrange (sequence input).
        #[arg(long, default_value = "1000", value_parser = parse_count)]
        n: usize,
        #[command(flatten)]
        curve: CurveArg,
    },
    /// Check b ≺≺ a on the first n entries of their decreasing rearrangements.
    Submaj {
        #[arg(long)]
        b: ModelSpec,
        #[arg(long)]
        a: ModelSpec,
        #[arg(long, value_parser = parse_count)]
        n: usize,
        #[command(flatten)]
        curve: CurveArg,
    },
    /// Decreasing sequence whose prefix sums are the minimum of those of a and b.
    Wedge {
        #[arg(long)]
        a: ModelSpec,
        #[arg(long)]
        b: ModelSpec,
        #[arg(long, value_parser = parse_count)]
        n: usize,
        #[command(flatten)]
        curve: CurveArg,
    },
    /// Split b = b1 + b2 with b1 ≺≺ a1 and b2 ≺≺ a2, given b ≺≺ a1 + a2.
    Decompose {
        #[arg(long)]
        b: ModelSpec,
        #[arg(long)]
        a1: ModelSpec,
        #[arg(long)]
        a2: ModelSpec,
        #[arg(long, value_parser = parse_count)]
        n: usize,
    },
    /// Marcinkiewicz norm: the maximum of T(a) over the horizon.
    Norm {
        #[arg(long)]
        seq: ModelSpec,
        #[arg(long, default_value = "log")]
        psi: PsiSpec,
        #[arg(long, default_value = "1000000", value_parser = parse_count)]
        horizon: usize,
        #[command(flatten)]
        curve: CurveArg,
    },
    /// Sampled doubling ratios ψ(2t)/ψ(t) with tail-window estimates.
    PsiDiagnose {
        #[arg(long, default_value = "log")]
        psi: PsiSpec,
        #[arg(long, default_value = "1000000", value_parser = parse_count)]
        horizon: usize,
        /// Ratio of the geometric sampling grid.
        #[arg(long, default_value_t = 2f64.powf(0.25))]
        grid: f64,
        #[command(flatten)]
        curve: CurveArg,
    },
    /// Trace estimate: limit surrogate of T(a), T band and verdict.
    Trace {
        #[command(flatten)]
        args: TraceArgs,
        #[command(flatten)]
        curve: CurveArg,
    },
    /// Surrogate value of ψ(2n+1)/ψ(n+1); passes when within --tol of 1.
    Criterion {
        #[arg(long, default_value = "log")]
        psi: PsiSpec,
        #[arg(long, default_value = "dilavg:2,4,8")]
        limit: LimitKind,
        #[arg(long, default_value = "1000000", value_parser = parse_count)]
        horizon: usize,
        #[arg(long, default_value_t = 0.1)]
        tol: f64,
        #[command(flatten)]
        curve: CurveArg,
    },
    /// Compare several limit procedures and the T band over [10^4, band horizon].
    Measurability {
        #[arg(long)]
        seq: ModelSpec,
        #[arg(long, default_value = "log")]
        psi: PsiSpec,
        /// Repeat for each procedure (default: cesaro:1, logmean, dilavg:2,4,8).
        #[arg(long = "limit")]
        limits: Vec<LimitKind>,
        #[arg(long, default_value = "1000000", value_parser = parse_count)]
        horizon: usize,
        /// Last index of the T band (default: the horizon).
        #[arg(long, value_parser = parse_count)]
        band_horizon: Option<usize>,
        #[arg(long, default_value_t = 0.05)]
        spread_tol: f64,
        #[arg(long, default_value_t = 0.05)]
        band_tol: f64,
        #[command(flatten)]
        curve: CurveArg,
    },
    /// Trace estimates of the wedge truncations a ∧ m·witness along cutoffs m.
    NormalPart {
        #[command(flatten)]
        args: TraceArgs,
        /// Increasing truncation levels.
        #[arg(long, default_value = "1,2,4,8,16,32,64", value_parser = parse_reals)]
        cutoffs: std::vec::Vec<f64>,
        #[command(flatten)]
        curve: CurveArg,
    },
    /// (1/n)·‖a^{⊕n}‖ for several multiplicities n.
    Dichotomy {
        #[arg(long)]
        seq: ModelSpec,
        #[arg(long, default_value = "log")]
        psi: PsiSpec,
        #[arg(long, default_value = "1,32,1024,32768,1048576", value_parser = parse_counts)]
        ns: std::vec::Vec<usize>,
        /// Number of blocks of σ_n a inspected (the horizon is n·blocks).
        #[arg(long, default_value = "1048576", value_parser = parse_count)]
        blocks: usize,
        #[command(flatten)]
        curve: CurveArg,
    },
    /// Additivity defect τ(a) + τ(b) − τ(a ⊞ b) for commuting or matrix pairs.
    Audit {
        #[arg(long, required_unless_present = "matrix_a")]
        a: Option<ModelSpec>,
        #[arg(long, required_unless_present = "matrix_b")]
        b: Option<ModelSpec>,
        #[arg(long, conflicts_with_all = ["a", "b"], requires = "matrix_b")]
        matrix_a: Option<String>,
        #[arg(long, requires = "matrix_a")]
        matrix_b: Option<String>,
        #[arg(long, default_value = "log")]
        psi: PsiSpec,
        #[arg(long, default_value = "dilavg:2,4,8")]
        limit: LimitKind,
        #[arg(long, default_value = "1000000", value_parser = parse_count)]
        horizon: usize,
    },
}

fn configure_threads() -> Result<(), Error> {
    if let Ok(v) = std::env::var("SINGTRACE_THREADS") {
        let n: usize = v
            .parse()
            .ok()
            .filter(|&n| n >= 1)
            .ok_or_else(|| Error::Argument(format!("SINGTRACE_THREADS must be a positive integer, got '{v}'")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Argument(e.to_string()))?;
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(e) if e.is_precondition() => 3,
        Some(Error::SolverDefect(_)) => 1,
        Some(_) => 2,
        None => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let outcome = configure_threads()
        .map_err(anyhow::Error::from)
        .and_then(|()| commands::run(cli.command));
    eprintln!("wall time: {:.3} s", started.elapsed().as_secs_f64());
    match outcome {
        Ok(record) => {
            print!("{}", output::render(&record.to_value()));
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
