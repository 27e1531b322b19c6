//! `vck`: batch front end for thickness, τ, the separable-bound norm,
//! step approximation and matrix-distribution sampling.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 validation failure,
//! 3 failed certificate check. Errors print one line to stderr.

mod analysis;
mod approx;
mod error;
mod gen;
mod input;
mod report;
mod sample;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use error::{CliError, CliResult};
use report::Report;

#[derive(Debug, Parser)]
#[command(name = "vck", version, about = "Thickness, tau-metric and separable-bound norms of kernels on finite grids")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Global {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Print the JSON report instead of `key = value` lines.
    #[arg(long, global = true)]
    pub json: bool,
    /// Artifact destination; commands without an artifact write the report.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Row weights, one per line (default uniform).
    #[arg(long, global = true)]
    pub weights_x: Option<PathBuf>,
    /// Column weights, one per line (default uniform).
    #[arg(long, global = true)]
    pub weights_y: Option<PathBuf>,
    /// Skip the first line of matrix CSV inputs.
    #[arg(long, global = true)]
    pub header: bool,
    /// Report runtimeMs as 0 so that reruns are byte-identical.
    #[arg(long, global = true)]
    pub no_timing: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a kernel, cell set, plan or weight vector.
    Gen(gen::GenArgs),
    /// Thickness of a cell set with its cover and plan certificates.
    Thickness(analysis::ThicknessArgs),
    /// Exact τ distance between two kernels.
    Tau(analysis::TauArgs),
    /// Separable-bound norm with primal and dual witnesses.
    Norm(analysis::NormArgs),
    /// Dual norm of a (signed) plan.
    MeNorm(analysis::MeNormArgs),
    /// Integral of a kernel against a named or file plan.
    Trace(analysis::TraceArgs),
    /// Best step function with bounded block counts.
    FitStep(approx::FitStepArgs),
    /// τ defect against step functions for increasing block counts.
    Defect(approx::DefectArgs),
    /// Truncated weighted singular decomposition.
    RankFit(approx::RankFitArgs),
    /// ε-net evidence for total boundedness of the row family.
    Compactness(approx::CompactnessArgs),
    /// Defect profiles across grid resolutions with a hedged verdict.
    Classify(approx::ClassifyArgs),
    /// Empirical matrix distribution.
    SampleMd(sample::SampleMdArgs),
    /// Energy-distance comparison of two matrix samples.
    CompareMd(sample::CompareMdArgs),
    /// Finite-sample random-points criterion.
    RandomPoints(sample::RandomPointsArgs),
    /// Pairing of a metric on the square with the vertical-line plan.
    RestrictMetric(analysis::RestrictMetricArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Gen(_) => "gen",
            Command::Thickness(_) => "thickness",
            Command::Tau(_) => "tau",
            Command::Norm(_) => "norm",
            Command::MeNorm(_) => "me-norm",
            Command::Trace(_) => "trace",
            Command::FitStep(_) => "fit-step",
            Command::Defect(_) => "defect",
            Command::RankFit(_) => "rank-fit",
            Command::Compactness(_) => "compactness",
            Command::Classify(_) => "classify",
            Command::SampleMd(_) => "sample-md",
            Command::CompareMd(_) => "compare-md",
            Command::RandomPoints(_) => "random-points",
            Command::RestrictMetric(_) => "restrict-metric",
        }
    }
}

/// What a command leaves besides its report.
#[derive(Default)]
pub struct Output {
    pub artifact: Option<Vec<u8>>,
    /// Print the artifact when there is no `--out` and no `--json`.
    pub print_artifact: bool,
}

fn dispatch(cmd: &Command, g: &Global, r: &mut Report) -> CliResult<Output> {
    match cmd {
        Command::Gen(a) => gen::run(a, g, r),
        Command::Thickness(a) => analysis::thickness(a, g, r),
        Command::Tau(a) => analysis::tau(a, g, r),
        Command::Norm(a) => analysis::norm(a, g, r),
        Command::MeNorm(a) => analysis::me_norm(a, g, r),
        Command::Trace(a) => analysis::trace(a, g, r),
        Command::FitStep(a) => approx::fit_step(a, g, r),
        Command::Defect(a) => approx::defect(a, g, r),
        Command::RankFit(a) => approx::rank_fit(a, g, r),
        Command::Compactness(a) => approx::compactness(a, g, r),
        Command::Classify(a) => approx::classify(a, g, r),
        Command::SampleMd(a) => sample::sample_md(a, g, r),
        Command::CompareMd(a) => sample::compare_md(a, g, r),
        Command::RandomPoints(a) => sample::random_points(a, g, r),
        Command::RestrictMetric(a) => analysis::restrict_metric(a, g, r),
    }
}

fn run(cli: Cli) -> CliResult<()> {
    let g = &cli.global;
    let mut report = Report::new(cli.command.name(), g.seed);
    let start = Instant::now();
    let out = dispatch(&cli.command, g, &mut report)?;
    report.runtime_ms = if g.no_timing {
        0
    } else {
        start.elapsed().as_millis() as u64
    };
    let json = serde_json::to_string_pretty(&report)
        .map_err(|e| CliError::new(error::Kind::Io, e.to_string()))?;
    let mut stdout = std::io::stdout().lock();
    match (&g.out, out.artifact) {
        (Some(path), Some(bytes)) => input::write_artifact(path, &bytes)?,
        (Some(path), None) => input::write_artifact(path, format!("{json}\n").as_bytes())?,
        (None, Some(bytes)) if out.print_artifact && !g.json => {
            stdout.write_all(&bytes)?;
            return Ok(());
        }
        _ => {}
    }
    if g.json {
        writeln!(stdout, "{json}")?;
    } else {
        write!(stdout, "{}", report.human())?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let body = text.split("\n\nUsage").next().unwrap_or("");
            let line = body.split_whitespace().collect::<Vec<_>>().join(" ");
            eprintln!("{}", CliError::usage(line.trim_start_matches("error: ")));
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        // output piped into a reader that stopped early
        Err(e) if e.kind == error::Kind::Io && e.message.contains("Broken pipe") => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
