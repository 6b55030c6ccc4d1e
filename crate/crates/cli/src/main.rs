//! `bergman-hs`: reproducible batch runs of the Bergman-norm and Hankel diagnostics.

mod artifact;
mod commands;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};

use crate::artifact::{render, Format, Header};
use crate::commands::{
    CliError, DbarArgs, DirichletArgs, DivergenceArgs, HsNormArgs, NormsArgs, RatioArgs, ReportArgs, SeriesArgs,
    ValidateArgs,
};

/// Environment variable naming the on-disk cache of log-norms used by `norms`.
pub const CACHE_ENV: &str = "BERGMAN_HS_CACHE";

#[derive(Debug, Parser)]
#[command(
    name = "bergman-hs",
    version,
    about = "Monomial Bergman norms and Hankel Hilbert–Schmidt diagnostics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format [default: table for validate/report, csv otherwise].
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Write the artifact here instead of standard output.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    /// Cap on worker threads; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Omit the generation timestamp and wall-clock timings, making output byte-reproducible.
    #[arg(long = "no-timestamp", global = true)]
    no_timestamp: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Closed-form log c_γ², optionally audited by an oracle.
    Norms(NormsArgs),
    /// The ratio c_{γ+α}²/c_γ² and the Hankel row norm.
    Ratio(RatioArgs),
    /// Truncations S_α(N) of the Hilbert–Schmidt series.
    SAlpha(SeriesArgs),
    /// The diagonal lower bound of S_α(N).
    Diagonal(SeriesArgs),
    /// Truncated ‖H_f̄‖²_HS for a polynomial symbol read from a file.
    HsNorm(HsNormArgs),
    /// Fits linear growth to a truncation trace and classifies it.
    Divergence(DivergenceArgs),
    /// Disc check that ‖H_f̄‖²_HS equals the Dirichlet integral of f.
    DiscDirichlet(DirichletArgs),
    /// Per-direction Hilbert–Schmidt diagnostics of the canonical ∂̄-solution operator.
    Dbar(DbarArgs),
    /// Cross-checks closed forms against quadrature, Monte Carlo and the Gram oracle.
    Validate(ValidateArgs),
    /// Runs the acceptance criteria at desk scale.
    Report(ReportArgs),
}

fn run(cli: Cli) -> Result<bool, CliError> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(CliError::usage("--threads", "must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::usage("--threads", e.to_string()))?;
    }
    let (name, default_format) = match &cli.command {
        Command::Norms(_) => ("norms", Format::Csv),
        Command::Ratio(_) => ("ratio", Format::Csv),
        Command::SAlpha(_) => ("s-alpha", Format::Csv),
        Command::Diagonal(_) => ("diagonal", Format::Csv),
        Command::HsNorm(_) => ("hs-norm", Format::Csv),
        Command::Divergence(_) => ("divergence", Format::Csv),
        Command::DiscDirichlet(_) => ("disc-dirichlet", Format::Csv),
        Command::Dbar(_) => ("dbar", Format::Csv),
        Command::Validate(_) => ("validate", Format::Table),
        Command::Report(_) => ("report", Format::Table),
    };
    let format = cli.format.unwrap_or(default_format);
    let timings = !cli.no_timestamp;

    let (mut config, artifact) = match &cli.command {
        Command::Norms(a) => commands::norms(a, std::env::var_os(CACHE_ENV).map(PathBuf::from))?,
        Command::Ratio(a) => commands::ratio(a)?,
        Command::SAlpha(a) => commands::series(a, bergman_hs::series::SeriesKind::PartialSum)?,
        Command::Diagonal(a) => commands::series(a, bergman_hs::series::SeriesKind::DiagonalSum)?,
        Command::HsNorm(a) => commands::hs_norm(a)?,
        Command::Divergence(a) => commands::divergence(a)?,
        Command::DiscDirichlet(a) => commands::disc_dirichlet(a)?,
        Command::Dbar(a) => commands::dbar(a)?,
        Command::Validate(a) => commands::validate(a)?,
        Command::Report(a) => commands::report(a, timings)?,
    };
    config.push(("format", format.name().to_string()));
    config.push((
        "output",
        cli.output
            .as_ref()
            .map_or("stdout".to_string(), |p| p.display().to_string()),
    ));

    let generated_at = timings.then(|| {
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0)
    });
    let header = Header {
        command: name,
        config: &config,
        generated_at,
    };
    let text = render(format, &header, &artifact);
    match &cli.output {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| CliError::usage("--output", format!("{}: {e}", path.display())))?
        }
        None => {
            let mut out = std::io::stdout().lock();
            // A closed pipe (e.g. `| head`) is not an error worth reporting.
            let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
        }
    }
    Ok(artifact.passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("bergman-hs: one or more checks failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("bergman-hs: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
