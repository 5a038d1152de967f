use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use padic_dynamics::cli::{self, CliError, Command, OutputFormat, Overrides, Request};

/// Exact dynamics of f(x) = (x² + ax + b)/(x + c) on the p-adic numbers.
#[derive(Parser)]
#[command(name = "padic-dyn", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Full report: profile, invariant spheres, minimal balls, ergodicity, checks.
    Analyze(Common),
    /// Orbit table with distances to the fixed point.
    Orbit {
        #[command(flatten)]
        common: Common,
        /// Starting point, as "num/den" or an integer.
        #[arg(long, allow_hyphen_values = true)]
        start: String,
        #[arg(long, default_value_t = 10)]
        steps: usize,
    },
    /// Ergodicity verdicts with transitivity evidence.
    Ergodicity(Common),
    /// Run every property suite and fail if any case fails.
    Verify(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    max_level: Option<u32>,
    #[arg(long)]
    orbit_cap: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

fn main() -> ExitCode {
    let (command, common) = match Cli::parse().command {
        Cmd::Analyze(c) => (Command::Analyze, c),
        Cmd::Orbit { common, start, steps } => (Command::Orbit { start, steps }, common),
        Cmd::Ergodicity(c) => (Command::Ergodicity, c),
        Cmd::Verify(c) => (Command::Verify, c),
    };
    let format = match common.format {
        Format::Text => OutputFormat::Text,
        Format::Json => OutputFormat::Json,
    };
    let mut req = Request::new(command, &common.config, format);
    req.overrides = Overrides { seed: common.seed, max_level: common.max_level, orbit_cap: common.orbit_cap };

    let result = cli::execute(&req).and_then(|outcome| {
        match &common.out {
            Some(path) => std::fs::write(path, &outcome.output)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?,
            None => print!("{}", outcome.output),
        }
        Ok(outcome)
    });
    match result {
        Ok(outcome) => {
            if outcome.disagreement {
                eprintln!("error: theory and oracle disagree; see report");
            }
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
