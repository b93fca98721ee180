use std::path::PathBuf;
use std::process::ExitCode;

use biased_evidence::verify::Suite;
use clap::{Parser, Subcommand, ValueEnum};

mod commands;
mod error;
mod output;
mod scenario;

use commands::SweepWho;
use error::CliError;

/// Evidence acquisition under biased beliefs and preferences.
#[derive(Debug, Parser)]
#[command(name = "biased-evidence", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum WhoArg {
    #[value(name = "L")]
    L,
    #[value(name = "DM")]
    Dm,
    #[value(name = "preference")]
    Preference,
}

impl From<WhoArg> for SweepWho {
    fn from(w: WhoArg) -> Self {
        match w {
            WhoArg::L => SweepWho::L,
            WhoArg::Dm => SweepWho::DM,
            WhoArg::Preference => SweepWho::Preference,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the static problem of a scenario and print it as JSON.
    Solve { scenario: PathBuf },
    /// Sweep the bias parameter over a grid and write CSV.
    Sweep {
        scenario: PathBuf,
        #[arg(long, value_enum)]
        who: Option<WhoArg>,
        /// start:stop:step, inclusive of stop.
        #[arg(long)]
        grid: String,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Add rows on both sides of each regime change.
        #[arg(long)]
        boundaries: bool,
    },
    /// Run the numerical checks of the model's claims.
    Verify {
        #[arg(long, default_value = "all", value_parser = parse_suite)]
        suite: SuiteArg,
        #[arg(long)]
        quick: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write value functions and their concave envelopes as CSV.
    Figure {
        scenario: Option<PathBuf>,
        #[arg(long, conflicts_with = "scenario")]
        case: Option<u8>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Monte Carlo of the dynamic stopping rule.
    Simulate {
        scenario: PathBuf,
        #[arg(long)]
        paths_csv: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy)]
struct SuiteArg(Option<Suite>);

fn parse_suite(s: &str) -> Result<SuiteArg, String> {
    if s == "all" {
        return Ok(SuiteArg(None));
    }
    s.parse::<Suite>().map(|x| SuiteArg(Some(x))).map_err(|_| {
        let names: Vec<&str> = Suite::ALL.iter().map(|s| s.name()).collect();
        format!("unknown suite `{s}`; expected all or one of {}", names.join(", "))
    })
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("BE_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Input(format!("BE_THREADS = `{raw}` is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Input(format!("cannot configure thread pool: {e}")))
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    match cli.command {
        Command::Solve { scenario } => commands::solve(&scenario),
        Command::Sweep { scenario, who, grid, out, boundaries } => {
            commands::sweep(&scenario, who.map(Into::into), &grid, out.as_deref(), boundaries)
        }
        Command::Verify { suite, quick, out } => commands::verify(suite.0, quick, out.as_deref()),
        Command::Figure { scenario, case, out } => commands::figure(scenario.as_deref(), case, &out),
        Command::Simulate { scenario, paths_csv } => {
            commands::simulate(&scenario, paths_csv.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
