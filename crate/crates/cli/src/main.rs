//! `riskcent`: risk-dependent centralities, SI epidemics, ranking interlacement,
//! ER experiments and the financial network pipelines from the command line.
//!
//! Exit codes: 0 success, 2 invalid input or arguments, 3 runtime budget
//! exceeded (time limit, iteration or resampling budget).

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::mpsc;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

#[derive(Debug)]
pub enum Failure {
    Input(String),
    Runtime(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Runtime(_) => 3,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Input(m) | Failure::Runtime(m) => f.write_str(m),
        }
    }
}

impl From<riskcent::Error> for Failure {
    fn from(e: riskcent::Error) -> Self {
        if e.is_input_error() {
            Failure::Input(e.to_string())
        } else {
            Failure::Runtime(e.to_string())
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "riskcent", version, about = "Risk-dependent centrality toolkit")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Output directory; nothing is written outside it.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Wall-clock limit in seconds; exceeding it exits with code 3.
    #[arg(long, global = true)]
    pub time_budget: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// R, C and T across a ζ grid, with rankings and rank volatility.
    Centrality(commands::CentralityArgs),
    /// SI trajectories from the exact ODE and its bounds.
    Epidemics(commands::EpidemicsArgs),
    /// Ranking interlacement points of node pairs.
    Interlace(commands::InterlaceArgs),
    /// Erdős–Rényi studies driven by a key = value config file.
    Experiments(commands::ExperimentsArgs),
    /// Rolling correlation windows, MSTs and rank volatility.
    Market(commands::MarketArgs),
    /// Board-interlock ΔRank and the SVC-trend discriminant.
    Corporate(commands::CorporateArgs),
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    let out = cli.global.out.clone();
    riskcent::exec::with_jobs(cli.global.jobs, move || match cli.command {
        Command::Centrality(a) => commands::centrality(&a, &out),
        Command::Epidemics(a) => commands::epidemics(&a, &out),
        Command::Interlace(a) => commands::interlace(&a, &out),
        Command::Experiments(a) => commands::experiments(&a, &out),
        Command::Market(a) => commands::market(&a, &out),
        Command::Corporate(a) => commands::corporate(&a, &out),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let budget = cli.global.time_budget;
    if let Some(b) = budget {
        if !(b.is_finite() && b > 0.0) {
            eprintln!("error: --time-budget must be a positive number of seconds");
            return ExitCode::from(2);
        }
    }
    let (tx, rx) = mpsc::channel();
    std::thread::spawn(move || {
        let _ = tx.send(dispatch(cli));
    });
    let result = match budget {
        Some(b) => match rx.recv_timeout(Duration::from_secs_f64(b)) {
            Ok(r) => r,
            Err(_) => Err(Failure::Runtime(format!(
                "time budget of {b} s exceeded; outputs may be incomplete"
            ))),
        },
        None => rx
            .recv()
            .unwrap_or_else(|_| Err(Failure::Runtime("worker thread panicked".into()))),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code())
        }
    }
}
