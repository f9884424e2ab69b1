use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use tricode_cli::commands::{self, FssOptions, RunOptions, WORKERS_ENV};
use tricode_cli::fss::{parse_zeta, Observable};
use tricode_cli::{exit_code, ConfigError};

#[derive(Parser)]
#[command(name = "tricode", version = tricode_cli::VERSION, about = "Measurement-only toric-code circuits on the triangular lattice")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Line sweep: trajectories per (size, point) and an aggregate table.
    Run(RunArgs),
    /// Scan of the probability simplex with a long-format table.
    PhaseDiagram(RunArgs),
    /// Collapse fit of one aggregate column.
    Fss(FssArgs),
    /// Collapse fit with bootstrap errors over trajectory resamples.
    Bootstrap(BootstrapArgs),
    /// Observables against measurement steps for a single cell.
    Trace(TraceArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Experiment spec (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Results directory; overrides "out" in the spec.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, env = WORKERS_ENV)]
    workers: Option<usize>,
    /// Master seed; overrides the spec.
    #[arg(long)]
    seed: Option<u64>,
    /// Trajectories per cell; overrides the spec.
    #[arg(long)]
    traj: Option<usize>,
}

impl RunArgs {
    fn options(self) -> RunOptions {
        RunOptions { config: self.config, out: self.out, workers: self.workers, seed: self.seed, traj: self.traj }
    }
}

#[derive(Args)]
struct FitArgs {
    /// Aggregate CSV.
    input: PathBuf,
    #[arg(long, default_value = "tee_var")]
    observable: String,
    /// `free` or a fixed value; by default free for variances, 0 otherwise.
    #[arg(long)]
    zeta: Option<String>,
    /// Starting point `p_c,nu,zeta`.
    #[arg(long)]
    init: Option<String>,
    /// Report directory; defaults to the input's directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed of restarts and resampling.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl FitArgs {
    fn options(self, n_boot: Option<usize>) -> Result<FssOptions, ConfigError> {
        Ok(FssOptions {
            observable: self.observable.parse::<Observable>()?,
            zeta: self.zeta.as_deref().map(parse_zeta).transpose()?,
            init: self.init.as_deref().map(commands::parse_init).transpose()?,
            input: self.input,
            out: self.out,
            n_boot,
            seed: self.seed,
        })
    }
}

#[derive(Args)]
struct FssArgs {
    #[command(flatten)]
    fit: FitArgs,
    /// Bootstrap resamples, using the trajectory files next to the input.
    #[arg(long)]
    n_boot: Option<usize>,
}

#[derive(Args)]
struct BootstrapArgs {
    #[command(flatten)]
    fit: FitArgs,
    #[arg(long, default_value_t = 1000)]
    n_boot: usize,
}

#[derive(Args)]
struct TraceArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Total measurement steps; defaults to burn-in plus recording window.
    #[arg(long)]
    steps: Option<usize>,
}

fn print_report(r: &tricode_cli::fss::FssReport) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(r)?);
    Ok(())
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(a) => println!("{}", commands::run(&a.options())?.display()),
        Command::PhaseDiagram(a) => println!("{}", commands::phase_diagram(&a.options())?.display()),
        Command::Fss(a) => print_report(&commands::fss(&a.fit.options(a.n_boot)?)?)?,
        Command::Bootstrap(a) => print_report(&commands::fss(&a.fit.options(Some(a.n_boot))?)?)?,
        Command::Trace(a) => println!("{}", commands::trace(&a.run.options(), a.steps)?.display()),
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { tricode_cli::EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
