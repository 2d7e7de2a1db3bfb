use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use levyft_cli::commands;
use levyft_cli::config::{FileConfig, Overrides, RunConfig};

#[derive(Parser)]
#[command(name = "levyft", version, about = "Densities of symmetric Levy processes by Fourier methods")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve and write one CSV per (t, M).
    Solve(RunArgs),
    /// Error table over a range of grid sizes.
    Converge(RunArgs),
    /// Median wall-times per step over a range of grid sizes.
    Bench(RunArgs),
    /// Oracle checks at small sizes.
    Selftest {
        /// Offset added to the kernel table before checking it.
        #[arg(long, hide = true, default_value_t = 0.0)]
        perturb_kernel: f64,
    },
}

#[derive(Args, Clone)]
struct RunArgs {
    /// TOML file with `schema_version = 1` and any of the flag names below.
    #[arg(long)]
    config: Option<PathBuf>,
    /// vg, nig, or custom:gamma=<1|2>,mu=exp(<rate>)|gauss(<sigma>)
    #[arg(long)]
    model: Option<String>,
    /// Comma-separated times.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    t: Option<Vec<f64>>,
    /// Grid exponents i (M = 2^i): 11, 7..12 or 7,9,11.
    #[arg(long = "i-range")]
    i_range: Option<String>,
    #[arg(long)]
    xl: Option<f64>,
    #[arg(long)]
    xu: Option<f64>,
    /// Strip half-width for the inverse-transform step.
    #[arg(long)]
    d: Option<f64>,
    /// NUFFT window half-width.
    #[arg(long)]
    b: Option<f64>,
    /// NUFFT accuracy.
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Repetitions per size (bench).
    #[arg(long)]
    reps: Option<usize>,
}

impl RunArgs {
    fn resolve(self, default_range: &str, min_exponents: usize) -> Result<RunConfig> {
        let file = self.config.as_deref().map(FileConfig::load).transpose()?;
        let flags = Overrides {
            model: self.model,
            t: self.t,
            i_range: self.i_range,
            x_l: self.xl,
            x_u: self.xu,
            d: self.d,
            b: self.b,
            eps: self.eps,
            out: self.out,
            reps: self.reps,
        };
        Ok(RunConfig::resolve(file, flags, default_range, min_exponents)?)
    }
}

fn run(cli: Cli) -> Result<bool> {
    let written = match cli.command {
        Command::Solve(a) => commands::cmd_solve(&a.resolve("11", 1)?)?,
        Command::Converge(a) => commands::cmd_converge(&a.resolve("7..12", 3)?)?,
        Command::Bench(a) => commands::cmd_bench(&a.resolve("7..12", 1)?)?,
        Command::Selftest { perturb_kernel } => {
            let checks = commands::selftest(perturb_kernel)?;
            print!("{}", commands::format_checks(&checks));
            return Ok(checks.iter().all(|c| c.passed()));
        }
    };
    for path in written {
        println!("{}", path.display());
    }
    Ok(true)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
