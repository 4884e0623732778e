//! `expsamp`: kernel checks, operator evaluations and verification suites for
//! exponential sampling series.

mod commands;
mod config;
mod error;
mod output;
mod registry;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{Command, Format, RunConfig};
use error::CliError;
use registry::Registry;

#[derive(Parser)]
#[command(name = "expsamp", version, about = "Exponential sampling experiments")]
struct Cli {
    /// JSON file with kernel and function aliases.
    #[arg(long, global = true)]
    registry: Option<PathBuf>,

    /// Directory for artifacts when --out is relative or absent.
    #[arg(long, global = true, env = "EXPSAMP_OUT_DIR")]
    out_dir: Option<PathBuf>,

    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// List kernels and test functions.
    List,
    /// Check the kernel moment conditions.
    KernelCheck(RunArgs),
    /// Absolute moments of a kernel as a table.
    Moments(RunArgs),
    /// Evaluate an operator on a log grid.
    Reconstruct(RunArgs),
    /// Weighted errors of the max-product series over increasing rates.
    Converge(RunArgs),
    /// Check the quantitative rate bound.
    Rate(RunArgs),
    /// Check the asymptotic expansion.
    Voronovskaja(RunArgs),
    /// Run every verification check for a kernel.
    Suite(RunArgs),
    /// Rerun from a JSON config (or an artifact that embeds one).
    Run {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, default_value = "bspline3")]
    kernel: String,
    #[arg(long, default_value = "weight")]
    function: String,
    /// Functions for rate and suite, comma separated.
    #[arg(long, value_delimiter = ',')]
    functions: Vec<String>,
    /// Sampling rates, comma separated.
    #[arg(long, value_delimiter = ',')]
    w: Vec<f64>,
    /// Interval `a,b` in x for the bounded-domain operator.
    #[arg(long)]
    interval: Option<String>,
    /// Index window half-width around `w log x`.
    #[arg(long)]
    window: Option<u32>,
    /// Log-domain grid `logmin:logmax:points`.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    /// Operator: S, I, MG or E.
    #[arg(long, default_value = "MG")]
    op: String,
    /// Parameter c of the classical formula E.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    c: f64,
    /// Gauss-Legendre points per cell for I.
    #[arg(long, default_value_t = 8)]
    quadrature: usize,
    #[arg(long, default_value_t = 5.0)]
    mu: f64,
    #[arg(long, default_value_t = 1)]
    r: u32,
    /// Refuse the expansion check when the algebraic moments vary with u.
    #[arg(long)]
    strict: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum)]
    format: Option<Format>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl RunArgs {
    fn into_config(self, command: Command) -> Result<RunConfig, CliError> {
        let interval = self.interval.map(|s| parse_interval(&s)).transpose()?;
        Ok(RunConfig {
            kernel: self.kernel,
            function: self.function,
            functions: self.functions,
            w: self.w,
            interval,
            window: self.window,
            grid: self.grid,
            op: self.op,
            c: self.c,
            quadrature: self.quadrature,
            mu: self.mu,
            r: self.r,
            strict: self.strict,
            format: self.format,
            seed: self.seed,
            output: self.out,
            ..RunConfig::new(command)
        })
    }
}

fn parse_interval(s: &str) -> Result<(f64, f64), CliError> {
    let bad = || CliError::Usage(format!("interval must be `a,b`, got `{s}`"));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn load_config(path: &PathBuf) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let invalid = |e: serde_json::Error| CliError::Usage(format!("{}: {e}", path.display()));
    let mut value: serde_json::Value = serde_json::from_str(&text).map_err(invalid)?;
    if let Some(embedded) = value.get_mut("config") {
        value = embedded.take();
    }
    serde_json::from_value(value).map_err(invalid)
}

fn execute(cli: Cli) -> Result<i32, CliError> {
    let (config, registry_path) = match cli.command {
        Sub::List => {
            let registry = Registry::load(cli.registry.as_deref())?;
            print!("{}", registry.listing());
            return Ok(0);
        }
        Sub::Run { config, out } => {
            let mut config = load_config(&config)?;
            if out.is_some() {
                config.output = out;
            }
            let registry = cli.registry.or_else(|| config.registry.clone());
            (config, registry)
        }
        Sub::KernelCheck(a) => (a.into_config(Command::KernelCheck)?, cli.registry),
        Sub::Moments(a) => (a.into_config(Command::Moments)?, cli.registry),
        Sub::Reconstruct(a) => (a.into_config(Command::Reconstruct)?, cli.registry),
        Sub::Converge(a) => (a.into_config(Command::Converge)?, cli.registry),
        Sub::Rate(a) => (a.into_config(Command::Rate)?, cli.registry),
        Sub::Voronovskaja(a) => (a.into_config(Command::Voronovskaja)?, cli.registry),
        Sub::Suite(a) => (a.into_config(Command::Suite)?, cli.registry),
    };
    let registry = Registry::load(registry_path.as_deref())?;
    let config = config.resolve(&registry)?;
    let outcome = commands::run(&config, &registry)?;
    let bytes = outcome.artifact.render(&config)?;

    let mut summary = outcome.artifact.lines.clone();
    for check in &outcome.artifact.checks {
        summary.push(output::summary_line(check));
    }
    summary.extend(outcome.artifact.footer.iter().cloned());
    match output::target_path(&config, cli.out_dir.as_deref()) {
        Some(path) => {
            output::write_atomic(&path, &bytes)?;
            let mut stdout = std::io::stdout().lock();
            for line in &summary {
                let _ = writeln!(stdout, "{line}");
            }
            let _ = writeln!(stdout, "wrote {}", path.display());
        }
        None => {
            std::io::stdout()
                .lock()
                .write_all(&bytes)
                .map_err(|e| CliError::io("standard output", e))?;
            for line in &summary {
                eprintln!("{line}");
            }
        }
    }
    Ok(outcome.status)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("expsamp: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
