use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod config;
mod output;
mod source;

use config::{CommonArgs, RunConfig};

#[derive(Debug, Parser)]
#[command(
    name = "lapprox",
    version,
    about = "Truncated Euler product approximations to completed L-functions"
)]
struct Cli {
    #[command(flatten)]
    common: CommonArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write the coefficient table a_1..a_nmax.
    Coeffs {
        #[arg(long)]
        nmax: usize,
    },
    /// Tabulate Z(t) and Z_N(t) on a grid.
    Zfunc {
        #[arg(long = "t-lo", default_value_t = 0.0)]
        t_lo: f64,
        #[arg(long = "t-hi", default_value_t = 30.0)]
        t_hi: f64,
        #[arg(long, default_value_t = 0.05)]
        step: f64,
        /// Comma-separated list of `full` and factor counts, e.g. full,1,2,3.
        #[arg(long, default_value = "full,1,2,3")]
        modes: String,
    },
    /// Locate zeros of Z and Z_N and compare them.
    Zeros {
        #[arg(long = "t-lo", default_value_t = 0.0)]
        t_lo: f64,
        #[arg(long = "t-hi", default_value_t = 30.0)]
        t_hi: f64,
        #[arg(long, default_value_t = 0.05)]
        step: f64,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long, default_value = "full,3")]
        modes: String,
        /// Largest distance at which two zeros are paired.
        #[arg(long, default_value_t = 0.5)]
        window: f64,
        /// Classify zero orders from derivatives up to this order.
        #[arg(long)]
        classify: Option<u32>,
        /// Also look for zeros without a sign change.
        #[arg(long = "probe-minima")]
        probe_minima: bool,
    },
    /// Compare the regularized construction of Λ_N with the series engine.
    OracleCheck {
        #[arg(long, default_value_t = 10)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Pole truncation height; chosen from the target error if absent.
        #[arg(long)]
        truncation: Option<f64>,
        /// Sample radius around s = k/2.
        #[arg(long, default_value_t = 5.0)]
        radius: f64,
        /// Compare against a zero error budget (self-test of the harness).
        #[arg(long = "zero-budget", hide = true)]
        zero_budget: bool,
    },
    /// Diophantine and discrepancy statistics of n log q / log p.
    Equidist {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = 100_000)]
        m: u64,
    },
    /// Download a coefficient table, check the Hecke relations and store it
    /// at --out or in the cache.
    Fetch {
        #[arg(long)]
        url: String,
        /// Keep only the first nmax coefficients.
        #[arg(long)]
        nmax: Option<usize>,
    },
}

/// Failure classes with stable exit codes.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numeric(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Numeric(m) => write!(f, "{m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<lapprox_core::Error> for CliError {
    fn from(e: lapprox_core::Error) -> Self {
        use lapprox_core::Error as E;
        match e {
            E::InvalidArgument(_) => CliError::Usage(e.to_string()),
            E::Io(m) => CliError::Io(m),
            E::Parse { .. } | E::Normalization(_) => CliError::Io(e.to_string()),
            other => CliError::Numeric(other.to_string()),
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = RunConfig::resolve(&cli.common)?;
    let hint =
        |e: CliError| match e {
            CliError::Numeric(m) if m.starts_with("precision") || m.starts_with("tolerance") => CliError::Numeric(
                format!("{m} (current --bits {}; try --bits {})", cfg.bits, 2 * cfg.bits),
            ),
            other => other,
        };
    match cli.command {
        Command::Coeffs { nmax } => commands::coeffs(&cfg, nmax),
        Command::Zfunc {
            t_lo,
            t_hi,
            step,
            modes,
        } => commands::zfunc(&cfg, t_lo, t_hi, step, &modes),
        Command::Zeros {
            t_lo,
            t_hi,
            step,
            tol,
            modes,
            window,
            classify,
            probe_minima,
        } => commands::zeros(
            &cfg,
            &commands::ZeroArgs {
                t_lo,
                t_hi,
                step,
                tol,
                modes,
                window,
                classify,
                probe_minima,
            },
        ),
        Command::OracleCheck {
            samples,
            seed,
            truncation,
            radius,
            zero_budget,
        } => commands::oracle_check(&cfg, samples, seed, truncation, radius, zero_budget),
        Command::Equidist { p, q, m } => commands::equidist(&cfg, p, q, m),
        Command::Fetch { url, nmax } => commands::fetch(&cfg, &url, nmax),
    }
    .map_err(hint)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("lapprox: {e}");
            ExitCode::from(e.code())
        }
    }
}
