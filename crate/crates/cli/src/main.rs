//! `qprior`: quantum-probability priors, symmetry reduction and PLS from the
//! command line. Results go to stdout, diagnostics to stderr.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qprior::{Error, ErrorKind};
use report::Report;

#[derive(Parser, Debug)]
#[command(name = "qprior", version, about)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,

    /// Relative eigenvalue gap below which eigenvalues are merged.
    #[arg(long, global = true)]
    degen_rel: Option<f64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Quantum and Bayesian priors for the two-contrast treatment example.
    DemoContrast {
        /// Monte Carlo draws.
        #[arg(long, default_value_t = 10_000_000)]
        n: u64,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// JSON file with `cov`, `n` and `seed`; overrides the flags.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Trace-rule prior probabilities for sets of a complementary parameter.
    Prior {
        /// Grid prior config (JSON).
        config: PathBuf,
    },
    /// Partial least squares on a CSV table.
    Pls(commands::PlsArgs),
    /// PLS on a perceptron's linearized response.
    Perceptron(commands::PerceptronArgs),
    /// Orbits and permissibility for a finite group action.
    Symmetry {
        /// Group action (JSON).
        action: PathBuf,
        /// List orbits, transitivity and the invariant measure.
        #[arg(long)]
        orbits: bool,
        /// Parameter function (JSON) to test for permissibility.
        #[arg(long, value_name = "ZETA")]
        permissible: Option<PathBuf>,
    },
    /// Born-rule probabilities of an observable in a given state.
    Born(commands::BornArgs),
}

fn configure_threads() -> Result<(), Error> {
    let Ok(raw) = std::env::var("QPRIOR_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::config(format!("QPRIOR_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::config(format!("QPRIOR_THREADS: {e}")))
}

fn run(cli: Cli) -> Result<String, Error> {
    configure_threads()?;
    if let Some(t) = cli.degen_rel {
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::config(format!("--degen-rel must be a non-negative number, got {t}")));
        }
    }
    let format = cli.format;
    match cli.command {
        Command::DemoContrast { n, seed, config } => {
            commands::demo_contrast(n, seed, config.as_deref())?.render(format)
        }
        Command::Prior { config } => commands::prior(&config)?.render(format),
        Command::Pls(args) => commands::pls(&args)?.render(format),
        Command::Perceptron(args) => commands::perceptron(&args)?.render(format),
        Command::Symmetry {
            action,
            orbits,
            permissible,
        } => commands::symmetry(&action, orbits, permissible.as_deref())?.render(format),
        Command::Born(args) => commands::born(&args, cli.degen_rel)?.render(format),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            let label = match e.kind {
                ErrorKind::Config => "config error",
                ErrorKind::Data => "data error",
                ErrorKind::Numeric => "numeric error",
            };
            eprintln!("qprior: {label}: {}", e.message);
            ExitCode::from(e.kind.exit_code() as u8)
        }
    }
}
