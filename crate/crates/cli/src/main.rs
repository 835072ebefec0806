//! `jets`: generate, transform, canonicalize and decompose jet data, and run
//! the randomized verification suites.
//!
//! Exit codes: 0 success, 1 verification failure, 2 input or configuration
//! error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;

use commands::CliError;

#[derive(Parser, Debug)]
#[command(
    name = "jets",
    version,
    about = "Double velocities, principal jet groups and double contact elements"
)]
struct Cli {
    #[command(flatten)]
    global: Global,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Comparison tolerance (combined absolute/relative).
    #[arg(long, global = true, default_value_t = jets_core::DEFAULT_TOL)]
    pub tol: f64,

    /// Pretty-print JSON output.
    #[arg(long, global = true)]
    pub pretty: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Emit random values with integer coordinates in [-5, 5].
    Gen {
        /// velocity | double | group | principal | semiholonomic | holonomic | vertical
        #[arg(long)]
        kind: String,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: usize,
    },
    /// Act on every input value with a group element from the right.
    Act {
        /// File holding a JetGroupElement (for velocities) or a
        /// PrincipalJetElement (for double velocities).
        #[arg(long, short = 'e')]
        element: PathBuf,
        /// Input stream; `-` reads standard input.
        #[arg(default_value = "-")]
        input: PathBuf,
    },
    /// Multiply group elements left to right.
    Compose {
        /// Files holding the factors, or `-` for one stream of factors.
        #[arg(default_value = "-")]
        inputs: Vec<PathBuf>,
        /// Emit the inverse of the product.
        #[arg(long)]
        invert: bool,
    },
    /// Swap the two factors of double velocities and principal elements.
    Exchange {
        #[arg(default_value = "-")]
        input: PathBuf,
    },
    /// Canonical (double) contact element or quotient vector of each input.
    Canon {
        #[arg(default_value = "-")]
        input: PathBuf,
    },
    /// Split semiholonomic inputs into holonomic and curvature parts.
    Decompose {
        #[arg(default_value = "-")]
        input: PathBuf,
        /// Re-add the parts and fail (exit 1) unless they reproduce the input.
        #[arg(long)]
        check: bool,
    },
    /// Run a randomized property suite and print a JSON report.
    Verify {
        /// group-axioms | exchange | action | freeness | subgroup-char |
        /// quotient-invariance | decomposition | oracle-equivalence | all
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long)]
        m: usize,
        /// Defaults to m + 2.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, hide = true)]
        inject_fault: Option<String>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let g = &cli.global;
    if !(g.tol.is_finite() && g.tol > 0.0) {
        return Err(CliError::input(format!(
            "--tol must be positive and finite, got {}",
            g.tol
        )));
    }
    match cli.command {
        Command::Gen {
            kind,
            m,
            n,
            seed,
            count,
        } => commands::gen(g, &kind, m, n.unwrap_or(m + 2), seed, count),
        Command::Act { element, input } => commands::act(g, &element, &input),
        Command::Compose { inputs, invert } => commands::compose(g, &inputs, invert),
        Command::Exchange { input } => commands::exchange(g, &input),
        Command::Canon { input } => commands::canon(g, &input),
        Command::Decompose { input, check } => commands::decompose(g, &input, check),
        Command::Verify {
            suite,
            m,
            n,
            trials,
            seed,
            inject_fault,
        } => commands::verify(g, &suite, m, n.unwrap_or(m + 2), trials, seed, inject_fault.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("jets: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
