use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use conformal_lab::commands::{self, CliError, DEFAULT_SEED};
use conformal_lab::report::Report;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Parser)]
#[command(
    name = "conformal-lab",
    about = "Exact checks and solvers for finite-rank Hom-Lie conformal algebras",
    version
)]
struct Cli {
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    /// Degree bound for solver slices
    #[arg(long, global = true, default_value_t = 2)]
    degree_bound: u32,

    /// Seed for reproducible randomized searches
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the Hom-Lie conformal algebra axioms of a definition file
    Validate { algebra: PathBuf },
    /// Check the module axioms for a module over the algebra
    CheckModule {
        #[arg(long)]
        algebra: PathBuf,
        /// adjoint, alpha^S, or file
        #[arg(long, default_value = "adjoint")]
        module: String,
    },
    /// Build the semidirect sum with a module and re-check the axioms
    Semidirect {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long, default_value = "adjoint")]
        module: String,
    },
    /// Degree-truncated cohomology dimensions and differential identities
    Cohomology {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long, default_value = "adjoint")]
        module: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        reduced: bool,
    },
    /// Solve the alpha^k-derivation slice
    Derive {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long, default_value_t = 0)]
        k: usize,
        /// Also verify commutators of solved derivations
        #[arg(long)]
        check_closure: bool,
    },
    /// Seeded search for Hom-Nijenhuis operators
    Nijenhuis {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long, default_value_t = 200)]
        attempts: usize,
    },
    /// Run the deformation pipeline for an antilinear endo-map
    Deform {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long)]
        endo: PathBuf,
    },
    /// Solve generalized-derivation spaces and their structure theorems
    Gder {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long, default_value_t = 0)]
        k: usize,
        /// Split each generalized derivation into quasi parts
        #[arg(long)]
        decompose: bool,
        /// Verify commutator closure of the solved spaces
        #[arg(long)]
        closures: bool,
        /// Verify the centroid/quasicentroid center theorems
        #[arg(long)]
        center_checks: bool,
    },
    /// Build the t-truncated extension and embed quasiderivations into it
    Breve {
        #[arg(long)]
        algebra: PathBuf,
        /// A linear endo-map to embed instead of the solved slice
        #[arg(long)]
        phi: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        k: usize,
    },
}

fn run(cli: &Cli) -> Result<Report, CliError> {
    let bound = cli.degree_bound;
    let seed = cli.seed;
    match &cli.command {
        Command::Validate { algebra } => commands::cmd_validate(algebra, seed),
        Command::CheckModule { algebra, module } => {
            commands::cmd_check_module(algebra, module, seed)
        }
        Command::Semidirect { algebra, module } => {
            commands::cmd_semidirect(algebra, module, seed)
        }
        Command::Cohomology {
            algebra,
            module,
            n,
            reduced,
        } => commands::cmd_cohomology(algebra, module, *n, bound, *reduced, seed),
        Command::Derive {
            algebra,
            k,
            check_closure,
        } => commands::cmd_derive(algebra, *k, bound, *check_closure, seed),
        Command::Nijenhuis { algebra, attempts } => {
            commands::cmd_nijenhuis(algebra, bound, *attempts, seed)
        }
        Command::Deform { algebra, endo } => commands::cmd_deform(algebra, endo, seed),
        Command::Gder {
            algebra,
            k,
            decompose,
            closures,
            center_checks,
        } => commands::cmd_gder(
            algebra,
            *k,
            bound,
            *decompose,
            *closures,
            *center_checks,
            seed,
        ),
        Command::Breve { algebra, phi, k } => {
            commands::cmd_breve(algebra, phi.as_deref(), *k, bound, seed)
        }
    }
}

fn main() -> ExitCode {
    // parallelism cap; all commands currently run single-threaded, which
    // trivially respects any cap, but reject malformed values up front
    if let Ok(v) = std::env::var("CONFORMAL_LAB_THREADS") {
        if v.parse::<usize>().map(|n| n == 0).unwrap_or(true) {
            eprintln!("error: CONFORMAL_LAB_THREADS must be a positive integer");
            return ExitCode::from(2);
        }
    }
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            match cli.format {
                Format::Json => print!("{}", report.to_json()),
                Format::Text => print!("{}", report.to_text()),
            }
            if report.all_pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
