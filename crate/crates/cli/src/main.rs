//! `nplattice`: run NP-code simulations from a JSON config.
//!
//! Exit codes: 0 success, 1 validation failure, 2 config error, 3 numerical
//! failure.

mod validate;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use nplattice::config::RunConfig;
use nplattice::report::{
    codes_report, fidelity_rows, lattice_rows, repeater_rows, wigner_rows, write_csv, Cell, FIDELITY_COLUMNS,
    LATTICE_COLUMNS, REPEATER_COLUMNS, WIGNER_COLUMNS,
};
use nplattice::Error;

#[derive(Parser, Debug)]
#[command(name = "nplattice", version, about = "Number-phase lattice code simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output file (stdout when omitted); `validate --level full` treats it as a directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Seed for randomized searches and checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Code metrics, syndrome format and Fock amplitudes as JSON.
    Codes,
    /// Lattice points in number-phase space as CSV.
    Lattice,
    /// Quadrature Wigner functions of the logical states as CSV.
    Wigner {
        /// Samples per axis.
        #[arg(long, default_value_t = 121)]
        points: usize,
    },
    /// Channel fidelity of one correction cycle per sweep point and noise level.
    Fidelity,
    /// Repeater rates, accumulation rate and key rate per spacing and distance.
    Repeater,
    /// Run the invariant suites.
    Validate {
        #[arg(long, value_enum, default_value_t = validate::Level::Quick)]
        level: validate::Level,
        #[arg(long, value_enum, hide = true)]
        inject_fault: Option<validate::Fault>,
    },
}

/// Failure mapped onto the process exit code.
enum Failure {
    Validation,
    Config(String),
    Numerical(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::InvalidParameter(_) | Error::Window { .. } => Failure::Config(e.to_string()),
            other => Failure::Numerical(other.to_string()),
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<RunConfig, Failure> {
    let path = path.ok_or_else(|| Failure::Config("this command needs --config".into()))?;
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
    RunConfig::from_json(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn sink(out: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Failure::Numerical(format!("{}: {e}", p.display())))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit(cli: &Cli, cfg: &RunConfig, columns: &[&str], rows: Vec<nplattice::Result<Vec<Cell>>>) -> Result<(), Failure> {
    write_csv(sink(cli.out.as_deref())?, cfg, cli.seed, columns, rows)?;
    Ok(())
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Validate { level, inject_fault } => {
            let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("validate_artifacts"));
            let checks = validate::run(*level, *inject_fault, cli.seed, &dir);
            let mut failed = false;
            for c in &checks {
                if c.passed {
                    println!("PASS {}: {}", c.name, c.detail);
                } else {
                    failed = true;
                    println!("FAIL {}: {}", c.name, c.detail);
                }
            }
            if failed {
                return Err(Failure::Validation);
            }
            Ok(())
        }
        command => {
            // the whole config is checked before any output file is touched
            let cfg = load_config(cli.config.as_deref())?;
            match command {
                Command::Codes => {
                    let report = codes_report(&cfg)?;
                    let mut w = sink(cli.out.as_deref())?;
                    let text = serde_json::to_string_pretty(&report).expect("report serializes");
                    writeln!(w, "{text}").and_then(|_| w.flush()).map_err(|e| Failure::Numerical(e.to_string()))?;
                    Ok(())
                }
                Command::Lattice => emit(cli, &cfg, LATTICE_COLUMNS, lattice_rows(&cfg)?),
                Command::Wigner { points } => emit(cli, &cfg, WIGNER_COLUMNS, wigner_rows(&cfg, *points)?),
                Command::Fidelity => emit(cli, &cfg, FIDELITY_COLUMNS, fidelity_rows(&cfg, cli.seed)?),
                Command::Repeater => {
                    if cfg.repeater.is_none() {
                        return Err(Failure::Config("repeater command needs a repeater block".into()));
                    }
                    emit(cli, &cfg, REPEATER_COLUMNS, repeater_rows(&cfg, cli.seed)?)
                }
                Command::Validate { .. } => unreachable!(),
            }
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be >= 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(3);
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation) => ExitCode::from(1),
        Err(Failure::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
