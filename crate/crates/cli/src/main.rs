use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use secexp::ntype::DEFAULT_ENUM_CAP;
use secexp::sim::DEFAULT_LAW_BUDGET;
use secexp_cli::commands::{self, EnsembleArg, FiniteNArgs, Provenance, SimulateArgs, SweepArgs};
use secexp_cli::spec::ChannelSpec;
use secexp_cli::{exit, CliError, Units};

/// Secrecy exponents of random codes over discrete memoryless channels.
#[derive(Debug, Parser)]
#[command(name = "secexp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Channel spec (JSON).
    spec: PathBuf,
    /// Output units; rates on the command line are always nats.
    #[arg(long, value_enum, default_value_t = Units::Nats)]
    units: Units,
    /// Omit the timestamp line so reruns are byte-identical.
    #[arg(long)]
    no_timestamp: bool,
    /// Output file; stdout when absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Asymptotic exponents of both ensembles over a rate grid.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        r_min: f64,
        #[arg(long)]
        r_max: f64,
        /// Number of grid points, endpoints included.
        #[arg(long, default_value_t = 50)]
        r_steps: usize,
    },
    /// Finite-blocklength exponents against the asymptotic one.
    FiniteN {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        ensemble: EnsembleArg,
        #[arg(long)]
        rate: f64,
        /// Comma separated blocklengths.
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<u32>,
        /// Cap on enumerated joint types.
        #[arg(long, default_value_t = DEFAULT_ENUM_CAP)]
        budget: u64,
    },
    /// Monte-Carlo codebooks with exact output laws.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        ensemble: EnsembleArg,
        #[arg(long)]
        rate: f64,
        /// Comma separated, strictly ascending blocklengths.
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<u32>,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of secret-message bins; each holds e^{nR} codewords.
        #[arg(long)]
        bins: Option<usize>,
        /// Cap on |Z|^n entries per output law.
        #[arg(long, default_value_t = DEFAULT_LAW_BUDGET)]
        budget: usize,
    },
    /// Spec file utilities.
    Spec {
        #[command(subcommand)]
        action: SpecAction,
    },
}

#[derive(Debug, Subcommand)]
enum SpecAction {
    /// Rewrite a spec with 17 significant digits per number.
    Normalize {
        spec: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn emit(text: &str, output: Option<&PathBuf>) -> Result<(), CliError> {
    match output {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(e.to_string())),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Sweep {
            common,
            r_min,
            r_max,
            r_steps,
        } => {
            let spec = ChannelSpec::read(&common.spec)?;
            let args = SweepArgs {
                r_min,
                r_max,
                r_steps,
                units: common.units,
            };
            let csv = commands::sweep(&spec, &args, Provenance::new("sweep", !common.no_timestamp))?;
            emit(&csv, common.output.as_ref())
        }
        Command::FiniteN {
            common,
            ensemble,
            rate,
            n,
            budget,
        } => {
            let spec = ChannelSpec::read(&common.spec)?;
            let args = FiniteNArgs {
                ensemble,
                rate,
                n_list: n,
                cap: budget,
                units: common.units,
            };
            let csv = commands::finite_n(&spec, &args, Provenance::new("finite-n", !common.no_timestamp))?;
            emit(&csv, common.output.as_ref())
        }
        Command::Simulate {
            common,
            ensemble,
            rate,
            n,
            trials,
            seed,
            bins,
            budget,
        } => {
            let spec = ChannelSpec::read(&common.spec)?;
            let args = SimulateArgs {
                ensemble,
                rate,
                n_list: n,
                trials,
                seed,
                bins,
                budget,
                units: common.units,
            };
            let csv = commands::simulate(&spec, &args, Provenance::new("simulate", !common.no_timestamp))?;
            emit(&csv, common.output.as_ref())
        }
        Command::Spec {
            action: SpecAction::Normalize { spec, output },
        } => emit(&ChannelSpec::read(&spec)?.normalized(), output.as_ref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { exit::DEGENERATE as u8 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::from(exit::SUCCESS as u8),
        Err(e) => {
            eprintln!("secexp: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
