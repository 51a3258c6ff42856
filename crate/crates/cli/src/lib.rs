//! Command-line experiments over `nocollapse-core`.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;

use config::{flags_table, resolve, ConfigFile, Overrides};
use error::CliError;
use experiments::*;
use output::{write_artifacts, Format};

#[derive(Debug, Parser)]
#[command(name = "nocollapse", version, about = "Norm densities, read-off and decoherence experiments")]
pub struct Cli {
    /// TOML config file
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// output directory (overrides NOCOLLAPSE_OUT_DIR and the config file)
    #[arg(long, global = true, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
    /// table format
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Density tables, tail masses and argmax over a sweep of N
    FreqScan(FreqScanArgs),
    /// Exact scaled density against its Gaussian approximation
    GaussCompare(GaussCompareArgs),
    /// Argmax of p-norm densities
    Pnorm(PnormArgs),
    /// Relative frequencies of the N-measurement record
    Record(RecordArgs),
    /// Marginal density of one variable and its read-off
    Readoff(ReadoffArgs),
    /// Screen patterns and visibility against the detector overlap
    TwoSlit(TwoSlitArgs),
    /// Term-by-term probes of the two cat-state expansions
    Cat(CatArgs),
    /// Interference suppression as environment factors accumulate
    Suppress(SuppressArgs),
    /// Branches of a state by the label of a pointer factor
    Branch(BranchArgs),
    /// Frequency tables against brute-force grouping of the explicit state
    Oracle(OracleArgs),
    /// Write the explicit N-fold tensor power of a two-level state
    State(StateArgs),
    /// Run the experiment named in the config file
    Run,
}

impl Command {
    fn into_parts(self) -> Option<(&'static str, toml::Table)> {
        let parts = match self {
            Command::FreqScan(a) => ("freq-scan", flags_table(&a)),
            Command::GaussCompare(a) => ("gauss-compare", flags_table(&a)),
            Command::Pnorm(a) => ("pnorm", flags_table(&a)),
            Command::Record(a) => ("record", flags_table(&a)),
            Command::Readoff(a) => ("readoff", flags_table(&a)),
            Command::TwoSlit(a) => ("two-slit", flags_table(&a)),
            Command::Cat(a) => ("cat", flags_table(&a)),
            Command::Suppress(a) => ("suppress", flags_table(&a)),
            Command::Branch(a) => ("branch", flags_table(&a)),
            Command::Oracle(a) => ("oracle", flags_table(&a)),
            Command::State(a) => ("state", flags_table(&a)),
            Command::Run => return None,
        };
        Some(parts)
    }
}

/// Runs one invocation and returns the files written.
pub fn run(cli: Cli, env_out_dir: Option<PathBuf>) -> Result<Vec<PathBuf>, CliError> {
    let file = match &cli.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let (experiment, params) = match cli.command.into_parts() {
        Some((name, params)) => (Some(name.to_string()), params),
        None if cli.config.is_none() => return Err(CliError::Config("run needs --config FILE".into())),
        None => (None, toml::Table::new()),
    };
    let resolved = resolve(
        file,
        Overrides {
            experiment,
            params,
            out_dir: cli.out_dir,
            env_out_dir,
            format: cli.format,
        },
    )?;
    let artifacts = run_experiment(&resolved.experiment, resolved.params, resolved.format)?;
    write_artifacts(&resolved.out_dir, &artifacts)
}

/// Parses `args`, runs, and reports. Returns the process exit status.
pub fn main_with_args<I, T>(args: I, env_out_dir: Option<PathBuf>) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return 0;
        }
        Err(e) => {
            let err = CliError::Config(e.render().to_string().trim_end().to_string());
            eprintln!("{}", err.to_json());
            return err.exit_code();
        }
    };
    match run(cli, env_out_dir) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            0
        }
        Err(err) => {
            eprintln!("{}", err.to_json());
            err.exit_code()
        }
    }
}
