//! Config files and the precedence between file, environment and flags.
//!
//! ```toml
//! experiment = "freq-scan"   # optional when a subcommand names it
//! out_dir = "results"
//! format = "csv"
//!
//! [params]
//! a2 = 0.3
//! trials = [1000, 10000]
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::output::Format;

pub const OUT_DIR_ENV: &str = "NOCOLLAPSE_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "out";

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub experiment: Option<String>,
    pub out_dir: Option<PathBuf>,
    pub format: Option<Format>,
    #[serde(default)]
    pub params: toml::Table,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| CliError::Config(format!("{}: {}", path.display(), e.message())))
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }
}

/// Everything needed to run one experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct Resolved {
    pub experiment: String,
    pub out_dir: PathBuf,
    pub format: Format,
    pub params: toml::Table,
}

/// Flags set on the command line, all optional.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub experiment: Option<String>,
    pub params: toml::Table,
    pub out_dir: Option<PathBuf>,
    pub env_out_dir: Option<PathBuf>,
    pub format: Option<Format>,
}

/// Flag beats environment beats config file beats default.
pub fn resolve(file: ConfigFile, flags: Overrides) -> Result<Resolved, CliError> {
    let experiment = match (flags.experiment, file.experiment) {
        (Some(cmd), Some(file_exp)) if cmd != file_exp => {
            return Err(CliError::Config(format!(
                "config file is for experiment {file_exp:?}, not {cmd:?}"
            )))
        }
        (Some(cmd), _) => cmd,
        (None, Some(file_exp)) => file_exp,
        (None, None) => return Err(CliError::Config("no experiment given in the config file".into())),
    };
    let mut params = file.params;
    params.extend(flags.params);
    Ok(Resolved {
        experiment,
        out_dir: flags
            .out_dir
            .or(flags.env_out_dir)
            .or(file.out_dir)
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR)),
        format: flags.format.or(file.format).unwrap_or_default(),
        params,
    })
}

/// The flags of a subcommand as a params table; unset flags are left out.
pub fn flags_table<T: Serialize>(args: &T) -> toml::Table {
    match toml::Value::try_from(args) {
        Ok(toml::Value::Table(t)) => t,
        _ => unreachable!("flag structs serialize to tables"),
    }
}
