//! Named experiments.
//!
//! Each experiment has a parameter struct, read from the `[params]` table of
//! a config file and overridden field by field by command-line flags. All
//! results are computed in memory first; nothing is written unless the whole
//! experiment succeeds.

use nocollapse_core::{StateVector, TwoLevelAmplitudes};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::output::{Artifact, Format};

mod decoherence;
mod frequency;
mod readoff;

pub use decoherence::{
    BranchArgs, BranchParams, CatArgs, CatParams, SuppressArgs, SuppressParams, TwoSlitArgs,
    TwoSlitParams,
};
pub use frequency::{
    FreqScanArgs, FreqScanParams, GaussCompareArgs, GaussCompareParams, OracleArgs, OracleParams,
    PnormArgs, PnormParams, RecordArgs, RecordParams,
};
pub use readoff::{ReadoffArgs, ReadoffParams, Source, StateArgs, StateParams, Variable};

/// Declares a parameter struct with defaults and its clap counterpart, in
/// which every field is optional so that only flags actually given override
/// the config file. Field types are spelled `Name` or `Name<T>` so that the
/// clap derive sees `Vec` and `Option` literally.
macro_rules! params {
    (
        $(#[doc = $sdoc:literal])*
        $params:ident, $args:ident {
            $(
                $(#[doc = $doc:literal])*
                $(#[arg($($attr:tt)*)])?
                $field:ident : $tyname:ident $(< $gen:ty >)? = $default:expr
            ),* $(,)?
        }
    ) => {
        $(#[doc = $sdoc])*
        #[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
        #[serde(deny_unknown_fields, default)]
        pub struct $params {
            $(
                $(#[doc = $doc])*
                pub $field: $tyname $(<$gen>)?,
            )*
        }

        impl Default for $params {
            fn default() -> Self {
                $params {
                    $($field: $default,)*
                }
            }
        }

        #[derive(Clone, Debug, Default, clap::Args, serde::Serialize)]
        pub struct $args {
            $(
                $(#[doc = $doc])*
                #[arg(long $(, $($attr)*)?)]
                pub $field: Option<$tyname $(<$gen>)?>,
            )*
        }
    };
}
pub(crate) use params;

/// Resolved settings shared by every experiment.
pub struct Context {
    pub format: Format,
    /// The full resolved config, echoed into every output file.
    pub config: Value,
}

pub trait Experiment: Serialize + DeserializeOwned {
    const NAME: &'static str;

    fn run(&self, ctx: &Context) -> Result<Vec<Artifact>, CliError>;
}

pub const NAMES: [&str; 11] = [
    "freq-scan",
    "gauss-compare",
    "pnorm",
    "record",
    "readoff",
    "two-slit",
    "cat",
    "suppress",
    "branch",
    "oracle",
    "state",
];

fn execute<E: Experiment>(params: toml::Table, format: Format) -> Result<Vec<Artifact>, CliError> {
    let params: E = toml::Value::Table(params)
        .try_into()
        .map_err(|e| CliError::Config(format!("[params] for {}: {e}", E::NAME)))?;
    let config = json!({
        "experiment": E::NAME,
        "format": format,
        "params": params,
    });
    params.run(&Context { format, config })
}

pub fn run_experiment(name: &str, params: toml::Table, format: Format) -> Result<Vec<Artifact>, CliError> {
    match name {
        "freq-scan" => execute::<FreqScanParams>(params, format),
        "gauss-compare" => execute::<GaussCompareParams>(params, format),
        "pnorm" => execute::<PnormParams>(params, format),
        "record" => execute::<RecordParams>(params, format),
        "readoff" => execute::<ReadoffParams>(params, format),
        "two-slit" => execute::<TwoSlitParams>(params, format),
        "cat" => execute::<CatParams>(params, format),
        "suppress" => execute::<SuppressParams>(params, format),
        "branch" => execute::<BranchParams>(params, format),
        "oracle" => execute::<OracleParams>(params, format),
        "state" => execute::<StateParams>(params, format),
        other => Err(CliError::Config(format!(
            "unknown experiment {other:?}; expected one of {}",
            NAMES.join(", ")
        ))),
    }
}

pub(crate) fn two_level(a2: f64, phase: f64) -> Result<TwoLevelAmplitudes, CliError> {
    Ok(TwoLevelAmplitudes::with_phase(a2, phase)?)
}

/// Sweep values in ascending order without repeats.
pub(crate) fn sorted_u64(name: &str, mut v: Vec<u64>) -> Result<Vec<u64>, CliError> {
    v.sort_unstable();
    v.dedup();
    if v.is_empty() {
        return Err(CliError::precondition(format!("{name} must not be empty")));
    }
    Ok(v)
}

pub(crate) fn sorted_f64(name: &str, mut v: Vec<f64>) -> Result<Vec<f64>, CliError> {
    if v.iter().any(|x| !x.is_finite()) {
        return Err(CliError::precondition(format!("{name} must be finite")));
    }
    v.sort_by(f64::total_cmp);
    v.dedup();
    if v.is_empty() {
        return Err(CliError::precondition(format!("{name} must not be empty")));
    }
    Ok(v)
}

/// Reads a state written by the `state` experiment, or a bare
/// `{"dims": [...], "amps": [[re, im], ...]}` document.
pub(crate) fn load_state(path: &str) -> Result<StateVector, CliError> {
    if path.is_empty() {
        return Err(CliError::Config("a state file is required (--state FILE)".into()));
    }
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{path}: {e}")))?;
    let mut doc: Value = serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{path}: {e}")))?;
    if let Value::Object(fields) = &mut doc {
        fields.remove("nocollapse");
        fields.remove("config");
    }
    serde_json::from_value(doc).map_err(|e| CliError::Config(format!("{path}: {e}")))
}
