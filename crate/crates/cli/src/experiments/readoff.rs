use clap::ValueEnum;
use nocollapse_core::frequency::density;
use nocollapse_core::readoff::{
    coarse_grain, conditional_density, marginal_density, read_off, up_count, CoarseMap,
    NormDensity, ReadOff,
};
use nocollapse_core::state::repeat_state;
use nocollapse_core::StateVector;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::{load_state, params, two_level, Context, Experiment};
use crate::error::CliError;
use crate::output::{report, Artifact, Cell, Table};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    /// the N-fold frequency table of a two-level state
    Frequency,
    /// a state file
    State,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Variable {
    /// number of factors in the up state
    UpCount,
    /// label of a single factor
    Factor,
}

params! {
    /// Marginal density of one variable and its read-off.
    ReadoffParams, ReadoffArgs {
        /// where the density comes from
        source: Source = Source::Frequency,
        /// state file, for source = state
        state: String = String::new(),
        /// variable to read off
        variable: Variable = Variable::UpCount,
        /// factor index, for variable = factor
        factor: usize = 0,
        /// |a|^2, for source = frequency
        a2: f64 = 0.3,
        /// phase of b, for source = frequency
        phase: f64 = 0.0,
        /// number of repetitions N, for source = frequency
        trials: u64 = 100_000,
        /// bin the up-count into cells of this width in r = n/N
        cell_width: Option<f64> = None,
        /// mass allowed off the read-off value, as a fraction of the total
        tolerance: f64 = 1e-8,
        /// condition on this factor having label condition_value
        condition_factor: Option<usize> = None,
        /// label of the conditioning factor
        condition_value: usize = 0,
    }
}

params! {
    /// Writes the explicit N-fold tensor power of a two-level state.
    StateParams, StateArgs {
        /// |a|^2
        a2: f64 = 0.5,
        /// phase of b
        phase: f64 = 0.0,
        /// number of factors
        trials: u64 = 4,
    }
}

fn to_i64<L: Ord + Clone + Copy + TryInto<i64>>(rho: &NormDensity<L>) -> Result<NormDensity<i64>, CliError> {
    let labels = rho
        .labels()
        .iter()
        .map(|&l| l.try_into().map_err(|_| CliError::precondition("label out of range")))
        .collect::<Result<Vec<i64>, CliError>>()?;
    Ok(NormDensity::with_total(labels, rho.mass().to_vec(), rho.total())?)
}

impl ReadoffParams {
    fn density(&self) -> Result<NormDensity<i64>, CliError> {
        let (fine, trials) = match self.source {
            Source::Frequency => {
                if self.variable != Variable::UpCount || self.condition_factor.is_some() {
                    return Err(CliError::precondition(
                        "source = frequency supports only variable = up-count without a condition",
                    ));
                }
                let spec = two_level(self.a2, self.phase)?;
                (NormDensity::from_frequency(&density(&spec, self.trials)?), self.trials)
            }
            Source::State => {
                let psi = load_state(&self.state)?;
                match self.variable {
                    Variable::Factor => {
                        if self.cell_width.is_some() {
                            return Err(CliError::precondition("cell_width applies only to variable = up-count"));
                        }
                        let dim = *psi.dims().get(self.factor).ok_or_else(|| {
                            CliError::precondition(format!("factor {} out of range", self.factor))
                        })?;
                        let f = self.factor;
                        let rho = self.slice(&psi, (0..dim).collect(), move |l| l[f])?;
                        return to_i64(&rho);
                    }
                    Variable::UpCount => {
                        for i in 0..psi.num_factors() {
                            psi.require_two_level(i)?;
                        }
                        let n = psi.num_factors();
                        let rho = self.slice(&psi, (0..=n).collect(), up_count)?;
                        let labels = rho.labels().iter().map(|&l| l as u64).collect();
                        (NormDensity::with_total(labels, rho.mass().to_vec(), rho.total())?, n as u64)
                    }
                }
            }
        };
        match self.cell_width {
            Some(width) => Ok(coarse_grain(&fine, &CoarseMap::frequency_cells(trials, width)?)?),
            None => to_i64(&fine),
        }
    }

    fn slice<F: Fn(&[usize]) -> usize>(
        &self,
        psi: &StateVector,
        codomain: Vec<usize>,
        variable: F,
    ) -> Result<NormDensity<usize>, CliError> {
        Ok(match self.condition_factor {
            Some(cf) => conditional_density(psi, cf, self.condition_value, codomain, variable)?,
            None => marginal_density(psi, codomain, variable)?,
        })
    }
}

impl Experiment for ReadoffParams {
    const NAME: &'static str = "readoff";

    fn run(&self, ctx: &Context) -> Result<Vec<Artifact>, CliError> {
        let rho = self.density()?;
        let result = read_off(&rho, self.tolerance)?;

        let mut t = Table::new(&["q_label", "mass", "fraction"]);
        for ((&label, &mass), fraction) in rho.labels().iter().zip(rho.mass()).zip(rho.fractions()) {
            t.push(vec![Cell::from(label), Cell::from(mass), Cell::from(fraction)]);
        }
        let mut payload = serde_json::Map::new();
        match &result.outcome {
            ReadOff::Determined { value } => {
                payload.insert("kind".into(), json!("Determined"));
                payload.insert("value".into(), json!(value));
            }
            ReadOff::Indeterminate { support } => {
                payload.insert("kind".into(), json!("Indeterminate"));
                let support: Vec<Value> = support.iter().map(|(l, m)| json!({"label": l, "mass": m})).collect();
                payload.insert("support".into(), Value::Array(support));
            }
        }
        payload.insert("tolerance_used".into(), json!(result.tolerance_used));
        payload.insert("total".into(), json!(rho.total()));

        Ok(vec![
            Artifact::new(format!("marginal.{}", ctx.format.extension()), t.render(ctx.format, &ctx.config)),
            Artifact::new("readoff.json", report(&ctx.config, Value::Object(payload))),
        ])
    }
}

impl Experiment for StateParams {
    const NAME: &'static str = "state";

    fn run(&self, ctx: &Context) -> Result<Vec<Artifact>, CliError> {
        let spec = two_level(self.a2, self.phase)?;
        let n = usize::try_from(self.trials).map_err(|_| CliError::precondition("trials too large"))?;
        let psi = repeat_state(&spec, n)?;
        let payload = serde_json::to_value(&psi).expect("states always serialize");
        Ok(vec![Artifact::new("state.json", report(&ctx.config, payload))])
    }
}
