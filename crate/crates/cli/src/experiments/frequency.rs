use nocollapse_core::frequency::{
    density, gaussian_sigma, ln_density_at, ln_tail_mass, pnorm_density, record_distribution,
    scaled_density, LogTable, PNormSpec,
};
use nocollapse_core::readoff::up_count;
use nocollapse_core::state::repeat_state;
use nocollapse_core::TwoLevelAmplitudes;
use rayon::prelude::*;
use serde_json::json;

use super::{params, sorted_f64, sorted_u64, two_level, Context, Experiment};
use crate::error::CliError;
use crate::output::{complex, format_float, report, sha256_hex, Artifact, Cell, Table};

params! {
    /// Density tables, tail masses and argmax over a sweep of `N`.
    FreqScanParams, FreqScanArgs {
        /// |a|^2 of the repeated two-level state
        a2: f64 = 0.3,
        /// phase of b
        phase: f64 = 0.0,
        /// numbers of repetitions N
        #[arg(value_delimiter = ',')]
        trials: Vec<u64> = vec![1_000, 10_000, 100_000],
        /// half-width of the central window in r = n/N
        epsilon: f64 = 0.05,
        /// also write one density table per N
        tables: bool = true,
    }
}

params! {
    /// Exact scaled density against its Gaussian approximation.
    GaussCompareParams, GaussCompareArgs {
        /// |a|^2 of the repeated two-level state
        a2: f64 = 0.3,
        /// phase of b
        phase: f64 = 0.0,
        /// numbers of repetitions N
        #[arg(value_delimiter = ',')]
        trials: Vec<u64> = vec![10_000, 1_000_000],
        /// offsets from |a|^2 in units of sigma
        #[arg(value_delimiter = ',', allow_negative_numbers = true)]
        offsets: Vec<f64> = vec![-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0],
    }
}

params! {
    /// Argmax of p-norm densities.
    PnormParams, PnormArgs {
        /// values of a_mag^p
        #[arg(value_delimiter = ',')]
        weights: Vec<f64> = vec![0.3, 0.6],
        /// norm exponents p
        #[arg(value_delimiter = ',')]
        p: Vec<f64> = vec![1.0, 2.0, 4.0],
        /// number of repetitions N
        trials: u64 = 100_000,
        /// also write one density table per (p, weight)
        tables: bool = false,
    }
}

params! {
    /// Relative frequencies of the N-measurement record.
    RecordParams, RecordArgs {
        /// |a|^2 of the measured two-level state
        a2: f64 = 0.5,
        /// phase of b
        phase: f64 = 0.0,
        /// measurements per record
        trials: u64 = 100,
        /// repetitions of the whole record, for expected counts
        repetitions: Option<u64> = None,
    }
}

params! {
    /// Frequency tables against brute-force grouping of the explicit state.
    OracleParams, OracleArgs {
        /// values of |a|^2
        #[arg(value_delimiter = ',')]
        a2: Vec<f64> = vec![0.1, 0.25, 0.5, 0.7],
        /// phase of b
        phase: f64 = 0.0,
        /// numbers of repetitions N
        #[arg(value_delimiter = ',')]
        trials: Vec<u64> = vec![2, 4, 8, 12, 16],
    }
}

fn density_table(table: &LogTable, trials: u64, expected: Option<u64>) -> Table {
    let mut columns = vec!["n", "r", "log_rho", "rho", "cumulative"];
    if expected.is_some() {
        columns.push("expected_count");
    }
    let mut out = Table::new(&columns);
    let cumulative = table.cumulative();
    for (n, (&log_rho, &cum)) in table.log_values().iter().zip(&cumulative).enumerate() {
        let rho = table.value(n);
        let mut row = vec![
            Cell::from(n),
            Cell::from(n as f64 / trials as f64),
            Cell::from(log_rho),
            Cell::from(rho),
            Cell::from(cum),
        ];
        if let Some(m) = expected {
            row.push(Cell::from(m as f64 * rho));
        }
        out.push(row);
    }
    out
}

/// The table plus a JSON sidecar naming its spec and checksum.
fn density_artifacts(
    ctx: &Context,
    stem: &str,
    table: Table,
    spec: &TwoLevelAmplitudes,
    trials: u64,
) -> [Artifact; 2] {
    let name = format!("{stem}.{}", ctx.format.extension());
    let contents = table.render(ctx.format, &ctx.config);
    let sidecar = report(
        &ctx.config,
        json!({
            "table": name,
            "N": trials,
            "spec": {
                "a": complex(spec.a()),
                "b": complex(spec.b()),
                "a2": spec.up_weight(),
            },
            "rows": table.rows.len(),
            "sha256": sha256_hex(contents.as_bytes()),
        }),
    );
    [Artifact::new(name, contents), Artifact::new(format!("{stem}.meta.json"), sidecar)]
}

impl Experiment for FreqScanParams {
    const NAME: &'static str = "freq-scan";

    fn run(&self, ctx: &Context) -> Result<Vec<Artifact>, CliError> {
        let spec = two_level(self.a2, self.phase)?;
        let trials = sorted_u64("trials", self.trials.clone())?;
        let points = trials
            .par_iter()
            .map(|&n| {
                let d = density(&spec, n)?;
                let ln_tail = ln_tail_mass(&spec, n, self.epsilon)?;
                Ok((n, d, ln_tail))
            })
            .collect::<Result<Vec<_>, CliError>>()?;

        let mut summary = Table::new(&[
            "N",
            "epsilon",
            "tail_mass",
            "log_tail_mass",
            "argmax_n",
            "argmax_r",
            "total",
        ]);
        let mut artifacts = Vec::new();
        for (n, d, ln_tail) in points {
            summary.push(vec![
                Cell::from(n),
                Cell::from(self.epsilon),
                Cell::from(ln_tail.exp()),
                Cell::from(ln_tail),
                Cell::from(d.table().argmax()),
                Cell::from(d.argmax_frequency()),
                Cell::from(d.table().total()),
            ]);
            if self.tables {
                let t = density_table(d.table(), n, None);
                artifacts.extend(density_artifacts(ctx, &format!("density_N{n}"), t, &spec, n));
            }
        }
        artifacts.insert(
            0,
            Artifact::new(format!("freq_scan.{}", ctx.format.extension()), summary.render(ctx.format, &ctx.config)),
        );
        Ok(artifacts)
    }
}

impl Experiment for GaussCompareParams {
    const NAME: &'static str = "gauss-compare";

    fn run(&self, ctx: &Context) -> Result<Vec<Artifact>, CliError> {
        let spec = two_level(self.a2, self.phase)?;
        if spec.is_degenerate() {
            return Err(nocollapse_core::Error::Degenerate.into());
        }
        let trials = sorted_u64("trials", self.trials.clone())?;
        let offsets = sorted_f64("offsets", self.offsets.clone())?;
        let blocks = trials
            .par_iter()
            .map(|&n| {
                let sigma = gaussian_sigma(&spec, n)?;
                offsets
                    .iter()
                    .map(|&off| {
                        let r = spec.up_weight() + off * sigma;
                        let sample = scaled_density(&spec, n, r)?;
                        let grid_r = sample.grid_r(n);
                        // both sides in log space so deep tails do not underflow
                        let log_exact = (n as f64).ln() + ln_density_at(&spec, n, sample.n);
                        let z = (grid_r - spec.up_weight()) / sigma;
                        let log_gauss = -0.5 * z * z - (sigma * (2.0 * std::f64::consts::PI).sqrt()).ln();
                        let log_ratio = log_exact - log_gauss;
                        Ok(vec![
                            Cell::from(n),
                            Cell::from(off),
                            Cell::from(sample.n),
                            Cell::from(grid_r),
                            Cell::from(log_exact.exp()),
                            Cell::from(log_gauss.exp()),
                            Cell::from(log_ratio.exp()),
                            Cell::from(log_ratio),
                        ])
                    })
                    .collect::<Result<Vec<_>, CliError>>()
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        let mut t = Table::new(&[
            "N",
            "offset_sigma",
            "n",
            "r",
            "exact",
            "gaussian",
            "ratio",
            "log_ratio",
        ]);
        blocks.into_iter().flatten().for_each(|row| t.push(row));
        Ok(vec![Artifact::new(
            format!("gauss_compare.{}", ctx.format.extension()),
            t.render(ctx.format, &ctx.config),
        )])
    }
}

impl Experiment for PnormParams {
    const NAME: &'static str = "pnorm";

    fn run(&self, ctx: &Context) -> Result<Vec<Artifact>, CliError> {
        let ps = sorted_f64("p", self.p.clone())?;
        let weights = sorted_f64("weights", self.weights.clone())?;
        let grid: Vec<(f64, f64)> = ps.iter().flat_map(|&p| weights.iter().map(move |&w| (p, w))).collect();
        // validate every point before the expensive part
        let specs = grid
            .iter()
            .map(|&(p, w)| Ok(PNormSpec::from_weight(w, p)?))
            .collect::<Result<Vec<_>, CliError>>()?;
        let n = self.trials;
        let rows = specs
            .par_iter()
            .map(|spec| {
                let d = pnorm_density(spec, n)?;
                let r = d.argmax_frequency();
                let table = self.tables.then(|| {
                    let name = format!(
                        "pnorm_p{}_w{}.{}",
                        format_float(spec.p()),
                        format_float(spec.up_weight()),
                        ctx.format.extension()
                    );
                    Artifact::new(name, density_table(d.table(), n, None).render(ctx.format, &ctx.config))
                });
                let row = vec![
                    Cell::from(spec.p()),
                    Cell::from(spec.up_weight()),
                    Cell::from(spec.a_mag()),
                    Cell::from(spec.b_mag()),
                    Cell::from(n),
                    Cell::from(d.table().argmax()),
                    Cell::from(r),
                    Cell::from(r - spec.up_weight()),
                ];
                Ok((row, table))
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        let mut t = Table::new(&[
            "p",
            "weight",
            "a_mag",
            "b_mag",
            "N",
            "argmax_n",
            "argmax_r",
            "deviation",
        ]);
        let mut tables = Vec::new();
        for (row, table) in rows {
            t.push(row);
            tables.extend(table);
        }
        let mut artifacts = vec![Artifact::new(
            format!("pnorm.{}", ctx.format.extension()),
            t.render(ctx.format, &ctx.config),
        )];
        artifacts.extend(tables);
        Ok(artifacts)
    }
}

impl Experiment for RecordParams {
    const NAME: &'static str = "record";

    fn run(&self, ctx: &Context) -> Result<Vec<Artifact>, CliError> {
        let spec = two_level(self.a2, self.phase)?;
        let record = record_distribution(&spec, self.trials, self.repetitions)?;
        let t = density_table(record.table(), self.trials, self.repetitions);
        Ok(density_artifacts(ctx, "record", t, &spec, self.trials).to_vec())
    }
}

impl Experiment for OracleParams {
    const NAME: &'static str = "oracle";

    fn run(&self, ctx: &Context) -> Result<Vec<Artifact>, CliError> {
        let a2s = sorted_f64("a2", self.a2.clone())?;
        let trials = sorted_u64("trials", self.trials.clone())?;
        let mut grid = Vec::new();
        for &a2 in &a2s {
            let spec = two_level(a2, self.phase)?;
            for &n in &trials {
                grid.push((spec, n));
            }
        }
        let blocks = grid
            .par_iter()
            .map(|&(spec, n)| {
                let psi = repeat_state(&spec, n as usize)?;
                let mut groups = vec![0.0; n as usize + 1];
                psi.for_each_label(|label, a| groups[up_count(label)] += a.norm_sqr());
                let d = density(&spec, n)?;
                Ok(groups
                    .iter()
                    .enumerate()
                    .map(|(k, &brute)| {
                        let rho = d.rho(k);
                        vec![
                            Cell::from(spec.up_weight()),
                            Cell::from(n),
                            Cell::from(k),
                            Cell::from(rho),
                            Cell::from(brute),
                            Cell::from((rho - brute).abs()),
                        ]
                    })
                    .collect::<Vec<_>>())
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        let mut t = Table::new(&["a2", "N", "n", "density", "brute_force", "abs_diff"]);
        blocks.into_iter().flatten().for_each(|row| t.push(row));
        Ok(vec![Artifact::new(
            format!("oracle.{}", ctx.format.extension()),
            t.render(ctx.format, &ctx.config),
        )])
    }
}
