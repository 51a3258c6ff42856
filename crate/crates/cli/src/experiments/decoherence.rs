use std::f64::consts::PI;

use nocollapse_core::decoherence::{
    branch_decompose, cat_analysis, classify_components, detector_pattern, environment_suppression,
    rotated_detector_amplitude, screen_amplitude, visibility, ComponentCriteria, ComponentVerdict, DetectorState, EnvironmentModel,
    ExpansionAmplitudes, SlitModel,
};
use nocollapse_core::{Amplitude, StateVector};
use rayon::prelude::*;
use serde_json::{json, Value};

use super::{load_state, params, sorted_f64, two_level, Context, Experiment};
use crate::error::CliError;
use crate::output::{complex, format_float, report, Artifact, Cell, Table};

params! {
    /// Screen patterns and fringe visibility against the detector overlap.
    TwoSlitParams, TwoSlitArgs {
        /// slit centres
        #[arg(value_delimiter = ',', allow_negative_numbers = true)]
        centers: Vec<f64> = vec![-0.5, 0.5],
        /// packet width w
        width: f64 = 1.0e4,
        /// wavenumber k
        wavenumber: f64 = 2.0 * PI * 5.0,
        /// left end of the screen grid
        #[arg(allow_negative_numbers = true)]
        grid_lo: f64 = -1.0,
        /// right end of the screen grid
        #[arg(allow_negative_numbers = true)]
        grid_hi: f64 = 1.0,
        /// number of screen points
        grid_points: usize = 10_001,
        /// moduli of <D1|D2> to sweep
        #[arg(value_delimiter = ',')]
        overlaps: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect(),
        /// phase of <D1|D2>
        #[arg(allow_negative_numbers = true)]
        overlap_phase: f64 = 0.0,
        /// overlap moduli for which the full pattern is written
        #[arg(value_delimiter = ',')]
        pattern_overlaps: Vec<f64> = vec![0.0, 1.0],
        /// also write the amplitude paired with D1 - D2
        rotated: bool = false,
    }
}

params! {
    /// Term-by-term probes of the two cat-state expansions.
    CatParams, CatArgs {
        /// |a|^2, weight of not decayed / alive
        a2: f64 = 0.5,
        /// phase of b
        phase: f64 = 0.0,
    }
}

params! {
    /// Interference suppression as environment factors accumulate.
    SuppressParams, SuppressArgs {
        /// modulus of each factor overlap
        overlap: f64 = 0.9,
        /// phase of each factor overlap
        #[arg(allow_negative_numbers = true)]
        overlap_phase: f64 = 0.0,
        /// largest number of environment factors
        factors: usize = 100,
        /// overlap modulus below which states count as macroscopically different
        threshold: f64 = 1e-10,
        /// most differing factors that still count as one component
        max_finite_differences: usize = 3,
    }
}

params! {
    /// Branches of a state by the label of a pointer factor.
    BranchParams, BranchArgs {
        /// state file
        state: String = String::new(),
        /// index of the pointer factor
        pointer_factor: usize = 0,
        /// modulus of each environment factor overlap
        env_overlap: f64 = 0.0,
        /// phase of each environment factor overlap
        #[arg(allow_negative_numbers = true)]
        env_overlap_phase: f64 = 0.0,
        /// number of environment factors
        env_factors: usize = 0,
    }
}

fn detector(modulus: f64, phase: f64) -> Result<DetectorState, CliError> {
    if !(0.0..=1.0).contains(&modulus) {
        return Err(CliError::precondition("overlap moduli must lie in [0, 1]"));
    }
    Ok(DetectorState::new(Amplitude::from_polar(modulus, phase))?)
}

impl Experiment for TwoSlitParams {
    const NAME: &'static str = "two-slit";

    fn run(&self, ctx: &Context) -> Result<Vec<Artifact>, CliError> {
        let centers: [f64; 2] = self
            .centers
            .as_slice()
            .try_into()
            .map_err(|_| CliError::precondition("centers needs exactly two values"))?;
        let grid = SlitModel::uniform_grid(self.grid_lo, self.grid_hi, self.grid_points)?;
        let model = SlitModel::new(centers, self.width, self.wavenumber, grid)?;
        let overlaps = sorted_f64("overlaps", self.overlaps.clone())?;
        let detectors = overlaps
            .iter()
            .map(|&g| detector(g, self.overlap_phase))
            .collect::<Result<Vec<_>, CliError>>()?;
        let pattern_overlaps = if self.pattern_overlaps.is_empty() {
            Vec::new()
        } else {
            sorted_f64("pattern_overlaps", self.pattern_overlaps.clone())?
        };
        let pattern_detectors = pattern_overlaps
            .iter()
            .map(|&g| detector(g, self.overlap_phase))
            .collect::<Result<Vec<_>, CliError>>()?;

        let visibilities = detectors
            .par_iter()
            .map(|det| {
                let intensity: Vec<f64> = detector_pattern(&model, det).iter().map(|p| p.intensity).collect();
                Ok(visibility(&model, &intensity)?)
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        let mut vt = Table::new(&["overlap", "visibility"]);
        for (&g, &v) in overlaps.iter().zip(&visibilities) {
            vt.push(vec![Cell::from(g), Cell::from(v)]);
        }
        let ext = ctx.format.extension();
        let mut artifacts = vec![Artifact::new(format!("visibility.{ext}"), vt.render(ctx.format, &ctx.config))];

        let patterns: Vec<Artifact> = pattern_overlaps
            .par_iter()
            .zip(&pattern_detectors)
            .map(|(&g, det)| {
                let mut t = Table::new(&["x", "amp1_re", "amp1_im", "amp2_re", "amp2_im", "intensity"]);
                for p in detector_pattern(&model, det) {
                    t.push(vec![
                        Cell::from(p.x),
                        Cell::from(p.amp1.re),
                        Cell::from(p.amp1.im),
                        Cell::from(p.amp2.re),
                        Cell::from(p.amp2.im),
                        Cell::from(p.intensity),
                    ]);
                }
                // the modulus in the file name is exact, so distinct values never collide
                Artifact::new(format!("pattern_g{}.{ext}", format_float(g)), t.render(ctx.format, &ctx.config))
            })
            .collect();
        artifacts.extend(patterns);

        if self.rotated {
            let mut t = Table::new(&["x", "rotated_re", "rotated_im", "rotated_intensity", "sum_intensity"]);
            for &x in model.screen_grid() {
                let d = rotated_detector_amplitude(&model, x);
                t.push(vec![
                    Cell::from(x),
                    Cell::from(d.re),
                    Cell::from(d.im),
                    Cell::from(d.norm_sqr()),
                    Cell::from(screen_amplitude(&model, x).intensity()),
                ]);
            }
            artifacts.push(Artifact::new(format!("rotated.{ext}"), t.render(ctx.format, &ctx.config)));
        }
        Ok(artifacts)
    }
}

fn expansion_json(e: &ExpansionAmplitudes) -> Value {
    json!({
        "standard_terms": [complex(e.standard_terms[0]), complex(e.standard_terms[1])],
        "rewritten_terms": [complex(e.rewritten_terms[0]), complex(e.rewritten_terms[1])],
        "standard_total": complex(e.standard_total()),
        "rewritten_total": complex(e.rewritten_total()),
        "direct": complex(e.direct),
    })
}

impl Experiment for CatParams {
    const NAME: &'static str = "cat";

    fn run(&self, ctx: &Context) -> Result<Vec<Artifact>, CliError> {
        let spec = two_level(self.a2, self.phase)?;
        let r = cat_analysis(&spec)?;
        let payload = json!({
            "a": complex(spec.a()),
            "b": complex(spec.b()),
            "state": r.state,
            "probes": {
                "decayed_alive": expansion_json(&r.decayed_alive),
                "rotated": expansion_json(&r.rotated_probe),
            },
        });
        Ok(vec![Artifact::new("cat.json", report(&ctx.config, payload))])
    }
}

fn verdict_cells(v: ComponentVerdict) -> [Cell; 2] {
    match v {
        ComponentVerdict::SameComponent { differing } => [Cell::from("same-component"), Cell::from(differing)],
        ComponentVerdict::MacroscopicallyDifferent { .. } => [Cell::from("macroscopically-different"), Cell::Int(-1)],
        ComponentVerdict::Ambiguous { differing, .. } => [Cell::from("ambiguous"), Cell::from(differing)],
    }
}

impl Experiment for SuppressParams {
    const NAME: &'static str = "suppress";

    fn run(&self, ctx: &Context) -> Result<Vec<Artifact>, CliError> {
        if !(0.0..=1.0).contains(&self.overlap) {
            return Err(CliError::precondition("overlap must lie in [0, 1]"));
        }
        let o = Amplitude::from_polar(self.overlap, self.overlap_phase);
        let criteria = ComponentCriteria {
            threshold: self.threshold,
            max_finite_differences: self.max_finite_differences,
        };
        // factor states with <e1|e2> = o
        let e1 = StateVector::basis(vec![2], &[0])?;
        let rest = (1.0 - self.overlap * self.overlap).max(0.0).sqrt();
        let e2 = StateVector::new(vec![2], vec![o, Amplitude::new(rest, 0.0)])?;
        let full = EnvironmentModel::new(vec![o; self.factors])?;
        let rows = (0..=self.factors)
            .into_par_iter()
            .map(|m| {
                let env = EnvironmentModel::new(full.factor_overlaps()[..m].to_vec())?;
                let s = environment_suppression(&env);
                let verdict = classify_components(&vec![e1.clone(); m], &vec![e2.clone(); m], &criteria)?;
                let [label, differing] = verdict_cells(verdict);
                Ok(vec![
                    Cell::from(m),
                    Cell::from(s.log_modulus),
                    Cell::from(s.modulus()),
                    Cell::from(s.phase),
                    label,
                    differing,
                ])
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        let mut t = Table::new(&["m", "log_modulus", "modulus", "phase", "verdict", "differing"]);
        rows.into_iter().for_each(|row| t.push(row));
        Ok(vec![Artifact::new(
            format!("suppress.{}", ctx.format.extension()),
            t.render(ctx.format, &ctx.config),
        )])
    }
}

impl Experiment for BranchParams {
    const NAME: &'static str = "branch";

    fn run(&self, ctx: &Context) -> Result<Vec<Artifact>, CliError> {
        let psi = load_state(&self.state)?;
        if !(0.0..=1.0).contains(&self.env_overlap) {
            return Err(CliError::precondition("env_overlap must lie in [0, 1]"));
        }
        let env = EnvironmentModel::new(vec![
            Amplitude::from_polar(self.env_overlap, self.env_overlap_phase);
            self.env_factors
        ])?;
        let set = branch_decompose(&psi, self.pointer_factor, &env)?;
        let s = environment_suppression(&env);
        let branches: Vec<Value> = set
            .branches
            .iter()
            .map(|b| json!({"pointer": b.pointer, "weight": b.weight}))
            .collect();
        let overlaps: Vec<Vec<Value>> = set
            .cross_overlaps
            .iter()
            .map(|row| row.iter().copied().map(complex).collect())
            .collect();
        let payload = json!({
            "pointer_factor": set.pointer_factor,
            "norm_sqr": psi.norm_sqr(),
            "total_weight": set.total_weight(),
            "branches": branches,
            "cross_overlaps": overlaps,
            "suppression": {"log_modulus": s.log_modulus, "phase": s.phase},
        });
        Ok(vec![Artifact::new("branch.json", report(&ctx.config, payload))])
    }
}
