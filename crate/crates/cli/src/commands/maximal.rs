use std::path::PathBuf;

use mixweak::maximal::maximal_fast;
use mixweak::norms::{safe_ratio, weak_norm, WeightedMeasure};
use mixweak::numeric::fmt17;
use mixweak::{integrate, MaximalKind, StepFunction};
use serde::{Deserialize, Serialize};

use super::{num, sample, Experiment, GridSpec};
use crate::error::{at, CliError};
use crate::output::{grid_json, Output};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MaximalConfig {
    pub grid: GridSpec,
    /// Descriptor of `f`; ignored when `input` is set.
    pub f: String,
    /// Step-function CSV as written by `StepFunction::to_csv`; carries its own grid.
    pub input: Option<PathBuf>,
    pub kind: MaximalKind,
    pub seed: u64,
}

impl Default for MaximalConfig {
    fn default() -> Self {
        MaximalConfig {
            grid: GridSpec::new(-8.0, 8.0, 1.0 / 64.0, 0.0),
            f: "indicator:-1,1".into(),
            input: None,
            kind: MaximalKind::UncenteredGridAligned,
            seed: 0,
        }
    }
}

#[derive(Debug, Serialize)]
struct MaximalReport {
    kind: MaximalKind,
    integral_f: f64,
    max_f: f64,
    max_mf: f64,
    /// `‖Mf‖_{L^{1,∞}}`
    weak_l1_mf: f64,
    weak_over_integral: f64,
}

impl Experiment for MaximalConfig {
    const NAME: &'static str = "maximal";

    fn seed(&self) -> u64 {
        self.seed
    }

    fn run(&self, out: &mut Output) -> Result<String, CliError> {
        let f = match &self.input {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| CliError::validation(format!("input {}: {e}", p.display())))?;
                StepFunction::from_csv(&text).map_err(at("input"))?
            }
            None => sample("f", &self.f, &self.grid.rung(0)?)?,
        };
        let grid = *f.grid();
        let mf = maximal_fast(&f, self.kind);
        let integral_f = integrate(&f);
        let weak_l1_mf = weak_norm(&mf, 1.0, &WeightedMeasure::lebesgue(grid)).map_err(at("f"))?;
        let report = MaximalReport {
            kind: self.kind,
            integral_f,
            max_f: f.max_value(),
            max_mf: mf.max_value(),
            weak_l1_mf,
            weak_over_integral: safe_ratio(weak_l1_mf, integral_f),
        };
        out.json(grid_json(&grid), self, &report)?;
        let rows = (0..grid.n_cells()).map(|i| format!("{},{},{}", fmt17(grid.center(i)), fmt17(f.values()[i]), fmt17(mf.values()[i])));
        out.csv(None, "x_center,f,mf", rows)?;
        let pts: Vec<(f64, f64)> = (0..grid.n_cells()).map(|i| (grid.center(i), mf.values()[i])).collect();
        out.plot("mf", &pts)?;
        Ok(format!(
            "max_mf={} weak_l1_mf={} integral_f={}",
            num(report.max_mf),
            num(weak_l1_mf),
            num(integral_f)
        ))
    }
}
