use mixweak::experiments::annuli::annuli_check;
use mixweak::numeric::fmt17;
use mixweak::Grid;
use serde::{Deserialize, Serialize};

use super::{num, power_weight, sample, Experiment};
use crate::error::{at, CliError};
use crate::output::{grid_json, Output};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnnuliConfig {
    /// The grid covers `[-radius, radius]` with the cell at the origin excluded.
    pub radius: f64,
    pub dx: f64,
    pub f: String,
    /// `v = |x|^{-r}`
    pub r: f64,
    pub k_min: i32,
    pub k_max: i32,
    pub seed: u64,
}

impl Default for AnnuliConfig {
    fn default() -> Self {
        AnnuliConfig {
            radius: 32.0,
            dx: 1.0 / 16.0,
            f: "indicator:8,16".into(),
            r: 2.0,
            k_min: -3,
            k_max: 3,
            seed: 0,
        }
    }
}

impl Experiment for AnnuliConfig {
    const NAME: &'static str = "annuli";

    fn seed(&self) -> u64 {
        self.seed
    }

    fn run(&self, out: &mut Output) -> Result<String, CliError> {
        if self.k_min > self.k_max {
            return Err(CliError::validation(format!("k_min: {} exceeds k_max {}", self.k_min, self.k_max)));
        }
        let grid = Grid::symmetric(self.radius, self.dx, self.dx).map_err(at("grid"))?;
        let f = sample("f", &self.f, &grid)?;
        let v = power_weight(self.r, &grid)?;
        let report = annuli_check(&f, &v, self.k_min..=self.k_max).map_err(at("f"))?;
        out.json(grid_json(&grid), self, &report)?;
        let rows = report.records.iter().map(|r| {
            format!(
                "{},{},{},{},{},{}",
                r.k,
                r.cells,
                r.sublinear_holds,
                fmt17(r.sublinear_max_quotient),
                fmt17(r.far_constant),
                fmt17(r.core_constant)
            )
        });
        out.csv(None, "k,cells,sublinear_holds,sublinear_max_quotient,far_constant,core_constant", rows)?;
        let far: Vec<(f64, f64)> = report.records.iter().map(|r| (r.k as f64, r.far_constant)).collect();
        let core: Vec<(f64, f64)> = report.records.iter().map(|r| (r.k as f64, r.core_constant)).collect();
        out.plot("far_constant", &far)?;
        out.plot("core_constant", &core)?;
        let all = report.records.iter().all(|r| r.sublinear_holds);
        let max_far = report.records.iter().map(|r| r.far_constant).fold(0.0, f64::max);
        let max_core = report.records.iter().map(|r| r.core_constant).fold(0.0, f64::max);
        Ok(format!(
            "records={} empty={} sublinear_all={all} max_far_constant={} max_core_constant={}",
            report.records.len(),
            report.empty.len(),
            num(max_far),
            num(max_core)
        ))
    }
}
