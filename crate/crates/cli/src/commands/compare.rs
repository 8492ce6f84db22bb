//! `compare-llogl`, `vector` and `multilinear`: refinement ladders of the
//! comparisons built on the maximal operators.

use mixweak::experiments::compare::{m2_llogl_compare, multilinear_check, vector_valued_check, LloglComparison, MultilinearReport};
use mixweak::norms::MixedReport;
use mixweak::numeric::fmt17;
use mixweak::StepFunction;
use serde::{Deserialize, Serialize};

use super::{family, grids_json, num, power_weight, sample, Experiment, GridSpec};
use crate::commands::sweep::quote;
use crate::error::{at, CliError};
use crate::output::Output;

fn sample_all(key: &str, fs: &[String], grid: &mixweak::Grid) -> Result<Vec<StepFunction>, CliError> {
    if fs.is_empty() {
        return Err(CliError::validation(format!("{key}: must not be empty")));
    }
    fs.iter().enumerate().map(|(i, s)| sample(&format!("{key}[{i}]"), s, grid)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CompareLloglConfig {
    pub grid: GridSpec,
    pub fs: Vec<String>,
    pub family: String,
    pub refinements: u32,
    pub seed: u64,
}

impl Default for CompareLloglConfig {
    fn default() -> Self {
        CompareLloglConfig {
            grid: GridSpec::new(-4.0, 4.0, 1.0 / 16.0, 0.0),
            fs: vec![
                "constant:2".into(),
                "indicator:-1,1".into(),
                "spike:0.5,0.0625".into(),
                "step:-2,0,1,3".into(),
                "power:-0.5".into(),
            ],
            family: "all".into(),
            refinements: 2,
            seed: 0,
        }
    }
}

#[derive(Debug, Serialize)]
struct LloglRung {
    dx: f64,
    comparison: LloglComparison,
}

impl Experiment for CompareLloglConfig {
    const NAME: &'static str = "compare-llogl";

    fn seed(&self) -> u64 {
        self.seed
    }

    fn run(&self, out: &mut Output) -> Result<String, CliError> {
        let grids = self.grid.ladder(self.refinements)?;
        let mut rungs = Vec::new();
        for grid in &grids {
            let fs = sample_all("fs", &self.fs, grid)?;
            let fam = family("family", &self.family, grid.n_cells())?;
            rungs.push(LloglRung {
                dx: grid.dx(),
                comparison: m2_llogl_compare(&fs, &fam).map_err(at("fs"))?,
            });
        }
        out.json(grids_json(&grids), self, &rungs)?;
        let mut rows = Vec::new();
        for r in &rungs {
            for (label, p) in self.fs.iter().zip(&r.comparison.per_function) {
                rows.push(format!("{},{},{},{},{}", fmt17(r.dx), quote(label), fmt17(p.c_lo), fmt17(p.c_hi), p.cells));
            }
        }
        out.csv(None, "dx,f,c_lo,c_hi,cells", rows)?;
        let lo: Vec<(f64, f64)> = rungs.iter().map(|r| (r.dx, r.comparison.c_lo)).collect();
        let hi: Vec<(f64, f64)> = rungs.iter().map(|r| (r.dx, r.comparison.c_hi)).collect();
        out.plot("c_lo", &lo)?;
        out.plot("c_hi", &hi)?;
        let last = &rungs.last().expect("at least one rung").comparison;
        Ok(format!("c_lo={} c_hi={} rungs={}", num(last.c_lo), num(last.c_hi), rungs.len()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VectorConfig {
    pub grid: GridSpec,
    pub fs: Vec<String>,
    pub q: f64,
    pub u: String,
    /// `v = |x|^{-r}`
    pub r: f64,
    pub refinements: u32,
    pub seed: u64,
}

impl Default for VectorConfig {
    fn default() -> Self {
        VectorConfig {
            grid: GridSpec::new(-8.0, 8.0, 1.0 / 32.0, 1.0 / 32.0),
            fs: vec!["indicator:1,2".into(), "indicator:2,3".into(), "indicator:3,4".into()],
            q: 2.0,
            u: "constant:1".into(),
            r: 2.0,
            refinements: 2,
            seed: 0,
        }
    }
}

#[derive(Debug, Serialize)]
struct VectorRung {
    dx: f64,
    report: MixedReport,
}

impl Experiment for VectorConfig {
    const NAME: &'static str = "vector";

    fn seed(&self) -> u64 {
        self.seed
    }

    fn run(&self, out: &mut Output) -> Result<String, CliError> {
        let grids = self.grid.ladder(self.refinements)?;
        let mut rungs = Vec::new();
        for grid in &grids {
            let fs = sample_all("fs", &self.fs, grid)?;
            let u = sample("u", &self.u, grid)?;
            let v = power_weight(self.r, grid)?;
            rungs.push(VectorRung {
                dx: grid.dx(),
                report: vector_valued_check(&fs, self.q, &u, &v).map_err(at("q"))?,
            });
        }
        out.json(grids_json(&grids), self, &rungs)?;
        // the mixed columns already carry dx
        out.csv(None, MixedReport::CSV_HEADER, rungs.iter().map(|r| r.report.csv_row()))?;
        let pts: Vec<(f64, f64)> = rungs.iter().map(|r| (r.dx, r.report.ratio)).collect();
        out.plot("ratio", &pts)?;
        let ratios: Vec<f64> = rungs.iter().map(|r| r.report.ratio).collect();
        Ok(format!(
            "ratio_finest={} ratio_max={} ratio_min={}",
            num(*ratios.last().expect("at least one rung")),
            num(ratios.iter().copied().fold(0.0, f64::max)),
            num(ratios.iter().copied().fold(f64::INFINITY, f64::min))
        ))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MultilinearConfig {
    pub grid: GridSpec,
    pub f1: String,
    pub f2: String,
    pub u: String,
    pub r: f64,
    pub family: String,
    pub refinements: u32,
    pub seed: u64,
}

impl Default for MultilinearConfig {
    fn default() -> Self {
        MultilinearConfig {
            grid: GridSpec::new(-8.0, 8.0, 1.0 / 16.0, 1.0 / 16.0),
            f1: "indicator:1,2".into(),
            f2: "indicator:1,2".into(),
            u: "constant:1".into(),
            r: 2.0,
            family: "all".into(),
            refinements: 1,
            seed: 0,
        }
    }
}

#[derive(Debug, Serialize)]
struct MultilinearRung {
    dx: f64,
    report: MultilinearReport,
}

impl Experiment for MultilinearConfig {
    const NAME: &'static str = "multilinear";

    fn seed(&self) -> u64 {
        self.seed
    }

    fn run(&self, out: &mut Output) -> Result<String, CliError> {
        let grids = self.grid.ladder(self.refinements)?;
        let mut rungs = Vec::new();
        for grid in &grids {
            let f1 = sample("f1", &self.f1, grid)?;
            let f2 = sample("f2", &self.f2, grid)?;
            let u = sample("u", &self.u, grid)?;
            let v = power_weight(self.r, grid)?;
            let fam = family("family", &self.family, grid.n_cells())?;
            rungs.push(MultilinearRung {
                dx: grid.dx(),
                report: multilinear_check(&f1, &f2, &u, &v, &fam).map_err(at("f1"))?,
            });
        }
        out.json(grids_json(&grids), self, &rungs)?;
        let rows = rungs.iter().map(|r| {
            let m = &r.report;
            format!(
                "{},{},{},{},{},{},{},{}",
                fmt17(r.dx),
                m.pointwise_holds,
                fmt17(m.pointwise_max_quotient),
                fmt17(m.lhs),
                fmt17(m.rhs_chain),
                fmt17(m.rhs_final),
                fmt17(m.ratio_chain),
                fmt17(m.ratio_final)
            )
        });
        out.csv(
            None,
            "dx,pointwise_holds,pointwise_max_quotient,lhs,rhs_chain,rhs_final,ratio_chain,ratio_final",
            rows,
        )?;
        let chain: Vec<(f64, f64)> = rungs.iter().map(|r| (r.dx, r.report.ratio_chain)).collect();
        let fin: Vec<(f64, f64)> = rungs.iter().map(|r| (r.dx, r.report.ratio_final)).collect();
        out.plot("ratio_chain", &chain)?;
        out.plot("ratio_final", &fin)?;
        let last = &rungs.last().expect("at least one rung").report;
        let holds = rungs.iter().all(|r| r.report.pointwise_holds);
        Ok(format!(
            "pointwise_holds={holds} ratio_chain={} ratio_final={}",
            num(last.ratio_chain),
            num(last.ratio_final)
        ))
    }
}
