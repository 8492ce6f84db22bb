use mixweak::experiments::counterexample::{sawyer_counterexample, CounterexampleParams, CounterexampleReport};
use mixweak::numeric::{fmt17, CompensatedSum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{num, Experiment};
use crate::error::{at, CliError};
use crate::output::Output;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CounterexampleConfig {
    pub k_max: u64,
    /// Further `k_max` values for the lhs-vs-`k_max` curve.
    pub ladder: Vec<u64>,
    pub params: CounterexampleParams,
    pub seed: u64,
}

impl Default for CounterexampleConfig {
    fn default() -> Self {
        CounterexampleConfig {
            k_max: 1000,
            ladder: Vec::new(),
            params: CounterexampleParams::default(),
            seed: 0,
        }
    }
}

#[derive(Debug, Serialize)]
struct LadderPoint {
    k_max: u64,
    lhs_partial: f64,
    lhs_closed_form: f64,
    rhs_estimate: Option<f64>,
    m2u_max_on_unit: Option<f64>,
    n_cells: usize,
}

impl From<&CounterexampleReport> for LadderPoint {
    fn from(r: &CounterexampleReport) -> Self {
        LadderPoint {
            k_max: r.k_max,
            lhs_partial: r.lhs_partial,
            lhs_closed_form: r.lhs_closed_form,
            rhs_estimate: r.rhs_estimate,
            m2u_max_on_unit: r.m2u_max_on_unit,
            n_cells: r.n_cells,
        }
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_else(|| "none".into())
}

impl Experiment for CounterexampleConfig {
    const NAME: &'static str = "counterexample";

    fn seed(&self) -> u64 {
        self.seed
    }

    fn run(&self, out: &mut Output) -> Result<String, CliError> {
        let main = sawyer_counterexample(self.k_max, &self.params).map_err(at("k_max"))?;
        let mut ladder = Vec::new();
        for &k in &self.ladder {
            let r = sawyer_counterexample(k, &self.params).map_err(at("ladder"))?;
            ladder.push(LadderPoint::from(&r));
        }
        // per-k terms go to the CSV; the JSON keeps the aggregates
        let mut report = serde_json::to_value(&main).expect("report serializes");
        report.as_object_mut().expect("struct").remove("per_k_terms");
        report["ladder"] = serde_json::to_value(&ladder).expect("ladder serializes");
        let grid = json!({
            "left": -2.0,
            "right": self.k_max as f64 + 1.0,
            "n_cells": main.n_cells,
            "dx_at_k_max": main.dx_at_k_max,
            "coarse_dx": self.params.coarse_dx,
        });
        out.json(grid, self, &report)?;
        let rows = main
            .per_k_terms
            .iter()
            .map(|t| format!("{},{},{}", t.k, fmt17(t.numeric), fmt17(t.closed_form)));
        out.csv(None, "k,numeric,closed_form", rows)?;
        let mut numeric = CompensatedSum::new();
        let mut closed = CompensatedSum::new();
        let mut pn = Vec::with_capacity(main.per_k_terms.len());
        let mut pc = Vec::with_capacity(main.per_k_terms.len());
        for t in &main.per_k_terms {
            numeric.add(t.numeric);
            closed.add(t.closed_form);
            pn.push((t.k as f64, numeric.value()));
            pc.push((t.k as f64, closed.value()));
        }
        out.plot("lhs_partial", &pn)?;
        out.plot("lhs_closed_form", &pc)?;
        if !ladder.is_empty() {
            let pts: Vec<(f64, f64)> = ladder.iter().map(|p| (p.k_max as f64, p.lhs_partial)).collect();
            out.plot("ladder", &pts)?;
        }
        Ok(format!(
            "k_max={} lhs_partial={} lhs_closed_form={} m2u_max={} rhs_estimate={}",
            main.k_max,
            num(main.lhs_partial),
            num(main.lhs_closed_form),
            opt(main.m2u_max_on_unit),
            opt(main.rhs_estimate)
        ))
    }
}
