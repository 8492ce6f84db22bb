use mixweak::norms::{
    evaluate_mixed_inequality, holder_weak_check, lorentz_p1_norm, weak_norm, HolderReport, MixedReport, OperatorSel,
    RhsWeightSel, WeightedMeasure,
};
use mixweak::numeric::{fmt17, CompensatedSum};
use serde::{Deserialize, Serialize};

use super::{num, sample, Experiment, GridSpec};
use crate::error::{at, CliError};
use crate::output::{grid_json, Output};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HolderConfig {
    pub h: Vec<String>,
    pub q: Vec<f64>,
    /// Target exponent with `1/target = Σ 1/q_j`.
    pub target: f64,
}

impl Default for HolderConfig {
    fn default() -> Self {
        HolderConfig {
            h: vec!["indicator:0,2".into(), "step:1,3,1,2".into()],
            q: vec![2.0, 2.0],
            target: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MixedConfig {
    pub u: String,
    pub v: String,
    pub operator: OperatorSel,
    pub rhs_weight: RhsWeightSel,
}

impl Default for MixedConfig {
    fn default() -> Self {
        MixedConfig {
            u: "constant:1".into(),
            v: "constant:1".into(),
            operator: OperatorSel::MOfFvOverV,
            rhs_weight: RhsWeightSel::Mu,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NormsConfig {
    pub grid: GridSpec,
    pub f: String,
    /// Density of the measure.
    pub mu: String,
    pub p: f64,
    pub holder: Option<HolderConfig>,
    pub mixed: Option<MixedConfig>,
    pub seed: u64,
}

impl Default for NormsConfig {
    fn default() -> Self {
        NormsConfig {
            grid: GridSpec::new(0.0, 4.0, 1.0 / 64.0, 0.0),
            f: "step:0,1,1,2".into(),
            mu: "constant:1".into(),
            p: 1.0,
            holder: None,
            mixed: None,
            seed: 0,
        }
    }
}

#[derive(Debug, Serialize)]
struct NormsReport {
    weak_norm: f64,
    lorentz_p1_norm: f64,
    mass: f64,
    holder: Option<HolderReport>,
    mixed: Option<MixedReport>,
}

impl Experiment for NormsConfig {
    const NAME: &'static str = "norms";

    fn seed(&self) -> u64 {
        self.seed
    }

    fn run(&self, out: &mut Output) -> Result<String, CliError> {
        if !(self.p > 0.0 && self.p.is_finite()) {
            return Err(CliError::validation(format!("p: {} must be finite and > 0", self.p)));
        }
        let grid = self.grid.rung(0)?;
        let f = sample("f", &self.f, &grid)?;
        let mu = WeightedMeasure::new(sample("mu", &self.mu, &grid)?);
        let holder = match &self.holder {
            Some(h) => {
                let hs = h.h.iter().map(|s| sample("holder.h", s, &grid)).collect::<Result<Vec<_>, _>>()?;
                Some(holder_weak_check(&hs, &h.q, h.target, &mu).map_err(at("holder"))?)
            }
            None => None,
        };
        let mixed = match &self.mixed {
            Some(m) => {
                let u = sample("mixed.u", &m.u, &grid)?;
                let v = sample("mixed.v", &m.v, &grid)?;
                Some(evaluate_mixed_inequality(&f, &u, &v, m.operator, m.rhs_weight).map_err(at("mixed"))?)
            }
            None => None,
        };
        let report = NormsReport {
            weak_norm: weak_norm(&f, self.p, &mu).map_err(at("f"))?,
            lorentz_p1_norm: lorentz_p1_norm(&f, self.p, &mu).map_err(at("f"))?,
            mass: mu.mass(),
            holder,
            mixed,
        };
        out.json(grid_json(&grid), self, &report)?;
        let mut rows = vec![
            format!("weak_norm,{}", fmt17(report.weak_norm)),
            format!("lorentz_p1_norm,{}", fmt17(report.lorentz_p1_norm)),
            format!("mass,{}", fmt17(report.mass)),
        ];
        if let Some(h) = &report.holder {
            rows.push(format!("holder_ratio,{}", fmt17(h.ratio)));
        }
        if let Some(m) = &report.mixed {
            rows.push(format!("mixed_ratio,{}", fmt17(m.ratio)));
        }
        out.csv(None, "quantity,value", rows)?;
        out.plot("distribution", &distribution(f.values(), mu.density.values(), grid.dx()))?;
        Ok(format!(
            "weak_norm={} lorentz_p1_norm={}",
            num(report.weak_norm),
            num(report.lorentz_p1_norm)
        ))
    }
}

/// `(t, μ{f > t})` at `t = 0` and at every distinct value of `f`.
fn distribution(values: &[f64], density: &[f64], dx: f64) -> Vec<(f64, f64)> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let mut pts = Vec::new();
    let mut acc = CompensatedSum::new();
    let mut k = 0;
    while k < order.len() {
        let t = values[order[k]];
        pts.push((t, acc.value()));
        while k < order.len() && values[order[k]] == t {
            acc.add(density[order[k]] * dx);
            k += 1;
        }
    }
    if pts.last().map_or(true, |&(t, _)| t > 0.0) {
        pts.push((0.0, acc.value()));
    }
    pts.reverse();
    pts
}
