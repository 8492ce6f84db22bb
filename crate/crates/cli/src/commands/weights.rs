use mixweak::numeric::fmt17;
use mixweak::weights::{a1_constant, ainfty_fw, ap_constant, lemma4_check, rh_constant, ConstantEstimate, Lemma4Report};
use serde::{Deserialize, Serialize};

use super::{family, grids_json, num, sample, Experiment, GridSpec};
use crate::error::{at, CliError};
use crate::output::Output;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Lemma4Config {
    pub u: String,
    pub w: String,
    pub epsilon: Vec<f64>,
}

impl Default for Lemma4Config {
    fn default() -> Self {
        Lemma4Config {
            u: "step:-1,1,1,4".into(),
            w: "power:-0.5".into(),
            epsilon: vec![0.1, 0.3, 0.5],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WeightsConfig {
    pub grid: GridSpec,
    pub w: String,
    /// `all`, `dyadic` or `windowed:L`
    pub family: String,
    pub ap_p: Vec<f64>,
    /// Finite reverse Hölder exponents.
    pub rh_s: Vec<f64>,
    pub rh_infinity: bool,
    pub ainfty: bool,
    /// Number of dx halvings; every rung is reported.
    pub refinements: u32,
    pub lemma4: Option<Lemma4Config>,
    pub seed: u64,
}

impl Default for WeightsConfig {
    fn default() -> Self {
        WeightsConfig {
            grid: GridSpec::new(-4.0, 4.0, 1.0 / 32.0, 0.0),
            w: "power:-0.5".into(),
            family: "all".into(),
            ap_p: vec![2.0],
            rh_s: vec![2.0],
            rh_infinity: true,
            ainfty: true,
            refinements: 2,
            lemma4: None,
            seed: 0,
        }
    }
}

#[derive(Debug, Serialize)]
struct Row {
    constant: &'static str,
    /// `p` or `s`; `None` for parameter-free constants and for `s = ∞`
    param: Option<f64>,
    estimate: ConstantEstimate,
}

#[derive(Debug, Serialize)]
struct Rung {
    dx: f64,
    constants: Vec<Row>,
    lemma4: Vec<Lemma4Report>,
}

impl Row {
    fn key(&self) -> String {
        match (self.constant, self.param) {
            (c, Some(p)) => format!("{c}_{p}"),
            ("rh", None) => "rh_inf".into(),
            (c, None) => c.into(),
        }
    }
}

impl Experiment for WeightsConfig {
    const NAME: &'static str = "weights";

    fn seed(&self) -> u64 {
        self.seed
    }

    fn run(&self, out: &mut Output) -> Result<String, CliError> {
        let grids = self.grid.ladder(self.refinements)?;
        let mut rungs = Vec::new();
        for grid in &grids {
            let w = sample("w", &self.w, grid)?;
            let fam = family("family", &self.family, grid.n_cells())?;
            let mut constants = vec![Row {
                constant: "a1",
                param: None,
                estimate: a1_constant(&w, &fam).map_err(at("w"))?,
            }];
            for &p in &self.ap_p {
                constants.push(Row {
                    constant: "ap",
                    param: Some(p),
                    estimate: ap_constant(&w, p, &fam).map_err(at("ap_p"))?,
                });
            }
            for &s in &self.rh_s {
                constants.push(Row {
                    constant: "rh",
                    param: Some(s),
                    estimate: rh_constant(&w, s, &fam).map_err(at("rh_s"))?,
                });
            }
            if self.rh_infinity {
                constants.push(Row {
                    constant: "rh",
                    param: None,
                    estimate: rh_constant(&w, f64::INFINITY, &fam).map_err(at("rh_infinity"))?,
                });
            }
            if self.ainfty {
                constants.push(Row {
                    constant: "ainfty_fw",
                    param: None,
                    estimate: ainfty_fw(&w, &fam).map_err(at("ainfty"))?,
                });
            }
            let mut lemma4 = Vec::new();
            if let Some(l) = &self.lemma4 {
                let u = sample("lemma4.u", &l.u, grid)?;
                let lw = sample("lemma4.w", &l.w, grid)?;
                for &eps in &l.epsilon {
                    lemma4.push(lemma4_check(&u, &lw, eps, &fam).map_err(at("lemma4.epsilon"))?);
                }
            }
            rungs.push(Rung {
                dx: grid.dx(),
                constants,
                lemma4,
            });
        }
        out.json(grids_json(&grids), self, &rungs)?;
        let mut rows = Vec::new();
        for r in &rungs {
            for c in &r.constants {
                rows.push(format!(
                    "{},{},{},{},{},{}",
                    fmt17(r.dx),
                    c.constant,
                    c.param.map(fmt17).unwrap_or_else(|| if c.constant == "rh" { "inf".into() } else { String::new() }),
                    fmt17(c.estimate.value),
                    c.estimate.argmax_interval.0,
                    c.estimate.argmax_interval.1
                ));
            }
        }
        out.csv(None, "dx,constant,param,value,interval_i,interval_j", rows)?;
        let first = &rungs[0].constants;
        for (k, row) in first.iter().enumerate() {
            let pts: Vec<(f64, f64)> = rungs.iter().map(|r| (r.dx, r.constants[k].estimate.value)).collect();
            out.plot(&row.key(), &pts)?;
        }
        let finest = rungs.last().expect("at least one rung");
        let mut summary: Vec<String> = finest.constants.iter().map(|c| format!("{}={}", c.key(), num(c.estimate.value))).collect();
        if self.lemma4.is_some() {
            let violations = rungs.iter().flat_map(|r| &r.lemma4).filter(|l| !l.holds).count();
            summary.push(format!("lemma4_violations={violations}"));
        }
        Ok(summary.join(" "))
    }
}
