use mixweak::numeric::fmt17;
use mixweak::rubio::{estimate_norm_bound, rubio_verify, NormBound, RubioConfig, RubioVerification, DEFAULT_RHO};
use mixweak::seeded_step_functions;
use serde::{Deserialize, Serialize};

use super::{num, sample, Experiment, GridSpec};
use crate::error::{at, CliError};
use crate::output::{grid_json, Output};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RubioCmdConfig {
    pub grid: GridSpec,
    pub u: String,
    pub v1: String,
    pub lambda: f64,
    pub delta: f64,
    pub q: f64,
    pub j_max: usize,
    pub rho: f64,
    /// Fixed `K0`; estimated from `probes` seeded probes when absent.
    pub k0: Option<f64>,
    pub probes: usize,
    /// Descriptors of the functions `h`.
    pub h: Vec<String>,
    /// Additional seeded random step functions.
    pub random_h: usize,
    pub seed: u64,
}

impl Default for RubioCmdConfig {
    fn default() -> Self {
        RubioCmdConfig {
            grid: GridSpec::new(0.0, 1.0, 1.0 / 256.0, 0.0),
            u: "constant:1".into(),
            v1: "constant:1".into(),
            lambda: 2.0,
            delta: 1.0,
            q: 2.0,
            j_max: mixweak::rubio::DEFAULT_J_MAX,
            rho: DEFAULT_RHO,
            k0: None,
            probes: mixweak::rubio::DEFAULT_PROBES,
            h: vec!["indicator:0.25,0.5".into(), "power:-0.5".into()],
            random_h: 0,
            seed: 0,
        }
    }
}

#[derive(Debug, Serialize)]
struct Verified {
    label: String,
    verification: RubioVerification,
}

#[derive(Debug, Serialize)]
struct RubioReport {
    norm_bound: Option<NormBound>,
    k0: f64,
    results: Vec<Verified>,
}

impl Experiment for RubioCmdConfig {
    const NAME: &'static str = "rubio";

    fn seed(&self) -> u64 {
        self.seed
    }

    fn run(&self, out: &mut Output) -> Result<String, CliError> {
        let grid = self.grid.rung(0)?;
        let u = sample("u", &self.u, &grid)?;
        let v1 = sample("v1", &self.v1, &grid)?;
        let mut base = RubioConfig::new(u, v1, self.lambda, self.delta, self.j_max, self.k0.unwrap_or(1.0)).map_err(at("rubio"))?;
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return Err(CliError::validation(format!("rho: {} must lie in (0, 1)", self.rho)));
        }
        base.rho = self.rho;
        let (norm_bound, cfg) = match self.k0 {
            Some(_) => (None, base),
            None => {
                let nb = estimate_norm_bound(&base, self.q, self.probes, self.seed).map_err(at("probes"))?;
                let mut cfg = base.with_k0(nb.k0_hat).map_err(at("k0"))?;
                cfg.rho = self.rho;
                (Some(nb), cfg)
            }
        };
        let mut hs = Vec::new();
        for (i, s) in self.h.iter().enumerate() {
            hs.push((s.clone(), sample(&format!("h[{i}]"), s, &grid)?));
        }
        for (i, f) in seeded_step_functions(&grid, self.random_h, self.seed).into_iter().enumerate() {
            hs.push((format!("random[{i}]"), f));
        }
        if hs.is_empty() {
            return Err(CliError::validation("h: no functions given (set h or random_h)"));
        }
        let mut results = Vec::new();
        for (label, h) in hs {
            let verification = rubio_verify(&h, &cfg, self.q).map_err(at(&label))?;
            results.push(Verified { label, verification });
        }
        let report = RubioReport {
            norm_bound,
            k0: cfg.k0,
            results,
        };
        out.json(grid_json(&grid), self, &report)?;
        let rows = report.results.iter().map(|r| {
            let v = &r.verification;
            format!(
                "{},{},{},{},{},{}",
                crate::commands::sweep::quote(&r.label),
                v.prop_a,
                fmt17(v.prop_b_ratio),
                v.prop_c,
                fmt17(v.prop_c_max_quotient),
                fmt17(v.decay_ratios.last().copied().unwrap_or(0.0))
            )
        });
        out.csv(None, "h,prop_a,prop_b_ratio,prop_c,prop_c_max_quotient,last_decay_ratio", rows)?;
        let decay: Vec<(f64, f64)> = report.results[0]
            .verification
            .decay_ratios
            .iter()
            .enumerate()
            .map(|(j, &r)| ((j + 1) as f64, r))
            .collect();
        out.plot("decay", &decay)?;
        let all_a = report.results.iter().all(|r| r.verification.prop_a);
        let all_c = report.results.iter().all(|r| r.verification.prop_c);
        let worst_b = report.results.iter().map(|r| r.verification.prop_b_ratio).fold(0.0, f64::max);
        Ok(format!(
            "k0={} prop_a={all_a} prop_c={all_c} max_prop_b_ratio={}",
            num(report.k0),
            num(worst_b)
        ))
    }
}
