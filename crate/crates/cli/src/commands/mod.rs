//! One module per experiment. Each owns its config type (strict JSON, every
//! field defaulted) and a `run` that writes the outputs and returns the
//! key metrics for the summary line.

pub mod annuli;
pub mod compare;
pub mod counterexample;
pub mod maximal;
pub mod norms;
pub mod rubio;
pub mod sweep;
pub mod weights;

use mixweak::{sample_weight, FamilyKind, Grid, IntervalFamily, StepFunction, WeightDescriptor};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{at, CliError};
use crate::output::Output;

pub trait Experiment: Serialize + DeserializeOwned + Default {
    const NAME: &'static str;
    fn seed(&self) -> u64;
    fn run(&self, out: &mut Output) -> Result<String, CliError>;
}

/// Uniform grid covering `[left, right]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub left: f64,
    pub right: f64,
    pub dx: f64,
    pub origin_gap: f64,
}

impl GridSpec {
    pub const fn new(left: f64, right: f64, dx: f64, origin_gap: f64) -> Self {
        GridSpec { left, right, dx, origin_gap }
    }

    /// The grid with `dx / 2^halvings`.
    pub fn rung(&self, halvings: u32) -> Result<Grid, CliError> {
        Grid::covering(self.left, self.right, self.dx / 2f64.powi(halvings as i32), self.origin_gap).map_err(at("grid"))
    }

    pub fn ladder(&self, refinements: u32) -> Result<Vec<Grid>, CliError> {
        if refinements > 12 {
            return Err(CliError::validation("refinements: at most 12"));
        }
        (0..=refinements).map(|h| self.rung(h)).collect()
    }
}

pub fn descriptor(key: &str, s: &str) -> Result<WeightDescriptor, CliError> {
    s.parse::<WeightDescriptor>().map_err(|e| CliError::validation(format!("{key}: `{s}`: {e}")))
}

pub fn sample(key: &str, s: &str, grid: &Grid) -> Result<StepFunction, CliError> {
    sample_weight(&descriptor(key, s)?, grid).map_err(at(key))
}

pub fn family(key: &str, s: &str, n_cells: usize) -> Result<IntervalFamily, CliError> {
    let kind: FamilyKind = s.parse().map_err(at(key))?;
    IntervalFamily::new(kind, n_cells).map_err(at(key))
}

pub fn power_weight(r: f64, grid: &Grid) -> Result<StepFunction, CliError> {
    if !(r.is_finite() && r > 0.0) {
        return Err(CliError::validation(format!("r: {r} must be finite and > 0")));
    }
    sample_weight(&WeightDescriptor::power(-r), grid).map_err(at("r"))
}

pub fn grids_json(grids: &[Grid]) -> serde_json::Value {
    serde_json::Value::Array(grids.iter().map(crate::output::grid_json).collect())
}

/// Shortest round-trip form, for summary lines.
pub fn num(x: f64) -> String {
    format!("{x}")
}
