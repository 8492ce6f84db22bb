use mixweak::experiments::sweep::{grid_for, thm2_sweep, SweepConfig, SweepReport, SweepRow};
use serde::Serialize;

use super::{num, Experiment};
use crate::error::{at, CliError};
use crate::output::Output;

pub use mixweak::experiments::sweep::quote;

#[derive(Debug, Serialize)]
struct PlotIndex {
    file: String,
    r: f64,
    u: String,
    f: String,
    /// `dx` for the group curves, `eps` for the borderline ladders
    x: &'static str,
    radius: Option<f64>,
    dx_halving: Option<u32>,
}

#[derive(Debug, Serialize)]
struct Wrapped<'a> {
    #[serde(flatten)]
    report: &'a SweepReport,
    plots: Vec<PlotIndex>,
}

impl Experiment for SweepConfig {
    const NAME: &'static str = "sweep";

    fn seed(&self) -> u64 {
        self.seed
    }

    fn run(&self, out: &mut Output) -> Result<String, CliError> {
        let (norm, _, _) = self.validated().map_err(at("sweep"))?;
        let mut grids = Vec::new();
        for &radius in &norm.radii {
            for &eps in &norm.origin_gaps {
                for &h in &norm.dx_halvings {
                    grids.push(grid_for(radius, eps, h).map_err(at("sweep"))?);
                }
            }
        }
        let report = thm2_sweep(self).map_err(at("sweep"))?;
        let mut plots = Vec::new();
        for (i, g) in report.groups.iter().enumerate() {
            let pts: Vec<(f64, f64)> = report
                .rows
                .iter()
                .filter(|row| row.r == g.r && row.u == g.u && row.f == g.f)
                .map(|row| (row.report.dx, row.report.ratio))
                .collect();
            plots.push(PlotIndex {
                file: out.plot(&format!("group_{i:03}"), &pts)?,
                r: g.r,
                u: g.u.clone(),
                f: g.f.clone(),
                x: "dx",
                radius: None,
                dx_halving: None,
            });
        }
        for (i, l) in report.borderline_ladders.iter().enumerate() {
            let pts: Vec<(f64, f64)> = l.eps.iter().copied().zip(l.ratios.iter().copied()).collect();
            plots.push(PlotIndex {
                file: out.plot(&format!("borderline_{i:03}"), &pts)?,
                r: l.r,
                u: l.u.clone(),
                f: l.f.clone(),
                x: "eps",
                radius: Some(l.radius),
                dx_halving: Some(l.dx_halving),
            });
        }
        out.json(super::grids_json(&grids), self, &Wrapped { report: &report, plots })?;
        out.csv(None, &SweepRow::csv_header(), report.rows.iter().map(SweepRow::csv_row))?;
        let max_ratio = report.rows.iter().map(|r| r.report.ratio).fold(0.0, f64::max);
        let max_variation = report.groups.iter().map(|g| g.variation).fold(0.0, f64::max);
        let all_finite = report.groups.iter().all(|g| g.all_finite);
        let mut summary = format!(
            "rows={} groups={} max_ratio={} max_variation={} all_finite={all_finite}",
            report.rows.len(),
            report.groups.len(),
            num(max_ratio),
            num(max_variation)
        );
        if !report.borderline_ladders.is_empty() {
            let monotone = report.borderline_ladders.iter().all(|l| l.non_decreasing);
            summary.push_str(&format!(" borderline_non_decreasing={monotone}"));
        }
        if !report.skipped.is_empty() {
            summary.push_str(&format!(" skipped={}", report.skipped.len()));
        }
        Ok(summary)
    }
}
