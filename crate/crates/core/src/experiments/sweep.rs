//! Ladder sweep of the mixed weak-type ratio for `v = |x|^{-r}`, with
//! `T = M(f v)/v` and right side `∫ f · Mu · v`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{integrate, Grid, StepFunction};
use crate::maximal::maximal;
use crate::norms::{divide_by_weight, mixed_report_from, MixedReport, OperatorSel, RhsWeightSel, WeightedMeasure};
use crate::numeric::fmt17;
use crate::sampling::{sample_weight, WeightDescriptor};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    /// Exponents of `v = |x|^{-r}`; `1.0` runs the exploratory borderline ladder.
    pub r_values: Vec<f64>,
    /// Truncation radii `R`: the grid covers `[-R, R]`.
    pub radii: Vec<f64>,
    /// Half-widths `ε` of the excluded neighbourhood of the origin.
    pub origin_gaps: Vec<f64>,
    /// Resolutions as halvings of the gap: `dx = ε / 2^h`.
    pub dx_halvings: Vec<u32>,
    /// Weights `u`, in the compact descriptor syntax.
    pub u: Vec<String>,
    /// Functions `f`, in the compact descriptor syntax.
    pub f: Vec<String>,
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            r_values: vec![1.5, 2.0, 3.0],
            radii: vec![32.0, 64.0, 128.0, 256.0],
            origin_gaps: (8..=11).map(|m| 2f64.powi(-m)).collect(),
            dx_halvings: vec![0, 1],
            u: vec!["constant:1".into(), "step:0.5,3,1,4".into(), "staircase:1000".into()],
            f: vec!["indicator:1,2".into(), "indicator:-1,1".into(), "spike:0.5,0.00390625".into()],
            seed: 0,
        }
    }
}

fn sorted_unique(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

impl SweepConfig {
    /// Checks every ladder and returns a normalized copy (ladders sorted,
    /// duplicates dropped) with the parsed descriptors.
    pub fn validated(&self) -> Result<(SweepConfig, Vec<WeightDescriptor>, Vec<WeightDescriptor>)> {
        let mut c = self.clone();
        c.r_values = sorted_unique(c.r_values);
        c.radii = sorted_unique(c.radii);
        // coarse to fine
        c.origin_gaps = sorted_unique(c.origin_gaps);
        c.origin_gaps.reverse();
        c.dx_halvings.sort_unstable();
        c.dx_halvings.dedup();
        for (name, list) in [("r_values", &c.r_values), ("radii", &c.radii), ("origin_gaps", &c.origin_gaps)] {
            if list.is_empty() {
                return Err(Error::param(name, "must not be empty"));
            }
            if list.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
                return Err(Error::param(name, "entries must be finite and > 0"));
            }
        }
        if let Some(r) = c.r_values.iter().find(|&&r| r < 1.0) {
            return Err(Error::param("r_values", format!("{r} must be >= 1")));
        }
        if c.dx_halvings.is_empty() || c.dx_halvings.iter().any(|&h| h > 12) {
            return Err(Error::param("dx_halvings", "must be non-empty with entries <= 12"));
        }
        if c.u.is_empty() || c.f.is_empty() {
            return Err(Error::param(if c.u.is_empty() { "u" } else { "f" }, "must not be empty"));
        }
        let parse = |name: &str, s: &String| {
            s.parse::<WeightDescriptor>()
                .map_err(|e| Error::param(name, format!("`{s}`: {e}")))
        };
        let us = c.u.iter().map(|s| parse("u", s)).collect::<Result<Vec<_>>>()?;
        let fs = c.f.iter().map(|s| parse("f", s)).collect::<Result<Vec<_>>>()?;
        for &radius in &c.radii {
            for &eps in &c.origin_gaps {
                for &h in &c.dx_halvings {
                    grid_for(radius, eps, h)?;
                }
            }
        }
        Ok((c, us, fs))
    }

    pub fn combinations(&self) -> usize {
        self.r_values.len() * self.radii.len() * self.origin_gaps.len() * self.dx_halvings.len() * self.u.len() * self.f.len()
    }
}

pub fn grid_for(radius: f64, eps: f64, halvings: u32) -> Result<Grid> {
    if !(eps < radius) {
        return Err(Error::param("origin_gaps", format!("gap {eps} must be smaller than radius {radius}")));
    }
    Grid::symmetric(radius, eps / 2f64.powi(halvings as i32), eps)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub r: f64,
    pub u: String,
    pub f: String,
    pub radius: f64,
    pub eps: f64,
    pub report: MixedReport,
}

impl SweepRow {
    pub fn csv_header() -> String {
        format!("r,u,f,radius,eps,{}", MixedReport::CSV_HEADER)
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            fmt17(self.r),
            quote(&self.u),
            quote(&self.f),
            fmt17(self.radius),
            fmt17(self.eps),
            self.report.csv_row()
        )
    }
}

/// CSV field quoting for labels that contain commas or quotes.
pub fn quote(s: &str) -> String {
    if s.contains([',', '"']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepGroup {
    pub r: f64,
    pub u: String,
    pub f: String,
    pub max_ratio: f64,
    pub min_ratio: f64,
    /// `max_ratio / min_ratio` over the ladder
    pub variation: f64,
    /// ratio on the coarsest and on the finest resolution (largest and smallest `dx`)
    pub coarsest_ratio: f64,
    pub finest_ratio: f64,
    pub all_finite: bool,
    pub points: usize,
}

/// Ratios along the gap ladder (coarse to fine) at fixed `R` and halving.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapLadder {
    pub r: f64,
    pub u: String,
    pub f: String,
    pub radius: f64,
    pub dx_halving: u32,
    pub eps: Vec<f64>,
    pub ratios: Vec<f64>,
    pub non_decreasing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkippedCombination {
    pub key: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub config: SweepConfig,
    pub rows: Vec<SweepRow>,
    pub groups: Vec<SweepGroup>,
    /// Gap ladders for `r = 1`.
    pub borderline_ladders: Vec<GapLadder>,
    pub skipped: Vec<SkippedCombination>,
}

/// Runs every combination in a fixed order: grid `(R, ε, h)` outermost,
/// then `r`, `u`, `f`.
pub fn thm2_sweep(cfg: &SweepConfig) -> Result<SweepReport> {
    let (cfg, us, fs) = cfg.validated()?;
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for &radius in &cfg.radii {
        for &eps in &cfg.origin_gaps {
            for &h in &cfg.dx_halvings {
                let grid = grid_for(radius, eps, h)?;
                log::info!("sweep grid R={radius} eps={eps} dx={} ({} cells)", grid.dx(), grid.n_cells());
                let mut u_data = Vec::new();
                for (label, u) in cfg.u.iter().zip(&us) {
                    match sample_weight(u, &grid) {
                        Ok(su) => {
                            let mu = maximal(&su);
                            u_data.push(Some((su, mu)));
                        }
                        Err(e) => {
                            skipped.push(SkippedCombination {
                                key: format!("u={label} R={radius} eps={eps} h={h}"),
                                reason: e.to_string(),
                            });
                            u_data.push(None);
                        }
                    }
                }
                let f_data: Vec<Option<StepFunction>> = fs.iter().map(|f| sample_weight(f, &grid).ok()).collect();
                for &r in &cfg.r_values {
                    let v = sample_weight(&WeightDescriptor::power(-r), &grid)?;
                    for ((f_label, f), f_desc) in cfg.f.iter().zip(&f_data).zip(&fs) {
                        let key = |u_label: &str| format!("r={r} u={u_label} f={f_label} R={radius} eps={eps} h={h}");
                        let Some(f) = f else {
                            let reason = sample_weight(f_desc, &grid).err().map(|e| e.to_string()).unwrap_or_default();
                            for u_label in &cfg.u {
                                skipped.push(SkippedCombination { key: key(u_label), reason: reason.clone() });
                            }
                            continue;
                        };
                        let fv = f.mul(&v)?;
                        let t = divide_by_weight(&maximal(&fv), &v)?;
                        for (u_label, ud) in cfg.u.iter().zip(&u_data) {
                            let Some((su, mu)) = ud else { continue };
                            let uv = WeightedMeasure::new(su.mul(&v)?);
                            let rhs = integrate(&fv.mul(mu)?);
                            let report = mixed_report_from(&t, &uv, rhs, OperatorSel::MOfFvOverV, RhsWeightSel::Mu)?;
                            if !report.ratio.is_finite() {
                                log::warn!("non-finite ratio at {}", key(u_label));
                            }
                            rows.push(SweepRow {
                                r,
                                u: u_label.clone(),
                                f: f_label.clone(),
                                radius,
                                eps,
                                report,
                            });
                        }
                    }
                }
            }
        }
    }
    let groups = group_rows(&cfg, &rows);
    let borderline_ladders = gap_ladders(&cfg, &rows);
    Ok(SweepReport {
        config: cfg,
        rows,
        groups,
        borderline_ladders,
        skipped,
    })
}

fn group_rows(cfg: &SweepConfig, rows: &[SweepRow]) -> Vec<SweepGroup> {
    let mut out = Vec::new();
    for &r in &cfg.r_values {
        for u in &cfg.u {
            for f in &cfg.f {
                let members: Vec<&SweepRow> = rows.iter().filter(|row| row.r == r && &row.u == u && &row.f == f).collect();
                if members.is_empty() {
                    continue;
                }
                let ratios: Vec<f64> = members.iter().map(|m| m.report.ratio).collect();
                let max_ratio = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let min_ratio = ratios.iter().copied().fold(f64::INFINITY, f64::min);
                // stable choice on ties: first coarsest, last finest in sweep order
                let coarsest = members
                    .iter()
                    .rev()
                    .max_by(|a, b| a.report.dx.total_cmp(&b.report.dx))
                    .unwrap();
                let finest = members
                    .iter()
                    .min_by(|a, b| a.report.dx.total_cmp(&b.report.dx))
                    .unwrap();
                out.push(SweepGroup {
                    r,
                    u: u.clone(),
                    f: f.clone(),
                    max_ratio,
                    min_ratio,
                    variation: if min_ratio > 0.0 { max_ratio / min_ratio } else { f64::INFINITY },
                    coarsest_ratio: coarsest.report.ratio,
                    finest_ratio: finest.report.ratio,
                    all_finite: ratios.iter().all(|x| x.is_finite()),
                    points: members.len(),
                });
            }
        }
    }
    out
}

fn gap_ladders(cfg: &SweepConfig, rows: &[SweepRow]) -> Vec<GapLadder> {
    let mut out = Vec::new();
    for &r in cfg.r_values.iter().filter(|&&r| r == 1.0) {
        for u in &cfg.u {
            for f in &cfg.f {
                for &radius in &cfg.radii {
                    for &h in &cfg.dx_halvings {
                        let mut eps = Vec::new();
                        let mut ratios = Vec::new();
                        for &e in &cfg.origin_gaps {
                            let dx = e / 2f64.powi(h as i32);
                            if let Some(row) = rows.iter().find(|row| {
                                row.r == r && &row.u == u && &row.f == f && row.radius == radius && row.eps == e && row.report.dx == dx
                            }) {
                                eps.push(e);
                                ratios.push(row.report.ratio);
                            }
                        }
                        let non_decreasing = ratios.windows(2).all(|w| w[1] >= w[0]);
                        out.push(GapLadder {
                            r,
                            u: u.clone(),
                            f: f.clone(),
                            radius,
                            dx_halving: h,
                            eps,
                            ratios,
                            non_decreasing,
                        });
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SweepConfig {
        SweepConfig {
            r_values: vec![2.0],
            radii: vec![8.0, 16.0],
            origin_gaps: vec![1.0 / 32.0, 1.0 / 64.0],
            dx_halvings: vec![0, 1],
            u: vec!["constant:1".into()],
            f: vec!["indicator:1,2".into()],
            seed: 3,
        }
    }

    #[test]
    fn small_sweep_is_stable() {
        let rep = thm2_sweep(&small()).unwrap();
        assert_eq!(rep.rows.len(), 8);
        assert_eq!(rep.groups.len(), 1);
        let g = &rep.groups[0];
        assert!(g.all_finite);
        assert!(g.variation < 2.0, "variation {}", g.variation);
        assert!(rep.borderline_ladders.is_empty());
    }

    #[test]
    fn invalid_configs() {
        let mut c = small();
        c.r_values = vec![0.5];
        assert!(c.validated().is_err());
        let mut c = small();
        c.u = vec!["nonsense".into()];
        assert!(matches!(c.validated(), Err(Error::InvalidParameter { .. })));
        let mut c = small();
        c.origin_gaps = vec![0.3];
        // 8 / 0.3 is not an integer number of cells
        assert!(c.validated().is_err());
    }

    #[test]
    fn csv_quotes_labels() {
        let rep = thm2_sweep(&small()).unwrap();
        let row = rep.rows[0].csv_row();
        assert!(row.contains("\"indicator:1,2\""));
    }

    #[test]
    fn borderline_ladder_reported() {
        let mut c = small();
        c.r_values = vec![1.0];
        c.f = vec!["indicator:-1,1".into()];
        c.radii = vec![8.0];
        c.dx_halvings = vec![0];
        c.origin_gaps = vec![1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0];
        let rep = thm2_sweep(&c).unwrap();
        assert_eq!(rep.borderline_ladders.len(), 1);
        assert_eq!(rep.borderline_ladders[0].ratios.len(), 3);
    }
}
