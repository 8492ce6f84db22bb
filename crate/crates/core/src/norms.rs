//! Weak-L^p and Lorentz L^{p,1} functionals with respect to a weighted
//! measure, the mixed weak-type functional, and the weak-type Hölder check.
//!
//! On step functions the distribution `t ↦ μ{f > t}` is piecewise constant
//! with jumps at the distinct values of `f`, so both norms are finite sums
//! over those values and the supremum over `t` is attained as `t` increases
//! to one of them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{integrate, StepFunction};
use crate::maximal::maximal;
use crate::numeric::{fmt17, CompensatedSum};

/// The measure `density · dx`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedMeasure {
    pub density: StepFunction,
}

impl WeightedMeasure {
    pub fn new(density: StepFunction) -> Self {
        WeightedMeasure { density }
    }

    pub fn lebesgue(grid: crate::grid::Grid) -> Self {
        // cells inside the origin gap carry no mass
        WeightedMeasure {
            density: StepFunction::from_fn(grid, |_| 1.0).expect("unit density"),
        }
    }

    pub fn mass(&self) -> f64 {
        integrate(&self.density)
    }
}

/// Distinct positive values of `f` in decreasing order, each paired with
/// `μ{f >= value}`.
fn distribution(f: &StepFunction, mu: &WeightedMeasure) -> Result<Vec<(f64, f64)>> {
    f.grid().check_same(mu.density.grid())?;
    let dx = f.grid().dx();
    let mut cells: Vec<(f64, f64)> = f
        .values()
        .iter()
        .zip(mu.density.values())
        .filter(|(&v, _)| v > 0.0)
        .map(|(&v, &w)| (v, w * dx))
        .collect();
    cells.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut out: Vec<(f64, f64)> = Vec::new();
    let mut acc = CompensatedSum::new();
    let mut k = 0;
    while k < cells.len() {
        let v = cells[k].0;
        while k < cells.len() && cells[k].0 == v {
            acc.add(cells[k].1);
            k += 1;
        }
        out.push((v, acc.value()));
    }
    Ok(out)
}

fn check_exponent(p: f64) -> Result<()> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::param("p", format!("{p} must be finite and > 0")));
    }
    Ok(())
}

/// `sup_t t · μ{f > t}^{1/p}` together with the maximizing level.
fn weak_norm_with_level(f: &StepFunction, p: f64, mu: &WeightedMeasure) -> Result<(f64, f64, usize)> {
    check_exponent(p)?;
    let dist = distribution(f, mu)?;
    let mut best = (0.0, 0.0);
    for &(v, m) in &dist {
        let cand = v * m.powf(1.0 / p);
        if cand > best.0 {
            best = (cand, v);
        }
    }
    Ok((best.0, best.1, dist.len()))
}

/// `‖f‖_{L^{p,∞}(μ)} = sup_t t · μ{f > t}^{1/p}`.
pub fn weak_norm(f: &StepFunction, p: f64, mu: &WeightedMeasure) -> Result<f64> {
    weak_norm_with_level(f, p, mu).map(|r| r.0)
}

/// `‖f‖_{L^{p,1}(μ)} = ∫_0^∞ μ{f > t}^{1/p} dt`.
pub fn lorentz_p1_norm(f: &StepFunction, p: f64, mu: &WeightedMeasure) -> Result<f64> {
    check_exponent(p)?;
    let dist = distribution(f, mu)?;
    let mut acc = CompensatedSum::new();
    for (k, &(v, m)) in dist.iter().enumerate() {
        let next = dist.get(k + 1).map_or(0.0, |d| d.0);
        acc.add((v - next) * m.powf(1.0 / p));
    }
    Ok(acc.value())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorSel {
    /// `T = M(f v) / v`
    MOfFvOverV,
    /// `T = M f / v`
    MOfF,
}

impl OperatorSel {
    pub fn name(&self) -> &'static str {
        match self {
            OperatorSel::MOfFvOverV => "m_of_fv_over_v",
            OperatorSel::MOfF => "m_of_f",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RhsWeightSel {
    Mu,
    M2u,
    U,
}

impl RhsWeightSel {
    pub fn name(&self) -> &'static str {
        match self {
            RhsWeightSel::Mu => "mu",
            RhsWeightSel::M2u => "m2u",
            RhsWeightSel::U => "u",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixedReport {
    pub operator: OperatorSel,
    pub rhs_weight: RhsWeightSel,
    /// `sup_t t · (uv){T > t}`
    pub sup_t_lhs: f64,
    pub maximizing_t: f64,
    /// `(uv){T > 1}`
    pub unit_threshold_lhs: f64,
    pub rhs: f64,
    /// `sup_t_lhs / rhs`; `+∞` (JSON `null`) when the right side vanishes
    /// and the left side does not.
    pub ratio: f64,
    /// Number of candidate levels enumerated.
    pub t_grid_size: usize,
    pub left: f64,
    pub dx: f64,
    pub n_cells: usize,
    pub origin_gap: f64,
}

impl MixedReport {
    pub const CSV_HEADER: &'static str =
        "operator,rhs_weight,sup_t_lhs,maximizing_t,unit_threshold_lhs,rhs,ratio,t_grid_size,left,dx,n_cells,origin_gap";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.operator.name(),
            self.rhs_weight.name(),
            fmt17(self.sup_t_lhs),
            fmt17(self.maximizing_t),
            fmt17(self.unit_threshold_lhs),
            fmt17(self.rhs),
            fmt17(self.ratio),
            self.t_grid_size,
            fmt17(self.left),
            fmt17(self.dx),
            self.n_cells,
            fmt17(self.origin_gap)
        )
    }
}

/// `lhs / rhs` with the conventions `0/0 = 0` and `x/0 = +∞`.
pub fn safe_ratio(lhs: f64, rhs: f64) -> f64 {
    if rhs > 0.0 {
        lhs / rhs
    } else if lhs == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// `T / v` on cells where `v > 0`. Cells inside the origin gap get 0; a zero
/// of `v` elsewhere is an error.
pub(crate) fn divide_by_weight(t: &StepFunction, v: &StepFunction) -> Result<StepFunction> {
    t.grid().check_same(v.grid())?;
    let g = *t.grid();
    let mut out = Vec::with_capacity(t.len());
    for (i, (&a, &b)) in t.values().iter().zip(v.values()).enumerate() {
        if b > 0.0 {
            out.push(a / b);
        } else if g.is_excluded(i) {
            out.push(0.0);
        } else {
            return Err(Error::ZeroDenominator { cell: i });
        }
    }
    StepFunction::new(g, out)
}

/// Fills a [`MixedReport`] from the operator output `T` (already divided by
/// `v`), the measure `uv`, and the right-hand side.
pub(crate) fn mixed_report_from(
    t: &StepFunction,
    uv: &WeightedMeasure,
    rhs: f64,
    operator: OperatorSel,
    rhs_weight: RhsWeightSel,
) -> Result<MixedReport> {
    let (sup_t_lhs, maximizing_t, levels) = weak_norm_with_level(t, 1.0, uv)?;
    let dx = t.grid().dx();
    let mut unit = CompensatedSum::new();
    for (&a, &w) in t.values().iter().zip(uv.density.values()) {
        if a > 1.0 {
            unit.add(w * dx);
        }
    }
    let g = t.grid();
    Ok(MixedReport {
        operator,
        rhs_weight,
        sup_t_lhs,
        maximizing_t,
        unit_threshold_lhs: unit.value(),
        rhs,
        ratio: safe_ratio(sup_t_lhs, rhs),
        t_grid_size: levels,
        left: g.left(),
        dx: g.dx(),
        n_cells: g.n_cells(),
        origin_gap: g.origin_gap(),
    })
}

/// Evaluates `sup_t t · (uv){T > t}` against `∫ f W v`, with `T` and `W`
/// chosen by the selectors. For `T = M f / v` together with `W = M²u` the
/// right side is `∫ f M²u` (the weight `v` is absorbed).
pub fn evaluate_mixed_inequality(
    f: &StepFunction,
    u: &StepFunction,
    v: &StepFunction,
    operator: OperatorSel,
    rhs_weight: RhsWeightSel,
) -> Result<MixedReport> {
    f.grid().check_same(u.grid())?;
    f.grid().check_same(v.grid())?;
    let mf = match operator {
        OperatorSel::MOfFvOverV => maximal(&f.mul(v)?),
        OperatorSel::MOfF => maximal(f),
    };
    let t = divide_by_weight(&mf, v)?;
    let uv = WeightedMeasure::new(u.mul(v)?);
    let w = match rhs_weight {
        RhsWeightSel::U => u.clone(),
        RhsWeightSel::Mu => maximal(u),
        RhsWeightSel::M2u => maximal(&maximal(u)),
    };
    let rhs = if operator == OperatorSel::MOfF && rhs_weight == RhsWeightSel::M2u {
        integrate(&f.mul(&w)?)
    } else {
        integrate(&f.mul(&w)?.mul(v)?)
    };
    mixed_report_from(&t, &uv, rhs, operator, rhs_weight)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HolderReport {
    pub lhs: f64,
    pub rhs_product: f64,
    pub ratio: f64,
}

/// `‖Π h_j‖_{L^{q,∞}(μ)}` against `Π ‖h_j‖_{L^{q_j,∞}(μ)}` for `1/q = Σ 1/q_j`.
pub fn holder_weak_check(hs: &[StepFunction], qs: &[f64], q: f64, mu: &WeightedMeasure) -> Result<HolderReport> {
    if hs.is_empty() || hs.len() != qs.len() {
        return Err(Error::param("qs", format!("{} exponents for {} functions", qs.len(), hs.len())));
    }
    if let Some(bad) = qs.iter().find(|&&qj| !(qj >= 1.0)) {
        return Err(Error::param("qs", format!("exponent {bad} must be >= 1")));
    }
    let sum: f64 = qs.iter().map(|qj| 1.0 / qj).sum();
    if (sum - 1.0 / q).abs() > 1e-12 {
        return Err(Error::ExponentMismatch { sum, expected: 1.0 / q });
    }
    let mut product = hs[0].clone();
    for h in &hs[1..] {
        product = product.mul(h)?;
    }
    let lhs = weak_norm(&product, q, mu)?;
    let mut rhs_product = 1.0;
    for (h, &qj) in hs.iter().zip(qs) {
        rhs_product *= weak_norm(h, qj, mu)?;
    }
    Ok(HolderReport {
        lhs,
        rhs_product,
        ratio: safe_ratio(lhs, rhs_product),
    })
}
