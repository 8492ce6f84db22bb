//! Comparisons built on the maximal operators: `M²` against the `L log L`
//! maximal operator, the vector-valued mixed inequality, and the bilinear
//! chain through the pointwise bound and the weak-type Hölder inequality.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::IntervalFamily;
use crate::grid::{integrate, StepFunction};
use crate::maximal::{maximal, maximal_llogl, maximal_vector_lq, multilinear_maximal, MaximalKind};
use crate::norms::{divide_by_weight, mixed_report_from, safe_ratio, weak_norm, MixedReport, OperatorSel, RhsWeightSel, WeightedMeasure};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LloglRatio {
    pub c_lo: f64,
    pub c_hi: f64,
    pub cells: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LloglComparison {
    /// smallest and largest `M(Mf) / M_{L log L} f` over all functions and cells
    pub c_lo: f64,
    pub c_hi: f64,
    pub family: String,
    pub per_function: Vec<LloglRatio>,
}

pub fn m2_llogl_compare(fs: &[StepFunction], family: &IntervalFamily) -> Result<LloglComparison> {
    if fs.is_empty() {
        return Err(Error::param("fs", "empty list"));
    }
    let mut per_function = Vec::new();
    for f in fs {
        let m2 = maximal(&maximal(f));
        let ml = maximal_llogl(f, family)?;
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        let mut cells = 0;
        for (&a, &b) in m2.values().iter().zip(ml.values()) {
            if b > 0.0 {
                let q = a / b;
                lo = lo.min(q);
                hi = hi.max(q);
                cells += 1;
            }
        }
        per_function.push(LloglRatio { c_lo: lo, c_hi: hi, cells });
    }
    Ok(LloglComparison {
        c_lo: per_function.iter().map(|p| p.c_lo).fold(f64::INFINITY, f64::min),
        c_hi: per_function.iter().map(|p| p.c_hi).fold(0.0, f64::max),
        family: family.name(),
        per_function,
    })
}

/// `sup_t t (uv){(Σ_j M(f_j v)^q)^{1/q} / v > t}` against `∫ (Σ_j f_j^q)^{1/q} u v`.
pub fn vector_valued_check(fs: &[StepFunction], q: f64, u: &StepFunction, v: &StepFunction) -> Result<MixedReport> {
    if !(q > 1.0) {
        return Err(Error::param("q", format!("{q} must exceed 1")));
    }
    let fvs = fs.iter().map(|f| f.mul(v)).collect::<Result<Vec<_>>>()?;
    let (lq_of_max, _) = maximal_vector_lq(&fvs, q, MaximalKind::UncenteredGridAligned)?;
    let t = divide_by_weight(&lq_of_max, v)?;
    let uv = WeightedMeasure::new(u.mul(v)?);
    let grid = *u.grid();
    let n = grid.n_cells();
    let mut lq = vec![0.0; n];
    for f in fs {
        for (acc, &x) in lq.iter_mut().zip(f.values()) {
            *acc += x.powf(q);
        }
    }
    let lq = StepFunction::new(grid, lq.into_iter().map(|s| s.powf(1.0 / q)).collect())?;
    let rhs = integrate(&lq.mul(&uv.density)?);
    mixed_report_from(&t, &uv, rhs, OperatorSel::MOfFvOverV, RhsWeightSel::U)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultilinearReport {
    /// `𝓜(f1, f2) <= M f1 · M f2` on every cell (relative slack 1e-12)
    pub pointwise_holds: bool,
    pub pointwise_max_quotient: f64,
    /// `‖𝓜(f1, f2) / v²‖_{L^{1/2,∞}(uv)}`
    pub lhs: f64,
    /// `Π_j ‖M f_j / v‖_{L^{1,∞}(uv)}`
    pub rhs_chain: f64,
    /// `Π_j ∫ f_j u`
    pub rhs_final: f64,
    pub ratio_chain: f64,
    pub ratio_final: f64,
}

pub fn multilinear_check(
    f1: &StepFunction,
    f2: &StepFunction,
    u: &StepFunction,
    v: &StepFunction,
    family: &IntervalFamily,
) -> Result<MultilinearReport> {
    let mm = multilinear_maximal(&[f1.clone(), f2.clone()], family)?;
    let m1 = maximal(f1);
    let m2 = maximal(f2);
    let mut holds = true;
    let mut worst = 0.0f64;
    for ((&a, &b), &c) in mm.values().iter().zip(m1.values()).zip(m2.values()) {
        let bound = b * c;
        if a > bound * (1.0 + 1e-12) {
            holds = false;
        }
        worst = worst.max(safe_ratio(a, bound));
    }
    let uv = WeightedMeasure::new(u.mul(v)?);
    let v2 = v.mul(v)?;
    let lhs = weak_norm(&divide_by_weight(&mm, &v2)?, 0.5, &uv)?;
    let rhs_chain = weak_norm(&divide_by_weight(&m1, v)?, 1.0, &uv)? * weak_norm(&divide_by_weight(&m2, v)?, 1.0, &uv)?;
    let rhs_final = integrate(&f1.mul(u)?) * integrate(&f2.mul(u)?);
    Ok(MultilinearReport {
        pointwise_holds: holds,
        pointwise_max_quotient: worst,
        lhs,
        rhs_chain,
        rhs_final,
        ratio_chain: safe_ratio(lhs, rhs_chain),
        ratio_final: safe_ratio(lhs, rhs_final),
    })
}
