//! Decomposition of `g = f v` over dyadic annuli `G_k = {2^k < |x| <= 2^{k+1}}`
//! into the near part `I_k = {2^{k-1} < |x| <= 2^{k+2}}`, the far part
//! `L_k = {|x| > 2^{k+2}}` and the core `C_k = {|x| <= 2^{k-1}}`.
//! Cells are assigned to the sets by their centers.

use serde::Serialize;

use crate::error::Result;
use crate::grid::StepFunction;
use crate::maximal::maximal;
use crate::numeric::CompensatedSum;

/// Relative slack for the sublinearity comparison; the three partial
/// maximal functions are rounded independently.
pub const SUBLINEAR_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnnulusRecord {
    pub k: i32,
    pub cells: usize,
    /// `M g <= M(g χ_I) + M(g χ_L) + M(g χ_C)` on every `G_k` cell
    pub sublinear_holds: bool,
    /// largest `M g / (M(gχ_I) + M(gχ_L) + M(gχ_C))` on `G_k`
    pub sublinear_max_quotient: f64,
    /// largest `M(g χ_L)(x) / F(x)`, `F(x) = Σ_{|y|>|x|} g(y)/|y| dx`
    pub far_constant: f64,
    /// largest `M(g χ_C)(x) |x| / ∫_{|y|<=|x|/2} g`
    pub core_constant: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnnuliReport {
    pub records: Vec<AnnulusRecord>,
    /// annuli without grid cells
    pub empty: Vec<i32>,
}

fn quotient(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else if num > 0.0 {
        f64::INFINITY
    } else {
        0.0
    }
}

pub fn annuli_check(f: &StepFunction, v: &StepFunction, k_range: std::ops::RangeInclusive<i32>) -> Result<AnnuliReport> {
    let g = f.mul(v)?;
    let grid = *g.grid();
    let n = grid.n_cells();
    let dx = grid.dx();
    let abs_x: Vec<f64> = (0..n).map(|i| grid.center(i).abs()).collect();
    let vals = g.values();
    let mg = maximal(&g);

    // F(x) over cells ordered by |x|, plus the matching partial integrals of g
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| abs_x[a].total_cmp(&abs_x[b]));
    let mut far = vec![0.0; n];
    let mut acc = CompensatedSum::new();
    let mut idx = n;
    while idx > 0 {
        // cells sharing |x| are not strictly farther than each other
        let mut j = idx;
        while j > 0 && abs_x[order[j - 1]] == abs_x[order[idx - 1]] {
            j -= 1;
        }
        for &c in &order[j..idx] {
            far[c] = acc.value();
        }
        for &c in &order[j..idx] {
            if abs_x[c] > 0.0 {
                acc.add(vals[c] / abs_x[c] * dx);
            }
        }
        idx = j;
    }
    let sorted_abs: Vec<f64> = order.iter().map(|&c| abs_x[c]).collect();
    let mut prefix = vec![0.0; n + 1];
    let mut ps = CompensatedSum::new();
    for (t, &c) in order.iter().enumerate() {
        ps.add(vals[c] * dx);
        prefix[t + 1] = ps.value();
    }
    let inner_mass = |radius: f64| prefix[sorted_abs.partition_point(|&a| a <= radius)];

    let mut records = Vec::new();
    let mut empty = Vec::new();
    for k in k_range {
        let p = |e: i32| 2f64.powi(e);
        let in_g: Vec<usize> = (0..n).filter(|&i| abs_x[i] > p(k) && abs_x[i] <= p(k + 1)).collect();
        if in_g.is_empty() {
            empty.push(k);
            continue;
        }
        let part = |keep: &dyn Fn(f64) -> bool| -> StepFunction {
            let v = (0..n).map(|i| if keep(abs_x[i]) { vals[i] } else { 0.0 }).collect();
            StepFunction::from_values_unchecked(grid, v)
        };
        let m_near = maximal(&part(&|a| a > p(k - 1) && a <= p(k + 2)));
        let m_far = maximal(&part(&|a| a > p(k + 2)));
        let m_core = maximal(&part(&|a| a <= p(k - 1)));
        let mut holds = true;
        let mut sub_q = 0.0f64;
        let mut far_c = 0.0f64;
        let mut core_c = 0.0f64;
        for &i in &in_g {
            let bound = m_near.values()[i] + m_far.values()[i] + m_core.values()[i];
            if mg.values()[i] > bound * (1.0 + SUBLINEAR_REL_TOL) {
                holds = false;
            }
            sub_q = sub_q.max(quotient(mg.values()[i], bound));
            far_c = far_c.max(quotient(m_far.values()[i], far[i]));
            core_c = core_c.max(quotient(m_core.values()[i] * abs_x[i], inner_mass(abs_x[i] / 2.0)));
        }
        records.push(AnnulusRecord {
            k,
            cells: in_g.len(),
            sublinear_holds: holds,
            sublinear_max_quotient: sub_q,
            far_constant: far_c,
            core_constant: core_c,
        });
    }
    Ok(AnnuliReport { records, empty })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::sampling::{sample_weight, WeightDescriptor};

    fn setup(a: f64, b: f64, dx: f64) -> (StepFunction, StepFunction) {
        let g = Grid::symmetric(32.0, dx, dx).unwrap();
        let f = sample_weight(&WeightDescriptor::indicator(a, b), &g).unwrap();
        let v = sample_weight(&WeightDescriptor::power(-2.0), &g).unwrap();
        (f, v)
    }

    #[test]
    fn sublinearity_everywhere() {
        let (f, v) = setup(4.0, 8.0, 1.0 / 16.0);
        let rep = annuli_check(&f, &v, -3..=3).unwrap();
        assert!(rep.records.iter().all(|r| r.sublinear_holds));
    }

    #[test]
    fn core_misses_support() {
        let (f, v) = setup(4.0, 8.0, 1.0 / 16.0);
        let rep = annuli_check(&f, &v, 0..=0).unwrap();
        assert_eq!(rep.records[0].core_constant, 0.0);
    }

    #[test]
    fn far_constant_bounded() {
        for dx in [1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0] {
            let (f, v) = setup(8.0, 16.0, dx);
            let rep = annuli_check(&f, &v, 0..=0).unwrap();
            let c = rep.records[0].far_constant;
            assert!(c > 0.0 && c <= 4.0, "dx={dx}: {c}");
        }
    }

    #[test]
    fn empty_annulus_skipped() {
        let (f, v) = setup(4.0, 8.0, 1.0);
        let rep = annuli_check(&f, &v, -6..=-5).unwrap();
        assert!(rep.records.is_empty());
        assert_eq!(rep.empty, vec![-6, -5]);
    }
}
