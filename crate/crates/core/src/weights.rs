//! Discrete weight-class characteristics: A_1, A_p, reverse Hölder RH_s
//! (including s = ∞), the Fujii–Wilson A_∞ functional, and the check that
//! `u w^ε` is in A_1 with the product bound.
//!
//! Essential infima and suprema over an interval are the min and max of the
//! cell values. Every constant is scale invariant, so weights are first
//! divided by their global maximum; constant weights then give exactly 1.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::family::IntervalFamily;
use crate::grid::{Grid, StepFunction};
use crate::maximal::max_average_containing;
use crate::numeric::prefix_sums;
use crate::range::SparseTable;

#[derive(Debug, Clone, PartialEq)]
pub struct ConstantEstimate {
    pub value: f64,
    /// Maximizing member `(i, j)` of the family.
    pub argmax_interval: (usize, usize),
    pub family: String,
    pub family_size: usize,
    pub dx: f64,
    pub n_cells: usize,
    pub origin_gap: f64,
}

impl Serialize for ConstantEstimate {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("ConstantEstimate", 7)?;
        st.serialize_field("value", &self.value)?;
        st.serialize_field("interval", &[self.argmax_interval.0, self.argmax_interval.1])?;
        st.serialize_field("family", &self.family)?;
        st.serialize_field("family_size", &self.family_size)?;
        st.serialize_field("dx", &self.dx)?;
        st.serialize_field("n_cells", &self.n_cells)?;
        st.serialize_field("origin_gap", &self.origin_gap)?;
        st.end()
    }
}

struct Argmax {
    value: f64,
    at: (usize, usize),
}

impl Argmax {
    fn new() -> Self {
        Argmax {
            value: f64::NEG_INFINITY,
            at: (0, 0),
        }
    }

    #[inline]
    fn offer(&mut self, v: f64, i: usize, j: usize) {
        if v > self.value {
            self.value = v;
            self.at = (i, j);
        }
    }

    fn into_estimate(self, grid: &Grid, family: &IntervalFamily) -> ConstantEstimate {
        ConstantEstimate {
            value: self.value,
            argmax_interval: self.at,
            family: family.name(),
            family_size: family.len(),
            dx: grid.dx(),
            n_cells: grid.n_cells(),
            origin_gap: grid.origin_gap(),
        }
    }
}

fn check_family(w: &StepFunction, family: &IntervalFamily) -> Result<()> {
    if family.n_cells != w.len() {
        return Err(Error::GridMismatch(format!(
            "family over {} cells for a weight on {} cells",
            family.n_cells,
            w.len()
        )));
    }
    Ok(())
}

/// Values divided by the global maximum, after checking strict positivity.
fn normalized_positive(w: &StepFunction) -> Result<Vec<f64>> {
    if let Some(cell) = w.values().iter().position(|&v| !(v > 0.0)) {
        return Err(Error::ZeroWeight { cell });
    }
    let m = w.max_value();
    Ok(w.values().iter().map(|&v| v / m).collect())
}

#[inline]
fn avg(p: &[f64], i: usize, j: usize) -> f64 {
    (p[j + 1] - p[i]) / (j + 1 - i) as f64
}

/// `max_Q avg_Q w / min_Q w`.
pub fn a1_constant(w: &StepFunction, family: &IntervalFamily) -> Result<ConstantEstimate> {
    check_family(w, family)?;
    let v = normalized_positive(w)?;
    let p = prefix_sums(&v);
    let mins = SparseTable::min(&v);
    let mut best = Argmax::new();
    for (i, j) in family.iter() {
        best.offer(avg(&p, i, j) / mins.query(i, j), i, j);
    }
    Ok(best.into_estimate(w.grid(), family))
}

/// `max_Q (avg_Q w)(avg_Q w^{1/(1-p)})^{p-1}`.
pub fn ap_constant(w: &StepFunction, p: f64, family: &IntervalFamily) -> Result<ConstantEstimate> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::param("p", format!("{p} must be finite and > 1")));
    }
    check_family(w, family)?;
    let v = normalized_positive(w)?;
    let dual: Vec<f64> = v.iter().map(|&x| x.powf(1.0 / (1.0 - p))).collect();
    let pw = prefix_sums(&v);
    let pd = prefix_sums(&dual);
    let mut best = Argmax::new();
    for (i, j) in family.iter() {
        best.offer(avg(&pw, i, j) * avg(&pd, i, j).powf(p - 1.0), i, j);
    }
    Ok(best.into_estimate(w.grid(), family))
}

/// `max_Q (avg_Q w^s)^{1/s} / avg_Q w`; `s = f64::INFINITY` uses the cell maximum.
pub fn rh_constant(w: &StepFunction, s: f64, family: &IntervalFamily) -> Result<ConstantEstimate> {
    if !(s > 1.0) {
        return Err(Error::param("s", format!("{s} must be > 1 (or infinite)")));
    }
    check_family(w, family)?;
    let m = w.max_value();
    if m == 0.0 {
        return Err(Error::ZeroAverage(0, w.len() - 1));
    }
    let v: Vec<f64> = w.values().iter().map(|&x| x / m).collect();
    let p = prefix_sums(&v);
    let mut best = Argmax::new();
    if s.is_infinite() {
        let maxes = SparseTable::max(&v);
        for (i, j) in family.iter() {
            let a = avg(&p, i, j);
            if !(a > 0.0) {
                return Err(Error::ZeroAverage(i, j));
            }
            best.offer(maxes.query(i, j) / a, i, j);
        }
    } else {
        let ps = prefix_sums(&v.iter().map(|&x| x.powf(s)).collect::<Vec<_>>());
        for (i, j) in family.iter() {
            let a = avg(&p, i, j);
            if !(a > 0.0) {
                return Err(Error::ZeroAverage(i, j));
            }
            best.offer(avg(&ps, i, j).powf(1.0 / s) / a, i, j);
        }
    }
    Ok(best.into_estimate(w.grid(), family))
}

/// Fujii–Wilson functional `max_Q (1/w(Q)) ∫_Q M(w χ_Q)`, with the inner
/// maximal operator taken over subintervals of `Q`.
pub fn ainfty_fw(w: &StepFunction, family: &IntervalFamily) -> Result<ConstantEstimate> {
    check_family(w, family)?;
    let v = normalized_positive(w)?;
    let p = prefix_sums(&v);
    let x: Vec<f64> = (0..=v.len()).map(|i| i as f64).collect();
    let mut best = Argmax::new();
    for (i, j) in family.iter() {
        let local = max_average_containing(&x[i..=j + 1], &p[i..=j + 1]);
        let num: f64 = local.iter().zip(&v[i..=j]).map(|(&m, &own)| m.max(own)).sum();
        best.offer(num / (p[j + 1] - p[i]), i, j);
    }
    Ok(best.into_estimate(w.grid(), family))
}

#[derive(Debug, Clone, Serialize)]
pub struct Lemma4Report {
    pub epsilon: f64,
    /// A_1 constant of `u w^ε`.
    pub lhs: ConstantEstimate,
    /// `[u]_{RH_s} [u]_{A_1} [w]_{A_1}^ε` with `s = 1/(1-ε)`.
    pub rhs_bound: f64,
    pub rh_u: f64,
    pub a1_u: f64,
    pub a1_w: f64,
    pub holds: bool,
}

/// Compares `[u w^ε]_{A_1}` against `[u]_{RH_s}[u]_{A_1}[w]_{A_1}^ε`.
pub fn lemma4_check(
    u: &StepFunction,
    w: &StepFunction,
    eps: f64,
    family: &IntervalFamily,
) -> Result<Lemma4Report> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::param("epsilon", format!("{eps} must lie in (0, 1)")));
    }
    let product = u.try_zip(w, |a, b| a * b.powf(eps))?;
    let lhs = a1_constant(&product, family)?;
    let rh_u = rh_constant(u, 1.0 / (1.0 - eps), family)?.value;
    let a1_u = a1_constant(u, family)?.value;
    let a1_w = a1_constant(w, family)?.value;
    let rhs_bound = rh_u * a1_u * a1_w.powf(eps);
    let holds = lhs.value <= rhs_bound * (1.0 + 1e-9);
    Ok(Lemma4Report {
        epsilon: eps,
        lhs,
        rhs_bound,
        rh_u,
        a1_u,
        a1_w,
        holds,
    })
}
