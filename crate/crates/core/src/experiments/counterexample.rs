//! The staircase/hat counterexample: `u = Σ_{10<k<=k_max} (k/ln k) χ_{J_k}`,
//! `v = Σ_k |x-k| χ_{|x-k|<=1/2}`, `f = χ_{[-1,1]}`.
//!
//! The supports `J_k = [k + 1/(4k), k + 1/k]` shrink like `1/k`, so a uniform
//! grid fine enough for `J_{k_max}` is far too large. The computation runs on
//! a composite partition instead: uniform cells of width `coarse_dx` in the
//! background, a uniform refinement inside every `J_k`, and geometrically
//! graded cells bridging the two. All cell masses are exact integrals of the
//! descriptors and the maximal operator is evaluated on the partition.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maximal::maximal_on_partition;
use crate::numeric::CompensatedSum;
use crate::sampling::{staircase_support, WeightDescriptor};

/// First index of the staircase.
pub const FIRST_STEP: u64 = 11;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CounterexampleParams {
    /// Absolute cell width inside every `J_k`; `None` uses
    /// `|J_k| / cells_per_support` instead.
    pub fine_dx: Option<f64>,
    pub cells_per_support: usize,
    pub coarse_dx: f64,
    /// Width ratio of consecutive bridging cells.
    pub grading: f64,
    /// Also compute `M²u` on `[-1, 1]` (three more maximal passes).
    pub compute_rhs: bool,
}

impl Default for CounterexampleParams {
    fn default() -> Self {
        CounterexampleParams {
            fine_dx: None,
            cells_per_support: 32,
            coarse_dx: 1.0 / 16.0,
            grading: 1.25,
            compute_rhs: true,
        }
    }
}

impl CounterexampleParams {
    /// Width `1/(32 k_max)` in every support.
    pub fn absolute(k_max: u64) -> Self {
        CounterexampleParams {
            fine_dx: Some(1.0 / (32.0 * k_max as f64)),
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerKTerm {
    pub k: u64,
    /// `(uv)(J_k ∩ {Mf > v})` on the partition
    pub numeric: f64,
    /// `(k/ln k) ∫_{J_k} (x-k) dx = 15/(32 k ln k)`
    pub closed_form: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterexampleReport {
    pub k_max: u64,
    /// `(uv)({Mf > v})`
    pub lhs_partial: f64,
    /// `Σ_{10<k<=k_max} 15/(32 k ln k)`
    pub lhs_closed_form: f64,
    /// `Σ_{10<k<=k_max} 3/(32 k ln k)`, the lower bound from the first half of each `J_k`
    pub lhs_lower_bound_form: f64,
    /// `∫_{-1}^{1} M²u`
    pub rhs_estimate: Option<f64>,
    pub m2u_max_on_unit: Option<f64>,
    pub n_cells: usize,
    /// Cell width inside `J_{k_max}`.
    pub dx_at_k_max: f64,
    pub params: CounterexampleParams,
    pub per_k_terms: Vec<PerKTerm>,
}

/// `15/(32 k ln k)`
pub fn per_k_closed_form(k: u64) -> f64 {
    let kf = k as f64;
    15.0 / (32.0 * kf * kf.ln())
}

/// `3/(32 k ln k)`
pub fn per_k_lower_bound(k: u64) -> f64 {
    let kf = k as f64;
    3.0 / (32.0 * kf * kf.ln())
}

/// `Σ_{10<k<=k_max} 15/(32 k ln k)`
pub fn lhs_closed_form(k_max: u64) -> f64 {
    let mut s = CompensatedSum::new();
    for k in FIRST_STEP..=k_max {
        s.add(per_k_closed_form(k));
    }
    s.value()
}

fn support_width(k: u64, params: &CounterexampleParams) -> (f64, usize) {
    let (a, b) = staircase_support(k);
    let len = b - a;
    let cells = match params.fine_dx {
        Some(dx) => (len / dx).ceil().max(1.0) as usize,
        None => params.cells_per_support,
    };
    (len / cells as f64, cells)
}

fn validate(k_max: u64, params: &CounterexampleParams) -> Result<()> {
    if k_max < 100 {
        return Err(Error::param("k_max", format!("{k_max} must be at least 100")));
    }
    if !(params.coarse_dx > 0.0 && params.coarse_dx <= 0.25) {
        return Err(Error::param("coarse_dx", format!("{} must lie in (0, 1/4]", params.coarse_dx)));
    }
    if !(params.grading > 1.0 && params.grading <= 4.0) {
        return Err(Error::param("grading", format!("{} must lie in (1, 4]", params.grading)));
    }
    // bridging zones of neighbouring supports must not meet
    let reach = params.coarse_dx * params.grading / (params.grading - 1.0);
    if 2.0 * reach >= 0.9 {
        return Err(Error::param(
            "grading",
            format!("bridging zones of width {reach} overlap; raise grading or lower coarse_dx"),
        ));
    }
    if params.fine_dx.is_none() && params.cells_per_support == 0 {
        return Err(Error::param("cells_per_support", "must be at least 1"));
    }
    let limit = 1.0 / (16.0 * k_max as f64);
    if let Some(dx) = params.fine_dx {
        if !(dx > 0.0) {
            return Err(Error::param("fine_dx", format!("{dx} must be > 0")));
        }
        if dx > limit {
            return Err(Error::ResolutionTooCoarse { dx, limit });
        }
    }
    let (h, _) = support_width(k_max, params);
    if h > limit * (1.0 + 1e-12) {
        return Err(Error::ResolutionTooCoarse { dx: h, limit });
    }
    Ok(())
}

/// Breakpoints of the composite partition of `[-2, k_max + 1]`.
pub fn composite_edges(k_max: u64, params: &CounterexampleParams) -> Vec<f64> {
    let left = -2.0;
    let right = k_max as f64 + 1.0;
    let dc = params.coarse_dx;
    // background points: the coarse lattice with ±1 (edges of f's support) merged in
    let mut head: Vec<f64> = (0..)
        .map(|j| left + j as f64 * dc)
        .take_while(|&x| x <= 2.0)
        .filter(|&x| (x.abs() - 1.0).abs() >= 0.25 * dc)
        .chain([-1.0, 1.0])
        .collect();
    head.sort_by(f64::total_cmp);
    let tail_offset = (0..).take_while(|&j: &u64| left + j as f64 * dc <= 2.0).count() as u64;
    let mut background = head
        .into_iter()
        .chain((tail_offset..).map(|j| left + j as f64 * dc))
        .take_while(|&x| x < right)
        .peekable();
    let mut edges: Vec<f64> = Vec::new();
    let mut emit_until = |edges: &mut Vec<f64>, limit: f64| {
        while let Some(&x) = background.peek() {
            if x >= limit - 0.25 * dc {
                break;
            }
            if edges.last().map_or(true, |&l| x > l + 0.25 * dc) {
                edges.push(x);
            }
            background.next();
        }
    };
    let mut zone = Vec::new();
    for k in FIRST_STEP..=k_max {
        let (a, b) = staircase_support(k);
        let (h, cells) = support_width(k, params);
        zone.clear();
        // graded cells to the left, built outward then reversed
        let mut w = h * params.grading;
        let mut x = a;
        while w < dc {
            x -= w;
            zone.push(x);
            w *= params.grading;
        }
        zone.reverse();
        for i in 0..=cells {
            zone.push(if i == cells { b } else { a + i as f64 * h });
        }
        let mut w = h * params.grading;
        let mut x = b;
        while w < dc {
            x += w;
            zone.push(x);
            w *= params.grading;
        }
        emit_until(&mut edges, zone[0]);
        // background points swallowed by the zone are dropped below
        edges.extend_from_slice(&zone);
    }
    emit_until(&mut edges, right);
    if edges.last().map_or(true, |&l| l < right) {
        edges.push(right);
    }
    edges
}

/// Reproduces the counterexample up to `k_max`.
pub fn sawyer_counterexample(k_max: u64, params: &CounterexampleParams) -> Result<CounterexampleReport> {
    validate(k_max, params)?;
    let edges = composite_edges(k_max, params);
    let n = edges.len() - 1;
    debug_assert!(edges.windows(2).all(|w| w[1] > w[0]));
    log::info!("counterexample k_max={k_max}: {n} cells");

    let f = WeightDescriptor::indicator(-1.0, 1.0);
    let u = WeightDescriptor::staircase(k_max);
    let v = WeightDescriptor::SawyerHat;
    let uv = WeightDescriptor::product(vec![u.clone(), v.clone()]);

    let mf = maximal_on_partition(&edges, &f.cell_masses(&edges, |_| false)?)?;
    let v_mass = v.cell_masses(&edges, |_| false)?;
    let uv_mass = uv.cell_masses(&edges, |_| false)?;

    let mut per_k: Vec<CompensatedSum> = (FIRST_STEP..=k_max).map(|_| CompensatedSum::new()).collect();
    let mut total = CompensatedSum::new();
    for i in 0..n {
        let width = edges[i + 1] - edges[i];
        if uv_mass[i] > 0.0 && mf[i] > v_mass[i] / width {
            total.add(uv_mass[i]);
            let k = edges[i].floor() as u64;
            if (FIRST_STEP..=k_max).contains(&k) {
                per_k[(k - FIRST_STEP) as usize].add(uv_mass[i]);
            }
        }
    }
    drop(mf);
    drop(v_mass);
    drop(uv_mass);

    let (rhs_estimate, m2u_max_on_unit) = if params.compute_rhs {
        let mu = maximal_on_partition(&edges, &u.cell_masses(&edges, |_| false)?)?;
        let mu_mass: Vec<f64> = mu.iter().enumerate().map(|(i, &m)| m * (edges[i + 1] - edges[i])).collect();
        drop(mu);
        let m2u = maximal_on_partition(&edges, &mu_mass)?;
        let mut integral = CompensatedSum::new();
        let mut max = 0.0f64;
        for i in 0..n {
            if edges[i] >= -1.0 && edges[i + 1] <= 1.0 {
                integral.add(m2u[i] * (edges[i + 1] - edges[i]));
                max = max.max(m2u[i]);
            }
        }
        (Some(integral.value()), Some(max))
    } else {
        (None, None)
    };

    let per_k_terms: Vec<PerKTerm> = (FIRST_STEP..=k_max)
        .zip(per_k)
        .map(|(k, s)| PerKTerm {
            k,
            numeric: s.value(),
            closed_form: per_k_closed_form(k),
        })
        .collect();
    let mut lower = CompensatedSum::new();
    for k in FIRST_STEP..=k_max {
        lower.add(per_k_lower_bound(k));
    }
    Ok(CounterexampleReport {
        k_max,
        lhs_partial: total.value(),
        lhs_closed_form: lhs_closed_form(k_max),
        lhs_lower_bound_form: lower.value(),
        rhs_estimate,
        m2u_max_on_unit,
        n_cells: n,
        dx_at_k_max: support_width(k_max, params).0,
        params: *params,
        per_k_terms,
    })
}
