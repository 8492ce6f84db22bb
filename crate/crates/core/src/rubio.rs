//! Rubio de Francia majorant for the operator
//! `S f = M(f · a) / a` with `a = u · v1^{1/(λδ)}`.
//!
//! The series `R h = Σ_j S^j h / (2 K0)^j` is truncated at `j_max` and the
//! decay of its terms is certified numerically; `K0` can be taken from the
//! empirical operator-norm bound [`estimate_norm_bound`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{integrate, StepFunction};
use crate::maximal::maximal;
use crate::norms::{lorentz_p1_norm, WeightedMeasure};

pub const DEFAULT_J_MAX: usize = 30;
pub const DEFAULT_RHO: f64 = 0.9;
pub const DEFAULT_PROBES: usize = 64;
/// Number of trailing term ratios that must stay below `rho`.
pub const CERTIFIED_TERMS: usize = 3;

#[derive(Debug, Clone)]
pub struct RubioConfig {
    pub u: StepFunction,
    pub v1: StepFunction,
    pub lambda: f64,
    pub delta: f64,
    pub j_max: usize,
    pub k0: f64,
    pub rho: f64,
    aux: StepFunction,
    measure: WeightedMeasure,
}

impl RubioConfig {
    pub fn new(u: StepFunction, v1: StepFunction, lambda: f64, delta: f64, j_max: usize, k0: f64) -> Result<Self> {
        u.grid().check_same(v1.grid())?;
        if !(lambda > 1.0 && lambda.is_finite()) {
            return Err(Error::param("lambda", format!("{lambda} must be finite and > 1")));
        }
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::param("delta", format!("{delta} must be finite and > 0")));
        }
        if !(k0 > 0.0 && k0.is_finite()) {
            return Err(Error::param("k0", format!("{k0} must be finite and > 0")));
        }
        let grid = *u.grid();
        for w in [&u, &v1] {
            if let Some(cell) = (0..grid.n_cells()).find(|&i| !grid.is_excluded(i) && !(w.values()[i] > 0.0)) {
                return Err(Error::ZeroWeight { cell });
            }
        }
        let aux = u.try_zip(&v1, |a, b| a * b.powf(1.0 / (lambda * delta)))?;
        let measure = WeightedMeasure::new(u.try_zip(&v1, |a, b| a * b.powf(1.0 / delta))?);
        Ok(RubioConfig {
            u,
            v1,
            lambda,
            delta,
            j_max,
            k0,
            rho: DEFAULT_RHO,
            aux,
            measure,
        })
    }

    pub fn with_k0(&self, k0: f64) -> Result<Self> {
        let mut c = RubioConfig::new(self.u.clone(), self.v1.clone(), self.lambda, self.delta, self.j_max, k0)?;
        c.rho = self.rho;
        Ok(c)
    }

    pub fn with_j_max(mut self, j_max: usize) -> Self {
        self.j_max = j_max;
        self
    }

    /// `u · v1^{1/(λδ)}`
    pub fn aux(&self) -> &StepFunction {
        &self.aux
    }

    /// The measure `u · v1^{1/δ}` (with `v2 ≡ 1`).
    pub fn measure(&self) -> &WeightedMeasure {
        &self.measure
    }
}

/// `S_λ f = M(f a) / a`.
pub fn s_lambda_op(f: &StepFunction, cfg: &RubioConfig) -> Result<StepFunction> {
    let a = &cfg.aux;
    let m = maximal(&f.mul(a)?);
    let grid = *a.grid();
    let mut out = Vec::with_capacity(grid.n_cells());
    for i in 0..grid.n_cells() {
        let d = a.values()[i];
        if d > 0.0 {
            out.push(m.values()[i] / d);
        } else if grid.is_excluded(i) {
            out.push(0.0);
        } else {
            return Err(Error::ZeroDenominator { cell: i });
        }
    }
    StepFunction::new(grid, out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeKind {
    TwoValued,
    Spike,
    Power,
}

/// Probe `k` of the deterministic sequence; all draws come from one stream,
/// so the first `n` probes do not depend on how many are requested.
fn next_probe(rng: &mut ChaCha8Rng, k: usize, grid: &crate::grid::Grid) -> (ProbeKind, StepFunction) {
    let n = grid.n_cells();
    match k % 3 {
        0 => {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(a..n);
            let high = rng.gen_range(1.0..10.0);
            let low = if rng.gen_bool(0.5) { 0.0 } else { rng.gen_range(0.0..high) };
            let v = (0..n).map(|i| if i >= a && i <= b { high } else { low }).collect();
            (ProbeKind::TwoValued, StepFunction::from_values_unchecked(*grid, v))
        }
        1 => {
            let i = rng.gen_range(0..n);
            let mut v = vec![0.0; n];
            v[i] = 1.0;
            (ProbeKind::Spike, StepFunction::from_values_unchecked(*grid, v))
        }
        _ => {
            let x0 = rng.gen_range(grid.left()..grid.right());
            let beta = rng.gen_range(0.1..0.9);
            let dx = grid.dx();
            let v = (0..n).map(|i| ((grid.center(i) - x0).abs() + dx).powf(-beta)).collect();
            (ProbeKind::Power, StepFunction::from_values_unchecked(*grid, v))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormBound {
    /// `2 × max_ratio`
    pub k0_hat: f64,
    /// Largest `‖S f‖ / ‖f‖` over the probes.
    pub max_ratio: f64,
    pub q: f64,
    pub probes: usize,
    pub skipped: usize,
    pub seed: u64,
    pub argmax_probe: usize,
    pub argmax_kind: ProbeKind,
}

fn check_q(q: f64) -> Result<()> {
    if !(q >= 1.0 && q.is_finite()) {
        return Err(Error::param("q", format!("{q} must be finite and >= 1")));
    }
    Ok(())
}

/// Empirical bound `K̂0 = 2 max_f ‖S f‖_{L^{q,1}(uv)} / ‖f‖_{L^{q,1}(uv)}`
/// over `probes` seeded probe functions (two-valued, spikes, power profiles).
pub fn estimate_norm_bound(cfg: &RubioConfig, q: f64, probes: usize, seed: u64) -> Result<NormBound> {
    check_q(q)?;
    if probes < 16 {
        return Err(Error::param("probes", format!("{probes} must be at least 16")));
    }
    let grid = *cfg.u.grid();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = NormBound {
        k0_hat: 0.0,
        max_ratio: f64::NEG_INFINITY,
        q,
        probes,
        skipped: 0,
        seed,
        argmax_probe: 0,
        argmax_kind: ProbeKind::TwoValued,
    };
    for k in 0..probes {
        let (kind, f) = next_probe(&mut rng, k, &grid);
        let nf = lorentz_p1_norm(&f, q, &cfg.measure)?;
        if !(nf > 0.0) {
            log::debug!("probe {k} has zero norm, skipped");
            best.skipped += 1;
            continue;
        }
        let ratio = lorentz_p1_norm(&s_lambda_op(&f, cfg)?, q, &cfg.measure)? / nf;
        if ratio > best.max_ratio {
            best.max_ratio = ratio;
            best.argmax_probe = k;
            best.argmax_kind = kind;
        }
    }
    if best.skipped == probes {
        return Err(Error::DegenerateProbe);
    }
    best.k0_hat = 2.0 * best.max_ratio;
    Ok(best)
}

/// `max ‖S f‖ / ‖f‖` over every function equal to 1 on a run of cells and to
/// a background `b ∈ {0, 1/4, 1/2}` elsewhere.
pub fn two_valued_sup_ratio(cfg: &RubioConfig, q: f64) -> Result<f64> {
    check_q(q)?;
    let grid = *cfg.u.grid();
    let n = grid.n_cells();
    let mut best = 0.0f64;
    for b in [0.0, 0.25, 0.5] {
        for i in 0..n {
            for j in i..n {
                let v = (0..n).map(|l| if l >= i && l <= j { 1.0 } else { b }).collect();
                let f = StepFunction::from_values_unchecked(grid, v);
                let nf = lorentz_p1_norm(&f, q, &cfg.measure)?;
                if nf > 0.0 {
                    best = best.max(lorentz_p1_norm(&s_lambda_op(&f, cfg)?, q, &cfg.measure)? / nf);
                }
            }
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Serialize)]
pub struct RubioSeries {
    /// `Σ_{j <= J} S^j h / (2K0)^j` with `J = j_max`
    pub r_j: StepFunction,
    /// the same sum through `J + 1`
    pub r_j1: StepFunction,
    /// `‖S^j h / (2K0)^j‖_{L^1(uv)}` for `j = 0..=J+1`
    pub term_norms: Vec<f64>,
    /// consecutive quotients of `term_norms`
    pub decay_ratios: Vec<f64>,
}

/// Truncated Rubio de Francia series, with the last
/// [`CERTIFIED_TERMS`] term quotients required to stay at or below `rho`.
pub fn rubio_iterate(h: &StepFunction, cfg: &RubioConfig) -> Result<RubioSeries> {
    h.grid().check_same(cfg.u.grid())?;
    let scale = 1.0 / (2.0 * cfg.k0);
    let mut term = h.clone();
    let mut acc = h.values().to_vec();
    let mut term_norms = vec![integrate(&h.mul(&cfg.measure.density)?)];
    let mut r_j = None;
    for j in 1..=cfg.j_max + 1 {
        term = s_lambda_op(&term, cfg)?.scale(scale).map_err(|_| Error::Divergence {
            term: j,
            ratio: f64::INFINITY,
            rho: cfg.rho,
        })?;
        if j == cfg.j_max + 1 {
            r_j = Some(acc.clone());
        }
        for (a, &t) in acc.iter_mut().zip(term.values()) {
            *a += t;
        }
        term_norms.push(integrate(&term.mul(&cfg.measure.density)?));
    }
    let decay_ratios: Vec<f64> = term_norms
        .windows(2)
        .map(|w| if w[0] > 0.0 { w[1] / w[0] } else if w[1] > 0.0 { f64::INFINITY } else { 0.0 })
        .collect();
    let tail = decay_ratios.len().saturating_sub(CERTIFIED_TERMS);
    for (k, &ratio) in decay_ratios.iter().enumerate().skip(tail) {
        if !(ratio <= cfg.rho) || !term_norms[k + 1].is_finite() {
            return Err(Error::Divergence {
                term: k + 1,
                ratio,
                rho: cfg.rho,
            });
        }
    }
    if acc.iter().any(|v| !v.is_finite()) {
        return Err(Error::Divergence {
            term: cfg.j_max + 1,
            ratio: f64::INFINITY,
            rho: cfg.rho,
        });
    }
    let grid = *h.grid();
    Ok(RubioSeries {
        r_j: StepFunction::new(grid, r_j.expect("loop runs at least once"))?,
        r_j1: StepFunction::new(grid, acc)?,
        term_norms,
        decay_ratios,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RubioVerification {
    /// `h <= R_J h` cellwise
    pub prop_a: bool,
    /// `‖R_J h‖_{L^{q,1}(uv)} / ‖h‖_{L^{q,1}(uv)}`
    pub prop_b_ratio: f64,
    /// `S(R_J h) <= 2 K0 R_{J+1} h` cellwise, relative slack 1e-9
    pub prop_c: bool,
    /// largest `S(R_J h) / (2 K0 R_{J+1} h)` over cells
    pub prop_c_max_quotient: f64,
    pub k0: f64,
    pub j_max: usize,
    pub q: f64,
    pub decay_ratios: Vec<f64>,
}

pub const PROP_C_REL_TOL: f64 = 1e-9;

pub fn rubio_verify(h: &StepFunction, cfg: &RubioConfig, q: f64) -> Result<RubioVerification> {
    check_q(q)?;
    let series = rubio_iterate(h, cfg)?;
    let prop_a = h.values().iter().zip(series.r_j.values()).all(|(a, b)| a <= b);
    let nh = lorentz_p1_norm(h, q, &cfg.measure)?;
    let nr = lorentz_p1_norm(&series.r_j, q, &cfg.measure)?;
    let prop_b_ratio = crate::norms::safe_ratio(nr, nh);
    let s = s_lambda_op(&series.r_j, cfg)?;
    let mut prop_c = true;
    let mut worst = 0.0f64;
    for (&sv, &r) in s.values().iter().zip(series.r_j1.values()) {
        let bound = 2.0 * cfg.k0 * r;
        if sv > bound * (1.0 + PROP_C_REL_TOL) {
            prop_c = false;
        }
        if bound > 0.0 {
            worst = worst.max(sv / bound);
        } else if sv > 0.0 {
            worst = f64::INFINITY;
        }
    }
    Ok(RubioVerification {
        prop_a,
        prop_b_ratio,
        prop_c,
        prop_c_max_quotient: worst,
        k0: cfg.k0,
        j_max: cfg.j_max,
        q,
        decay_ratios: series.decay_ratios,
    })
}
