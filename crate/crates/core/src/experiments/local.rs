//! Root of `g(a) = a · ∫_{|y| <= a^{1/(r-1)}} f` for a continuous,
//! non-decreasing `g`.

use crate::error::{Error, Result};
use crate::grid::StepFunction;
use crate::numeric::prefix_sums;

pub const ROOT_REL_TOL: f64 = 1e-8;
// bisection runs well past the reported tolerance so the witness checks have slack
const BISECT_REL_TOL: f64 = 1e-12;

/// `∫_{-ρ}^{ρ} f`, prorating the two boundary cells.
pub fn centered_mass(f: &StepFunction, rho: f64) -> f64 {
    let g = f.grid();
    let p = prefix_sums(f.values());
    let dx = g.dx();
    // ∫_{left}^{x} f
    let cumulative = |x: f64| -> f64 {
        let t = ((x - g.left()) / dx).clamp(0.0, g.n_cells() as f64);
        let i = (t.floor() as usize).min(g.n_cells().saturating_sub(1));
        let frac = t - i as f64;
        (p[i] + frac * f.values()[i]) * dx
    };
    (cumulative(rho) - cumulative(-rho)).max(0.0)
}

/// `g(a) = a · ∫_{|y| <= a^{1/(r-1)}} f`
pub fn local_g(f: &StepFunction, r: f64, a: f64) -> f64 {
    a * centered_mass(f, a.powf(1.0 / (r - 1.0)))
}

/// Returns `a > 0` with `|g(a) - λ| <= 1e-8 λ`. The bracket is grown
/// geometrically from `a = 1`, then bisected.
pub fn lemma_local_solve(f: &StepFunction, r: f64, lambda: f64) -> Result<f64> {
    if !(r > 1.0 && r.is_finite()) {
        return Err(Error::param("r", format!("{r} must be finite and > 1")));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::param("lambda", format!("{lambda} must be finite and > 0")));
    }
    if !(f.values().iter().any(|&v| v > 0.0)) {
        return Err(Error::ZeroMass);
    }
    let g = |a: f64| local_g(f, r, a);
    let (mut lo, mut hi) = (1.0, 1.0);
    let mut steps = 0;
    while g(hi) < lambda {
        lo = hi;
        hi *= 2.0;
        steps += 1;
        if steps > 2100 || !hi.is_finite() {
            return Err(Error::ZeroMass);
        }
    }
    while g(lo) >= lambda {
        hi = lo;
        lo *= 0.5;
        steps += 1;
        if steps > 2100 || lo == 0.0 {
            return Ok(hi);
        }
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        let gm = g(mid);
        if (gm - lambda).abs() <= BISECT_REL_TOL * lambda || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        if gm < lambda {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
