//! Discrete Hardy–Littlewood maximal operators.
//!
//! The uncentered operator at cell `i` is the largest average of `f` over a
//! run of consecutive cells containing `i`. With prefix sums `P` (and cell
//! edges `x`), the average over cells `a..b` is the slope between the points
//! `(x_a, P_a)` and `(x_b, P_b)`, so the value at `i` is the steepest segment
//! joining a point with index `<= i` to one with index `> i`.
//!
//! [`maximal_fast`] evaluates that by divide and conquer: at each split
//! `m`, intervals crossing `m` are handled with one convex hull per side and
//! a tangent pointer that only moves one way, giving `O(n log n)` overall.
//! [`maximal_brute`] is the `O(n^2)` oracle over the same slopes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::IntervalFamily;
use crate::grid::StepFunction;
use crate::numeric::{bisect_increasing, prefix_sums};
use crate::range::ChmaxTree;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaximalKind {
    /// Suprema over every run of cells containing the evaluation cell.
    #[default]
    UncenteredGridAligned,
    /// Suprema over windows `[i - r, i + r]`, with `f` extended by zero
    /// outside the grid.
    Centered,
}

#[inline]
fn slope(x: &[f64], p: &[f64], a: usize, b: usize) -> f64 {
    (p[b] - p[a]) / (x[b] - x[a])
}

/// `(x_o, p_o) -> (x_a, p_a) -> (x_b, p_b)` orientation.
#[inline]
fn cross(x: &[f64], p: &[f64], o: usize, a: usize, b: usize) -> f64 {
    (x[a] - x[o]) * (p[b] - p[o]) - (p[a] - p[o]) * (x[b] - x[o])
}

/// For every cell `i` of the partition with edges `x[0..=n]` and cumulative
/// masses `p[0..=n]`, the largest average over runs of cells containing `i`.
pub fn max_average_containing(x: &[f64], p: &[f64]) -> Vec<f64> {
    assert_eq!(x.len(), p.len());
    let n = x.len().saturating_sub(1);
    let mut out = vec![f64::NEG_INFINITY; n];
    if n == 0 {
        return out;
    }
    let mut hull = Vec::with_capacity(n + 1);
    // explicit stack instead of recursion
    let mut stack = vec![(0usize, n)];
    while let Some((lo, hi)) = stack.pop() {
        if hi - lo == 1 {
            let s = slope(x, p, lo, hi);
            if s > out[lo] {
                out[lo] = s;
            }
            continue;
        }
        let m = (lo + hi) / 2;

        // cells lo..m: left endpoints a in lo..=i, right endpoints b in m+1..=hi
        hull.clear();
        for b in (m + 1)..=hi {
            while hull.len() >= 2 && cross(x, p, hull[hull.len() - 2], hull[hull.len() - 1], b) >= 0.0 {
                hull.pop();
            }
            hull.push(b);
        }
        let mut ptr = hull.len() - 1;
        let mut best = f64::NEG_INFINITY;
        for i in lo..m {
            while ptr > 0 && slope(x, p, i, hull[ptr - 1]) >= slope(x, p, i, hull[ptr]) {
                ptr -= 1;
            }
            let s = slope(x, p, i, hull[ptr]);
            if s > best {
                best = s;
            }
            if best > out[i] {
                out[i] = best;
            }
        }

        // cells m..hi: left endpoints a in lo..=m-1, right endpoints b in i+1..=hi
        hull.clear();
        for a in lo..m {
            while hull.len() >= 2 && cross(x, p, hull[hull.len() - 2], hull[hull.len() - 1], a) <= 0.0 {
                hull.pop();
            }
            hull.push(a);
        }
        let mut ptr = 0;
        let mut best = f64::NEG_INFINITY;
        for i in (m..hi).rev() {
            let b = i + 1;
            while ptr + 1 < hull.len() && slope(x, p, hull[ptr + 1], b) >= slope(x, p, hull[ptr], b) {
                ptr += 1;
            }
            let s = slope(x, p, hull[ptr], b);
            if s > best {
                best = s;
            }
            if best > out[i] {
                out[i] = best;
            }
        }

        stack.push((lo, m));
        stack.push((m, hi));
    }
    out
}

/// `O(n^2)` evaluation of the same quantity, enumerating every run.
pub fn max_average_containing_brute(x: &[f64], p: &[f64]) -> Vec<f64> {
    let n = x.len().saturating_sub(1);
    let mut out = vec![f64::NEG_INFINITY; n];
    let mut suffix = vec![f64::NEG_INFINITY; n + 2];
    for a in 0..n {
        // suffix[b] = max_{b' >= b} slope(a, b')
        suffix[n + 1] = f64::NEG_INFINITY;
        for b in (a + 1..=n).rev() {
            suffix[b] = suffix[b + 1].max(slope(x, p, a, b));
        }
        for i in a..n {
            if suffix[i + 1] > out[i] {
                out[i] = suffix[i + 1];
            }
        }
    }
    out
}

fn index_edges(n: usize) -> Vec<f64> {
    (0..=n).map(|i| i as f64).collect()
}

fn centered(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let p = prefix_sums(values);
    (0..n)
        .map(|i| {
            let reach = i.max(n - 1 - i);
            (0..=reach)
                .map(|r| {
                    let a = i.saturating_sub(r);
                    let b = (i + r + 1).min(n);
                    (p[b] - p[a]) / (2 * r + 1) as f64
                })
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect()
}

fn finish(f: &StepFunction, mut out: Vec<f64>) -> StepFunction {
    for (o, &v) in out.iter_mut().zip(f.values()) {
        // the singleton cell is admissible; rounding in P must not undercut it
        if !(*o >= v) {
            *o = v;
        }
        if *o < 0.0 {
            *o = 0.0;
        }
    }
    StepFunction::from_values_unchecked(*f.grid(), out)
}

/// Reference maximal operator, `O(n^2)`.
pub fn maximal_brute(f: &StepFunction, kind: MaximalKind) -> StepFunction {
    let out = match kind {
        MaximalKind::UncenteredGridAligned => {
            let p = prefix_sums(f.values());
            max_average_containing_brute(&index_edges(f.len()), &p)
        }
        MaximalKind::Centered => centered(f.values()),
    };
    finish(f, out)
}

/// Fast maximal operator. The uncentered kind runs in `O(n log n)`; the
/// centered kind, kept for cross-checks, is the direct `O(n^2)` scan.
pub fn maximal_fast(f: &StepFunction, kind: MaximalKind) -> StepFunction {
    let out = match kind {
        MaximalKind::UncenteredGridAligned => {
            let p = prefix_sums(f.values());
            max_average_containing(&index_edges(f.len()), &p)
        }
        MaximalKind::Centered => centered(f.values()),
    };
    finish(f, out)
}

/// Uncentered maximal operator `M`.
pub fn maximal(f: &StepFunction) -> StepFunction {
    maximal_fast(f, MaximalKind::UncenteredGridAligned)
}

/// Uncentered maximal averages on a non-uniform partition given by its
/// strictly increasing `edges` and the mass carried by each cell.
pub fn maximal_on_partition(edges: &[f64], masses: &[f64]) -> Result<Vec<f64>> {
    if edges.len() != masses.len() + 1 {
        return Err(Error::GridMismatch(format!(
            "{} edges for {} cells",
            edges.len(),
            masses.len()
        )));
    }
    if let Some(w) = edges.windows(2).position(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidGrid(format!("edges not increasing at {w}")));
    }
    let p = prefix_sums(masses);
    let mut out = max_average_containing(edges, &p);
    for (i, o) in out.iter_mut().enumerate() {
        let own = masses[i] / (edges[i + 1] - edges[i]);
        if !(*o >= own) {
            *o = own;
        }
        *o = o.max(0.0);
    }
    Ok(out)
}

/// `Φ(t) = t ln(e + t)`
#[inline]
pub fn young_llogl(t: f64) -> f64 {
    t * (std::f64::consts::E + t).ln()
}

/// Luxemburg bisection tolerance (relative) and iteration cap.
pub const LUXEMBURG_REL_TOL: f64 = 1e-10;
pub const LUXEMBURG_MAX_ITER: usize = 200;

/// `‖f‖_{L log L}` of the equally weighted sample `runs` (value, count),
/// normalized by `total` cells: `inf{λ > 0 : (1/total) Σ count Φ(value/λ) <= 1}`.
fn luxemburg_runs(runs: &[(f64, usize)], total: usize) -> f64 {
    let mut sum = 0.0;
    let mut max = 0.0f64;
    for &(v, c) in runs {
        sum += v * c as f64;
        max = max.max(v);
    }
    if max == 0.0 {
        return 0.0;
    }
    let n = total as f64;
    // Φ(t) >= t gives the lower end, Φ(1/2) < 1 the upper end
    let lo = sum / n;
    let hi = 2.0 * max;
    let excess = |lambda: f64| -> f64 {
        let s: f64 = runs.iter().map(|&(v, c)| c as f64 * young_llogl(v / lambda)).sum();
        // decreasing in λ; negate for the increasing bisection helper
        -(s / n)
    };
    bisect_increasing(excess, -1.0, lo, hi, LUXEMBURG_REL_TOL, LUXEMBURG_MAX_ITER)
}

/// Luxemburg `L log L` norm of `values` with normalized counting measure.
pub fn luxemburg_norm(values: &[f64]) -> f64 {
    let runs: Vec<(f64, usize)> = values.iter().map(|&v| (v, 1)).collect();
    luxemburg_runs(&runs, values.len())
}

/// Orlicz maximal operator `sup_{Q ∋ i} ‖f‖_{L log L, Q}` over `family`.
pub fn maximal_llogl(f: &StepFunction, family: &IntervalFamily) -> Result<StepFunction> {
    check_family(f, family)?;
    let vals = f.values();
    let n = vals.len();
    // run-length encoding: run_start[r], run_of[i]
    let mut run_start = Vec::new();
    let mut run_of = vec![0usize; n];
    for i in 0..n {
        if i == 0 || vals[i] != vals[i - 1] {
            run_start.push(i);
        }
        run_of[i] = run_start.len() - 1;
    }
    run_start.push(n);
    let mut tree = ChmaxTree::new(n, 0.0);
    let mut scratch = Vec::new();
    for (i, j) in family.iter() {
        scratch.clear();
        let mut r = run_of[i];
        while run_start[r] <= j {
            let a = run_start[r].max(i);
            let b = (run_start[r + 1] - 1).min(j);
            scratch.push((vals[a], b - a + 1));
            r += 1;
        }
        let norm = luxemburg_runs(&scratch, j - i + 1);
        tree.update(i, j, norm);
    }
    Ok(StepFunction::from_values_unchecked(*f.grid(), tree.finish()))
}

fn check_family(f: &StepFunction, family: &IntervalFamily) -> Result<()> {
    if family.n_cells != f.len() {
        return Err(Error::GridMismatch(format!(
            "family over {} cells for a function on {} cells",
            family.n_cells,
            f.len()
        )));
    }
    Ok(())
}

/// Returns `((Σ_j (M f_j)^q)^{1/q}, M((Σ_j f_j^q)^{1/q}))`.
pub fn maximal_vector_lq(
    fs: &[StepFunction],
    q: f64,
    kind: MaximalKind,
) -> Result<(StepFunction, StepFunction)> {
    if !(q.is_finite() && q >= 1.0) {
        return Err(Error::param("q", format!("{q} must be finite and >= 1")));
    }
    let first = fs.first().ok_or_else(|| Error::param("fs", "empty list"))?;
    let grid = *first.grid();
    for f in fs {
        grid.check_same(f.grid())?;
    }
    let n = grid.n_cells();
    let mut sum_of_max = vec![0.0; n];
    let mut sum_of_f = vec![0.0; n];
    for f in fs {
        let mf = maximal_fast(f, kind);
        for i in 0..n {
            sum_of_max[i] += mf.values()[i].powf(q);
            sum_of_f[i] += f.values()[i].powf(q);
        }
    }
    let root = |v: Vec<f64>| -> Vec<f64> { v.into_iter().map(|s| s.powf(1.0 / q)).collect() };
    let lhs = StepFunction::from_values_unchecked(grid, root(sum_of_max));
    let norm_f = StepFunction::from_values_unchecked(grid, root(sum_of_f));
    let rhs = maximal_fast(&norm_f, kind);
    Ok((lhs, rhs))
}

/// `sup_{Q ∋ i, Q ∈ family} Π_j avg_Q f_j`.
pub fn multilinear_maximal(fs: &[StepFunction], family: &IntervalFamily) -> Result<StepFunction> {
    let first = fs.first().ok_or_else(|| Error::param("fs", "empty list"))?;
    let grid = *first.grid();
    for f in fs {
        grid.check_same(f.grid())?;
    }
    check_family(first, family)?;
    let prefixes: Vec<Vec<f64>> = fs.iter().map(|f| prefix_sums(f.values())).collect();
    let mut tree = ChmaxTree::new(grid.n_cells(), 0.0);
    for (i, j) in family.iter() {
        let len = (j + 1 - i) as f64;
        let v: f64 = prefixes.iter().map(|p| (p[j + 1] - p[i]) / len).product();
        tree.update(i, j, v.max(0.0));
    }
    Ok(StepFunction::from_values_unchecked(grid, tree.finish()))
}

/// Uncentered maximal operator restricted to the members of `family`.
pub fn maximal_over_family(f: &StepFunction, family: &IntervalFamily) -> Result<StepFunction> {
    multilinear_maximal(std::slice::from_ref(f), family)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::sampling::{sample_weight, WeightDescriptor};

    fn from_vals(v: Vec<f64>) -> StepFunction {
        let g = Grid::new(0.0, 1.0, v.len(), 0.0).unwrap();
        StepFunction::new(g, v).unwrap()
    }

    #[test]
    fn two_sided_beats_one_sided() {
        let f = from_vals(vec![1.0, 0.0, 1.0]);
        let m = maximal_fast(&f, MaximalKind::UncenteredGridAligned);
        assert!((m.values()[1] - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(m.values(), maximal_brute(&f, MaximalKind::UncenteredGridAligned).values());
    }

    #[test]
    fn zero_and_constant() {
        let z = from_vals(vec![0.0; 17]);
        assert!(maximal(&z).is_zero());
        let c = from_vals(vec![0.75; 33]);
        assert!(maximal(&c).values().iter().all(|&v| v == 0.75));
        assert!(maximal_brute(&c, MaximalKind::UncenteredGridAligned)
            .values()
            .iter()
            .all(|&v| v == 0.75));
    }

    #[test]
    fn single_spike_decay() {
        let n = 40;
        for i in [0, 7, 39] {
            let mut v = vec![0.0; n];
            v[i] = 1.0;
            let f = from_vals(v);
            let m = maximal(&f);
            for j in 0..n {
                let expected = 1.0 / ((i as f64 - j as f64).abs() + 1.0);
                assert_eq!(m.values()[j], expected, "i={i} j={j}");
            }
        }
    }

    #[test]
    fn indicator_far_field() {
        let g = Grid::covering(-8.0, 8.0, 1.0 / 256.0, 0.0).unwrap();
        let f = sample_weight(&WeightDescriptor::indicator(-1.0, 1.0), &g).unwrap();
        let m = maximal(&f);
        let i = g.locate(3.0).unwrap();
        assert!((m.values()[i] - 0.5).abs() <= 3.0 * g.dx());
    }

    #[test]
    fn centered_brackets_uncentered() {
        let f = from_vals(vec![0.0, 3.0, 1.0, 0.0, 0.0, 5.0, 0.5, 0.0, 2.0]);
        let c = maximal_fast(&f, MaximalKind::Centered);
        let u = maximal_fast(&f, MaximalKind::UncenteredGridAligned);
        for i in 0..f.len() {
            assert!(c.values()[i] <= u.values()[i] + 1e-15);
            assert!(u.values()[i] <= 2.0 * c.values()[i] + 1e-15);
        }
    }

    #[test]
    fn partition_matches_uniform() {
        let v = vec![0.3, 0.0, 2.0, 1.0, 0.0, 0.0, 4.0];
        let edges: Vec<f64> = (0..=v.len()).map(|i| i as f64 * 0.5).collect();
        let masses: Vec<f64> = v.iter().map(|x| x * 0.5).collect();
        let got = maximal_on_partition(&edges, &masses).unwrap();
        let want = maximal(&from_vals(v));
        for (a, b) in got.iter().zip(want.values()) {
            assert!((a - b).abs() < 1e-14);
        }
        assert!(maximal_on_partition(&[0.0, 1.0, 1.0], &[1.0, 1.0]).is_err());
    }

    #[test]
    fn nonuniform_partition_matches_brute() {
        let edges = vec![0.0, 0.1, 0.15, 1.0, 1.01, 2.5, 2.6, 4.0];
        let masses = vec![0.2, 0.0, 0.9, 0.5, 0.1, 0.0, 3.0];
        let p = prefix_sums(&masses);
        let fast = max_average_containing(&edges, &p);
        let brute = max_average_containing_brute(&edges, &p);
        for (a, b) in fast.iter().zip(&brute) {
            assert!((a - b).abs() <= 1e-14 * b.abs());
        }
    }

    #[test]
    fn luxemburg_of_constant_one() {
        // t* solves t ln(e + t) = 1
        let t_star = bisect_increasing(young_llogl, 1.0, 0.0, 1.0, 1e-15, 200);
        let n = luxemburg_norm(&[1.0; 10]);
        assert!((n - 1.0 / t_star).abs() < 1e-9);
        // homogeneity
        let n3 = luxemburg_norm(&[3.0; 10]);
        assert!((n3 - 3.0 / t_star).abs() < 3e-9);
        assert_eq!(luxemburg_norm(&[0.0; 4]), 0.0);
    }

    #[test]
    fn llogl_zero_and_constant() {
        let g = Grid::covering(0.0, 1.0, 1.0 / 32.0, 0.0).unwrap();
        let fam = IntervalFamily::dyadic(32);
        assert!(maximal_llogl(&StepFunction::zeros(g), &fam).unwrap().is_zero());
        let c = StepFunction::constant(g, 2.0).unwrap();
        let m = maximal_llogl(&c, &fam).unwrap();
        let expected = 2.0 * luxemburg_norm(&[1.0]);
        assert!(m.values().iter().all(|&v| (v - expected).abs() < 1e-8));
    }

    #[test]
    fn vector_single_function() {
        let f = from_vals(vec![0.0, 1.0, 4.0, 0.0, 2.0]);
        let (a, b) = maximal_vector_lq(std::slice::from_ref(&f), 2.0, MaximalKind::default()).unwrap();
        let m = maximal(&f);
        for i in 0..f.len() {
            assert!((a.values()[i] - m.values()[i]).abs() < 1e-14);
            assert!((b.values()[i] - m.values()[i]).abs() < 1e-14);
        }
        assert!(maximal_vector_lq(&[], 2.0, MaximalKind::default()).is_err());
    }

    #[test]
    fn vector_duplicate_is_sqrt_two_scaled() {
        let f = from_vals(vec![0.0, 1.0, 1.0, 0.0, 0.0, 1.0]);
        let (a, b) = maximal_vector_lq(&[f.clone(), f.clone()], 2.0, MaximalKind::default()).unwrap();
        let m = maximal(&f);
        for i in 0..f.len() {
            let e = 2f64.sqrt() * m.values()[i];
            assert!((a.values()[i] - e).abs() < 1e-14);
            assert!((b.values()[i] - e).abs() < 1e-14);
        }
    }

    #[test]
    fn multilinear_constants_and_separated_blocks() {
        let g = Grid::covering(0.0, 3.0, 1.0 / 64.0, 0.0).unwrap();
        let a = StepFunction::constant(g, 2.0).unwrap();
        let b = StepFunction::constant(g, 3.0).unwrap();
        let fam = IntervalFamily::all(g.n_cells());
        let m = multilinear_maximal(&[a, b], &fam).unwrap();
        assert!(m.values().iter().all(|&v| (v - 6.0).abs() < 1e-13));

        let f1 = sample_weight(&WeightDescriptor::indicator(0.0, 1.0), &g).unwrap();
        let f2 = sample_weight(&WeightDescriptor::indicator(2.0, 3.0), &g).unwrap();
        let m = multilinear_maximal(&[f1, f2], &fam).unwrap();
        let i = g.locate(1.5).unwrap();
        assert!((m.values()[i] - 1.0 / 9.0).abs() <= 5.0 * g.dx());
    }

    #[test]
    fn multilinear_single_factor_is_maximal() {
        let f = from_vals(vec![0.5, 0.0, 3.0, 1.0, 0.0, 0.25, 2.0, 0.0]);
        let m1 = multilinear_maximal(std::slice::from_ref(&f), &IntervalFamily::all(f.len())).unwrap();
        let mb = maximal_brute(&f, MaximalKind::default());
        for (a, b) in m1.values().iter().zip(mb.values()) {
            assert!((a - b).abs() <= 1e-14 * b.abs());
        }
    }
}
