//! Uniform grids on the real line and nonnegative step functions on them.
//!
//! A [`Grid`] partitions `[left, left + n_cells * dx)` into equal cells. When
//! `origin_gap > 0` the cells lying inside `[-origin_gap, origin_gap]` are
//! *excluded*: step functions vanish there, so the covered set is the
//! truncated line `{|x| >= origin_gap}` while interval lengths seen by the
//! maximal operators still include the gap.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{compensated_sum, fmt17, parse17, CompensatedSum};

const ALIGN_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridRepr", into = "GridRepr")]
pub struct Grid {
    left: f64,
    dx: f64,
    n_cells: usize,
    origin_gap: f64,
    /// Half-open range of excluded cell indices.
    excluded: (usize, usize),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridRepr {
    left: f64,
    dx: f64,
    n_cells: usize,
    origin_gap: f64,
}

impl TryFrom<GridRepr> for Grid {
    type Error = Error;
    fn try_from(r: GridRepr) -> Result<Self> {
        Grid::new(r.left, r.dx, r.n_cells, r.origin_gap)
    }
}

impl From<Grid> for GridRepr {
    fn from(g: Grid) -> Self {
        GridRepr {
            left: g.left,
            dx: g.dx,
            n_cells: g.n_cells,
            origin_gap: g.origin_gap,
        }
    }
}

impl Grid {
    pub fn new(left: f64, dx: f64, n_cells: usize, origin_gap: f64) -> Result<Self> {
        if !left.is_finite() {
            return Err(Error::InvalidGrid(format!("left = {left} is not finite")));
        }
        if !(dx.is_finite() && dx > 0.0) {
            return Err(Error::InvalidGrid(format!("dx = {dx} must be positive")));
        }
        if n_cells == 0 {
            return Err(Error::InvalidGrid("n_cells must be at least 1".into()));
        }
        if !(origin_gap.is_finite() && origin_gap >= 0.0) {
            return Err(Error::InvalidGrid(format!(
                "origin_gap = {origin_gap} must be nonnegative"
            )));
        }
        let mut excluded = (0, 0);
        if origin_gap > 0.0 {
            let right = left + n_cells as f64 * dx;
            let lo = -origin_gap;
            let hi = origin_gap;
            if lo < right && hi > left {
                // every gap edge that falls strictly inside the range must be a cell boundary
                let first = Self::boundary_index(left, dx, n_cells, lo.max(left), "-origin_gap")?;
                let last = Self::boundary_index(left, dx, n_cells, hi.min(right), "origin_gap")?;
                excluded = (first, last);
            }
        }
        Ok(Grid {
            left,
            dx,
            n_cells,
            origin_gap,
            excluded,
        })
    }

    fn boundary_index(left: f64, dx: f64, n: usize, x: f64, what: &str) -> Result<usize> {
        let t = (x - left) / dx;
        let k = t.round();
        if (t - k).abs() > ALIGN_TOL * t.abs().max(1.0) || k < 0.0 || k > n as f64 {
            return Err(Error::InvalidGrid(format!(
                "{what} = {x} is not a cell boundary (offset {t} cells)"
            )));
        }
        Ok(k as usize)
    }

    /// Grid covering `[a, b]` with step `dx`; `(b - a) / dx` must be an integer.
    pub fn covering(a: f64, b: f64, dx: f64, origin_gap: f64) -> Result<Self> {
        if !(b > a) {
            return Err(Error::InvalidGrid(format!("empty range [{a}, {b}]")));
        }
        let t = (b - a) / dx;
        let n = t.round();
        if (t - n).abs() > ALIGN_TOL * t.max(1.0) || n < 1.0 {
            return Err(Error::InvalidGrid(format!(
                "range [{a}, {b}] is not a whole number of cells of width {dx}"
            )));
        }
        Grid::new(a, dx, n as usize, origin_gap)
    }

    /// Symmetric grid on `[-radius, radius]`.
    pub fn symmetric(radius: f64, dx: f64, origin_gap: f64) -> Result<Self> {
        Grid::covering(-radius, radius, dx, origin_gap)
    }

    pub fn left(&self) -> f64 {
        self.left
    }
    pub fn dx(&self) -> f64 {
        self.dx
    }
    pub fn n_cells(&self) -> usize {
        self.n_cells
    }
    pub fn origin_gap(&self) -> f64 {
        self.origin_gap
    }
    pub fn right(&self) -> f64 {
        self.edge(self.n_cells)
    }

    /// Left boundary of cell `i` (or the right end of the grid for `i = n_cells`).
    #[inline]
    pub fn edge(&self, i: usize) -> f64 {
        self.left + i as f64 * self.dx
    }

    #[inline]
    pub fn center(&self, i: usize) -> f64 {
        self.left + (i as f64 + 0.5) * self.dx
    }

    pub fn cell_bounds(&self, i: usize) -> (f64, f64) {
        (self.edge(i), self.edge(i + 1))
    }

    #[inline]
    pub fn is_excluded(&self, i: usize) -> bool {
        i >= self.excluded.0 && i < self.excluded.1
    }

    pub fn excluded_range(&self) -> std::ops::Range<usize> {
        self.excluded.0..self.excluded.1
    }

    /// Index of the cell containing `x`, if any.
    pub fn locate(&self, x: f64) -> Option<usize> {
        let t = ((x - self.left) / self.dx).floor();
        if t < 0.0 || t >= self.n_cells as f64 {
            None
        } else {
            Some(t as usize)
        }
    }

    pub fn same_as(&self, other: &Grid) -> bool {
        self.left.to_bits() == other.left.to_bits()
            && self.dx.to_bits() == other.dx.to_bits()
            && self.n_cells == other.n_cells
            && self.origin_gap.to_bits() == other.origin_gap.to_bits()
    }

    pub fn check_same(&self, other: &Grid) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "(left {}, dx {}, n {}, gap {}) vs (left {}, dx {}, n {}, gap {})",
                self.left,
                self.dx,
                self.n_cells,
                self.origin_gap,
                other.left,
                other.dx,
                other.n_cells,
                other.origin_gap
            )))
        }
    }

    /// Grid with the same extent and half the cell width.
    pub fn refined(&self) -> Result<Grid> {
        Grid::new(self.left, self.dx / 2.0, self.n_cells * 2, self.origin_gap)
    }
}

/// Nonnegative piecewise-constant function on a [`Grid`], one value per cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StepRepr", into = "StepRepr")]
pub struct StepFunction {
    grid: Grid,
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StepRepr {
    left: f64,
    dx: f64,
    n_cells: usize,
    origin_gap: f64,
    values: Vec<f64>,
}

impl TryFrom<StepRepr> for StepFunction {
    type Error = Error;
    fn try_from(r: StepRepr) -> Result<Self> {
        let grid = Grid::new(r.left, r.dx, r.n_cells, r.origin_gap)?;
        StepFunction::new(grid, r.values)
    }
}

impl From<StepFunction> for StepRepr {
    fn from(f: StepFunction) -> Self {
        StepRepr {
            left: f.grid.left,
            dx: f.grid.dx,
            n_cells: f.grid.n_cells,
            origin_gap: f.grid.origin_gap,
            values: f.values,
        }
    }
}

impl StepFunction {
    /// Builds a step function; excluded cells must carry zero.
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n_cells {
            return Err(Error::InvalidGrid(format!(
                "{} values for {} cells",
                values.len(),
                grid.n_cells
            )));
        }
        for (i, &v) in values.iter().enumerate() {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::param(
                    format!("values[{i}]"),
                    format!("{v} is not a finite nonnegative number"),
                ));
            }
            if v != 0.0 && grid.is_excluded(i) {
                return Err(Error::param(
                    format!("values[{i}]"),
                    "nonzero value inside the excluded origin gap",
                ));
            }
        }
        Ok(StepFunction { grid, values })
    }

    /// Internal constructor for values known to be valid; excluded cells are zeroed.
    pub(crate) fn from_values_unchecked(grid: Grid, mut values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.n_cells);
        for i in grid.excluded_range() {
            values[i] = 0.0;
        }
        debug_assert!(values.iter().all(|v| v.is_finite() && *v >= 0.0));
        StepFunction { grid, values }
    }

    pub fn zeros(grid: Grid) -> Self {
        StepFunction {
            values: vec![0.0; grid.n_cells],
            grid,
        }
    }

    pub fn constant(grid: Grid, c: f64) -> Result<Self> {
        StepFunction::from_fn(grid, |_| c)
    }

    /// Cellwise construction from the cell index; excluded cells get 0.
    pub fn from_fn<F: FnMut(usize) -> f64>(grid: Grid, mut f: F) -> Result<Self> {
        let values = (0..grid.n_cells)
            .map(|i| if grid.is_excluded(i) { 0.0 } else { f(i) })
            .collect();
        StepFunction::new(grid, values)
    }

    /// Unit mass at cell `i`, scaled to `height`.
    pub fn spike(grid: Grid, i: usize, height: f64) -> Result<Self> {
        if i >= grid.n_cells {
            return Err(Error::param("spike", format!("cell {i} outside grid")));
        }
        StepFunction::from_fn(grid, |j| if i == j { height } else { 0.0 })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
    pub fn len(&self) -> usize {
        self.values.len()
    }
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// Cellwise map. The closure must return finite nonnegative values.
    pub fn map<F: FnMut(f64) -> f64>(&self, mut f: F) -> Result<Self> {
        StepFunction::new(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn scale(&self, c: f64) -> Result<Self> {
        self.map(|v| v * c)
    }

    pub fn try_zip<F: FnMut(f64, f64) -> f64>(&self, other: &StepFunction, mut f: F) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        StepFunction::new(self.grid, values)
    }

    pub fn mul(&self, other: &StepFunction) -> Result<Self> {
        self.try_zip(other, |a, b| a * b)
    }

    pub fn add(&self, other: &StepFunction) -> Result<Self> {
        self.try_zip(other, |a, b| a + b)
    }

    /// Cellwise `self / other` on cells where `other > 0`; zero elsewhere.
    pub fn div_where_positive(&self, other: &StepFunction) -> Result<Self> {
        self.try_zip(other, |a, b| if b > 0.0 { a / b } else { 0.0 })
    }

    /// Keeps the values where `mask` is true.
    pub fn restrict(&self, mask: &[bool]) -> Result<Self> {
        if mask.len() != self.len() {
            return Err(Error::GridMismatch(format!(
                "mask of length {} for {} cells",
                mask.len(),
                self.len()
            )));
        }
        Ok(StepFunction {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(mask)
                .map(|(&v, &m)| if m { v } else { 0.0 })
                .collect(),
        })
    }

    /// `true` where `self <= other * (1 + rel_tol)` on every cell.
    pub fn dominated_by(&self, other: &StepFunction, rel_tol: f64) -> bool {
        self.values
            .iter()
            .zip(&other.values)
            .all(|(&a, &b)| a <= b + rel_tol * b.abs().max(a.abs()))
    }

    /// CSV with a metadata comment line followed by `x_center,value` rows.
    pub fn to_csv(&self) -> String {
        let g = &self.grid;
        let mut out = format!(
            "# left={},dx={},n_cells={},origin_gap={}\nx_center,value\n",
            fmt17(g.left),
            fmt17(g.dx),
            g.n_cells,
            fmt17(g.origin_gap)
        );
        for (i, &v) in self.values.iter().enumerate() {
            out.push_str(&fmt17(g.center(i)));
            out.push(',');
            out.push_str(&fmt17(v));
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let meta = lines
            .next()
            .and_then(|l| l.strip_prefix("# "))
            .ok_or_else(|| Error::Io("missing grid metadata line".into()))?;
        let mut left = None;
        let mut dx = None;
        let mut n = None;
        let mut gap = None;
        for kv in meta.split(',') {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Io(format!("bad metadata entry `{kv}`")))?;
            match k.trim() {
                "left" => left = parse17(v),
                "dx" => dx = parse17(v),
                "n_cells" => n = v.trim().parse::<usize>().ok(),
                "origin_gap" => gap = parse17(v),
                other => return Err(Error::Io(format!("unknown metadata key `{other}`"))),
            }
        }
        let missing = |k: &str| Error::Io(format!("metadata key `{k}` missing or malformed"));
        let grid = Grid::new(
            left.ok_or_else(|| missing("left"))?,
            dx.ok_or_else(|| missing("dx"))?,
            n.ok_or_else(|| missing("n_cells"))?,
            gap.ok_or_else(|| missing("origin_gap"))?,
        )?;
        match lines.next() {
            Some("x_center,value") => {}
            other => return Err(Error::Io(format!("unexpected CSV header {other:?}"))),
        }
        let mut values = Vec::with_capacity(grid.n_cells);
        for (row, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let (_, v) = line
                .split_once(',')
                .ok_or_else(|| Error::Io(format!("row {row}: expected two columns")))?;
            values.push(parse17(v).ok_or_else(|| Error::Io(format!("row {row}: bad value `{v}`")))?);
        }
        StepFunction::new(grid, values)
    }
}

/// `∫ f dx` over the cells of the grid.
pub fn integrate(f: &StepFunction) -> f64 {
    compensated_sum(f.values.iter().copied()) * f.grid.dx
}

/// `Σ_{mask[i]} w[i] dx`, the measure `w dx` of the masked set.
pub fn weighted_measure(mask: &[bool], w: &StepFunction) -> Result<f64> {
    if mask.len() != w.len() {
        return Err(Error::GridMismatch(format!(
            "mask of length {} for {} cells",
            mask.len(),
            w.len()
        )));
    }
    let mut acc = CompensatedSum::new();
    for (&m, &v) in mask.iter().zip(&w.values) {
        if m {
            acc.add(v);
        }
    }
    Ok(acc.value() * w.grid.dx)
}
