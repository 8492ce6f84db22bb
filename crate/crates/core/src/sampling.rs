//! Analytic weight descriptors and their exact cell-average sampling.
//!
//! Every atom is a piecewise power function `c |x - x0|^α` on finitely many
//! pieces inside the sampling window. Cell averages come from closed-form
//! antiderivatives; a product of two pieces composes into a single piece when
//! one factor is constant or both share a center, and is otherwise integrated
//! with the midpoint rule.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid, StepFunction};

/// Analytic description of a nonnegative weight on the line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightDescriptor {
    Constant { c: f64 },
    /// `|x|^alpha`
    PowerWeight { alpha: f64 },
    /// `Σ_k |x - k| χ_{|x-k| <= 1/2}`
    SawyerHat,
    /// `Σ_{10 < k <= k_max} (k / ln k) χ_{[k + 1/(4k), k + 1/k]}`
    SawyerStaircase { k_max: u64 },
    Indicator { a: f64, b: f64 },
    Product { factors: Vec<WeightDescriptor> },
    Sum { terms: Vec<WeightDescriptor> },
    Table { table: StepFunction },
}

impl WeightDescriptor {
    pub fn constant(c: f64) -> Self {
        WeightDescriptor::Constant { c }
    }
    pub fn power(alpha: f64) -> Self {
        WeightDescriptor::PowerWeight { alpha }
    }
    pub fn indicator(a: f64, b: f64) -> Self {
        WeightDescriptor::Indicator { a, b }
    }
    pub fn staircase(k_max: u64) -> Self {
        WeightDescriptor::SawyerStaircase { k_max }
    }
    pub fn product(factors: Vec<WeightDescriptor>) -> Self {
        WeightDescriptor::Product { factors }
    }
    pub fn sum(terms: Vec<WeightDescriptor>) -> Self {
        WeightDescriptor::Sum { terms }
    }

    /// `high` on `[a, b]`, `low` elsewhere.
    pub fn two_valued(a: f64, b: f64, low: f64, high: f64) -> Self {
        let region = if high >= low {
            WeightDescriptor::indicator(a, b)
        } else {
            WeightDescriptor::sum(vec![
                WeightDescriptor::indicator(-f64::MAX, a),
                WeightDescriptor::indicator(b, f64::MAX),
            ])
        };
        WeightDescriptor::sum(vec![
            WeightDescriptor::constant(low.min(high)),
            WeightDescriptor::product(vec![WeightDescriptor::constant((high - low).abs()), region]),
        ])
    }

    /// Unit-mass bump of the given width starting at `x`.
    pub fn spike(x: f64, width: f64) -> Self {
        WeightDescriptor::product(vec![
            WeightDescriptor::constant(1.0 / width),
            WeightDescriptor::indicator(x, x + width),
        ])
    }

    fn validate(&self) -> Result<()> {
        match self {
            WeightDescriptor::Constant { c } if !(c.is_finite() && *c >= 0.0) => {
                Err(Error::param("constant.c", format!("{c} must be finite and >= 0")))
            }
            WeightDescriptor::PowerWeight { alpha } if !alpha.is_finite() => {
                Err(Error::param("power.alpha", "exponent must be finite"))
            }
            WeightDescriptor::Indicator { a, b } if !(a.is_finite() && b.is_finite() && a <= b) => {
                Err(Error::param("indicator", format!("[{a}, {b}] is not an interval")))
            }
            WeightDescriptor::Product { factors } => factors.iter().try_for_each(|f| f.validate()),
            WeightDescriptor::Sum { terms } => terms.iter().try_for_each(|t| t.validate()),
            _ => Ok(()),
        }
    }

    /// Expands into a sum of products of atoms.
    fn expand(&self) -> Vec<Vec<&WeightDescriptor>> {
        match self {
            WeightDescriptor::Sum { terms } => terms.iter().flat_map(|t| t.expand()).collect(),
            WeightDescriptor::Product { factors } => {
                let mut acc: Vec<Vec<&WeightDescriptor>> = vec![vec![]];
                for f in factors {
                    let ex = f.expand();
                    acc = acc
                        .iter()
                        .flat_map(|prefix| {
                            ex.iter().map(move |t| {
                                let mut v = prefix.clone();
                                v.extend(t.iter().copied());
                                v
                            })
                        })
                        .collect();
                }
                acc
            }
            atom => vec![vec![atom]],
        }
    }

    fn atom_pieces(&self, lo: f64, hi: f64) -> Vec<Piece> {
        let power = |a: f64, b: f64, coef: f64, center: f64, alpha: f64| {
            Piece::Power(PowerPiece {
                a,
                b,
                coef,
                center,
                alpha,
            })
        };
        match self {
            WeightDescriptor::Constant { c } => {
                if *c > 0.0 {
                    vec![power(lo, hi, *c, 0.0, 0.0)]
                } else {
                    vec![]
                }
            }
            WeightDescriptor::PowerWeight { alpha } => vec![power(lo, hi, 1.0, 0.0, *alpha)],
            WeightDescriptor::SawyerHat => {
                let k0 = (lo - 0.5).ceil() as i64;
                let k1 = (hi + 0.5).floor() as i64;
                (k0..=k1)
                    .filter_map(|k| {
                        let kf = k as f64;
                        let a = (kf - 0.5).max(lo);
                        let b = (kf + 0.5).min(hi);
                        (b > a).then(|| power(a, b, 1.0, kf, 1.0))
                    })
                    .collect()
            }
            WeightDescriptor::SawyerStaircase { k_max } => {
                let first = (lo.floor().max(10.0) as u64).saturating_sub(1).max(11);
                let last = (*k_max).min(hi.ceil().max(0.0) as u64 + 1);
                (first..=last)
                    .filter_map(|k| {
                        let (ja, jb) = staircase_support(k);
                        let a = ja.max(lo);
                        let b = jb.min(hi);
                        (b > a).then(|| power(a, b, staircase_height(k), 0.0, 0.0))
                    })
                    .collect()
            }
            WeightDescriptor::Indicator { a, b } => {
                let a = a.max(lo);
                let b = b.min(hi);
                if b > a {
                    vec![power(a, b, 1.0, 0.0, 0.0)]
                } else {
                    vec![]
                }
            }
            WeightDescriptor::Table { table } => {
                let g = table.grid();
                table
                    .values()
                    .iter()
                    .enumerate()
                    .filter_map(|(i, &v)| {
                        let (a, b) = g.cell_bounds(i);
                        let a = a.max(lo);
                        let b = b.min(hi);
                        (v > 0.0 && b > a).then(|| power(a, b, v, 0.0, 0.0))
                    })
                    .collect()
            }
            WeightDescriptor::Product { .. } | WeightDescriptor::Sum { .. } => {
                unreachable!("expanded before piece generation")
            }
        }
    }

    fn terms(&self, lo: f64, hi: f64) -> Result<Vec<Vec<Piece>>> {
        self.validate()?;
        let mut out = Vec::new();
        for product in self.expand() {
            let mut pieces: Option<Vec<Piece>> = None;
            for atom in product {
                let p = atom.atom_pieces(lo, hi);
                pieces = Some(match pieces {
                    None => p,
                    Some(acc) => multiply_pieces(&acc, &p),
                });
            }
            match pieces {
                Some(p) if !p.is_empty() => out.push(p),
                // an empty product is the constant 1
                None => out.push(vec![Piece::Power(PowerPiece {
                    a: lo,
                    b: hi,
                    coef: 1.0,
                    center: 0.0,
                    alpha: 0.0,
                })]),
                _ => {}
            }
        }
        Ok(out)
    }

    /// Exact `∫_a^b w dx` (midpoint rule only on non-composable product pieces).
    pub fn integral(&self, a: f64, b: f64) -> Result<f64> {
        if !(b >= a) {
            return Err(Error::param("integral", format!("[{a}, {b}] is not an interval")));
        }
        let masses = self.cell_masses(&[a, b], |_| false)?;
        Ok(masses[0])
    }

    /// Mass of the weight in each cell `[edges[i], edges[i+1]]`; cells with
    /// `skip(i)` are left at zero and never evaluated.
    pub fn cell_masses<S: Fn(usize) -> bool>(&self, edges: &[f64], skip: S) -> Result<Vec<f64>> {
        if edges.len() < 2 {
            return Ok(vec![]);
        }
        let n = edges.len() - 1;
        let lo = edges[0];
        let hi = edges[n];
        let mut masses = vec![0.0; n];
        for term in self.terms(lo, hi)? {
            for piece in &term {
                let (pa, pb) = piece.bounds();
                let first = edges.partition_point(|&e| e <= pa).saturating_sub(1);
                let mut i = first;
                while i < n && edges[i] < pb {
                    if !skip(i) {
                        let s = edges[i].max(pa);
                        let t = edges[i + 1].min(pb);
                        if t > s {
                            masses[i] += piece.integral(s, t).map_err(|alpha| Error::SingularCell {
                                alpha,
                                cell: i,
                            })?;
                        }
                    }
                    i += 1;
                }
            }
        }
        Ok(masses)
    }

    /// Whether the weight has any support inside `[lo, hi]`.
    pub fn overlaps(&self, lo: f64, hi: f64) -> Result<bool> {
        Ok(!self.terms(lo, hi)?.is_empty())
    }
}

/// `J_k = [k + 1/(4k), k + 1/k]`
pub fn staircase_support(k: u64) -> (f64, f64) {
    let kf = k as f64;
    (kf + 0.25 / kf, kf + 1.0 / kf)
}

/// `k / ln k`, natural logarithm.
pub fn staircase_height(k: u64) -> f64 {
    let kf = k as f64;
    kf / kf.ln()
}

/// Exact cell averages of `w` on `grid`. Excluded gap cells are zero.
pub fn sample_weight(w: &WeightDescriptor, grid: &Grid) -> Result<StepFunction> {
    let n = grid.n_cells();
    let edges: Vec<f64> = (0..=n).map(|i| grid.edge(i)).collect();
    if !w.overlaps(edges[0], edges[n])? {
        log::warn!(
            "weight {w} has no support on [{}, {}]; sampling to zero",
            edges[0],
            edges[n]
        );
        return Ok(StepFunction::zeros(*grid));
    }
    let masses = w.cell_masses(&edges, |i| grid.is_excluded(i))?;
    let dx = grid.dx();
    StepFunction::new(*grid, masses.into_iter().map(|m| (m / dx).max(0.0)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct PowerPiece {
    a: f64,
    b: f64,
    coef: f64,
    center: f64,
    alpha: f64,
}

impl PowerPiece {
    fn eval(&self, x: f64) -> f64 {
        if self.alpha == 0.0 {
            self.coef
        } else {
            self.coef * (x - self.center).abs().powf(self.alpha)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Piece {
    Power(PowerPiece),
    /// Product without a closed form; integrated by the midpoint rule.
    Opaque { a: f64, b: f64, factors: Vec<PowerPiece> },
}

impl Piece {
    fn bounds(&self) -> (f64, f64) {
        match self {
            Piece::Power(p) => (p.a, p.b),
            Piece::Opaque { a, b, .. } => (*a, *b),
        }
    }

    fn factors(&self) -> Vec<PowerPiece> {
        match self {
            Piece::Power(p) => vec![*p],
            Piece::Opaque { factors, .. } => factors.clone(),
        }
    }

    /// `∫_s^t` of the piece; `Err(alpha)` on a non-integrable singularity.
    fn integral(&self, s: f64, t: f64) -> std::result::Result<f64, f64> {
        match self {
            Piece::Power(p) => Ok(p.coef * power_integral(p.center, p.alpha, s, t)?),
            Piece::Opaque { factors, .. } => {
                let mid = 0.5 * (s + t);
                let v: f64 = factors.iter().map(|f| f.eval(mid)).product();
                if v.is_finite() {
                    Ok(v * (t - s))
                } else {
                    Err(factors.iter().map(|f| f.alpha).fold(0.0, f64::min))
                }
            }
        }
    }
}

fn compose(p: &PowerPiece, q: &PowerPiece, a: f64, b: f64) -> Piece {
    let coef = p.coef * q.coef;
    if q.alpha == 0.0 {
        Piece::Power(PowerPiece { a, b, coef, ..*p })
    } else if p.alpha == 0.0 {
        Piece::Power(PowerPiece { a, b, coef, ..*q })
    } else if p.center == q.center {
        Piece::Power(PowerPiece {
            a,
            b,
            coef,
            center: p.center,
            alpha: p.alpha + q.alpha,
        })
    } else {
        Piece::Opaque {
            a,
            b,
            factors: vec![*p, *q],
        }
    }
}

fn multiply_pieces(xs: &[Piece], ys: &[Piece]) -> Vec<Piece> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < xs.len() && j < ys.len() {
        let (xa, xb) = xs[i].bounds();
        let (ya, yb) = ys[j].bounds();
        let a = xa.max(ya);
        let b = xb.min(yb);
        if b > a {
            let piece = match (&xs[i], &ys[j]) {
                (Piece::Power(p), Piece::Power(q)) => compose(p, q, a, b),
                (x, y) => {
                    let mut factors = x.factors();
                    factors.extend(y.factors());
                    Piece::Opaque { a, b, factors }
                }
            };
            out.push(piece);
        }
        if xb <= yb {
            i += 1;
        } else {
            j += 1;
        }
    }
    out
}

/// `∫_s^t |x - c|^alpha dx` for `s < t`.
fn power_integral(c: f64, alpha: f64, s: f64, t: f64) -> std::result::Result<f64, f64> {
    if alpha == 0.0 {
        return Ok(t - s);
    }
    let ds = s - c;
    let dt = t - c;
    if ds >= 0.0 {
        one_sided(ds, t - s, alpha)
    } else if dt <= 0.0 {
        one_sided(-dt, t - s, alpha)
    } else {
        Ok(one_sided(0.0, -ds, alpha)? + one_sided(0.0, dt, alpha)?)
    }
}

/// `∫_d^{d+width} y^alpha dy` for `d >= 0`.
fn one_sided(d: f64, width: f64, alpha: f64) -> std::result::Result<f64, f64> {
    let e = alpha + 1.0;
    if d == 0.0 {
        if e <= 0.0 {
            return Err(alpha);
        }
        return Ok(width.powf(e) / e);
    }
    let r = (width / d).ln_1p();
    if e.abs() < 1e-15 {
        Ok(r)
    } else {
        Ok(d.powf(e) * (e * r).exp_m1() / e)
    }
}

impl fmt::Display for WeightDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightDescriptor::Constant { c } => write!(f, "constant:{c}"),
            WeightDescriptor::PowerWeight { alpha } => write!(f, "power:{alpha}"),
            WeightDescriptor::SawyerHat => write!(f, "hat"),
            WeightDescriptor::SawyerStaircase { k_max } => write!(f, "staircase:{k_max}"),
            WeightDescriptor::Indicator { a, b } => write!(f, "indicator:{a},{b}"),
            WeightDescriptor::Product { factors } => {
                let parts: Vec<String> = factors.iter().map(|x| x.to_string()).collect();
                write!(f, "product({})", parts.join(";"))
            }
            WeightDescriptor::Sum { terms } => {
                let parts: Vec<String> = terms.iter().map(|x| x.to_string()).collect();
                write!(f, "sum({})", parts.join(";"))
            }
            WeightDescriptor::Table { table } => write!(f, "table[{}]", table.len()),
        }
    }
}

impl FromStr for WeightDescriptor {
    type Err = Error;

    /// Parses the compact forms used on the command line:
    /// `constant[:c]`, `power:alpha`, `hat`, `staircase:k_max`,
    /// `indicator:a,b`, `step:a,b,low,high`, `spike:x,width`, and the
    /// composites `product(d1;d2;..)` and `sum(d1;d2;..)` that `Display` emits.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        for (name, is_product) in [("product(", true), ("sum(", false)] {
            if let Some(inner) = s.strip_prefix(name).and_then(|r| r.strip_suffix(')')) {
                let parts = split_top_level(inner)
                    .into_iter()
                    .map(str::parse)
                    .collect::<Result<Vec<WeightDescriptor>>>()?;
                let desc = if is_product {
                    WeightDescriptor::product(parts)
                } else {
                    WeightDescriptor::sum(parts)
                };
                desc.validate()?;
                return Ok(desc);
            }
        }
        let (head, args) = s.split_once(':').unwrap_or((s, ""));
        let nums = || -> Result<Vec<f64>> {
            args.split(',')
                .filter(|a| !a.trim().is_empty())
                .map(|a| {
                    a.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::param(head, format!("`{a}` is not a number")))
                })
                .collect()
        };
        let need = |k: usize| -> Result<Vec<f64>> {
            let v = nums()?;
            if v.len() == k {
                Ok(v)
            } else {
                Err(Error::param(head, format!("expected {k} arguments, got {}", v.len())))
            }
        };
        let desc = match head {
            "constant" => {
                let v = nums()?;
                WeightDescriptor::constant(*v.first().unwrap_or(&1.0))
            }
            "power" => WeightDescriptor::power(need(1)?[0]),
            "hat" => WeightDescriptor::SawyerHat,
            "staircase" => {
                let k = args
                    .trim()
                    .parse::<u64>()
                    .map_err(|_| Error::param("staircase", format!("`{args}` is not an integer")))?;
                WeightDescriptor::staircase(k)
            }
            "indicator" => {
                let v = need(2)?;
                WeightDescriptor::indicator(v[0], v[1])
            }
            "step" => {
                let v = need(4)?;
                WeightDescriptor::two_valued(v[0], v[1], v[2], v[3])
            }
            "spike" => {
                let v = need(2)?;
                if !(v[1] > 0.0) {
                    return Err(Error::param("spike", "width must be positive"));
                }
                WeightDescriptor::spike(v[0], v[1])
            }
            other => return Err(Error::param("weight", format!("unknown descriptor `{other}`"))),
        };
        desc.validate()?;
        Ok(desc)
    }
}

/// Splits on `;` outside parentheses.
fn split_top_level(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ';' if depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

/// `count` random step functions drawn from one ChaCha8 stream: each has
/// between 1 and 16 runs at random breakpoints, and each run is zero with
/// probability 1/4 and otherwise uniform on `(0, 10)`.
pub fn seeded_step_functions(grid: &Grid, count: usize, seed: u64) -> Vec<StepFunction> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let n = grid.n_cells();
    (0..count)
        .map(|_| {
            let runs = rng.gen_range(1..=n.min(16));
            let mut cuts: Vec<usize> = (0..runs - 1).map(|_| rng.gen_range(1..n)).collect();
            cuts.sort_unstable();
            let levels: Vec<f64> = (0..runs)
                .map(|_| if rng.gen_bool(0.25) { 0.0 } else { rng.gen_range(0.0..10.0) })
                .collect();
            let values = (0..n).map(|i| levels[cuts.partition_point(|&c| c <= i)]).collect();
            StepFunction::from_values_unchecked(*grid, values)
        })
        .collect()
}
