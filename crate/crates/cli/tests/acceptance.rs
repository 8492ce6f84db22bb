//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero when any criterion fails. Oracles are computed here,
//! independently of the library code paths they check.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use mixweak::experiments::compare::m2_llogl_compare;
use mixweak::experiments::counterexample::{sawyer_counterexample, CounterexampleParams};
use mixweak::experiments::local::lemma_local_solve;
use mixweak::experiments::sweep::{thm2_sweep, SweepConfig};
use mixweak::norms::{holder_weak_check, lorentz_p1_norm, weak_norm, WeightedMeasure};
use mixweak::rubio::{estimate_norm_bound, rubio_iterate, rubio_verify, RubioConfig, DEFAULT_J_MAX, DEFAULT_PROBES};
use mixweak::weights::{a1_constant, lemma4_check, rh_constant};
use mixweak::{
    maximal, maximal_brute, maximal_fast, sample_weight, seeded_step_functions, Grid, IntervalFamily, MaximalKind,
    StepFunction, WeightDescriptor,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = (bool, String);

fn rel(a: f64, b: f64) -> f64 {
    let s = a.abs().max(b.abs());
    if s == 0.0 {
        0.0
    } else {
        (a - b).abs() / s
    }
}

/// Either i.i.d. cell values or random runs, with exact zeros mixed in.
fn random_function(rng: &mut ChaCha8Rng, grid: &Grid) -> StepFunction {
    let n = grid.n_cells();
    let mut values = vec![0.0; n];
    if rng.gen_bool(0.5) {
        for v in values.iter_mut() {
            *v = if rng.gen_bool(0.3) { 0.0 } else { rng.gen_range(0.0..10.0) };
        }
    } else {
        let mut i = 0;
        while i < n {
            let len = rng.gen_range(1..=n / 4 + 1).min(n - i);
            let level = if rng.gen_bool(0.3) { 0.0 } else { rng.gen_range(0.0..10.0) };
            values[i..i + len].fill(level);
            i += len;
        }
    }
    StepFunction::from_fn(*grid, |i| values[i]).unwrap()
}

fn c1_oracle_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let sizes = [64usize, 512, 2048];
    let mut worst = 0.0f64;
    for t in 0..200 {
        let n = sizes[t % 3];
        let grid = Grid::new(-1.0, 2.0 / n as f64, n, 0.0).unwrap();
        let f = random_function(&mut rng, &grid);
        for kind in [MaximalKind::UncenteredGridAligned, MaximalKind::Centered] {
            let a = maximal_fast(&f, kind);
            let b = maximal_brute(&f, kind);
            for (x, y) in a.values().iter().zip(b.values()) {
                worst = worst.max(rel(*x, *y));
            }
        }
    }
    let n = 1usize << 20;
    let grid = Grid::new(0.0, 1.0 / n as f64, n, 0.0).unwrap();
    let f = random_function(&mut rng, &grid);
    let start = Instant::now();
    let mf = maximal_fast(&f, MaximalKind::UncenteredGridAligned);
    let secs = start.elapsed().as_secs_f64();
    assert_eq!(mf.len(), n);
    (
        worst <= 1e-12 && secs < 10.0,
        format!("200 functions x 2 kinds: max rel err {worst:.2e} (tol 1e-12); n = 2^20 in {secs:.2} s (limit 10 s)"),
    )
}

fn c2_continuum_benchmark() -> Outcome {
    let grid = Grid::covering(-8.0, 8.0, 16.0 / (1 << 14) as f64, 0.0).unwrap();
    assert_eq!(grid.n_cells(), 1 << 14);
    let f = sample_weight(&WeightDescriptor::indicator(-1.0, 1.0), &grid).unwrap();
    let mf = maximal(&f);
    let dx = grid.dx();
    let mut worst = 0.0f64;
    let mut lower_ok = true;
    for i in 0..grid.n_cells() {
        let x = grid.center(i).abs();
        let m = mf.values()[i];
        if x > 1.0 {
            worst = worst.max((m - 2.0 / (1.0 + x)).abs());
        }
        if x > 2.0 && m < 1.0 / x {
            lower_ok = false;
        }
    }
    (
        worst <= 3.0 * dx && lower_ok,
        format!(
            "max |Mf - 2/(1+|x|)| = {worst:.3e} (limit 3 dx = {:.3e}); Mf >= 1/|x| beyond 2: {lower_ok}",
            3.0 * dx
        ),
    )
}

/// `Σ_{10<k<=K} 15/(32 k ln k)`, summed from the small end.
fn ladder_oracle(k_max: u64) -> f64 {
    (11..=k_max).map(|k| 15.0 / (32.0 * k as f64 * (k as f64).ln())).sum()
}

fn c3_counterexample() -> Outcome {
    let start = Instant::now();
    let abs = sawyer_counterexample(10_000, &CounterexampleParams::absolute(10_000)).unwrap();
    let oracle = ladder_oracle(10_000);
    let lhs_err = rel(abs.lhs_partial, oracle);
    let closed_err = rel(abs.lhs_closed_form, oracle);
    let growth = ladder_oracle(100_000) / ladder_oracle(100);
    let r2 = sawyer_counterexample(100, &CounterexampleParams::default()).unwrap();
    let r4 = sawyer_counterexample(10_000, &CounterexampleParams::default()).unwrap();
    let r5 = sawyer_counterexample(100_000, &CounterexampleParams::default()).unwrap();
    let numeric_growth = r5.lhs_partial / r2.lhs_partial;
    let m4 = r4.m2u_max_on_unit.unwrap();
    let m5 = r5.m2u_max_on_unit.unwrap();
    let m2u_change = (m5 - m4).abs() / m4;
    let mut rh = Vec::new();
    for m in 8..=11 {
        let grid = Grid::covering(-5.5, 5.5, 2f64.powi(-m), 0.0).unwrap();
        let v = sample_weight(&WeightDescriptor::SawyerHat, &grid).unwrap();
        rh.push(rh_constant(&v, f64::INFINITY, &IntervalFamily::all(grid.n_cells())).unwrap().value);
    }
    let finest = *rh.last().unwrap();
    let rh_stable = rh.iter().all(|&c| c.is_finite() && (c / finest - 1.0).abs() <= 0.10);
    let secs = start.elapsed().as_secs_f64();
    (
        lhs_err < 0.01 && closed_err < 1e-12 && growth >= 1.5 && m2u_change < 0.05 && rh_stable && secs < 300.0,
        format!(
            "lhs_partial(1e4) = {:.6} vs sum {oracle:.6} (rel {lhs_err:.1e}, tol 1%); ladder 1e5/1e2 = {growth:.3} \
             (numeric {numeric_growth:.3}, need >= 1.5); m2u_max {m4:.6} -> {m5:.6} ({:.2}%, tol 5%); \
             RH_inf(hat) over dx 2^-8..2^-11 = {:?} (tol 10%); {secs:.1} s",
            abs.lhs_partial,
            100.0 * m2u_change,
            rh.iter().map(|c| format!("{c:.4}")).collect::<Vec<_>>()
        ),
    )
}

fn c4_sweep() -> Outcome {
    let rep = thm2_sweep(&SweepConfig::default()).unwrap();
    let bad: Vec<String> = rep
        .groups
        .iter()
        .filter(|g| !(g.all_finite && g.variation < 2.0))
        .map(|g| format!("r={} u={} f={} variation={}", g.r, g.u, g.f, g.variation))
        .collect();
    let worst = rep.groups.iter().map(|g| g.variation).fold(0.0, f64::max);
    let cfg = SweepConfig {
        r_values: vec![1.0],
        u: vec!["constant:1".into()],
        f: vec!["indicator:-1,1".into()],
        ..SweepConfig::default()
    };
    let border = thm2_sweep(&cfg).unwrap();
    let monotone = border.borderline_ladders.iter().filter(|l| l.non_decreasing).count();
    (
        rep.groups.len() == 27 && bad.is_empty() && rep.skipped.is_empty(),
        format!(
            "{} rows, {} groups, all finite, max variation {worst:.4} (limit 2){}; r = 1: {monotone}/{} ladders \
             non-decreasing (reported only)",
            rep.rows.len(),
            rep.groups.len(),
            if bad.is_empty() { String::new() } else { format!(", failing {bad:?}") },
            border.borderline_ladders.len()
        ),
    )
}

fn c5_local_root() -> Outcome {
    let grid = Grid::covering(-4.0, 4.0, 1.0 / 64.0, 0.0).unwrap();
    let f = sample_weight(&WeightDescriptor::indicator(-1.0, 1.0), &grid).unwrap();
    let cases = [(1.0, 0.5f64.sqrt()), (8.0, 4.0), (24.0, 3.0 * 4.0)];
    let mut worst = 0.0f64;
    for (lambda, expected) in cases {
        let a = lemma_local_solve(&f, 2.0, lambda).unwrap();
        worst = worst.max((a - expected).abs());
    }
    (worst <= 1e-8, format!("roots 1/sqrt(2), 4, 12: max abs err {worst:.2e} (tol 1e-8)"))
}

fn c6_rubio() -> Outcome {
    let grid = Grid::covering(0.0, 1.0, 1.0 / 256.0, 0.0).unwrap();
    let hs = seeded_step_functions(&grid, 50, 606);
    let all = IntervalFamily::all(grid.n_cells());
    let settings = [
        ("u = v1 = 1", "constant:1", "constant:1"),
        ("u two-valued, v1 = |x|^-1/2", "step:0,0.5,1,3", "power:-0.5"),
    ];
    let mut ok = true;
    let mut notes = Vec::new();
    for (s, (label, u, v1)) in settings.iter().enumerate() {
        let u = sample_weight(&u.parse().unwrap(), &grid).unwrap();
        let v1 = sample_weight(&v1.parse().unwrap(), &grid).unwrap();
        let base = RubioConfig::new(u, v1, 2.0, 1.0, DEFAULT_J_MAX, 1.0).unwrap();
        let nb = estimate_norm_bound(&base, 2.0, DEFAULT_PROBES, 606).unwrap();
        let cfg = base.with_k0(nb.k0_hat).unwrap();
        let mut fails = 0;
        let mut worst_c = 0.0f64;
        let mut worst_decay = 0.0f64;
        let mut worst_a1 = 0.0f64;
        for h in &hs {
            match rubio_verify(h, &cfg, 2.0) {
                Ok(v) => {
                    if !(v.prop_a && v.prop_c) {
                        fails += 1;
                    }
                    worst_c = worst_c.max(v.prop_c_max_quotient);
                    let tail = &v.decay_ratios[v.decay_ratios.len() - 3..];
                    worst_decay = worst_decay.max(tail.iter().copied().fold(0.0, f64::max));
                }
                Err(e) => {
                    fails += 1;
                    notes.push(format!("{label}: {e}"));
                }
            }
            if s == 0 && !h.is_zero() {
                let series = rubio_iterate(h, &cfg).unwrap();
                let a1 = a1_constant(&series.r_j, &all).unwrap().value;
                worst_a1 = worst_a1.max(a1 / (2.0 * nb.k0_hat));
            }
        }
        if s == 0 && worst_a1 > 1.01 {
            ok = false;
        }
        ok &= fails == 0;
        notes.push(format!(
            "{label}: K0_hat = {:.4}, {fails} failures, max S(R_J h)/(2K0 R_J+1 h) = {worst_c:.6}, max tail decay \
             {worst_decay:.3} (rho 0.9){}",
            nb.k0_hat,
            if s == 0 { format!(", max [R_J h]_A1 / 2K0_hat = {worst_a1:.6} (limit 1.01)") } else { String::new() }
        ));
    }
    (ok, notes.join("; "))
}

fn c7_lemma4() -> Outcome {
    let grid = Grid::covering(0.0, 1.0, 1.0 / 256.0, 0.0).unwrap();
    let ends = [0.0, 0.25, 0.5, 0.75, 1.0];
    let mut weights = Vec::new();
    for (i, &a) in ends.iter().enumerate() {
        for &b in &ends[i + 1..] {
            if a == 0.0 && b == 1.0 {
                continue;
            }
            for ratio in [2.0, 4.0, 8.0] {
                for (low, high) in [(1.0, ratio), (ratio, 1.0)] {
                    weights.push(sample_weight(&WeightDescriptor::two_valued(a, b, low, high), &grid).unwrap());
                }
            }
        }
    }
    let fam = IntervalFamily::all(grid.n_cells());
    let mut checks = 0;
    let mut violations = 0;
    let mut worst = 0.0f64;
    for u in &weights {
        for w in &weights {
            for eps in [0.1, 0.3, 0.5] {
                let r = lemma4_check(u, w, eps, &fam).unwrap();
                checks += 1;
                if !r.holds {
                    violations += 1;
                }
                worst = worst.max(r.lhs.value / r.rhs_bound);
            }
        }
    }
    (
        violations == 0,
        format!("{checks} (u, w, eps) checks, {violations} violations, max lhs/bound {worst:.6}"),
    )
}

fn c8_norm_exactness() -> Outcome {
    let grid = Grid::covering(0.0, 4.0, 1.0, 0.0).unwrap();
    let densities = [[1.0, 1.0, 1.0, 1.0], [1.0, 2.0, 3.0, 4.0], [0.5, 0.25, 2.0, 1.0]];
    let levels = [0.0, 1.0, 2.0, 3.0];
    let mut cases = 0;
    let mut mismatches = 0;
    for d in densities {
        let mu = WeightedMeasure::new(StepFunction::new(grid, d.to_vec()).unwrap());
        for (i, &lo) in levels.iter().enumerate() {
            for &hi in &levels[i + 1..] {
                for mask in 1u32..15 {
                    let high = |c: usize| mask >> c & 1 == 1;
                    let f = StepFunction::from_fn(grid, |c| if high(c) { hi } else { lo }).unwrap();
                    let m_hi: f64 = (0..4).filter(|&c| high(c)).map(|c| d[c]).sum();
                    let m_all: f64 = d.iter().sum();
                    for p in [0.5, 1.0, 2.0, 3.0] {
                        let weak = if lo > 0.0 {
                            (hi * m_hi.powf(1.0 / p)).max(lo * m_all.powf(1.0 / p))
                        } else {
                            hi * m_hi.powf(1.0 / p)
                        };
                        let lorentz = (hi - lo) * m_hi.powf(1.0 / p) + lo * m_all.powf(1.0 / p);
                        let w = weak_norm(&f, p, &mu).unwrap();
                        let l = lorentz_p1_norm(&f, p, &mu).unwrap();
                        cases += 1;
                        if w != weak || l != lorentz || w > l {
                            mismatches += 1;
                        }
                    }
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let mut cheb_bad = 0;
    let mut embed_bad = 0;
    for _ in 0..1000 {
        let n = rng.gen_range(1..=64);
        let g = Grid::new(0.0, 1.0 / n as f64, n, 0.0).unwrap();
        let f = random_function(&mut rng, &g);
        let dens = StepFunction::from_fn(g, |_| rng.gen_range(0.1..5.0)).unwrap();
        let integral: f64 = f.values().iter().zip(dens.values()).map(|(a, b)| a * b * g.dx()).sum();
        let mu = WeightedMeasure::new(dens);
        let p = rng.gen_range(0.5..4.0);
        // rounding slack only: both sides are sums of the same products
        if weak_norm(&f, 1.0, &mu).unwrap() > integral * (1.0 + 1e-12) {
            cheb_bad += 1;
        }
        if weak_norm(&f, p, &mu).unwrap() > lorentz_p1_norm(&f, p, &mu).unwrap() * (1.0 + 1e-12) {
            embed_bad += 1;
        }
    }
    (
        mismatches == 0 && cheb_bad == 0 && embed_bad == 0,
        format!(
            "{cases} two-valued cases on 4 cells: {mismatches} not bit-exact; 1000 random: Chebyshev violations \
             {cheb_bad}, L^(p,1) >= L^(p,inf) violations {embed_bad}"
        ),
    )
}

fn c9_holder() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let grid = Grid::covering(0.0, 1.0, 1.0 / 64.0, 0.0).unwrap();
    let n = grid.n_cells();
    let two_valued = |rng: &mut ChaCha8Rng| {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(a..n);
        let hi = rng.gen_range(0.5..10.0);
        let lo = if rng.gen_bool(0.5) { 0.0 } else { rng.gen_range(0.0..hi) };
        StepFunction::from_fn(grid, |i| if i >= a && i <= b { hi } else { lo }).unwrap()
    };
    let mut worst = 0.0f64;
    for _ in 0..500 {
        let dens = StepFunction::from_fn(grid, |_| rng.gen_range(0.1..3.0)).unwrap();
        let mu = WeightedMeasure::new(dens);
        let h1 = two_valued(&mut rng);
        let h2 = two_valued(&mut rng);
        let r = holder_weak_check(&[h1, h2], &[2.0, 2.0], 1.0, &mu).unwrap();
        worst = worst.max(r.ratio);
    }
    let mut worst_unit = 0.0f64;
    for _ in 0..100 {
        let dens = StepFunction::from_fn(grid, |_| rng.gen_range(0.1..3.0)).unwrap();
        let mu = WeightedMeasure::new(dens);
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(a..n);
        let chi = StepFunction::from_fn(grid, |i| if i >= a && i <= b { 1.0 } else { 0.0 }).unwrap();
        let r = holder_weak_check(&[chi.clone(), chi], &[2.0, 2.0], 1.0, &mu).unwrap();
        worst_unit = worst_unit.max((r.ratio - 1.0).abs());
    }
    // sqrt(m)^2 is m only up to the rounding of the square root
    let unit_tol = 4.0 * f64::EPSILON;
    (
        worst <= 2.0 && worst_unit <= unit_tol,
        format!("500 two-valued pairs: max ratio {worst:.6} (limit 2); common indicators: max |ratio - 1| = {worst_unit:.1e} (tol 4 ulp)"),
    )
}

/// Root of `t ln(e + t) = 1` by plain bisection.
fn t_star() -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid * (std::f64::consts::E + mid).ln() < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn c10_llogl() -> Outcome {
    let descs = ["constant:2", "indicator:-1,1", "spike:0.5,0.0625", "step:-2,0,1,3", "power:-0.5"];
    let mut rungs = Vec::new();
    let mut const_ratio = 0.0;
    for m in 4..=6 {
        let g = Grid::covering(-4.0, 4.0, 2f64.powi(-m), 0.0).unwrap();
        let fs: Vec<StepFunction> = descs.iter().map(|d| sample_weight(&d.parse().unwrap(), &g).unwrap()).collect();
        let r = m2_llogl_compare(&fs, &IntervalFamily::all(g.n_cells())).unwrap();
        const_ratio = r.per_function[0].c_hi;
        rungs.push((r.c_lo, r.c_hi));
    }
    let (lo0, hi0) = rungs[0];
    let finite = rungs.iter().all(|&(lo, hi)| lo.is_finite() && hi.is_finite() && lo > 0.0);
    let stable = rungs.iter().all(|&(lo, hi)| (lo / lo0 - 1.0).abs() <= 0.2 && (hi / hi0 - 1.0).abs() <= 0.2);
    let ts = t_star();
    (
        finite && stable && (const_ratio - 0.795f64).abs() <= 0.01 && (const_ratio - ts).abs() <= 1e-8,
        format!(
            "(c_lo, c_hi) over dx 2^-4..2^-6: {:?} (tol 20%); constant ratio {const_ratio:.6}, t* = {ts:.6} (0.795 +- 0.01)",
            rungs.iter().map(|(a, b)| format!("({a:.4}, {b:.4})")).collect::<Vec<_>>()
        ),
    )
}

fn run_cli(out: &Path, args: &[&str]) -> (bool, String) {
    let o = Command::new(env!("CARGO_BIN_EXE_mixweak"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs");
    let stdout = String::from_utf8_lossy(&o.stdout).replace(&out.display().to_string(), "<out>");
    (o.status.success(), stdout)
}

fn dir_contents(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    v.sort();
    v
}

fn c11_determinism() -> Outcome {
    let commands: [&[&str]; 10] = [
        &["maximal"],
        &["weights", "--set", "refinements=0", "--set", "lemma4={}"],
        &["norms", "--set", "holder={}", "--set", "mixed={}"],
        &["rubio", "--random-h", "3", "--seed", "5"],
        &["counterexample", "--k-max", "200"],
        &["sweep", "--r", "2", "--r", "1", "--u", "constant", "--f", "indicator:-1,1", "--radius", "8", "--eps", "0.0625", "--eps", "0.03125", "--halvings", "0"],
        &["annuli"],
        &["compare-llogl", "--set", "refinements=1"],
        &["vector", "--set", "refinements=1"],
        &["multilinear", "--set", "refinements=0"],
    ];
    let mut differing = Vec::new();
    let mut files = 0;
    for args in commands {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let (ok_a, out_a) = run_cli(a.path(), args);
        let (ok_b, out_b) = run_cli(b.path(), args);
        let ca = dir_contents(a.path());
        let cb = dir_contents(b.path());
        files += ca.len();
        if !(ok_a && ok_b && out_a == out_b && ca == cb && !ca.is_empty()) {
            differing.push(args[0]);
        }
    }
    (
        differing.is_empty(),
        format!("10 commands run twice, {files} output files compared byte for byte; differing: {differing:?}"),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("maximal oracle equivalence", c1_oracle_equivalence),
        ("continuum benchmark", c2_continuum_benchmark),
        ("counterexample reproduction", c3_counterexample),
        ("mixed weak-type sweep stability", c4_sweep),
        ("local root", c5_local_root),
        ("Rubio de Francia majorant", c6_rubio),
        ("A_1 product bound", c7_lemma4),
        ("norm exactness", c8_norm_exactness),
        ("weak-Lorentz Holder", c9_holder),
        ("M^2 vs L log L", c10_llogl),
        ("CLI determinism", c11_determinism),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (ok, detail) = match catch_unwind(AssertUnwindSafe(check)) {
            Ok(r) => r,
            Err(p) => {
                let msg = p
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                (false, format!("panicked: {msg}"))
            }
        };
        if !ok {
            failed += 1;
        }
        println!(
            "[{}] {:>2} {name}: {detail} [{:.1} s]",
            if ok { "PASS" } else { "FAIL" },
            k + 1,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
