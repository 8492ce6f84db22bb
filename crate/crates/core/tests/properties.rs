use mixweak::experiments::annuli::annuli_check;
use mixweak::experiments::local::{lemma_local_solve, local_g};
use mixweak::maximal::{luxemburg_norm, maximal_llogl, maximal_on_partition, max_average_containing, max_average_containing_brute, young_llogl};
use mixweak::norms::{lorentz_p1_norm, weak_norm, WeightedMeasure};
use mixweak::numeric::prefix_sums;
use mixweak::weights::{a1_constant, ap_constant, rh_constant};
use mixweak::{
    integrate, maximal, maximal_brute, maximal_fast, sample_weight, Grid, IntervalFamily, MaximalKind, StepFunction,
    WeightDescriptor,
};
use proptest::prelude::*;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Values with many exact zeros and repeated levels.
fn values(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![Just(0.0), Just(1.0), 0.0..10.0f64], 1..=max_len)
}

fn on_grid(v: Vec<f64>) -> StepFunction {
    let n = v.len();
    let g = Grid::new(-1.0, 2.0 / n as f64, n, 0.0).unwrap();
    StepFunction::new(g, v).unwrap()
}

fn pair(max_len: usize) -> impl Strategy<Value = (StepFunction, StepFunction)> {
    (1..=max_len).prop_flat_map(|n| {
        (
            prop::collection::vec(0.0..10.0f64, n),
            prop::collection::vec(prop_oneof![Just(0.0), 0.0..10.0f64], n),
        )
            .prop_map(|(a, b)| (on_grid(a), on_grid(b)))
    })
}

fn positive(max_len: usize) -> impl Strategy<Value = StepFunction> {
    prop::collection::vec(0.05..20.0f64, 1..=max_len).prop_map(on_grid)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn fast_matches_brute(v in values(96)) {
        let f = on_grid(v);
        for kind in [MaximalKind::UncenteredGridAligned, MaximalKind::Centered] {
            let a = maximal_fast(&f, kind);
            let b = maximal_brute(&f, kind);
            for (x, y) in a.values().iter().zip(b.values()) {
                prop_assert!(close(*x, *y, 1e-12), "{kind:?}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn dominates_and_preserves_max(v in values(96)) {
        let f = on_grid(v);
        let mf = maximal(&f);
        prop_assert!(f.dominated_by(&mf, 0.0));
        // averages come from prefix-sum differences
        prop_assert!(close(mf.max_value(), f.max_value(), 1e-12));
    }

    #[test]
    fn positive_homogeneity(v in values(64), k in -8i32..8) {
        let c = 2f64.powi(k);
        let f = on_grid(v);
        let lhs = maximal(&f.scale(c).unwrap());
        let rhs = maximal(&f).scale(c).unwrap();
        prop_assert_eq!(lhs.values(), rhs.values());
    }

    #[test]
    fn sublinear_and_monotone((f, g) in pair(64)) {
        let sum = f.add(&g).unwrap();
        let ms = maximal(&sum);
        let bound = maximal(&f).add(&maximal(&g)).unwrap();
        prop_assert!(ms.dominated_by(&bound, 1e-12));
        prop_assert!(maximal(&f).dominated_by(&ms, 1e-12));
    }

    #[test]
    fn weak_type_one_one(v in values(128)) {
        let f = on_grid(v);
        let mu = WeightedMeasure::lebesgue(*f.grid());
        let w = weak_norm(&maximal(&f), 1.0, &mu).unwrap();
        prop_assert!(w <= 2.0 * integrate(&f) * (1.0 + 1e-12));
    }

    #[test]
    fn partition_kernel_matches_brute(widths in prop::collection::vec(0.01..2.0f64, 1..48), seed in 0u64..1000) {
        let mut edges = vec![0.0];
        for w in &widths {
            edges.push(edges.last().unwrap() + w);
        }
        let masses: Vec<f64> = widths.iter().enumerate().map(|(i, w)| w * ((i as u64 * 7 + seed) % 5) as f64).collect();
        let p = prefix_sums(&masses);
        let a = max_average_containing(&edges, &p);
        let b = max_average_containing_brute(&edges, &p);
        for (x, y) in a.iter().zip(&b) {
            prop_assert!(close(*x, *y, 1e-12) || (x - y).abs() < 1e-12);
        }
        let m = maximal_on_partition(&edges, &masses).unwrap();
        for (i, w) in widths.iter().enumerate() {
            prop_assert!(m[i] >= masses[i] / w * (1.0 - 1e-12));
        }
    }

    #[test]
    fn norm_scaling_and_embedding(v in values(48), dens in prop::collection::vec(0.1..4.0f64, 48), k in -4i32..4, p in 0.5..4.0f64) {
        let f = on_grid(v);
        let mu = WeightedMeasure::new(StepFunction::new(*f.grid(), dens[..f.len()].to_vec()).unwrap());
        let c = 2f64.powi(k);
        let cf = f.scale(c).unwrap();
        let w = weak_norm(&f, p, &mu).unwrap();
        let l = lorentz_p1_norm(&f, p, &mu).unwrap();
        prop_assert_eq!(weak_norm(&cf, p, &mu).unwrap(), c * w);
        prop_assert_eq!(lorentz_p1_norm(&cf, p, &mu).unwrap(), c * l);
        prop_assert!(w <= l * (1.0 + 1e-12));
        let integral: f64 = f.values().iter().zip(mu.density.values()).map(|(a, b)| a * b * f.grid().dx()).sum();
        prop_assert!(weak_norm(&f, 1.0, &mu).unwrap() <= integral * (1.0 + 1e-12));
    }

    #[test]
    fn weight_constants_at_least_one_and_scale_free(w in positive(48), k in -6i32..6) {
        let n = w.len();
        let all = IntervalFamily::all(n);
        let cw = w.scale(2f64.powi(k)).unwrap();
        let a1 = a1_constant(&w, &all).unwrap().value;
        prop_assert!(a1 >= 1.0 - 1e-12);
        prop_assert!(close(a1_constant(&cw, &all).unwrap().value, a1, 1e-12));
        let ap = ap_constant(&w, 2.0, &all).unwrap().value;
        prop_assert!(ap >= 1.0 - 1e-12);
        prop_assert!(close(ap_constant(&cw, 2.0, &all).unwrap().value, ap, 1e-12));
        let rh = rh_constant(&w, 2.0, &all).unwrap().value;
        prop_assert!(rh >= 1.0 - 1e-12);
        prop_assert!(rh <= rh_constant(&w, f64::INFINITY, &all).unwrap().value * (1.0 + 1e-12));
    }

    #[test]
    fn smaller_family_smaller_constant(w in positive(64), len in 1usize..8) {
        let n = w.len();
        let all = a1_constant(&w, &IntervalFamily::all(n)).unwrap().value;
        let dyadic = a1_constant(&w, &IntervalFamily::dyadic(n)).unwrap().value;
        let windowed = a1_constant(&w, &IntervalFamily::windowed(n, len)).unwrap().value;
        prop_assert!(dyadic <= all * (1.0 + 1e-12));
        prop_assert!(windowed <= all * (1.0 + 1e-12));
    }

    #[test]
    fn luxemburg_homogeneous_and_above_average(v in values(32), k in -4i32..4) {
        let c = 2f64.powi(k);
        let n = luxemburg_norm(&v);
        let scaled: Vec<f64> = v.iter().map(|x| x * c).collect();
        prop_assert!(close(luxemburg_norm(&scaled), c * n, 1e-9));
        let avg = v.iter().sum::<f64>() / v.len() as f64;
        prop_assert!(n >= avg * (1.0 - 1e-9));
        if n > 0.0 {
            let modular: f64 = v.iter().map(|x| young_llogl(x / n)).sum::<f64>() / v.len() as f64;
            prop_assert!((modular - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn llogl_maximal_dominates_maximal(v in values(32)) {
        let f = on_grid(v);
        let ml = maximal_llogl(&f, &IntervalFamily::all(f.len())).unwrap();
        prop_assert!(maximal(&f).dominated_by(&ml, 1e-9));
    }

    #[test]
    fn csv_round_trip(v in values(40)) {
        let f = on_grid(v);
        prop_assert_eq!(StepFunction::from_csv(&f.to_csv()).unwrap(), f);
    }

    #[test]
    fn descriptor_text_round_trip(a in -4.0..4.0f64, len in 0.1..3.0f64, lo in 0.0..3.0f64, hi in 0.1..5.0f64) {
        for d in [
            WeightDescriptor::indicator(a, a + len),
            WeightDescriptor::two_valued(a, a + len, lo, hi),
            WeightDescriptor::spike(a, len),
            WeightDescriptor::sum(vec![WeightDescriptor::power(-lo), WeightDescriptor::spike(a, len)]),
        ] {
            let back: WeightDescriptor = d.to_string().parse().unwrap();
            prop_assert_eq!(back, d);
        }
    }

    #[test]
    fn indicator_sampling_is_mass_exact(a in -3.5..1.5f64, len in 0.01..2.5f64) {
        let g = Grid::covering(-4.0, 4.0, 1.0 / 16.0, 0.0).unwrap();
        let f = sample_weight(&WeightDescriptor::indicator(a, a + len), &g).unwrap();
        prop_assert!(close(integrate(&f), len, 1e-12));
    }

    #[test]
    fn annulus_sublinearity(v in prop::collection::vec(prop_oneof![Just(0.0), 0.0..5.0f64], 256)) {
        let dx = 1.0 / 8.0;
        let g = Grid::symmetric(16.0, dx, dx).unwrap();
        let f = StepFunction::from_fn(g, |i| v[i % 256]).unwrap();
        let w = sample_weight(&WeightDescriptor::power(-2.0), &g).unwrap();
        let rep = annuli_check(&f, &w, -2..=2).unwrap();
        prop_assert!(rep.records.iter().all(|r| r.sublinear_holds));
    }

    #[test]
    fn local_root_brackets(v in prop::collection::vec(0.0..5.0f64, 64), r in 1.2..4.0f64, lambda in 0.01..50.0f64) {
        prop_assume!(v.iter().any(|&x| x > 0.0));
        let g = Grid::covering(-2.0, 2.0, 1.0 / 16.0, 0.0).unwrap();
        let f = StepFunction::new(g, v).unwrap();
        let a = lemma_local_solve(&f, r, lambda).unwrap();
        prop_assert!((local_g(&f, r, a) - lambda).abs() <= 1e-8 * lambda);
        prop_assert!(local_g(&f, r, a / 2.0) <= lambda);
        prop_assert!(local_g(&f, r, 2.0 * a) >= lambda);
    }
}
