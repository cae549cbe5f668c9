use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use repsel_core::synthetic::synthetic_year;
use repsel_core::{
    build_matrix, fidelity, solve_exact, AnnualSeries, Method, NormalizeMethod, Optimality,
    Selection, SliceGeometry,
};

fn random_series(seed: u64, days: usize, features: usize, scale: f64) -> AnnualSeries {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..days * 24 * features)
        .map(|_| rng.random_range(-1.0..1.0) * scale)
        .collect();
    AnnualSeries::new(values, (0..features).map(|f| format!("f{f}")).collect()).unwrap()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normalization_inverts(seed in any::<u64>(), days in 1usize..6, exp in -3i32..6) {
        let raw = random_series(seed, days, 3, 10f64.powi(exp));
        for method in [NormalizeMethod::MinMax, NormalizeMethod::ZScore] {
            let scaled = raw.normalize(method).unwrap();
            let back = scaled.denormalize();
            for (a, b) in raw.values().iter().zip(back.values()) {
                prop_assert!(close(*a, *b), "{method:?}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn minmax_lands_in_unit_interval(seed in any::<u64>(), days in 1usize..6) {
        let s = random_series(seed, days, 2, 1e4).normalize(NormalizeMethod::MinMax).unwrap();
        prop_assert!(s.values().iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn fidelity_ignores_feature_order(seed in any::<u64>(), k in 1usize..6) {
        let series = random_series(seed, 12, 3, 1.0);
        let g = SliceGeometry::days(series.hours(), 2).unwrap();
        let d = build_matrix(&series, &g).unwrap();
        let sel = solve_exact(&d, k).unwrap();
        let order = [2, 0, 1];
        let permuted = series.select_features(&order).unwrap();
        let a = fidelity(&series, &sel).unwrap();
        let b = fidelity(&permuted, &sel).unwrap();
        for (p, &src) in order.iter().enumerate() {
            prop_assert_eq!(&a.features[src], &b.features[p]);
        }
        prop_assert!((a.correlation_error - b.correlation_error).abs() <= 1e-12);
        prop_assert!(a.features.iter().all(|f| f.duration_curve_nrmse >= 0.0 && f.mean_error >= 0.0));
    }
}

#[test]
fn full_reconstruction_has_zero_error() {
    let series = synthetic_year(4, 60)
        .normalize(NormalizeMethod::MinMax)
        .unwrap();
    let g = SliceGeometry::days(series.hours(), 1).unwrap();
    let d = build_matrix(&series, &g).unwrap();
    let all: Vec<usize> = (0..d.m()).collect();
    for sel in [
        solve_exact(&d, d.m()).unwrap(),
        Selection::from_chosen(&d, &all, Method::Greedy, Optimality::Heuristic).unwrap(),
    ] {
        let r = fidelity(&series, &sel).unwrap();
        assert_eq!(sel.objective, 0.0);
        for f in &r.features {
            assert_eq!(f.duration_curve_nrmse, 0.0, "{}", f.feature);
            assert_eq!(f.mean_error, 0.0, "{}", f.feature);
        }
        assert_eq!(r.correlation_error, 0.0);
    }
}

#[test]
fn more_periods_track_the_year_better_on_average() {
    let series = synthetic_year(11, 120)
        .normalize(NormalizeMethod::MinMax)
        .unwrap();
    let g = SliceGeometry::days(series.hours(), 1).unwrap();
    let d = build_matrix(&series, &g).unwrap();
    let err = |k: usize| {
        let r = fidelity(&series, &solve_exact(&d, k).unwrap()).unwrap();
        r.features
            .iter()
            .map(|f| f.duration_curve_nrmse)
            .sum::<f64>()
    };
    assert!(err(20) < err(2));
}
