mod common;

use arcast::ar::simulate_keyed;
use arcast::linalg::solve_spd;
use arcast::rng::SeedKey;
use arcast::{
    run_expanding_forecast, ArCoefficients, ArProcess, BenchmarkModel, Differencing, ModelSpec,
    RlsState,
};
use proptest::prelude::*;

use common::{batch_fit, expand_roots, median};

fn series(beta: &[f64], len: usize, rep: u64) -> Vec<f64> {
    let process = ArProcess::new(ArCoefficients::new(beta.to_vec()).unwrap(), 1.0).unwrap();
    simulate_keyed(&process, len, SeedKey::replication(77, rep)).values
}

#[test]
fn matches_batch_fit_at_every_prefix() {
    let y = series(&BenchmarkModel::Model1.coefficients().into_beta(), 500, 0);
    for spec in [
        ModelSpec::new(3, Differencing::None),
        ModelSpec::new(3, Differencing::First).with_intercept(true),
    ] {
        let mut state = RlsState::new(spec).unwrap();
        let mut worst: f64 = 0.0;
        for (i, &v) in y.iter().enumerate() {
            state.ingest(v);
            if !state.is_estimable() {
                continue;
            }
            let oracle = batch_fit(&y[..=i], spec);
            for (a, b) in state.beta_hat().iter().zip(&oracle) {
                worst = worst.max((a - b).abs());
            }
            let g = state.gram().unwrap();
            let direct = solve_spd(g, state.cross()).unwrap();
            for (a, b) in state.beta_hat().iter().zip(&direct) {
                assert!((a - b).abs() <= 1e-8);
            }
        }
        assert!(worst <= 1e-8, "{spec:?}: {worst:e}");
    }
}

#[test]
fn differenced_fit_equals_level_fit_on_differences() {
    let y = series(&[1.6, -0.6], 300, 1);
    let dy: Vec<f64> = y.windows(2).map(|w| w[1] - w[0]).collect();
    let mut on_levels = RlsState::with_order(2, Differencing::First).unwrap();
    let mut on_diffs = RlsState::with_order(1, Differencing::None).unwrap();
    on_levels.ingest(y[0]);
    for (&v, &d) in y[1..].iter().zip(&dy) {
        let level_pred = on_levels.step(v);
        let diff_pred = on_diffs.step(d);
        assert!((level_pred - (v - d) - diff_pred).abs() < 1e-10);
    }
    assert!((on_levels.beta_hat()[0] - on_diffs.beta_hat()[0]).abs() < 1e-12);
}

#[test]
fn random_walk_predictor_repeats_last_value() {
    let y = series(&[0.3], 50, 2);
    let mut state = RlsState::with_order(1, Differencing::First).unwrap();
    state.ingest(y[0]);
    for t in 1..y.len() {
        assert_eq!(state.step(y[t]), y[t - 1]);
    }
}

#[test]
fn loss_decomposition_holds_exactly() {
    let process = ArProcess::new(BenchmarkModel::Model1.coefficients(), 1.0).unwrap();
    for rep in 0..5 {
        let s = simulate_keyed(&process, 400, SeedKey::replication(5, rep));
        let ledger = run_expanding_forecast(
            &s.values,
            Some(&s.innovations),
            ModelSpec::new(3, Differencing::None),
            10,
        )
        .unwrap();
        let lhs = ledger.sum_sq_err() - ledger.sum_sq_innov() - ledger.c_t().unwrap();
        let rhs = ledger.cross_term().unwrap();
        assert!((lhs - rhs).abs() <= 1e-9 * ledger.sum_sq_err());
        let totals = ledger.totals();
        assert_eq!(totals.steps, 390);
    }
}

#[test]
fn accumulators_never_decrease() {
    let y = series(&[0.5], 200, 3);
    let ledger =
        run_expanding_forecast(&y, None, ModelSpec::new(2, Differencing::None), 10).unwrap();
    let mut acc = 0.0;
    for r in ledger.records() {
        let next = acc + r.error() * r.error();
        assert!(next >= acc);
        acc = next;
    }
    assert!((acc - ledger.sum_sq_err()).abs() < 1e-9 * acc);
}

#[test]
fn log_det_grows_like_order_plus_unit_roots() {
    // one root at 1 with p = 3: log det of the Gram grows like 4 log T
    let beta = BenchmarkModel::Model1.coefficients().into_beta();
    let mut ratios: Vec<f64> = (0..20)
        .map(|rep| {
            let y = series(&beta, 5000, 100 + rep);
            let mut state = RlsState::with_order(3, Differencing::None).unwrap();
            for &v in &y {
                state.ingest(v);
            }
            state.log_det_gram().unwrap() / 5000f64.ln()
        })
        .collect();
    let med = median(&mut ratios);
    assert!((med - 4.0).abs() < 0.5, "median ratio {med}");
}

#[test]
fn incremental_log_det_survives_refactorisation() {
    let y = series(&[0.5, 0.2], 3500, 4);
    let mut state = RlsState::with_order(2, Differencing::None).unwrap();
    for &v in &y {
        state.ingest(v);
    }
    let tracked = state.tracked_gram().unwrap();
    assert!(tracked.updates() > 3000);
    let direct = arcast::log_det(tracked.matrix()).unwrap();
    assert!((tracked.log_det() - direct).abs() < 1e-6);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn recursive_equals_batch(
        roots in proptest::collection::vec(-0.9f64..0.9, 1..=4),
        unit in any::<bool>(),
        intercept in any::<bool>(),
        len in 40usize..300,
        rep in any::<u32>(),
    ) {
        let mut roots = roots;
        if unit {
            roots[0] = 1.0;
        }
        let y = series(&expand_roots(&roots), len, rep as u64);
        let spec = ModelSpec::new(roots.len(), Differencing::None).with_intercept(intercept);
        let mut state = RlsState::new(spec).unwrap();
        for &v in &y {
            state.ingest(v);
        }
        let oracle = batch_fit(&y, spec);
        for (a, b) in state.beta_hat().iter().zip(&oracle) {
            prop_assert!((a - b).abs() <= 1e-8, "{} vs {}", a, b);
        }
    }
}
