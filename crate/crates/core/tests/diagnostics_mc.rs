mod common;

use arcast::ar::simulate_keyed;
use arcast::rng::SeedKey;
use arcast::{
    fit_log_slope, logdet_ratio, pls_select, ArCoefficients, ArProcess, Differencing, ModelSpec,
    RlsState,
};
use proptest::prelude::*;
use rayon::prelude::*;

use common::median;

const TABLE1_T: [usize; 10] = [100, 200, 300, 400, 500, 600, 700, 800, 900, 1000];
const TABLE1_M1_D0: [f64; 10] = [
    23.47, 27.55, 29.90, 31.49, 32.75, 33.76, 34.62, 35.38, 35.99, 36.55,
];
const TABLE1_M1_D1: [f64; 10] = [
    12.33, 14.71, 16.06, 17.00, 17.73, 18.30, 18.79, 19.22, 19.60, 19.94,
];

fn draws(beta: &[f64], len: usize, seeds: u64, stream: u16) -> Vec<Vec<f64>> {
    let process = ArProcess::new(ArCoefficients::new(beta.to_vec()).unwrap(), 1.0).unwrap();
    (0..seeds)
        .into_par_iter()
        .map(|i| {
            simulate_keyed(
                &process,
                len,
                SeedKey::replication(31, i).with_stream(stream),
            )
            .values
        })
        .collect()
}

#[test]
fn slope_row_of_published_table() {
    let pts = |col: &[f64]| {
        TABLE1_T
            .iter()
            .copied()
            .zip(col.iter().copied())
            .collect::<Vec<_>>()
    };
    let d0 = fit_log_slope(&pts(&TABLE1_M1_D0), 10).unwrap();
    let d1 = fit_log_slope(&pts(&TABLE1_M1_D1), 10).unwrap();
    assert!((d0.slope - 5.2849).abs() < 1e-4, "{}", d0.slope);
    assert!((d1.slope - 2.8583).abs() < 1e-4, "{}", d1.slope);
    assert!((d0.r_squared - 0.9988).abs() < 1e-4, "{}", d0.r_squared);
    assert!((d1.r_squared - 0.9902).abs() < 1e-4, "{}", d1.r_squared);
    assert!(d0.r_squared_uncentered > 0.9999);
}

#[test]
fn white_noise_ratio_near_one() {
    let mut r: Vec<f64> = draws(&[0.0], 10_000, 100, 1)
        .iter()
        .map(|y| logdet_ratio(y, 1).unwrap())
        .collect();
    let inside = r.iter().filter(|v| (*v - 1.0).abs() <= 0.35).count();
    assert_eq!(inside, 100);
    assert!((median(&mut r) - 1.0).abs() < 0.05);
}

#[test]
fn random_walk_ratio_near_two() {
    let mut r: Vec<f64> = draws(&[1.0], 10_000, 100, 2)
        .iter()
        .map(|y| logdet_ratio(y, 1).unwrap())
        .collect();
    let inside = r.iter().filter(|v| (*v - 2.0).abs() <= 0.35).count();
    assert!(inside >= 90, "{inside}/100 inside the band");
    assert!((median(&mut r) - 2.0).abs() <= 0.35);
}

#[test]
fn white_noise_pls_picks_order_zero() {
    let chosen: Vec<usize> = draws(&[0.0], 2000, 200, 3)
        .par_iter()
        .map(|y| pls_select(y, 4, 10).unwrap().chosen)
        .collect();
    let zeros = chosen.iter().filter(|&&c| c == 0).count();
    assert!(zeros >= 160, "order 0 chosen {zeros}/200");
}

#[test]
fn pls_order_zero_is_sum_of_squares() {
    let y = &draws(&[0.4], 300, 1, 4)[0];
    let report = pls_select(y, 2, 10).unwrap();
    let ss: f64 = y[10..].iter().map(|v| v * v).sum();
    assert_eq!(report.pls_values[0], (0, ss));
    let one =
        arcast::run_expanding_forecast(y, None, ModelSpec::new(1, Differencing::None), 10).unwrap();
    assert_eq!(report.pls_values[1].1, one.sum_sq_err());
}

#[test]
fn unit_root_statistic_agrees_with_recursive_log_det() {
    let y = &draws(&[0.7, -0.1], 800, 1, 5)[0];
    let mut state = RlsState::with_order(2, Differencing::None).unwrap();
    for &v in y {
        state.ingest(v);
    }
    // the lag Gram adds the final lag vector to the regression Gram rows
    let ratio = logdet_ratio(y, 2).unwrap();
    let approx = state.log_det_gram().unwrap() / (y.len() as f64).ln();
    assert!((ratio - approx).abs() < 0.01);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn logdet_ratio_shifts_under_scaling(seed in 0u64..10_000, c in 0.01f64..100.0, p in 1usize..=4) {
        let process = ArProcess::new(ArCoefficients::new(vec![0.5]).unwrap(), 1.0).unwrap();
        let y: Vec<f64> = simulate_keyed(&process, 200, SeedKey::replication(31, seed)).values;
        let scaled: Vec<f64> = y.iter().map(|v| c * v).collect();
        let shift = 2.0 * p as f64 * c.ln() / (y.len() as f64).ln();
        let lhs = logdet_ratio(&scaled, p).unwrap();
        let rhs = logdet_ratio(&y, p).unwrap() + shift;
        prop_assert!((lhs - rhs).abs() < 1e-9 * lhs.abs().max(1.0));
    }

    #[test]
    fn slope_recovers_exact_multiples(c in -10.0f64..10.0, t0 in 0usize..50) {
        let pts: Vec<(usize, f64)> = (1..=8).map(|k| {
            let t = t0 + 50 * k;
            (t, c * ((t - t0) as f64).ln())
        }).collect();
        let fit = fit_log_slope(&pts, t0).unwrap();
        prop_assert!((fit.slope - c).abs() < 1e-12 * c.abs().max(1.0));
    }
}
