//! Scalar diagnostics: limiting `C_T` coefficient, log-determinant unit-root
//! statistic, predictive least squares order selection, RMSE by horizon and
//! the log-slope regression of accumulated losses.

use crate::error::{Error, Result};
use crate::estimator::run_expanding_forecast;
use crate::linalg::{log_det, SymMatrix};
use crate::scalar::Scalar;
use crate::{Differencing, ModelSpec};

/// Default decision threshold for `d̂_T` (midpoint of its limits 0 and 1).
pub const DEFAULT_UNIT_ROOT_THRESHOLD: f64 = 0.5;

/// Limiting coefficient `p + a² + b² + 2 Σ d_k²` of `C_T / (σ² log T)`.
///
/// `a` and `b` are the multiplicities of the roots +1 and −1, and
/// `complex_pairs` the multiplicities of each complex-conjugate unit pair.
pub fn theoretical_ct_coefficient(
    order: usize,
    a: usize,
    b: usize,
    complex_pairs: &[usize],
) -> Result<f64> {
    let pair_roots: usize = complex_pairs.iter().map(|d| 2 * d).sum();
    if a + b + pair_roots > order {
        return Err(Error::BadMultiplicity(format!(
            "{a} + {b} + {pair_roots} unit roots exceed order {order}"
        )));
    }
    let squares: usize = complex_pairs.iter().map(|d| d * d).sum();
    Ok((order + a * a + b * b + 2 * squares) as f64)
}

/// Gram matrix `Σ_{t=p}^{T} y_t y_t'` of the lag vectors
/// `y_t = (y_t, …, y_{t-p+1})'`.
pub fn lag_gram<S: Scalar>(series: &[S], order: usize) -> Result<SymMatrix<S>> {
    if order == 0 {
        return Err(Error::BadOrder(0));
    }
    if series.len() <= order {
        return Err(Error::TooShort {
            needed: order,
            got: series.len(),
        });
    }
    let mut gram = SymMatrix::zeros(order);
    let mut v = vec![S::zero(); order];
    for i in (order - 1)..series.len() {
        for (k, slot) in v.iter_mut().enumerate() {
            *slot = series[i - k];
        }
        gram.add_outer(&v);
    }
    Ok(gram)
}

/// `log det(Σ y_t y_t') / log T`.
pub fn logdet_ratio<S: Scalar>(series: &[S], order: usize) -> Result<S> {
    let gram = lag_gram(series, order)?;
    let ld = log_det(&gram).map_err(|_| Error::SingularGram)?;
    Ok(ld / S::from_count(series.len()).ln())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitRootReport<S> {
    pub p_used: usize,
    pub logdet_ratio: S,
    /// `sqrt(max(0, logdet_ratio - p))`.
    pub d_hat: S,
    pub classified_unit_root: bool,
    pub threshold: S,
}

/// Regression-free unit-root statistic. `order` is the true order or any
/// upper bound on it.
pub fn unit_root_stat<S: Scalar>(
    series: &[S],
    order: usize,
    threshold: S,
) -> Result<UnitRootReport<S>> {
    let ratio = logdet_ratio(series, order)?;
    let d_hat = d_hat_from_ratio(ratio, order);
    Ok(UnitRootReport {
        p_used: order,
        logdet_ratio: ratio,
        d_hat,
        classified_unit_root: d_hat >= threshold,
        threshold,
    })
}

/// `sqrt(max(0, ratio - p))`.
pub fn d_hat_from_ratio<S: Scalar>(ratio: S, order: usize) -> S {
    (ratio - S::from_count(order)).max(S::zero()).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlsReport<S> {
    /// `(j, PLS_T(j))` for `j = 0..=p_max`.
    pub pls_values: Vec<(usize, S)>,
    pub chosen: usize,
    pub t0: usize,
}

/// Predictive least squares order selection over `0..=p_max`; order 0
/// predicts zero throughout. Ties go to the smallest order.
pub fn pls_select<S: Scalar>(series: &[S], p_max: usize, t0: usize) -> Result<PlsReport<S>> {
    if t0 <= p_max {
        return Err(Error::InvalidConfig(format!(
            "start index t0 = {t0} must exceed p_max = {p_max}"
        )));
    }
    if series.len() <= t0 {
        return Err(Error::TooShort {
            needed: t0,
            got: series.len(),
        });
    }
    let mut pls_values = Vec::with_capacity(p_max + 1);
    pls_values.push((0, series[t0..].iter().map(|&y| y * y).sum()));
    for j in 1..=p_max {
        let ledger =
            run_expanding_forecast(series, None, ModelSpec::new(j, Differencing::None), t0)?;
        pls_values.push((j, ledger.sum_sq_err()));
    }
    let mut chosen = 0;
    let mut best = pls_values[0].1;
    for &(j, v) in &pls_values[1..] {
        if v < best {
            best = v;
            chosen = j;
        }
    }
    Ok(PlsReport {
        pls_values,
        chosen,
        t0,
    })
}

/// One multi-step forecast error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HorizonError<S> {
    pub replication: usize,
    pub origin: usize,
    pub horizon: usize,
    pub error: S,
}

/// Root mean squared error over all records at `horizon`.
pub fn rmse_by_horizon<S: Scalar>(records: &[HorizonError<S>], horizon: usize) -> Result<S> {
    let (sum, n) = records
        .iter()
        .filter(|r| r.horizon == horizon)
        .fold((S::zero(), 0usize), |(s, n), r| {
            (s + r.error * r.error, n + 1)
        });
    if n == 0 {
        return Err(Error::Empty(horizon));
    }
    Ok((sum / S::from_count(n)).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogSlopeFit<S> {
    pub slope: S,
    /// `1 - SSR / Σ(y - ȳ)²`.
    pub r_squared: S,
    /// `1 - SSR / Σ y²`.
    pub r_squared_uncentered: S,
}

/// No-intercept regression of `C` on `log(T - t0)`.
pub fn fit_log_slope<S: Scalar>(points: &[(usize, S)], t0: usize) -> Result<LogSlopeFit<S>> {
    if points.len() < 2 {
        return Err(Error::Degenerate("need at least two points"));
    }
    if points.iter().any(|&(t, _)| t <= t0) {
        return Err(Error::Degenerate("every T must exceed t0"));
    }
    let xs: Vec<S> = points
        .iter()
        .map(|&(t, _)| S::from_count(t - t0).ln())
        .collect();
    let ys: Vec<S> = points.iter().map(|&(_, c)| c).collect();
    let sxx: S = xs.iter().map(|&x| x * x).sum();
    if !(sxx > S::zero()) {
        return Err(Error::Degenerate("all regressors are zero"));
    }
    let sxy: S = xs.iter().zip(&ys).map(|(&x, &y)| x * y).sum();
    let slope = sxy / sxx;
    let ssr: S = xs
        .iter()
        .zip(&ys)
        .map(|(&x, &y)| (y - slope * x) * (y - slope * x))
        .sum();
    let mean = ys.iter().copied().sum::<S>() / S::from_count(ys.len());
    let sst: S = ys.iter().map(|&y| (y - mean) * (y - mean)).sum();
    let syy: S = ys.iter().map(|&y| y * y).sum();
    let ratio = |den: S| {
        if ssr == S::zero() {
            S::one()
        } else {
            S::one() - ssr / den
        }
    };
    Ok(LogSlopeFit {
        slope,
        r_squared: ratio(sst),
        r_squared_uncentered: ratio(syy),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theoretical_coefficients() {
        assert_eq!(theoretical_ct_coefficient(3, 1, 0, &[]).unwrap(), 4.0);
        assert_eq!(theoretical_ct_coefficient(5, 0, 0, &[]).unwrap(), 5.0);
        assert_eq!(theoretical_ct_coefficient(5, 1, 1, &[]).unwrap(), 7.0);
        assert_eq!(
            theoretical_ct_coefficient(6, 0, 0, &[1, 2]).unwrap(),
            6.0 + 2.0 * 5.0
        );
        assert!(matches!(
            theoretical_ct_coefficient(2, 1, 0, &[1]),
            Err(Error::BadMultiplicity(_))
        ));
    }

    #[test]
    fn imposing_a_unit_root_drops_coefficient_by_two() {
        // p with one root at 1 versus the differenced p-1 stationary model
        for p in 1..8 {
            let level = theoretical_ct_coefficient(p, 1, 0, &[]).unwrap();
            let differenced = theoretical_ct_coefficient(p - 1, 0, 0, &[]).unwrap();
            assert_eq!(level - differenced, 2.0);
        }
    }

    #[test]
    fn zero_series_has_singular_gram() {
        assert_eq!(logdet_ratio(&[0.0f64; 50], 2), Err(Error::SingularGram));
        assert!(matches!(
            logdet_ratio(&[1.0f64, 2.0], 2),
            Err(Error::TooShort { .. })
        ));
    }

    #[test]
    fn d_hat_is_zero_at_the_stationary_limit() {
        assert_eq!(d_hat_from_ratio(3.0f64, 3), 0.0);
        assert_eq!(d_hat_from_ratio(2.5f64, 3), 0.0);
        assert_eq!(d_hat_from_ratio(4.0f64, 3), 1.0);
    }

    #[test]
    fn rmse_examples() {
        let rec = |h, e| HorizonError {
            replication: 0,
            origin: 0,
            horizon: h,
            error: e,
        };
        assert_eq!(
            rmse_by_horizon(&[rec(1, 0.0), rec(1, 0.0)], 1).unwrap(),
            0.0
        );
        let v: f64 = rmse_by_horizon(&[rec(2, 3.0), rec(2, 4.0), rec(1, 100.0)], 2).unwrap();
        assert!((v - 12.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(
            rmse_by_horizon::<f64>(&[rec(1, 1.0)], 3),
            Err(Error::Empty(3))
        );
    }

    #[test]
    fn exact_log_curve() {
        let pts: Vec<(usize, f64)> = (1..=10)
            .map(|i| (i * 100, 3.0 * ((i * 100 - 10) as f64).ln()))
            .collect();
        let fit = fit_log_slope(&pts, 10).unwrap();
        assert!((fit.slope - 3.0).abs() < 1e-12);
        assert_eq!(fit.r_squared, 1.0);
    }

    #[test]
    fn two_point_closed_form() {
        let pts = [(20usize, 5.0f64), (110, 9.0)];
        let (x1, x2) = (10f64.ln(), 100f64.ln());
        let expected = (x1 * 5.0 + x2 * 9.0) / (x1 * x1 + x2 * x2);
        assert!((fit_log_slope(&pts, 10).unwrap().slope - expected).abs() < 1e-14);
    }

    #[test]
    fn degenerate_slope_inputs() {
        assert!(fit_log_slope(&[(100usize, 1.0f64)], 10).is_err());
        assert!(fit_log_slope(&[(100usize, 1.0f64), (5, 2.0)], 10).is_err());
        assert!(fit_log_slope(&[(11usize, 1.0f64), (11, 2.0)], 10).is_err());
    }

    #[test]
    fn pls_recovers_noiseless_order() {
        // orders above 2 see a rank-deficient lag Gram here and stay unestimable
        let mut y = vec![1.0f64, 0.5];
        for t in 2..120 {
            y.push(0.9 * y[t - 1] - 0.5 * y[t - 2]);
        }
        let report = pls_select(&y, 4, 10).unwrap();
        assert_eq!(report.chosen, 2, "{:?}", report.pls_values);
        assert_eq!(report.pls_values.len(), 5);
    }

    #[test]
    fn pls_ties_go_to_smallest_order() {
        let report = pls_select(&[0.0f64; 40], 3, 10).unwrap();
        assert!(report.pls_values.iter().all(|&(_, v)| v == 0.0));
        assert_eq!(report.chosen, 0);
    }

    #[test]
    fn pls_preconditions() {
        assert!(pls_select(&[0.0f64; 20], 5, 5).is_err());
        assert!(matches!(
            pls_select(&[0.0f64; 20], 2, 20),
            Err(Error::TooShort { .. })
        ));
    }
}
