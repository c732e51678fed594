//! Rolling-origin (expanding-window) multi-step forecast evaluation.
//!
//! At every origin `t` from `first_origin` to `n - 1` each predictor is
//! estimated on `y_1..y_t` and forecasts `y_{t+1}..y_{t+H}` with
//! `H = min(h_max, n - t)`. Squared errors are accumulated per horizon.

use crate::diagnostics::HorizonError;
use crate::error::{Error, Result};
use crate::estimator::RlsState;
use crate::forecaster::{direct_path, ForecastMethod, PredictorSpec};
use crate::scalar::Scalar;

/// Per-predictor, per-horizon sums of squared forecast errors.
#[derive(Debug, Clone, PartialEq)]
pub struct HorizonErrorSums<S> {
    /// `sum_sq[v][h - 1]` for predictor `v`.
    pub sum_sq: Vec<Vec<S>>,
    /// `counts[h - 1]`, shared by all predictors.
    pub counts: Vec<usize>,
}

impl<S: Scalar> HorizonErrorSums<S> {
    pub fn zeros(predictors: usize, h_max: usize) -> Self {
        Self {
            sum_sq: vec![vec![S::zero(); h_max]; predictors],
            counts: vec![0; h_max],
        }
    }

    /// Sums built from individual error records of a single predictor.
    pub fn from_records(records: &[HorizonError<S>], h_max: usize) -> Self {
        let mut out = Self::zeros(1, h_max);
        for r in records
            .iter()
            .filter(|r| r.horizon >= 1 && r.horizon <= h_max)
        {
            out.sum_sq[0][r.horizon - 1] = out.sum_sq[0][r.horizon - 1] + r.error * r.error;
            out.counts[r.horizon - 1] += 1;
        }
        out
    }

    pub fn h_max(&self) -> usize {
        self.counts.len()
    }

    pub fn predictors(&self) -> usize {
        self.sum_sq.len()
    }

    /// Adds another set of sums with the same shape.
    pub fn merge(&mut self, other: &Self) {
        assert_eq!(self.counts.len(), other.counts.len());
        assert_eq!(self.sum_sq.len(), other.sum_sq.len());
        for (a, b) in self.sum_sq.iter_mut().zip(&other.sum_sq) {
            for (x, &y) in a.iter_mut().zip(b) {
                *x = *x + y;
            }
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
    }

    /// Root mean squared error of predictor `v` at horizon `h` (1-based).
    pub fn rmse(&self, v: usize, h: usize) -> Result<S> {
        let n = *self.counts.get(h.wrapping_sub(1)).ok_or(Error::Empty(h))?;
        if n == 0 {
            return Err(Error::Empty(h));
        }
        Ok((self.sum_sq[v][h - 1] / S::from_count(n)).sqrt())
    }

    /// `100 · E(h; v) / E(h; 0)`: RMSE relative to the first predictor, in percent.
    pub fn ratio_percent(&self, v: usize, h: usize) -> Result<S> {
        Ok(S::lit(100.0) * self.rmse(v, h)? / self.rmse(0, h)?)
    }
}

/// Evaluates every predictor over all origins `first_origin..n`.
pub fn evaluate_rolling_origin<S: Scalar>(
    series: &[S],
    predictors: &[PredictorSpec],
    first_origin: usize,
    h_max: usize,
) -> Result<HorizonErrorSums<S>> {
    let n = series.len();
    if h_max == 0 {
        return Err(Error::InvalidConfig(
            "maximum horizon must be at least 1".into(),
        ));
    }
    if predictors.is_empty() {
        return Err(Error::InvalidConfig(
            "at least one predictor is required".into(),
        ));
    }
    if first_origin == 0 {
        return Err(Error::InvalidConfig(
            "first estimation window must be non-empty".into(),
        ));
    }
    if n <= first_origin {
        return Err(Error::TooShort {
            needed: first_origin,
            got: n,
        });
    }
    let mut sums = HorizonErrorSums::zeros(predictors.len(), h_max);
    for t in first_origin..n {
        let horizon = h_max.min(n - t);
        for c in sums.counts.iter_mut().take(horizon) {
            *c += 1;
        }
    }
    for (v, predictor) in predictors.iter().enumerate() {
        let row = &mut sums.sum_sq[v];
        match predictor.method {
            ForecastMethod::PlugIn => {
                let mut state = RlsState::new(predictor.model)?;
                for (i, &y) in series.iter().enumerate() {
                    state.ingest(y);
                    let t = i + 1;
                    if t < first_origin || t >= n {
                        continue;
                    }
                    let horizon = h_max.min(n - t);
                    let fit = state.fitted().ok_or(Error::SingularDesign)?;
                    let forecast = fit.forecast(&series[..t], horizon)?;
                    accumulate(row, &series[t..t + horizon], &forecast.values);
                }
            }
            ForecastMethod::Direct => {
                for t in first_origin..n {
                    let horizon = h_max.min(n - t);
                    let path = direct_path(&series[..t], predictor.model, horizon)?;
                    accumulate(row, &series[t..t + horizon], &path);
                }
            }
        }
    }
    Ok(sums)
}

fn accumulate<S: Scalar>(row: &mut [S], actual: &[S], forecast: &[S]) {
    for ((slot, &y), &f) in row.iter_mut().zip(actual).zip(forecast) {
        let e = y - f;
        *slot = *slot + e * e;
    }
}
