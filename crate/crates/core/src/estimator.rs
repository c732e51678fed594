//! Expanding-window least squares for autoregressions.
//!
//! [`RlsState`] ingests one observation at a time. Before each observation
//! it yields the one-step prediction `ŷ_t = β̂'_{t-1} Y_{t-1}` from the
//! estimate built on data `1..t-1`; afterwards the regressor Gram matrix,
//! its inverse and its log-determinant are updated by a rank-one step.
//!
//! Regression rows only use observed values: the first row is formed once
//! `p` lags (or `p - 1` lagged differences) are available, so no pre-sample
//! values enter the fit.

use std::collections::VecDeque;

use crate::ar::ArCoefficients;
use crate::error::{Error, Result};
use crate::forecaster::FittedAr;
use crate::linalg::{SymMatrix, TrackedSpd};
use crate::scalar::{dot, Scalar};
use crate::{Differencing, ModelSpec};

/// Default first scored time index of [`run_expanding_forecast`].
pub const DEFAULT_T0: usize = 10;

#[derive(Debug, Clone)]
enum Gram<S> {
    /// No parameters to estimate (differenced order-1 model without constant).
    Empty,
    /// Singular so far; accumulated directly.
    Accumulating(SymMatrix<S>),
    /// Positive definite; inverse and log-determinant tracked.
    Tracked(TrackedSpd<S>),
}

/// Running state of an expanding-window least-squares autoregression.
#[derive(Debug, Clone)]
pub struct RlsState<S> {
    spec: ModelSpec,
    gram: Gram<S>,
    cross: Vec<S>,
    beta_hat: Vec<S>,
    /// Most recent working-scale values (levels or differences), newest first.
    lags: VecDeque<S>,
    last_level: Option<S>,
    observations: usize,
    rows: usize,
}

impl<S: Scalar> RlsState<S> {
    pub fn new(spec: ModelSpec) -> Result<Self> {
        spec.validate()?;
        let k = spec.parameter_count();
        Ok(Self {
            spec,
            gram: if k == 0 {
                Gram::Empty
            } else {
                Gram::Accumulating(SymMatrix::zeros(k))
            },
            cross: vec![S::zero(); k],
            beta_hat: vec![S::zero(); k],
            lags: VecDeque::with_capacity(spec.lag_count() + 1),
            last_level: None,
            observations: 0,
            rows: 0,
        })
    }

    /// Level model of order `p` with `d` imposed unit roots and no constant.
    pub fn with_order(order: usize, diff: Differencing) -> Result<Self> {
        Self::new(ModelSpec::new(order, diff))
    }

    pub fn spec(&self) -> ModelSpec {
        self.spec
    }

    /// Number of observations ingested so far.
    pub fn observations(&self) -> usize {
        self.observations
    }

    /// Number of regression rows accumulated so far.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// True once the Gram matrix is positive definite (or there is nothing
    /// to estimate).
    pub fn is_estimable(&self) -> bool {
        matches!(self.gram, Gram::Empty | Gram::Tracked(_))
    }

    /// Current estimate; constant first when the spec carries one.
    pub fn beta_hat(&self) -> &[S] {
        &self.beta_hat
    }

    pub fn cross(&self) -> &[S] {
        &self.cross
    }

    /// Regressor Gram matrix `Σ x x'`; `None` for parameter-free models.
    pub fn gram(&self) -> Option<&SymMatrix<S>> {
        match &self.gram {
            Gram::Empty => None,
            Gram::Accumulating(m) => Some(m),
            Gram::Tracked(t) => Some(t.matrix()),
        }
    }

    pub fn tracked_gram(&self) -> Option<&TrackedSpd<S>> {
        match &self.gram {
            Gram::Tracked(t) => Some(t),
            _ => None,
        }
    }

    /// Log-determinant of the Gram matrix, maintained incrementally.
    pub fn log_det_gram(&self) -> Option<S> {
        self.tracked_gram().map(TrackedSpd::log_det)
    }

    /// Regressor vector for predicting the next working-scale value, if
    /// enough lags have been observed.
    fn regressor(&self) -> Option<Vec<S>> {
        let q = self.spec.lag_count();
        if self.lags.len() < q {
            return None;
        }
        let mut x = Vec::with_capacity(self.spec.parameter_count());
        if self.spec.intercept {
            x.push(S::one());
        }
        x.extend(self.lags.iter().take(q).copied());
        Some(x)
    }

    /// Prediction of the next observation from the data ingested so far.
    ///
    /// Until the fit is estimable the working-scale prediction is zero, so a
    /// level model predicts 0 and a differenced model predicts no change.
    pub fn predict(&self) -> S {
        let working = match (self.is_estimable(), self.regressor()) {
            (true, Some(x)) => dot(&self.beta_hat, &x),
            _ => S::zero(),
        };
        match self.spec.diff {
            Differencing::None => working,
            Differencing::First => self.last_level.map_or(S::zero(), |l| l + working),
        }
    }

    /// Returns the prediction of `y` made before seeing it, then ingests `y`.
    pub fn step(&mut self, y: S) -> S {
        let prediction = self.predict();
        self.ingest(y);
        prediction
    }

    pub fn ingest(&mut self, y: S) {
        let working = match self.spec.diff {
            Differencing::None => Some(y),
            Differencing::First => self.last_level.map(|l| y - l),
        };
        if let Some(z) = working {
            if let Some(x) = self.regressor() {
                self.update(&x, z);
            }
            let q = self.spec.lag_count();
            if q > 0 {
                self.lags.push_front(z);
                self.lags.truncate(q);
            }
        }
        self.last_level = Some(y);
        self.observations += 1;
    }

    fn update(&mut self, x: &[S], z: S) {
        if x.is_empty() {
            return;
        }
        self.rows += 1;
        for (c, &xi) in self.cross.iter_mut().zip(x) {
            *c = *c + xi * z;
        }
        match &mut self.gram {
            Gram::Empty => {}
            Gram::Accumulating(m) => {
                m.add_outer(x);
                if self.rows >= x.len() {
                    if let Ok(tracked) = TrackedSpd::new(m.clone()) {
                        self.gram = Gram::Tracked(tracked);
                    }
                }
            }
            Gram::Tracked(t) => {
                t.rank_one_update(x);
            }
        }
        if let Gram::Tracked(t) = &self.gram {
            self.beta_hat = t.inverse().mul_vec(&self.cross);
        }
    }

    /// Current fit as a forecasting model; `None` before estimability.
    pub fn fitted(&self) -> Option<FittedAr<S>> {
        if !self.is_estimable() {
            return None;
        }
        let (intercept, lags) = if self.spec.intercept {
            (self.beta_hat[0], self.beta_hat[1..].to_vec())
        } else {
            (S::zero(), self.beta_hat.clone())
        };
        Some(FittedAr {
            spec: self.spec,
            intercept,
            coeffs: ArCoefficients::new(lags).ok()?,
        })
    }
}

/// One scored prediction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LedgerRecord<S> {
    /// 1-based time index.
    pub t: usize,
    pub actual: S,
    pub predicted: S,
    pub innovation: Option<S>,
}

impl<S: Scalar> LedgerRecord<S> {
    pub fn error(&self) -> S {
        self.actual - self.predicted
    }
}

/// Accumulated losses over the scored range.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LossTotals<S> {
    pub steps: usize,
    /// `Σ (y_t - ŷ_t)²`.
    pub sum_sq_err: S,
    /// `Σ (y_t - ŷ_t - ε_t)²`; `None` once any record lacks its innovation.
    pub c_t: Option<S>,
    /// `Σ ε_t²` over records carrying an innovation.
    pub sum_sq_innov: S,
}

/// Per-step prediction records and running loss accumulators.
#[derive(Debug, Clone)]
pub struct LossLedger<S> {
    records: Option<Vec<LedgerRecord<S>>>,
    totals: LossTotals<S>,
}

impl<S: Scalar> Default for LossLedger<S> {
    fn default() -> Self {
        Self::new()
    }
}

impl<S: Scalar> LossLedger<S> {
    /// Ledger that keeps every record.
    pub fn new() -> Self {
        Self {
            records: Some(Vec::new()),
            totals: LossTotals {
                steps: 0,
                sum_sq_err: S::zero(),
                c_t: Some(S::zero()),
                sum_sq_innov: S::zero(),
            },
        }
    }

    /// Ledger that keeps only the accumulators.
    pub fn totals_only() -> Self {
        Self {
            records: None,
            ..Self::new()
        }
    }

    pub fn record(&mut self, t: usize, actual: S, predicted: S, innovation: Option<S>) {
        let err = actual - predicted;
        let totals = &mut self.totals;
        totals.steps += 1;
        totals.sum_sq_err = totals.sum_sq_err + err * err;
        match innovation {
            Some(eps) => {
                let excess = err - eps;
                totals.c_t = totals.c_t.map(|c| c + excess * excess);
                totals.sum_sq_innov = totals.sum_sq_innov + eps * eps;
            }
            None => totals.c_t = None,
        }
        if let Some(records) = &mut self.records {
            records.push(LedgerRecord {
                t,
                actual,
                predicted,
                innovation,
            });
        }
    }

    pub fn totals(&self) -> LossTotals<S> {
        self.totals
    }

    pub fn records(&self) -> &[LedgerRecord<S>] {
        self.records.as_deref().unwrap_or(&[])
    }

    pub fn sum_sq_err(&self) -> S {
        self.totals.sum_sq_err
    }

    pub fn c_t(&self) -> Option<S> {
        self.totals.c_t
    }

    pub fn sum_sq_innov(&self) -> S {
        self.totals.sum_sq_innov
    }

    /// `2 Σ (y - ŷ - ε) ε` recomputed from the stored records.
    pub fn cross_term(&self) -> Option<S> {
        let two = S::lit(2.0);
        self.records()
            .iter()
            .map(|r| r.innovation.map(|eps| two * (r.error() - eps) * eps))
            .sum()
    }
}

/// Scores expanding-window one-step predictions for `t = t0+1 ..= T`
/// (1-based), each made from data `1..t-1`.
pub fn run_expanding_forecast<S: Scalar>(
    series: &[S],
    innovations: Option<&[S]>,
    spec: ModelSpec,
    t0: usize,
) -> Result<LossLedger<S>> {
    let mut ledger = LossLedger::new();
    run_expanding_into(series, innovations, spec, t0, &mut ledger)?;
    Ok(ledger)
}

pub(crate) fn run_expanding_into<S: Scalar>(
    series: &[S],
    innovations: Option<&[S]>,
    spec: ModelSpec,
    t0: usize,
    ledger: &mut LossLedger<S>,
) -> Result<()> {
    if t0 <= spec.order {
        return Err(Error::InvalidConfig(format!(
            "start index t0 = {t0} must exceed the order {}",
            spec.order
        )));
    }
    if series.len() <= t0 {
        return Err(Error::TooShort {
            needed: t0,
            got: series.len(),
        });
    }
    if let Some(eps) = innovations {
        if eps.len() != series.len() {
            return Err(Error::DimensionMismatch {
                expected: series.len(),
                got: eps.len(),
            });
        }
    }
    let mut state = RlsState::new(spec)?;
    for (i, &y) in series.iter().enumerate() {
        let predicted = state.step(y);
        let t = i + 1;
        if t > t0 {
            ledger.record(t, y, predicted, innovations.map(|e| e[i]));
        }
    }
    Ok(())
}
