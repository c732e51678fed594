//! Multi-step prediction.
//!
//! Two predictor families are provided. The plug-in (Box–Jenkins) forecaster
//! iterates a fitted one-step model, feeding its own forecasts back in place
//! of unknown future values. The direct forecaster fits a separate linear
//! regression of `y_t` on `(y_{t-h}, …, y_{t-h-p+1})` for every horizon `h`
//! and applies it once at the forecast origin.

use crate::ar::ArCoefficients;
use crate::error::{Error, Result};
use crate::linalg::least_squares;
use crate::scalar::{dot, Scalar};
use crate::{Differencing, ModelSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum ForecastMethod {
    /// Iterated one-step model (Box–Jenkins).
    #[default]
    PlugIn,
    /// One regression per horizon ("adaptive").
    Direct,
}

/// A predictor variant: lag specification plus forecasting method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PredictorSpec {
    pub model: ModelSpec,
    pub method: ForecastMethod,
}

impl PredictorSpec {
    pub fn plug_in(model: ModelSpec) -> Self {
        Self {
            model,
            method: ForecastMethod::PlugIn,
        }
    }

    pub fn direct(model: ModelSpec) -> Self {
        Self {
            model,
            method: ForecastMethod::Direct,
        }
    }

    /// Short label such as `p=3 d=1` or `p=2 d=0 direct`.
    pub fn label(&self) -> String {
        let mut s = format!("p={} d={}", self.model.order, self.model.diff.d());
        if self.method == ForecastMethod::Direct {
            s.push_str(" direct");
        }
        s
    }
}

/// Forecasts `ŷ_{origin+1} … ŷ_{origin+h}`.
#[derive(Debug, Clone, PartialEq)]
pub struct HorizonForecast<S> {
    /// Number of observations the forecast conditions on.
    pub origin: usize,
    pub values: Vec<S>,
}

impl<S: Copy> HorizonForecast<S> {
    pub fn horizon(&self) -> usize {
        self.values.len()
    }

    /// Forecast `h` steps ahead (1-based).
    pub fn at(&self, h: usize) -> S {
        self.values[h - 1]
    }
}

fn check_horizon(h: usize) -> Result<()> {
    if h == 0 {
        return Err(Error::InvalidConfig(
            "forecast horizon must be at least 1".into(),
        ));
    }
    Ok(())
}

fn iterate_plugin<S: Scalar>(intercept: S, beta: &[S], history: &[S], h: usize) -> Vec<S> {
    let p = beta.len();
    let mut path: Vec<S> = history[history.len() - p..].to_vec();
    for _ in 0..h {
        let n = path.len();
        let mut next = intercept;
        for (k, &b) in beta.iter().enumerate() {
            next = next + b * path[n - 1 - k];
        }
        path.push(next);
    }
    path.split_off(p)
}

/// Plug-in forecasts from known or estimated coefficients, recursing in the
/// order `ŷ_{t+1}, ŷ_{t+2}, …` and using observed history where lags reach
/// back before the origin.
pub fn plugin_forecast<S: Scalar>(
    coeffs: &ArCoefficients<S>,
    history: &[S],
    h: usize,
) -> Result<HorizonForecast<S>> {
    check_horizon(h)?;
    let p = coeffs.order();
    if history.len() < p {
        return Err(Error::ShortHistory {
            needed: p,
            got: history.len(),
        });
    }
    Ok(HorizonForecast {
        origin: history.len(),
        values: iterate_plugin(S::zero(), coeffs.beta(), history, h),
    })
}

/// Coefficients `Ψ_0 … Ψ_{n-1}` of `(1 - β₁B - … - β_pB^p)^{-1}`.
pub fn psi_weights<S: Scalar>(coeffs: &ArCoefficients<S>, n: usize) -> Vec<S> {
    let beta = coeffs.beta();
    let mut psi = Vec::with_capacity(n);
    for j in 0..n {
        if j == 0 {
            psi.push(S::one());
            continue;
        }
        let mut v = S::zero();
        for k in 1..=j.min(beta.len()) {
            v = v + beta[k - 1] * psi[j - k];
        }
        psi.push(v);
    }
    psi
}

/// Variance of the `h`-step error with known coefficients:
/// `σ² Σ_{j<h} Ψ_j²`.
pub fn h_step_error_variance<S: Scalar>(
    coeffs: &ArCoefficients<S>,
    h: usize,
    sigma: S,
) -> Result<S> {
    check_horizon(h)?;
    let sum: S = psi_weights(coeffs, h).into_iter().map(|w| w * w).sum();
    Ok(sigma * sigma * sum)
}

/// Multi-step cost `C(h) = Σ_t e_t(h)²` of plug-in forecasts from fixed
/// coefficients, over every origin with a full lag window.
pub fn multistep_cost<S: Scalar>(coeffs: &ArCoefficients<S>, series: &[S], h: usize) -> Result<S> {
    check_horizon(h)?;
    let p = coeffs.order();
    if series.len() < p + h {
        return Err(Error::TooShort {
            needed: p + h - 1,
            got: series.len(),
        });
    }
    let mut cost = S::zero();
    for origin in p..=(series.len() - h) {
        let f = iterate_plugin(S::zero(), coeffs.beta(), &series[..origin], h);
        let e = series[origin + h - 1] - f[h - 1];
        cost = cost + e * e;
    }
    Ok(cost)
}

/// A fitted autoregression ready to forecast in levels.
#[derive(Debug, Clone, PartialEq)]
pub struct FittedAr<S> {
    pub spec: ModelSpec,
    /// Constant term (zero for specs without one).
    pub intercept: S,
    /// Lag coefficients on the working scale (levels, or differences when
    /// `spec.diff` is `First`).
    pub coeffs: ArCoefficients<S>,
}

impl<S: Scalar> FittedAr<S> {
    /// Minimum number of level observations needed to forecast.
    pub fn required_history(&self) -> usize {
        match self.spec.diff {
            Differencing::None => self.coeffs.order().max(1),
            Differencing::First => self.coeffs.order() + 1,
        }
    }

    /// Plug-in level forecasts for horizons `1..=h` from the end of `history`.
    pub fn forecast(&self, history: &[S], h: usize) -> Result<HorizonForecast<S>> {
        check_horizon(h)?;
        let needed = self.required_history();
        if history.len() < needed {
            return Err(Error::ShortHistory {
                needed,
                got: history.len(),
            });
        }
        let beta = self.coeffs.beta();
        let values = match self.spec.diff {
            Differencing::None => iterate_plugin(self.intercept, beta, history, h),
            Differencing::First => {
                let q = beta.len();
                let tail = &history[history.len() - q - 1..];
                let diffs: Vec<S> = tail.windows(2).map(|w| w[1] - w[0]).collect();
                let mut level = *history.last().expect("non-empty history");
                iterate_plugin(self.intercept, beta, &diffs, h)
                    .into_iter()
                    .map(|dz| {
                        level = level + dz;
                        level
                    })
                    .collect()
            }
        };
        Ok(HorizonForecast {
            origin: history.len(),
            values,
        })
    }
}

fn working_series<S: Scalar>(series: &[S], diff: Differencing) -> Vec<S> {
    match diff {
        Differencing::None => series.to_vec(),
        Differencing::First => series.windows(2).map(|w| w[1] - w[0]).collect(),
    }
}

/// Regression of `x_i` on `(x_{i-h}, …, x_{i-h-q+1})` over all in-sample
/// alignments; returns `(constant, lag coefficients)`.
pub fn direct_coefficients<S: Scalar>(
    x: &[S],
    lags: usize,
    h: usize,
    intercept: bool,
) -> Result<(S, Vec<S>)> {
    check_horizon(h)?;
    let k = lags + usize::from(intercept);
    if k == 0 {
        return Ok((S::zero(), Vec::new()));
    }
    let first = h + lags.max(1) - 1;
    if x.len() < first + k {
        return Err(Error::ShortHistory {
            needed: first + k,
            got: x.len(),
        });
    }
    let mut rows = Vec::with_capacity(x.len() - first);
    let mut target = Vec::with_capacity(x.len() - first);
    for i in first..x.len() {
        let mut row = Vec::with_capacity(k);
        if intercept {
            row.push(S::one());
        }
        row.extend((0..lags).map(|j| x[i - h - j]));
        rows.push(row);
        target.push(x[i]);
    }
    let b = least_squares(&rows, &target)?;
    Ok(if intercept {
        (b[0], b[1..].to_vec())
    } else {
        (S::zero(), b)
    })
}

/// Direct forecasts of the level for horizons `1..=h` from the end of `series`.
///
/// With `d = 1` every horizon's difference forecast comes from its own
/// horizon-specific regression on first differences, and the level forecast
/// cumulates them from the last observation.
pub fn direct_path<S: Scalar>(series: &[S], spec: ModelSpec, h: usize) -> Result<Vec<S>> {
    spec.validate()?;
    check_horizon(h)?;
    let needed = h + spec.order + 5;
    if series.len() < needed {
        return Err(Error::ShortHistory {
            needed,
            got: series.len(),
        });
    }
    let x = working_series(series, spec.diff);
    let q = spec.lag_count();
    let mut out = Vec::with_capacity(h);
    let mut level = *series.last().expect("non-empty series");
    for step in 1..=h {
        let (c, a) = direct_coefficients(&x, q, step, spec.intercept)?;
        let recent: Vec<S> = (0..q).map(|j| x[x.len() - 1 - j]).collect();
        let v = c + dot(&a, &recent);
        out.push(match spec.diff {
            Differencing::None => v,
            Differencing::First => {
                level = level + v;
                level
            }
        });
    }
    Ok(out)
}

/// Direct forecast `ŷ_{T+h}` from the end of `series`.
pub fn direct_forecast<S: Scalar>(series: &[S], spec: ModelSpec, h: usize) -> Result<S> {
    match spec.diff {
        Differencing::First => Ok(*direct_path(series, spec, h)?.last().expect("h >= 1")),
        Differencing::None => {
            spec.validate()?;
            check_horizon(h)?;
            let needed = h + spec.order + 5;
            if series.len() < needed {
                return Err(Error::ShortHistory {
                    needed,
                    got: series.len(),
                });
            }
            let q = spec.lag_count();
            let (c, a) = direct_coefficients(series, q, h, spec.intercept)?;
            let recent: Vec<S> = (0..q).map(|j| series[series.len() - 1 - j]).collect();
            Ok(c + dot(&a, &recent))
        }
    }
}

/// Batch least-squares fit of a one-step model on the whole series, using
/// the same in-sample rows as the recursive estimator.
pub fn fit_ar<S: Scalar>(series: &[S], spec: ModelSpec) -> Result<FittedAr<S>> {
    spec.validate()?;
    let x = working_series(series, spec.diff);
    let (intercept, beta) = direct_coefficients(&x, spec.lag_count(), 1, spec.intercept)?;
    Ok(FittedAr {
        spec,
        intercept,
        coeffs: ArCoefficients::new(beta)?,
    })
}
