//! Least-squares forecasting of stable and unit-root autoregressive processes.
//!
//! The crate covers expanding-window (recursive) least-squares estimation with
//! an optional unit-root constraint, plug-in and direct multi-step predictors,
//! the accumulated excess prediction loss `C_T`, a log-determinant unit-root
//! statistic, predictive least squares order selection and deterministic
//! Monte Carlo drivers for the accompanying simulation tables.
//!
//! Numerical code is generic over [`Scalar`] (`f32` or `f64`); the aliases at
//! the bottom of this file fix the scalar to `f64`, which is what the Monte
//! Carlo drivers and the command-line tool use.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod ar;
pub mod diagnostics;
pub mod error;
pub mod estimator;
pub mod evaluation;
pub mod forecaster;
pub mod linalg;
pub mod montecarlo;
pub mod rng;
mod scalar;
pub mod table;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use ar::{
    classify, coefficients_from_factors, simulate, ArCoefficients, ArProcess, BenchmarkModel,
    NoiseKind, RootFactor, RootFactorSpec, SeriesSample, Stability, StabilityClass,
};
pub use diagnostics::{
    fit_log_slope, logdet_ratio, pls_select, rmse_by_horizon, theoretical_ct_coefficient,
    unit_root_stat, HorizonError, LogSlopeFit, PlsReport, UnitRootReport,
};
pub use estimator::{run_expanding_forecast, LossLedger, LossTotals, RlsState};
pub use evaluation::{evaluate_rolling_origin, HorizonErrorSums};
pub use forecaster::{
    direct_forecast, fit_ar, h_step_error_variance, plugin_forecast, psi_weights, FittedAr,
    ForecastMethod, HorizonForecast, PredictorSpec,
};
pub use linalg::{log_det, solve_spd, SymMatrix, TrackedSpd};
pub use montecarlo::{
    run_ct_experiment, run_horizon_experiment, CtExperimentConfig, CtExperimentResult,
    CtNormalization, HorizonExperimentConfig, HorizonExperimentResult,
};
pub use table::TableResult;

/// Lag specification shared by the estimator and the forecasters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModelSpec {
    /// Autoregressive order `p` of the level model.
    pub order: usize,
    /// Number of unit roots imposed by differencing (0 or 1).
    pub diff: Differencing,
    /// Whether a constant term is estimated alongside the lag coefficients.
    pub intercept: bool,
}

impl ModelSpec {
    pub fn new(order: usize, diff: Differencing) -> Self {
        Self {
            order,
            diff,
            intercept: false,
        }
    }

    pub fn with_intercept(mut self, intercept: bool) -> Self {
        self.intercept = intercept;
        self
    }

    /// Number of lagged regressors actually estimated: `p` in levels, `p - 1`
    /// on first differences.
    pub fn lag_count(&self) -> usize {
        match self.diff {
            Differencing::None => self.order,
            Differencing::First => self.order.saturating_sub(1),
        }
    }

    /// Number of estimated parameters including the optional constant.
    pub fn parameter_count(&self) -> usize {
        self.lag_count() + usize::from(self.intercept)
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.order < 1 {
            return Err(Error::BadOrder(self.order));
        }
        Ok(())
    }
}

/// Unit-root constraint imposed on an autoregressive fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Differencing {
    /// Estimate in levels (`d = 0`).
    #[default]
    None,
    /// Estimate on first differences and integrate back (`d = 1`).
    First,
}

impl Differencing {
    pub fn from_d(d: u8) -> Result<Self> {
        match d {
            0 => Ok(Self::None),
            1 => Ok(Self::First),
            other => Err(Error::InvalidConfig(format!(
                "differencing order must be 0 or 1, got {other}"
            ))),
        }
    }

    pub fn d(self) -> u8 {
        match self {
            Self::None => 0,
            Self::First => 1,
        }
    }
}

pub type SymMatrixF64 = SymMatrix<f64>;
pub type ArCoefficientsF64 = ArCoefficients<f64>;
pub type ArProcessF64 = ArProcess<f64>;
pub type RlsStateF64 = RlsState<f64>;
pub type LossLedgerF64 = LossLedger<f64>;
pub type FittedArF64 = FittedAr<f64>;
pub type SymMatrixF32 = SymMatrix<f32>;
pub type RlsStateF32 = RlsState<f32>;
