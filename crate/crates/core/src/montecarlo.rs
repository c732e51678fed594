//! Monte Carlo drivers for the accumulated-loss and forecast-horizon tables.
//!
//! Replications are independent and run in parallel; each one draws from its
//! own ChaCha20 stream keyed by `(master_seed, replication)`, and results
//! are reduced sequentially in replication order, so output does not depend
//! on the thread count.

use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::ar::{coefficients_from_factors, simulate_keyed, ArProcess, NoiseKind, RootFactorSpec};
use crate::diagnostics::{fit_log_slope, LogSlopeFit};
use crate::error::{Error, Result};
use crate::estimator::{LossLedger, RlsState};
use crate::evaluation::{evaluate_rolling_origin, HorizonErrorSums};
use crate::forecaster::{ForecastMethod, PredictorSpec};
use crate::rng::SeedKey;
use crate::table::{TableMeta, TableResult};
use crate::{Differencing, ModelSpec};

/// How accumulated losses are averaged over replications.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CtNormalization {
    /// Mean of `C_T` over replications.
    #[default]
    PerReplication,
    /// Mean over replications, further divided by the number of scored
    /// steps `T - t0`.
    Literal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CtExperimentConfig {
    pub model: RootFactorSpec<f64>,
    pub sigma: f64,
    pub noise: NoiseKind,
    /// Ascending sample sizes at which losses are reported.
    pub t_grid: Vec<usize>,
    pub replications: usize,
    pub t0: usize,
    pub diffs: Vec<Differencing>,
    pub intercept: bool,
    pub master_seed: u64,
    pub normalization: CtNormalization,
    /// Draw a fresh series for every grid point instead of reading all grid
    /// points off one path of length `max(T)`.
    pub independent_draws: bool,
    /// Worker threads; `None` uses the global rayon pool.
    pub threads: Option<usize>,
}

impl CtExperimentConfig {
    pub fn new(model: RootFactorSpec<f64>, master_seed: u64) -> Self {
        Self {
            model,
            sigma: 1.0,
            noise: NoiseKind::Gaussian,
            t_grid: (1..=10).map(|k| 100 * k).collect(),
            replications: 1000,
            t0: 10,
            diffs: vec![Differencing::None, Differencing::First],
            intercept: true,
            master_seed,
            normalization: CtNormalization::PerReplication,
            independent_draws: false,
            threads: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.model.order();
        if p == 0 {
            return Err(Error::ZeroOrder);
        }
        if self.replications == 0 {
            return Err(Error::InvalidConfig(
                "replications must be at least 1".into(),
            ));
        }
        if self.t_grid.is_empty() {
            return Err(Error::InvalidConfig("sample-size grid is empty".into()));
        }
        if self.t_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig(
                "sample-size grid must be strictly increasing".into(),
            ));
        }
        if self.t0 <= p {
            return Err(Error::InvalidConfig(format!(
                "start index t0 = {} must exceed the order {p}",
                self.t0
            )));
        }
        if self.t_grid[0] <= self.t0 {
            return Err(Error::InvalidConfig(format!(
                "every sample size must exceed t0 = {}",
                self.t0
            )));
        }
        if self.diffs.is_empty() {
            return Err(Error::InvalidConfig(
                "no differencing variants requested".into(),
            ));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "sigma must be positive, got {}",
                self.sigma
            )));
        }
        validate_threads(self.threads)
    }

    fn model_spec(&self, diff: Differencing) -> ModelSpec {
        ModelSpec::new(self.model.order(), diff).with_intercept(self.intercept)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CtExperimentResult {
    /// Mean `C_T` per sample size (rows) and differencing variant (columns),
    /// followed by slope and R² rows when the grid has two or more points.
    pub ct: TableResult,
    /// Mean accumulated squared prediction error, same layout without the
    /// slope rows.
    pub mse: TableResult,
    /// Log-slope fits of the `C_T` column per variant.
    pub slopes: Vec<Option<LogSlopeFit<f64>>>,
    pub wall_time: Duration,
}

/// `[variant][grid point]` of `(C_T, Σ e²)` for one replication.
type RepTotals = Vec<Vec<(f64, f64)>>;

pub fn run_ct_experiment(config: &CtExperimentConfig) -> Result<CtExperimentResult> {
    config.validate()?;
    let start = Instant::now();
    let process = ArProcess::new(coefficients_from_factors(&config.model), config.sigma)?
        .with_noise(config.noise);

    let per_rep: Vec<RepTotals> = in_pool(config.threads, || {
        (0..config.replications)
            .into_par_iter()
            .map(|rep| ct_replication(config, &process, rep))
            .collect::<Result<Vec<_>>>()
    })??;

    let grid = &config.t_grid;
    let nv = config.diffs.len();
    let mut ct_sum = vec![vec![0.0; grid.len()]; nv];
    let mut mse_sum = vec![vec![0.0; grid.len()]; nv];
    for rep in &per_rep {
        for v in 0..nv {
            for g in 0..grid.len() {
                ct_sum[v][g] += rep[v][g].0;
                mse_sum[v][g] += rep[v][g].1;
            }
        }
    }
    let r = config.replications as f64;
    let scale = |g: usize| match config.normalization {
        CtNormalization::PerReplication => r,
        CtNormalization::Literal => r * (grid[g] - config.t0) as f64,
    };

    let columns: Vec<String> = config
        .diffs
        .iter()
        .map(|d| format!("d={}", d.d()))
        .collect();
    let meta = TableMeta {
        replications: config.replications,
        master_seed: config.master_seed,
    };
    let label = format!("model {}", config.model);
    let mut ct = TableResult::new(
        format!("Mean C_T, {label}"),
        "T",
        columns.clone(),
        meta.clone(),
    );
    let mut mse = TableResult::new(
        format!("Mean squared prediction error sum, {label}"),
        "T",
        columns,
        meta,
    );
    for (g, &t) in grid.iter().enumerate() {
        ct.push_row(
            t.to_string(),
            (0..nv).map(|v| ct_sum[v][g] / scale(g)).collect(),
        );
        mse.push_row(
            t.to_string(),
            (0..nv).map(|v| mse_sum[v][g] / scale(g)).collect(),
        );
    }

    let slopes: Vec<Option<LogSlopeFit<f64>>> = (0..nv)
        .map(|v| {
            let points: Vec<(usize, f64)> = grid
                .iter()
                .enumerate()
                .map(|(g, &t)| (t, ct.cells[g][v]))
                .collect();
            fit_log_slope(&points, config.t0).ok()
        })
        .collect();
    if slopes.iter().all(Option::is_some) {
        let fits: Vec<LogSlopeFit<f64>> = slopes.iter().flatten().copied().collect();
        ct.push_row_with_precision("slope", fits.iter().map(|f| f.slope).collect(), 4);
        ct.push_row_with_precision("r_squared", fits.iter().map(|f| f.r_squared).collect(), 4);
    }

    Ok(CtExperimentResult {
        ct,
        mse,
        slopes,
        wall_time: start.elapsed(),
    })
}

fn ct_replication(
    config: &CtExperimentConfig,
    process: &ArProcess<f64>,
    rep: usize,
) -> Result<RepTotals> {
    let key = SeedKey::replication(config.master_seed, rep as u64);
    let grid = &config.t_grid;
    let mut out = vec![Vec::with_capacity(grid.len()); config.diffs.len()];
    if config.independent_draws {
        for (g, &t) in grid.iter().enumerate() {
            let sample = simulate_keyed(process, t, key.with_stream(g as u16 + 1));
            for (v, &diff) in config.diffs.iter().enumerate() {
                let totals =
                    accumulate_losses(config, diff, &sample.values, &sample.innovations, &[t])?;
                out[v].push(totals[0]);
            }
        }
    } else {
        let t_max = *grid.last().expect("validated non-empty grid");
        let sample = simulate_keyed(process, t_max, key);
        for (v, &diff) in config.diffs.iter().enumerate() {
            out[v] = accumulate_losses(config, diff, &sample.values, &sample.innovations, grid)?;
        }
    }
    Ok(out)
}

/// Runs one recursive fit over `values` and snapshots `(C_T, Σ e²)` at each
/// of the ascending sample sizes in `checkpoints`.
fn accumulate_losses(
    config: &CtExperimentConfig,
    diff: Differencing,
    values: &[f64],
    innovations: &[f64],
    checkpoints: &[usize],
) -> Result<Vec<(f64, f64)>> {
    let mut state = RlsState::new(config.model_spec(diff))?;
    let mut ledger = LossLedger::totals_only();
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut next = checkpoints.iter().peekable();
    for (i, (&y, &eps)) in values.iter().zip(innovations).enumerate() {
        let t = i + 1;
        let prediction = state.step(y);
        if t > config.t0 {
            ledger.record(t, y, prediction, Some(eps));
        }
        if next.peek() == Some(&&t) {
            next.next();
            let totals = ledger.totals();
            out.push((totals.c_t.unwrap_or(f64::NAN), totals.sum_sq_err));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HorizonExperimentConfig {
    pub model: RootFactorSpec<f64>,
    pub sigma: f64,
    pub noise: NoiseKind,
    /// Length of each simulated series.
    pub total_len: usize,
    /// First forecast origin (number of observations in the first window).
    pub first_origin: usize,
    pub max_horizon: usize,
    pub replications: usize,
    /// Predictors to compare; the first one is the benchmark.
    pub predictors: Vec<PredictorSpec>,
    pub master_seed: u64,
    pub threads: Option<usize>,
}

/// `(p, d)` pairs compared in the horizon tables, benchmark first.
pub const DEFAULT_HORIZON_GRID: [(usize, u8); 6] = [(3, 0), (3, 1), (2, 0), (2, 1), (4, 0), (4, 1)];

impl HorizonExperimentConfig {
    pub fn new(model: RootFactorSpec<f64>, master_seed: u64) -> Self {
        Self {
            model,
            sigma: 1.0,
            noise: NoiseKind::Gaussian,
            total_len: 400,
            first_origin: 300,
            max_horizon: 60,
            replications: 1000,
            predictors: default_predictors(true, ForecastMethod::PlugIn),
            master_seed,
            threads: None,
        }
    }

    /// Replaces the predictor list by the default grid with the given constant
    /// and forecasting method.
    pub fn with_default_grid(mut self, intercept: bool, method: ForecastMethod) -> Self {
        self.predictors = default_predictors(intercept, method);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.model.order() == 0 {
            return Err(Error::ZeroOrder);
        }
        if self.replications == 0 {
            return Err(Error::InvalidConfig(
                "replications must be at least 1".into(),
            ));
        }
        if self.max_horizon == 0 {
            return Err(Error::InvalidConfig(
                "maximum horizon must be at least 1".into(),
            ));
        }
        if self.predictors.is_empty() {
            return Err(Error::InvalidConfig(
                "at least one predictor is required".into(),
            ));
        }
        if self.first_origin + self.max_horizon > self.total_len {
            return Err(Error::InvalidConfig(format!(
                "first origin {} plus horizon {} exceeds series length {}",
                self.first_origin, self.max_horizon, self.total_len
            )));
        }
        let needed = self
            .predictors
            .iter()
            .map(|p| p.model.order + self.max_horizon + 5)
            .max()
            .unwrap_or(0);
        if self.first_origin < needed {
            return Err(Error::InvalidConfig(format!(
                "first origin {} is too small for the requested predictors (needs {needed})",
                self.first_origin
            )));
        }
        for p in &self.predictors {
            p.model.validate()?;
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "sigma must be positive, got {}",
                self.sigma
            )));
        }
        validate_threads(self.threads)
    }
}

fn default_predictors(intercept: bool, method: ForecastMethod) -> Vec<PredictorSpec> {
    DEFAULT_HORIZON_GRID
        .iter()
        .map(|&(p, d)| {
            let diff = if d == 0 {
                Differencing::None
            } else {
                Differencing::First
            };
            PredictorSpec {
                model: ModelSpec::new(p, diff).with_intercept(intercept),
                method,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct HorizonExperimentResult {
    /// RMSE `E(ℓ)` per horizon (rows) and predictor (columns).
    pub rmse: TableResult,
    /// Benchmark RMSE followed by `100 · E(ℓ; v) / E(ℓ; benchmark)` for the
    /// remaining predictors.
    pub ratios: TableResult,
    pub sums: HorizonErrorSums<f64>,
    pub wall_time: Duration,
}

impl HorizonExperimentResult {
    /// Ratio (in percent) of predictor `v` against the benchmark at horizon `h`.
    pub fn ratio(&self, v: usize, h: usize) -> Result<f64> {
        self.sums.ratio_percent(v, h)
    }
}

pub fn run_horizon_experiment(config: &HorizonExperimentConfig) -> Result<HorizonExperimentResult> {
    config.validate()?;
    let start = Instant::now();
    let process = ArProcess::new(coefficients_from_factors(&config.model), config.sigma)?
        .with_noise(config.noise);

    let per_rep: Vec<HorizonErrorSums<f64>> = in_pool(config.threads, || {
        (0..config.replications)
            .into_par_iter()
            .map(|rep| {
                let key = SeedKey::replication(config.master_seed, rep as u64);
                let sample = simulate_keyed(&process, config.total_len, key);
                evaluate_rolling_origin(
                    &sample.values,
                    &config.predictors,
                    config.first_origin,
                    config.max_horizon,
                )
            })
            .collect::<Result<Vec<_>>>()
    })??;

    let mut sums = HorizonErrorSums::zeros(config.predictors.len(), config.max_horizon);
    for rep in &per_rep {
        sums.merge(rep);
    }

    let labels: Vec<String> = config.predictors.iter().map(PredictorSpec::label).collect();
    let meta = TableMeta {
        replications: config.replications,
        master_seed: config.master_seed,
    };
    let model = format!("model {}", config.model);
    let mut rmse = TableResult::new(
        format!("RMSE by horizon, {model}"),
        "horizon",
        labels.clone(),
        meta.clone(),
    );
    let mut ratio_columns = vec![format!("{} rmse", labels[0])];
    ratio_columns.extend(labels[1..].iter().cloned());
    let mut ratios = TableResult::new(
        format!("RMSE relative to {} (percent), {model}", labels[0]),
        "horizon",
        ratio_columns,
        meta,
    );
    for h in 1..=config.max_horizon {
        let row: Vec<f64> = (0..labels.len())
            .map(|v| sums.rmse(v, h))
            .collect::<Result<_>>()?;
        let mut ratio_row = vec![row[0]];
        ratio_row.extend(row[1..].iter().map(|e| 100.0 * e / row[0]));
        rmse.push_row_with_precision(h.to_string(), row, 4);
        ratios.push_row(h.to_string(), ratio_row);
    }

    Ok(HorizonExperimentResult {
        rmse,
        ratios,
        sums,
        wall_time: start.elapsed(),
    })
}

fn validate_threads(threads: Option<usize>) -> Result<()> {
    if threads == Some(0) {
        return Err(Error::InvalidConfig(
            "thread count must be at least 1".into(),
        ));
    }
    Ok(())
}

fn in_pool<T: Send>(threads: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(job()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::InvalidConfig(format!("cannot start thread pool: {e}")))?;
            Ok(pool.install(job))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::BenchmarkModel;

    fn small_ct(seed: u64) -> CtExperimentConfig {
        let mut c = CtExperimentConfig::new(BenchmarkModel::Model1.factors(), seed);
        c.t_grid = vec![40, 80];
        c.replications = 6;
        c
    }

    #[test]
    fn ct_tables_have_expected_shape() {
        let res = run_ct_experiment(&small_ct(1)).unwrap();
        assert_eq!(res.ct.rows, vec!["40", "80", "slope", "r_squared"]);
        assert_eq!(res.mse.rows, vec!["40", "80"]);
        assert_eq!(res.ct.columns, vec!["d=0", "d=1"]);
        assert!(res.ct.cells.iter().flatten().all(|v| v.is_finite()));
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let mut a = small_ct(5);
        a.threads = Some(1);
        let mut b = a.clone();
        b.threads = Some(4);
        let ra = run_ct_experiment(&a).unwrap();
        let rb = run_ct_experiment(&b).unwrap();
        assert_eq!(ra.ct.to_csv(), rb.ct.to_csv());
        assert_eq!(ra.mse.to_csv(), rb.mse.to_csv());
    }

    #[test]
    fn literal_normalization_divides_by_steps() {
        let base = run_ct_experiment(&small_ct(2)).unwrap();
        let mut c = small_ct(2);
        c.normalization = CtNormalization::Literal;
        let lit = run_ct_experiment(&c).unwrap();
        let a = base.ct.cell("80", "d=0").unwrap();
        let b = lit.ct.cell("80", "d=0").unwrap();
        assert!((a / 70.0 - b).abs() < 1e-12 * a.abs().max(1.0));
    }

    #[test]
    fn independent_draws_differ_from_shared_path() {
        let shared = run_ct_experiment(&small_ct(3)).unwrap();
        let mut c = small_ct(3);
        c.independent_draws = true;
        let indep = run_ct_experiment(&c).unwrap();
        // the longest grid point is drawn from a different stream
        assert_ne!(shared.ct.cell("80", "d=0"), indep.ct.cell("80", "d=0"));
    }

    #[test]
    fn ct_config_errors() {
        let mut c = small_ct(0);
        c.t_grid = vec![80, 40];
        assert!(run_ct_experiment(&c).is_err());
        let mut c = small_ct(0);
        c.t0 = 3;
        assert!(matches!(
            run_ct_experiment(&c),
            Err(Error::InvalidConfig(_))
        ));
        let mut c = small_ct(0);
        c.threads = Some(0);
        assert!(run_ct_experiment(&c).is_err());
    }

    #[test]
    fn horizon_experiment_ratios() {
        let mut c = HorizonExperimentConfig::new(BenchmarkModel::Model4.factors(), 11);
        c.total_len = 120;
        c.first_origin = 100;
        c.max_horizon = 5;
        c.replications = 3;
        let res = run_horizon_experiment(&c).unwrap();
        assert_eq!(res.ratios.rows.len(), 5);
        assert_eq!(res.ratios.columns.len(), 6);
        assert!((res.ratio(0, 1).unwrap() - 100.0).abs() < 1e-12);
        let e1 = res.rmse.cell("1", "p=3 d=1").unwrap();
        let b1 = res.rmse.cell("1", "p=3 d=0").unwrap();
        assert!((res.ratios.cell("1", "p=3 d=1").unwrap() - 100.0 * e1 / b1).abs() < 1e-9);
    }

    #[test]
    fn horizon_config_rejects_overlong_horizon() {
        let mut c = HorizonExperimentConfig::new(BenchmarkModel::Model2.factors(), 0);
        c.max_horizon = 101;
        assert!(matches!(c.validate(), Err(Error::InvalidConfig(_))));
    }
}
