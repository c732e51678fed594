use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use arcast::ar::simulate;
use arcast::{
    evaluate_rolling_origin, pls_select, run_ct_experiment, run_horizon_experiment, unit_root_stat,
    ArCoefficients, ArProcess, BenchmarkModel, CtExperimentConfig, CtNormalization, Differencing,
    ForecastMethod, HorizonExperimentConfig, ModelSpec, NoiseKind, PredictorSpec, RootFactorSpec,
    TableResult,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

mod series;

use series::{read_series, write_series};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Numeric(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) | CliError::Io(_) => 3,
            CliError::Numeric(_) => 4,
        }
    }
}

impl From<arcast::Error> for CliError {
    fn from(e: arcast::Error) -> Self {
        use arcast::Error as E;
        let msg = e.to_string();
        match e {
            E::SingularMatrix { .. } | E::SingularDesign | E::SingularGram | E::Degenerate(_) => {
                CliError::Numeric(msg)
            }
            E::TooShort { .. } | E::ShortHistory { .. } | E::Empty(_) => CliError::Data(msg),
            _ => CliError::Usage(msg),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "arcast",
    version,
    about = "Least-squares forecasting of stable and unit-root autoregressions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate an autoregressive series to CSV
    Simulate(SimulateArgs),
    /// Mean accumulated excess loss C_T over a grid of sample sizes
    CtTable(CtTableArgs),
    /// Multi-step RMSE comparison of (p, d) predictors
    HorizonTable(HorizonTableArgs),
    /// Rolling-origin forecast evaluation of a CSV series
    Rolling(RollingArgs),
    /// Log-determinant unit-root statistic of a CSV series
    UnitRoot(UnitRootArgs),
    /// Predictive least squares order selection on a CSV series
    Pls(PlsArgs),
}

#[derive(Args)]
struct ModelArgs {
    /// Benchmark model 1-4
    #[arg(long, conflicts_with_all = ["factors", "beta"])]
    model: Option<String>,
    /// Characteristic roots with multiplicities, e.g. "0.5^2,1.0"
    #[arg(long, conflicts_with = "beta")]
    factors: Option<String>,
    /// Explicit AR coefficients, e.g. "1.5,-0.5"
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum NoiseArg {
    Gaussian,
    StudentT,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    PlugIn,
    Direct,
}

impl From<MethodArg> for ForecastMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::PlugIn => ForecastMethod::PlugIn,
            MethodArg::Direct => ForecastMethod::Direct,
        }
    }
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Number of observations
    #[arg(long = "T", value_name = "T")]
    len: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    #[arg(long, value_enum, default_value = "gaussian")]
    noise: NoiseArg,
    #[arg(long, default_value_t = 0)]
    burn_in: usize,
    /// Also write the innovations column
    #[arg(long)]
    innovations: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CtTableArgs {
    /// Benchmark model 1-4
    #[arg(long, default_value = "1", conflicts_with = "factors")]
    model: String,
    #[arg(long)]
    factors: Option<String>,
    #[arg(short = 'R', long, default_value_t = 1000)]
    replications: usize,
    /// Comma-separated ascending sample sizes
    #[arg(long, default_value = "100,200,300,400,500,600,700,800,900,1000")]
    t_grid: String,
    #[arg(long, default_value_t = 10)]
    t0: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// Fit without a constant term
    #[arg(long)]
    no_intercept: bool,
    /// Divide the mean losses by the number of scored steps
    #[arg(long)]
    literal_normalization: bool,
    /// Draw a separate series for each sample size
    #[arg(long)]
    independent_draws: bool,
    #[arg(long)]
    threads: Option<usize>,
    /// CSV path for the C_T table
    #[arg(long)]
    out: Option<PathBuf>,
    /// CSV path for the squared prediction error table
    #[arg(long)]
    mse_out: Option<PathBuf>,
}

#[derive(Args)]
struct HorizonTableArgs {
    /// Benchmark model 1-4
    #[arg(long, default_value = "4", conflicts_with = "factors")]
    model: String,
    #[arg(long)]
    factors: Option<String>,
    #[arg(short = 'R', long, default_value_t = 1000)]
    replications: usize,
    /// Predictors as p:d pairs, benchmark first
    #[arg(long)]
    grid: Option<String>,
    #[arg(long, default_value_t = 400)]
    length: usize,
    /// First forecast origin
    #[arg(long, default_value_t = 300)]
    first: usize,
    #[arg(long, default_value_t = 60)]
    h_max: usize,
    #[arg(long, value_enum, default_value = "plug-in")]
    method: MethodArg,
    #[arg(long)]
    no_intercept: bool,
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    #[arg(long)]
    threads: Option<usize>,
    /// CSV path for the ratio table
    #[arg(long)]
    out: Option<PathBuf>,
    /// CSV path for the raw RMSE table
    #[arg(long)]
    rmse_out: Option<PathBuf>,
}

#[derive(Args)]
struct RollingArgs {
    series: PathBuf,
    /// Predictor as p:d or p:d:method (bj or direct); repeat to compare, benchmark first
    #[arg(long = "spec", required = true)]
    specs: Vec<String>,
    #[arg(long, default_value_t = 20)]
    h_max: usize,
    /// Observations in the first estimation window
    #[arg(long, default_value_t = 100)]
    first: usize,
    /// Include a constant term
    #[arg(long)]
    intercept: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct UnitRootArgs {
    series: PathBuf,
    /// Autoregressive order or an upper bound on it
    #[arg(long, short)]
    p: usize,
    #[arg(long, default_value_t = arcast::diagnostics::DEFAULT_UNIT_ROOT_THRESHOLD)]
    threshold: f64,
}

#[derive(Args)]
struct PlsArgs {
    series: PathBuf,
    #[arg(long)]
    p_max: usize,
    #[arg(long, default_value_t = 10)]
    t0: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(a) => cmd_simulate(a),
        Command::CtTable(a) => cmd_ct_table(a),
        Command::HorizonTable(a) => cmd_horizon_table(a),
        Command::Rolling(a) => cmd_rolling(a),
        Command::UnitRoot(a) => cmd_unit_root(a),
        Command::Pls(a) => cmd_pls(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn parse_factors(s: &str) -> Result<RootFactorSpec, CliError> {
    s.parse::<RootFactorSpec>()
        .map_err(|e| CliError::Usage(format!("invalid --factors {s:?}: {e}")))
}

fn parse_benchmark(s: &str) -> Result<BenchmarkModel, CliError> {
    s.parse::<BenchmarkModel>()
        .map_err(|e| CliError::Usage(format!("invalid --model {s:?}: {e}")))
}

fn model_factors(model: &str, factors: Option<&str>) -> Result<RootFactorSpec, CliError> {
    match factors {
        Some(f) => parse_factors(f),
        None => Ok(parse_benchmark(model)?.factors()),
    }
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, CliError> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<T>()
                .map_err(|_| CliError::Usage(format!("invalid {what} entry {x:?}")))
        })
        .collect()
}

fn parse_predictor(
    s: &str,
    intercept: bool,
    default_method: ForecastMethod,
) -> Result<PredictorSpec, CliError> {
    let bad = || {
        CliError::Usage(format!(
            "invalid predictor {s:?}; expected p:d or p:d:bj|direct"
        ))
    };
    let parts: Vec<&str> = s.split(':').map(str::trim).collect();
    if parts.len() < 2 || parts.len() > 3 {
        return Err(bad());
    }
    let p: usize = parts[0].parse().map_err(|_| bad())?;
    let d: u8 = parts[1].parse().map_err(|_| bad())?;
    let method = match parts.get(2) {
        None => default_method,
        Some(&"bj") | Some(&"plug-in") => ForecastMethod::PlugIn,
        Some(&"direct") => ForecastMethod::Direct,
        Some(_) => return Err(bad()),
    };
    let model = ModelSpec::new(p, Differencing::from_d(d)?).with_intercept(intercept);
    if p == 0 {
        return Err(CliError::Usage(format!(
            "predictor {s:?}: order must be at least 1"
        )));
    }
    Ok(PredictorSpec { model, method })
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn print(text: &str) -> Result<(), CliError> {
    io::stdout()
        .write_all(text.as_bytes())
        .map_err(|e| CliError::Io(e.to_string()))
}

fn cmd_simulate(a: SimulateArgs) -> Result<(), CliError> {
    let coeffs = match (&a.model.model, &a.model.factors, &a.model.beta) {
        (Some(m), _, _) => parse_benchmark(m)?.coefficients(),
        (None, Some(f), _) => arcast::coefficients_from_factors(&parse_factors(f)?),
        (None, None, Some(b)) => ArCoefficients::new(parse_list::<f64>(b, "--beta")?)?,
        (None, None, None) => {
            return Err(CliError::Usage(
                "one of --model, --factors or --beta is required".into(),
            ))
        }
    };
    let noise = match a.noise {
        NoiseArg::Gaussian => NoiseKind::Gaussian,
        NoiseArg::StudentT => NoiseKind::StudentT,
    };
    let process = ArProcess::new(coeffs, a.sigma)?
        .with_noise(noise)
        .with_burn_in(a.burn_in);
    let sample = simulate(&process, a.len, a.seed);
    let innovations = a.innovations.then_some(sample.innovations.as_slice());
    match a.out {
        Some(path) => {
            let file = fs::File::create(&path)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            write_series(io::BufWriter::new(file), &sample.values, innovations)
        }
        None => write_series(io::stdout().lock(), &sample.values, innovations),
    }
}

fn cmd_ct_table(a: CtTableArgs) -> Result<(), CliError> {
    let mut config =
        CtExperimentConfig::new(model_factors(&a.model, a.factors.as_deref())?, a.seed);
    config.replications = a.replications;
    config.t_grid = parse_list(&a.t_grid, "--t-grid")?;
    config.t0 = a.t0;
    config.sigma = a.sigma;
    config.intercept = !a.no_intercept;
    config.independent_draws = a.independent_draws;
    config.threads = a.threads;
    if a.literal_normalization {
        config.normalization = CtNormalization::Literal;
    }
    let result = run_ct_experiment(&config)?;
    print(&result.ct.to_text())?;
    print("\n")?;
    print(&result.mse.to_text())?;
    eprintln!("wall time: {:.2?}", result.wall_time);
    if let Some(path) = a.out {
        write_file(&path, &result.ct.to_csv())?;
    }
    if let Some(path) = a.mse_out {
        write_file(&path, &result.mse.to_csv())?;
    }
    Ok(())
}

fn cmd_horizon_table(a: HorizonTableArgs) -> Result<(), CliError> {
    let method = ForecastMethod::from(a.method);
    let mut config =
        HorizonExperimentConfig::new(model_factors(&a.model, a.factors.as_deref())?, a.seed)
            .with_default_grid(!a.no_intercept, method);
    if let Some(grid) = &a.grid {
        config.predictors = grid
            .split(',')
            .map(|s| parse_predictor(s, !a.no_intercept, method))
            .collect::<Result<_, _>>()?;
    }
    config.replications = a.replications;
    config.total_len = a.length;
    config.first_origin = a.first;
    config.max_horizon = a.h_max;
    config.sigma = a.sigma;
    config.threads = a.threads;
    let result = run_horizon_experiment(&config)?;
    print(&result.ratios.to_text())?;
    eprintln!("wall time: {:.2?}", result.wall_time);
    if let Some(path) = a.out {
        write_file(&path, &result.ratios.to_csv())?;
    }
    if let Some(path) = a.rmse_out {
        write_file(&path, &result.rmse.to_csv())?;
    }
    Ok(())
}

fn cmd_rolling(a: RollingArgs) -> Result<(), CliError> {
    let series = read_series(&a.series)?;
    let predictors: Vec<PredictorSpec> = a
        .specs
        .iter()
        .map(|s| parse_predictor(s, a.intercept, ForecastMethod::PlugIn))
        .collect::<Result<_, _>>()?;
    if series.values.len() <= a.first + 1 {
        return Err(CliError::Data(format!(
            "series has {} observations; need more than {} (first estimation window + 1)",
            series.values.len(),
            a.first + 1
        )));
    }
    let sums = evaluate_rolling_origin(&series.values, &predictors, a.first, a.h_max)?;
    let labels: Vec<String> = predictors.iter().map(PredictorSpec::label).collect();
    let mut columns = vec![format!("E {}", labels[0])];
    columns.extend(labels[1..].iter().map(|l| format!("ratio {l}")));
    let mut table = TableResult::new(
        format!("Rolling-origin RMSE, {}", a.series.display()),
        "horizon",
        columns,
        arcast::table::TableMeta {
            replications: 1,
            master_seed: 0,
        },
    );
    for h in 1..=sums.h_max() {
        let mut row = vec![sums.rmse(0, h)?];
        for v in 1..predictors.len() {
            row.push(sums.ratio_percent(v, h)?);
        }
        table.push_row(h.to_string(), row);
    }
    print(&table.to_text())?;
    if let Some(path) = a.out {
        write_file(&path, &table.to_csv())?;
    }
    Ok(())
}

fn cmd_unit_root(a: UnitRootArgs) -> Result<(), CliError> {
    let series = read_series(&a.series)?;
    let report = unit_root_stat(&series.values, a.p, a.threshold)?;
    print(&format!(
        "order used:        {}\nlog-det ratio:     {:.4}\nd_hat:             {:.4}\nthreshold:         {}\nunit root:         {}\n",
        report.p_used,
        report.logdet_ratio,
        report.d_hat,
        report.threshold,
        if report.classified_unit_root { "yes" } else { "no" }
    ))?;
    print(&format!(
        "p_used={} logdet_ratio={} d_hat={} threshold={} unit_root={}\n",
        report.p_used,
        report.logdet_ratio,
        report.d_hat,
        report.threshold,
        report.classified_unit_root
    ))
}

fn cmd_pls(a: PlsArgs) -> Result<(), CliError> {
    let series = read_series(&a.series)?;
    let report = pls_select(&series.values, a.p_max, a.t0)?;
    let mut table = TableResult::new(
        format!("Predictive least squares, {}", a.series.display()),
        "order",
        vec!["pls".into()],
        arcast::table::TableMeta {
            replications: 1,
            master_seed: 0,
        },
    );
    for &(j, v) in &report.pls_values {
        table.push_row(j.to_string(), vec![v]);
    }
    print(&table.to_text())?;
    print(&format!("chosen order: {}\n", report.chosen))?;
    if let Some(path) = a.out {
        write_file(&path, &table.to_csv())?;
    }
    Ok(())
}
