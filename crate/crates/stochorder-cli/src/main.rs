//! Command-line front end: run the factorial simulation, build the analysis
//! report, or compare two sample files directly.
//!
//! Exit codes are a stable contract: 0 success, 2 configuration error,
//! 3 stale dataset (config hash mismatch), 4 I/O or data-file error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use stochorder::config::{MetricChoice, ModelConfig};
use stochorder::dispersion::{dispersion_compare, DispersionConfig, DispersionMetric, MultiSample};
use stochorder::experiment::{read_dataset, run_configured_experiment, write_dataset};
use stochorder::heatsim::{DesignOption, ScenarioKind};
use stochorder::ordering::{
    fsd_compare, ks_one_sided_test, DominanceRelation, KsResult, PValueMethod, TestConfig,
};
use stochorder::report::build_full_report;
use stochorder::sample::Sample;
use stochorder::Error;

const EXIT_CONFIG: u8 = 2;
const EXIT_STALE: u8 = 3;
const EXIT_IO: u8 = 4;

#[derive(Parser)]
#[command(
    name = "stochorder",
    version,
    about = "Stochastic-ordering comparison of district heating designs under uncertainty"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full factorial simulation and write the dataset CSV.
    Simulate(SimulateArgs),
    /// Build dominance/KS tables, CDF curves, and report.json from a dataset.
    Analyze(AnalyzeArgs),
    /// Compare two sample files directly (mean ordering, or dispersion).
    Compare(CompareArgs),
}

/// Configuration source plus targeted overrides, shared by subcommands.
#[derive(Args)]
struct ConfigArgs {
    /// TOML configuration file; embedded defaults are used when omitted.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Override one configuration value, e.g. --set analysis.seed=7.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Random seed for bootstrap resampling.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of bootstrap resamples (minimum 100).
    #[arg(long, value_name = "B")]
    bootstrap: Option<usize>,
    /// Family-wise significance level, in (0, 1).
    #[arg(long)]
    alpha: Option<f64>,
    /// Bonferroni divisor: number of simultaneous comparisons.
    #[arg(long, value_name = "N")]
    comparisons: Option<usize>,
    /// Dispersion metric: l1, l2, or simplex.
    #[arg(long)]
    metric: Option<String>,
    /// Simplex order k (tuples of k+1 points).
    #[arg(long)]
    k: Option<usize>,
    /// Rescale each coordinate to [0, 1] before dispersion resampling.
    #[arg(long)]
    normalize: Option<bool>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Output directory for dataset.csv and its metadata sidecar.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Comma-separated scenario filter (green, neutral, market).
    #[arg(long, value_name = "LIST")]
    scenarios: Option<String>,
    /// Comma-separated design filter (d1, d2, d3).
    #[arg(long, value_name = "LIST")]
    designs: Option<String>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    config: ConfigArgs,
    /// Output directory for report.json and curve CSVs.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Dataset CSV to analyse; defaults to <out>/dataset.csv.
    #[arg(value_name = "DATASET")]
    dataset: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    /// Left sample file (numeric CSV, one observation per line).
    left: PathBuf,
    /// Right sample file.
    right: PathBuf,
    /// Compare dispersion instead of the values themselves: l1, l2, simplex.
    #[arg(long, value_name = "METRIC")]
    dispersion: Option<String>,
    /// Simplex order k (with --dispersion simplex).
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Number of bootstrap resamples (with --dispersion).
    #[arg(long, value_name = "B", default_value_t = 1000)]
    bootstrap: usize,
    /// Random seed for bootstrap resampling (with --dispersion).
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Rescale each coordinate to [0, 1]; defaults to the metric's
    /// convention (on for l1/l2, off for simplex).
    #[arg(long)]
    normalize: Option<bool>,
    /// Family-wise significance level.
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Bonferroni divisor for the rejection flag.
    #[arg(long, value_name = "N", default_value_t = 1)]
    comparisons: usize,
}

/// An error tagged with the process exit code it must produce.
struct Failure {
    code: u8,
    error: Error,
}

type CliResult<T> = Result<T, Failure>;

fn config_err(error: Error) -> Failure {
    Failure {
        code: EXIT_CONFIG,
        error,
    }
}

/// Data-phase errors: stale datasets keep their dedicated code, everything
/// else (missing files, parse failures, write failures) is an I/O error.
fn data_err(error: Error) -> Failure {
    let code = match error {
        Error::StaleDataset { .. } => EXIT_STALE,
        _ => EXIT_IO,
    };
    Failure { code, error }
}

fn main() -> ExitCode {
    reset_sigpipe();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.error);
            ExitCode::from(failure.code)
        }
    }
}

/// Restore the default SIGPIPE disposition so that piping output into a
/// consumer that exits early (e.g. `head`) terminates the process quietly
/// instead of panicking on a broken-pipe write error.
#[cfg(unix)]
fn reset_sigpipe() {
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
}

#[cfg(not(unix))]
fn reset_sigpipe() {}

fn run(cli: Cli) -> CliResult<()> {
    init_thread_pool()?;
    match cli.command {
        Command::Simulate(args) => cmd_simulate(args),
        Command::Analyze(args) => cmd_analyze(args),
        Command::Compare(args) => cmd_compare(args),
    }
}

/// `STOCHORDER_THREADS` caps the worker pool; 0 or unset means automatic.
fn init_thread_pool() -> CliResult<()> {
    let Ok(raw) = std::env::var("STOCHORDER_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw.trim().parse().map_err(|_| {
        config_err(Error::config(
            "STOCHORDER_THREADS",
            format!("expected a nonnegative integer, got `{raw}`"),
        ))
    })?;
    if threads > 0 {
        // A failure here means a pool already exists, which is fine.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    Ok(())
}

fn effective_config(args: &ConfigArgs) -> CliResult<ModelConfig> {
    let mut cfg =
        ModelConfig::load_with_overrides(args.config.as_deref(), &args.set).map_err(config_err)?;
    if let Some(seed) = args.seed {
        cfg.analysis.seed = seed;
    }
    if let Some(b) = args.bootstrap {
        cfg.analysis.bootstrap_resamples = b;
    }
    if let Some(alpha) = args.alpha {
        cfg.analysis.alpha = alpha;
    }
    if let Some(n) = args.comparisons {
        cfg.analysis.num_comparisons = n;
    }
    if let Some(metric) = &args.metric {
        cfg.analysis.metric = parse_metric(metric)?;
    }
    if let Some(k) = args.k {
        cfg.analysis.simplex_k = k;
    }
    if let Some(normalize) = args.normalize {
        cfg.analysis.normalize = normalize;
    }
    cfg.validate().map_err(config_err)?;
    Ok(cfg)
}

fn parse_metric(name: &str) -> CliResult<MetricChoice> {
    match name.to_ascii_lowercase().as_str() {
        "l1" => Ok(MetricChoice::L1),
        "l2" => Ok(MetricChoice::L2),
        "simplex" => Ok(MetricChoice::Simplex),
        other => Err(config_err(Error::config(
            "metric",
            format!("unknown metric `{other}`; expected l1, l2, or simplex"),
        ))),
    }
}

fn parse_scenarios(list: &str) -> CliResult<Vec<ScenarioKind>> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            ScenarioKind::parse(s).ok_or_else(|| {
                config_err(Error::config(
                    "scenarios",
                    format!("unknown scenario `{s}`; expected green, neutral, or market"),
                ))
            })
        })
        .collect()
}

fn parse_designs(list: &str) -> CliResult<Vec<DesignOption>> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            DesignOption::parse(s).ok_or_else(|| {
                config_err(Error::config(
                    "designs",
                    format!("unknown design `{s}`; expected d1, d2, or d3"),
                ))
            })
        })
        .collect()
}

fn cmd_simulate(args: SimulateArgs) -> CliResult<()> {
    let cfg = effective_config(&args.config)?;
    let scenarios = match &args.scenarios {
        Some(list) => parse_scenarios(list)?,
        None => Vec::new(),
    };
    let designs = match &args.designs {
        Some(list) => parse_designs(list)?,
        None => Vec::new(),
    };
    let dataset = run_configured_experiment(&cfg, &scenarios, &designs).map_err(config_err)?;
    std::fs::create_dir_all(&args.out).map_err(|e| data_err(Error::io(args.out.clone(), e)))?;
    let csv_path = args.out.join("dataset.csv");
    write_dataset(&dataset, &csv_path).map_err(data_err)?;
    println!(
        "wrote {} rows to {} (config {})",
        dataset.rows().len(),
        csv_path.display(),
        &cfg.hash()[..12]
    );
    Ok(())
}

fn cmd_analyze(args: AnalyzeArgs) -> CliResult<()> {
    let cfg = effective_config(&args.config)?;
    let dataset_path = args
        .dataset
        .clone()
        .unwrap_or_else(|| args.out.join("dataset.csv"));
    let dataset = read_dataset(&dataset_path).map_err(data_err)?;
    let artifacts = build_full_report(&dataset, &cfg, &args.out).map_err(data_err)?;
    println!(
        "wrote {} with {} tables and {} curve files to {}",
        artifacts.report_path.display(),
        artifacts.report.tables.len(),
        artifacts.curve_paths.len(),
        args.out.display()
    );
    Ok(())
}

fn cmd_compare(args: CompareArgs) -> CliResult<()> {
    let test_cfg = TestConfig {
        alpha: args.alpha,
        num_comparisons: args.comparisons,
        method: PValueMethod::Asymptotic,
        shared_inputs: false,
    };
    test_cfg.validate().map_err(config_err)?;
    let (relation, ks) = match &args.dispersion {
        None => {
            let left = read_scalar_sample(&args.left)?;
            let right = read_scalar_sample(&args.right)?;
            let verdict = fsd_compare(&left, &right);
            let ks = ks_one_sided_test(&left, &right, &test_cfg).map_err(config_err)?;
            (verdict.relation, ks)
        }
        Some(metric_name) => {
            let metric = match parse_metric(metric_name)? {
                MetricChoice::L1 => DispersionMetric::L1,
                MetricChoice::L2 => DispersionMetric::L2,
                MetricChoice::Simplex => DispersionMetric::Simplex { k: args.k },
            };
            let left = read_multi_sample(&args.left)?;
            let right = read_multi_sample(&args.right)?;
            let mut cfg = DispersionConfig::new(metric, args.bootstrap, args.seed);
            if let Some(normalize) = args.normalize {
                cfg = cfg.with_normalize(normalize);
            }
            let (verdict, ks) =
                dispersion_compare(&left, &right, &cfg, &test_cfg).map_err(config_err)?;
            println!(
                "dispersion statistic: {} over {} resamples (seed {})",
                cfg.metric.name(),
                cfg.num_resamples,
                cfg.seed
            );
            (verdict.relation, ks)
        }
    };
    print_comparison(&args.left, &args.right, relation, &ks);
    Ok(())
}

fn print_comparison(left: &Path, right: &Path, relation: DominanceRelation, ks: &KsResult) {
    let left_name = file_label(left);
    let right_name = file_label(right);
    let verdict = match relation {
        DominanceRelation::LeftDominates => {
            format!("{left_name} dominates (is stochastically larger than) {right_name}")
        }
        DominanceRelation::RightDominates => {
            format!("{right_name} dominates (is stochastically larger than) {left_name}")
        }
        DominanceRelation::Equal => format!("{left_name} and {right_name} are equal"),
        DominanceRelation::Incomparable => {
            format!("{left_name} and {right_name} are incomparable (CDFs cross)")
        }
    };
    println!("verdict: {verdict}");
    println!("D       = {:.6}", ks.d_two_sided);
    println!(
        "D-      = {:.6}  (sup of F_{right_name} - F_{left_name})",
        ks.d_minus
    );
    match ks.p_value {
        Some(p) => {
            let mark = if ks.rejected == Some(true) {
                "  -> rejected"
            } else {
                ""
            };
            println!("p       = {p:.6}  (null: {right_name} dominates {left_name}){mark}");
        }
        None => println!("p       = NA"),
    }
}

fn file_label(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Reads a numeric CSV: one observation per line, comma-separated columns,
/// optional non-numeric header naming the columns.
fn read_numeric_csv(path: &Path) -> CliResult<(Vec<String>, Vec<Vec<f64>>)> {
    let text =
        std::fs::read_to_string(path).map_err(|e| data_err(Error::io(path.to_path_buf(), e)))?;
    let mut header: Option<Vec<String>> = None;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed: Result<Vec<f64>, _> = fields.iter().map(|f| f.parse::<f64>()).collect();
        match parsed {
            Ok(values) => {
                if let Some(first) = rows.first() {
                    if values.len() != first.len() {
                        return Err(data_err(Error::Parse {
                            path: path.to_path_buf(),
                            line: idx + 1,
                            reason: format!(
                                "expected {} columns, found {}",
                                first.len(),
                                values.len()
                            ),
                        }));
                    }
                }
                rows.push(values);
            }
            Err(_) if rows.is_empty() && header.is_none() => {
                header = Some(fields.iter().map(|f| f.to_string()).collect());
            }
            Err(_) => {
                return Err(data_err(Error::Parse {
                    path: path.to_path_buf(),
                    line: idx + 1,
                    reason: "not a numeric row".to_string(),
                }));
            }
        }
    }
    if rows.is_empty() {
        return Err(data_err(Error::Parse {
            path: path.to_path_buf(),
            line: 1,
            reason: "no numeric rows".to_string(),
        }));
    }
    let width = rows[0].len();
    let labels = match header {
        Some(names) if names.len() == width => names,
        _ => (0..width).map(|c| format!("c{c}")).collect(),
    };
    Ok((labels, rows))
}

fn read_scalar_sample(path: &Path) -> CliResult<Sample> {
    let (_, rows) = read_numeric_csv(path)?;
    if rows[0].len() != 1 {
        return Err(data_err(Error::Parse {
            path: path.to_path_buf(),
            line: 1,
            reason: format!(
                "expected a single column for a mean-ordering comparison, found {}",
                rows[0].len()
            ),
        }));
    }
    Sample::new(rows.into_iter().map(|r| r[0]).collect(), file_label(path)).map_err(config_err)
}

fn read_multi_sample(path: &Path) -> CliResult<MultiSample> {
    let (labels, rows) = read_numeric_csv(path)?;
    MultiSample::new(rows, labels, file_label(path)).map_err(config_err)
}
