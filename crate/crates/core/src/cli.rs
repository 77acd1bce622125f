//! Command-line front end: `fit`, `simulate`, `compare` and `report`.

use crate::binary::{fit_binary, BinaryConfig, MIN_DRAWS};
use crate::cv::{CvSolver, DEFAULT_FOLDS};
use crate::error::{Error, Result};
use crate::gprior::OmegaPrior;
use crate::selector::{fit, CoefficientPath, FitConfig, FitResult, LossWeights, SelectionRule};
use crate::simulation::{
    csv_float, frequency_table, read_records, run_grid, summarize, timing_quantiles, GridOptions, MeanFn, Scenario,
    ScenarioSummary, DEFAULT_SUPNORM_GRID,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

pub const THREADS_ENV: &str = "SMOOTHSEL_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "smoothsel",
    version,
    about = "Bayesian order selection for Bernstein polynomial regression"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a CSV dataset and select the polynomial order.
    Fit(FitArgs),
    /// Run the simulation grid with the Bayesian selector only.
    Simulate(SimulateArgs),
    /// Run the simulation grid with the Bayesian selector and k-fold CV.
    Compare(CompareArgs),
    /// Summarize a results CSV into frequency and timing tables.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PriorKind {
    Intrinsic,
    ZellnerSiow,
    HyperG,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    /// Mixing prior on the g-prior scale.
    #[arg(long, value_enum, default_value = "intrinsic")]
    pub omega_prior: PriorKind,
    /// Degrees of freedom (zellner-siow, hyper-g).
    #[arg(long)]
    pub nu: Option<f64>,
    /// Scale of the Zellner–Siow inverse-gamma.
    #[arg(long)]
    pub rho: Option<f64>,
    /// Hyper-g shape `a`.
    #[arg(long)]
    pub hg_a: Option<f64>,
    /// Hyper-g scale `b`.
    #[arg(long)]
    pub hg_b: Option<f64>,
    /// Order selection rule.
    #[arg(long, default_value = "mpm", value_parser = ["mpm", "loss"])]
    pub rule: String,
    /// Beta hyperparameter `a` of the model-space prior.
    #[arg(long, default_value_t = 1.0)]
    pub prior_a: f64,
    /// Beta hyperparameter `b` of the model-space prior.
    #[arg(long, default_value_t = 1.0)]
    pub prior_b: f64,
    /// Upper bound on the largest order considered.
    #[arg(long)]
    pub max_order_cap: Option<usize>,
    /// How Bernstein coefficients are obtained.
    #[arg(long, default_value = "refit", value_parser = ["refit", "transform"])]
    pub coefficient_path: String,
    /// Weights of the predictive loss.
    #[arg(long, default_value = "training", value_parser = ["training", "grid"])]
    pub loss_weights: String,
}

impl ModelArgs {
    pub fn omega_prior(&self) -> Result<OmegaPrior> {
        let prior = match self.omega_prior {
            PriorKind::Intrinsic => {
                if self.nu.is_some() || self.rho.is_some() || self.hg_a.is_some() || self.hg_b.is_some() {
                    return Err(Error::InvalidArgument(
                        "the intrinsic prior takes no hyperparameters".into(),
                    ));
                }
                OmegaPrior::Intrinsic
            }
            PriorKind::ZellnerSiow => {
                if self.hg_a.is_some() || self.hg_b.is_some() {
                    return Err(Error::InvalidArgument("--hg-a/--hg-b apply to hyper-g only".into()));
                }
                let OmegaPrior::ZellnerSiow { nu, rho } = OmegaPrior::zellner_siow() else {
                    unreachable!()
                };
                OmegaPrior::ZellnerSiow {
                    nu: self.nu.unwrap_or(nu),
                    rho: self.rho.unwrap_or(rho),
                }
            }
            PriorKind::HyperG => {
                if self.rho.is_some() {
                    return Err(Error::InvalidArgument("--rho applies to zellner-siow only".into()));
                }
                let OmegaPrior::HyperG { nu, a, b } = OmegaPrior::hyper_g() else {
                    unreachable!()
                };
                OmegaPrior::HyperG {
                    nu: self.nu.unwrap_or(nu),
                    a: self.hg_a.unwrap_or(a),
                    b: self.hg_b.unwrap_or(b),
                }
            }
        };
        prior.validate()?;
        Ok(prior)
    }

    pub fn fit_config(&self) -> Result<FitConfig> {
        let defaults = FitConfig::default();
        for (name, v) in [("--prior-a", self.prior_a), ("--prior-b", self.prior_b)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(FitConfig {
            omega_prior: self.omega_prior()?,
            rule: self.rule.parse::<SelectionRule>()?,
            prior_a: self.prior_a,
            prior_b: self.prior_b,
            max_order_cap: self.max_order_cap.unwrap_or(defaults.max_order_cap),
            coefficient_path: self.coefficient_path.parse::<CoefficientPath>()?,
            loss_weights: self.loss_weights.parse::<LossWeights>()?,
            domain: None,
        })
    }
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    /// Input CSV with a header row.
    #[arg(long, short)]
    pub input: PathBuf,
    /// Predictor column.
    #[arg(long, default_value = "x")]
    pub x: String,
    /// Response column.
    #[arg(long, default_value = "y")]
    pub y: String,
    /// JSON result document; standard output when omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// CSV of the fitted curve on an equispaced grid (`x,fitted`).
    #[arg(long)]
    pub curve: Option<PathBuf>,
    /// CSV of per-order posterior quantities.
    #[arg(long)]
    pub posterior: Option<PathBuf>,
    /// Points in the curve grid.
    #[arg(long, default_value_t = 201)]
    pub curve_points: usize,
    /// Predictor interval mapped onto `[0, 1]`; the observed range when omitted.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true)]
    pub domain: Option<Vec<f64>>,
    /// Treat the response as 0/1 and use the probit model.
    #[arg(long)]
    pub binary: bool,
    /// Importance draws per node for the binary marginal likelihoods.
    #[arg(long, default_value_t = MIN_DRAWS)]
    pub mc_draws: usize,
    /// Seed for the binary Monte Carlo.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub model: ModelArgs,
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// True mean function.
    #[arg(long = "function", default_value = "poly5", value_parser = ["poly5", "pwlinear"])]
    pub function: String,
    /// Sample sizes, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "100")]
    pub n: Vec<usize>,
    /// Signal-to-noise ratios, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub snr: Vec<f64>,
    /// Replicates per scenario.
    #[arg(long, default_value_t = 100)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Results CSV; standard output when omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Leave out the wall-clock columns so that output is byte-reproducible.
    #[arg(long)]
    pub no_timing: bool,
    /// Worker threads; falls back to SMOOTHSEL_THREADS, then to all cores.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Grid points for the sup-norm.
    #[arg(long, default_value_t = DEFAULT_SUPNORM_GRID)]
    pub supnorm_grid: usize,
    #[command(flatten)]
    pub model: ModelArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    /// Selectors to run; `bayes` is always required.
    #[arg(long, value_delimiter = ',', default_value = "bayes,cv", value_parser = ["bayes", "cv"])]
    pub methods: Vec<String>,
    /// CV folds.
    #[arg(long, default_value_t = DEFAULT_FOLDS)]
    pub folds: usize,
    /// Per-fold least squares: a fresh fit per order, or one QR shared by all orders.
    #[arg(long, default_value = "refit", value_parser = ["refit", "nested"])]
    pub cv_solver: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Csv,
    Markdown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportTable {
    Frequency,
    Timing,
    All,
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    /// Results CSV written by `simulate` or `compare`.
    #[arg(long, short)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "markdown")]
    pub format: ReportFormat,
    #[arg(long, value_enum, default_value = "all")]
    pub table: ReportTable,
    /// Destination; standard output when omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

/// Parse `args` (program name first) and run the command. Returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_input_error() || matches!(e, Error::Io(_)) {
        EXIT_INPUT
    } else {
        EXIT_NUMERIC
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Fit(a) => cmd_fit(&a),
        Command::Simulate(a) => cmd_grid(&a.grid, false, DEFAULT_FOLDS, CvSolver::default()),
        Command::Compare(a) => {
            if !a.methods.iter().any(|m| m == "bayes") {
                return Err(Error::InvalidArgument(
                    "--methods must include bayes; the full-order fit and sup-norms come from it".into(),
                ));
            }
            cmd_grid(
                &a.grid,
                a.methods.iter().any(|m| m == "cv"),
                a.folds,
                a.cv_solver.parse()?,
            )
        }
        Command::Report(a) => cmd_report(&a),
    }
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write + Send>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

/// Read two named numeric columns from a CSV file.
pub fn read_xy(path: &Path, x_col: &str, y_col: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut reader = csv::Reader::from_path(path)?;
    let headers = reader.headers()?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::Input {
                row: 1,
                column: name.to_string(),
                message: format!(
                    "no such column; header is [{}]",
                    headers.iter().collect::<Vec<_>>().join(", ")
                ),
            })
    };
    let (ix, iy) = (find(x_col)?, find(y_col)?);
    let (mut x, mut y) = (Vec::new(), Vec::new());
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        // header is line 1
        let row = i + 2;
        let cell = |idx: usize, name: &str| -> Result<f64> {
            let raw = record.get(idx).unwrap_or("").trim();
            let message = if raw.is_empty() {
                "missing value".to_string()
            } else {
                match raw.parse::<f64>() {
                    Ok(v) if v.is_finite() => return Ok(v),
                    Ok(_) => format!("non-finite value '{raw}'"),
                    Err(_) => format!("not a number: '{raw}'"),
                }
            };
            Err(Error::Input {
                row,
                column: name.to_string(),
                message,
            })
        };
        x.push(cell(ix, x_col)?);
        y.push(cell(iy, y_col)?);
    }
    if x.is_empty() {
        return Err(Error::Input {
            row: 2,
            column: y_col.to_string(),
            message: "no data rows".into(),
        });
    }
    Ok((x, y))
}

fn cmd_fit(a: &FitArgs) -> Result<()> {
    let mut config = a.model.fit_config()?;
    if let Some(d) = &a.domain {
        config.domain = Some((d[0], d[1]));
    }
    if a.curve_points < 2 {
        return Err(Error::InvalidArgument("--curve-points must be at least 2".into()));
    }
    let (x, y) = read_xy(&a.input, &a.x, &a.y)?;
    let result = if a.binary {
        let binary = BinaryConfig {
            mc_draws: a.mc_draws,
            seed: a.seed,
            ..BinaryConfig::default()
        };
        fit_binary(&x, &y, &config, &binary)?
    } else {
        fit(&x, &y, &config)?
    };

    let mut out = sink(a.output.as_deref())?;
    serde_json::to_writer_pretty(&mut out, &result)?;
    writeln!(out)?;
    out.flush()?;
    if let Some(p) = &a.curve {
        write_curve(p, &result, a.curve_points)?;
    }
    if let Some(p) = &a.posterior {
        write_posterior(p, &result)?;
    }
    Ok(())
}

fn write_curve(path: &Path, result: &FitResult, points: usize) -> Result<()> {
    let (lo, hi) = (result.scale.a, result.scale.b);
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["x", "fitted"])?;
    for i in 0..points {
        let x = lo + (hi - lo) * i as f64 / (points - 1) as f64;
        w.write_record([csv_float(x), csv_float(result.predict(x))])?;
    }
    w.flush()?;
    Ok(())
}

fn write_posterior(path: &Path, result: &FitResult) -> Result<()> {
    let d = &result.diagnostics;
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["order", "posterior", "inclusion", "shrinkage", "log_bf"])?;
    for (k, p) in result.posterior_over_orders.iter().enumerate() {
        w.write_record([
            k.to_string(),
            csv_float(*p),
            d.inclusion.get(k).map(|&v| csv_float(v)).unwrap_or_default(),
            d.shrinkages.get(k).map(|&v| csv_float(v)).unwrap_or_default(),
            d.log_bf.get(k).map(|&v| csv_float(v)).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Thread count from the flag, then the environment; `0` means all cores.
pub fn resolve_threads(flag: Option<usize>) -> Result<usize> {
    if let Some(t) = flag {
        return Ok(t);
    }
    match std::env::var(THREADS_ENV) {
        Ok(s) if !s.trim().is_empty() => s
            .trim()
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("{THREADS_ENV} must be a non-negative integer, got '{s}'"))),
        _ => Ok(0),
    }
}

fn cmd_grid(a: &GridArgs, with_cv: bool, folds: usize, cv_solver: CvSolver) -> Result<()> {
    let fit_config = a.model.fit_config()?;
    let mean_fn: MeanFn = a.function.parse()?;
    if with_cv && folds < 2 {
        return Err(Error::InvalidArgument(format!(
            "--folds must be at least 2, got {folds}"
        )));
    }
    if a.supnorm_grid < 2 {
        return Err(Error::InvalidArgument("--supnorm-grid must be at least 2".into()));
    }
    let mut scenarios = Vec::new();
    for &n in &a.n {
        for &snr in &a.snr {
            let s = Scenario::new(mean_fn.clone(), n, snr, a.reps, a.seed);
            s.validate()?;
            scenarios.push(s);
        }
    }
    let opts = GridOptions {
        fit_config,
        with_cv,
        folds,
        cv_solver,
        timing: !a.no_timing,
        supnorm_grid: a.supnorm_grid,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(resolve_threads(a.threads)?)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start thread pool: {e}")))?;

    let records = {
        let out = sink(a.output.as_deref())?;
        pool.install(|| run_grid(&scenarios, &opts, out))?
    };
    let summary = summary_markdown(&summarize(&records));
    // keep standard output clean when it carries the CSV
    if a.output.is_some() {
        print!("{summary}");
    } else {
        eprint!("{summary}");
    }
    Ok(())
}

fn fmt_opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_else(|| "-".into())
}

fn fmt_g(v: f64) -> String {
    format!("{v:.4}")
}

pub fn summary_markdown(rows: &[ScenarioSummary]) -> String {
    let mut s = String::from(
        "| fn | n | snr | reps | mode order bayes | mode order cv | median sup bayes | median sup cv | median sup full | median time bayes | median time cv |\n\
         |---|---|---|---|---|---|---|---|---|---|---|\n",
    );
    for r in rows {
        s.push_str(&format!(
            "| {} | {} | {} | {} | {} | {} | {} | {} | {} | {} | {} |\n",
            r.mean_fn,
            r.n,
            r.snr,
            r.reps,
            r.modal_order_bayes,
            fmt_opt(r.modal_order_cv),
            fmt_g(r.median_supnorm_bayes),
            fmt_opt(r.median_supnorm_cv.map(fmt_g)),
            fmt_g(r.median_supnorm_full),
            fmt_opt(r.median_time_bayes.map(|t| format!("{t:.3e}"))),
            fmt_opt(r.median_time_cv.map(|t| format!("{t:.3e}"))),
        ));
    }
    s
}

fn write_table<R: Serialize>(out: &mut dyn Write, rows: &[R], header: &[&str], format: ReportFormat) -> Result<()> {
    match format {
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            if rows.is_empty() {
                w.write_record(header)?;
            }
            for r in rows {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        ReportFormat::Markdown => {
            writeln!(out, "| {} |", header.join(" | "))?;
            writeln!(out, "|{}", "---|".repeat(header.len()))?;
            for r in rows {
                let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
                w.serialize(r)?;
                let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
                let line = String::from_utf8_lossy(&bytes);
                let cells: Vec<&str> = line.trim_end().split(',').collect();
                writeln!(out, "| {} |", cells.join(" | "))?;
            }
        }
    }
    Ok(())
}

fn cmd_report(a: &ReportArgs) -> Result<()> {
    let records = read_records(File::open(&a.input)?)?;
    let mut out = sink(a.output.as_deref())?;
    let markdown = a.format == ReportFormat::Markdown;
    if matches!(a.table, ReportTable::Frequency | ReportTable::All) {
        if markdown {
            writeln!(out, "Selection frequency by order\n")?;
        }
        let header = ["fn", "n", "snr", "method", "order", "count"];
        write_table(&mut *out, &frequency_table(&records), &header, a.format)?;
    }
    if matches!(a.table, ReportTable::Timing | ReportTable::All) {
        let rows = timing_quantiles(&records);
        if a.table == ReportTable::Timing && rows.is_empty() {
            return Err(Error::Input {
                row: 1,
                column: "time_bayes".into(),
                message: "results file has no timing columns".into(),
            });
        }
        if !rows.is_empty() {
            if a.table == ReportTable::All {
                writeln!(out)?;
            }
            if markdown {
                writeln!(
                    out,
                    "Quantiles 2.5%, 50%, 97.5% of computation time per dataset (seconds)\n"
                )?;
            }
            let header = ["fn", "n", "snr", "method", "q025", "q50", "q975"];
            write_table(&mut *out, &rows, &header, a.format)?;
        }
    }
    out.flush()?;
    Ok(())
}
