//! Simulation study: data generation, sup-norm accuracy, and timing.

use crate::basis::max_order;
use crate::cv::{cv_select_with, CvSolver, DEFAULT_FOLDS};
use crate::error::{Error, Result};
use crate::quadrature::{integrate_scalar, QuadConfig};
use crate::selector::{fit, FitConfig};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;
use std::sync::Arc;

pub const DEFAULT_SUPNORM_GRID: usize = 2001;

/// Mixed into the master seed for the CV fold streams.
const CV_SEED_SALT: u64 = 0x5EED_C0FF_EE00_0CF5;

pub type MeanClosure = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum MeanFn {
    /// `5x(5x − 0.2)(0.4x − 1.8)(3x − 1.8)(2x − 1.8)` on `[0, 1]`.
    Poly5,
    /// `x` on `[−3, −1]`, `−1` on `(−1, 1)`, `x − 2` on `[1, 3]`.
    PwLinear,
    Custom {
        name: String,
        f: MeanClosure,
    },
}

impl MeanFn {
    pub fn custom(name: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        MeanFn::Custom {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            MeanFn::Poly5 => 5.0 * x * (5.0 * x - 0.2) * (0.4 * x - 1.8) * (3.0 * x - 1.8) * (2.0 * x - 1.8),
            MeanFn::PwLinear => {
                if x <= -1.0 {
                    x
                } else if x < 1.0 {
                    -1.0
                } else {
                    x - 2.0
                }
            }
            MeanFn::Custom { f, .. } => f(x),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            MeanFn::Poly5 => "poly5",
            MeanFn::PwLinear => "pwlinear",
            MeanFn::Custom { name, .. } => name,
        }
    }

    pub fn default_domain(&self) -> (f64, f64) {
        match self {
            MeanFn::PwLinear => (-3.0, 3.0),
            _ => (0.0, 1.0),
        }
    }

    /// Points inside `(a, b)` where `|μ|` has a kink.
    fn breakpoints(&self) -> Vec<f64> {
        match self {
            MeanFn::Poly5 => vec![0.04, 0.6, 0.9],
            MeanFn::PwLinear => vec![-1.0, 1.0, 2.0],
            MeanFn::Custom { .. } => Vec::new(),
        }
    }
}

impl fmt::Debug for MeanFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl fmt::Display for MeanFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MeanFn {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "poly5" => Ok(MeanFn::Poly5),
            "pwlinear" => Ok(MeanFn::PwLinear),
            other => Err(Error::InvalidArgument(format!(
                "unknown mean function {other}; expected poly5 or pwlinear"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub mean_fn: MeanFn,
    pub n: usize,
    /// `f64::INFINITY` gives noiseless data.
    pub snr: f64,
    pub reps: usize,
    pub seed: u64,
    pub domain: (f64, f64),
}

impl Scenario {
    pub fn new(mean_fn: MeanFn, n: usize, snr: f64, reps: usize, seed: u64) -> Self {
        let domain = mean_fn.default_domain();
        Self {
            mean_fn,
            n,
            snr,
            reps,
            seed,
            domain,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (a, b) = self.domain;
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::InvalidArgument(format!("invalid domain [{a}, {b}]")));
        }
        if self.snr.is_nan() || self.snr <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "SNR must be positive, got {}",
                self.snr
            )));
        }
        if self.reps == 0 {
            return Err(Error::InvalidArgument("reps must be at least 1".into()));
        }
        if self.n < 2 * DEFAULT_FOLDS {
            return Err(Error::InvalidArgument(format!(
                "n must be at least {}, got {}",
                2 * DEFAULT_FOLDS,
                self.n
            )));
        }
        Ok(())
    }

    pub fn sigma(&self) -> Result<f64> {
        sigma_from_snr(&self.mean_fn, self.domain, self.snr)
    }
}

/// `(1/(b − a)) ∫_a^b |μ(x)| dx`.
pub fn mean_abs(mean_fn: &MeanFn, domain: (f64, f64)) -> Result<f64> {
    let (a, b) = domain;
    if matches!(mean_fn, MeanFn::PwLinear) && domain == (-3.0, 3.0) {
        // 4 on [−3, −1], 2 on [−1, 1], 1 on [1, 3]
        return Ok(7.0 / 6.0);
    }
    let mut cuts = vec![a];
    cuts.extend(mean_fn.breakpoints().into_iter().filter(|&c| c > a && c < b));
    cuts.push(b);
    let cfg = QuadConfig {
        rel_tol: 1e-12,
        abs_tol: 1e-15,
        max_intervals: 2000,
    };
    let mut total = 0.0;
    for w in cuts.windows(2) {
        total += integrate_scalar(|x| mean_fn.eval(x).abs(), w[0], w[1], cfg)?;
    }
    Ok(total / (b - a))
}

/// `σ = mean |μ| / SNR`; zero for infinite SNR.
pub fn sigma_from_snr(mean_fn: &MeanFn, domain: (f64, f64), snr: f64) -> Result<f64> {
    if snr.is_nan() || snr <= 0.0 {
        return Err(Error::InvalidArgument(format!("SNR must be positive, got {snr}")));
    }
    let m = mean_abs(mean_fn, domain)?;
    if m == 0.0 {
        return Err(Error::Degenerate(
            "mean function is identically zero; SNR is undefined".into(),
        ));
    }
    Ok(if snr.is_infinite() { 0.0 } else { m / snr })
}

fn rep_rng(seed: u64, rep: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(rep as u64);
    rng
}

/// Fold seed for replicate `rep`, independent of the data stream.
pub fn cv_seed(seed: u64, rep: usize) -> u64 {
    rep_rng(seed ^ CV_SEED_SALT, rep).next_u64()
}

/// Draw `x ~ U[a, b]` and `y ~ N(μ(x), σ²)` for one replicate.
pub fn generate(scenario: &Scenario, rep: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let sigma = scenario.sigma()?;
    let (a, b) = scenario.domain;
    let mut rng = rep_rng(scenario.seed, rep);
    let x: Vec<f64> = (0..scenario.n).map(|_| a + (b - a) * rng.random::<f64>()).collect();
    let y = x
        .iter()
        .map(|&v| {
            let mu = scenario.mean_fn.eval(v);
            if sigma == 0.0 {
                mu
            } else {
                mu + sigma * rng.sample::<f64, _>(StandardNormal)
            }
        })
        .collect();
    Ok((x, y))
}

/// `max |f(x) − μ(x)|` over an equispaced grid of `[a, b]`.
pub fn sup_norm(fit_curve: impl Fn(f64) -> f64, mean_fn: &MeanFn, domain: (f64, f64), grid_size: usize) -> f64 {
    assert!(grid_size >= 2, "sup-norm grid needs at least 2 points");
    let (a, b) = domain;
    (0..grid_size)
        .map(|i| {
            let x = a + (b - a) * i as f64 / (grid_size - 1) as f64;
            (fit_curve(x) - mean_fn.eval(x)).abs()
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationRecord {
    pub rep: usize,
    pub n: usize,
    pub snr: f64,
    #[serde(rename = "fn")]
    pub mean_fn: String,
    pub order_bayes: usize,
    pub order_cv: Option<usize>,
    pub supnorm_bayes: f64,
    pub supnorm_cv: Option<f64>,
    pub supnorm_full: f64,
    pub time_bayes: Option<f64>,
    pub time_cv: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct GridOptions {
    pub fit_config: FitConfig,
    pub with_cv: bool,
    pub folds: usize,
    pub cv_solver: CvSolver,
    /// Record wall-clock times; disable for byte-reproducible output.
    pub timing: bool,
    pub supnorm_grid: usize,
}

impl Default for GridOptions {
    fn default() -> Self {
        Self {
            fit_config: FitConfig::default(),
            with_cv: true,
            folds: DEFAULT_FOLDS,
            cv_solver: CvSolver::default(),
            timing: true,
            supnorm_grid: DEFAULT_SUPNORM_GRID,
        }
    }
}

/// Run both selectors on one replicate.
pub fn run_replicate(scenario: &Scenario, rep: usize, opts: &GridOptions) -> Result<SimulationRecord> {
    let (x, y) = generate(scenario, rep)?;
    let cfg = FitConfig {
        domain: Some(scenario.domain),
        ..opts.fit_config.clone()
    };
    let bayes = fit(&x, &y, &cfg)?;
    let mu = &scenario.mean_fn;
    let grid = opts.supnorm_grid;
    let supnorm_bayes = sup_norm(|v| bayes.predict(v), mu, scenario.domain, grid);
    let supnorm_full = sup_norm(|v| bayes.predict_full(v), mu, scenario.domain, grid);
    let cv = if opts.with_cv {
        let n_max = max_order(scenario.n, cfg.max_order_cap.max(1));
        Some(cv_select_with(
            &x,
            &y,
            n_max,
            opts.folds,
            cv_seed(scenario.seed, rep),
            opts.cv_solver,
        )?)
    } else {
        None
    };
    Ok(SimulationRecord {
        rep,
        n: scenario.n,
        snr: scenario.snr,
        mean_fn: mu.name().to_string(),
        order_bayes: bayes.selected_order,
        order_cv: cv.as_ref().map(|c| c.selected_order),
        supnorm_bayes,
        supnorm_cv: cv
            .as_ref()
            .map(|c| sup_norm(|v| c.predict(v), mu, scenario.domain, grid)),
        supnorm_full,
        time_bayes: opts.timing.then_some(bayes.timing_seconds),
        time_cv: cv.as_ref().filter(|_| opts.timing).map(|c| c.wall_clock),
    })
}

/// Shortest round-trip text, switching to exponent form for very small or large magnitudes.
pub(crate) fn csv_float(v: f64) -> String {
    format!("{v:?}")
}

/// Streams records as CSV, with columns chosen by the grid options.
pub struct RecordWriter<W: Write> {
    inner: csv::Writer<W>,
    with_cv: bool,
    timing: bool,
}

impl<W: Write> RecordWriter<W> {
    pub fn new(out: W, opts: &GridOptions) -> Result<Self> {
        let mut inner = csv::Writer::from_writer(out);
        let mut header = vec!["rep", "n", "snr", "fn", "order_bayes"];
        if opts.with_cv {
            header.push("order_cv");
        }
        header.push("supnorm_bayes");
        if opts.with_cv {
            header.push("supnorm_cv");
        }
        header.push("supnorm_full");
        if opts.timing {
            header.push("time_bayes");
            if opts.with_cv {
                header.push("time_cv");
            }
        }
        inner.write_record(&header)?;
        Ok(Self {
            inner,
            with_cv: opts.with_cv,
            timing: opts.timing,
        })
    }

    pub fn write(&mut self, r: &SimulationRecord) -> Result<()> {
        let opt_usize = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
        let opt_f64 = |v: Option<f64>| v.map(csv_float).unwrap_or_default();
        let mut row = vec![
            r.rep.to_string(),
            r.n.to_string(),
            csv_float(r.snr),
            r.mean_fn.clone(),
            r.order_bayes.to_string(),
        ];
        if self.with_cv {
            row.push(opt_usize(r.order_cv));
        }
        row.push(csv_float(r.supnorm_bayes));
        if self.with_cv {
            row.push(opt_f64(r.supnorm_cv));
        }
        row.push(csv_float(r.supnorm_full));
        if self.timing {
            row.push(opt_f64(r.time_bayes));
            if self.with_cv {
                row.push(opt_f64(r.time_cv));
            }
        }
        self.inner.write_record(&row)?;
        Ok(())
    }

    pub fn flush(&mut self) -> Result<()> {
        self.inner.flush()?;
        Ok(())
    }
}

/// Run every scenario, writing one CSV row per replicate in `(scenario, rep)`
/// order. Replicates run in parallel on the current rayon pool; each record
/// is produced by a single worker, which also times it. Completed scenarios
/// are flushed before the next one starts.
pub fn run_grid<W: Write>(scenarios: &[Scenario], opts: &GridOptions, out: W) -> Result<Vec<SimulationRecord>> {
    for s in scenarios {
        s.validate()?;
        s.sigma()?;
    }
    let mut writer = RecordWriter::new(out, opts)?;
    let mut all = Vec::new();
    for s in scenarios {
        let records: Vec<SimulationRecord> = (0..s.reps)
            .into_par_iter()
            .map(|rep| run_replicate(s, rep, opts))
            .collect::<Result<_>>()?;
        for r in &records {
            writer.write(r)?;
        }
        writer.flush()?;
        all.extend(records);
    }
    Ok(all)
}

/// One row of the per-scenario summary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioSummary {
    pub n: usize,
    pub snr: f64,
    #[serde(rename = "fn")]
    pub mean_fn: String,
    pub reps: usize,
    pub modal_order_bayes: usize,
    pub modal_order_cv: Option<usize>,
    pub median_supnorm_bayes: f64,
    pub median_supnorm_cv: Option<f64>,
    pub median_supnorm_full: f64,
    pub median_time_bayes: Option<f64>,
    pub median_time_cv: Option<f64>,
}

/// Most frequent value, ties to the smallest.
pub fn mode(values: &[usize]) -> Option<usize> {
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for &v in values {
        *counts.entry(v).or_default() += 1;
    }
    let top = counts.values().copied().max()?;
    counts.into_iter().find(|&(_, c)| c == top).map(|(v, _)| v)
}

/// Sample quantile by linear interpolation between order statistics.
pub fn quantile(values: &[f64], p: f64) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let h = p.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    Some(v[lo] + (h - lo as f64) * (v[hi] - v[lo]))
}

pub fn median(values: &[f64]) -> Option<f64> {
    quantile(values, 0.5)
}

type ScenarioKey = (String, usize, u64);

fn group(records: &[SimulationRecord]) -> Vec<(ScenarioKey, Vec<&SimulationRecord>)> {
    let mut groups: Vec<(ScenarioKey, Vec<&SimulationRecord>)> = Vec::new();
    for r in records {
        let key = (r.mean_fn.clone(), r.n, r.snr.to_bits());
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, g)) => g.push(r),
            None => groups.push((key, vec![r])),
        }
    }
    groups
}

fn collect_opt<T: Copy>(rs: &[&SimulationRecord], f: impl Fn(&SimulationRecord) -> Option<T>) -> Option<Vec<T>> {
    rs.iter().map(|r| f(r)).collect()
}

pub fn summarize(records: &[SimulationRecord]) -> Vec<ScenarioSummary> {
    group(records)
        .into_iter()
        .map(|((name, n, snr), rs)| {
            let orders: Vec<usize> = rs.iter().map(|r| r.order_bayes).collect();
            let f = |g: fn(&SimulationRecord) -> f64| {
                median(&rs.iter().map(|r| g(r)).collect::<Vec<_>>()).unwrap_or(f64::NAN)
            };
            ScenarioSummary {
                n,
                snr: f64::from_bits(snr),
                mean_fn: name,
                reps: rs.len(),
                modal_order_bayes: mode(&orders).unwrap_or(0),
                modal_order_cv: collect_opt(&rs, |r| r.order_cv).and_then(|v| mode(&v)),
                median_supnorm_bayes: f(|r| r.supnorm_bayes),
                median_supnorm_cv: collect_opt(&rs, |r| r.supnorm_cv).and_then(|v| median(&v)),
                median_supnorm_full: f(|r| r.supnorm_full),
                median_time_bayes: collect_opt(&rs, |r| r.time_bayes).and_then(|v| median(&v)),
                median_time_cv: collect_opt(&rs, |r| r.time_cv).and_then(|v| median(&v)),
            }
        })
        .collect()
}

const REQUIRED_COLUMNS: [&str; 7] = ["rep", "n", "snr", "fn", "order_bayes", "supnorm_bayes", "supnorm_full"];

/// Parse a results file written by [`run_grid`].
pub fn read_records<R: Read>(input: R) -> Result<Vec<SimulationRecord>> {
    let mut reader = csv::Reader::from_reader(input);
    let headers = reader.headers()?.clone();
    if headers.is_empty() {
        return Err(Error::Schema("file is empty".into()));
    }
    for col in REQUIRED_COLUMNS {
        if !headers.iter().any(|h| h == col) {
            return Err(Error::Schema(format!("required column '{col}' is missing")));
        }
    }
    let mut out = Vec::new();
    for (i, rec) in reader.deserialize::<SimulationRecord>().enumerate() {
        // header is line 1
        out.push(rec.map_err(|e| Error::Schema(format!("line {}: {e}", i + 2)))?);
    }
    if out.is_empty() {
        return Err(Error::Schema("no records".into()));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrequencyRow {
    #[serde(rename = "fn")]
    pub mean_fn: String,
    pub n: usize,
    pub snr: f64,
    pub method: String,
    pub order: usize,
    pub count: usize,
}

/// Selection frequency by order, per scenario and method.
pub fn frequency_table(records: &[SimulationRecord]) -> Vec<FrequencyRow> {
    let mut rows = Vec::new();
    for ((name, n, snr), rs) in group(records) {
        let mut methods: Vec<(&str, Vec<usize>)> = vec![("bayes", rs.iter().map(|r| r.order_bayes).collect())];
        if let Some(cv) = collect_opt(&rs, |r| r.order_cv) {
            methods.push(("cv", cv));
        }
        for (method, orders) in methods {
            let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
            for o in orders {
                *counts.entry(o).or_default() += 1;
            }
            for (order, count) in counts {
                rows.push(FrequencyRow {
                    mean_fn: name.clone(),
                    n,
                    snr: f64::from_bits(snr),
                    method: method.into(),
                    order,
                    count,
                });
            }
        }
    }
    rows
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimingRow {
    #[serde(rename = "fn")]
    pub mean_fn: String,
    pub n: usize,
    pub snr: f64,
    pub method: String,
    pub q025: f64,
    pub q50: f64,
    pub q975: f64,
}

/// 2.5%, 50% and 97.5% quantiles of the per-dataset time, per scenario and method.
pub fn timing_quantiles(records: &[SimulationRecord]) -> Vec<TimingRow> {
    let mut rows = Vec::new();
    for ((name, n, snr), rs) in group(records) {
        let methods = [
            ("bayes", collect_opt(&rs, |r| r.time_bayes)),
            ("cv", collect_opt(&rs, |r| r.time_cv)),
        ];
        for (method, times) in methods {
            let Some(t) = times else { continue };
            rows.push(TimingRow {
                mean_fn: name.clone(),
                n,
                snr: f64::from_bits(snr),
                method: method.into(),
                q025: quantile(&t, 0.025).unwrap_or(f64::NAN),
                q50: quantile(&t, 0.5).unwrap_or(f64::NAN),
                q975: quantile(&t, 0.975).unwrap_or(f64::NAN),
            });
        }
    }
    rows
}
