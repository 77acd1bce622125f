//! End-to-end order selection and the final Bernstein fit.

use crate::basis::{
    build_design, eval_bernstein, eval_legendre, legendre_into, max_order, Basis, DesignMatrix, PredictorScale,
    DEFAULT_ORDER_CAP,
};
use crate::error::{Error, Result};
use crate::gprior::{nested_stats, posterior_from_stats, ModelPosterior, OmegaPrior};
use crate::linalg::{least_squares, NestedLeastSquares};
use crate::model_space::model_prior;
use crate::special::norm_cdf;
use crate::transform::{build_transform, condition_diagnostic, legendre_to_bernstein};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

/// Smallest sample size `fit` accepts.
pub const MIN_OBSERVATIONS: usize = 5;

/// Points of the uniform grid used by [`LossWeights::Grid`].
pub const LOSS_GRID_POINTS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SelectionRule {
    /// Median probability model.
    #[default]
    Mpm,
    /// Minimum posterior predictive loss.
    Loss,
}

/// How the final Bernstein coefficients are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum CoefficientPath {
    /// Least-squares refit of the Bernstein design.
    #[default]
    Refit,
    /// Map the Legendre estimate through `Q`.
    Transform,
}

/// Source of the `d_j` weights in the predictive loss.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum LossWeights {
    /// Mean of `ψ_j(x_i)²` over the training inputs.
    #[default]
    Training,
    /// Mean of `ψ_j(u)²` over a uniform grid on `[0, 1]`.
    Grid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Response {
    #[default]
    Gaussian,
    Binary,
}

macro_rules! kebab_enum_text {
    ($ty:ty { $($variant:ident => $text:literal),+ $(,)? }) => {
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(match self { $(<$ty>::$variant => $text),+ })
            }
        }
        impl FromStr for $ty {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($text => Ok(<$ty>::$variant),)+
                    other => Err(Error::InvalidArgument(format!(
                        "unknown {}: {other}", stringify!($ty)
                    ))),
                }
            }
        }
    };
}

kebab_enum_text!(SelectionRule { Mpm => "mpm", Loss => "loss" });
kebab_enum_text!(CoefficientPath { Refit => "refit", Transform => "transform" });
kebab_enum_text!(LossWeights { Training => "training", Grid => "grid" });

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    pub omega_prior: OmegaPrior,
    pub rule: SelectionRule,
    pub prior_a: f64,
    pub prior_b: f64,
    pub max_order_cap: usize,
    pub coefficient_path: CoefficientPath,
    pub loss_weights: LossWeights,
    /// Predictor interval mapped onto `[0, 1]`; the observed range when unset.
    pub domain: Option<(f64, f64)>,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            omega_prior: OmegaPrior::default(),
            rule: SelectionRule::default(),
            prior_a: 1.0,
            prior_b: 1.0,
            max_order_cap: DEFAULT_ORDER_CAP,
            coefficient_path: CoefficientPath::default(),
            loss_weights: LossWeights::default(),
            domain: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Diagnostics {
    pub max_order: usize,
    pub log_bf: Vec<f64>,
    pub shrinkages: Vec<f64>,
    pub inclusion: Vec<f64>,
    pub shrunken_inclusion: Vec<f64>,
    pub loss_per_order: Vec<f64>,
    pub loss_equivalence: f64,
    /// Least-squares Legendre coefficients of the largest order, unshrunk.
    pub lambda_full_ls: Vec<f64>,
    /// Posterior-mean Legendre coefficients of the largest order.
    pub lambda_full: Vec<f64>,
    /// `‖Q‖_∞ ‖Q⁻¹‖_∞` when the transform path was used.
    pub transform_condition: Option<f64>,
    /// Monte Carlo standard errors of `log_bf` (binary responses).
    pub log_bf_std_error: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitResult {
    pub selected_order: usize,
    #[serde(rename = "posterior")]
    pub posterior_over_orders: Vec<f64>,
    /// Legendre coefficients of the selected model (linear predictor scale for
    /// binary responses).
    #[serde(rename = "lambda")]
    pub lambda_hat: Vec<f64>,
    #[serde(rename = "eta")]
    pub eta_hat: Vec<f64>,
    /// `ξ_{N*}` applied to the final coefficients.
    pub shrinkage: f64,
    pub timing_seconds: f64,
    pub rule: SelectionRule,
    pub omega_prior: OmegaPrior,
    pub coefficient_path: CoefficientPath,
    pub response: Response,
    pub scale: PredictorScale,
    pub diagnostics: Diagnostics,
    pub warnings: Vec<String>,
}

impl FitResult {
    /// Fitted mean at `x` on the original scale.
    pub fn predict(&self, x: f64) -> f64 {
        let eta = eval_bernstein(&self.eta_hat, self.scale.to_unit(x));
        match self.response {
            Response::Gaussian => eta,
            Response::Binary => norm_cdf(eta),
        }
    }

    pub fn predict_all(&self, x: &[f64]) -> Vec<f64> {
        x.iter().map(|&v| self.predict(v)).collect()
    }

    /// Fitted mean from the Legendre coefficients.
    pub fn predict_legendre(&self, x: f64) -> f64 {
        let eta = eval_legendre(&self.lambda_hat, self.scale.to_unit(x));
        match self.response {
            Response::Gaussian => eta,
            Response::Binary => norm_cdf(eta),
        }
    }

    /// Posterior-mean fit of the largest order, for overfitting comparisons.
    pub fn predict_full(&self, x: f64) -> f64 {
        eval_legendre(&self.diagnostics.lambda_full, self.scale.to_unit(x))
    }
}

/// Largest `j` with `p_j > ½`, or 0.
pub fn median_probability_order(mp: &ModelPosterior) -> usize {
    mp.inclusion.iter().rposition(|&p| p > 0.5).map_or(0, |i| i + 1)
}

/// Training quantities the model-averaging predictor needs.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignSummary {
    pub y_mean: f64,
    /// Least-squares coefficients `λ̂_N` of the largest model.
    pub lambda_full: Vec<f64>,
    /// Training means of `ψ_1..ψ_N`.
    pub column_means: Vec<f64>,
}

impl DesignSummary {
    pub fn from_design(design: &DesignMatrix, y: &[f64]) -> Result<Self> {
        let nls = NestedLeastSquares::new(&design.values, y)?;
        Ok(Self::from_nested(design, &nls))
    }

    fn from_nested(design: &DesignMatrix, nls: &NestedLeastSquares) -> Self {
        let n = design.n() as f64;
        let order = nls.order();
        Self {
            y_mean: nls.y_mean(),
            lambda_full: nls.coefficients(order),
            column_means: (1..=order).map(|j| design.column(j).iter().sum::<f64>() / n).collect(),
        }
    }
}

fn check_grid(u: &[f64]) -> Result<()> {
    match u.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        Some(&value) => Err(Error::Domain { value }),
        None => Ok(()),
    }
}

/// `ȳ* = ȳ + Σ_j p̃_j λ̂_{N,j} (ψ_j(u) − ψ̄_j)` on a grid of `[0, 1]`.
pub fn bma_predictor(mp: &ModelPosterior, stats: &DesignSummary, u_grid: &[f64]) -> Result<Vec<f64>> {
    check_grid(u_grid)?;
    let order = mp.max_order();
    if stats.lambda_full.len() != order + 1 || stats.column_means.len() != order {
        return Err(Error::Dimension {
            expected: order + 1,
            got: stats.lambda_full.len(),
        });
    }
    let mut row = vec![0.0; order + 1];
    Ok(u_grid
        .iter()
        .map(|&u| {
            legendre_into(u, &mut row);
            stats.y_mean
                + (1..=order)
                    .map(|j| mp.shrunken_inclusion[j - 1] * stats.lambda_full[j] * (row[j] - stats.column_means[j - 1]))
                    .sum::<f64>()
        })
        .collect())
}

/// Model-dependent part of the posterior predictive loss of order `k`:
/// `Σ_j (λ̂_j d_j)² (p̃_j − ξ_k γ_{k,j})²`. `dj[j-1]` weights term `j`.
pub fn predictive_loss(mp: &ModelPosterior, k: usize, dj: &[f64], lambda_hat_full: &[f64]) -> f64 {
    let xi = mp.shrinkage[k];
    weighted_loss(&mp.shrunken_inclusion, xi, k, dj, lambda_hat_full)
}

/// The same loss with `(p̃_j, ξ_k)` replaced by `(p_j, 1)`.
pub fn limiting_loss(mp: &ModelPosterior, k: usize, dj: &[f64], lambda_hat_full: &[f64]) -> f64 {
    weighted_loss(&mp.inclusion, 1.0, k, dj, lambda_hat_full)
}

fn weighted_loss(incl: &[f64], xi: f64, k: usize, dj: &[f64], lambda: &[f64]) -> f64 {
    incl.iter()
        .enumerate()
        .map(|(i, &p)| {
            let j = i + 1;
            let w = lambda[j] * dj[i];
            let gamma = if j <= k { xi } else { 0.0 };
            w * w * (p - gamma).powi(2)
        })
        .sum()
}

/// `max_k |L(γ_k) − L⁰(γ_k)|`.
pub fn loss_equivalence_diagnostic(mp: &ModelPosterior, dj: &[f64], lambda_hat_full: &[f64]) -> f64 {
    (0..=mp.max_order())
        .map(|k| (predictive_loss(mp, k, dj, lambda_hat_full) - limiting_loss(mp, k, dj, lambda_hat_full)).abs())
        .fold(0.0, f64::max)
}

/// Order minimizing the predictive loss, ties to the lower order.
pub fn loss_minimizing_order(mp: &ModelPosterior, dj: &[f64], lambda_hat_full: &[f64]) -> usize {
    argmin((0..=mp.max_order()).map(|k| predictive_loss(mp, k, dj, lambda_hat_full)))
}

pub(crate) fn argmin(values: impl Iterator<Item = f64>) -> usize {
    let mut best = (0, f64::INFINITY);
    for (k, v) in values.enumerate() {
        if v < best.1 {
            best = (k, v);
        }
    }
    best.0
}

/// `d_j` for `j = 1..=order`.
pub fn loss_weights(design: &DesignMatrix, order: usize, source: LossWeights) -> Vec<f64> {
    let mean_square = |col: &mut dyn Iterator<Item = f64>, m: usize| col.map(|v| v * v).sum::<f64>() / m as f64;
    match source {
        LossWeights::Training => (1..=order)
            .map(|j| mean_square(&mut design.column(j).iter().copied(), design.n()))
            .collect(),
        LossWeights::Grid => {
            let mut sums = vec![0.0; order + 1];
            let mut row = vec![0.0; order + 1];
            for i in 0..LOSS_GRID_POINTS {
                legendre_into(i as f64 / (LOSS_GRID_POINTS - 1) as f64, &mut row);
                for (s, v) in sums.iter_mut().zip(&row) {
                    *s += v * v;
                }
            }
            sums[1..].iter().map(|s| s / LOSS_GRID_POINTS as f64).collect()
        }
    }
}

/// Check inputs shared by the Gaussian and binary paths and map `x` to `[0, 1]`.
pub(crate) fn prepare_inputs(x: &[f64], y: &[f64], domain: Option<(f64, f64)>) -> Result<(PredictorScale, Vec<f64>)> {
    if x.len() != y.len() {
        return Err(Error::Dimension {
            expected: x.len(),
            got: y.len(),
        });
    }
    if x.len() < MIN_OBSERVATIONS {
        return Err(Error::InvalidArgument(format!(
            "need at least {MIN_OBSERVATIONS} observations, got {}",
            x.len()
        )));
    }
    if let Some(index) = y.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    let scale = match domain {
        Some((a, b)) => PredictorScale::new(a, b)?,
        None => PredictorScale::from_data(x)?,
    };
    let u = scale.to_unit_all(x);
    Ok((scale, u))
}

/// Largest-order Legendre design whose centered columns are linearly
/// independent, with its nested least-squares sweep.
pub(crate) fn nested_design(
    u: &[f64],
    y: &[f64],
    order: usize,
    warnings: &mut Vec<String>,
) -> Result<(DesignMatrix, NestedLeastSquares)> {
    let mut order = order;
    loop {
        let design = build_design(u, Basis::Legendre, order)?;
        match NestedLeastSquares::new(&design.values, y) {
            Ok(nls) => return Ok((design, nls)),
            Err(Error::RankDeficient { column }) => {
                let msg = format!(
                    "Legendre column {column} is collinear; largest order reduced to {}",
                    column - 1
                );
                log::warn!("{msg}");
                warnings.push(msg);
                order = column - 1;
            }
            Err(e) => return Err(e),
        }
    }
}

/// Posterior mean of the order-`k` fit in Legendre form:
/// `λ̃_0 = ȳ + ξ(λ̂_0 − ȳ)`, `λ̃_j = ξ λ̂_j`.
fn shrink_legendre(ls: &[f64], y_mean: f64, xi: f64) -> Vec<f64> {
    let mut out: Vec<f64> = ls.iter().map(|v| xi * v).collect();
    out[0] = y_mean + xi * (ls[0] - y_mean);
    out
}

/// Select the order of a Bernstein polynomial regression of `y` on `x`.
pub fn fit(x: &[f64], y: &[f64], config: &FitConfig) -> Result<FitResult> {
    let start = Instant::now();
    config.omega_prior.validate()?;
    let (scale, u) = prepare_inputs(x, y, config.domain)?;
    let n = u.len();
    let mut warnings = Vec::new();

    let (design, nls) = nested_design(&u, y, max_order(n, config.max_order_cap.max(1)), &mut warnings)?;
    let (stats, guard) = nested_stats(&nls);
    warnings.extend(guard);
    let prior = model_prior(design.order, config.prior_a, config.prior_b)?;
    let mp = posterior_from_stats(&stats, &prior, &config.omega_prior)?;
    let top = mp.max_order();
    if top == 0 {
        warnings.push(format!("n = {n} leaves only the intercept-only model"));
    }

    let y_mean = nls.y_mean();
    let lambda_full_ls = nls.coefficients(top);
    let dj = loss_weights(&design, top, config.loss_weights);
    let loss_per_order: Vec<f64> = (0..=top)
        .map(|k| predictive_loss(&mp, k, &dj, &lambda_full_ls))
        .collect();
    let selected = match config.rule {
        SelectionRule::Mpm => median_probability_order(&mp),
        SelectionRule::Loss => argmin(loss_per_order.iter().copied()),
    };
    let xi = mp.shrinkage[selected];
    let lambda_hat = shrink_legendre(&nls.coefficients(selected), y_mean, xi);

    let mut path = config.coefficient_path;
    let mut transform_condition = None;
    let mut eta_hat = None;
    if path == CoefficientPath::Refit {
        let bern = build_design(&u, Basis::Bernstein, selected)?;
        match least_squares(&bern.values, y) {
            Some(eta) => eta_hat = Some(eta.iter().map(|e| y_mean + xi * (e - y_mean)).collect()),
            None => {
                let msg = format!("Bernstein refit at order {selected} is singular; using the transform");
                log::warn!("{msg}");
                warnings.push(msg);
                path = CoefficientPath::Transform;
            }
        }
    }
    let eta_hat = match eta_hat {
        Some(e) => e,
        None => {
            let tp = build_transform(selected)?;
            transform_condition = Some(condition_diagnostic(&tp));
            legendre_to_bernstein(&lambda_hat, &tp)?
        }
    };

    let diagnostics = Diagnostics {
        max_order: top,
        log_bf: mp.log_bf.clone(),
        shrinkages: mp.shrinkage.clone(),
        inclusion: mp.inclusion.clone(),
        shrunken_inclusion: mp.shrunken_inclusion.clone(),
        loss_equivalence: loss_equivalence_diagnostic(&mp, &dj, &lambda_full_ls),
        loss_per_order,
        lambda_full: shrink_legendre(&lambda_full_ls, y_mean, mp.shrinkage[top]),
        lambda_full_ls,
        transform_condition,
        log_bf_std_error: None,
    };
    for w in &warnings {
        log::warn!("{w}");
    }
    Ok(FitResult {
        selected_order: selected,
        posterior_over_orders: mp.posterior,
        lambda_hat,
        eta_hat,
        shrinkage: xi,
        timing_seconds: start.elapsed().as_secs_f64(),
        rule: config.rule,
        omega_prior: config.omega_prior,
        coefficient_path: path,
        response: Response::Gaussian,
        scale,
        diagnostics,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model_space::ModelPrior;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn hand_posterior(post: &[f64], xi: &[f64]) -> ModelPosterior {
        let m = post.len();
        let prior = ModelPrior {
            a: 1.0,
            b: 1.0,
            probs: vec![1.0 / m as f64; m],
        };
        ModelPosterior::with_posterior(vec![0.0; m], prior, post.to_vec(), xi.to_vec())
    }

    #[test]
    fn mpm_examples() {
        let mp = hand_posterior(&[0.1, 0.6, 0.2, 0.1], &[1.0; 4]);
        for (a, b) in mp.inclusion.iter().zip([0.9, 0.3, 0.1]) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(median_probability_order(&mp), 1);
        assert_eq!(
            median_probability_order(&hand_posterior(&[1.0, 0.0, 0.0], &[1.0; 3])),
            0
        );
        let tie = hand_posterior(&[0.4, 0.1, 0.5], &[1.0; 3]);
        assert_eq!(tie.inclusion, vec![0.6, 0.5]);
        assert_eq!(median_probability_order(&tie), 1);
    }

    fn summary() -> DesignSummary {
        DesignSummary {
            y_mean: 0.7,
            lambda_full: vec![0.5, 1.5, -2.0],
            column_means: vec![0.1, -0.05],
        }
    }

    #[test]
    fn bma_examples() {
        let grid = [0.0, 0.3, 0.8, 1.0];
        let flat = bma_predictor(&hand_posterior(&[1.0, 0.0, 0.0], &[1.0, 0.9, 0.8]), &summary(), &grid).unwrap();
        assert!(flat.iter().all(|&v| v == 0.7));

        // direct sum over models: Σ_k p_k ξ_k (prefix-k contribution)
        let post = [0.2, 0.5, 0.3];
        let xi = [0.99, 0.9, 0.8];
        let mp = hand_posterior(&post, &xi);
        let s = summary();
        let got = bma_predictor(&mp, &s, &grid).unwrap();
        for (g, &u) in got.iter().zip(&grid) {
            let psi = crate::basis::legendre_row(u, 2).unwrap();
            let mut expect = s.y_mean;
            for k in 0..3 {
                for (j, p) in psi.iter().enumerate().take(k + 1).skip(1) {
                    expect += post[k] * xi[k] * s.lambda_full[j] * (p - s.column_means[j - 1]);
                }
            }
            assert!((g - expect).abs() < 1e-12);
        }
        assert!(bma_predictor(&mp, &s, &[1.5]).is_err());
    }

    #[test]
    fn bma_point_mass_equals_least_squares() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let u: Vec<f64> = (0..60).map(|_| rng.random::<f64>()).collect();
        let y: Vec<f64> = u.iter().map(|v| v * v + rng.random::<f64>()).collect();
        let d = build_design(&u, Basis::Legendre, 3).unwrap();
        let s = DesignSummary::from_design(&d, &y).unwrap();
        let mp = hand_posterior(&[0.0, 0.0, 0.0, 1.0], &[1.0; 4]);
        let grid = [0.1, 0.5, 0.93];
        let got = bma_predictor(&mp, &s, &grid).unwrap();
        for (g, &v) in got.iter().zip(&grid) {
            assert!((g - eval_legendre(&s.lambda_full, v)).abs() < 1e-12);
        }
    }

    #[test]
    fn loss_examples() {
        let lam = [0.3, 1.0, -2.0];
        let dj = [0.5, 0.25];
        let point = hand_posterior(&[0.0, 1.0, 0.0], &[1.0; 3]);
        assert_eq!(predictive_loss(&point, 1, &dj, &lam), 0.0);
        let any = hand_posterior(&[0.2, 0.5, 0.3], &[0.9, 0.8, 0.7]);
        for k in 0..3 {
            assert_eq!(predictive_loss(&any, k, &dj, &[1.0, 0.0, 0.0]), 0.0);
        }
        // p̃ = (0.5·0.8 + 0.3·0.7, 0.3·0.7) = (0.61, 0.21)
        let l1 = predictive_loss(&any, 1, &dj, &lam);
        let expect = (1.0f64 * 0.5).powi(2) * (0.61f64 - 0.8).powi(2) + (2.0f64 * 0.25).powi(2) * 0.21f64.powi(2);
        assert!((l1 - expect).abs() < 1e-12);
        let l2 = predictive_loss(&any, 2, &dj, &lam);
        let expect2 = 0.25 * (0.61f64 - 0.7).powi(2) + 0.25 * (0.21f64 - 0.7).powi(2);
        assert!((l2 - expect2).abs() < 1e-12);
    }

    #[test]
    fn diagnostic_vanishes_without_shrinkage() {
        let mp = hand_posterior(&[0.2, 0.5, 0.3], &[1.0; 3]);
        assert_eq!(loss_equivalence_diagnostic(&mp, &[0.4, 0.2], &[0.0, 1.0, 3.0]), 0.0);
        let single = hand_posterior(&[1.0], &[0.8]);
        assert_eq!(loss_equivalence_diagnostic(&single, &[], &[1.0]), 0.0);
    }

    proptest! {
        #[test]
        fn mpm_minimizes_limiting_loss(raw in prop::collection::vec(0.0f64..1.0, 1..12), seed in 0u64..1000) {
            let total: f64 = raw.iter().sum();
            prop_assume!(total > 0.0);
            let post: Vec<f64> = raw.iter().map(|v| v / total).collect();
            let mp = hand_posterior(&post, &vec![1.0; post.len()]);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = post.len() - 1;
            let dj: Vec<f64> = (0..n).map(|_| 0.1 + rng.random::<f64>()).collect();
            let lam: Vec<f64> = (0..=n).map(|_| 0.1 + rng.random::<f64>()).collect();
            let best = (0..=n)
                .map(|k| limiting_loss(&mp, k, &dj, &lam))
                .fold(f64::INFINITY, f64::min);
            let at_mpm = limiting_loss(&mp, median_probability_order(&mp), &dj, &lam);
            prop_assert!(at_mpm <= best + 1e-12);
        }
    }

    fn sample(seed: u64, n: usize, mu: impl Fn(f64) -> f64, sd: f64) -> (Vec<f64>, Vec<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let y = x
            .iter()
            .map(|&v| mu(v) + sd * rng.sample::<f64, _>(StandardNormal))
            .collect();
        (x, y)
    }

    #[test]
    fn constant_signal_selects_intercept() {
        let (x, y) = sample(1, 120, |_| 4.0, 1e-6);
        let r = fit(&x, &y, &FitConfig::default()).unwrap();
        assert_eq!(r.selected_order, 0);
        assert_eq!(r.eta_hat.len(), 1);
        assert!((r.predict(0.3) - 4.0).abs() < 1e-5);
        assert!((r.posterior_over_orders.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn scale_invariance_and_determinism() {
        let (x, y) = sample(9, 150, |v| (4.0 * v).sin(), 0.4);
        let y10: Vec<f64> = y.iter().map(|v| 10.0 * v).collect();
        let cfg = FitConfig::default();
        let a = fit(&x, &y, &cfg).unwrap();
        let b = fit(&x, &y10, &cfg).unwrap();
        assert_eq!(a.selected_order, b.selected_order);
        let again = fit(&x, &y, &cfg).unwrap();
        assert_eq!(a.eta_hat, again.eta_hat);
        assert_eq!(a.posterior_over_orders, again.posterior_over_orders);
    }

    #[test]
    fn coefficient_paths_agree() {
        let poly5 = |x: f64| 5.0 * x * (5.0 * x - 0.2) * (0.4 * x - 1.8) * (3.0 * x - 1.8) * (2.0 * x - 1.8);
        let (x, y) = sample(21, 500, poly5, 0.5);
        let refit = fit(&x, &y, &FitConfig::default()).unwrap();
        let tr = fit(
            &x,
            &y,
            &FitConfig {
                coefficient_path: CoefficientPath::Transform,
                ..FitConfig::default()
            },
        )
        .unwrap();
        assert!(refit.selected_order <= 10);
        assert_eq!(tr.coefficient_path, CoefficientPath::Transform);
        let cond = tr.diagnostics.transform_condition.unwrap();
        let mut worst: f64 = 0.0;
        let mut leg_gap: f64 = 0.0;
        for i in 0..2001 {
            let v = refit.scale.from_unit(i as f64 / 2000.0);
            worst = worst.max((refit.predict(v) - tr.predict(v)).abs());
            leg_gap = leg_gap.max((tr.predict(v) - tr.predict_legendre(v)).abs());
        }
        assert!(worst < 5e-3, "{worst}");
        assert!(leg_gap < 1e-6 * cond, "{leg_gap}");
    }

    #[test]
    fn loss_rule_and_grid_weights_run() {
        let (x, y) = sample(4, 200, |v| 2.0 * v - 1.0, 0.2);
        for lw in [LossWeights::Training, LossWeights::Grid] {
            let r = fit(
                &x,
                &y,
                &FitConfig {
                    rule: SelectionRule::Loss,
                    loss_weights: lw,
                    ..FitConfig::default()
                },
            )
            .unwrap();
            assert_eq!(r.selected_order, argmin(r.diagnostics.loss_per_order.iter().copied()));
            assert!(r.selected_order >= 1);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(
            fit(&[0.1, 0.2], &[1.0, 2.0], &FitConfig::default()),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            fit(&[1.0; 10], &[1.0; 10], &FitConfig::default()),
            Err(Error::Degenerate(_))
        ));
        let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let mut y = vec![1.0; 10];
        y[3] = f64::NAN;
        assert!(matches!(
            fit(&x, &y, &FitConfig::default()),
            Err(Error::NonFinite { index: 3 })
        ));
    }

    #[test]
    fn few_distinct_inputs_reduce_order() {
        let x: Vec<f64> = (0..60).map(|i| (i % 3) as f64).collect();
        let y: Vec<f64> = x
            .iter()
            .enumerate()
            .map(|(i, v)| v * v + 0.01 * (i as f64).sin())
            .collect();
        let r = fit(&x, &y, &FitConfig::default()).unwrap();
        assert!(r.diagnostics.max_order <= 2);
        assert!(!r.warnings.is_empty());
    }

    #[test]
    fn text_round_trip() {
        for r in [SelectionRule::Mpm, SelectionRule::Loss] {
            assert_eq!(r.to_string().parse::<SelectionRule>().unwrap(), r);
        }
        assert!("bogus".parse::<CoefficientPath>().is_err());
    }
}
