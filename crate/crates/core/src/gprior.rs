//! Bayes factors and shrinkage under scaled mixtures of g-priors.
//!
//! With `t = ω (q_k + 1)` the Bayes factor of the order-`k` model against the
//! intercept-only model is
//!
//! ```text
//! BF_k = ∫ (n + t)^{(n − q_k)/2} t^{(q_k − q_0)/2} (n(1 − R²_k) + t)^{−(n − q_0)/2} π(ω) dω
//! ```
//!
//! and the shrinkage `ξ_k` is the posterior mean of `n / (n + t)` under the
//! normalized integrand. Both share quadrature nodes. Mixing densities with
//! support `(0, ∞)` are integrated in `s = ln ω`; the intrinsic `Beta(½, ½)`
//! prior is integrated in `θ` with `ω = sin²θ`, which removes both endpoint
//! singularities.

use crate::basis::{Basis, DesignMatrix};
use crate::error::{Error, Result};
use crate::linalg::NestedLeastSquares;
use crate::model_space::ModelPrior;
use crate::quadrature::{integrate, QuadConfig};
use libm::lgamma;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

/// Number of coefficients in the base (intercept-only) model.
pub const BASE_COEFFICIENTS: usize = 1;

/// Models with `1 − R² ` below this are treated as saturated.
pub const SATURATION_TOL: f64 = 1e-12;

/// Mixing prior on `ω = 1/g`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum OmegaPrior {
    /// `ω ~ Beta(½, ½)`.
    #[default]
    Intrinsic,
    /// `ω ~ Gamma(ν/2, rate ρ/2)`.
    ZellnerSiow { nu: f64, rho: f64 },
    /// `ω | ρ ~ Gamma(ν/2, rate ρ/2)`, `ρ ~ Gamma(a/2, rate b/2)`.
    HyperG { nu: f64, a: f64, b: f64 },
}

impl OmegaPrior {
    pub fn zellner_siow() -> Self {
        OmegaPrior::ZellnerSiow { nu: 1.0, rho: 1.0 }
    }

    pub fn hyper_g() -> Self {
        OmegaPrior::HyperG {
            nu: 1.0,
            a: 2.0,
            b: 1.0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            OmegaPrior::Intrinsic => "intrinsic",
            OmegaPrior::ZellnerSiow { .. } => "zellner-siow",
            OmegaPrior::HyperG { .. } => "hyper-g",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            OmegaPrior::Intrinsic => true,
            OmegaPrior::ZellnerSiow { nu, rho } => nu > 0.0 && rho > 0.0,
            OmegaPrior::HyperG { nu, a, b } => nu > 0.0 && a > 0.0 && b > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "omega prior hyperparameters must be positive: {self:?}"
            )))
        }
    }

    /// Log density of `ω` on `(0, ∞)`. For hyper-g the hyperprior on `ρ` is
    /// integrated out analytically, leaving `ω/b ~ BetaPrime(ν/2, a/2)`.
    pub fn log_density(&self, omega: f64) -> f64 {
        match *self {
            OmegaPrior::Intrinsic => {
                if omega <= 0.0 || omega >= 1.0 {
                    f64::NEG_INFINITY
                } else {
                    -PI.ln() - 0.5 * omega.ln() - 0.5 * (-omega).ln_1p()
                }
            }
            OmegaPrior::ZellnerSiow { nu, rho } => {
                let shape = 0.5 * nu;
                let rate = 0.5 * rho;
                shape * rate.ln() - lgamma(shape) + (shape - 1.0) * omega.ln() - rate * omega
            }
            OmegaPrior::HyperG { nu, a, b } => {
                let h = 0.5 * nu;
                let m = 0.5 * a;
                lgamma(h + m) - lgamma(h) - lgamma(m) + m * b.ln() + (h - 1.0) * omega.ln() - (h + m) * (omega + b).ln()
            }
        }
    }
}

impl fmt::Display for OmegaPrior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Sufficient statistics of the order-`k` fit entering its Bayes factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelFitStats {
    pub r2: f64,
    /// `1 − R²`, kept separately to preserve precision near saturation.
    pub one_minus_r2: f64,
    pub q_k: usize,
    pub q_0: usize,
    pub n: usize,
    pub saturated: bool,
}

impl ModelFitStats {
    pub fn new(n: usize, q_k: usize, r2: f64) -> Self {
        Self::with_residual(n, q_k, r2, 1.0 - r2)
    }

    fn with_residual(n: usize, q_k: usize, r2: f64, one_minus_r2: f64) -> Self {
        Self {
            r2,
            one_minus_r2,
            q_k,
            q_0: BASE_COEFFICIENTS,
            n,
            saturated: one_minus_r2 < SATURATION_TOL,
        }
    }

    pub fn order(&self) -> usize {
        self.q_k - 1
    }

    pub fn from_nested(nls: &NestedLeastSquares, k: usize) -> Self {
        Self::with_residual(nls.n(), k + 1, nls.r2(k), nls.one_minus_r2(k))
    }
}

fn require_legendre(design: &DesignMatrix, k: usize) -> Result<()> {
    if design.basis != Basis::Legendre {
        return Err(Error::InvalidArgument("Bayes factors need the Legendre design".into()));
    }
    if design.order < k {
        return Err(Error::InvalidArgument(format!(
            "design order {} is below requested order {k}",
            design.order
        )));
    }
    Ok(())
}

/// `R²_k` of the order-`k` Legendre model on the centered response.
pub fn fit_stats(y: &[f64], design: &DesignMatrix, k: usize) -> Result<ModelFitStats> {
    require_legendre(design, k)?;
    let n = design.n();
    if n <= k + 2 {
        return Err(Error::InvalidArgument(format!(
            "order {k} needs more than {} observations, got {n}",
            k + 2
        )));
    }
    let sub = design.values.columns(0, k + 1).into_owned();
    let nls = NestedLeastSquares::new(&sub, y)?;
    Ok(ModelFitStats::from_nested(&nls, k))
}

/// Log Bayes factor and shrinkage evaluated together.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderEvidence {
    pub log_bf: f64,
    pub shrinkage: f64,
}

struct Kernel {
    n: f64,
    scale: f64, // q_k + 1
    a_exp: f64, // (n − q_k)/2
    b_exp: f64, // (q_k − q_0)/2
    c_exp: f64, // (n − q_0)/2
    n_resid: f64,
}

impl Kernel {
    fn new(stats: &ModelFitStats) -> Self {
        let n = stats.n as f64;
        let qk = stats.q_k as f64;
        let q0 = stats.q_0 as f64;
        Self {
            n,
            scale: qk + 1.0,
            a_exp: 0.5 * (n - qk),
            b_exp: 0.5 * (qk - q0),
            c_exp: 0.5 * (n - q0),
            n_resid: n * stats.one_minus_r2,
        }
    }

    fn log_value(&self, omega: f64) -> f64 {
        let t = omega * self.scale;
        let mut v = self.a_exp * (self.n + t).ln() - self.c_exp * (self.n_resid + t).ln();
        if self.b_exp != 0.0 {
            v += self.b_exp * t.ln();
        }
        v
    }

    fn shrink(&self, omega: f64) -> f64 {
        self.n / (self.n + omega * self.scale)
    }
}

fn check_stats(stats: &ModelFitStats) -> Result<()> {
    if stats.q_k < stats.q_0 || stats.n <= stats.q_k {
        return Err(Error::InvalidArgument(format!(
            "invalid model size q_k = {} for n = {}",
            stats.q_k, stats.n
        )));
    }
    if !(0.0..=1.0).contains(&stats.one_minus_r2) {
        return Err(Error::InvalidArgument(format!("R^2 = {} outside [0, 1]", stats.r2)));
    }
    if stats.q_k > stats.q_0 && stats.one_minus_r2 < SATURATION_TOL {
        return Err(Error::Saturated {
            order: stats.order(),
            one_minus_r2: stats.one_minus_r2,
        });
    }
    Ok(())
}

const QUAD: QuadConfig = QuadConfig {
    rel_tol: 1e-10,
    abs_tol: 0.0,
    max_intervals: 400,
};

/// Returns `(log ∫ g, ∫ g·n/(n+t) / ∫ g)` for a log-integrand on `[lo, hi]`.
fn log_integral_with_shrinkage<L, S>(log_g: L, shrink: S, lo: f64, hi: f64) -> Result<(f64, f64)>
where
    L: Fn(f64) -> f64,
    S: Fn(f64) -> f64,
{
    // Coarse scan for the peak and the region where mass is non-negligible.
    const SCAN: usize = 200;
    let step = (hi - lo) / SCAN as f64;
    let grid: Vec<f64> = (0..=SCAN).map(|i| log_g(lo + step * i as f64)).collect();
    let peak = grid.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !peak.is_finite() {
        return Err(Error::Quadrature {
            evaluations: SCAN + 1,
            trace: format!("integrand peak is {peak} on [{lo}, {hi}]"),
        });
    }
    let cutoff = peak - 80.0;
    let first = grid.iter().position(|&v| v > cutoff).unwrap_or(0);
    let last = grid.iter().rposition(|&v| v > cutoff).unwrap_or(SCAN);
    let a = lo + step * first.saturating_sub(1) as f64;
    let b = lo + step * (last + 1).min(SCAN) as f64;
    let r = integrate(
        |s| {
            let v = (log_g(s) - peak).exp();
            [v, v * shrink(s)]
        },
        a,
        b,
        QUAD,
    )?;
    Ok((r.value[0].ln() + peak, r.value[1] / r.value[0]))
}

/// Log Bayes factor and shrinkage of one model.
pub fn order_evidence(stats: &ModelFitStats, prior: &OmegaPrior) -> Result<OrderEvidence> {
    prior.validate()?;
    check_stats(stats)?;
    let kernel = Kernel::new(stats);
    let base = stats.q_k == stats.q_0;
    let (log_bf, shrinkage) = match *prior {
        OmegaPrior::Intrinsic => {
            // ω = sin²θ, π(ω) dω = (2/π) dθ
            let log_norm = (2.0 / PI).ln();
            log_integral_with_shrinkage(
                |th| {
                    let w = th.sin().powi(2);
                    if w <= 0.0 {
                        if base {
                            log_norm
                        } else {
                            f64::NEG_INFINITY
                        }
                    } else {
                        kernel.log_value(w) + log_norm
                    }
                },
                |th| kernel.shrink(th.sin().powi(2)),
                0.0,
                FRAC_PI_2,
            )?
        }
        _ => log_integral_with_shrinkage(
            |s| {
                let w = s.exp();
                kernel.log_value(w) + prior.log_density(w) + s
            },
            |s| kernel.shrink(s.exp()),
            -100.0,
            100.0,
        )?,
    };
    Ok(OrderEvidence {
        // the base model's integrand is the prior itself
        log_bf: if base { 0.0 } else { log_bf },
        shrinkage,
    })
}

pub fn log_bayes_factor(stats: &ModelFitStats, prior: &OmegaPrior) -> Result<f64> {
    if stats.q_k == stats.q_0 {
        return Ok(0.0);
    }
    order_evidence(stats, prior).map(|e| e.log_bf)
}

pub fn shrinkage(stats: &ModelFitStats, prior: &OmegaPrior) -> Result<f64> {
    order_evidence(stats, prior).map(|e| e.shrinkage)
}

/// Posterior over the nested model space.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelPosterior {
    /// `ln BF_{γ_k, γ_0}`, `k = 0..=N`.
    pub log_bf: Vec<f64>,
    pub prior: ModelPrior,
    /// `p(γ_k | y)`.
    pub posterior: Vec<f64>,
    /// `p_j`, `j = 1..=N` (index 0 holds term 1).
    pub inclusion: Vec<f64>,
    /// `p̃_j = Σ_k ξ_k p(γ_k|y) γ_{k,j}`.
    pub shrunken_inclusion: Vec<f64>,
    /// `ξ_k`, `k = 0..=N`.
    pub shrinkage: Vec<f64>,
    pub warnings: Vec<String>,
}

impl ModelPosterior {
    /// Assemble from per-order log Bayes factors and shrinkages.
    pub fn from_parts(log_bf: Vec<f64>, shrinkage: Vec<f64>, prior: ModelPrior) -> Result<Self> {
        let m = log_bf.len();
        if m == 0 {
            return Err(Error::Empty);
        }
        for got in [shrinkage.len(), prior.probs.len()] {
            if got != m {
                return Err(Error::Dimension { expected: m, got });
            }
        }
        let log_post: Vec<f64> = log_bf.iter().zip(&prior.probs).map(|(b, p)| b + p.ln()).collect();
        let mx = log_post.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let weights: Vec<f64> = log_post.iter().map(|v| (v - mx).exp()).collect();
        let total: f64 = weights.iter().sum();
        let posterior: Vec<f64> = weights.iter().map(|w| w / total).collect();
        Ok(Self::with_posterior(log_bf, prior, posterior, shrinkage))
    }

    /// Build from a posterior vector directly (used for hand-set scenarios).
    pub fn with_posterior(log_bf: Vec<f64>, prior: ModelPrior, posterior: Vec<f64>, shrinkage: Vec<f64>) -> Self {
        let m = posterior.len();
        let mut inclusion = vec![0.0; m.saturating_sub(1)];
        let mut shrunken = vec![0.0; m.saturating_sub(1)];
        let mut tail = 0.0;
        let mut tail_shrunk = 0.0;
        for k in (1..m).rev() {
            tail += posterior[k];
            tail_shrunk += shrinkage[k] * posterior[k];
            inclusion[k - 1] = tail;
            shrunken[k - 1] = tail_shrunk;
        }
        Self {
            log_bf,
            prior,
            posterior,
            inclusion,
            shrunken_inclusion: shrunken,
            shrinkage,
            warnings: Vec::new(),
        }
    }

    pub fn max_order(&self) -> usize {
        self.posterior.len() - 1
    }

    /// Order with the highest posterior probability; ties go to the lower order.
    pub fn mode(&self) -> usize {
        let mut best = 0;
        for (k, &p) in self.posterior.iter().enumerate() {
            if p > self.posterior[best] {
                best = k;
            }
        }
        best
    }
}

/// Per-order statistics from one nested least-squares sweep, with the
/// saturated-model guard applied.
pub fn nested_stats(nls: &NestedLeastSquares) -> (Vec<ModelFitStats>, Vec<String>) {
    let n = nls.n();
    let mut warnings = Vec::new();
    let mut out = Vec::new();
    for k in 0..=nls.order() {
        let q_k = k + 1;
        if q_k + BASE_COEFFICIENTS >= n {
            warnings.push(format!(
                "orders {k}..={} excluded: q_k >= n - q_0 for n = {n}",
                nls.order()
            ));
            break;
        }
        out.push(ModelFitStats::from_nested(nls, k));
    }
    (out, warnings)
}

/// Posterior from precomputed per-order statistics.
pub fn posterior_from_stats(stats: &[ModelFitStats], prior: &ModelPrior, omega: &OmegaPrior) -> Result<ModelPosterior> {
    if stats.is_empty() {
        return Err(Error::Empty);
    }
    let prior = if stats.len() == prior.probs.len() {
        prior.clone()
    } else {
        prior.truncated(stats.len() - 1)?
    };
    let evidence: Vec<OrderEvidence> = stats
        .par_iter()
        .map(|s| order_evidence(s, omega))
        .collect::<Result<_>>()?;
    ModelPosterior::from_parts(
        evidence.iter().map(|e| e.log_bf).collect(),
        evidence.iter().map(|e| e.shrinkage).collect(),
        prior,
    )
}

/// `p(γ_k | y) ∝ BF_k π(γ_k)` over the orders of a Legendre design.
pub fn model_posterior(
    y: &[f64],
    design: &DesignMatrix,
    prior: &ModelPrior,
    omega: &OmegaPrior,
) -> Result<ModelPosterior> {
    require_legendre(design, 0)?;
    if design.order != prior.max_order() {
        return Err(Error::Dimension {
            expected: prior.max_order() + 1,
            got: design.order + 1,
        });
    }
    let nls = NestedLeastSquares::new(&design.values, y)?;
    let (stats, warnings) = nested_stats(&nls);
    let mut post = posterior_from_stats(&stats, prior, omega)?;
    post.warnings = warnings;
    for w in &post.warnings {
        log::warn!("{w}");
    }
    Ok(post)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::build_design;
    use crate::model_space::model_prior;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    // Fixed-grid trapezoid oracle written directly from the Bayes factor
    // display, independent of the adaptive path.
    fn oracle(stats: &ModelFitStats, prior: &OmegaPrior) -> (f64, f64) {
        let n = stats.n as f64;
        let qk = stats.q_k as f64;
        let q0 = stats.q_0 as f64;
        let a = stats.one_minus_r2;
        let integrand = |w: f64| {
            let t = w * (qk + 1.0);
            let denom = n + t / a;
            let log_k =
                -0.5 * (n - q0) * a.ln() + 0.5 * (n - qk) * ((n + t) / denom).ln() + 0.5 * (qk - q0) * (t / denom).ln();
            (log_k, n / (n + t))
        };
        let m = 1_000_000;
        let (mut num, mut den) = (0.0, 0.0);
        match prior {
            OmegaPrior::Intrinsic => {
                let h = FRAC_PI_2 / m as f64;
                for i in 1..=m {
                    let th = h * i as f64;
                    let (lk, s) = integrand(th.sin().powi(2));
                    let wt = if i == m { 0.5 } else { 1.0 };
                    let v = wt * lk.exp() * 2.0 / PI;
                    den += v;
                    num += v * s;
                }
                den *= h;
                num *= h;
            }
            _ => {
                let (lo, hi) = (-60.0, 60.0);
                let h = (hi - lo) / m as f64;
                for i in 0..=m {
                    let s = lo + h * i as f64;
                    let w = f64::exp(s);
                    let (lk, sh) = integrand(w);
                    let wt = if i == 0 || i == m { 0.5 } else { 1.0 };
                    let v = wt * (lk + prior.log_density(w) + s).exp();
                    den += v;
                    num += v * sh;
                }
                den *= h;
                num *= h;
            }
        }
        (den.ln(), num / den)
    }

    #[test]
    fn base_model_is_exactly_one() {
        let s = ModelFitStats::new(50, 1, 0.0);
        for p in [OmegaPrior::Intrinsic, OmegaPrior::zellner_siow(), OmegaPrior::hyper_g()] {
            assert_eq!(log_bayes_factor(&s, &p).unwrap(), 0.0);
        }
    }

    #[test]
    fn matches_trapezoid_oracle() {
        let s = ModelFitStats::new(100, 3, 0.5);
        let mut values = Vec::new();
        for p in [OmegaPrior::Intrinsic, OmegaPrior::zellner_siow(), OmegaPrior::hyper_g()] {
            let e = order_evidence(&s, &p).unwrap();
            let (lbf, xi) = oracle(&s, &p);
            assert!(((e.log_bf.exp() - lbf.exp()) / lbf.exp()).abs() < 1e-6, "{p}");
            assert!((e.shrinkage - xi).abs() < 1e-6, "{p}");
            values.push(e.log_bf);
        }
        assert!(values.iter().all(|v| v.is_finite()));
        assert!((values[1] - values[2]).abs() > 1e-6);
    }

    #[test]
    fn hyper_g_marginal_matches_nested_quadrature() {
        // ∫ Gamma(ω; ν/2, ρ/2) Gamma(ρ; a/2, b/2) dρ by brute force in ln ρ.
        let (nu, a, b): (f64, f64, f64) = (1.0, 2.0, 1.0);
        let prior = OmegaPrior::hyper_g();
        for &w in &[0.01f64, 0.3, 1.0, 7.5, 120.0] {
            let m = 200_000;
            let (lo, hi) = (-40.0f64, 25.0f64);
            let h = (hi - lo) / m as f64;
            let mut acc = 0.0;
            for i in 0..=m {
                let r: f64 = (lo + h * i as f64).exp();
                let g1 = 0.5 * nu * (0.5 * r).ln() - lgamma(0.5 * nu) + (0.5 * nu - 1.0) * w.ln() - 0.5 * r * w;
                let g2 = 0.5 * a * (0.5 * b).ln() - lgamma(0.5 * a) + (0.5 * a - 1.0) * r.ln() - 0.5 * b * r;
                let wt = if i == 0 || i == m { 0.5 } else { 1.0 };
                acc += wt * (g1 + g2).exp() * r;
            }
            let numeric = (acc * h).ln();
            assert!((numeric - prior.log_density(w)).abs() < 1e-7, "ω = {w}");
        }
    }

    #[test]
    fn saturated_model_is_rejected() {
        let s = ModelFitStats::new(30, 2, 1.0);
        assert!(s.saturated);
        assert!(matches!(
            log_bayes_factor(&s, &OmegaPrior::Intrinsic),
            Err(Error::Saturated { order: 1, .. })
        ));
    }

    #[test]
    fn fit_stats_examples() {
        let u: Vec<f64> = (0..40).map(|i| i as f64 / 39.0).collect();
        let d = build_design(&u, Basis::Legendre, 4).unwrap();
        let flat = vec![3.0; 40];
        for k in 0..=4 {
            assert_eq!(fit_stats(&flat, &d, k).unwrap().r2, 0.0);
        }
        let psi1: Vec<f64> = u.iter().map(|v| 2.0 * v - 1.0).collect();
        let s = fit_stats(&psi1, &d, 1).unwrap();
        assert!(s.one_minus_r2 < 1e-20 && s.saturated);
        let bern = build_design(&u, Basis::Bernstein, 4).unwrap();
        assert!(fit_stats(&flat, &bern, 1).is_err());
    }

    #[test]
    fn shrinkage_limits() {
        let s = ModelFitStats::new(1_000_000, 3, 0.3);
        let xi = shrinkage(&s, &OmegaPrior::zellner_siow()).unwrap();
        assert!((xi - 1.0).abs() < 1e-3 && xi <= 1.0);
    }

    fn noisy_data(seed: u64, n: usize, signal: impl Fn(f64) -> f64, sd: f64) -> (Vec<f64>, Vec<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        let y = u
            .iter()
            .map(|&v| signal(v) + sd * rng.sample::<f64, _>(StandardNormal))
            .collect();
        (u, y)
    }

    #[test]
    fn shrinkage_decreases_with_model_size() {
        // pure noise: R² gains per term are small, so ξ_5 ≤ ξ_2 ≤ ξ_1
        for seed in 0..10 {
            let (u, y) = noisy_data(seed, 100, |_| 0.0, 1.0);
            let d = build_design(&u, Basis::Legendre, 5).unwrap();
            for p in [OmegaPrior::Intrinsic, OmegaPrior::zellner_siow(), OmegaPrior::hyper_g()] {
                let xi: Vec<f64> = [1, 2, 5]
                    .iter()
                    .map(|&k| shrinkage(&fit_stats(&y, &d, k).unwrap(), &p).unwrap())
                    .collect();
                assert!(xi[2] <= xi[1] && xi[1] <= xi[0], "seed {seed} {p}: {xi:?}");
            }
        }
    }

    #[test]
    fn shrinkage_can_rise_when_fit_improves() {
        // a large jump in R² raises ξ even though the model grows
        let (u, y) = noisy_data(11, 100, |v| (3.0 * v).sin(), 0.3);
        let d = build_design(&u, Basis::Legendre, 2).unwrap();
        let p = OmegaPrior::zellner_siow();
        let xi1 = shrinkage(&fit_stats(&y, &d, 1).unwrap(), &p).unwrap();
        let xi2 = shrinkage(&fit_stats(&y, &d, 2).unwrap(), &p).unwrap();
        assert!(xi2 > xi1);
    }

    proptest! {
        #[test]
        fn shrinkage_in_unit_interval_and_monotone_at_fixed_fit(
            n in 20usize..2000,
            r2 in 0.0f64..0.95,
            k in 1usize..8,
            which in 0usize..3,
        ) {
            let p = [OmegaPrior::Intrinsic, OmegaPrior::zellner_siow(), OmegaPrior::hyper_g()][which];
            let a = shrinkage(&ModelFitStats::new(n, k + 1, r2), &p).unwrap();
            let b = shrinkage(&ModelFitStats::new(n, k + 2, r2), &p).unwrap();
            prop_assert!(a > 0.0 && a <= 1.0 && b > 0.0 && b <= 1.0);
            prop_assert!(b <= a + 1e-12);
        }
    }

    #[test]
    fn noise_prefers_base_model() {
        let mut hits = 0;
        for seed in 0..20 {
            let (u, y) = noisy_data(seed, 200, |_| 1.5, 1.0);
            let n_max = crate::basis::max_order(200, 60);
            let d = build_design(&u, Basis::Legendre, n_max).unwrap();
            let prior = model_prior(n_max, 1.0, 1.0).unwrap();
            let post = model_posterior(&y, &d, &prior, &OmegaPrior::Intrinsic).unwrap();
            if post.mode() == 0 {
                hits += 1;
            }
        }
        assert!(hits >= 15, "mode at 0 in {hits}/20");
    }

    #[test]
    fn linear_signal_detected() {
        let (u, y) = noisy_data(5, 200, |v| 2.0 * v - 1.0, 0.01);
        let d = build_design(&u, Basis::Legendre, 10).unwrap();
        let prior = model_prior(10, 1.0, 1.0).unwrap();
        let post = model_posterior(&y, &d, &prior, &OmegaPrior::Intrinsic).unwrap();
        assert_eq!(post.mode(), 1);
        assert!(post.posterior[1] > 0.5);
    }

    #[test]
    fn posterior_normalization() {
        let prior = model_prior(2, 1.0, 1.0).unwrap();
        let uniform = ModelPrior {
            probs: vec![1.0 / 3.0; 3],
            ..prior
        };
        let post = ModelPosterior::from_parts(vec![0.0; 3], vec![1.0; 3], uniform.clone()).unwrap();
        for p in &post.posterior {
            assert!((p - 1.0 / 3.0).abs() < 1e-15);
        }
        let shifted =
            ModelPosterior::from_parts(vec![1e3, 1e3 + 1.0, 1e3 - 2.0], vec![1.0; 3], uniform.clone()).unwrap();
        let base = ModelPosterior::from_parts(vec![0.0, 1.0, -2.0], vec![1.0; 3], uniform).unwrap();
        for (a, b) in shifted.posterior.iter().zip(&base.posterior) {
            assert!((a - b).abs() < 1e-14);
        }
    }
}
