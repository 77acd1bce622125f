//! Order selection for binary responses through the latent probit model.
//!
//! With `v ~ N(λ_0 1, Σ_k)`, `Σ_k = I + c P_k`, `c = 2n/(k+1)` and `P_k` the
//! projector onto Legendre columns `1..=k`, the marginal likelihood of `y`
//! is the orthant mass `P(v ∈ A)` integrated over a flat `λ_0`. The orthant
//! mass is estimated by sequential conditional importance sampling (GHK).
//! Because `Σ_k` is the identity plus a rank-`k` term, its Cholesky factor
//! has the form `L_{ij} = w_iᵀ g_j` below the diagonal, so each draw costs
//! `O(nk)`.

use crate::basis::{Basis, DesignMatrix};
use crate::error::{Error, Result};
use crate::gprior::{ModelPosterior, OmegaPrior};
use crate::model_space::model_prior;
use crate::quadrature::{gauss_hermite, integrate, QuadConfig};
use crate::selector::{
    median_probability_order, nested_design, prepare_inputs, Diagnostics, FitConfig, FitResult, Response,
};
use crate::special::{norm_cdf, norm_cdf_with_log, norm_log_cdf, norm_log_pdf, norm_quantile};
use crate::transform::{build_transform, condition_diagnostic, legendre_to_bernstein};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::time::Instant;

pub const MIN_DRAWS: usize = 1000;

/// Latent orthant: `v_i > 0` where `y_i = 1`, `v_i ≤ 0` otherwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrthantSpec {
    pub signs: Vec<bool>,
}

impl OrthantSpec {
    pub fn from_response(y: &[bool]) -> Self {
        Self { signs: y.to_vec() }
    }

    pub fn n(&self) -> usize {
        self.signs.len()
    }

    fn sign(&self, i: usize) -> f64 {
        if self.signs[i] {
            1.0
        } else {
            -1.0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinaryBfEstimate {
    pub log_bf: f64,
    /// Delta-method standard error of `log_bf`.
    pub mc_std_error: f64,
    pub n_draws: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinaryConfig {
    /// Importance draws per `λ_0` node, antithetic pairs included.
    pub mc_draws: usize,
    /// Gauss–Hermite nodes for the `λ_0` integral.
    pub nodes: usize,
    pub seed: u64,
    /// Stop adding orders once `patience` consecutive orders fall this many
    /// nats below the best log posterior so far. `None` evaluates every order.
    pub truncation_nats: Option<f64>,
    pub patience: usize,
}

impl Default for BinaryConfig {
    fn default() -> Self {
        Self {
            mc_draws: MIN_DRAWS,
            nodes: 10,
            seed: 0,
            truncation_nats: Some(20.0),
            patience: 3,
        }
    }
}

/// Orthonormal basis of Legendre columns `1..=k`, uncentered.
fn column_basis(design: &DesignMatrix, k: usize) -> Result<DMatrix<f64>> {
    if design.basis != Basis::Legendre {
        return Err(Error::InvalidArgument(
            "binary Bayes factors need the Legendre design".into(),
        ));
    }
    if k == 0 || k > design.order {
        return Err(Error::InvalidArgument(format!(
            "order {k} outside 1..={}",
            design.order
        )));
    }
    let n = design.n();
    let mut u = DMatrix::zeros(n, k);
    for j in 0..k {
        let mut v = DVector::from_column_slice(design.column(j + 1));
        let norm0 = v.norm();
        for _ in 0..2 {
            for i in 0..j {
                let qi = u.column(i);
                let c = qi.dot(&v);
                v -= qi * c;
            }
        }
        let norm = v.norm();
        if norm0 == 0.0 || norm <= 1e-10 * norm0 {
            return Err(Error::RankDeficient { column: j + 1 });
        }
        u.set_column(j, &(v / norm));
    }
    Ok(u)
}

/// `Σ_k = I + (2n/(k+1)) Ψ_k (Ψ_kᵀΨ_k)⁻¹ Ψ_kᵀ`.
pub fn sigma_k(design: &DesignMatrix, k: usize) -> Result<DMatrix<f64>> {
    let u = column_basis(design, k)?;
    let c = 2.0 * design.n() as f64 / (k as f64 + 1.0);
    let mut s = &u * u.transpose() * c;
    for i in 0..s.nrows() {
        s[(i, i)] += 1.0;
    }
    Ok(s)
}

/// Cholesky factor of `I + W Wᵀ` in factored form: `L_ii = sd_i`,
/// `L_ij = w_iᵀ g_j` for `j < i`. Rows are stored contiguously.
struct LowRankCholesky {
    k: usize,
    w: Vec<f64>,
    g: Vec<f64>,
    sd: Vec<f64>,
}

impl LowRankCholesky {
    fn new(w: &DMatrix<f64>) -> Self {
        let (n, k) = w.shape();
        let mut s = DMatrix::<f64>::identity(k, k);
        let mut wr = Vec::with_capacity(n * k);
        let mut g = Vec::with_capacity(n * k);
        let mut sd = Vec::with_capacity(n);
        for i in 0..n {
            let wi = w.row(i).transpose();
            let sw = &s * &wi;
            let d = (1.0 + wi.dot(&sw)).max(1.0).sqrt();
            let gi = sw / d;
            s -= &gi * gi.transpose();
            wr.extend(wi.iter());
            g.extend(gi.iter());
            sd.push(d);
        }
        Self { k, w: wr, g, sd }
    }

    #[cfg(test)]
    fn dense(&self) -> DMatrix<f64> {
        let n = self.sd.len();
        let k = self.k;
        DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                self.sd[i]
            } else if j < i {
                (0..k).map(|t| self.w[i * k + t] * self.g[j * k + t]).sum()
            } else {
                0.0
            }
        })
    }
}

/// Log-mean and variance (relative to `exp(shift)`) of importance weights.
#[derive(Debug, Clone, Copy)]
struct WeightSummary {
    log_mean: f64,
    /// Variance of the mean estimate, scaled by `exp(-2 log_mean)`.
    rel_var: f64,
}

fn summarize(log_pairs: &[f64]) -> WeightSummary {
    let m = log_pairs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return WeightSummary {
            log_mean: f64::NEG_INFINITY,
            rel_var: 0.0,
        };
    }
    let v: Vec<f64> = log_pairs.iter().map(|l| (l - m).exp()).collect();
    let p = v.len() as f64;
    let mean = v.iter().sum::<f64>() / p;
    let var = if v.len() > 1 {
        v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (p - 1.0) / p
    } else {
        0.0
    };
    WeightSummary {
        log_mean: m + mean.ln(),
        rel_var: var / (mean * mean),
    }
}

/// Running state of the sequential conditioning: the conditional mean of
/// `v_i` given the truncated draws so far.
trait Conditioner {
    fn reset(&mut self);
    fn mean(&self, i: usize) -> f64;
    fn push(&mut self, i: usize, e: f64);
}

/// `m = Σ_{j<i} g_j e_j`, so the conditional mean of `v_i` is `w_iᵀ m`.
struct LowRankState<'a> {
    chol: &'a LowRankCholesky,
    m: Vec<f64>,
}

impl Conditioner for LowRankState<'_> {
    fn reset(&mut self) {
        self.m.iter_mut().for_each(|v| *v = 0.0);
    }

    fn mean(&self, i: usize) -> f64 {
        let k = self.chol.k;
        self.chol.w[i * k..(i + 1) * k]
            .iter()
            .zip(&self.m)
            .map(|(a, b)| a * b)
            .sum()
    }

    fn push(&mut self, i: usize, e: f64) {
        let k = self.chol.k;
        for (mv, gv) in self.m.iter_mut().zip(&self.chol.g[i * k..(i + 1) * k]) {
            *mv += gv * e;
        }
    }
}

struct DenseState<'a> {
    mean: &'a [f64],
    l: &'a DMatrix<f64>,
    e: Vec<f64>,
}

impl Conditioner for DenseState<'_> {
    fn reset(&mut self) {
        self.e.iter_mut().for_each(|v| *v = 0.0);
    }

    fn mean(&self, i: usize) -> f64 {
        self.mean[i] + (0..i).map(|j| self.l[(i, j)] * self.e[j]).sum::<f64>()
    }

    fn push(&mut self, i: usize, e: f64) {
        self.e[i] = e;
    }
}

/// Log-weights of `draws / 2` antithetic GHK pairs, each pair averaged.
fn ghk_log_pairs(
    orthant: &OrthantSpec,
    offset: f64,
    sd: &[f64],
    state: &mut impl Conditioner,
    draws: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<f64> {
    let n = orthant.n();
    let mut uniforms = vec![0.0; n];
    let pairs = (draws / 2).max(1);
    let mut out = Vec::with_capacity(pairs);
    for _ in 0..pairs {
        for u in uniforms.iter_mut() {
            // keeps both antithetic halves away from 0
            *u = rng.random::<f64>().max(f64::EPSILON);
        }
        let mut half = [0.0; 2];
        for (h, anti) in [false, true].into_iter().enumerate() {
            state.reset();
            let mut lw = 0.0;
            for i in 0..n {
                let s = orthant.sign(i);
                let (p, log_p) = norm_cdf_with_log(s * (offset + state.mean(i)) / sd[i]);
                lw += log_p;
                let uni = if anti { 1.0 - uniforms[i] } else { uniforms[i] };
                state.push(i, -s * norm_quantile(uni * p));
            }
            half[h] = lw;
        }
        out.push(log_mean_exp2(half[0], half[1]));
    }
    out
}

/// GHK pair log-weights for `v ~ N(λ_0 1, I + W Wᵀ)`.
fn structured_log_pairs(
    orthant: &OrthantSpec,
    chol: &LowRankCholesky,
    lambda0: f64,
    draws: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<f64> {
    let mut state = LowRankState {
        chol,
        m: vec![0.0; chol.k],
    };
    ghk_log_pairs(orthant, lambda0, &chol.sd, &mut state, draws, rng)
}

fn log_mean_exp2(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    if !m.is_finite() {
        return m;
    }
    m + (0.5 * ((a - m).exp() + (b - m).exp())).ln()
}

/// Orthant probability estimate with its Monte Carlo standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrthantEstimate {
    pub probability: f64,
    pub log_probability: f64,
    pub std_error: f64,
}

/// GHK estimate of `P(v ∈ A)` for `v ~ N(mean, cov)` with a dense Cholesky factor.
pub fn orthant_probability(
    mean: &[f64],
    cov: &DMatrix<f64>,
    orthant: &OrthantSpec,
    draws: usize,
    seed: u64,
) -> Result<OrthantEstimate> {
    let n = orthant.n();
    if mean.len() != n || cov.nrows() != n || cov.ncols() != n {
        return Err(Error::Dimension {
            expected: n,
            got: mean.len(),
        });
    }
    let l = cov
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Degenerate("covariance is not positive definite".into()))?
        .l();
    let sd: Vec<f64> = (0..n).map(|i| l[(i, i)]).collect();
    let mut state = DenseState {
        mean,
        l: &l,
        e: vec![0.0; n],
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs = ghk_log_pairs(orthant, 0.0, &sd, &mut state, draws, &mut rng);
    let s = summarize(&pairs);
    let p = s.log_mean.exp();
    Ok(OrthantEstimate {
        probability: p,
        log_probability: s.log_mean,
        std_error: p * s.rel_var.sqrt(),
    })
}

fn log_sum_exp(v: &[f64]) -> f64 {
    let m = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

fn check_response(y: &[bool]) -> Result<()> {
    let ones = y.iter().filter(|&&v| v).count();
    if ones == 0 || ones == y.len() {
        let msg = "binary response is constant; the orthant mass does not integrate over the intercept";
        log::warn!("{msg}");
        return Err(Error::Degenerate(msg.into()));
    }
    Ok(())
}

/// `ln ∫ Π_i Φ(s_i λ_0) dλ_0`, the base-model marginal.
fn log_base_marginal(orthant: &OrthantSpec) -> Result<f64> {
    let f = |l: f64| (0..orthant.n()).map(|i| norm_log_cdf(orthant.sign(i) * l)).sum::<f64>();
    let (lo, hi) = (-40.0, 40.0);
    let steps = 400;
    let h = (hi - lo) / steps as f64;
    let vals: Vec<f64> = (0..=steps).map(|i| f(lo + h * i as f64)).collect();
    let peak = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let first = vals.iter().position(|&v| v > peak - 80.0).unwrap_or(0);
    let last = vals.iter().rposition(|&v| v > peak - 80.0).unwrap_or(steps);
    let a = lo + h * first.saturating_sub(1) as f64;
    let b = lo + h * (last + 1).min(steps) as f64;
    let r = integrate(|l| [(f(l) - peak).exp()], a, b, QuadConfig::default())?;
    Ok(r.value[0].ln() + peak)
}

/// Mode and marginal sd of `λ_0` under `Σ ln Φ(s_i(λ_0 + w_iᵀη)) − ‖η‖²/2`.
fn laplace_center(orthant: &OrthantSpec, w: &DMatrix<f64>) -> (f64, f64) {
    let (n, k) = w.shape();
    let p = k + 1;
    let mut theta = DVector::<f64>::zeros(p);
    let row = |i: usize| -> DVector<f64> {
        let mut r = DVector::zeros(p);
        r[0] = 1.0;
        for t in 0..k {
            r[t + 1] = w[(i, t)];
        }
        r
    };
    let objective = |th: &DVector<f64>| -> f64 {
        let pen: f64 = th.rows(1, k).norm_squared();
        (0..n)
            .map(|i| norm_log_cdf(orthant.sign(i) * row(i).dot(th)))
            .sum::<f64>()
            - 0.5 * pen
    };
    let mut hess = DMatrix::<f64>::identity(p, p);
    for _ in 0..100 {
        let mut grad = DVector::<f64>::zeros(p);
        hess = DMatrix::zeros(p, p);
        for i in 0..n {
            let r = row(i);
            let s = orthant.sign(i);
            let z = s * r.dot(&theta);
            let mills = (norm_log_pdf(z) - norm_log_cdf(z)).exp();
            grad += &r * (s * mills);
            hess += &r * r.transpose() * (mills * (z + mills));
        }
        for t in 1..p {
            grad[t] -= theta[t];
            hess[(t, t)] += 1.0;
        }
        let Some(step) = hess.clone().cholesky().map(|c| c.solve(&grad)) else {
            break;
        };
        let base = objective(&theta);
        let mut scale = 1.0;
        let mut moved = false;
        for _ in 0..30 {
            let cand = &theta + &step * scale;
            if objective(&cand) >= base {
                theta = cand;
                moved = true;
                break;
            }
            scale *= 0.5;
        }
        if !moved || step.norm() * scale < 1e-10 {
            break;
        }
    }
    let var = hess
        .try_inverse()
        .map(|h| h[(0, 0)])
        .filter(|v| v.is_finite() && *v > 0.0)
        .unwrap_or(1.0);
    (theta[0], var.sqrt())
}

fn stream_rng(seed: u64, k: usize, node: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((k as u64) << 32) | node as u64);
    rng
}

fn binary_log_marginal(
    orthant: &OrthantSpec,
    design: &DesignMatrix,
    k: usize,
    cfg: &BinaryConfig,
) -> Result<(f64, f64)> {
    let u = column_basis(design, k)?;
    let c = 2.0 * design.n() as f64 / (k as f64 + 1.0);
    let w = u * c.sqrt();
    let chol = LowRankCholesky::new(&w);
    let (center, sd) = laplace_center(orthant, &w);
    let rule = gauss_hermite(cfg.nodes.max(2));
    let mut width = 1.2 * sd;
    for _attempt in 0..4 {
        let scale = std::f64::consts::SQRT_2 * width;
        let per_node: Vec<(f64, WeightSummary)> = rule
            .nodes
            .par_iter()
            .zip(&rule.weights)
            .enumerate()
            .map(|(m, (&t, &wt))| {
                let mut rng = stream_rng(cfg.seed, k, m);
                let lambda0 = center + scale * t;
                let pairs = structured_log_pairs(orthant, &chol, lambda0, cfg.mc_draws, &mut rng);
                (wt.ln() + t * t + scale.ln(), summarize(&pairs))
            })
            .collect();
        let terms: Vec<f64> = per_node.iter().map(|(la, s)| la + s.log_mean).collect();
        let total = log_sum_exp(&terms);
        let edge = log_sum_exp(&[terms[0], terms[terms.len() - 1]]);
        let var: f64 = terms
            .iter()
            .zip(&per_node)
            .map(|(t, (_, s))| (2.0 * (t - total)).exp() * s.rel_var)
            .sum();
        if edge - total < (1e-3f64).ln() {
            return Ok((total, var.sqrt()));
        }
        width *= 1.5;
    }
    Err(Error::Quadrature {
        evaluations: cfg.nodes * cfg.mc_draws,
        trace: format!("intercept integrand still heavy at the outer nodes for order {k}"),
    })
}

/// Monte Carlo estimate of `ln BF_{γ_k, γ_0}` for a binary response.
pub fn binary_log_bf(
    y: &[bool],
    design: &DesignMatrix,
    k: usize,
    n_draws: usize,
    seed: u64,
) -> Result<BinaryBfEstimate> {
    binary_log_bf_with(
        y,
        design,
        k,
        &BinaryConfig {
            mc_draws: n_draws,
            seed,
            ..BinaryConfig::default()
        },
    )
}

pub fn binary_log_bf_with(y: &[bool], design: &DesignMatrix, k: usize, cfg: &BinaryConfig) -> Result<BinaryBfEstimate> {
    log_bf_given_base(y, design, k, cfg, None)
}

fn log_bf_given_base(
    y: &[bool],
    design: &DesignMatrix,
    k: usize,
    cfg: &BinaryConfig,
    log_base: Option<f64>,
) -> Result<BinaryBfEstimate> {
    if y.len() != design.n() {
        return Err(Error::Dimension {
            expected: design.n(),
            got: y.len(),
        });
    }
    if cfg.mc_draws < MIN_DRAWS {
        return Err(Error::InvalidArgument(format!(
            "need at least {MIN_DRAWS} draws, got {}",
            cfg.mc_draws
        )));
    }
    check_response(y)?;
    if k == 0 {
        return Ok(BinaryBfEstimate {
            log_bf: 0.0,
            mc_std_error: 0.0,
            n_draws: cfg.mc_draws,
            seed: cfg.seed,
        });
    }
    let orthant = OrthantSpec::from_response(y);
    let (num, se) = binary_log_marginal(&orthant, design, k, cfg)?;
    let den = match log_base {
        Some(v) => v,
        None => log_base_marginal(&orthant)?,
    };
    Ok(BinaryBfEstimate {
        log_bf: num - den,
        mc_std_error: se,
        n_draws: cfg.mc_draws,
        seed: cfg.seed,
    })
}

/// Probit maximum likelihood on a design, ridge-penalizing the non-intercept
/// coefficients by `ridge`. Returns `None` when Newton fails to converge.
fn probit_newton(x: &DMatrix<f64>, y: &[bool], ridge: f64) -> Option<Vec<f64>> {
    let (n, p) = x.shape();
    let mut beta = DVector::<f64>::zeros(p);
    let loglik = |b: &DVector<f64>| -> f64 {
        let eta = x * b;
        let pen: f64 = b.rows(1, p - 1).norm_squared();
        (0..n)
            .map(|i| norm_log_cdf(if y[i] { eta[i] } else { -eta[i] }))
            .sum::<f64>()
            - 0.5 * ridge * pen
    };
    for _ in 0..200 {
        let eta = x * &beta;
        let mut grad = DVector::<f64>::zeros(p);
        let mut info = DMatrix::<f64>::zeros(p, p);
        for i in 0..n {
            let s = if y[i] { 1.0 } else { -1.0 };
            let z = s * eta[i];
            let mills = (norm_log_pdf(z) - norm_log_cdf(z)).exp();
            let r = x.row(i).transpose();
            grad += &r * (s * mills);
            info += &r * r.transpose() * (mills * (z + mills));
        }
        for t in 1..p {
            grad[t] -= ridge * beta[t];
            info[(t, t)] += ridge;
        }
        let step = info.cholesky()?.solve(&grad);
        let base = loglik(&beta);
        let mut scale = 1.0;
        loop {
            let cand = &beta + &step * scale;
            if loglik(&cand) >= base - 1e-12 {
                beta = cand;
                break;
            }
            scale *= 0.5;
            if scale < 1e-10 {
                return None;
            }
        }
        if beta.amax() > 1e4 {
            return None;
        }
        if step.amax() * scale < 1e-10 {
            return Some(beta.as_slice().to_vec());
        }
    }
    None
}

/// Posterior over orders from binary Bayes factors, then a probit refit of the
/// selected order.
pub fn fit_binary(x: &[f64], y: &[f64], config: &FitConfig, binary: &BinaryConfig) -> Result<FitResult> {
    let start = Instant::now();
    let (scale, u) = prepare_inputs(x, y, config.domain)?;
    let yb: Vec<bool> = y
        .iter()
        .enumerate()
        .map(|(i, &v)| match v {
            0.0 => Ok(false),
            1.0 => Ok(true),
            _ => Err(Error::Input {
                row: i + 1,
                column: "y".into(),
                message: format!("binary response must be 0 or 1, got {v}"),
            }),
        })
        .collect::<Result<_>>()?;
    check_response(&yb)?;
    let n = u.len();
    let mut warnings = Vec::new();
    let top = crate::basis::max_order(n, config.max_order_cap.max(1));
    let (design, _) = nested_design(&u, y, top, &mut warnings)?;
    let prior = model_prior(design.order, config.prior_a, config.prior_b)?;

    let log_base = log_base_marginal(&OrthantSpec::from_response(&yb))?;
    let mut log_bf = vec![0.0];
    let mut se = vec![0.0];
    let mut best = prior.probs[0].ln();
    let mut below = 0;
    for k in 1..=design.order {
        let est = log_bf_given_base(&yb, &design, k, binary, Some(log_base))?;
        let lp = est.log_bf + prior.probs[k].ln();
        log_bf.push(est.log_bf);
        se.push(est.mc_std_error);
        best = best.max(lp);
        if let Some(t) = binary.truncation_nats {
            below = if lp < best - t { below + 1 } else { 0 };
            if below >= binary.patience.max(1) && k < design.order {
                warnings.push(format!(
                    "orders above {k} not evaluated: the last {below} were more than {t} nats below the best"
                ));
                break;
            }
        }
    }
    let evaluated = log_bf.len() - 1;
    let prior = prior.truncated(evaluated)?;
    let mp = ModelPosterior::from_parts(log_bf, vec![1.0; evaluated + 1], prior)?;
    let selected = median_probability_order(&mp);

    let sub = design.values.columns(0, selected + 1).into_owned();
    let lambda_hat = match probit_newton(&sub, &yb, 0.0) {
        Some(b) => b,
        None => {
            let msg = format!("probit refit at order {selected} did not converge (separation); using a ridge penalty");
            log::warn!("{msg}");
            warnings.push(msg);
            probit_newton(&sub, &yb, 1.0).ok_or_else(|| Error::Degenerate("ridge probit refit failed".into()))?
        }
    };
    let tp = build_transform(selected)?;
    let eta_hat = legendre_to_bernstein(&lambda_hat, &tp)?;
    for w in &warnings {
        log::warn!("{w}");
    }
    let diagnostics = Diagnostics {
        max_order: evaluated,
        log_bf: mp.log_bf.clone(),
        shrinkages: mp.shrinkage.clone(),
        inclusion: mp.inclusion.clone(),
        shrunken_inclusion: mp.shrunken_inclusion.clone(),
        loss_per_order: Vec::new(),
        loss_equivalence: 0.0,
        lambda_full_ls: lambda_hat.clone(),
        lambda_full: lambda_hat.clone(),
        transform_condition: Some(condition_diagnostic(&tp)),
        log_bf_std_error: Some(se),
    };
    Ok(FitResult {
        selected_order: selected,
        posterior_over_orders: mp.posterior,
        lambda_hat,
        eta_hat,
        shrinkage: 1.0,
        timing_seconds: start.elapsed().as_secs_f64(),
        rule: config.rule,
        omega_prior: OmegaPrior::Intrinsic,
        coefficient_path: crate::selector::CoefficientPath::Transform,
        response: Response::Binary,
        scale,
        diagnostics,
        warnings,
    })
}

/// `Φ(λ_0 + λ_1 ψ_1(u) + …)` on `[0, 1]` inputs, for simulation and tests.
pub fn probit_probability(lambda: &[f64], u: f64) -> f64 {
    norm_cdf(crate::basis::eval_legendre(lambda, u))
}
