//! K-fold cross-validation order selection, the comparison baseline.

use crate::basis::{build_design, eval_bernstein, Basis, PredictorScale};
use crate::error::{Error, Result};
use crate::linalg::least_squares;
use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

pub const DEFAULT_FOLDS: usize = 5;

/// Relative slack under which two CV errors count as tied.
const TIE_TOL: f64 = 1e-9;

/// Pivot size, relative to the largest so far, below which a fit counts as singular.
const PIVOT_TOL: f64 = 1e-12;

/// How the per-fold least-squares fits are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum CvSolver {
    /// A fresh Householder fit of the Bernstein design for every order and fold.
    #[default]
    Refit,
    /// One QR per fold of the nested Legendre design, shared by all orders.
    /// Same column spaces, so the same predictions up to rounding.
    Nested,
}

impl fmt::Display for CvSolver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CvSolver::Refit => "refit",
            CvSolver::Nested => "nested",
        })
    }
}

impl FromStr for CvSolver {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "refit" => Ok(CvSolver::Refit),
            "nested" => Ok(CvSolver::Nested),
            other => Err(Error::InvalidArgument(format!(
                "unknown CV solver {other}; expected refit or nested"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvResult {
    pub selected_order: usize,
    /// Mean held-out squared error per order; `+∞` where a training fit was singular.
    pub cv_mse: Vec<f64>,
    pub fold_assignment: Vec<usize>,
    /// Bernstein coefficients of the selected order refit on all data.
    pub coefficients: Vec<f64>,
    pub scale: PredictorScale,
    pub wall_clock: f64,
    pub warnings: Vec<String>,
}

/// Fold of each observation: a seeded permutation dealt round-robin.
pub fn assign_folds(n: usize, folds: usize, seed: u64) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut out = vec![0; n];
    for (pos, &i) in perm.iter().enumerate() {
        out[i] = pos % folds;
    }
    out
}

fn rows(m: &DMatrix<f64>, idx: &[usize]) -> DMatrix<f64> {
    m.select_rows(idx)
}

/// Pick the order with the smallest CV error, preferring lower orders among ties.
fn pick(mse: &[f64], scale: f64) -> usize {
    let best = mse.iter().cloned().fold(f64::INFINITY, f64::min);
    let slack = best.abs() * TIE_TOL + scale * 1e-14;
    mse.iter().position(|&v| v <= best + slack).unwrap_or(0)
}

/// Score orders `0..=max_order` by `folds`-fold CV on Bernstein least squares.
///
/// `x` is mapped to `[0, 1]` by its observed range.
pub fn cv_select(x: &[f64], y: &[f64], max_order: usize, folds: usize, seed: u64) -> Result<CvResult> {
    cv_select_with(x, y, max_order, folds, seed, CvSolver::default())
}

pub fn cv_select_with(
    x: &[f64],
    y: &[f64],
    max_order: usize,
    folds: usize,
    seed: u64,
    solver: CvSolver,
) -> Result<CvResult> {
    let start = Instant::now();
    let n = x.len();
    if y.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: y.len(),
        });
    }
    if folds < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 folds, got {folds}")));
    }
    if n < 2 * folds {
        return Err(Error::InvalidArgument(format!(
            "{folds}-fold CV needs at least {} observations, got {n}",
            2 * folds
        )));
    }
    if let Some(index) = y.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    let scale = PredictorScale::from_data(x)?;
    let u = scale.to_unit_all(x);
    let fold_assignment = assign_folds(n, folds, seed);
    let splits: Vec<(Vec<usize>, Vec<usize>)> = (0..folds)
        .map(|f| {
            let (test, train): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| fold_assignment[i] == f);
            (train, test)
        })
        .collect();

    let sse = match solver {
        CvSolver::Refit => refit_sse(&u, y, max_order, &splits)?,
        CvSolver::Nested => nested_sse(&u, y, max_order, &splits)?,
    };
    let mut warnings = Vec::new();
    let mut cv_mse = Vec::with_capacity(max_order + 1);
    for (k, e) in sse.into_iter().enumerate() {
        if e.is_infinite() {
            let msg = format!("order {k}: singular training design, scored as +inf");
            log::warn!("{msg}");
            warnings.push(msg);
        }
        cv_mse.push(e / n as f64);
    }
    let y_scale = y.iter().map(|v| v * v).sum::<f64>() / n as f64;
    let selected_order = pick(&cv_mse, y_scale);
    let design = build_design(&u, Basis::Bernstein, selected_order)?.values;
    let coefficients = least_squares(&design, y).ok_or(Error::RankDeficient { column: selected_order })?;
    Ok(CvResult {
        selected_order,
        cv_mse,
        fold_assignment,
        coefficients,
        scale,
        wall_clock: start.elapsed().as_secs_f64(),
        warnings,
    })
}

type Splits = [(Vec<usize>, Vec<usize>)];

fn refit_sse(u: &[f64], y: &[f64], max_order: usize, splits: &Splits) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(max_order + 1);
    for k in 0..=max_order {
        let design = build_design(u, Basis::Bernstein, k)?.values;
        let mut sse = 0.0;
        for (train, test) in splits {
            let y_train: Vec<f64> = train.iter().map(|&i| y[i]).collect();
            let Some(coef) = least_squares(&rows(&design, train), &y_train) else {
                sse = f64::INFINITY;
                break;
            };
            for &i in test {
                let pred: f64 = design.row(i).iter().zip(&coef).map(|(a, b)| a * b).sum();
                sse += (y[i] - pred).powi(2);
            }
        }
        out.push(sse);
    }
    Ok(out)
}

fn nested_sse(u: &[f64], y: &[f64], max_order: usize, splits: &Splits) -> Result<Vec<f64>> {
    let design = build_design(u, Basis::Legendre, max_order)?.values;
    let mut out = vec![0.0; max_order + 1];
    for (train, test) in splits {
        let p = (max_order + 1).min(train.len());
        let qr = rows(&design, train).columns(0, p).into_owned().qr();
        let r = qr.r();
        let mut qty = DVector::from_iterator(train.len(), train.iter().map(|&i| y[i]));
        qr.q_tr_mul(&mut qty);

        let mut max_pivot: f64 = 0.0;
        let mut singular = false;
        for (k, slot) in out.iter_mut().enumerate() {
            if k < p {
                max_pivot = max_pivot.max(r[(k, k)].abs());
                singular |= max_pivot == 0.0 || (0..=k).any(|i| r[(i, i)].abs() <= PIVOT_TOL * max_pivot);
            }
            if singular || k >= p {
                *slot = f64::INFINITY;
                continue;
            }
            let mut coef = vec![0.0; k + 1];
            for i in (0..=k).rev() {
                let tail: f64 = (i + 1..=k).map(|j| r[(i, j)] * coef[j]).sum();
                coef[i] = (qty[i] - tail) / r[(i, i)];
            }
            for &i in test {
                let pred: f64 = (0..=k).map(|j| design[(i, j)] * coef[j]).sum();
                *slot += (y[i] - pred).powi(2);
            }
        }
    }
    Ok(out)
}

impl CvResult {
    pub fn predict(&self, x: f64) -> f64 {
        eval_bernstein(&self.coefficients, self.scale.to_unit(x))
    }
}
