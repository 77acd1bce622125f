//! Bernstein and shifted-Legendre bases on `[0, 1]`.

use crate::error::{Error, Result};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// Inputs this far outside `[0, 1]` are clamped instead of rejected.
pub const DOMAIN_SLACK: f64 = 1e-12;

/// Largest polynomial order the pipeline will consider.
pub const DEFAULT_ORDER_CAP: usize = 60;

/// Affine map from an original predictor interval `[a, b]` onto `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PredictorScale {
    pub a: f64,
    pub b: f64,
}

impl PredictorScale {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || a >= b {
            return Err(Error::Degenerate(format!(
                "predictor interval [{a}, {b}] must be finite with a < b"
            )));
        }
        Ok(Self { a, b })
    }

    /// Scale spanning the observed range of `x`.
    pub fn from_data(x: &[f64]) -> Result<Self> {
        if x.is_empty() {
            return Err(Error::Empty);
        }
        check_finite(x)?;
        let lo = x.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if lo == hi {
            return Err(Error::Degenerate("all predictor values are equal".into()));
        }
        Self::new(lo, hi)
    }

    pub fn to_unit(&self, x: f64) -> f64 {
        (x - self.a) / (self.b - self.a)
    }

    pub fn from_unit(&self, u: f64) -> f64 {
        self.a + u * (self.b - self.a)
    }

    pub fn to_unit_all(&self, x: &[f64]) -> Vec<f64> {
        x.iter().map(|&v| self.to_unit(v)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Basis {
    Bernstein,
    Legendre,
}

/// `n × (order + 1)` evaluation of a basis at points of `[0, 1]`.
#[derive(Debug, Clone)]
pub struct DesignMatrix {
    pub basis: Basis,
    pub order: usize,
    pub values: DMatrix<f64>,
}

impl DesignMatrix {
    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    /// Column `k` as a slice (nalgebra storage is column-major).
    pub fn column(&self, k: usize) -> &[f64] {
        let n = self.n();
        &self.values.as_slice()[k * n..(k + 1) * n]
    }
}

fn check_unit(u: f64) -> Result<f64> {
    if !u.is_finite() {
        return Err(Error::Domain { value: u });
    }
    if (-DOMAIN_SLACK..=1.0 + DOMAIN_SLACK).contains(&u) {
        Ok(u.clamp(0.0, 1.0))
    } else {
        Err(Error::Domain { value: u })
    }
}

fn check_finite(x: &[f64]) -> Result<()> {
    match x.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFinite { index }),
        None => Ok(()),
    }
}

/// Bernstein basis `b_k^N(u)` for `k = 0..=order`, by degree elevation.
pub fn bernstein_row(u: f64, order: usize) -> Result<Vec<f64>> {
    let u = check_unit(u)?;
    let mut row = vec![0.0; order + 1];
    bernstein_into(u, &mut row);
    Ok(row)
}

/// `row.len() - 1` is the order; `u` must already be validated.
pub(crate) fn bernstein_into(u: f64, row: &mut [f64]) {
    let v = 1.0 - u;
    row[0] = 1.0;
    for m in 1..row.len() {
        // b_k^m = v b_k^{m-1} + u b_{k-1}^{m-1}, updated right to left in place
        row[m] = u * row[m - 1];
        for k in (1..m).rev() {
            row[k] = v * row[k] + u * row[k - 1];
        }
        row[0] *= v;
    }
}

/// Shifted Legendre polynomials `ψ_k(u)` for `k = 0..=order`.
pub fn legendre_row(u: f64, order: usize) -> Result<Vec<f64>> {
    let u = check_unit(u)?;
    let mut row = vec![0.0; order + 1];
    legendre_into(u, &mut row);
    Ok(row)
}

pub(crate) fn legendre_into(u: f64, row: &mut [f64]) {
    let t = 2.0 * u - 1.0;
    row[0] = 1.0;
    if row.len() > 1 {
        row[1] = t;
    }
    for k in 1..row.len().saturating_sub(1) {
        let kf = k as f64;
        row[k + 1] = ((2.0 * kf + 1.0) * t * row[k] - kf * row[k - 1]) / (kf + 1.0);
    }
}

/// Stack basis rows for every point of `u`.
pub fn build_design(u: &[f64], basis: Basis, order: usize) -> Result<DesignMatrix> {
    if u.is_empty() {
        return Err(Error::Empty);
    }
    check_finite(u)?;
    let n = u.len();
    if order + 2 > n {
        log::warn!("order {order} leaves fewer than two residual degrees of freedom for n = {n}");
    }
    let mut values = DMatrix::zeros(n, order + 1);
    let mut row = vec![0.0; order + 1];
    for (i, &ui) in u.iter().enumerate() {
        let ui = check_unit(ui)?;
        match basis {
            Basis::Bernstein => bernstein_into(ui, &mut row),
            Basis::Legendre => legendre_into(ui, &mut row),
        }
        for (k, &v) in row.iter().enumerate() {
            values[(i, k)] = v;
        }
    }
    Ok(DesignMatrix { basis, order, values })
}

/// Upper bound on the order: `min(⌊n^{2/3}⌋, cap)`.
pub fn max_order(n: usize, cap: usize) -> usize {
    assert!(n >= 2, "max_order needs n >= 2");
    assert!(cap >= 1, "max_order needs cap >= 1");
    // integer cube-root search avoids 8^{2/3} = 3.9999... round-off
    let n2 = (n as u128) * (n as u128);
    let mut m = (n2 as f64).cbrt().floor() as u128;
    while (m + 1).pow(3) <= n2 {
        m += 1;
    }
    while m.pow(3) > n2 {
        m -= 1;
    }
    (m as usize).min(cap)
}

/// Evaluate a Legendre-form polynomial at `u`.
pub fn eval_legendre(coef: &[f64], u: f64) -> f64 {
    let mut row = vec![0.0; coef.len()];
    legendre_into(u, &mut row);
    row.iter().zip(coef).map(|(a, b)| a * b).sum()
}

/// Evaluate a Bernstein-form polynomial at `u` by de Casteljau.
pub fn eval_bernstein(coef: &[f64], u: f64) -> f64 {
    let mut work = coef.to_vec();
    let v = 1.0 - u;
    for m in (1..work.len()).rev() {
        for k in 0..m {
            work[k] = v * work[k] + u * work[k + 1];
        }
    }
    work.first().copied().unwrap_or(0.0)
}
