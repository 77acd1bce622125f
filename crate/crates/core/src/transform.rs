//! Legendre ↔ Bernstein change of basis.
//!
//! `q` maps Legendre coefficients to Bernstein coefficients of the same
//! order; column `k` holds the Bernstein form of `ψ_k`. Both `q` and its
//! inverse are evaluated from their closed forms in exact rational arithmetic
//! and rounded once, so the only floating-point error is the final rounding.

use crate::basis::DEFAULT_ORDER_CAP;
use crate::error::{Error, Result};
use crate::special::BinomialTable;
use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

/// Above this round-trip error callers should prefer a direct Bernstein refit.
pub const ROUND_TRIP_REFIT_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct TransformPair {
    pub order: usize,
    /// Legendre → Bernstein.
    pub q: DMatrix<f64>,
    /// Bernstein → Legendre.
    pub q_inv: DMatrix<f64>,
    /// `max |q · q_inv − I|`.
    pub round_trip_error: f64,
}

fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn sign(exponent: usize) -> BigInt {
    if exponent.is_multiple_of(2) {
        BigInt::from(1)
    } else {
        BigInt::from(-1)
    }
}

/// Legendre → Bernstein entry `Q_{jk}`.
fn q_entry(table: &BinomialTable, order: usize, j: usize, k: usize) -> BigRational {
    let lo = (j + k).saturating_sub(order);
    let hi = j.min(k);
    let mut sum = BigInt::zero();
    for i in lo..=hi {
        let c = table.get_ref(k, i);
        sum += sign(k + i) * c * c * table.get_ref(order - k, j - i);
    }
    BigRational::new(sum, table.get(order, j))
}

/// Bernstein → Legendre entry `Q^{-1}_{jk}`.
fn q_inv_entry(table: &BinomialTable, order: usize, j: usize, k: usize) -> BigRational {
    let mut sum = BigRational::zero();
    for i in 0..=j {
        let c = table.get_ref(j, i);
        sum += BigRational::new(sign(j + i) * c * c, table.get(order + j, k + i));
    }
    sum * BigRational::new(
        BigInt::from(2 * j + 1) * table.get_ref(order, k),
        BigInt::from(order + j + 1),
    )
}

/// Build the transform pair for `order ≤ DEFAULT_ORDER_CAP`.
pub fn build_transform(order: usize) -> Result<TransformPair> {
    build_transform_capped(order, DEFAULT_ORDER_CAP)
}

pub fn build_transform_capped(order: usize, cap: usize) -> Result<TransformPair> {
    if order > cap {
        return Err(Error::OrderTooLarge { order, cap });
    }
    let m = order + 1;
    let table = BinomialTable::new(2 * order.max(1));
    let mut q = DMatrix::zeros(m, m);
    let mut q_inv = DMatrix::zeros(m, m);
    for j in 0..m {
        for k in 0..m {
            q[(j, k)] = ratio_to_f64(&q_entry(&table, order, j, k));
            q_inv[(j, k)] = ratio_to_f64(&q_inv_entry(&table, order, j, k));
        }
    }
    let prod = &q * &q_inv;
    let mut round_trip_error: f64 = 0.0;
    for j in 0..m {
        for k in 0..m {
            let target = if j == k { 1.0 } else { 0.0 };
            round_trip_error = round_trip_error.max((prod[(j, k)] - target).abs());
        }
    }
    Ok(TransformPair {
        order,
        q,
        q_inv,
        round_trip_error,
    })
}

fn apply(mat: &DMatrix<f64>, v: &[f64]) -> Result<Vec<f64>> {
    if v.len() != mat.ncols() {
        return Err(Error::Dimension {
            expected: mat.ncols(),
            got: v.len(),
        });
    }
    let out = mat * DVector::from_column_slice(v);
    Ok(out.as_slice().to_vec())
}

/// `η = Q λ`.
pub fn legendre_to_bernstein(lambda: &[f64], tp: &TransformPair) -> Result<Vec<f64>> {
    apply(&tp.q, lambda)
}

/// `λ = Q^{-1} η`.
pub fn bernstein_to_legendre(eta: &[f64], tp: &TransformPair) -> Result<Vec<f64>> {
    apply(&tp.q_inv, eta)
}

fn inf_norm(m: &DMatrix<f64>) -> f64 {
    m.row_iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `‖q‖_∞ · ‖q_inv‖_∞`.
pub fn condition_diagnostic(tp: &TransformPair) -> f64 {
    inf_norm(&tp.q) * inf_norm(&tp.q_inv)
}
