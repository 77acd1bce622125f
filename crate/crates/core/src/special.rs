//! Standard normal helpers and exact binomial coefficients.

use libm::erfc;
use num_bigint::BigInt;
use statrs::function::erf::erfc_inv;
use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Standard normal CDF.
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// `ln Φ(x)`, accurate in the far lower tail where `Φ` underflows.
pub fn norm_log_cdf(x: f64) -> f64 {
    norm_cdf_with_log(x).1
}

/// `(Φ(x), ln Φ(x))` from a single complementary error function call.
pub fn norm_cdf_with_log(x: f64) -> (f64, f64) {
    if x > 0.0 {
        let q = 0.5 * erfc(x * FRAC_1_SQRT_2);
        (1.0 - q, (-q).ln_1p())
    } else if x > -30.0 {
        let p = 0.5 * erfc(-x * FRAC_1_SQRT_2);
        (p, p.ln())
    } else {
        (norm_cdf(x), norm_log_cdf_tail(x))
    }
}

/// Asymptotic series of the Mills ratio.
fn norm_log_cdf_tail(x: f64) -> f64 {
    let z2 = 1.0 / (x * x);
    let series = 1.0 - z2 + 3.0 * z2 * z2 - 15.0 * z2 * z2 * z2 + 105.0 * z2.powi(4);
    -0.5 * x * x - (-x).ln() - LN_SQRT_2PI + series.ln()
}

/// Standard normal quantile. `p` is clamped into the open unit interval.
pub fn norm_quantile(p: f64) -> f64 {
    let p = p.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON / 2.0);
    -SQRT_2 * erfc_inv(2.0 * p)
}

pub fn norm_log_pdf(x: f64) -> f64 {
    -0.5 * x * x - LN_SQRT_2PI
}

/// Pascal's triangle of exact binomial coefficients, rows `0..=max_n`.
#[derive(Debug, Clone)]
pub struct BinomialTable {
    rows: Vec<Vec<BigInt>>,
}

impl BinomialTable {
    pub fn new(max_n: usize) -> Self {
        let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(max_n + 1);
        rows.push(vec![BigInt::from(1)]);
        for n in 1..=max_n {
            let prev = &rows[n - 1];
            let mut row = Vec::with_capacity(n + 1);
            row.push(BigInt::from(1));
            for k in 1..n {
                row.push(&prev[k - 1] + &prev[k]);
            }
            row.push(BigInt::from(1));
            rows.push(row);
        }
        Self { rows }
    }

    pub fn max_n(&self) -> usize {
        self.rows.len() - 1
    }

    /// `C(n, k)`, zero when `k > n`.
    pub fn get(&self, n: usize, k: usize) -> BigInt {
        if k > n {
            BigInt::from(0)
        } else {
            self.rows[n][k].clone()
        }
    }

    pub fn get_ref(&self, n: usize, k: usize) -> &BigInt {
        &self.rows[n][k]
    }
}

/// `ln C(n, k)` by summing logarithms.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    let k = k.min(n - k);
    (1..=k).map(|i| ((n - k + i) as f64).ln() - (i as f64).ln()).sum()
}
