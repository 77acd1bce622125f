//! Least-squares helpers.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};

/// Relative column norm below which a column counts as linearly dependent.
const RANK_TOL: f64 = 1e-10;

/// Incremental QR of the centered columns `1..=order` of a nested design,
/// with the intercept absorbed by centering.
///
/// For every prefix order `k` it yields the residual sum of squares, `R²_k`,
/// and least-squares coefficients, at the cost of one Gram–Schmidt sweep.
#[derive(Debug, Clone)]
pub struct NestedLeastSquares {
    n: usize,
    y_mean: f64,
    col_means: Vec<f64>,
    /// Orthonormal basis of the centered columns, one vector per order 1..=order.
    q: Vec<Vec<f64>>,
    /// Upper-triangular factor, row-major `r[i][j]`, `j ≥ i`.
    r: Vec<Vec<f64>>,
    /// `qᵀ y_c`.
    qty: Vec<f64>,
    /// Residual sum of squares after each prefix, index 0 = total sum of squares.
    rss: Vec<f64>,
}

impl NestedLeastSquares {
    /// `design` columns are the basis functions of orders `0..=order`; column 0
    /// is treated as the intercept and skipped.
    pub fn new(design: &DMatrix<f64>, y: &[f64]) -> Result<Self> {
        let n = design.nrows();
        if y.len() != n {
            return Err(Error::Dimension {
                expected: n,
                got: y.len(),
            });
        }
        if n == 0 {
            return Err(Error::Empty);
        }
        let order = design.ncols().saturating_sub(1);
        let y_mean = y.iter().sum::<f64>() / n as f64;
        let mut resid: Vec<f64> = y.iter().map(|v| v - y_mean).collect();
        let tss: f64 = resid.iter().map(|v| v * v).sum();

        let mut q: Vec<Vec<f64>> = Vec::with_capacity(order);
        let mut r: Vec<Vec<f64>> = Vec::with_capacity(order);
        let mut qty = Vec::with_capacity(order);
        let mut rss = Vec::with_capacity(order + 1);
        let mut col_means = Vec::with_capacity(order);
        rss.push(tss);

        for j in 1..=order {
            let col = design.column(j);
            let mean = col.iter().sum::<f64>() / n as f64;
            col_means.push(mean);
            let mut v: Vec<f64> = col.iter().map(|c| c - mean).collect();
            let norm0 = dot(&v, &v).sqrt();
            let mut coeffs = vec![0.0; j];
            // two passes of modified Gram–Schmidt
            for _ in 0..2 {
                for (i, qi) in q.iter().enumerate() {
                    let c = dot(qi, &v);
                    coeffs[i] += c;
                    axpy(-c, qi, &mut v);
                }
            }
            let norm = dot(&v, &v).sqrt();
            if norm0 == 0.0 || norm <= RANK_TOL * norm0 {
                return Err(Error::RankDeficient { column: j });
            }
            v.iter_mut().for_each(|x| *x /= norm);
            coeffs[j - 1] = norm;
            for (i, c) in coeffs.iter().enumerate().take(j - 1) {
                r[i].push(*c);
            }
            r.push(vec![norm]);
            let c = dot(&v, &resid);
            axpy(-c, &v, &mut resid);
            qty.push(c);
            rss.push(dot(&resid, &resid));
            q.push(v);
        }

        Ok(Self {
            n,
            y_mean,
            col_means,
            q,
            r,
            qty,
            rss,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.q.len()
    }

    pub fn y_mean(&self) -> f64 {
        self.y_mean
    }

    pub fn total_sum_of_squares(&self) -> f64 {
        self.rss[0]
    }

    pub fn rss(&self, k: usize) -> f64 {
        self.rss[k]
    }

    /// `R²_k`, zero when the response has no variation.
    pub fn r2(&self, k: usize) -> f64 {
        let tss = self.rss[0];
        if tss <= 0.0 {
            return 0.0;
        }
        (1.0 - self.rss[k] / tss).clamp(0.0, 1.0)
    }

    /// `1 − R²_k` computed from the residual directly.
    pub fn one_minus_r2(&self, k: usize) -> f64 {
        let tss = self.rss[0];
        if tss <= 0.0 {
            return 1.0;
        }
        (self.rss[k] / tss).clamp(0.0, 1.0)
    }

    /// Least-squares coefficients `(λ̂_0, …, λ̂_k)` of the order-`k` model in
    /// the original (uncentered) basis.
    pub fn coefficients(&self, k: usize) -> Vec<f64> {
        let mut slopes = vec![0.0; k];
        for i in (0..k).rev() {
            let mut s = self.qty[i];
            for (j, slope) in slopes.iter().enumerate().take(k).skip(i + 1) {
                s -= self.r[i][j - i] * slope;
            }
            slopes[i] = s / self.r[i][0];
        }
        let intercept = self.y_mean - slopes.iter().zip(&self.col_means).map(|(b, m)| b * m).sum::<f64>();
        let mut out = Vec::with_capacity(k + 1);
        out.push(intercept);
        out.extend(slopes);
        out
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Householder least squares. Returns `None` if the design is numerically
/// rank deficient.
pub fn least_squares(design: &DMatrix<f64>, y: &[f64]) -> Option<Vec<f64>> {
    let (n, p) = design.shape();
    if n < p || p == 0 {
        return None;
    }
    let qr = design.clone().qr();
    let r = qr.r();
    let max_diag = (0..p).map(|i| r[(i, i)].abs()).fold(0.0, f64::max);
    if max_diag == 0.0 || (0..p).any(|i| r[(i, i)].abs() <= 1e-12 * max_diag) {
        return None;
    }
    let mut rhs = DVector::from_column_slice(y);
    qr.q_tr_mul(&mut rhs);
    let rhs = rhs.rows(0, p).into_owned();
    r.solve_upper_triangular(&rhs).map(|c| c.as_slice().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{build_design, Basis};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Normal-equations oracle: solve (XᵀX) b = Xᵀy with an LU factorization.
    fn normal_equations_r2(x: &DMatrix<f64>, y: &[f64]) -> f64 {
        let yv = DVector::from_column_slice(y);
        let xtx = x.transpose() * x;
        let xty = x.transpose() * &yv;
        let b = xtx.lu().solve(&xty).unwrap();
        let fitted = x * b;
        let mean = yv.mean();
        let rss: f64 = (&yv - fitted).iter().map(|e| e * e).sum();
        let tss: f64 = yv.iter().map(|v| (v - mean) * (v - mean)).sum();
        1.0 - rss / tss
    }

    #[test]
    fn r2_matches_normal_equations() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u: Vec<f64> = (0..80).map(|_| rng.random::<f64>()).collect();
        let y: Vec<f64> = (0..80).map(|_| rng.random::<f64>()).collect();
        let d = build_design(&u, Basis::Legendre, 6).unwrap();
        let nls = NestedLeastSquares::new(&d.values, &y).unwrap();
        for k in 0..=6 {
            let sub = d.values.columns(0, k + 1).into_owned();
            let oracle = if k == 0 { 0.0 } else { normal_equations_r2(&sub, &y) };
            assert!((nls.r2(k) - oracle).abs() < 1e-10, "k={k}");
            let coef = nls.coefficients(k);
            let householder = least_squares(&sub, &y).unwrap();
            for (a, b) in coef.iter().zip(&householder) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn rank_deficiency_names_column() {
        let mut d = DMatrix::from_fn(10, 3, |i, j| (i as f64 + 1.0).powi(j as i32));
        let c1 = d.column(1).into_owned();
        d.set_column(2, &(c1 * 2.0));
        let y: Vec<f64> = (0..10).map(|i| i as f64).collect();
        assert!(matches!(
            NestedLeastSquares::new(&d, &y),
            Err(Error::RankDeficient { column: 2 })
        ));
        assert!(least_squares(&d, &y).is_none());
    }
}
