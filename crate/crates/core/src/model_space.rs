//! The nested polynomial model space and its heredity prior.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// The order-`k` model: terms `1..=k` included, `k+1..=N` excluded.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelIndex {
    pub order: usize,
    pub inclusion: Vec<bool>,
}

impl ModelIndex {
    pub fn new(order: usize, max_order: usize) -> Self {
        Self {
            order,
            inclusion: (1..=max_order).map(|j| j <= order).collect(),
        }
    }

    /// Number of regression coefficients, intercept included.
    pub fn n_coefficients(&self) -> usize {
        self.order + 1
    }

    /// True when no excluded term precedes an included one.
    pub fn respects_heredity(&self) -> bool {
        self.inclusion.windows(2).all(|w| w[0] || !w[1])
    }
}

pub fn enumerate_models(max_order: usize) -> Vec<ModelIndex> {
    (0..=max_order).map(|k| ModelIndex::new(k, max_order)).collect()
}

/// Prior over orders under immediate inheritance with `Beta(a, b)` inclusion
/// probabilities.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelPrior {
    pub a: f64,
    pub b: f64,
    pub probs: Vec<f64>,
}

impl ModelPrior {
    pub fn max_order(&self) -> usize {
        self.probs.len() - 1
    }

    /// The same prior restricted to orders `0..=max_order` and renormalized.
    pub fn truncated(&self, max_order: usize) -> Result<Self> {
        model_prior(max_order.min(self.max_order()), self.a, self.b)
    }
}

/// `π(γ_k) = ρ^k (1 − ρ)` for `k < N` and `π(γ_N) = ρ^N`, with `ρ = a/(a+b)`.
pub fn model_prior(max_order: usize, a: f64, b: f64) -> Result<ModelPrior> {
    if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "model prior hyperparameters must be positive, got a = {a}, b = {b}"
        )));
    }
    let rho = a / (a + b);
    let mut probs = Vec::with_capacity(max_order + 1);
    let mut mass = 1.0;
    for _ in 0..max_order {
        probs.push(mass * (1.0 - rho));
        mass *= rho;
    }
    probs.push(mass);
    Ok(ModelPrior { a, b, probs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn prior_examples() {
        assert_eq!(model_prior(2, 1.0, 1.0).unwrap().probs, vec![0.5, 0.25, 0.25]);
        assert_eq!(model_prior(0, 3.0, 0.5).unwrap().probs, vec![1.0]);
        assert_eq!(model_prior(3, 1.0, 1.0).unwrap().probs, vec![0.5, 0.25, 0.125, 0.125]);
        assert!(model_prior(3, 0.0, 1.0).is_err());
        assert!(model_prior(3, 1.0, -2.0).is_err());
    }

    #[test]
    fn enumeration_examples() {
        assert_eq!(
            enumerate_models(0),
            vec![ModelIndex {
                order: 0,
                inclusion: vec![]
            }]
        );
        let m2: Vec<Vec<bool>> = enumerate_models(2).into_iter().map(|m| m.inclusion).collect();
        assert_eq!(m2, vec![vec![false, false], vec![true, false], vec![true, true]]);
        let m21 = enumerate_models(21);
        assert_eq!(m21.len(), 22);
        for (k, m) in m21.iter().enumerate() {
            assert_eq!(m.order, k);
            assert_eq!(m.n_coefficients(), k + 1);
            assert!(m.respects_heredity());
        }
    }

    #[test]
    fn uniform_prior_favours_parsimony() {
        let p = model_prior(30, 1.0, 1.0).unwrap().probs;
        assert!(p.windows(2).all(|w| w[0] >= w[1]));
    }

    proptest! {
        #[test]
        fn prior_sums_to_one(n in 0usize..80, a in 0.01f64..50.0, b in 0.01f64..50.0) {
            let p = model_prior(n, a, b).unwrap();
            let s: f64 = p.probs.iter().sum();
            prop_assert!((s - 1.0).abs() < 1e-12);
            prop_assert!(p.probs.iter().all(|&v| v > 0.0));
        }

        #[test]
        fn no_model_breaks_heredity(n in 0usize..70) {
            prop_assert!(enumerate_models(n).iter().all(|m| m.respects_heredity()));
        }
    }
}
