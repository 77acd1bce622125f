//! Adaptive Gauss–Kronrod integration and fixed Gaussian rules.
//!
//! The adaptive integrator works on vector-valued integrands so that several
//! integrals sharing the same nodes (for example a normalizer and a posterior
//! moment) are refined together.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, SymmetricEigen};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

// 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Controls for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 0.0,
            max_intervals: 400,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult<const D: usize> {
    pub value: [f64; D],
    pub error: [f64; D],
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel<const D: usize> {
    a: f64,
    b: f64,
    value: [f64; D],
    error: [f64; D],
    // error of the component that governs refinement
    key: f64,
}

impl<const D: usize> PartialEq for Panel<D> {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key
    }
}
impl<const D: usize> Eq for Panel<D> {}
impl<const D: usize> PartialOrd for Panel<D> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<const D: usize> Ord for Panel<D> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key.total_cmp(&other.key)
    }
}

fn kronrod_panel<const D: usize, F>(f: &mut F, a: f64, b: f64) -> Panel<D>
where
    F: FnMut(f64) -> [f64; D],
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = [0.0; D];
    let mut gauss = [0.0; D];
    for d in 0..D {
        kron[d] = WGK[7] * fc[d];
        gauss[d] = WG[3] * fc[d];
    }
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        for d in 0..D {
            kron[d] += w * (f1[d] + f2[d]);
            if j % 2 == 1 {
                gauss[d] += WG[j / 2] * (f1[d] + f2[d]);
            }
        }
    }
    let mut value = [0.0; D];
    let mut error = [0.0; D];
    for d in 0..D {
        value[d] = kron[d] * half;
        error[d] = ((kron[d] - gauss[d]) * half).abs();
    }
    let key = error.iter().cloned().fold(0.0, f64::max);
    Panel {
        a,
        b,
        value,
        error,
        key,
    }
}

/// Adaptive bisection with 15-point Gauss–Kronrod panels on `[a, b]`.
///
/// Converged when the summed error estimate of every component falls below
/// `max(abs_tol, rel_tol * |value|)`.
pub fn integrate<const D: usize, F>(mut f: F, a: f64, b: f64, cfg: QuadConfig) -> Result<QuadResult<D>>
where
    F: FnMut(f64) -> [f64; D],
{
    if !(a.is_finite() && b.is_finite()) || b < a {
        return Err(Error::InvalidArgument(format!(
            "integration bounds [{a}, {b}] must be finite and ordered"
        )));
    }
    let mut heap = BinaryHeap::new();
    let first = kronrod_panel(&mut f, a, b);
    let mut evaluations = 15;
    let mut total = first.value;
    let mut err = first.error;
    heap.push(first);

    let converged =
        |total: &[f64; D], err: &[f64; D]| (0..D).all(|d| err[d] <= cfg.abs_tol.max(cfg.rel_tol * total[d].abs()));

    while !converged(&total, &err) {
        if heap.len() >= cfg.max_intervals {
            let mut worst: Vec<Panel<D>> = heap.into_sorted_vec();
            worst.reverse();
            let trace = worst
                .iter()
                .take(5)
                .map(|p| format!("[{:.6e}, {:.6e}] err {:.3e}", p.a, p.b, p.key))
                .collect::<Vec<_>>()
                .join("; ");
            return Err(Error::Quadrature { evaluations, trace });
        }
        let worst = heap.pop().expect("heap is non-empty");
        let mid = 0.5 * (worst.a + worst.b);
        let left = kronrod_panel(&mut f, worst.a, mid);
        let right = kronrod_panel(&mut f, mid, worst.b);
        evaluations += 30;
        for d in 0..D {
            total[d] += left.value[d] + right.value[d] - worst.value[d];
            err[d] += left.error[d] + right.error[d] - worst.error[d];
        }
        heap.push(left);
        heap.push(right);
    }

    // Re-sum to shed the drift of incremental updates.
    let mut value = [0.0; D];
    let mut error = [0.0; D];
    for p in heap.iter() {
        for d in 0..D {
            value[d] += p.value[d];
            error[d] += p.error[d];
        }
    }
    Ok(QuadResult {
        value,
        error,
        evaluations,
    })
}

/// Scalar convenience wrapper around [`integrate`].
pub fn integrate_scalar<F>(mut f: F, a: f64, b: f64, cfg: QuadConfig) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    integrate(|x| [f(x)], a, b, cfg).map(|r| r.value[0])
}

/// A fixed rule: nodes and weights.
#[derive(Debug, Clone)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Golub–Welsch for a symmetric Jacobi matrix with zero diagonal.
fn golub_welsch(off_diag: &[f64], mu0: f64) -> Rule {
    let m = off_diag.len() + 1;
    let mut jac = DMatrix::<f64>::zeros(m, m);
    for (i, &b) in off_diag.iter().enumerate() {
        jac[(i, i + 1)] = b;
        jac[(i + 1, i)] = b;
    }
    let eig = SymmetricEigen::new(jac);
    let mut pairs: Vec<(f64, f64)> = (0..m)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (eig.eigenvalues[i], mu0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Rule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    }
}

/// Gauss–Hermite rule for `∫ f(t) exp(-t²) dt`.
pub fn gauss_hermite(m: usize) -> Rule {
    assert!(m >= 1);
    let off: Vec<f64> = (1..m).map(|i| (i as f64 / 2.0).sqrt()).collect();
    golub_welsch(&off, std::f64::consts::PI.sqrt())
}

/// Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(m: usize) -> Rule {
    assert!(m >= 1);
    let off: Vec<f64> = (1..m)
        .map(|i| {
            let i = i as f64;
            i / (4.0 * i * i - 1.0).sqrt()
        })
        .collect();
    golub_welsch(&off, 2.0)
}
