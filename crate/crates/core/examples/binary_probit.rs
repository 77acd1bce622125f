//! Order selection for a 0/1 response under a probit link.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use smoothsel::binary::{fit_binary, orthant_probability, probit_probability, BinaryConfig, OrthantSpec};
use smoothsel::selector::FitConfig;
use smoothsel::special::norm_cdf;

fn main() -> smoothsel::error::Result<()> {
    // orthant probability of two independent normals, against the exact product
    let mean = [0.3, -0.5];
    let orthant = OrthantSpec {
        signs: vec![true, false],
    };
    let est = orthant_probability(&mean, &DMatrix::identity(2, 2), &orthant, 20_000, 1)?;
    let exact = norm_cdf(0.3) * norm_cdf(0.5);
    println!(
        "orthant: {:.5} +/- {:.5} (exact {exact:.5})",
        est.probability, est.std_error
    );

    // P(y = 1 | x) = Φ(2x − 1)
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let x: Vec<f64> = (0..150).map(|_| rng.random::<f64>()).collect();
    let y: Vec<f64> = x
        .iter()
        .map(|&v| {
            if rng.random::<f64>() < norm_cdf(2.0 * v - 1.0) {
                1.0
            } else {
                0.0
            }
        })
        .collect();

    let config = FitConfig {
        domain: Some((0.0, 1.0)),
        ..FitConfig::default()
    };
    let result = fit_binary(&x, &y, &config, &BinaryConfig::default())?;
    println!("selected order: {}", result.selected_order);
    for (k, p) in result.posterior_over_orders.iter().enumerate().take(5) {
        println!("  N = {k}  p = {p:.4}");
    }
    for v in [0.1, 0.5, 0.9] {
        println!(
            "P(y=1 | x={v}) = {:.3} (truth {:.3})",
            probit_probability(&result.lambda_hat, v),
            norm_cdf(2.0 * v - 1.0)
        );
    }
    Ok(())
}
