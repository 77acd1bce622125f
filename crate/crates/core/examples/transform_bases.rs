//! Map coefficients between the shifted Legendre and Bernstein bases.

use smoothsel::basis::{eval_bernstein, eval_legendre};
use smoothsel::transform::{bernstein_to_legendre, build_transform, condition_diagnostic, legendre_to_bernstein};

fn main() -> smoothsel::error::Result<()> {
    // ψ_2(u) = 6u² − 6u + 1
    let lambda = [0.0, 0.0, 1.0];
    let tp = build_transform(2)?;
    let eta = legendre_to_bernstein(&lambda, &tp)?;
    println!("psi_2 in the Bernstein basis of degree 2: {eta:?}");

    for order in [5, 10, 20, 30, 40] {
        let tp = build_transform(order)?;
        let lambda: Vec<f64> = (0..=order).map(|j| 1.0 / (j as f64 + 1.0)).collect();
        let eta = legendre_to_bernstein(&lambda, &tp)?;
        let back = bernstein_to_legendre(&eta, &tp)?;
        let coef_err = lambda.iter().zip(&back).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let curve_err = (0..=2000)
            .map(|i| {
                let u = i as f64 / 2000.0;
                (eval_legendre(&lambda, u) - eval_bernstein(&eta, u)).abs()
            })
            .fold(0.0, f64::max);
        println!(
            "N = {order:2}: |QQ^-1 - I| = {:.1e}  cond = {:.1e}  coef round trip = {coef_err:.1e}  curve gap = {curve_err:.1e}",
            tp.round_trip_error,
            condition_diagnostic(&tp),
        );
    }
    Ok(())
}
