//! Select the order of a Bernstein fit to noisy data and print the curve.

use smoothsel::selector::{fit, FitConfig};
use smoothsel::simulation::{generate, MeanFn, Scenario};

fn main() -> smoothsel::error::Result<()> {
    let scenario = Scenario::new(MeanFn::Poly5, 200, 2.0, 1, 11);
    let (x, y) = generate(&scenario, 0)?;

    let result = fit(&x, &y, &FitConfig::default())?;
    println!("selected order: {}", result.selected_order);
    println!("shrinkage:      {:.4}", result.shrinkage);
    println!("posterior over orders (top 5):");
    let mut ranked: Vec<(usize, f64)> = result.posterior_over_orders.iter().copied().enumerate().collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1));
    for (k, p) in ranked.into_iter().take(5) {
        println!("  N = {k:2}  p = {p:.4}");
    }

    println!("\n{:>6} {:>10} {:>10}", "x", "fitted", "truth");
    for i in 0..=10 {
        let v = i as f64 / 10.0;
        println!("{v:6.2} {:10.4} {:10.4}", result.predict(v), MeanFn::Poly5.eval(v));
    }
    Ok(())
}
