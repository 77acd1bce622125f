//! Bayesian order selection against 5-fold cross-validation on one dataset.

use smoothsel::basis::{max_order, DEFAULT_ORDER_CAP};
use smoothsel::cv::{cv_select, DEFAULT_FOLDS};
use smoothsel::selector::{fit, FitConfig};
use smoothsel::simulation::{generate, sup_norm, MeanFn, Scenario, DEFAULT_SUPNORM_GRID};

fn main() -> smoothsel::error::Result<()> {
    let scenario = Scenario::new(MeanFn::PwLinear, 500, 2.0, 1, 3);
    let (x, y) = generate(&scenario, 0)?;
    let config = FitConfig {
        domain: Some(scenario.domain),
        ..FitConfig::default()
    };

    let bayes = fit(&x, &y, &config)?;
    let cv = cv_select(&x, &y, max_order(x.len(), DEFAULT_ORDER_CAP), DEFAULT_FOLDS, 1)?;

    let sup = |f: &dyn Fn(f64) -> f64| sup_norm(f, &scenario.mean_fn, scenario.domain, DEFAULT_SUPNORM_GRID);
    println!("{:>8} {:>6} {:>10} {:>12}", "method", "order", "sup-norm", "seconds");
    println!(
        "{:>8} {:>6} {:10.4} {:12.2e}",
        "bayes",
        bayes.selected_order,
        sup(&|v| bayes.predict(v)),
        bayes.timing_seconds
    );
    println!(
        "{:>8} {:>6} {:10.4} {:12.2e}",
        "cv",
        cv.selected_order,
        sup(&|v| cv.predict(v)),
        cv.wall_clock
    );
    println!(
        "{:>8} {:>6} {:10.4}",
        "full",
        bayes.diagnostics.max_order,
        sup(&|v| bayes.predict_full(v))
    );
    Ok(())
}
