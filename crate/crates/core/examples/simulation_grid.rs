//! A small replicate grid written as CSV, then summarized.

use smoothsel::simulation::{frequency_table, run_grid, summarize, GridOptions, MeanFn, Scenario};

fn main() -> smoothsel::error::Result<()> {
    let scenarios: Vec<Scenario> = [100, 200]
        .into_iter()
        .map(|n| Scenario::new(MeanFn::PwLinear, n, 2.0, 10, 42))
        .collect();
    let opts = GridOptions {
        timing: false,
        ..GridOptions::default()
    };

    let mut csv = Vec::new();
    let records = run_grid(&scenarios, &opts, &mut csv)?;
    print!("{}", String::from_utf8_lossy(&csv));

    println!();
    for s in summarize(&records) {
        println!(
            "n = {}: modal order bayes {} / cv {:?}, median sup-norm bayes {:.3} / cv {:.3?} / full {:.3}",
            s.n,
            s.modal_order_bayes,
            s.modal_order_cv,
            s.median_supnorm_bayes,
            s.median_supnorm_cv,
            s.median_supnorm_full
        );
    }
    for row in frequency_table(&records) {
        println!(
            "{} n={} {:>5} order {:2}: {}",
            row.mean_fn, row.n, row.method, row.order, row.count
        );
    }
    Ok(())
}
