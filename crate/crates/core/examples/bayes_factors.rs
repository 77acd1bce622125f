//! Log Bayes factors and shrinkage under the three mixing priors.

use smoothsel::gprior::{order_evidence, ModelFitStats, OmegaPrior};

fn main() -> smoothsel::error::Result<()> {
    let priors = [OmegaPrior::Intrinsic, OmegaPrior::zellner_siow(), OmegaPrior::hyper_g()];
    let n = 200;
    println!("{:>4} {:>6} {:>14} {:>10} {:>10}", "q_k", "R^2", "prior", "ln BF", "xi");
    for (q_k, r2) in [(2, 0.01), (2, 0.3), (5, 0.3), (5, 0.6), (12, 0.62)] {
        let stats = ModelFitStats::new(n, q_k, r2);
        for prior in &priors {
            let ev = order_evidence(&stats, prior)?;
            println!(
                "{q_k:4} {r2:6.2} {:>14} {:10.3} {:10.4}",
                prior.name(),
                ev.log_bf,
                ev.shrinkage
            );
        }
    }
    Ok(())
}
