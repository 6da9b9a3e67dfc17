//! Effect of the fast-mode ratio ρ on convergence and spread.
//!
//! Larger ρ means fewer LP solves and a policy that stays stale for longer,
//! which shows up as a wider band across runs.
//!
//! ```bash
//! cargo run --release --example rho_sweep -- [runs] [horizon]
//! ```

use std::path::PathBuf;

use placement_bandit::harness::sweep::{sweep_rho, DEFAULT_RHOS};
use placement_bandit::ExperimentConfig;

fn main() -> placement_bandit::Result<()> {
    let mut args = std::env::args().skip(1);
    let runs = args.next().and_then(|a| a.parse().ok()).unwrap_or(20);
    let horizon = args.next().and_then(|a| a.parse().ok()).unwrap_or(10_000);

    let base = ExperimentConfig {
        runs,
        horizon,
        out: Some(PathBuf::from("out/rho_sweep")),
        ..Default::default()
    };
    let results = sweep_rho(&base, &DEFAULT_RHOS)?;
    let res = &results[0].1;
    println!("{:<14} {:>9} {:>9} {:>9} {:>9} {:>8}", "ratio", "gap_mean", "gap_min", "gap_max", "tau_ms", "solves");
    for alg in &res.algorithms {
        let (m, lo, hi) = alg.aggregate.gap.last();
        println!(
            "{:<14} {:>9.4} {:>9.4} {:>9.4} {:>9.4} {:>8}",
            alg.label, m, lo, hi, alg.timing.tau_mean_ms, alg.timing.lp_solves
        );
    }
    Ok(())
}
