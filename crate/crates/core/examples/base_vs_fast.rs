//! Base versus fast controller on the reference setting: 10 real nodes,
//! 3 real classes, 2 resources, β = 0.1, 50 runs of 10^4 slots.
//!
//! Prints the final relative gap band, constraint values and per-slot update
//! times, and writes the CSV files to `out/base_vs_fast/`.
//!
//! ```bash
//! cargo run --release --example base_vs_fast -- [runs] [horizon]
//! ```

use std::path::PathBuf;

use placement_bandit::harness::{run_experiment, AlgorithmSpec, ExperimentConfig};

fn main() -> placement_bandit::Result<()> {
    let mut args = std::env::args().skip(1);
    let runs = args.next().and_then(|a| a.parse().ok()).unwrap_or(50);
    let horizon = args.next().and_then(|a| a.parse().ok()).unwrap_or(10_000);

    let config = ExperimentConfig {
        runs,
        horizon,
        algorithms: vec![AlgorithmSpec::base(), AlgorithmSpec::fast(1.05)],
        out: Some(PathBuf::from("out/base_vs_fast")),
        ..Default::default()
    };
    let result = run_experiment(&config)?;

    println!("R = {runs}, T = {horizon}, theorem bound on R(T)/T = {:.3}", result.theorem_bound);
    println!(
        "{:<14} {:>9} {:>9} {:>9} {:>10} {:>10} {:>9} {:>8}",
        "algorithm", "gap_mean", "gap_min", "gap_max", "cons_max", "viol_frac", "tau_ms", "solves"
    );
    for alg in &result.algorithms {
        let (gm, gmin, gmax) = alg.aggregate.gap.last();
        let (_, _, cmax) = alg.aggregate.constraint.last();
        let viol = alg.traces.iter().map(|t| t.violation_fraction()).sum::<f64>()
            / alg.traces.len() as f64;
        println!(
            "{:<14} {:>9.4} {:>9.4} {:>9.4} {:>10.4} {:>10.4} {:>9.4} {:>8}",
            alg.label, gm, gmin, gmax, cmax, viol, alg.timing.tau_mean_ms, alg.timing.lp_solves
        );
    }
    Ok(())
}
