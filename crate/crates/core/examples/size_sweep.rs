//! Fast-mode update time across problem sizes.
//!
//! ```bash
//! cargo run --release --example size_sweep -- [runs] [horizon]
//! ```

use std::path::PathBuf;

use placement_bandit::harness::sweep::{sweep_sizes, DEFAULT_SIZES};
use placement_bandit::{AlgorithmSpec, ExperimentConfig};

fn main() -> placement_bandit::Result<()> {
    let mut args = std::env::args().skip(1);
    let runs = args.next().and_then(|a| a.parse().ok()).unwrap_or(5);
    let horizon = args.next().and_then(|a| a.parse().ok()).unwrap_or(10_000);

    let base = ExperimentConfig {
        runs,
        horizon,
        jobs: Some(1),
        algorithms: vec![AlgorithmSpec::fast(1.05)],
        out: Some(PathBuf::from("out/size_sweep")),
        ..Default::default()
    };
    println!("{:<16} {:>10} {:>10} {:>8} {:>9}", "size", "tau_ms", "tau_max", "solves", "gap_T");
    for (name, res) in sweep_sizes(&base, &DEFAULT_SIZES)? {
        let alg = &res.algorithms[0];
        println!(
            "{:<16} {:>10.4} {:>10.4} {:>8} {:>9.4}",
            name,
            alg.timing.tau_mean_ms,
            alg.timing.tau_max_ms,
            alg.timing.lp_solves,
            alg.aggregate.gap.last().0
        );
    }
    Ok(())
}
