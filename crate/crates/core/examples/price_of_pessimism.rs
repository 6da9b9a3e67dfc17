//! How much of the remaining gap comes from each confidence bound.
//!
//! Solves the program with the true parameters except for one quantity, which
//! is replaced by the bound the controller would use after `t` slots with
//! every cell sampled `t / (number of nodes)` times. Scored on true costs.
//! The pessimistic load bound alone accounts for most of the gap, and only
//! shrinks like `sqrt(ln t / t)`.

use ndarray::Array3;
use placement_bandit::harness::Oracle;
use placement_bandit::{lower_confidence, sample_instance, solve_placement_lp, upper_confidence, KappaTensor};

fn main() -> placement_bandit::Result<()> {
    let instances = 20;
    println!("{:>8} {:>14} {:>14} {:>14}", "t", "kappa_upper", "lambda_lower", "cost_lower");
    for t in [1_000u64, 10_000, 100_000] {
        let mut sums = [0.0; 3];
        for seed in 0..instances {
            let inst = sample_instance(10, 3, 2, 0.1, 1_000_000 + seed)?;
            let oracle = Oracle::new(&inst)?;
            let (n, m, k) = inst.demand_mean().dim();
            let per_cell = t / (n as u64 - 1);
            let kappa = inst.kappa();
            let scale = 10.0;

            let mut kappa_up = Array3::zeros((n, m, k));
            for i in 0..n - 1 {
                for j in 0..m - 1 {
                    for r in 0..k {
                        let v = kappa.get(i, j, r) / scale;
                        kappa_up[[i, j, r]] = scale * upper_confidence(v.min(1.0), t, t + 1);
                    }
                }
            }
            let kappa_up = KappaTensor::new(kappa_up)?;
            let lambda_lo = inst.arrival_prob().mapv(|l| lower_confidence(l, t, t + 1));
            let mut cost_lo = inst.cost_mean().clone();
            for i in 0..n - 1 {
                for j in 0..m - 1 {
                    cost_lo[[i, j]] = lower_confidence(cost_lo[[i, j]], per_cell, t + 1);
                }
            }

            let variants = [
                solve_placement_lp(inst.cost_mean(), inst.arrival_prob(), &kappa_up)?,
                solve_placement_lp(inst.cost_mean(), &lambda_lo, &kappa)?,
                solve_placement_lp(&cost_lo, inst.arrival_prob(), &kappa)?,
            ];
            for (s, p) in sums.iter_mut().zip(&variants) {
                *s += oracle.relative_gap(p)?.value;
            }
        }
        let n = instances as f64;
        println!("{t:>8} {:>14.4} {:>14.4} {:>14.4}", sums[0] / n, sums[1] / n, sums[2] / n);
    }
    Ok(())
}
