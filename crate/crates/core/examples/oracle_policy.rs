//! Solve the placement program for a known instance.
//!
//! Builds a two-node example by hand (one real node plus the rejection node,
//! one real class plus the null class) whose capacity binds, then a random
//! 5×3×2 instance, and prints the optimal policy and cost of each.

use ndarray::{array, Array3};
use placement_bandit::{max_constraint, oracle_policy, PlacementLp, ProblemInstance};

fn main() -> placement_bandit::Result<()> {
    // Node 0 costs 0 but can only absorb half of the class-0 load.
    let mut demand = Array3::zeros((2, 2, 1));
    demand[[0, 0, 0]] = 1.0;
    let inst = ProblemInstance::new(
        array![[0.0, 0.0], [1.0, 0.0]],
        demand,
        array![[0.25], [f64::INFINITY]],
        array![0.5, 0.5],
        0.01,
    )?;
    let (policy, f_star) = oracle_policy(&inst)?;
    println!("hand-built instance: f* = {f_star:.6}");
    println!("{:.4}", policy.matrix());
    println!("max load = {:.6}\n", max_constraint(&policy, &inst.kappa())?);

    let inst = placement_bandit::sample_instance(4, 2, 2, 0.1, 7)?;
    let lp = PlacementLp::new(inst.cost_mean(), inst.arrival_prob(), &inst.kappa())?;
    let sol = lp.solve()?;
    println!(
        "random instance: f* = {:.6} after {} pivots (tolerances {:e} / {:e})",
        sol.objective, sol.pivots, sol.feasibility_tol, sol.optimality_tol
    );
    println!("{:.4}", sol.policy.matrix());
    println!("max load = {:.6}", max_constraint(&sol.policy, &inst.kappa())?);
    Ok(())
}
