//! Drive the environment and a controller slot by slot, without the harness.
//!
//! This is the loop the harness runs internally. It is useful when plugging
//! the controller into another simulator: call `maybe_update`, reveal the
//! arrival, `decide`, observe the cost, `record`.

use placement_bandit::harness::Oracle;
use placement_bandit::rng::{keyed_rng, Stream};
use placement_bandit::{sample_instance, Controller, ControllerConfig, Environment, EnvironmentConfig};

fn main() -> placement_bandit::Result<()> {
    let horizon = 5_000;
    let seed = 3;
    let instance = sample_instance(10, 3, 2, 0.1, 42)?;
    let oracle = Oracle::new(&instance)?;

    let mut env = Environment::new(EnvironmentConfig {
        instance: instance.clone(),
        seed,
        horizon,
    })?;
    let mut ctl = Controller::new(
        ControllerConfig::fast(horizon, 1.05),
        instance.capacity(),
        instance.n_classes(),
    )?;

    let mut total_cost = 0.0;
    for t in 1..=horizon {
        let updated = ctl.maybe_update(t)?;
        let obs = env.step_arrival()?;
        let node = ctl.decide(&obs, &mut keyed_rng(seed, t, Stream::Decision))?;
        let cost = env.submit_placement(node)?;
        ctl.record(&obs, node, cost)?;
        total_cost += cost;

        if updated && t >= 100 {
            let gap = oracle.relative_gap(ctl.policy())?;
            println!(
                "slot {t:>5}: LP re-solved (#{:>3}), relative gap {:.4}, true max load {:.4}",
                ctl.lp_solves(),
                gap.value,
                oracle.max_constraint(ctl.policy())?
            );
        }
    }
    println!(
        "average realized cost {:.4} against f* = {:.4}",
        total_cost / horizon as f64,
        oracle.f_star
    );
    Ok(())
}
