//! Seeded simulator of arrivals, demands and placement costs.
//!
//! Per slot the environment draws the arriving class, then the demand of that
//! class on every node (revealed before placement). The cost is drawn only for
//! the node the controller picks, and only after it picks it.

use ndarray::{Array1, Array2, Array3};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ProblemInstance, INFINITE_CAPACITY};
use crate::rng::{keyed_rng, Stream};

/// Default slot length: 100 arrivals per second.
pub const DEFAULT_SLOT_DURATION_S: f64 = 0.01;

/// Draws a random instance with `n_real_nodes` real nodes and `n_real_classes`
/// real classes; the fictitious node and the null class are appended. Means are
/// Uniform[0, 1], all real capacities equal `beta`, and arrivals are uniform
/// over all classes including the null class.
pub fn sample_instance(
    n_real_nodes: usize,
    n_real_classes: usize,
    n_resources: usize,
    beta: f64,
    seed: u64,
) -> Result<ProblemInstance> {
    if n_real_nodes == 0 || n_real_classes == 0 || n_resources == 0 {
        return Err(Error::InvalidArgument(
            "node, class and resource counts must be positive".into(),
        ));
    }
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::InvalidArgument(format!("beta must be positive, got {beta}")));
    }
    let n = n_real_nodes + 1;
    let m = n_real_classes + 1;
    let k = n_resources;
    let mut rng = keyed_rng(seed, 0, Stream::Instance);

    let mut cost = Array2::zeros((n, m));
    for i in 0..n_real_nodes {
        for j in 0..n_real_classes {
            cost[[i, j]] = rng.gen::<f64>();
        }
    }
    for j in 0..n_real_classes {
        cost[[n - 1, j]] = 1.0;
    }

    let mut demand = Array3::zeros((n, m, k));
    for i in 0..n_real_nodes {
        for j in 0..n_real_classes {
            for kk in 0..k {
                demand[[i, j, kk]] = rng.gen::<f64>();
            }
        }
    }

    let mut capacity = Array2::from_elem((n, k), beta);
    capacity.row_mut(n - 1).fill(INFINITE_CAPACITY);

    let mut arrival = Array1::from_elem(m, 1.0 / m as f64);
    // absorb rounding so the law sums to one
    let rest: f64 = arrival.iter().take(m - 1).sum();
    arrival[m - 1] = 1.0 - rest;

    ProblemInstance::new(cost, demand, capacity, arrival, DEFAULT_SLOT_DURATION_S)
}

#[derive(Debug, Clone)]
pub struct EnvironmentConfig {
    pub instance: ProblemInstance,
    pub seed: u64,
    pub horizon: u64,
}

/// What the controller sees when a slot opens.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlotObservation {
    pub slot: u64,
    pub arrived_class: usize,
    /// Realized demand `A_{i, j(t), k}` for every node `i` (rows) and resource `k`.
    pub demands: Array2<f64>,
}

#[derive(Debug, Clone)]
struct Pending {
    slot: u64,
    class: usize,
    submitted: bool,
}

#[derive(Debug, Clone)]
pub struct Environment {
    config: EnvironmentConfig,
    slot: u64,
    pending: Option<Pending>,
}

impl Environment {
    pub fn new(config: EnvironmentConfig) -> Result<Self> {
        if config.horizon == 0 {
            return Err(Error::InvalidArgument("horizon must be at least 1".into()));
        }
        Ok(Self {
            config,
            slot: 0,
            pending: None,
        })
    }

    pub fn instance(&self) -> &ProblemInstance {
        &self.config.instance
    }

    pub fn horizon(&self) -> u64 {
        self.config.horizon
    }

    /// Last slot handed out (0 before the first arrival).
    pub fn slot(&self) -> u64 {
        self.slot
    }

    /// Opens the next slot.
    pub fn step_arrival(&mut self) -> Result<SlotObservation> {
        if let Some(p) = &self.pending {
            if !p.submitted {
                return Err(Error::PlacementPending { slot: p.slot });
            }
        }
        if self.slot >= self.config.horizon {
            return Err(Error::HorizonExhausted {
                horizon: self.config.horizon,
            });
        }
        self.slot += 1;
        let t = self.slot;
        let inst = &self.config.instance;
        let (n, m, k) = (inst.n_nodes(), inst.n_classes(), inst.n_resources());

        let mut rng = keyed_rng(self.config.seed, t, Stream::Arrival);
        let u: f64 = rng.gen();
        let lambda = inst.arrival_prob();
        let mut class = m - 1;
        let mut acc = 0.0;
        for j in 0..m {
            acc += lambda[j];
            if u < acc && lambda[j] > 0.0 {
                class = j;
                break;
            }
        }
        // rounding can leave u above the final partial sum; fall back to the last class with mass
        if u >= acc {
            class = (0..m).rev().find(|&j| lambda[j] > 0.0).unwrap_or(m - 1);
        }

        let mut demands = Array2::zeros((n, k));
        if class != inst.null_class() {
            let mut rng = keyed_rng(self.config.seed, t, Stream::Demand);
            let a = inst.demand_mean();
            for i in 0..n - 1 {
                for kk in 0..k {
                    if rng.gen::<f64>() < a[[i, class, kk]] {
                        demands[[i, kk]] = 1.0;
                    }
                }
            }
        }

        self.pending = Some(Pending {
            slot: t,
            class,
            submitted: false,
        });
        Ok(SlotObservation {
            slot: t,
            arrived_class: class,
            demands,
        })
    }

    /// Places the pending function on `node` and reveals its realized cost.
    pub fn submit_placement(&mut self, node: usize) -> Result<f64> {
        let n_nodes = self.config.instance.n_nodes();
        let pending = self.pending.as_mut().ok_or(Error::NoPendingArrival)?;
        if pending.submitted {
            return Err(Error::DoubleSubmission { slot: pending.slot });
        }
        if node >= n_nodes {
            return Err(Error::NodeOutOfRange { node, n_nodes });
        }
        pending.submitted = true;
        let inst = &self.config.instance;
        if pending.class == inst.null_class() {
            return Ok(0.0);
        }
        let mean = inst.cost_mean()[[node, pending.class]];
        // one uniform per slot, independent of which node was chosen
        let u: f64 = keyed_rng(self.config.seed, pending.slot, Stream::Cost).gen();
        Ok(if u < mean { 1.0 } else { 0.0 })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn env_for(instance: ProblemInstance, horizon: u64) -> Environment {
        Environment::new(EnvironmentConfig {
            instance,
            seed: 11,
            horizon,
        })
        .unwrap()
    }

    #[test]
    fn sample_instance_is_deterministic() {
        let a = sample_instance(4, 3, 2, 0.1, 5).unwrap();
        let b = sample_instance(4, 3, 2, 0.1, 5).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, sample_instance(4, 3, 2, 0.1, 6).unwrap());
    }

    #[test]
    fn sample_instance_appends_fictitious_entities() {
        let inst = sample_instance(10, 3, 2, 0.1, 1).unwrap();
        assert_eq!(inst.n_nodes(), 11);
        assert_eq!(inst.n_classes(), 4);
        for j in 0..3 {
            assert_eq!(inst.cost_mean()[[10, j]], 1.0);
        }
        assert!(inst.capacity().row(10).iter().all(|b| b.is_infinite()));
        assert!(inst.arrival_prob().iter().all(|&l| (l - 0.25).abs() < 1e-15));
    }

    #[test]
    fn sample_instance_rejects_bad_arguments() {
        assert!(sample_instance(0, 3, 2, 0.1, 1).is_err());
        assert!(sample_instance(3, 3, 2, 0.0, 1).is_err());
        assert!(sample_instance(3, 3, 0, 0.1, 1).is_err());
    }

    #[test]
    fn stepping_past_horizon_fails() {
        let mut env = env_for(sample_instance(2, 1, 1, 0.1, 1).unwrap(), 1);
        env.step_arrival().unwrap();
        env.submit_placement(0).unwrap();
        assert!(matches!(
            env.step_arrival(),
            Err(Error::HorizonExhausted { .. })
        ));
    }

    #[test]
    fn placement_protocol_errors() {
        let mut env = env_for(sample_instance(2, 1, 1, 0.1, 1).unwrap(), 5);
        assert!(matches!(env.submit_placement(0), Err(Error::NoPendingArrival)));
        env.step_arrival().unwrap();
        assert!(matches!(env.step_arrival(), Err(Error::PlacementPending { .. })));
        assert!(matches!(
            env.submit_placement(9),
            Err(Error::NodeOutOfRange { .. })
        ));
        env.submit_placement(1).unwrap();
        assert!(matches!(
            env.submit_placement(1),
            Err(Error::DoubleSubmission { .. })
        ));
    }

    #[test]
    fn null_point_mass_gives_empty_slots() {
        let inst = sample_instance(3, 2, 2, 0.1, 1)
            .unwrap()
            .with_arrival_prob(array![0.0, 0.0, 1.0])
            .unwrap();
        let mut env = env_for(inst, 50);
        for _ in 0..50 {
            let obs = env.step_arrival().unwrap();
            assert_eq!(obs.arrived_class, 2);
            assert!(obs.demands.iter().all(|&a| a == 0.0));
            assert_eq!(env.submit_placement(0).unwrap(), 0.0);
        }
    }

    #[test]
    fn fictitious_node_always_costs_one() {
        let inst = sample_instance(3, 2, 1, 0.1, 2)
            .unwrap()
            .with_arrival_prob(array![0.5, 0.5, 0.0])
            .unwrap();
        let mut env = env_for(inst, 200);
        for _ in 0..200 {
            env.step_arrival().unwrap();
            assert_eq!(env.submit_placement(3).unwrap(), 1.0);
        }
    }
}
