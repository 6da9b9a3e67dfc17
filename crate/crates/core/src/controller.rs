//! The online placement loop.
//!
//! Each slot the controller (maybe) refreshes its policy from the confidence
//! bounds, draws a node from the column of the arrived class, and folds the
//! outcome into its statistics. In base mode the policy is refreshed every
//! slot; in fast mode only on the geometric schedule `⌈ρ^k⌉`. Counters are
//! updated every slot in both modes.

use ndarray::Array2;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::environment::SlotObservation;
use crate::error::{Error, Result};
use crate::estimation::{ConfidenceBounds, ObservationState};
use crate::lp::PlacementLp;
use crate::model::{KappaTensor, Policy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Base,
    Fast,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "base" => Ok(Mode::Base),
            "fast" => Ok(Mode::Fast),
            other => Err(Error::InvalidArgument(format!("unknown mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControllerConfig {
    pub mode: Mode,
    /// Schedule ratio, only used in fast mode.
    pub rho: f64,
    pub exploration: bool,
    pub exploration_floor: f64,
    pub exploration_eps0: f64,
    pub horizon: u64,
    /// Divisor that maps load statistics into [0, 1]; `None` derives it from the capacities.
    pub kappa_scale: Option<f64>,
}

impl ControllerConfig {
    pub fn base(horizon: u64) -> Self {
        Self {
            mode: Mode::Base,
            rho: 1.05,
            exploration: true,
            exploration_floor: 1e-3,
            exploration_eps0: 0.01,
            horizon,
            kappa_scale: None,
        }
    }

    pub fn fast(horizon: u64, rho: f64) -> Self {
        Self {
            mode: Mode::Fast,
            rho,
            ..Self::base(horizon)
        }
    }

    pub fn without_exploration(mut self) -> Self {
        self.exploration = false;
        self
    }

    pub fn validate(&self, n_nodes: usize) -> Result<()> {
        if !(self.rho > 1.0 && self.rho.is_finite()) {
            return Err(Error::InvalidArgument(format!("rho must exceed 1, got {}", self.rho)));
        }
        if self.horizon == 0 {
            return Err(Error::InvalidArgument("horizon must be at least 1".into()));
        }
        if !(self.exploration_floor > 0.0 && self.exploration_floor < 1.0 / n_nodes as f64) {
            return Err(Error::InvalidArgument(format!(
                "exploration floor {} must lie in (0, 1/N) with N = {n_nodes}",
                self.exploration_floor
            )));
        }
        if !(self.exploration_eps0 >= 0.0 && self.exploration_eps0 <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "exploration eps0 {} must lie in [0, 1]",
                self.exploration_eps0
            )));
        }
        Ok(())
    }

    /// Exploration level `ε(t) = eps0 (1 - t/T)`, floored at 0.
    pub fn epsilon(&self, t: u64) -> f64 {
        (self.exploration_eps0 * (1.0 - t as f64 / self.horizon as f64)).max(0.0)
    }
}

/// The deduplicated update slots `⌈ρ^k⌉, k = 0, 1, ...`.
#[derive(Debug, Clone)]
pub struct UpdateSchedule {
    rho: f64,
    exponent: i32,
    next: u64,
}

impl UpdateSchedule {
    pub fn new(rho: f64) -> Self {
        Self {
            rho,
            exponent: 0,
            next: 1,
        }
    }

    pub fn next_update(&self) -> u64 {
        self.next
    }

    pub fn exponent(&self) -> i32 {
        self.exponent
    }

    /// Moves to the first scheduled slot strictly after `slot`.
    pub fn advance_past(&mut self, slot: u64) {
        while self.next <= slot {
            self.exponent += 1;
            self.next = self.rho.powi(self.exponent).ceil() as u64;
        }
    }

    pub fn slots_up_to(rho: f64, horizon: u64) -> Vec<u64> {
        let mut sched = Self::new(rho);
        let mut out = Vec::new();
        while sched.next <= horizon {
            out.push(sched.next);
            sched.advance_past(sched.next);
        }
        out
    }
}

/// Raises every entry below the floor to `ε(t)` and renormalizes each column.
pub fn apply_forced_exploration(policy: &Policy, t: u64, config: &ControllerConfig) -> Policy {
    let eps = config.epsilon(t);
    let mut p: Array2<f64> = policy.matrix().clone();
    for mut col in p.columns_mut() {
        col.mapv_inplace(|x| if x >= config.exploration_floor { x } else { eps });
        let s = col.sum();
        col.mapv_inplace(|x| x / s);
    }
    Policy::new(p).expect("renormalized columns are stochastic")
}

/// Draws a node from column `class` of `policy`; the null class (last
/// column) always maps to the fictitious node.
pub fn draw_node<R: Rng + ?Sized>(policy: &Policy, class: usize, rng: &mut R) -> Result<usize> {
    let n = policy.n_nodes();
    let m = policy.n_classes();
    if class >= m {
        return Err(Error::Dimension(format!("class {class} out of range for {m} classes")));
    }
    if class == m - 1 {
        return Ok(n - 1);
    }
    let col = policy.matrix().column(class);
    let total = col.sum();
    if (total - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidPolicy(format!("column {class} sums to {total}")));
    }
    let u: f64 = rng.gen::<f64>() * total;
    let mut acc = 0.0;
    for (i, &p) in col.iter().enumerate() {
        acc += p;
        if p > 0.0 && u < acc {
            return Ok(i);
        }
    }
    Ok((0..n).rev().find(|&i| col[i] > 0.0).unwrap_or(n - 1))
}

/// Per-slot record emitted to the harness.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlotEvent {
    pub slot: u64,
    pub class: usize,
    pub node: usize,
    pub cost: f64,
    pub policy_updated: bool,
}

#[derive(Debug, Clone)]
pub struct Controller {
    config: ControllerConfig,
    stats: ObservationState,
    lp_policy: Policy,
    active: Policy,
    schedule: UpdateSchedule,
    lp_solves: u64,
    last_bounds: Option<ConfidenceBounds>,
    updated_this_slot: bool,
}

impl Controller {
    /// `capacity` is the known N×K capacity matrix; the controller learns
    /// everything else.
    pub fn new(config: ControllerConfig, capacity: &Array2<f64>, n_classes: usize) -> Result<Self> {
        let n = capacity.nrows();
        config.validate(n)?;
        let stats = ObservationState::new(capacity, n_classes, config.kappa_scale)?;
        let reject = Policy::reject_all(n, n_classes);
        Ok(Self {
            schedule: UpdateSchedule::new(config.rho),
            config,
            stats,
            active: reject.clone(),
            lp_policy: reject,
            lp_solves: 0,
            last_bounds: None,
            updated_this_slot: false,
        })
    }

    pub fn config(&self) -> &ControllerConfig {
        &self.config
    }

    pub fn stats(&self) -> &ObservationState {
        &self.stats
    }

    /// Policy in force for the current slot, exploration included.
    pub fn policy(&self) -> &Policy {
        &self.active
    }

    /// Last LP solution, before exploration.
    pub fn lp_policy(&self) -> &Policy {
        &self.lp_policy
    }

    pub fn lp_solves(&self) -> u64 {
        self.lp_solves
    }

    pub fn last_bounds(&self) -> Option<&ConfidenceBounds> {
        self.last_bounds.as_ref()
    }

    fn is_update_slot(&self, t: u64) -> bool {
        match self.config.mode {
            Mode::Base => true,
            Mode::Fast => t == self.schedule.next_update(),
        }
    }

    /// Prepares the policy for slot `t`; returns whether the LP was re-solved.
    pub fn maybe_update(&mut self, t: u64) -> Result<bool> {
        let expected = self.stats.current_slot();
        if t != expected {
            return Err(Error::SlotOrder { expected, got: t });
        }
        let update = self.is_update_slot(t);
        if update {
            let bounds = self.stats.bounds();
            let kappa = KappaTensor::new(bounds.kappa_upper.clone())?;
            let solved = PlacementLp::new(&bounds.cost_lower, &bounds.lambda_lower, &kappa)
                .and_then(|lp| lp.solve());
            self.lp_solves += 1;
            match solved {
                Ok(sol) => self.lp_policy = sol.policy,
                Err(e) => log::warn!("slot {t}: LP update failed ({e}); keeping previous policy"),
            }
            self.last_bounds = Some(bounds);
            if self.config.mode == Mode::Fast {
                self.schedule.advance_past(t);
            }
        }
        self.active = if self.config.exploration {
            apply_forced_exploration(&self.lp_policy, t, &self.config)
        } else {
            self.lp_policy.clone()
        };
        self.updated_this_slot = update;
        Ok(update)
    }

    /// Draws the node for the arrived function. Null arrivals go to the
    /// fictitious node as a no-op.
    pub fn decide<R: Rng + ?Sized>(&self, obs: &SlotObservation, rng: &mut R) -> Result<usize> {
        draw_node(&self.active, obs.arrived_class, rng)
    }

    /// Folds the outcome of the current slot into the statistics.
    pub fn record(&mut self, obs: &SlotObservation, node: usize, cost: f64) -> Result<SlotEvent> {
        self.stats.record_slot(obs, node, cost)?;
        Ok(SlotEvent {
            slot: obs.slot,
            class: obs.arrived_class,
            node,
            cost,
            policy_updated: std::mem::take(&mut self.updated_this_slot),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn schedule_starts_at_one_and_dedups() {
        let slots = UpdateSchedule::slots_up_to(1.05, 30);
        assert_eq!(&slots[..3], &[1, 2, 3]);
        assert!(slots.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(UpdateSchedule::slots_up_to(2.0, 20), vec![1, 2, 4, 8, 16]);
    }

    #[test]
    fn exploration_example_column() {
        let mut cfg = ControllerConfig::base(100);
        cfg.exploration_eps0 = 0.01;
        let p = Policy::new(array![[1.0], [0.0], [0.0]]).unwrap();
        let q = apply_forced_exploration(&p, 0, &cfg);
        assert!((q.get(0, 0) - 1.0 / 1.02).abs() < 1e-15);
        assert!((q.get(1, 0) - 0.01 / 1.02).abs() < 1e-15);
        assert!((q.get(2, 0) - 0.01 / 1.02).abs() < 1e-15);
    }

    #[test]
    fn exploration_vanishes_at_horizon() {
        let cfg = ControllerConfig::base(100);
        let p = Policy::new(array![[0.7, 0.0], [0.3, 1.0]]).unwrap();
        assert_eq!(apply_forced_exploration(&p, 100, &cfg), p);
    }

    #[test]
    fn invalid_configs_rejected() {
        let cap = array![[0.1], [f64::INFINITY]];
        assert!(Controller::new(ControllerConfig::fast(10, 1.0), &cap, 2).is_err());
        let mut cfg = ControllerConfig::base(10);
        cfg.exploration_floor = 0.6;
        assert!(Controller::new(cfg, &cap, 2).is_err());
        assert!(Controller::new(ControllerConfig::base(0), &cap, 2).is_err());
    }

    #[test]
    fn null_arrival_is_noop_on_fictitious_node() {
        let cap = array![[0.1], [f64::INFINITY]];
        let mut ctl = Controller::new(ControllerConfig::base(10), &cap, 2).unwrap();
        ctl.maybe_update(1).unwrap();
        let obs = SlotObservation {
            slot: 1,
            arrived_class: 1,
            demands: Array2::zeros((2, 1)),
        };
        let node = ctl.decide(&obs, &mut rand::thread_rng()).unwrap();
        assert_eq!(node, 1);
        let ev = ctl.record(&obs, node, 0.0).unwrap();
        assert!(ev.policy_updated);
        assert_eq!(ctl.stats().n_class[1], 1);
    }

    #[test]
    fn out_of_order_update_rejected() {
        let cap = array![[0.1], [f64::INFINITY]];
        let mut ctl = Controller::new(ControllerConfig::base(10), &cap, 2).unwrap();
        assert!(matches!(ctl.maybe_update(2), Err(Error::SlotOrder { .. })));
    }
}
