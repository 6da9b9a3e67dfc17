//! Multi-run experiment driver.
//!
//! Each run samples its own instance, solves the oracle program once, and then
//! plays every configured controller against the same arrival, demand and cost
//! randomness. Per-slot metrics are scored against the true parameters.

pub mod config;
pub mod metrics;
mod output;
pub mod sweep;

use std::time::Instant;

use ndarray::Array1;
use rayon::prelude::*;
use serde::Serialize;

pub use config::{AlgorithmSpec, ExperimentConfig};
pub use metrics::{relative_gap, theorem_bound, Oracle, RelativeGap};
pub use output::{write_experiment, TIMING_HEADER};

use crate::controller::{Controller, SlotEvent};
use crate::environment::{sample_instance, Environment, EnvironmentConfig};
use crate::error::{Error, Result};
use crate::estimation::ObservationState;
use crate::model::ProblemInstance;
use crate::rng::{keyed_rng, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlotMetrics {
    pub slot: u64,
    pub rel_gap: f64,
    pub max_constraint: f64,
    pub cum_regret: f64,
}

/// Everything recorded for one (run, algorithm) pair.
#[derive(Debug, Clone)]
pub struct RunTrace {
    pub run: usize,
    pub algorithm: String,
    pub series: Vec<SlotMetrics>,
    pub f_star: f64,
    pub degenerate_f_star: bool,
    pub lp_solves: u64,
    pub wall_time_s: f64,
    /// Mean, min and max per-slot update time (statistics and policy refresh).
    pub tau_mean_ms: f64,
    pub tau_min_ms: f64,
    pub tau_max_ms: f64,
    /// Sum of realized placement costs.
    pub realized_cost: f64,
    pub events: Option<Vec<SlotEvent>>,
    pub final_state: Option<ObservationState>,
}

impl RunTrace {
    pub fn final_metrics(&self) -> SlotMetrics {
        *self.series.last().expect("non-empty series")
    }

    /// Empirical `R(T) / T`.
    pub fn regret_per_slot(&self) -> f64 {
        self.final_metrics().cum_regret / self.series.len() as f64
    }

    /// Realized cost in excess of `T f*`, per slot.
    pub fn realized_regret_per_slot(&self) -> f64 {
        let t = self.series.len() as f64;
        (self.realized_cost - t * self.f_star) / t
    }

    /// Fraction of slots whose policy overloads some real node under the true loads.
    pub fn violation_fraction(&self) -> f64 {
        let bad = self.series.iter().filter(|s| s.max_constraint > 1.0).count();
        bad as f64 / self.series.len() as f64
    }

    /// Largest true load over the trailing `fraction` of the horizon.
    pub fn tail_max_constraint(&self, fraction: f64) -> f64 {
        let len = self.series.len();
        let start = len - ((len as f64 * fraction).ceil() as usize).clamp(1, len);
        self.series[start..]
            .iter()
            .map(|s| s.max_constraint)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Elementwise mean/min/max across runs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Band {
    pub mean: Vec<f64>,
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl Band {
    fn from_columns(len: usize, values: impl Fn(usize) -> Vec<f64>) -> Self {
        let mut mean = Vec::with_capacity(len);
        let mut min = Vec::with_capacity(len);
        let mut max = Vec::with_capacity(len);
        for idx in 0..len {
            let col = values(idx);
            mean.push(col.iter().sum::<f64>() / col.len() as f64);
            min.push(col.iter().copied().fold(f64::INFINITY, f64::min));
            max.push(col.iter().copied().fold(f64::NEG_INFINITY, f64::max));
        }
        Self { mean, min, max }
    }

    pub fn last(&self) -> (f64, f64, f64) {
        let i = self.mean.len() - 1;
        (self.mean[i], self.min[i], self.max[i])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Aggregate {
    pub slots: Vec<u64>,
    pub gap: Band,
    pub constraint: Band,
}

impl Aggregate {
    pub fn from_traces(traces: &[RunTrace]) -> Self {
        let len = traces[0].series.len();
        let slots = traces[0].series.iter().map(|s| s.slot).collect();
        let gap = Band::from_columns(len, |i| traces.iter().map(|t| t.series[i].rel_gap).collect());
        let constraint = Band::from_columns(len, |i| {
            traces.iter().map(|t| t.series[i].max_constraint).collect()
        });
        Self {
            slots,
            gap,
            constraint,
        }
    }

    /// Mean of the across-run mean gap over slots `[from, to]` (1-based, inclusive).
    pub fn mean_gap_window(&self, from: u64, to: u64) -> f64 {
        let vals: Vec<f64> = self
            .slots
            .iter()
            .zip(&self.gap.mean)
            .filter(|(&s, _)| s >= from && s <= to)
            .map(|(_, &g)| g)
            .collect();
        vals.iter().sum::<f64>() / vals.len() as f64
    }
}

/// Spread of per-run mean update times, as reported per algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimingSummary {
    pub tau_mean_ms: f64,
    pub tau_min_ms: f64,
    pub tau_max_ms: f64,
    pub lp_solves: u64,
}

impl TimingSummary {
    pub fn from_traces(traces: &[RunTrace]) -> Self {
        let taus: Vec<f64> = traces.iter().map(|t| t.tau_mean_ms).collect();
        Self {
            tau_mean_ms: taus.iter().sum::<f64>() / taus.len() as f64,
            tau_min_ms: taus.iter().copied().fold(f64::INFINITY, f64::min),
            tau_max_ms: taus.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            lp_solves: traces.iter().map(|t| t.lp_solves).max().unwrap_or(0),
        }
    }
}

#[derive(Debug, Clone)]
pub struct AlgorithmResult {
    pub spec: AlgorithmSpec,
    pub label: String,
    pub traces: Vec<RunTrace>,
    pub aggregate: Aggregate,
    pub timing: TimingSummary,
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub algorithms: Vec<AlgorithmResult>,
    pub theorem_bound: f64,
}

impl ExperimentResult {
    pub fn algorithm(&self, label: &str) -> Option<&AlgorithmResult> {
        self.algorithms.iter().find(|a| a.label == label)
    }
}

/// Instance used by run `run` of `config`.
pub fn build_instance(config: &ExperimentConfig, run: usize) -> Result<ProblemInstance> {
    let mut inst = sample_instance(
        config.nodes,
        config.classes,
        config.resources,
        config.beta,
        config.run_instance_seed(run),
    )?;
    if let Some(lambda) = &config.arrival_prob {
        inst = inst.with_arrival_prob(Array1::from_vec(lambda.clone()))?;
    }
    if config.slot_duration_s != inst.slot_duration_s() {
        inst = ProblemInstance::new(
            inst.cost_mean().clone(),
            inst.demand_mean().clone(),
            inst.capacity().clone(),
            inst.arrival_prob().clone(),
            config.slot_duration_s,
        )?;
    }
    Ok(inst)
}

/// Plays one controller for the whole horizon.
pub fn run_single(
    config: &ExperimentConfig,
    alg: &AlgorithmSpec,
    run: usize,
    oracle: &Oracle,
) -> Result<RunTrace> {
    let inst = &oracle.instance;
    let horizon = config.horizon;
    let seed = config.run_seed(run);
    let mut env = Environment::new(EnvironmentConfig {
        instance: inst.clone(),
        seed,
        horizon,
    })?;
    let mut ctl = Controller::new(config.controller_config(alg), inst.capacity(), inst.n_classes())?;

    let mut series = Vec::with_capacity(horizon as usize);
    let mut events = config.write_events.then(|| Vec::with_capacity(horizon as usize));
    let (mut tau_sum, mut tau_min, mut tau_max) = (0.0_f64, f64::INFINITY, 0.0_f64);
    let mut cum_regret = 0.0;
    let mut realized_cost = 0.0;
    let mut degenerate = false;
    let started = Instant::now();

    for t in 1..=horizon {
        let clock = Instant::now();
        ctl.maybe_update(t)?;
        let mut tau = clock.elapsed().as_secs_f64();

        let obs = env.step_arrival()?;
        let node = ctl.decide(&obs, &mut keyed_rng(seed, t, Stream::Decision))?;
        let cost = env.submit_placement(node)?;
        realized_cost += cost;

        let clock = Instant::now();
        let event = ctl.record(&obs, node, cost)?;
        tau += clock.elapsed().as_secs_f64();
        if let Some(ev) = events.as_mut() {
            ev.push(event);
        }

        let tau_ms = tau * 1e3;
        tau_sum += tau_ms;
        tau_min = tau_min.min(tau_ms);
        tau_max = tau_max.max(tau_ms);

        let policy = ctl.policy();
        let f = oracle.cost(policy)?;
        let gap = metrics::gap_from_costs(f, oracle.f_star);
        degenerate |= gap.degenerate;
        cum_regret += f - oracle.f_star;
        series.push(SlotMetrics {
            slot: t,
            rel_gap: gap.value,
            max_constraint: oracle.max_constraint(policy)?,
            cum_regret,
        });
    }

    Ok(RunTrace {
        run,
        algorithm: alg.label(),
        series,
        f_star: oracle.f_star,
        degenerate_f_star: degenerate,
        lp_solves: ctl.lp_solves(),
        wall_time_s: started.elapsed().as_secs_f64(),
        tau_mean_ms: tau_sum / horizon as f64,
        tau_min_ms: tau_min,
        tau_max_ms: tau_max,
        realized_cost,
        events,
        final_state: (config.dump_state && run == 0).then(|| ctl.stats().clone()),
    })
}

/// Runs every (run, algorithm) pair and, when `config.out` is set, writes the
/// CSV files and `summary.json` there.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    config.validate()?;
    match config.jobs {
        Some(jobs) => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?
            .install(|| run_experiment_inner(config)),
        None => run_experiment_inner(config),
    }
}

fn run_experiment_inner(config: &ExperimentConfig) -> Result<ExperimentResult> {
    let oracles: Vec<Oracle> = (0..config.runs)
        .into_par_iter()
        .map(|r| build_instance(config, r).and_then(|inst| Oracle::new(&inst)))
        .collect::<Result<_>>()?;

    let tasks: Vec<(usize, usize)> = (0..config.runs)
        .flat_map(|r| (0..config.algorithms.len()).map(move |a| (r, a)))
        .collect();
    let outcomes: Vec<(usize, usize, Result<RunTrace>)> = tasks
        .into_par_iter()
        .map(|(r, a)| (r, a, run_single(config, &config.algorithms[a], r, &oracles[r])))
        .collect();

    let mut per_alg: Vec<Vec<RunTrace>> = vec![Vec::new(); config.algorithms.len()];
    let mut first_err = None;
    for (_, a, res) in outcomes {
        match res {
            Ok(trace) => per_alg[a].push(trace),
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }

    let algorithms: Vec<AlgorithmResult> = config
        .algorithms
        .iter()
        .zip(per_alg)
        .filter(|(_, traces)| !traces.is_empty())
        .map(|(spec, mut traces)| {
            traces.sort_by_key(|t| t.run);
            AlgorithmResult {
                spec: spec.clone(),
                label: spec.label(),
                aggregate: Aggregate::from_traces(&traces),
                timing: TimingSummary::from_traces(&traces),
                traces,
            }
        })
        .collect();

    let result = ExperimentResult {
        config: config.clone(),
        algorithms,
        theorem_bound: theorem_bound(config.nodes, config.classes, config.resources, config.horizon),
    };
    if let Some(dir) = &config.out {
        write_experiment(dir, &result)?;
    }
    match first_err {
        Some(e) => Err(e),
        None => Ok(result),
    }
}
