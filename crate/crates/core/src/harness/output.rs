use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use super::{AlgorithmResult, ExperimentConfig, ExperimentResult, TimingSummary};
use crate::error::Result;

pub const METRICS_HEADER: &str = "slot,run,rel_gap,max_constraint,cum_regret";
pub const AGGREGATE_HEADER: &str = "slot,gap_mean,gap_min,gap_max,cons_mean,cons_min,cons_max";
pub const TIMING_HEADER: &str = "algo,tau_mean_ms,tau_min_ms,tau_max_ms,lp_solves";
const EVENTS_HEADER: &str = "run,slot,class,node,cost,policy_updated";

fn keep(slot: u64, every: u64, horizon: u64) -> bool {
    slot.is_multiple_of(every) || slot == horizon
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn write_metrics(path: &Path, alg: &AlgorithmResult, every: u64, horizon: u64) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "{METRICS_HEADER}")?;
    for trace in &alg.traces {
        for s in trace.series.iter().filter(|s| keep(s.slot, every, horizon)) {
            writeln!(
                w,
                "{},{},{},{},{}",
                s.slot, trace.run, s.rel_gap, s.max_constraint, s.cum_regret
            )?;
        }
    }
    w.flush()?;
    Ok(())
}

fn write_aggregate(path: &Path, alg: &AlgorithmResult, every: u64, horizon: u64) -> Result<()> {
    let agg = &alg.aggregate;
    let mut w = create(path)?;
    writeln!(w, "{AGGREGATE_HEADER}")?;
    for (i, &slot) in agg.slots.iter().enumerate() {
        if !keep(slot, every, horizon) {
            continue;
        }
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            slot,
            agg.gap.mean[i],
            agg.gap.min[i],
            agg.gap.max[i],
            agg.constraint.mean[i],
            agg.constraint.min[i],
            agg.constraint.max[i]
        )?;
    }
    w.flush()?;
    Ok(())
}

fn write_events(path: &Path, alg: &AlgorithmResult) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "{EVENTS_HEADER}")?;
    for trace in &alg.traces {
        for ev in trace.events.iter().flatten() {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                trace.run, ev.slot, ev.class, ev.node, ev.cost, ev.policy_updated as u8
            )?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Writes `algo,tau_mean_ms,tau_min_ms,tau_max_ms,lp_solves` rows.
pub fn write_timing(path: &Path, rows: &[(String, TimingSummary)]) -> Result<()> {
    let mut w = create(path)?;
    writeln!(w, "{TIMING_HEADER}")?;
    for (label, t) in rows {
        writeln!(
            w,
            "{},{},{},{},{}",
            label, t.tau_mean_ms, t.tau_min_ms, t.tau_max_ms, t.lp_solves
        )?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct AlgorithmSummary<'a> {
    label: &'a str,
    mode: crate::controller::Mode,
    rho: f64,
    runs: usize,
    final_gap_mean: f64,
    final_gap_min: f64,
    final_gap_max: f64,
    final_constraint_mean: f64,
    final_constraint_max: f64,
    violation_fraction_mean: f64,
    violation_fraction_max: f64,
    tail20_constraint_max: f64,
    regret_per_slot_mean: f64,
    regret_per_slot_max: f64,
    realized_regret_per_slot_mean: f64,
    runs_with_degenerate_f_star: usize,
    timing: TimingSummary,
}

#[derive(Serialize)]
struct Summary<'a> {
    config: &'a ExperimentConfig,
    slot_duration_s: f64,
    horizon_seconds: f64,
    theorem_bound: f64,
    algorithms: Vec<AlgorithmSummary<'a>>,
}

fn summarize(alg: &AlgorithmResult) -> AlgorithmSummary<'_> {
    let (gm, gmin, gmax) = alg.aggregate.gap.last();
    let (cm, _, cmax) = alg.aggregate.constraint.last();
    let n = alg.traces.len() as f64;
    let viol: Vec<f64> = alg.traces.iter().map(|t| t.violation_fraction()).collect();
    let regret: Vec<f64> = alg.traces.iter().map(|t| t.regret_per_slot()).collect();
    AlgorithmSummary {
        label: &alg.label,
        mode: alg.spec.mode,
        rho: alg.spec.rho,
        runs: alg.traces.len(),
        final_gap_mean: gm,
        final_gap_min: gmin,
        final_gap_max: gmax,
        final_constraint_mean: cm,
        final_constraint_max: cmax,
        violation_fraction_mean: viol.iter().sum::<f64>() / n,
        violation_fraction_max: viol.iter().copied().fold(0.0, f64::max),
        tail20_constraint_max: alg
            .traces
            .iter()
            .map(|t| t.tail_max_constraint(0.2))
            .fold(f64::NEG_INFINITY, f64::max),
        regret_per_slot_mean: regret.iter().sum::<f64>() / n,
        regret_per_slot_max: regret.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        realized_regret_per_slot_mean: alg
            .traces
            .iter()
            .map(|t| t.realized_regret_per_slot())
            .sum::<f64>()
            / n,
        runs_with_degenerate_f_star: alg.traces.iter().filter(|t| t.degenerate_f_star).count(),
        timing: alg.timing,
    }
}

/// Writes every output file of an experiment into `dir`.
pub fn write_experiment(dir: &Path, result: &ExperimentResult) -> Result<()> {
    fs::create_dir_all(dir)?;
    let cfg = &result.config;
    let every = cfg.effective_downsample();
    for alg in &result.algorithms {
        write_metrics(&dir.join(format!("metrics_{}.csv", alg.label)), alg, every, cfg.horizon)?;
        write_aggregate(&dir.join(format!("aggregate_{}.csv", alg.label)), alg, every, cfg.horizon)?;
        if cfg.write_events {
            write_events(&dir.join(format!("events_{}.csv", alg.label)), alg)?;
        }
        if let Some(state) = alg.traces.iter().find_map(|t| t.final_state.as_ref()) {
            let f = create(&dir.join(format!("state_{}_run0.json", alg.label)))?;
            serde_json::to_writer_pretty(f, state)?;
        }
    }
    let rows: Vec<(String, TimingSummary)> = result
        .algorithms
        .iter()
        .map(|a| (a.label.clone(), a.timing))
        .collect();
    write_timing(&dir.join("timing.csv"), &rows)?;

    let summary = Summary {
        config: cfg,
        slot_duration_s: cfg.slot_duration_s,
        horizon_seconds: cfg.horizon as f64 * cfg.slot_duration_s,
        theorem_bound: result.theorem_bound,
        algorithms: result.algorithms.iter().map(summarize).collect(),
    };
    let mut f = create(&dir.join("summary.json"))?;
    serde_json::to_writer_pretty(&mut f, &summary)?;
    writeln!(f)?;
    Ok(())
}
