//! Problem-size and schedule-ratio sweeps built from one base configuration.

use std::path::PathBuf;

use super::output::write_timing;
use super::{run_experiment, AlgorithmSpec, ExperimentConfig, ExperimentResult, TimingSummary};
use crate::controller::Mode;
use crate::error::{Error, Result};

/// Sizes used for the scaling study, as (real nodes, real classes, resources).
pub const DEFAULT_SIZES: [(usize, usize, usize); 4] = [(10, 3, 2), (20, 5, 2), (50, 8, 2), (100, 10, 2)];
pub const DEFAULT_RHOS: [f64; 4] = [1.05, 1.1, 1.2, 1.5];

/// Parses `10x3x2,20x5x2`.
pub fn parse_sizes(text: &str) -> Result<Vec<(usize, usize, usize)>> {
    text.split(',')
        .map(|part| {
            let dims: Vec<usize> = part
                .trim()
                .split('x')
                .map(|d| d.parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::InvalidArgument(format!("bad size {part:?}: {e}")))?;
            match dims[..] {
                [n, m, k] => Ok((n, m, k)),
                _ => Err(Error::InvalidArgument(format!("size {part:?} is not NxMxK"))),
            }
        })
        .collect()
}

pub fn parse_rhos(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|r| {
            r.trim()
                .parse::<f64>()
                .map_err(|e| Error::InvalidArgument(format!("bad rho {r:?}: {e}")))
        })
        .collect()
}

fn subdir(base: &ExperimentConfig, name: &str) -> Option<PathBuf> {
    base.out.as_ref().map(|d| d.join(name))
}

fn finish(
    base: &ExperimentConfig,
    results: Vec<(String, ExperimentResult)>,
) -> Result<Vec<(String, ExperimentResult)>> {
    if let Some(dir) = &base.out {
        let rows: Vec<(String, TimingSummary)> = results
            .iter()
            .flat_map(|(name, res)| {
                res.algorithms
                    .iter()
                    .map(move |a| (format!("{}@{name}", a.label), a.timing))
            })
            .collect();
        std::fs::create_dir_all(dir)?;
        write_timing(&dir.join("timing.csv"), &rows)?;
    }
    Ok(results)
}

/// Runs the configured algorithms (fast mode by default) at every size.
pub fn sweep_sizes(
    base: &ExperimentConfig,
    sizes: &[(usize, usize, usize)],
) -> Result<Vec<(String, ExperimentResult)>> {
    let mut results = Vec::with_capacity(sizes.len());
    for &(n, m, k) in sizes {
        let name = format!("size_{n}x{m}x{k}");
        let cfg = ExperimentConfig {
            nodes: n,
            classes: m,
            resources: k,
            out: subdir(base, &name),
            ..base.clone()
        };
        results.push((name, run_experiment(&cfg)?));
    }
    finish(base, results)
}

/// Runs fast mode once per ratio, all in one experiment so every ratio faces
/// the same instances and randomness.
pub fn sweep_rho(base: &ExperimentConfig, rhos: &[f64]) -> Result<Vec<(String, ExperimentResult)>> {
    let cfg = ExperimentConfig {
        algorithms: rhos.iter().map(|&r| AlgorithmSpec::fast(r)).collect(),
        out: subdir(base, "rho"),
        ..base.clone()
    };
    let res = run_experiment(&cfg)?;
    finish(base, vec![("rho".to_string(), res)])
}

/// Fast mode at the configured ratio, used when a sweep config names no algorithm.
pub fn default_fast(base: &ExperimentConfig) -> ExperimentConfig {
    let rho = base
        .algorithms
        .iter()
        .find(|a| a.mode == Mode::Fast)
        .map_or(1.05, |a| a.rho);
    ExperimentConfig {
        algorithms: vec![AlgorithmSpec::fast(rho)],
        ..base.clone()
    }
}
