use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use placement_bandit::harness::sweep::{
    default_fast, parse_rhos, parse_sizes, sweep_rho, sweep_sizes, DEFAULT_RHOS, DEFAULT_SIZES,
};
use placement_bandit::harness::{build_instance, AlgorithmSpec, ExperimentConfig, ExperimentResult};
use placement_bandit::{Error, Mode, PlacementLp, Result};

#[derive(Parser)]
#[command(name = "placement", version, about = "Online placement of serverless functions under resource constraints")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write CSV files plus summary.json.
    Run(Common),
    /// Sweep problem sizes (`--sizes`) or fast-mode ratios (`--rho`).
    Sweep(SweepArgs),
    /// Print the optimal policy p* and cost f* of one sampled instance.
    Oracle(OracleArgs),
    /// Report per-slot update times of base and fast mode.
    Bench(Common),
}

#[derive(Args, Clone, Default)]
struct Common {
    /// JSON file with the same keys as the flags; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    nodes: Option<usize>,
    #[arg(long)]
    classes: Option<usize>,
    #[arg(long)]
    resources: Option<usize>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    horizon: Option<u64>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long, value_parser = ["base", "fast"])]
    mode: Option<String>,
    /// Fast-mode ratio; under `sweep`, a comma list of ratios to sweep
    /// (without a value, the default four).
    #[arg(long, num_args = 0..=1, default_missing_value = "")]
    rho: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    downsample: Option<u64>,
    #[arg(long)]
    jobs: Option<usize>,
    /// Write the final observation state of run 0.
    #[arg(long)]
    dump_state: bool,
    /// Write the per-slot decision log.
    #[arg(long)]
    events: bool,
    /// Disable forced exploration.
    #[arg(long)]
    no_exploration: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    /// Sizes as `NxMxK,...`; without a value, the default four sizes.
    #[arg(long, num_args = 0..=1, default_missing_value = "", conflicts_with = "rho")]
    sizes: Option<String>,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    common: Common,
    /// Which run's instance to solve.
    #[arg(long, default_value_t = 0)]
    run: usize,
    /// Write the LP (objective, constraint matrix) as JSON.
    #[arg(long)]
    dump_lp: Option<PathBuf>,
}

impl Common {
    fn rho(&self) -> Result<Option<f64>> {
        self.rho
            .as_deref()
            .map(|r| {
                r.parse::<f64>()
                    .map_err(|_| Error::InvalidArgument(format!("--rho expects one number, got {r:?}")))
            })
            .transpose()
    }

    fn resolve(&self) -> Result<ExperimentConfig> {
        self.resolve_with_rho(self.rho()?)
    }

    fn resolve_with_rho(&self, rho: Option<f64>) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_json_file(path)?,
            None => ExperimentConfig::default(),
        };
        macro_rules! set {
            ($($field:ident),*) => {$(
                if let Some(v) = self.$field.clone() {
                    cfg.$field = v;
                }
            )*};
        }
        set!(nodes, classes, resources, beta, horizon, runs, seed);
        if self.out.is_some() {
            cfg.out = self.out.clone();
        }
        if self.downsample.is_some() {
            cfg.downsample = self.downsample;
        }
        if self.jobs.is_some() {
            cfg.jobs = self.jobs;
        }
        cfg.dump_state |= self.dump_state;
        cfg.write_events |= self.events;
        cfg.exploration &= !self.no_exploration;

        match self.mode.as_deref() {
            Some(m) => {
                let mode: Mode = m.parse()?;
                cfg.algorithms = vec![match mode {
                    Mode::Base => AlgorithmSpec::base(),
                    Mode::Fast => AlgorithmSpec::fast(rho.unwrap_or(1.05)),
                }];
            }
            None => {
                if let Some(r) = rho {
                    for a in cfg.algorithms.iter_mut().filter(|a| a.mode == Mode::Fast) {
                        a.rho = r;
                    }
                }
            }
        }
        Ok(cfg)
    }
}

fn print_result(res: &ExperimentResult) {
    println!("theorem bound on R(T)/T: {:.4}", res.theorem_bound);
    println!(
        "{:<16} {:>9} {:>9} {:>9} {:>9} {:>10} {:>8}",
        "algorithm", "gap_mean", "gap_min", "gap_max", "cons_max", "tau_ms", "solves"
    );
    for a in &res.algorithms {
        let (gm, gmin, gmax) = a.aggregate.gap.last();
        let (_, _, cmax) = a.aggregate.constraint.last();
        println!(
            "{:<16} {:>9.4} {:>9.4} {:>9.4} {:>9.4} {:>10.4} {:>8}",
            a.label, gm, gmin, gmax, cmax, a.timing.tau_mean_ms, a.timing.lp_solves
        );
    }
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Run(common) => {
            let mut cfg = common.resolve()?;
            cfg.out.get_or_insert_with(|| PathBuf::from("out/run"));
            let res = placement_bandit::run_experiment(&cfg)?;
            print_result(&res);
            println!("wrote {}", cfg.out.as_ref().unwrap().display());
        }
        Command::Sweep(args) => {
            let mut cfg = args.common.resolve_with_rho(None)?;
            cfg.out.get_or_insert_with(|| PathBuf::from("out/sweep"));
            let results = if let Some(list) = &args.common.rho {
                let rhos = if list.is_empty() { DEFAULT_RHOS.to_vec() } else { parse_rhos(list)? };
                sweep_rho(&cfg, &rhos)?
            } else {
                let sizes = match args.sizes.as_deref() {
                    None | Some("") => DEFAULT_SIZES.to_vec(),
                    Some(list) => parse_sizes(list)?,
                };
                if args.common.mode.is_none() && cfg.algorithms == vec![AlgorithmSpec::base()] {
                    cfg = default_fast(&cfg);
                }
                sweep_sizes(&cfg, &sizes)?
            };
            for (name, res) in &results {
                println!("== {name}");
                print_result(res);
            }
        }
        Command::Oracle(args) => {
            let cfg = args.common.resolve()?;
            let inst = build_instance(&cfg, args.run)?;
            let lp = PlacementLp::new(inst.cost_mean(), inst.arrival_prob(), &inst.kappa())?;
            if let Some(path) = &args.dump_lp {
                std::fs::write(path, serde_json::to_string_pretty(&lp.dump())?)?;
                println!("wrote {}", path.display());
            }
            let sol = lp.solve()?;
            println!("f* = {:.9}  ({} pivots)", sol.objective, sol.pivots);
            println!("p* (rows: nodes, last = rejection; columns: classes, last = null)");
            for (i, row) in sol.policy.matrix().rows().into_iter().enumerate() {
                let cells: Vec<String> = row.iter().map(|p| format!("{p:.6}")).collect();
                println!("  node {i:>3}: {}", cells.join(" "));
            }
        }
        Command::Bench(common) => {
            let mut cfg = common.resolve()?;
            if common.mode.is_none() {
                cfg.algorithms = vec![AlgorithmSpec::base(), AlgorithmSpec::fast(common.rho()?.unwrap_or(1.05))];
            }
            if common.runs.is_none() && common.config.is_none() {
                cfg.runs = 5;
            }
            cfg.jobs.get_or_insert(1);
            let res = placement_bandit::run_experiment(&cfg)?;
            println!("{}", placement_bandit::harness::TIMING_HEADER);
            for a in &res.algorithms {
                let t = a.timing;
                println!(
                    "{},{:.6},{:.6},{:.6},{}",
                    a.label, t.tau_mean_ms, t.tau_min_ms, t.tau_max_ms, t.lp_solves
                );
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
