//! Command-line front end.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::config::{ScenarioConfig, Source};
use crate::error::{Error, Result};
use crate::optimize::{best_of_seeds, grid_search, refine_slice, Slice};
use crate::output;
use crate::sensitivity::{cost_sweep, linspace, SweepComponent, SweepSpec};
use crate::simulate::{run_year, DesignPoint, SimulationResult};

#[derive(Debug, Parser)]
#[command(
    name = "microgrid",
    version,
    about = "Tidal/solar/battery microgrid sizing"
)]
struct Cli {
    #[command(subcommand)]
    command: CommandArgs,
}

#[derive(Debug, Subcommand)]
enum CommandArgs {
    /// Simulate one design for a year.
    Simulate {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        design: DesignArgs,
    },
    /// Evaluate a log-spaced grid over one two-variable slice.
    Grid {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum)]
        slice: Slice,
        /// Points per axis.
        #[arg(long, default_value_t = 50)]
        n: usize,
    },
    /// Particle swarm plus local refinement over all three variables.
    Optimize {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Re-optimize across multipliers of one component's cost.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long, value_enum)]
        component: SweepComponent,
        #[arg(long, default_value_t = 20)]
        steps: usize,
        #[arg(long, default_value_t = 0.1)]
        min: f64,
        #[arg(long, default_value_t = 2.0)]
        max: f64,
    },
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Scenario TOML file; an empty file is the baseline.
    #[arg(long)]
    scenario: PathBuf,
    #[arg(long, default_value = "results")]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads; defaults to the number of cores.
    #[arg(long)]
    threads: Option<usize>,
    /// Hourly demand file, kW.
    #[arg(long, value_name = "PATH", conflicts_with = "synth_demand")]
    demand_csv: Option<PathBuf>,
    /// Synthetic demand with this annual total.
    #[arg(long, value_name = "GWH")]
    synth_demand: Option<f64>,
    /// Hourly output of a 1 kW-DC array.
    #[arg(long, value_name = "PATH", conflicts_with = "synth_solar")]
    solar_csv: Option<PathBuf>,
    /// Synthetic solar with this capacity factor.
    #[arg(long, value_name = "CF")]
    synth_solar: Option<f64>,
}

#[derive(Debug, Args)]
struct DesignArgs {
    #[arg(long, default_value_t = 1700.0)]
    p_tidal: f64,
    #[arg(long, default_value_t = 500.0)]
    p_solar: f64,
    #[arg(long, default_value_t = 15.0)]
    span: f64,
}

#[derive(Debug, Args)]
struct SearchArgs {
    /// Overrides the scenario's swarm size.
    #[arg(long)]
    swarm: Option<usize>,
    /// Optimizer runs with different seeds; the best is kept.
    #[arg(long)]
    restarts: Option<usize>,
}

/// Where a profile comes from, when given on the command line.
#[derive(Debug, Clone, PartialEq)]
pub enum ProfileSource {
    Csv(PathBuf),
    /// Annual GWh for demand, capacity factor for solar.
    Synthetic(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Simulate(DesignPoint),
    Grid {
        slice: Slice,
        n: usize,
    },
    Optimize {
        swarm: Option<usize>,
        restarts: usize,
    },
    Sweep {
        component: SweepComponent,
        multipliers: Vec<f64>,
        swarm: Option<usize>,
        restarts: usize,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Simulate(_) => "simulate",
            Command::Grid { .. } => "grid",
            Command::Optimize { .. } => "optimize",
            Command::Sweep { .. } => "sweep",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub scenario: PathBuf,
    pub out: PathBuf,
    pub seed: u64,
    pub threads: Option<usize>,
    pub demand: Option<ProfileSource>,
    pub solar: Option<ProfileSource>,
}

/// Parses `argv` (program name first). Errors carry clap's exit code: 2 for
/// usage errors, 0 for `--help` and `--version`.
pub fn parse_args<I, T>(argv: I) -> std::result::Result<RunConfig, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv)?;
    let usage = |msg: String| clap::Error::raw(clap::error::ErrorKind::ValueValidation, msg + "\n");
    let (common, command) = match cli.command {
        CommandArgs::Simulate { common, design } => {
            let d = DesignPoint::new(design.p_tidal, design.p_solar, design.span);
            d.validate().map_err(|e| usage(e.to_string()))?;
            (common, Command::Simulate(d))
        }
        CommandArgs::Grid { common, slice, n } => {
            if n < 2 {
                return Err(usage("--n must be at least 2".into()));
            }
            (common, Command::Grid { slice, n })
        }
        CommandArgs::Optimize { common, search } => {
            let restarts = check_search(&search).map_err(usage)?;
            (
                common,
                Command::Optimize {
                    swarm: search.swarm,
                    restarts: restarts.unwrap_or(1),
                },
            )
        }
        CommandArgs::Sweep {
            common,
            search,
            component,
            steps,
            min,
            max,
        } => {
            let restarts = check_search(&search).map_err(usage)?;
            if steps < 2 || !(min > 0.0 && max > min && max.is_finite()) {
                return Err(usage(
                    "sweep needs --steps >= 2 and 0 < --min < --max".into(),
                ));
            }
            (
                common,
                Command::Sweep {
                    component,
                    multipliers: linspace(min, max, steps),
                    swarm: search.swarm,
                    restarts: restarts.unwrap_or(3),
                },
            )
        }
    };
    if common.threads == Some(0) {
        return Err(usage("--threads must be at least 1".into()));
    }
    Ok(RunConfig {
        command,
        scenario: common.scenario,
        out: common.out,
        seed: common.seed,
        threads: common.threads,
        demand: common
            .demand_csv
            .map(ProfileSource::Csv)
            .or(common.synth_demand.map(ProfileSource::Synthetic)),
        solar: common
            .solar_csv
            .map(ProfileSource::Csv)
            .or(common.synth_solar.map(ProfileSource::Synthetic)),
    })
}

fn check_search(s: &SearchArgs) -> std::result::Result<Option<usize>, String> {
    if s.swarm.is_some_and(|n| n < 2) {
        return Err("--swarm must be at least 2".into());
    }
    if s.restarts == Some(0) {
        return Err("--restarts must be at least 1".into());
    }
    Ok(s.restarts)
}

/// Runs the subcommand and returns the process exit code.
pub fn run(config: &RunConfig) -> i32 {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = config.threads {
        pool = pool.num_threads(n);
    }
    let outcome = pool
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))
        .and_then(|pool| pool.install(|| execute(config)));
    match outcome {
        Ok(line) => {
            println!("{line}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

/// Parses and runs; the body of `main`.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match parse_args(argv) {
        Ok(config) => run(&config),
        Err(e) => {
            let _ = e.print();
            e.exit_code()
        }
    }
}

fn absolute(p: &Path) -> Result<PathBuf> {
    std::path::absolute(p).map_err(|e| Error::io(p, e))
}

/// Scenario file with command-line profile overrides applied.
pub fn load_config(config: &RunConfig) -> Result<ScenarioConfig> {
    let mut cfg = ScenarioConfig::from_path(&config.scenario)?;
    match &config.demand {
        Some(ProfileSource::Csv(p)) => {
            cfg.demand.source = Source::Csv;
            cfg.demand.path = Some(absolute(p)?);
        }
        Some(ProfileSource::Synthetic(gwh)) => {
            cfg.demand.source = Source::Synthetic;
            cfg.demand.annual_energy_gwh = Some(*gwh);
        }
        None => {}
    }
    match &config.solar {
        Some(ProfileSource::Csv(p)) => {
            cfg.solar.source = Source::Csv;
            cfg.solar.path = Some(absolute(p)?);
        }
        Some(ProfileSource::Synthetic(cf)) => {
            cfg.solar.source = Source::Synthetic;
            cfg.solar.capacity_factor = *cf;
        }
        None => {}
    }
    Ok(cfg)
}

fn design_line(r: &SimulationResult) -> String {
    format!(
        "LCOE {} USD/MWh at p_tidal={} kW, p_solar={} kW, span={} h",
        r.total_lcoe, r.design.p_tidal, r.design.p_solar, r.design.span
    )
}

fn write_result(out: &Path, r: &SimulationResult) -> Result<()> {
    output::write_summary(out.join("summary.csv"), r)?;
    output::write_traces(out.join("traces.csv"), r)?;
    output::write_breakdown(out.join("breakdown.csv"), &r.breakdown)
}

/// Seeds for `restarts` optimizer runs; the first is the run seed itself.
pub fn optimizer_seeds(seed: u64, restarts: usize) -> Vec<u64> {
    (0..restarts as u64).map(|i| seed.wrapping_add(i)).collect()
}

fn execute(config: &RunConfig) -> Result<String> {
    let cfg = load_config(config)?;
    let scenario = cfg.scenario(config.seed)?;
    let out = &config.out;
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let pso_for = |swarm: Option<usize>| crate::optimize::PsoConfig {
        swarm_size: swarm.unwrap_or(cfg.pso.swarm_size),
        seed: config.seed,
        ..cfg.pso
    };

    match &config.command {
        Command::Simulate(design) => {
            let r = run_year(design, &scenario)?;
            write_result(out, &r)?;
            Ok(format!("simulate: {}", design_line(&r)))
        }
        Command::Grid { slice, n } => {
            let grid = grid_search(&slice.spec(), &scenario, &cfg.bounds, *n)?;
            output::write_grid(out.join("grid.csv"), &grid)?;
            let (refined, lcoe) = refine_slice(&grid, &scenario, &cfg.bounds)?;
            Ok(format!(
                "grid: best cell LCOE {} USD/MWh; refined LCOE {} USD/MWh at p_tidal={} kW, p_solar={} kW, span={} h",
                grid.best_lcoe, lcoe, refined.p_tidal, refined.p_solar, refined.span
            ))
        }
        Command::Optimize { swarm, restarts } => {
            let best = best_of_seeds(
                &cfg.bounds,
                &scenario,
                &pso_for(*swarm),
                &optimizer_seeds(config.seed, *restarts),
            )?;
            let r = run_year(&best.design, &scenario)?;
            write_result(out, &r)?;
            output::write_progress(out.join("progress.csv"), &best.progress)?;
            Ok(format!("optimize: {}", design_line(&r)))
        }
        Command::Sweep {
            component,
            multipliers,
            swarm,
            restarts,
        } => {
            let spec = SweepSpec {
                component: *component,
                multipliers: multipliers.clone(),
                master_seed: config.seed,
                restarts: *restarts,
            };
            let rows = cost_sweep(&spec, &scenario, &cfg.bounds, &pso_for(*swarm))?;
            output::write_sweep(out.join("sweep.csv"), &rows)?;
            let first = rows.first().map_or(f64::NAN, |r| r.total_lcoe());
            let last = rows.last().map_or(f64::NAN, |r| r.total_lcoe());
            Ok(format!(
                "sweep {}: {} rows, LCOE {} to {} USD/MWh",
                component.label(),
                rows.len(),
                first,
                last
            ))
        }
    }
}
