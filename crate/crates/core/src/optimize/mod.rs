//! Minimum-LCOE design search: log-spaced grid slices, particle swarm over
//! all three design variables, and bounded local refinement. Every search
//! runs in log10 coordinates.

mod grid;
pub mod local;
pub mod pso;

use serde::{Deserialize, Serialize};

pub use grid::{grid_search, refine_slice, GridResult, Slice, SliceSpec, DISPLAY_CEILING};
pub use local::LocalConfig;
pub use pso::PsoConfig;

use crate::error::{Error, Result};
use crate::simulate::{objective, run_year, DesignPoint, Scenario, SimulationResult};

/// One of the three independent design variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variable {
    PTidal,
    PSolar,
    Span,
}

impl Variable {
    pub const ALL: [Variable; 3] = [Variable::PTidal, Variable::PSolar, Variable::Span];

    pub fn index(self) -> usize {
        match self {
            Variable::PTidal => 0,
            Variable::PSolar => 1,
            Variable::Span => 2,
        }
    }

    /// Column name with unit.
    pub fn column(self) -> &'static str {
        match self {
            Variable::PTidal => "p_tidal_kw",
            Variable::PSolar => "p_solar_kw",
            Variable::Span => "span_h",
        }
    }

    pub fn get(self, d: &DesignPoint) -> f64 {
        d.to_array()[self.index()]
    }

    pub fn set(self, d: &mut DesignPoint, value: f64) {
        let mut a = d.to_array();
        a[self.index()] = value;
        *d = DesignPoint::from_array(a);
    }
}

/// Natural-unit search limits for each design variable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchBounds {
    pub p_tidal_kw: [f64; 2],
    pub p_solar_kw: [f64; 2],
    pub span_h: [f64; 2],
}

impl Default for SearchBounds {
    fn default() -> Self {
        Self {
            p_tidal_kw: [0.1, 1e6],
            p_solar_kw: [0.1, 1e6],
            span_h: [1.0, 8760.0],
        }
    }
}

impl SearchBounds {
    pub fn get(&self, v: Variable) -> [f64; 2] {
        match v {
            Variable::PTidal => self.p_tidal_kw,
            Variable::PSolar => self.p_solar_kw,
            Variable::Span => self.span_h,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for v in Variable::ALL {
            let [lo, hi] = self.get(v);
            if !(lo > 0.0 && lo < hi && hi.is_finite()) {
                return Err(Error::invalid(
                    "bounds",
                    format!("{} needs 0 < lower < upper, got [{lo}, {hi}]", v.column()),
                ));
            }
        }
        let [lo, hi] = self.span_h;
        if lo < 1.0 || hi > 8760.0 {
            return Err(Error::invalid("bounds", "span_h must lie within [1, 8760]"));
        }
        Ok(())
    }

    /// log10 limits for the given variables.
    pub fn log_box(&self, vars: &[Variable]) -> (Vec<f64>, Vec<f64>) {
        vars.iter()
            .map(|&v| {
                let [lo, hi] = self.get(v);
                (lo.log10(), hi.log10())
            })
            .unzip()
    }

    pub fn contains(&self, d: &DesignPoint) -> bool {
        Variable::ALL.iter().all(|&v| {
            let [lo, hi] = self.get(v);
            let x = v.get(d);
            x >= lo && x <= hi
        })
    }
}

/// Objective over log10 coordinates of `vars`, other variables taken from
/// `base`. Invalid designs evaluate to +inf.
pub(crate) fn log_objective<'a>(
    scenario: &'a Scenario,
    base: DesignPoint,
    vars: &'a [Variable],
) -> impl Fn(&[f64]) -> f64 + Sync + 'a {
    move |x: &[f64]| {
        let d = from_log(base, vars, x);
        objective(&d, scenario).unwrap_or(f64::INFINITY)
    }
}

pub(crate) fn from_log(mut base: DesignPoint, vars: &[Variable], x: &[f64]) -> DesignPoint {
    for (&v, &lx) in vars.iter().zip(x) {
        v.set(&mut base, 10f64.powf(lx));
    }
    base
}

fn to_log(d: &DesignPoint, vars: &[Variable], bounds: &SearchBounds) -> Vec<f64> {
    vars.iter()
        .map(|&v| {
            let [lo, hi] = bounds.get(v);
            v.get(d).log10().clamp(lo.log10(), hi.log10())
        })
        .collect()
}

/// Best value seen at one step of an optimizer run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Progress {
    pub iteration: usize,
    pub best_lcoe: f64,
}

/// Locally improves `start` over the variables in `vars`, holding the others
/// fixed. Never returns a worse design than `start`.
pub fn refine_variables(
    start: DesignPoint,
    vars: &[Variable],
    bounds: &SearchBounds,
    scenario: &Scenario,
    config: &LocalConfig,
) -> Result<(DesignPoint, Vec<f64>)> {
    bounds.validate()?;
    for &v in vars {
        let [lo, hi] = bounds.get(v);
        let x = v.get(&start);
        if !(x >= lo && x <= hi) {
            return Err(Error::invalid(
                "start",
                format!("{} = {x} outside [{lo}, {hi}]", v.column()),
            ));
        }
    }
    let (lower, upper) = bounds.log_box(vars);
    let x0 = to_log(&start, vars, bounds);
    let f = log_objective(scenario, start, vars);
    let out = local::minimize(&f, &x0, &lower, &upper, config)?;
    // Exponentiation may not round-trip the start exactly.
    let start_val = objective(&start, scenario)?;
    if out.value < start_val {
        Ok((from_log(start, vars, &out.best), out.history))
    } else {
        Ok((start, out.history))
    }
}

/// Bounded local refinement of all three variables in log10 space.
pub fn local_refine(
    start: DesignPoint,
    bounds: &SearchBounds,
    scenario: &Scenario,
) -> Result<DesignPoint> {
    if !bounds.contains(&start) {
        return Err(Error::invalid(
            "start",
            format!("{start:?} lies outside the search bounds"),
        ));
    }
    refine_variables(
        start,
        &Variable::ALL,
        bounds,
        scenario,
        &LocalConfig::default(),
    )
    .map(|r| r.0)
}

/// Particle swarm result in natural units.
#[derive(Debug, Clone, PartialEq)]
pub struct SwarmResult {
    pub design: DesignPoint,
    pub lcoe: f64,
    pub history: Vec<f64>,
    pub evaluations: usize,
}

/// Global-best particle swarm over all three design variables.
pub fn pso(bounds: &SearchBounds, scenario: &Scenario, config: &PsoConfig) -> Result<SwarmResult> {
    bounds.validate()?;
    scenario.validate()?;
    let (lower, upper) = bounds.log_box(&Variable::ALL);
    let base = DesignPoint::new(0.0, 0.0, 1.0);
    let f = log_objective(scenario, base, &Variable::ALL);
    let out = pso::minimize(&f, &lower, &upper, config)?;
    Ok(SwarmResult {
        design: from_log(base, &Variable::ALL, &out.best),
        lcoe: out.value,
        history: out.history,
        evaluations: out.evaluations,
    })
}

/// Relative distance from a lower bound that still counts as "at" it.
const AT_BOUND: f64 = 1e-6;

/// Largest relative LCOE increase accepted when snapping to zero.
const SNAP_TOLERANCE: f64 = 1e-9;

/// Sets tidal and/or solar power to exactly zero when they sit on their
/// lower bound and removing them raises the LCOE by at most
/// [`SNAP_TOLERANCE`] relative.
pub fn snap_to_zero(
    design: DesignPoint,
    bounds: &SearchBounds,
    scenario: &Scenario,
) -> Result<(DesignPoint, f64)> {
    let current = objective(&design, scenario)?;
    let candidates: Vec<Variable> = [Variable::PTidal, Variable::PSolar]
        .into_iter()
        .filter(|&v| {
            let x = v.get(&design);
            x > 0.0 && x <= bounds.get(v)[0] * (1.0 + AT_BOUND)
        })
        .collect();

    let limit = current * (1.0 + SNAP_TOLERANCE);
    let mut best = (design, current);
    let subsets: &[&[usize]] = match candidates.len() {
        0 => &[],
        1 => &[&[0]],
        _ => &[&[0, 1], &[0], &[1]],
    };
    for subset in subsets {
        let mut d = design;
        for &i in *subset {
            candidates[i].set(&mut d, 0.0);
        }
        let value = objective(&d, scenario)?;
        // Prefer the most zeros; subsets are ordered largest first.
        if value <= limit && (best.0 == design || value < best.1) {
            best = (d, value);
        }
    }
    Ok(best)
}

/// Outcome of the swarm-then-refine pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    pub design: DesignPoint,
    pub lcoe: f64,
    /// Swarm stage result before refinement.
    pub swarm: SwarmResult,
    pub progress: Vec<Progress>,
}

/// Particle swarm followed by local refinement of the swarm's best point and
/// the zero-snapping rule. The result is never worse than the swarm's beyond
/// the snapping tolerance.
pub fn optimize(bounds: &SearchBounds, scenario: &Scenario, config: &PsoConfig) -> Result<Optimum> {
    let swarm = pso(bounds, scenario, config)?;
    let (refined, local_history) = refine_variables(
        swarm.design,
        &Variable::ALL,
        bounds,
        scenario,
        &LocalConfig::default(),
    )?;
    let (design, lcoe) = snap_to_zero(refined, bounds, scenario)?;

    let mut progress: Vec<Progress> = swarm
        .history
        .iter()
        .enumerate()
        .map(|(iteration, &best_lcoe)| Progress {
            iteration,
            best_lcoe,
        })
        .collect();
    let offset = progress.len();
    let mut running = swarm.lcoe;
    for (i, v) in local_history.iter().enumerate() {
        running = running.min(*v);
        progress.push(Progress {
            iteration: offset + i,
            best_lcoe: running,
        });
    }
    if let Some(last) = progress.last_mut() {
        last.best_lcoe = last.best_lcoe.min(lcoe);
    }

    Ok(Optimum {
        design,
        lcoe,
        swarm,
        progress,
    })
}

/// [`optimize`] plus a full simulation of the chosen design.
pub fn two_stage(
    bounds: &SearchBounds,
    scenario: &Scenario,
    config: &PsoConfig,
) -> Result<(Optimum, SimulationResult)> {
    let opt = optimize(bounds, scenario, config)?;
    let result = run_year(&opt.design, scenario)?;
    Ok((opt, result))
}

/// Runs [`optimize`] once per seed and keeps the lowest LCOE; ties go to the
/// earlier seed.
pub fn best_of_seeds(
    bounds: &SearchBounds,
    scenario: &Scenario,
    config: &PsoConfig,
    seeds: &[u64],
) -> Result<Optimum> {
    let mut best: Option<Optimum> = None;
    for &seed in seeds {
        let run = optimize(bounds, scenario, &PsoConfig { seed, ..*config })?;
        if best.as_ref().is_none_or(|b| run.lcoe < b.lcoe) {
            best = Some(run);
        }
    }
    best.ok_or_else(|| Error::invalid("seeds", "at least one seed is required"))
}
