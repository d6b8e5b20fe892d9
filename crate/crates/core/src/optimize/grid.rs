use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{refine_variables, snap_to_zero, LocalConfig, SearchBounds, Variable};
use crate::controller::Routing;
use crate::error::{Error, Result};
use crate::simulate::{objective, DesignPoint, Scenario};

/// Grid cells above this LCOE ($/MWh, i.e. $100/kWh) are flagged so contour
/// plots can blank them.
pub const DISPLAY_CEILING: f64 = 100_000.0;

/// The four named two-variable slices of the design space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Slice {
    /// Tidal x solar with all storage on the LIB.
    LibOnly,
    /// Tidal x solar with all storage on the VRFB.
    VrfbOnly,
    /// Tidal x span without solar.
    NoPv,
    /// Solar x span without tidal.
    NoTidal,
}

impl Slice {
    pub fn spec(self) -> SliceSpec {
        let none = DesignPoint::new(0.0, 0.0, 1.0);
        match self {
            Slice::LibOnly => SliceSpec {
                x: Variable::PTidal,
                y: Variable::PSolar,
                fixed: none,
                routing: Routing::LibOnly,
            },
            Slice::VrfbOnly => SliceSpec {
                x: Variable::PTidal,
                y: Variable::PSolar,
                fixed: none,
                routing: Routing::VrfbOnly,
            },
            Slice::NoPv => SliceSpec {
                x: Variable::PTidal,
                y: Variable::Span,
                fixed: none,
                routing: Routing::Hybrid,
            },
            Slice::NoTidal => SliceSpec {
                x: Variable::PSolar,
                y: Variable::Span,
                fixed: none,
                routing: Routing::Hybrid,
            },
        }
    }
}

/// Two free variables; the third takes its value from `fixed`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceSpec {
    pub x: Variable,
    pub y: Variable,
    pub fixed: DesignPoint,
    pub routing: Routing,
}

impl SliceSpec {
    pub fn validate(&self) -> Result<()> {
        if self.x == self.y {
            return Err(Error::invalid("slice", "free variables must differ"));
        }
        if self.routing != Routing::Hybrid && (self.x == Variable::Span || self.y == Variable::Span)
        {
            return Err(Error::invalid(
                "slice",
                "span has no effect when all storage is routed to one battery",
            ));
        }
        self.fixed.validate()
    }

    pub fn free(&self) -> [Variable; 2] {
        [self.x, self.y]
    }

    /// `scenario` with this slice's routing.
    pub fn scenario(&self, scenario: &Scenario) -> Scenario {
        let mut s = scenario.clone();
        s.routing = self.routing;
        s
    }

    fn point(&self, x: f64, y: f64) -> DesignPoint {
        let mut d = self.fixed;
        self.x.set(&mut d, x);
        self.y.set(&mut d, y);
        d
    }
}

fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.log10(), hi.log10());
    let mut v: Vec<f64> = (0..n)
        .map(|i| 10f64.powf(a + (b - a) * i as f64 / (n - 1) as f64))
        .collect();
    v[0] = lo;
    v[n - 1] = hi;
    v
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridResult {
    pub spec: SliceSpec,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// Row-major over `xs`: value of `(xs[i], ys[j])` at `i * ys.len() + j`.
    pub values: Vec<f64>,
    pub best: DesignPoint,
    pub best_lcoe: f64,
}

impl GridResult {
    /// `(x, y, lcoe)` for every cell.
    pub fn cells(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.xs.iter().enumerate().flat_map(move |(i, &x)| {
            self.ys
                .iter()
                .enumerate()
                .map(move |(j, &y)| (x, y, self.values[i * self.ys.len() + j]))
        })
    }

    pub fn above_ceiling(lcoe: f64) -> bool {
        !(lcoe <= DISPLAY_CEILING)
    }
}

/// Evaluates the objective on an `n_per_axis` x `n_per_axis` log-spaced grid
/// over the slice's free variables.
pub fn grid_search(
    spec: &SliceSpec,
    scenario: &Scenario,
    bounds: &SearchBounds,
    n_per_axis: usize,
) -> Result<GridResult> {
    if n_per_axis < 2 {
        return Err(Error::invalid("n_per_axis", "must be >= 2"));
    }
    spec.validate()?;
    bounds.validate()?;
    let scenario = spec.scenario(scenario);
    scenario.validate()?;
    let [xl, xh] = bounds.get(spec.x);
    let [yl, yh] = bounds.get(spec.y);
    let xs = log_space(xl, xh, n_per_axis);
    let ys = log_space(yl, yh, n_per_axis);
    let values: Vec<f64> = (0..xs.len() * ys.len())
        .into_par_iter()
        .map(|k| {
            let d = spec.point(xs[k / ys.len()], ys[k % ys.len()]);
            objective(&d, &scenario).unwrap_or(f64::INFINITY)
        })
        .collect();
    let mut best_k = 0;
    for k in 1..values.len() {
        if values[k] < values[best_k] {
            best_k = k;
        }
    }
    Ok(GridResult {
        spec: *spec,
        best: spec.point(xs[best_k / ys.len()], ys[best_k % ys.len()]),
        best_lcoe: values[best_k],
        xs,
        ys,
        values,
    })
}

/// Refines the grid's best cell over the slice's free variables.
pub fn refine_slice(
    grid: &GridResult,
    scenario: &Scenario,
    bounds: &SearchBounds,
) -> Result<(DesignPoint, f64)> {
    let scenario = grid.spec.scenario(scenario);
    let (refined, _) = refine_variables(
        grid.best,
        &grid.spec.free(),
        bounds,
        &scenario,
        &LocalConfig::default(),
    )?;
    snap_to_zero(refined, bounds, &scenario)
}
