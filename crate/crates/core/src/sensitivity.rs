//! One-at-a-time cost sensitivity: re-optimize the design at each multiplier
//! of a single component's unit cost.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::economics::LcoeBreakdown;
use crate::error::{Error, Result};
use crate::optimize::{best_of_seeds, PsoConfig, SearchBounds};
use crate::simulate::{run_year, DesignPoint, Scenario};
use crate::storage::{vrfb_module_cost_per_kwh, BatterySizing};

/// The unit cost being swept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum SweepComponent {
    /// LIB $/kWh.
    LibEnergy,
    /// VRFB module cost curve; C&C, PCS and BOP stay fixed.
    VrfbModule,
    /// Solar $/kW.
    SolarPower,
    /// Tidal $/kW.
    TidalPower,
}

impl SweepComponent {
    pub const ALL: [SweepComponent; 4] = [
        SweepComponent::LibEnergy,
        SweepComponent::VrfbModule,
        SweepComponent::SolarPower,
        SweepComponent::TidalPower,
    ];

    pub fn label(self) -> &'static str {
        match self {
            SweepComponent::LibEnergy => "lib_energy",
            SweepComponent::VrfbModule => "vrfb_module",
            SweepComponent::SolarPower => "solar_power",
            SweepComponent::TidalPower => "tidal_power",
        }
    }

    /// `base` with this component's multiplier scaled by `m`.
    pub fn apply(self, base: &Scenario, m: f64) -> Scenario {
        let mut s = base.clone();
        let slot = match self {
            SweepComponent::LibEnergy => &mut s.multipliers.lib_energy,
            SweepComponent::VrfbModule => &mut s.multipliers.vrfb_module,
            SweepComponent::SolarPower => &mut s.multipliers.solar_power,
            SweepComponent::TidalPower => &mut s.multipliers.tidal_power,
        };
        *slot *= m;
        s
    }
}

/// `n` values from `lo` to `hi` inclusive, equally spaced. Endpoints and
/// round fractions are exact.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => {
            let last = (n - 1) as f64;
            (0..n)
                .map(|i| (lo * (last - i as f64) + hi * i as f64) / last)
                .collect()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub component: SweepComponent,
    pub multipliers: Vec<f64>,
    pub master_seed: u64,
    /// Optimizations per step; the best is kept.
    pub restarts: usize,
}

impl SweepSpec {
    /// Twenty steps from a tenth of the baseline cost to double it.
    pub fn new(component: SweepComponent, master_seed: u64) -> Self {
        Self {
            component,
            multipliers: linspace(0.1, 2.0, 20),
            master_seed,
            restarts: 3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.multipliers.is_empty() {
            return Err(Error::invalid("multipliers", "must not be empty"));
        }
        if self
            .multipliers
            .iter()
            .any(|&m| !(m.is_finite() && m > 0.0))
        {
            return Err(Error::invalid("multipliers", "must be positive"));
        }
        if self.multipliers.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("multipliers", "must be strictly increasing"));
        }
        if self.restarts == 0 {
            return Err(Error::invalid("restarts", "must be >= 1"));
        }
        Ok(())
    }

    /// Optimizer seeds for step `step`.
    pub fn step_seeds(&self, step: usize) -> Vec<u64> {
        step_seeds(self.master_seed, step, self.restarts)
    }
}

/// Seeds derived from the master seed and the step index alone, so a step's
/// result does not depend on which other steps run.
pub fn step_seeds(master_seed: u64, step: usize, restarts: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(step as u64);
    (0..restarts).map(|_| rng.next_u64()).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub multiplier: f64,
    pub design: DesignPoint,
    pub lib: BatterySizing,
    pub vrfb: BatterySizing,
    pub breakdown: LcoeBreakdown,
    pub backup_energy_kwh: f64,
    /// VRFB module $/kWh at the chosen E/P ratio; zero without a VRFB.
    pub vrfb_module_cost: f64,
}

impl SweepRow {
    pub fn total_lcoe(&self) -> f64 {
        self.breakdown.total
    }

    /// LIB share of total installed energy capacity.
    pub fn lib_capacity_share(&self) -> f64 {
        let total = self.lib.capacity + self.vrfb.capacity;
        if total > 0.0 {
            self.lib.capacity / total
        } else {
            0.0
        }
    }
}

/// Optimal design at one multiplier.
pub fn sweep_step(
    spec: &SweepSpec,
    step: usize,
    base: &Scenario,
    bounds: &SearchBounds,
    pso: &PsoConfig,
) -> Result<SweepRow> {
    let multiplier = spec.multipliers[step];
    let scenario = spec.component.apply(base, multiplier);
    let best = best_of_seeds(bounds, &scenario, pso, &spec.step_seeds(step))?;
    let result = run_year(&best.design, &scenario)?;
    let vrfb_module_cost = if result.vrfb_sizing.capacity > 0.0 {
        vrfb_module_cost_per_kwh(result.vrfb_sizing.ep_ratio, &scenario.effective_vrfb())?
    } else {
        0.0
    };
    Ok(SweepRow {
        multiplier,
        design: best.design,
        lib: result.lib_sizing,
        vrfb: result.vrfb_sizing,
        breakdown: result.breakdown,
        backup_energy_kwh: result.backup_energy_kwh,
        vrfb_module_cost,
    })
}

/// Re-optimizes at every multiplier. Steps run in parallel; rows come back
/// in multiplier order.
pub fn cost_sweep(
    spec: &SweepSpec,
    base: &Scenario,
    bounds: &SearchBounds,
    pso: &PsoConfig,
) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    (0..spec.multipliers.len())
        .into_par_iter()
        .map(|step| sweep_step(spec, step, base, bounds, pso))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_multipliers() {
        let m = linspace(0.1, 2.0, 20);
        assert_eq!(m.len(), 20);
        assert_eq!(m[0], 0.1);
        assert_eq!(m[9], 1.0);
        assert_eq!(m[19], 2.0);
        assert!(m.windows(2).all(|w| (w[1] - w[0] - 0.1).abs() < 1e-12));
    }

    #[test]
    fn spec_validation() {
        let mut s = SweepSpec::new(SweepComponent::SolarPower, 1);
        assert!(s.validate().is_ok());
        s.multipliers = vec![1.0, 1.0];
        assert!(s.validate().is_err());
        s.multipliers = vec![-1.0, 1.0];
        assert!(s.validate().is_err());
        s.multipliers = vec![0.5, 1.0];
        s.restarts = 0;
        assert!(s.validate().is_err());
    }

    #[test]
    fn seeds_are_per_step_and_stable() {
        assert_eq!(step_seeds(7, 3, 3), step_seeds(7, 3, 3));
        assert_ne!(step_seeds(7, 3, 3), step_seeds(7, 4, 3));
        assert_ne!(step_seeds(7, 3, 3), step_seeds(8, 3, 3));
        assert_eq!(step_seeds(7, 3, 2), step_seeds(7, 3, 3)[..2]);
        let s = step_seeds(7, 3, 3);
        assert!(s[0] != s[1] && s[1] != s[2]);
    }
}
