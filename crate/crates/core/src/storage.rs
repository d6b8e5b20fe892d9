//! Battery sizing, state of charge, cycle accounting and capital cost for the
//! lithium-ion (LIB) and vanadium redox flow (VRFB) batteries.
//!
//! Sign convention: positive power is discharge. A battery is sized from its
//! commanded trace: rated power is the peak absolute power and energy
//! capacity is the peak-to-trough swing of the stored-energy trajectory, so
//! the commanded trace is always absorbed exactly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::HourlySeries;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LibParams {
    /// $/kWh of capacity, including construction and commissioning.
    pub energy_cost: f64,
    /// $/kW, power conversion plus balance of plant.
    pub power_cost: f64,
    pub max_lifetime: f64,
    pub cycle_life: f64,
    pub round_trip_eff: f64,
}

impl Default for LibParams {
    fn default() -> Self {
        Self {
            energy_cost: 285.0,
            power_cost: 306.0,
            max_lifetime: 10.0,
            cycle_life: 3500.0,
            round_trip_eff: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VrfbParams {
    /// Module cost curve `a * exp(b / ep) - c`, in $/kWh.
    pub module_cost_a: f64,
    pub module_cost_b: f64,
    pub module_cost_c: f64,
    /// Construction and commissioning, $/kWh.
    pub candc_cost: f64,
    /// Power conversion system, $/kW.
    pub pcs_cost: f64,
    /// Balance of plant, $/kW.
    pub bop_cost: f64,
    pub max_lifetime: f64,
    pub cycle_life: f64,
    pub round_trip_eff: f64,
}

impl Default for VrfbParams {
    fn default() -> Self {
        Self {
            module_cost_a: 7.004e4,
            module_cost_b: 0.004021,
            module_cost_c: 6.9837e4,
            candc_cost: 650.0,
            pcs_cost: 211.0,
            bop_cost: 95.0,
            max_lifetime: 15.0,
            cycle_life: 10000.0,
            round_trip_eff: 1.0,
        }
    }
}

fn check_nonneg(name: &'static str, v: f64) -> Result<()> {
    if !(v.is_finite() && v >= 0.0) {
        return Err(Error::invalid(name, format!("must be >= 0, got {v}")));
    }
    Ok(())
}

fn check_positive(name: &'static str, v: f64) -> Result<()> {
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::invalid(name, format!("must be > 0, got {v}")));
    }
    Ok(())
}

fn check_efficiency(name: &'static str, v: f64) -> Result<()> {
    if !(v > 0.0 && v <= 1.0) {
        return Err(Error::invalid(name, format!("must lie in (0, 1], got {v}")));
    }
    Ok(())
}

impl LibParams {
    pub fn validate(&self) -> Result<()> {
        check_nonneg("lib.energy_cost", self.energy_cost)?;
        check_nonneg("lib.power_cost", self.power_cost)?;
        check_positive("lib.max_lifetime", self.max_lifetime)?;
        check_positive("lib.cycle_life", self.cycle_life)?;
        check_efficiency("lib.round_trip_eff", self.round_trip_eff)
    }

    /// Sizes a LIB from its commanded power trace, counting cycles as
    /// discharged energy over capacity.
    pub fn size(&self, p: &HourlySeries) -> Result<BatterySizing> {
        let stats = DispatchStats::from_trace(p.as_slice(), self.round_trip_eff);
        let cycles = lib_cycles(stats.discharged, stats.capacity)?;
        let cost = lib_capital_cost(stats.rated_power, stats.capacity, self);
        Ok(BatterySizing::new(
            &stats,
            cycles,
            realized_lifetime(self.max_lifetime, self.cycle_life, cycles),
            cost,
        ))
    }
}

impl VrfbParams {
    pub fn validate(&self) -> Result<()> {
        check_nonneg("vrfb.module_cost_a", self.module_cost_a)?;
        check_nonneg("vrfb.module_cost_b", self.module_cost_b)?;
        check_nonneg("vrfb.module_cost_c", self.module_cost_c)?;
        if self.module_cost_a <= self.module_cost_c {
            return Err(Error::invalid(
                "vrfb.module_cost_a",
                "must exceed module_cost_c so the cost floor is positive",
            ));
        }
        check_nonneg("vrfb.candc_cost", self.candc_cost)?;
        check_nonneg("vrfb.pcs_cost", self.pcs_cost)?;
        check_nonneg("vrfb.bop_cost", self.bop_cost)?;
        check_positive("vrfb.max_lifetime", self.max_lifetime)?;
        check_positive("vrfb.cycle_life", self.cycle_life)?;
        check_efficiency("vrfb.round_trip_eff", self.round_trip_eff)
    }

    /// Sizes a VRFB from its commanded power trace, counting one cycle per
    /// charge-to-discharge mode switch.
    pub fn size(&self, p: &HourlySeries) -> Result<BatterySizing> {
        let stats = DispatchStats::from_trace(p.as_slice(), self.round_trip_eff);
        let cycles = stats.mode_switches as f64;
        let cost = vrfb_capital_cost(stats.rated_power, stats.capacity, self)?;
        Ok(BatterySizing::new(
            &stats,
            cycles,
            realized_lifetime(self.max_lifetime, self.cycle_life, cycles),
            cost,
        ))
    }
}

/// Capital cost split into its energy-capacity and rated-power parts, in $.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CapitalCost {
    pub energy: f64,
    pub power: f64,
}

impl CapitalCost {
    pub fn total(&self) -> f64 {
        self.energy + self.power
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatterySizing {
    /// kW.
    pub rated_power: f64,
    /// kWh.
    pub capacity: f64,
    /// Hours; zero for an unused battery.
    pub ep_ratio: f64,
    pub cycles_per_year: f64,
    /// Years.
    pub realized_lifetime: f64,
    pub capital_cost: CapitalCost,
    /// Stored energy at year end minus at year start, kWh.
    pub net_stored: f64,
}

impl BatterySizing {
    fn new(stats: &DispatchStats, cycles: f64, lifetime: f64, cost: CapitalCost) -> Self {
        Self {
            rated_power: stats.rated_power,
            capacity: stats.capacity,
            ep_ratio: ep_ratio(stats.capacity, stats.rated_power),
            cycles_per_year: cycles,
            realized_lifetime: lifetime,
            capital_cost: cost,
            net_stored: stats.net_stored,
        }
    }
}

fn ep_ratio(capacity: f64, rated_power: f64) -> f64 {
    if rated_power > 0.0 {
        capacity / rated_power
    } else {
        0.0
    }
}

/// Single-pass summary of a commanded power trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispatchStats {
    pub rated_power: f64,
    pub capacity: f64,
    /// Total discharged energy, kWh.
    pub discharged: f64,
    pub mode_switches: u32,
    pub net_stored: f64,
}

impl DispatchStats {
    pub fn from_trace(p: &[f64], efficiency: f64) -> Self {
        let mut rated = 0.0f64;
        let mut stored = 0.0f64;
        let (mut lo, mut hi) = (0.0f64, 0.0f64);
        let mut discharged = 0.0;
        let mut switches = 0u32;
        let mut charging = None;
        for &v in p {
            rated = rated.max(v.abs());
            stored += stored_delta(v, efficiency);
            lo = lo.min(stored);
            hi = hi.max(stored);
            if v > 0.0 {
                discharged += v;
                if charging == Some(true) {
                    switches += 1;
                }
                charging = Some(false);
            } else if v < 0.0 {
                charging = Some(true);
            }
        }
        Self {
            rated_power: rated,
            capacity: hi - lo,
            discharged,
            mode_switches: switches,
            net_stored: stored,
        }
    }
}

#[inline]
fn stored_delta(p: f64, efficiency: f64) -> f64 {
    if p < 0.0 {
        -p * efficiency
    } else {
        -p
    }
}

/// Rated power: peak absolute (dis)charge power.
pub fn size_power(p: &HourlySeries) -> f64 {
    p.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Stored energy over the year.
///
/// `initial` is the charge before the first hour and `levels[t]` the charge at
/// the end of hour `t`. The trajectory is shifted so its lowest point,
/// including the initial state, is exactly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SocTrajectory {
    pub initial: f64,
    pub levels: HourlySeries,
}

impl SocTrajectory {
    pub fn min(&self) -> f64 {
        self.initial.min(self.levels.min())
    }

    pub fn max(&self) -> f64 {
        self.initial.max(self.levels.max())
    }

    pub fn last(&self) -> f64 {
        self.levels[self.levels.len() - 1]
    }
}

pub fn soc_trajectory(p: &HourlySeries, efficiency: f64) -> SocTrajectory {
    let mut stored = 0.0;
    let mut lowest = 0.0f64;
    let cumulative: Vec<f64> = p
        .iter()
        .map(|&v| {
            stored += stored_delta(v, efficiency);
            lowest = lowest.min(stored);
            stored
        })
        .collect();
    SocTrajectory {
        initial: -lowest,
        levels: HourlySeries::from_vec_unchecked(
            cumulative.into_iter().map(|w| w - lowest).collect(),
        ),
    }
}

/// Energy capacity: the highest charge reached.
pub fn size_capacity(soc: &SocTrajectory) -> f64 {
    soc.max()
}

/// Energy the battery ends the year short of its starting charge, kWh.
pub fn annual_charge_imbalance(p: &HourlySeries, efficiency: f64) -> f64 {
    let net: f64 = p.iter().map(|&v| stored_delta(v, efficiency)).sum();
    (-net).max(0.0)
}

fn lib_cycles(discharged: f64, capacity: f64) -> Result<f64> {
    if capacity > 0.0 {
        Ok(discharged / capacity)
    } else if discharged == 0.0 {
        Ok(0.0)
    } else {
        Err(Error::InconsistentSizing(format!(
            "{discharged} kWh discharged from a zero-capacity battery"
        )))
    }
}

/// LIB cycles: discharged energy over capacity.
pub fn lib_cycles_per_year(p: &HourlySeries, capacity: f64) -> Result<f64> {
    check_nonneg("capacity", capacity)?;
    let discharged: f64 = p.iter().filter(|&&v| v > 0.0).sum();
    lib_cycles(discharged, capacity)
}

/// VRFB cycles: charge-to-discharge transitions, idle hours ignored.
pub fn vrfb_cycles_per_year(p: &HourlySeries) -> f64 {
    let mut last_sign = 0i8;
    let mut count = 0u32;
    for &v in p {
        let sign = if v > 0.0 {
            1
        } else if v < 0.0 {
            -1
        } else {
            continue;
        };
        if last_sign == -1 && sign == 1 {
            count += 1;
        }
        last_sign = sign;
    }
    count as f64
}

/// Years until replacement: calendar life or cycle budget, whichever ends first.
pub fn realized_lifetime(max_lifetime: f64, cycle_life: f64, cycles_per_year: f64) -> f64 {
    if cycles_per_year > 0.0 {
        max_lifetime.min(cycle_life / cycles_per_year)
    } else {
        max_lifetime
    }
}

/// VRFB module cost in $/kWh as a function of the energy-to-power ratio.
pub fn vrfb_module_cost_per_kwh(ep_ratio: f64, params: &VrfbParams) -> Result<f64> {
    if !(ep_ratio > 0.0) {
        return Err(Error::invalid(
            "ep_ratio",
            format!("must be > 0, got {ep_ratio}"),
        ));
    }
    Ok(params.module_cost_a * (params.module_cost_b / ep_ratio).exp() - params.module_cost_c)
}

pub fn lib_capital_cost(rated_power: f64, capacity: f64, params: &LibParams) -> CapitalCost {
    CapitalCost {
        energy: capacity * params.energy_cost,
        power: rated_power * params.power_cost,
    }
}

pub fn vrfb_capital_cost(
    rated_power: f64,
    capacity: f64,
    params: &VrfbParams,
) -> Result<CapitalCost> {
    let energy = if capacity > 0.0 {
        let module = vrfb_module_cost_per_kwh(ep_ratio(capacity, rated_power), params)?;
        capacity * (module + params.candc_cost)
    } else {
        0.0
    };
    Ok(CapitalCost {
        energy,
        power: rated_power * (params.pcs_cost + params.bop_cost),
    })
}
