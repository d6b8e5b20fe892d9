//! One-year evaluation of a design: generation, controller split, battery
//! sizing and the resulting LCOE.

use serde::{Deserialize, Serialize};

use crate::controller::{dispatch, ControllerParams, PowerSplit, Routing, Warmup};
use crate::economics::{backup_penalty, lcoe, Component, ComponentCost, LcoeBreakdown};
use crate::error::{Error, Result};
use crate::profiles::{tidal_flow_series, GeneratorSpec, TidalParams};
use crate::series::{HourlySeries, HOURS_PER_YEAR};
use crate::storage::{soc_trajectory, BatterySizing, LibParams, VrfbParams};

/// The independent design variables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignPoint {
    /// Tidal rated power, kW.
    pub p_tidal: f64,
    /// Solar rated power, kW.
    pub p_solar: f64,
    /// Controller moving-average span, hours.
    pub span: f64,
}

impl DesignPoint {
    pub fn new(p_tidal: f64, p_solar: f64, span: f64) -> Self {
        Self {
            p_tidal,
            p_solar,
            span,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("p_tidal", self.p_tidal), ("p_solar", self.p_solar)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::invalid(name, format!("must be >= 0 kW, got {v}")));
            }
        }
        ControllerParams::new(self.span).map(|_| ())
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.p_tidal, self.p_solar, self.span]
    }

    pub fn from_array(v: [f64; 3]) -> Self {
        Self::new(v[0], v[1], v[2])
    }
}

/// Multipliers on the four swept unit costs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CostMultipliers {
    /// LIB $/kWh.
    pub lib_energy: f64,
    /// VRFB module cost curve (both exponential coefficients).
    pub vrfb_module: f64,
    /// Solar $/kW.
    pub solar_power: f64,
    /// Tidal $/kW.
    pub tidal_power: f64,
}

impl Default for CostMultipliers {
    fn default() -> Self {
        Self {
            lib_energy: 1.0,
            vrfb_module: 1.0,
            solar_power: 1.0,
            tidal_power: 1.0,
        }
    }
}

impl CostMultipliers {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("multipliers.lib_energy", self.lib_energy),
            ("multipliers.vrfb_module", self.vrfb_module),
            ("multipliers.solar_power", self.solar_power),
            ("multipliers.tidal_power", self.tidal_power),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(name, format!("must be > 0, got {v}")));
            }
        }
        Ok(())
    }
}

/// Everything that stays fixed while designs are evaluated.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub demand: HourlySeries,
    /// Output of a 1 kW-DC solar array.
    pub solar_unit: HourlySeries,
    tidal: TidalParams,
    tidal_unit: HourlySeries,
    pub lib: LibParams,
    pub vrfb: VrfbParams,
    pub solar_spec: GeneratorSpec,
    pub tidal_spec: GeneratorSpec,
    /// Annual delivered energy used as the LCOE denominator, MWh.
    pub delivered_energy_mwh: f64,
    /// $/MWh of backup generation.
    pub backup_rate: f64,
    pub multipliers: CostMultipliers,
    pub routing: Routing,
    pub warmup: Warmup,
}

impl Scenario {
    /// Baseline costs and lifetimes; delivered energy defaults to the demand
    /// total.
    pub fn new(demand: HourlySeries, solar_unit: HourlySeries, tidal: TidalParams) -> Result<Self> {
        let tidal_unit = tidal_flow_series(&tidal)?;
        let delivered_energy_mwh = demand.sum() / 1000.0;
        Ok(Self {
            demand,
            solar_unit,
            tidal,
            tidal_unit,
            lib: LibParams::default(),
            vrfb: VrfbParams::default(),
            solar_spec: GeneratorSpec::SOLAR_BASELINE,
            tidal_spec: GeneratorSpec::TIDAL_BASELINE,
            delivered_energy_mwh,
            backup_rate: 10_000.0,
            multipliers: CostMultipliers::default(),
            routing: Routing::Hybrid,
            warmup: Warmup::ZeroPadded,
        })
    }

    pub fn tidal(&self) -> &TidalParams {
        &self.tidal
    }

    pub fn set_tidal(&mut self, tidal: TidalParams) -> Result<()> {
        self.tidal_unit = tidal_flow_series(&tidal)?;
        self.tidal = tidal;
        Ok(())
    }

    /// Normalized tidal flow, i.e. output per kW of tidal rating.
    pub fn tidal_unit(&self) -> &HourlySeries {
        &self.tidal_unit
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(hour) = self.demand.iter().position(|&v| v < 0.0) {
            return Err(Error::invalid("demand", format!("negative at hour {hour}")));
        }
        if let Some(hour) = self.solar_unit.iter().position(|&v| v < 0.0) {
            return Err(Error::invalid("solar", format!("negative at hour {hour}")));
        }
        self.lib.validate()?;
        self.vrfb.validate()?;
        self.solar_spec.validate("solar")?;
        self.tidal_spec.validate("tidal")?;
        if !(self.delivered_energy_mwh.is_finite() && self.delivered_energy_mwh > 0.0) {
            return Err(Error::invalid(
                "delivered_energy_mwh",
                format!("must be > 0, got {}", self.delivered_energy_mwh),
            ));
        }
        if !(self.backup_rate.is_finite() && self.backup_rate >= 0.0) {
            return Err(Error::invalid("backup_rate", "must be >= 0"));
        }
        self.multipliers.validate()
    }

    /// LIB parameters with the energy-cost multiplier applied.
    pub fn effective_lib(&self) -> LibParams {
        LibParams {
            energy_cost: self.lib.energy_cost * self.multipliers.lib_energy,
            ..self.lib
        }
    }

    /// VRFB parameters with the module multiplier applied to the module
    /// curve only; construction, PCS and BOP adders stay fixed.
    pub fn effective_vrfb(&self) -> VrfbParams {
        let m = self.multipliers.vrfb_module;
        VrfbParams {
            module_cost_a: self.vrfb.module_cost_a * m,
            module_cost_c: self.vrfb.module_cost_c * m,
            ..self.vrfb
        }
    }

    pub fn effective_solar(&self) -> GeneratorSpec {
        GeneratorSpec {
            unit_cost: self.solar_spec.unit_cost * self.multipliers.solar_power,
            ..self.solar_spec
        }
    }

    pub fn effective_tidal(&self) -> GeneratorSpec {
        GeneratorSpec {
            unit_cost: self.tidal_spec.unit_cost * self.multipliers.tidal_power,
            ..self.tidal_spec
        }
    }

    fn deficit(&self, design: &DesignPoint) -> HourlySeries {
        let d = self.demand.as_slice();
        let tide = self.tidal_unit.as_slice();
        let sun = self.solar_unit.as_slice();
        HourlySeries::from_vec_unchecked(
            (0..HOURS_PER_YEAR)
                .map(|t| d[t] - design.p_tidal * tide[t] - design.p_solar * sun[t])
                .collect(),
        )
    }
}

/// Sizing and cost outcome of a design, without hourly traces.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub lib: BatterySizing,
    pub vrfb: BatterySizing,
    pub breakdown: LcoeBreakdown,
    /// Annual shortfall of the combined storage, made up by backup, kWh.
    pub backup_energy_kwh: f64,
    /// Net energy the combined storage gains over the year, kWh.
    pub curtailed_surplus_kwh: f64,
}

impl Evaluation {
    pub fn total_lcoe(&self) -> f64 {
        self.breakdown.total
    }
}

fn evaluate_split(
    design: &DesignPoint,
    scenario: &Scenario,
    split: &PowerSplit,
) -> Result<Evaluation> {
    let lib_params = scenario.effective_lib();
    let lib = lib_params.size(&split.p_lib)?;
    let vrfb_params = scenario.effective_vrfb();
    let vrfb = vrfb_params.size(&split.p_vrfb)?;

    let net = lib.net_stored + vrfb.net_stored;
    let backup_energy_kwh = (-net).max(0.0);
    let curtailed_surplus_kwh = net.max(0.0);

    let solar = scenario.effective_solar();
    let tidal = scenario.effective_tidal();
    let mut items = Vec::with_capacity(6);
    if design.p_tidal > 0.0 {
        items.push(ComponentCost::new(
            Component::Tidal,
            tidal.capital_cost(design.p_tidal),
            tidal.lifetime,
        ));
    }
    if design.p_solar > 0.0 {
        items.push(ComponentCost::new(
            Component::Solar,
            solar.capital_cost(design.p_solar),
            solar.lifetime,
        ));
    }
    for (sizing, energy, power) in [
        (&lib, Component::LibEnergy, Component::LibPower),
        (&vrfb, Component::VrfbEnergy, Component::VrfbPower),
    ] {
        if sizing.rated_power > 0.0 {
            items.push(ComponentCost::new(
                energy,
                sizing.capital_cost.energy,
                sizing.realized_lifetime,
            ));
            items.push(ComponentCost::new(
                power,
                sizing.capital_cost.power,
                sizing.realized_lifetime,
            ));
        }
    }
    let mut breakdown = lcoe(&items, scenario.delivered_energy_mwh)?;
    if backup_energy_kwh > 0.0 {
        breakdown.push(
            Component::Backup,
            backup_penalty(
                backup_energy_kwh / 1000.0,
                scenario.backup_rate,
                scenario.delivered_energy_mwh,
            ),
        );
    }
    Ok(Evaluation {
        lib,
        vrfb,
        breakdown,
        backup_energy_kwh,
        curtailed_surplus_kwh,
    })
}

fn split_for(design: &DesignPoint, scenario: &Scenario) -> Result<(HourlySeries, PowerSplit)> {
    design.validate()?;
    let deficit = scenario.deficit(design);
    let params = ControllerParams {
        span: design.span,
        warmup: scenario.warmup,
    };
    let split = dispatch(&deficit, &params, scenario.routing)?;
    Ok((deficit, split))
}

/// Sizing and LCOE of `design` without keeping the hourly traces.
pub fn evaluate(design: &DesignPoint, scenario: &Scenario) -> Result<Evaluation> {
    let (_, split) = split_for(design, scenario)?;
    evaluate_split(design, scenario, &split)
}

/// Total LCOE in $/MWh; the quantity every optimizer minimizes.
pub fn objective(design: &DesignPoint, scenario: &Scenario) -> Result<f64> {
    evaluate(design, scenario).map(|e| e.total_lcoe())
}

/// Hourly traces of a simulated year. Powers in kW, stored energy in kWh.
#[derive(Debug, Clone, PartialEq)]
pub struct Traces {
    pub demand: HourlySeries,
    pub tidal: HourlySeries,
    pub solar: HourlySeries,
    pub deficit: HourlySeries,
    pub p_lib: HourlySeries,
    pub p_vrfb: HourlySeries,
    pub soc_lib: HourlySeries,
    pub soc_vrfb: HourlySeries,
    /// Surplus neither consumed nor stored.
    pub curtailment: HourlySeries,
    /// Hourly backup draw. Storage always meets the commanded power, so this
    /// is zero; the annual shortfall is reported separately.
    pub backup: HourlySeries,
}

impl Traces {
    /// Column names with units, in [`Traces::columns`] order.
    pub const HEADERS: [&'static str; 10] = [
        "demand_kw",
        "tidal_kw",
        "solar_kw",
        "deficit_kw",
        "p_lib_kw",
        "p_vrfb_kw",
        "soc_lib_kwh",
        "soc_vrfb_kwh",
        "curtailment_kw",
        "backup_kw",
    ];

    pub fn columns(&self) -> [&HourlySeries; 10] {
        [
            &self.demand,
            &self.tidal,
            &self.solar,
            &self.deficit,
            &self.p_lib,
            &self.p_vrfb,
            &self.soc_lib,
            &self.soc_vrfb,
            &self.curtailment,
            &self.backup,
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationResult {
    pub design: DesignPoint,
    pub traces: Traces,
    pub lib_sizing: BatterySizing,
    pub vrfb_sizing: BatterySizing,
    pub breakdown: LcoeBreakdown,
    pub total_lcoe: f64,
    pub backup_energy_kwh: f64,
    pub curtailed_surplus_kwh: f64,
    /// Initial stored energy of each battery, kWh.
    pub initial_soc_lib: f64,
    pub initial_soc_vrfb: f64,
}

/// Simulates a full year of `design` under `scenario`.
pub fn run_year(design: &DesignPoint, scenario: &Scenario) -> Result<SimulationResult> {
    let (deficit, split) = split_for(design, scenario)?;
    let eval = evaluate_split(design, scenario, &split)?;

    let soc_lib = soc_trajectory(&split.p_lib, scenario.lib.round_trip_eff);
    let soc_vrfb = soc_trajectory(&split.p_vrfb, scenario.vrfb.round_trip_eff);
    let curtailment = HourlySeries::from_vec_unchecked(
        (0..HOURS_PER_YEAR)
            .map(|t| {
                let charging = (-split.p_lib[t]).max(0.0) + (-split.p_vrfb[t]).max(0.0);
                ((-deficit[t]) - charging).max(0.0)
            })
            .collect(),
    );

    let traces = Traces {
        demand: scenario.demand.clone(),
        tidal: scenario.tidal_unit.scale(design.p_tidal),
        solar: scenario.solar_unit.scale(design.p_solar),
        deficit,
        p_lib: split.p_lib,
        p_vrfb: split.p_vrfb,
        soc_lib: soc_lib.levels,
        soc_vrfb: soc_vrfb.levels,
        curtailment,
        backup: HourlySeries::zeros(),
    };
    Ok(SimulationResult {
        design: *design,
        traces,
        total_lcoe: eval.total_lcoe(),
        lib_sizing: eval.lib,
        vrfb_sizing: eval.vrfb,
        breakdown: eval.breakdown,
        backup_energy_kwh: eval.backup_energy_kwh,
        curtailed_surplus_kwh: eval.curtailed_surplus_kwh,
        initial_soc_lib: soc_lib.initial,
        initial_soc_vrfb: soc_vrfb.initial,
    })
}
