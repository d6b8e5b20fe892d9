//! TOML scenario files. Every key is optional and defaults to the baseline
//! study, so an empty file gives baseline costs with synthetic profiles.
//!
//! ```toml
//! [demand]
//! source = "synthetic"        # or "csv" with path = "load.csv"
//! annual_energy_gwh = 4.57
//!
//! [solar]
//! capacity_factor = 0.159
//! unit_cost_per_kw = 1060.0
//!
//! [vrfb]
//! cycle_life = 10000.0
//!
//! [pso]
//! swarm_size = 100
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::controller::{Routing, Warmup};
use crate::error::{Error, Result};
use crate::optimize::{PsoConfig, SearchBounds};
use crate::profiles::{
    load_profile_csv, scale_demand, GeneratorSpec, SyntheticDemand, SyntheticSolar, TidalParams,
};
use crate::series::HourlySeries;
use crate::simulate::{CostMultipliers, Scenario};
use crate::storage::{LibParams, VrfbParams};

pub const DEFAULT_ANNUAL_DEMAND_GWH: f64 = 4.57;
pub const DEFAULT_SOLAR_CAPACITY_FACTOR: f64 = 0.159;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    #[default]
    Synthetic,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DemandSection {
    pub source: Source,
    pub path: Option<PathBuf>,
    /// Synthetic: target total. CSV: the file is rescaled to it when set.
    pub annual_energy_gwh: Option<f64>,
    /// Falls back to a seed derived from the run seed.
    pub seed: Option<u64>,
    pub repeat_days: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolarSection {
    pub source: Source,
    /// Output of a 1 kW-DC array, kW.
    pub path: Option<PathBuf>,
    pub capacity_factor: f64,
    pub seed: Option<u64>,
    pub repeat_days: Option<usize>,
    pub unit_cost_per_kw: f64,
    pub lifetime_years: f64,
}

impl Default for SolarSection {
    fn default() -> Self {
        Self {
            source: Source::Synthetic,
            path: None,
            capacity_factor: DEFAULT_SOLAR_CAPACITY_FACTOR,
            seed: None,
            repeat_days: None,
            unit_cost_per_kw: GeneratorSpec::SOLAR_BASELINE.unit_cost,
            lifetime_years: GeneratorSpec::SOLAR_BASELINE.lifetime,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TidalSection {
    pub semidiurnal_period_h: f64,
    pub fortnightly_period_h: f64,
    pub semidiurnal_phase_h: f64,
    pub fortnightly_phase_h: f64,
    pub unit_cost_per_kw: f64,
    pub lifetime_years: f64,
}

impl Default for TidalSection {
    fn default() -> Self {
        let t = TidalParams::default();
        Self {
            semidiurnal_period_h: t.semidiurnal_period_h,
            fortnightly_period_h: t.fortnightly_period_h,
            semidiurnal_phase_h: t.semidiurnal_phase_h,
            fortnightly_phase_h: t.fortnightly_phase_h,
            unit_cost_per_kw: GeneratorSpec::TIDAL_BASELINE.unit_cost,
            lifetime_years: GeneratorSpec::TIDAL_BASELINE.lifetime,
        }
    }
}

impl TidalSection {
    pub fn params(&self) -> TidalParams {
        TidalParams {
            semidiurnal_period_h: self.semidiurnal_period_h,
            fortnightly_period_h: self.fortnightly_period_h,
            semidiurnal_phase_h: self.semidiurnal_phase_h,
            fortnightly_phase_h: self.fortnightly_phase_h,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EconomicsSection {
    pub backup_rate_per_mwh: f64,
    /// Defaults to the annual demand total.
    pub delivered_energy_mwh: Option<f64>,
}

impl Default for EconomicsSection {
    fn default() -> Self {
        Self {
            backup_rate_per_mwh: 10_000.0,
            delivered_energy_mwh: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ControllerSection {
    pub warmup: Warmup,
    pub routing: Routing,
}

/// Parsed scenario file.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub demand: DemandSection,
    pub solar: SolarSection,
    pub tidal: TidalSection,
    pub lib: LibParams,
    pub vrfb: VrfbParams,
    pub economics: EconomicsSection,
    pub multipliers: CostMultipliers,
    pub controller: ControllerSection,
    pub bounds: SearchBounds,
    pub pso: PsoConfig,
    /// Directory that relative profile paths resolve against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn demand_series(&self, run_seed: u64) -> Result<HourlySeries> {
        let d = &self.demand;
        match d.source {
            Source::Synthetic => SyntheticDemand {
                annual_energy_gwh: d.annual_energy_gwh.unwrap_or(DEFAULT_ANNUAL_DEMAND_GWH),
                seed: d.seed.unwrap_or_else(|| demand_seed(run_seed)),
                repeat_days: d.repeat_days,
            }
            .generate(),
            Source::Csv => {
                let path = d.path.as_deref().ok_or_else(|| {
                    Error::Config("[demand] source = \"csv\" needs a path".into())
                })?;
                let series = load_profile_csv(self.resolve(path))?;
                match d.annual_energy_gwh {
                    Some(gwh) => scale_demand(&series, gwh),
                    None => Ok(series),
                }
            }
        }
    }

    pub fn solar_series(&self, run_seed: u64) -> Result<HourlySeries> {
        let s = &self.solar;
        match s.source {
            Source::Synthetic => SyntheticSolar {
                capacity_factor: s.capacity_factor,
                seed: s.seed.unwrap_or_else(|| solar_seed(run_seed)),
                repeat_days: s.repeat_days,
            }
            .generate(),
            Source::Csv => {
                let path = s
                    .path
                    .as_deref()
                    .ok_or_else(|| Error::Config("[solar] source = \"csv\" needs a path".into()))?;
                load_profile_csv(self.resolve(path))
            }
        }
    }

    /// Builds the scenario, generating or loading profiles.
    pub fn scenario(&self, run_seed: u64) -> Result<Scenario> {
        let demand = self.demand_series(run_seed)?;
        let solar = self.solar_series(run_seed)?;
        let mut s = Scenario::new(demand, solar, self.tidal.params())?;
        s.lib = self.lib;
        s.vrfb = self.vrfb;
        s.solar_spec = GeneratorSpec {
            unit_cost: self.solar.unit_cost_per_kw,
            lifetime: self.solar.lifetime_years,
        };
        s.tidal_spec = GeneratorSpec {
            unit_cost: self.tidal.unit_cost_per_kw,
            lifetime: self.tidal.lifetime_years,
        };
        if let Some(mwh) = self.economics.delivered_energy_mwh {
            s.delivered_energy_mwh = mwh;
        }
        s.backup_rate = self.economics.backup_rate_per_mwh;
        s.multipliers = self.multipliers;
        s.routing = self.controller.routing;
        s.warmup = self.controller.warmup;
        s.validate()?;
        self.bounds.validate()?;
        self.pso.validate()?;
        Ok(s)
    }
}

/// Profile seeds when the file leaves them unset.
pub fn demand_seed(run_seed: u64) -> u64 {
    run_seed
}

pub fn solar_seed(run_seed: u64) -> u64 {
    run_seed.wrapping_add(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_is_baseline() {
        let c = ScenarioConfig::from_toml("").unwrap();
        assert_eq!(c, ScenarioConfig::default());
        let s = c.scenario(3).unwrap();
        assert!((s.demand.sum() - 4.57e6).abs() < 1e-3);
        assert!((s.solar_unit.mean() - 0.159).abs() < 1e-3);
        assert_eq!(s.lib, LibParams::default());
        assert_eq!(s.vrfb, VrfbParams::default());
        assert_eq!(s.solar_spec, GeneratorSpec::SOLAR_BASELINE);
        assert_eq!(s.tidal_spec, GeneratorSpec::TIDAL_BASELINE);
        assert_eq!(s.backup_rate, 10_000.0);
        assert_eq!(s.routing, Routing::Hybrid);
    }

    #[test]
    fn sections_override_defaults() {
        let c = ScenarioConfig::from_toml(
            r#"
            [demand]
            annual_energy_gwh = 1.0
            repeat_days = 14
            [vrfb]
            cycle_life = 5000.0
            [tidal]
            semidiurnal_period_h = 6.2
            [controller]
            warmup = "truncated"
            routing = "lib_only"
            [pso]
            swarm_size = 50
            [bounds]
            span_h = [2.0, 100.0]
            "#,
        )
        .unwrap();
        assert_eq!(c.vrfb.cycle_life, 5000.0);
        assert_eq!(c.vrfb.module_cost_a, VrfbParams::default().module_cost_a);
        assert_eq!(c.pso.swarm_size, 50);
        assert_eq!(c.pso.max_iterations, 200);
        assert_eq!(c.bounds.span_h, [2.0, 100.0]);
        let s = c.scenario(0).unwrap();
        assert_eq!(s.tidal().semidiurnal_period_h, 6.2);
        assert_eq!(s.warmup, Warmup::Truncated);
        assert_eq!(s.routing, Routing::LibOnly);
        assert!((s.demand.sum() - 1e6).abs() < 1e-6);
        // Tiled 14-day pattern.
        assert_eq!(s.demand[0], s.demand[14 * 24]);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(ScenarioConfig::from_toml("[lib]\nenergy_cots = 1.0\n").is_err());
        assert!(ScenarioConfig::from_toml("[nonsense]\n").is_err());
    }

    #[test]
    fn seeds_follow_run_seed_unless_pinned() {
        let c = ScenarioConfig::default();
        assert_ne!(c.demand_series(1).unwrap(), c.demand_series(2).unwrap());
        let pinned = ScenarioConfig::from_toml("[demand]\nseed = 9\n").unwrap();
        assert_eq!(
            pinned.demand_series(1).unwrap(),
            pinned.demand_series(2).unwrap()
        );
    }

    #[test]
    fn csv_source_resolves_relative_to_file() {
        let dir = tempfile::tempdir().unwrap();
        let series = HourlySeries::constant(2.0).unwrap();
        crate::profiles::write_profile_csv(dir.path().join("load.csv"), &series, Some("kw"))
            .unwrap();
        std::fs::write(
            dir.path().join("s.toml"),
            "[demand]\nsource = \"csv\"\npath = \"load.csv\"\nannual_energy_gwh = 8.76\n",
        )
        .unwrap();
        let c = ScenarioConfig::from_path(dir.path().join("s.toml")).unwrap();
        let d = c.demand_series(0).unwrap();
        assert!(d.iter().all(|&v| (v - 1000.0).abs() < 1e-9));

        let missing = ScenarioConfig::from_toml("[solar]\nsource = \"csv\"\n").unwrap();
        assert!(missing.solar_series(0).is_err());
    }
}
