//! Sizing and control co-design for an islanded tidal/solar microgrid with
//! hybrid lithium-ion and vanadium redox flow storage.
//!
//! A design is three numbers ([`DesignPoint`]): tidal and solar rated power
//! and the span of the moving-average filter that splits the hourly deficit
//! between the two batteries. [`run_year`] simulates one design over 8760
//! hours, sizes both batteries from their dispatch and returns the LCOE;
//! [`optimize`] searches for the cheapest design.

pub mod cli;
pub mod config;
pub mod controller;
pub mod economics;
mod error;
pub mod optimize;
pub mod output;
pub mod profiles;
pub mod sensitivity;
mod series;
pub mod simulate;
pub mod storage;

pub use error::{Error, Result};
pub use optimize::{optimize, two_stage, SearchBounds};
pub use series::{HourlySeries, HOURS_PER_YEAR};
pub use simulate::{evaluate, objective, run_year, DesignPoint, Scenario, SimulationResult};
