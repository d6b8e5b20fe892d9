//! C ABI over `microgrid-core`.
//!
//! Scenarios and simulation results are opaque handles created and freed
//! through this API. Every fallible function returns an [`MgStatus`]; on
//! failure, [`mg_last_error_message`] describes the most recent error on the
//! calling thread. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use microgrid_core::config::ScenarioConfig;
use microgrid_core::optimize::{best_of_seeds, PsoConfig};
use microgrid_core::{
    objective, run_year, DesignPoint, Error, Scenario, SearchBounds, SimulationResult,
};

/// Length of every hourly trace.
pub const MG_HOURS_PER_YEAR: usize = 8760;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Config = 4,
    /// Buffer too small.
    BufferTooSmall = 5,
    Runtime = 6,
    Panic = 7,
}

/// Hourly trace selector for [`mg_result_trace`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MgTrace {
    DemandKw = 0,
    TidalKw = 1,
    SolarKw = 2,
    DeficitKw = 3,
    PLibKw = 4,
    PVrfbKw = 5,
    SocLibKwh = 6,
    SocVrfbKwh = 7,
    CurtailmentKw = 8,
    BackupKw = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MgDesign {
    pub p_tidal_kw: f64,
    pub p_solar_kw: f64,
    pub span_h: f64,
}

impl From<MgDesign> for DesignPoint {
    fn from(d: MgDesign) -> Self {
        DesignPoint::new(d.p_tidal_kw, d.p_solar_kw, d.span_h)
    }
}

impl From<DesignPoint> for MgDesign {
    fn from(d: DesignPoint) -> Self {
        MgDesign {
            p_tidal_kw: d.p_tidal,
            p_solar_kw: d.p_solar,
            span_h: d.span,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MgSummary {
    /// $/MWh.
    pub total_lcoe: f64,
    pub lib_rated_power_kw: f64,
    pub lib_capacity_kwh: f64,
    pub lib_realized_lifetime_y: f64,
    pub vrfb_rated_power_kw: f64,
    pub vrfb_capacity_kwh: f64,
    pub vrfb_realized_lifetime_y: f64,
    pub backup_energy_kwh: f64,
}

/// Opaque scenario with its search bounds and swarm settings.
pub struct MgScenario {
    scenario: Scenario,
    bounds: SearchBounds,
    pso: PsoConfig,
}

/// Opaque result of [`mg_run_year`].
pub struct MgResult(SimulationResult);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &Error) -> MgStatus {
    match e {
        Error::Io { .. } | Error::Profile { .. } | Error::Csv(_) => MgStatus::Io,
        Error::Config(_) => MgStatus::Config,
        Error::Length { .. } | Error::NonFinite { .. } | Error::InvalidParameter { .. } => {
            MgStatus::InvalidArgument
        }
        _ => MgStatus::Runtime,
    }
}

/// Runs `f`, converting errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), MgStatus>) -> MgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MgStatus::Ok,
        Ok(Err(status)) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            MgStatus::Panic
        }
    }
}

fn fail(e: Error) -> MgStatus {
    let status = status_of(&e);
    set_error(e.to_string());
    status
}

fn null(what: &str) -> MgStatus {
    set_error(format!("{what} is null"));
    MgStatus::NullPointer
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, MgStatus> {
    // SAFETY: the caller passes either null or a valid pointer from this API.
    unsafe { p.as_ref() }.ok_or_else(|| null(what))
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, MgStatus> {
    // SAFETY: as above, for a caller-owned output slot.
    unsafe { p.as_mut() }.ok_or_else(|| null(what))
}

fn from_config(cfg: ScenarioConfig, seed: u64) -> Result<MgScenario, MgStatus> {
    let scenario = cfg.scenario(seed).map_err(fail)?;
    Ok(MgScenario {
        scenario,
        bounds: cfg.bounds,
        pso: cfg.pso,
    })
}

/// Baseline scenario with synthetic profiles seeded from `seed`.
///
/// # Safety
/// `out` must be null or valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn mg_scenario_baseline(seed: u64, out: *mut *mut MgScenario) -> MgStatus {
    guard(|| {
        let out = unsafe { out_ref(out, "out") }?;
        let s = from_config(ScenarioConfig::default(), seed)?;
        *out = Box::into_raw(Box::new(s));
        Ok(())
    })
}

/// Scenario from a TOML file (UTF-8 path).
///
/// # Safety
/// `path` must be null or a NUL-terminated string; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn mg_scenario_from_toml(
    path: *const c_char,
    seed: u64,
    out: *mut *mut MgScenario,
) -> MgStatus {
    guard(|| {
        let out = unsafe { out_ref(out, "out") }?;
        if path.is_null() {
            return Err(null("path"));
        }
        // SAFETY: non-null and NUL-terminated per the contract.
        let path = unsafe { CStr::from_ptr(path) }.to_str().map_err(|_| {
            set_error("path is not valid UTF-8");
            MgStatus::InvalidArgument
        })?;
        let cfg = ScenarioConfig::from_path(path).map_err(fail)?;
        let s = from_config(cfg, seed)?;
        *out = Box::into_raw(Box::new(s));
        Ok(())
    })
}

/// # Safety
/// `scenario` must be null or a handle from this API not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mg_scenario_free(scenario: *mut MgScenario) {
    if !scenario.is_null() {
        // SAFETY: created by Box::into_raw in this crate.
        drop(unsafe { Box::from_raw(scenario) });
    }
}

/// LCOE of `design` in $/MWh.
///
/// # Safety
/// `scenario` must be a live handle or null; `out_lcoe` null or writable.
#[no_mangle]
pub unsafe extern "C" fn mg_objective(
    scenario: *const MgScenario,
    design: MgDesign,
    out_lcoe: *mut f64,
) -> MgStatus {
    guard(|| {
        let s = unsafe { deref(scenario, "scenario") }?;
        let out = unsafe { out_ref(out_lcoe, "out_lcoe") }?;
        *out = objective(&design.into(), &s.scenario).map_err(fail)?;
        Ok(())
    })
}

/// Simulates a year; free the result with [`mg_result_free`].
///
/// # Safety
/// `scenario` must be a live handle or null; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn mg_run_year(
    scenario: *const MgScenario,
    design: MgDesign,
    out: *mut *mut MgResult,
) -> MgStatus {
    guard(|| {
        let s = unsafe { deref(scenario, "scenario") }?;
        let out = unsafe { out_ref(out, "out") }?;
        let r = run_year(&design.into(), &s.scenario).map_err(fail)?;
        *out = Box::into_raw(Box::new(MgResult(r)));
        Ok(())
    })
}

/// # Safety
/// `result` must be a live handle or null; `out` null or writable.
#[no_mangle]
pub unsafe extern "C" fn mg_result_summary(
    result: *const MgResult,
    out: *mut MgSummary,
) -> MgStatus {
    guard(|| {
        let r = &unsafe { deref(result, "result") }?.0;
        let out = unsafe { out_ref(out, "out") }?;
        *out = MgSummary {
            total_lcoe: r.total_lcoe,
            lib_rated_power_kw: r.lib_sizing.rated_power,
            lib_capacity_kwh: r.lib_sizing.capacity,
            lib_realized_lifetime_y: r.lib_sizing.realized_lifetime,
            vrfb_rated_power_kw: r.vrfb_sizing.rated_power,
            vrfb_capacity_kwh: r.vrfb_sizing.capacity,
            vrfb_realized_lifetime_y: r.vrfb_sizing.realized_lifetime,
            backup_energy_kwh: r.backup_energy_kwh,
        };
        Ok(())
    })
}

/// Copies one hourly trace into `buf`, which must hold at least
/// [`MG_HOURS_PER_YEAR`] values.
///
/// # Safety
/// `result` must be a live handle or null; `buf` null or valid for `len`
/// writes.
#[no_mangle]
pub unsafe extern "C" fn mg_result_trace(
    result: *const MgResult,
    trace: MgTrace,
    buf: *mut f64,
    len: usize,
) -> MgStatus {
    guard(|| {
        let r = &unsafe { deref(result, "result") }?.0;
        if buf.is_null() {
            return Err(null("buf"));
        }
        if len < MG_HOURS_PER_YEAR {
            set_error(format!(
                "buffer holds {len} values, need {MG_HOURS_PER_YEAR}"
            ));
            return Err(MgStatus::BufferTooSmall);
        }
        let column = r.traces.columns()[trace as usize];
        // SAFETY: buf is valid for len >= MG_HOURS_PER_YEAR writes.
        let dst = unsafe { std::slice::from_raw_parts_mut(buf, MG_HOURS_PER_YEAR) };
        dst.copy_from_slice(column.as_slice());
        Ok(())
    })
}

/// # Safety
/// `result` must be null or a handle from this API not yet freed.
#[no_mangle]
pub unsafe extern "C" fn mg_result_free(result: *mut MgResult) {
    if !result.is_null() {
        // SAFETY: created by Box::into_raw in this crate.
        drop(unsafe { Box::from_raw(result) });
    }
}

/// Particle swarm plus local refinement. `swarm_size` 0 keeps the scenario's
/// setting; `restarts` runs use seeds `seed, seed + 1, ...` and the best is
/// kept.
///
/// # Safety
/// `scenario` must be a live handle or null; outputs null or writable.
#[no_mangle]
pub unsafe extern "C" fn mg_optimize(
    scenario: *const MgScenario,
    seed: u64,
    swarm_size: usize,
    restarts: usize,
    out_design: *mut MgDesign,
    out_lcoe: *mut f64,
) -> MgStatus {
    guard(|| {
        let s = unsafe { deref(scenario, "scenario") }?;
        let out_design = unsafe { out_ref(out_design, "out_design") }?;
        let out_lcoe = unsafe { out_ref(out_lcoe, "out_lcoe") }?;
        if restarts == 0 {
            set_error("restarts must be >= 1");
            return Err(MgStatus::InvalidArgument);
        }
        let config = PsoConfig {
            swarm_size: if swarm_size == 0 {
                s.pso.swarm_size
            } else {
                swarm_size
            },
            ..s.pso
        };
        let seeds = microgrid_core::cli::optimizer_seeds(seed, restarts);
        let best = best_of_seeds(&s.bounds, &s.scenario, &config, &seeds).map_err(fail)?;
        *out_design = best.design.into();
        *out_lcoe = best.lcoe;
        Ok(())
    })
}

/// Copies the calling thread's last error message into `buf` (truncated,
/// always NUL-terminated when `len > 0`). Returns the full message length
/// including the terminator, or 0 if there is no error.
///
/// # Safety
/// `buf` must be null or valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn mg_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let Some(msg) = e.as_ref() else { return 0 };
        let bytes = msg.as_bytes_with_nul();
        if !buf.is_null() && len > 0 {
            let n = (bytes.len() - 1).min(len - 1);
            // SAFETY: buf is valid for len >= n + 1 writes.
            unsafe {
                std::ptr::copy_nonoverlapping(bytes.as_ptr().cast::<c_char>(), buf, n);
                *buf.add(n) = 0;
            }
        }
        bytes.len()
    })
}
