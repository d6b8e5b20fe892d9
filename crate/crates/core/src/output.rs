//! CSV artifacts. Numbers are written with Rust's shortest round-trip
//! formatting, so files parse back to the exact values and repeated runs are
//! byte-identical.

use std::path::Path;

use crate::economics::{Component, LcoeBreakdown};
use crate::error::{Error, Result};
use crate::optimize::{GridResult, Progress};
use crate::sensitivity::SweepRow;
use crate::simulate::SimulationResult;
use crate::storage::BatterySizing;

fn writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    csv::Writer::from_path(path).map_err(|e| with_path(path, e))
}

fn with_path(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Config(format!("{}: {other:?}", path.display())),
    }
}

fn finish(path: &Path, mut w: csv::Writer<std::fs::File>) -> Result<()> {
    w.flush().map_err(|e| Error::io(path, e))
}

fn num(v: f64) -> String {
    format!("{v}")
}

/// One row per hour: `hour` then every trace column.
pub fn write_traces(path: impl AsRef<Path>, result: &SimulationResult) -> Result<()> {
    let path = path.as_ref();
    let mut w = writer(path)?;
    let mut header = vec!["hour"];
    header.extend(crate::simulate::Traces::HEADERS);
    w.write_record(&header).map_err(|e| with_path(path, e))?;
    let cols = result.traces.columns();
    let mut row = Vec::with_capacity(cols.len() + 1);
    for t in 0..crate::series::HOURS_PER_YEAR {
        row.clear();
        row.push(t.to_string());
        row.extend(cols.iter().map(|c| num(c[t])));
        w.write_record(&row).map_err(|e| with_path(path, e))?;
    }
    finish(path, w)
}

fn sizing_rows(prefix: &str, s: &BatterySizing) -> Vec<(String, f64, &'static str)> {
    vec![
        (format!("{prefix}_rated_power"), s.rated_power, "kW"),
        (format!("{prefix}_capacity"), s.capacity, "kWh"),
        (format!("{prefix}_ep_ratio"), s.ep_ratio, "h"),
        (
            format!("{prefix}_cycles_per_year"),
            s.cycles_per_year,
            "1/y",
        ),
        (
            format!("{prefix}_realized_lifetime"),
            s.realized_lifetime,
            "y",
        ),
        (
            format!("{prefix}_capital_cost_energy"),
            s.capital_cost.energy,
            "USD",
        ),
        (
            format!("{prefix}_capital_cost_power"),
            s.capital_cost.power,
            "USD",
        ),
        (format!("{prefix}_net_stored"), s.net_stored, "kWh"),
    ]
}

/// `quantity,value,unit` rows: design, sizings, costs and the LCOE breakdown.
pub fn write_summary(path: impl AsRef<Path>, result: &SimulationResult) -> Result<()> {
    let path = path.as_ref();
    let d = &result.design;
    let mut rows: Vec<(String, f64, &'static str)> = vec![
        ("p_tidal".into(), d.p_tidal, "kW"),
        ("p_solar".into(), d.p_solar, "kW"),
        ("span".into(), d.span, "h"),
    ];
    rows.extend(sizing_rows("lib", &result.lib_sizing));
    rows.extend(sizing_rows("vrfb", &result.vrfb_sizing));
    rows.push(("initial_soc_lib".into(), result.initial_soc_lib, "kWh"));
    rows.push(("initial_soc_vrfb".into(), result.initial_soc_vrfb, "kWh"));
    rows.push(("backup_energy".into(), result.backup_energy_kwh, "kWh"));
    rows.push((
        "curtailed_surplus".into(),
        result.curtailed_surplus_kwh,
        "kWh",
    ));
    for c in Component::ALL {
        rows.push((
            format!("lcoe_{}", c.label()),
            result.breakdown.get(c),
            "USD/MWh",
        ));
    }
    rows.push(("lcoe_total".into(), result.total_lcoe, "USD/MWh"));

    let mut w = writer(path)?;
    w.write_record(["quantity", "value", "unit"])
        .map_err(|e| with_path(path, e))?;
    for (q, v, u) in rows {
        w.write_record([q.as_str(), &num(v), u])
            .map_err(|e| with_path(path, e))?;
    }
    finish(path, w)
}

/// `component,usd_per_mwh` for the nonzero components, then `total`.
pub fn write_breakdown(path: impl AsRef<Path>, breakdown: &LcoeBreakdown) -> Result<()> {
    let path = path.as_ref();
    let mut w = writer(path)?;
    w.write_record(["component", "usd_per_mwh"])
        .map_err(|e| with_path(path, e))?;
    for (c, v) in &breakdown.contributions {
        w.write_record([c.label(), &num(*v)])
            .map_err(|e| with_path(path, e))?;
    }
    w.write_record(["total", &num(breakdown.total)])
        .map_err(|e| with_path(path, e))?;
    finish(path, w)
}

/// Long format: one row per grid cell.
pub fn write_grid(path: impl AsRef<Path>, grid: &GridResult) -> Result<()> {
    let path = path.as_ref();
    let mut w = writer(path)?;
    w.write_record([
        grid.spec.x.column(),
        grid.spec.y.column(),
        "lcoe_usd_per_mwh",
        "above_ceiling",
    ])
    .map_err(|e| with_path(path, e))?;
    for (x, y, v) in grid.cells() {
        let flag = if GridResult::above_ceiling(v) {
            "1"
        } else {
            "0"
        };
        w.write_record([num(x), num(y), num(v), flag.into()])
            .map_err(|e| with_path(path, e))?;
    }
    finish(path, w)
}

pub fn write_progress(path: impl AsRef<Path>, progress: &[Progress]) -> Result<()> {
    let path = path.as_ref();
    let mut w = writer(path)?;
    w.write_record(["iteration", "best_lcoe"])
        .map_err(|e| with_path(path, e))?;
    for p in progress {
        w.write_record([p.iteration.to_string(), num(p.best_lcoe)])
            .map_err(|e| with_path(path, e))?;
    }
    finish(path, w)
}

pub const SWEEP_SIZING_COLUMNS: [&str; 13] = [
    "multiplier",
    "p_tidal_kw",
    "p_solar_kw",
    "span_h",
    "lib_power_kw",
    "lib_capacity_kwh",
    "lib_lifetime_y",
    "vrfb_power_kw",
    "vrfb_capacity_kwh",
    "vrfb_ep_h",
    "vrfb_lifetime_y",
    "vrfb_module_usd_per_kwh",
    "backup_energy_kwh",
];

/// One row per multiplier: design, sizings, every component's $/MWh and the
/// total.
pub fn write_sweep(path: impl AsRef<Path>, rows: &[SweepRow]) -> Result<()> {
    let path = path.as_ref();
    let mut w = writer(path)?;
    let mut header: Vec<String> = SWEEP_SIZING_COLUMNS.iter().map(|s| s.to_string()).collect();
    header.extend(
        Component::ALL
            .iter()
            .map(|c| format!("{}_usd_per_mwh", c.label())),
    );
    header.push("total_usd_per_mwh".into());
    w.write_record(&header).map_err(|e| with_path(path, e))?;
    for r in rows {
        let mut rec = vec![
            r.multiplier,
            r.design.p_tidal,
            r.design.p_solar,
            r.design.span,
            r.lib.rated_power,
            r.lib.capacity,
            r.lib.realized_lifetime,
            r.vrfb.rated_power,
            r.vrfb.capacity,
            r.vrfb.ep_ratio,
            r.vrfb.realized_lifetime,
            r.vrfb_module_cost,
            r.backup_energy_kwh,
        ];
        rec.extend(Component::ALL.iter().map(|&c| r.breakdown.get(c)));
        rec.push(r.breakdown.total);
        w.write_record(rec.into_iter().map(num))
            .map_err(|e| with_path(path, e))?;
    }
    finish(path, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::economics::{lcoe, ComponentCost};

    #[test]
    fn breakdown_csv_round_trips_numbers() {
        let b = lcoe(
            &[
                ComponentCost::new(Component::Tidal, 1.0e6 / 3.0, 20.0),
                ComponentCost::new(Component::VrfbEnergy, 2.5e6, 7.3),
            ],
            4570.0,
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("b.csv");
        write_breakdown(&p, &b).unwrap();
        let mut r = csv::Reader::from_path(&p).unwrap();
        let rows: Vec<(String, f64)> = r.deserialize().map(|x| x.unwrap()).collect();
        assert_eq!(rows.len(), 3);
        assert_eq!(rows[0], ("tidal".to_string(), b.get(Component::Tidal)));
        assert_eq!(rows[2], ("total".to_string(), b.total));
    }

    #[test]
    fn progress_csv() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("p.csv");
        write_progress(
            &p,
            &[
                Progress {
                    iteration: 0,
                    best_lcoe: 12.5,
                },
                Progress {
                    iteration: 1,
                    best_lcoe: 0.1 + 0.2,
                },
            ],
        )
        .unwrap();
        assert_eq!(
            std::fs::read_to_string(&p).unwrap(),
            "iteration,best_lcoe\n0,12.5\n1,0.30000000000000004\n"
        );
    }

    #[test]
    fn unwritable_path_names_the_file() {
        let err = write_progress("/nonexistent-dir/x/p.csv", &[]).unwrap_err();
        assert!(
            err.to_string().contains("/nonexistent-dir/x/p.csv"),
            "{err}"
        );
    }
}
