//! Exogenous hourly signals: demand, per-kW solar output and normalized tidal
//! flow, loaded from files or generated synthetically, and their scaling to
//! design parameters.

use std::f64::consts::PI;
use std::fs::File;
use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{HourlySeries, HOURS_PER_YEAR};

/// Shape of the two-sinusoid tidal flow model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TidalParams {
    /// Period of the lunar-day component. Two highs per 24.8 h lunar day.
    pub semidiurnal_period_h: f64,
    /// Period of the spring/neap modulation.
    pub fortnightly_period_h: f64,
    pub semidiurnal_phase_h: f64,
    pub fortnightly_phase_h: f64,
}

impl Default for TidalParams {
    fn default() -> Self {
        Self {
            semidiurnal_period_h: 12.4,
            fortnightly_period_h: 360.0,
            semidiurnal_phase_h: 0.0,
            fortnightly_phase_h: 0.0,
        }
    }
}

impl TidalParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("semidiurnal_period_h", self.semidiurnal_period_h),
            ("fortnightly_period_h", self.fortnightly_period_h),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(name, format!("period must be > 0, got {v}")));
            }
        }
        for (name, v) in [
            ("semidiurnal_phase_h", self.semidiurnal_phase_h),
            ("fortnightly_phase_h", self.fortnightly_phase_h),
        ] {
            if !v.is_finite() {
                return Err(Error::invalid(name, "phase must be finite"));
            }
        }
        Ok(())
    }
}

/// Unit cost and service life of a renewable generator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    /// $/kW of rated power.
    pub unit_cost: f64,
    /// Years.
    pub lifetime: f64,
}

impl GeneratorSpec {
    pub const SOLAR_BASELINE: Self = Self {
        unit_cost: 1060.0,
        lifetime: 30.0,
    };
    pub const TIDAL_BASELINE: Self = Self {
        unit_cost: 4300.0,
        lifetime: 20.0,
    };

    pub fn validate(&self, name: &'static str) -> Result<()> {
        if !(self.unit_cost.is_finite() && self.unit_cost >= 0.0) {
            return Err(Error::invalid(name, "unit cost must be >= 0"));
        }
        if !(self.lifetime.is_finite() && self.lifetime > 0.0) {
            return Err(Error::invalid(name, "lifetime must be > 0"));
        }
        Ok(())
    }

    /// Capital cost in $ of a generator of the given rated power.
    pub fn capital_cost(&self, rated_power: f64) -> f64 {
        rated_power * self.unit_cost
    }
}

fn half_wave(t: f64, period: f64, phase: f64) -> f64 {
    ((2.0 * PI * (t + phase) / period).sin() + 1.0) / 2.0
}

/// Normalized tidal flow at hour `t`, in [0, 1].
pub fn tidal_flow(t: f64, params: &TidalParams) -> f64 {
    let lunar = half_wave(t, params.semidiurnal_period_h, params.semidiurnal_phase_h);
    let spring_neap = half_wave(t, params.fortnightly_period_h, params.fortnightly_phase_h);
    (lunar * spring_neap).clamp(0.0, 1.0)
}

/// The flow profile for a full year; equal to a tidal generation series for a
/// 1 kW machine.
pub fn tidal_flow_series(params: &TidalParams) -> Result<HourlySeries> {
    params.validate()?;
    HourlySeries::from_fn(|t| tidal_flow(t as f64, params))
}

/// Hourly output of a tidal generator that produces `rated_power` at peak flow.
pub fn tidal_generation(rated_power: f64, params: &TidalParams) -> Result<HourlySeries> {
    check_rated_power(rated_power)?;
    Ok(tidal_flow_series(params)?.scale(rated_power))
}

fn check_rated_power(rated_power: f64) -> Result<()> {
    if !(rated_power.is_finite() && rated_power >= 0.0) {
        return Err(Error::invalid(
            "rated_power",
            format!("must be >= 0, got {rated_power}"),
        ));
    }
    Ok(())
}

/// Reads a one-value-per-line hourly profile.
///
/// A non-numeric first line is taken as a header and skipped. Errors name the
/// offending file line.
pub fn load_profile_csv(path: impl AsRef<Path>) -> Result<HourlySeries> {
    let path = path.as_ref();
    let fail = |message: String| Error::Profile {
        path: path.to_path_buf(),
        message,
    };
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(file);

    let mut values = Vec::with_capacity(HOURS_PER_YEAR);
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| fail(e.to_string()))?;
        let line = record.position().map_or(i as u64 + 1, |p| p.line());
        let field = record.get(0).unwrap_or("").trim();
        let value = match field.parse::<f64>() {
            Ok(v) => v,
            Err(_) if i == 0 => continue,
            Err(_) => {
                return Err(fail(format!(
                    "row {line}: cannot parse {field:?} as a number"
                )))
            }
        };
        if !value.is_finite() {
            return Err(fail(format!("row {line}: value {field:?} is not finite")));
        }
        if value < 0.0 {
            return Err(fail(format!("row {line}: negative value {value}")));
        }
        values.push(value);
    }

    match values.len() {
        HOURS_PER_YEAR => Ok(HourlySeries::from_vec_unchecked(values)),
        8784 => Err(fail(format!(
            "found 8784 rows (leap year); expected {HOURS_PER_YEAR}, truncate the last day"
        ))),
        n => Err(fail(format!("found {n} rows, expected {HOURS_PER_YEAR}"))),
    }
}

/// Writes a profile in the format read by [`load_profile_csv`].
pub fn write_profile_csv(
    path: impl AsRef<Path>,
    series: &HourlySeries,
    header: Option<&str>,
) -> Result<()> {
    let path = path.as_ref();
    let mut out = std::io::BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?);
    let mut write = || -> std::io::Result<()> {
        if let Some(h) = header {
            writeln!(out, "{h}")?;
        }
        for v in series {
            writeln!(out, "{v}")?;
        }
        out.flush()
    };
    write().map_err(|e| Error::io(path, e))
}

/// Rescales a demand shape so it sums to `annual_energy_gwh` over the year.
pub fn scale_demand(series: &HourlySeries, annual_energy_gwh: f64) -> Result<HourlySeries> {
    if !(annual_energy_gwh.is_finite() && annual_energy_gwh > 0.0) {
        return Err(Error::invalid("annual_energy", "must be > 0"));
    }
    let total = series.sum();
    if !(total > 0.0) {
        return Err(Error::invalid(
            "demand",
            "series must have a positive sum to be scaled",
        ));
    }
    Ok(series.scale(annual_energy_gwh * 1e6 / total))
}

/// Scales a 1 kW-DC solar profile to `rated_power` kW.
pub fn scale_solar(unit_series: &HourlySeries, rated_power: f64) -> Result<HourlySeries> {
    check_rated_power(rated_power)?;
    if let Some(hour) = unit_series.iter().position(|&v| v < 0.0) {
        return Err(Error::invalid(
            "solar",
            format!("unit profile is negative at hour {hour}"),
        ));
    }
    Ok(unit_series.scale(rated_power))
}

fn day_of_year(hour: usize) -> f64 {
    (hour / 24) as f64
}

/// Seeded stand-in for a measured 1 kW-DC hourly PV output profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticSolar {
    pub capacity_factor: f64,
    pub seed: u64,
    /// When set, the first `repeat_days` days are tiled over the year.
    pub repeat_days: Option<usize>,
}

impl SyntheticSolar {
    pub fn generate(&self) -> Result<HourlySeries> {
        let target = self.capacity_factor;
        if !(target > 0.0 && target < 0.5) {
            return Err(Error::invalid(
                "capacity_factor",
                format!("must lie in (0, 0.5), got {target}"),
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let days = HOURS_PER_YEAR / 24;
        let clearness: Vec<f64> = (0..days).map(|_| rng.random_range(0.25..1.0)).collect();

        let raw: Vec<f64> = (0..HOURS_PER_YEAR)
            .map(|t| {
                let day = day_of_year(t);
                let season = (2.0 * PI * (day - 80.0) / 365.0).sin();
                let day_length = 12.0 + 3.0 * season;
                let sunrise = 12.0 - day_length / 2.0;
                let solar_time = (t % 24) as f64 + 0.5 - sunrise;
                if solar_time <= 0.0 || solar_time >= day_length {
                    return 0.0;
                }
                let elevation = (PI * solar_time / day_length).sin();
                elevation * (0.75 + 0.25 * season) * clearness[t / 24]
            })
            .collect();
        let raw = match self.repeat_days {
            Some(n) => repeat_prefix(&raw, n)?,
            None => raw,
        };

        let k = fit_clipped_gain(&raw, target)?;
        Ok(HourlySeries::from_vec_unchecked(
            raw.iter().map(|&r| (k * r).min(1.0)).collect(),
        ))
    }
}

/// Synthetic 1 kW-DC solar profile with the given annual capacity factor.
pub fn synth_solar(target_capacity_factor: f64, seed: u64) -> Result<HourlySeries> {
    SyntheticSolar {
        capacity_factor: target_capacity_factor,
        seed,
        repeat_days: None,
    }
    .generate()
}

fn repeat_prefix(values: &[f64], days: usize) -> Result<Vec<f64>> {
    if days == 0 || days * 24 > values.len() {
        return Err(Error::invalid(
            "repeat_days",
            format!("must lie in 1..=365, got {days}"),
        ));
    }
    Ok(HourlySeries::periodic_extend(&values[..days * 24])?.into_vec())
}

/// Finds `k` such that the mean of `min(1, k * raw)` equals `target`.
fn fit_clipped_gain(raw: &[f64], target: f64) -> Result<f64> {
    let n = raw.len() as f64;
    let mean_at = |k: f64| raw.iter().map(|&r| (k * r).min(1.0)).sum::<f64>() / n;
    let ceiling = raw.iter().filter(|&&r| r > 0.0).count() as f64 / n;
    // Approaching the ceiling needs an unbounded gain; keep a margin.
    if target >= ceiling * 0.98 {
        return Err(Error::invalid(
            "capacity_factor",
            format!("{target} is unattainable; daylight fraction is {ceiling:.4}"),
        ));
    }
    let mut hi = 1.0;
    while mean_at(hi) < target {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mean_at(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Seeded stand-in for a utility load shape: daily and seasonal sinusoids
/// plus Gaussian noise, normalized to an annual energy total.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticDemand {
    pub annual_energy_gwh: f64,
    pub seed: u64,
    pub repeat_days: Option<usize>,
}

impl SyntheticDemand {
    pub fn generate(&self) -> Result<HourlySeries> {
        if !(self.annual_energy_gwh.is_finite() && self.annual_energy_gwh > 0.0) {
            return Err(Error::invalid("annual_energy", "must be > 0"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let noise = Normal::new(0.0, 0.05).expect("valid normal");
        let shape: Vec<f64> = (0..HOURS_PER_YEAR)
            .map(|t| {
                let hour = (t % 24) as f64;
                let day = day_of_year(t);
                let daily = 0.25 * (2.0 * PI * (hour - 12.0) / 24.0).sin()
                    + 0.1 * (4.0 * PI * (hour - 3.0) / 24.0).sin();
                // Winter heating and summer cooling peaks.
                let seasonal = 0.15 * (4.0 * PI * (day - 15.0) / 365.0).cos();
                (1.0 + daily + seasonal + noise.sample(&mut rng)).max(0.2)
            })
            .collect();
        let shape = match self.repeat_days {
            Some(n) => repeat_prefix(&shape, n)?,
            None => shape,
        };
        scale_demand(
            &HourlySeries::from_vec_unchecked(shape),
            self.annual_energy_gwh,
        )
    }
}

/// Synthetic strictly positive demand summing to `annual_energy_gwh`.
pub fn synth_demand(annual_energy_gwh: f64, seed: u64) -> Result<HourlySeries> {
    SyntheticDemand {
        annual_energy_gwh,
        seed,
        repeat_days: None,
    }
    .generate()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_lines(lines: &[String]) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        for l in lines {
            writeln!(f, "{l}").unwrap();
        }
        f
    }

    #[test]
    fn tidal_flow_at_origin_is_quarter() {
        assert_eq!(tidal_flow(0.0, &TidalParams::default()), 0.25);
    }

    #[test]
    fn tidal_flow_peaks_and_troughs() {
        // Equal periods so both factors peak together at a quarter period.
        let p = TidalParams {
            semidiurnal_period_h: 12.0,
            fortnightly_period_h: 12.0,
            ..TidalParams::default()
        };
        assert!((tidal_flow(3.0, &p) - 1.0).abs() < 1e-15);
        let d = TidalParams::default();
        let trough = 0.75 * d.semidiurnal_period_h;
        assert!(tidal_flow(trough, &d).abs() < 1e-15);
    }

    #[test]
    fn tidal_generation_scales_flow() {
        assert_eq!(
            tidal_generation(0.0, &TidalParams::default()).unwrap(),
            HourlySeries::zeros()
        );
        let p = TidalParams {
            semidiurnal_period_h: 12.0,
            fortnightly_period_h: 12.0,
            ..TidalParams::default()
        };
        let g = tidal_generation(1000.0, &p).unwrap();
        assert!((g[3] - 1000.0).abs() < 1e-9);
        assert!(g.max() <= 1000.0);
        assert!(tidal_generation(-1.0, &p).is_err());
    }

    #[test]
    fn csv_header_is_skipped() {
        let mut lines = vec!["load_kw".to_string()];
        lines.extend((0..HOURS_PER_YEAR).map(|i| format!("{}", i % 7)));
        let f = write_lines(&lines);
        let s = load_profile_csv(f.path()).unwrap();
        assert_eq!(s[8], 1.0);
    }

    #[test]
    fn csv_zeros() {
        let f = write_lines(&vec!["0".to_string(); HOURS_PER_YEAR]);
        assert_eq!(load_profile_csv(f.path()).unwrap(), HourlySeries::zeros());
    }

    #[test]
    fn csv_short_file_names_expected_length() {
        let f = write_lines(&vec!["1.5".to_string(); 8759]);
        let msg = load_profile_csv(f.path()).unwrap_err().to_string();
        assert!(msg.contains("8759") && msg.contains("8760"), "{msg}");
    }

    #[test]
    fn csv_leap_year_is_rejected_with_hint() {
        let f = write_lines(&vec!["1".to_string(); 8784]);
        let msg = load_profile_csv(f.path()).unwrap_err().to_string();
        assert!(msg.contains("truncate"), "{msg}");
    }

    #[test]
    fn csv_parse_error_names_row() {
        let mut lines = vec!["1".to_string(); HOURS_PER_YEAR];
        lines[6] = "abc".to_string();
        let f = write_lines(&lines);
        let msg = load_profile_csv(f.path()).unwrap_err().to_string();
        assert!(msg.contains("row 7"), "{msg}");
    }

    #[test]
    fn csv_negative_value_names_row() {
        let mut lines = vec!["1".to_string(); HOURS_PER_YEAR];
        lines[99] = "-0.5".to_string();
        let f = write_lines(&lines);
        let msg = load_profile_csv(f.path()).unwrap_err().to_string();
        assert!(msg.contains("row 100"), "{msg}");
    }

    #[test]
    fn csv_accepts_crlf() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        write!(f, "value\r\n").unwrap();
        for _ in 0..HOURS_PER_YEAR {
            write!(f, "2.5\r\n").unwrap();
        }
        assert_eq!(load_profile_csv(f.path()).unwrap().sum(), 2.5 * 8760.0);
    }

    #[test]
    fn scale_demand_hits_target() {
        let s = synth_demand(1.0, 3).unwrap();
        let scaled = scale_demand(&s, 4.57).unwrap();
        assert!((scaled.sum() - 4_570_000.0).abs() <= 4_570_000.0 * 1e-9);

        let uniform = HourlySeries::constant(1.0).unwrap();
        let u = scale_demand(&uniform, 8.76).unwrap();
        assert!(u.iter().all(|&v| (v - 1000.0).abs() < 1e-9));

        assert!(scale_demand(&HourlySeries::zeros(), 4.57).is_err());
    }

    #[test]
    fn scale_demand_already_on_target_is_unchanged() {
        let s = HourlySeries::constant(1000.0).unwrap();
        assert_eq!(scale_demand(&s, 8.76).unwrap(), s);
    }

    #[test]
    fn scale_solar_linearity() {
        let unit = synth_solar(0.159, 1).unwrap();
        assert_eq!(scale_solar(&unit, 0.0).unwrap(), HourlySeries::zeros());
        assert_eq!(scale_solar(&unit, 1.0).unwrap(), unit);
        let mut v = vec![0.0; HOURS_PER_YEAR];
        v[12] = 0.8;
        let s = scale_solar(&HourlySeries::new(v).unwrap(), 500.0).unwrap();
        assert_eq!(s[12], 400.0);
        assert!(scale_solar(&unit, -1.0).is_err());
    }

    #[test]
    fn synth_solar_capacity_factor_and_bounds() {
        let s = synth_solar(0.159, 7).unwrap();
        let cf = s.mean();
        assert!((0.158..=0.160).contains(&cf), "cf = {cf}");
        assert!(s.iter().all(|&v| (0.0..=1.0).contains(&v)));
        // Midnight is always dark.
        assert!((0..365).all(|d| s[d * 24] == 0.0));
        assert_eq!(s, synth_solar(0.159, 7).unwrap());
    }

    #[test]
    fn synth_solar_rejects_unattainable_target() {
        assert!(synth_solar(0.49, 1).is_err());
        assert!(synth_solar(0.0, 1).is_err());
        assert!(synth_solar(0.6, 1).is_err());
    }

    #[test]
    fn synth_demand_properties() {
        let s = synth_demand(4.57, 11).unwrap();
        assert!((s.sum() - 4.57e6).abs() <= 1e-3);
        assert!(s.min() > 0.0);
        assert_eq!(s, synth_demand(4.57, 11).unwrap());
        assert_ne!(s, synth_demand(4.57, 12).unwrap());
    }

    #[test]
    fn repeat_days_makes_series_periodic() {
        let d = SyntheticDemand {
            annual_energy_gwh: 4.57,
            seed: 5,
            repeat_days: Some(14),
        }
        .generate()
        .unwrap();
        assert!((0..HOURS_PER_YEAR - 336).all(|t| d[t] == d[t + 336]));
        let s = SyntheticSolar {
            capacity_factor: 0.159,
            seed: 5,
            repeat_days: Some(14),
        }
        .generate()
        .unwrap();
        assert!((0..HOURS_PER_YEAR - 336).all(|t| s[t] == s[t + 336]));
        assert!((s.mean() - 0.159).abs() < 1e-3);
    }
}
