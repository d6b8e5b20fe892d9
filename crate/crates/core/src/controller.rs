//! Power-flow controller: a causal moving-average low-pass filter that sends
//! the slow part of the deficit to the flow battery and the residual to the
//! lithium-ion battery.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{HourlySeries, HOURS_PER_YEAR};

/// How hours before the start of the year enter the filter window.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Warmup {
    /// Missing history counts as zero deficit.
    #[default]
    ZeroPadded,
    /// Average only over the hours that exist, with a matching normalizer.
    Truncated,
}

/// Which batteries receive the deficit.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Routing {
    /// Low-pass component to the VRFB, residual to the LIB.
    #[default]
    Hybrid,
    LibOnly,
    VrfbOnly,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerParams {
    /// Moving-average span in hours; may be fractional.
    pub span: f64,
    pub warmup: Warmup,
}

impl ControllerParams {
    pub fn new(span: f64) -> Result<Self> {
        let p = Self {
            span,
            warmup: Warmup::ZeroPadded,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.span >= 1.0 && self.span <= HOURS_PER_YEAR as f64) {
            return Err(Error::invalid(
                "span",
                format!("must lie in [1, 8760] hours, got {}", self.span),
            ));
        }
        Ok(())
    }
}

/// Battery power commands, positive when discharging.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSplit {
    pub p_vrfb: HourlySeries,
    pub p_lib: HourlySeries,
}

/// Splits `deficit` (demand minus generation) into the flow-battery command,
/// the weighted mean of the previous `ceil(span)` hours with the oldest hour
/// weighted by the fractional part, and the lithium-ion residual.
pub fn split_deficit(deficit: &HourlySeries, params: &ControllerParams) -> Result<PowerSplit> {
    params.validate()?;
    let d = deficit.as_slice();
    let p_vrfb = moving_average(d, params.span, params.warmup);
    let p_lib = d.iter().zip(&p_vrfb).map(|(&d, &v)| d - v).collect();
    Ok(PowerSplit {
        p_vrfb: HourlySeries::from_vec_unchecked(p_vrfb),
        p_lib: HourlySeries::from_vec_unchecked(p_lib),
    })
}

/// Applies the routing policy. For the single-battery policies the span is
/// not used.
pub fn dispatch(
    deficit: &HourlySeries,
    params: &ControllerParams,
    routing: Routing,
) -> Result<PowerSplit> {
    match routing {
        Routing::Hybrid => split_deficit(deficit, params),
        Routing::LibOnly => Ok(PowerSplit {
            p_vrfb: HourlySeries::zeros(),
            p_lib: deficit.clone(),
        }),
        Routing::VrfbOnly => Ok(PowerSplit {
            p_vrfb: deficit.clone(),
            p_lib: HourlySeries::zeros(),
        }),
    }
}

fn moving_average(d: &[f64], span: f64, warmup: Warmup) -> Vec<f64> {
    let n = span.ceil() as usize;
    let oldest_weight = span - (n - 1) as f64;

    let mut prefix = Vec::with_capacity(d.len() + 1);
    prefix.push(0.0);
    let mut acc = 0.0;
    for &v in d {
        acc += v;
        prefix.push(acc);
    }

    let mut out = Vec::with_capacity(d.len());
    // Length of the run of identical values ending at t - 1; a window lying
    // inside such a run averages to that value exactly.
    let mut run = 0usize;
    for t in 0..d.len() {
        if t > 0 {
            run = if t >= 2 && d[t - 1] == d[t - 2] {
                run + 1
            } else {
                1
            };
        }
        let full_start = (t + 1).saturating_sub(n);
        let recent = prefix[t] - prefix[full_start];
        let has_oldest = t >= n;
        let oldest = if has_oldest {
            oldest_weight * d[t - n]
        } else {
            0.0
        };

        let value = match warmup {
            Warmup::ZeroPadded if has_oldest && run >= n => d[t - 1],
            Warmup::ZeroPadded => (recent + oldest) / span,
            Warmup::Truncated if t == 0 => 0.0,
            Warmup::Truncated if run >= n.min(t) => d[t - 1],
            Warmup::Truncated => {
                let weight = (t - full_start) as f64 + if has_oldest { oldest_weight } else { 0.0 };
                (recent + oldest) / weight
            }
        };
        out.push(value);
    }
    out
}
