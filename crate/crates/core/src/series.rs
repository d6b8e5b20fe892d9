//! The hourly signal type shared by every stage of the model.

use std::ops::Index;

use crate::error::{Error, Result};

/// Number of hours in a simulated (non-leap) year.
pub const HOURS_PER_YEAR: usize = 8760;

/// A full year of hourly values: power in kW, or equivalently energy in kWh
/// per one-hour step.
///
/// Always exactly [`HOURS_PER_YEAR`] long and free of NaN/inf.
#[derive(Debug, Clone, PartialEq)]
pub struct HourlySeries(Vec<f64>);

impl HourlySeries {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() != HOURS_PER_YEAR {
            return Err(Error::Length {
                expected: HOURS_PER_YEAR,
                actual: values.len(),
            });
        }
        if let Some(hour) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { hour });
        }
        Ok(Self(values))
    }

    pub fn zeros() -> Self {
        Self(vec![0.0; HOURS_PER_YEAR])
    }

    pub fn constant(value: f64) -> Result<Self> {
        Self::new(vec![value; HOURS_PER_YEAR])
    }

    /// Builds a series from a function of the hour index.
    pub fn from_fn(f: impl FnMut(usize) -> f64) -> Result<Self> {
        Self::new((0..HOURS_PER_YEAR).map(f).collect())
    }

    /// Tiles `pattern` end to end until a full year is filled, truncating the
    /// last repetition.
    pub fn periodic_extend(pattern: &[f64]) -> Result<Self> {
        if pattern.is_empty() {
            return Err(Error::invalid("pattern", "must not be empty"));
        }
        Self::new(
            pattern
                .iter()
                .copied()
                .cycle()
                .take(HOURS_PER_YEAR)
                .collect(),
        )
    }

    /// Internal constructor for values already known to be valid.
    pub(crate) fn from_vec_unchecked(values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), HOURS_PER_YEAR);
        Self(values)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.sum() / HOURS_PER_YEAR as f64
    }

    pub fn max(&self) -> f64 {
        self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.0.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self(self.0.iter().map(|&v| f(v)).collect())
    }

    pub fn scale(&self, factor: f64) -> Self {
        self.map(|v| v * factor)
    }
}

impl Index<usize> for HourlySeries {
    type Output = f64;

    fn index(&self, hour: usize) -> &f64 {
        &self.0[hour]
    }
}

impl AsRef<[f64]> for HourlySeries {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

impl<'a> IntoIterator for &'a HourlySeries {
    type Item = &'a f64;
    type IntoIter = std::slice::Iter<'a, f64>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}
