//! Undiscounted levelized cost of energy and its per-component breakdown.

use std::fmt;

use crate::error::{Error, Result};

/// Components that can appear in an LCOE breakdown. Batteries are split into
/// their energy-capacity and rated-power terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Component {
    Tidal,
    Solar,
    LibEnergy,
    LibPower,
    VrfbEnergy,
    VrfbPower,
    Backup,
}

impl Component {
    pub const ALL: [Component; 7] = [
        Component::Tidal,
        Component::Solar,
        Component::LibEnergy,
        Component::LibPower,
        Component::VrfbEnergy,
        Component::VrfbPower,
        Component::Backup,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Component::Tidal => "tidal",
            Component::Solar => "solar",
            Component::LibEnergy => "lib_energy",
            Component::LibPower => "lib_power",
            Component::VrfbEnergy => "vrfb_energy",
            Component::VrfbPower => "vrfb_power",
            Component::Backup => "backup",
        }
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComponentCost {
    pub component: Component,
    /// $.
    pub capital_cost: f64,
    /// Years.
    pub realized_lifetime: f64,
}

impl ComponentCost {
    pub fn new(component: Component, capital_cost: f64, realized_lifetime: f64) -> Self {
        Self {
            component,
            capital_cost,
            realized_lifetime,
        }
    }
}

/// Per-component LCOE contributions in $/MWh delivered.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LcoeBreakdown {
    pub contributions: Vec<(Component, f64)>,
    /// Sum of all contributions, backup included.
    pub total: f64,
}

impl LcoeBreakdown {
    /// Contribution of `component`, zero if absent.
    pub fn get(&self, component: Component) -> f64 {
        self.contributions
            .iter()
            .filter(|(c, _)| *c == component)
            .map(|(_, v)| v)
            .sum()
    }

    pub fn backup(&self) -> f64 {
        self.get(Component::Backup)
    }

    /// The component with the largest contribution.
    pub fn largest(&self) -> Option<(Component, f64)> {
        self.contributions
            .iter()
            .copied()
            .max_by(|a, b| a.1.total_cmp(&b.1))
    }

    /// Adds a contribution and keeps the total in step.
    pub fn push(&mut self, component: Component, value: f64) {
        self.contributions.push((component, value));
        self.total = self.contributions.iter().map(|(_, v)| v).sum();
    }
}

/// LCOE over `components`: each capital cost divided by its realized lifetime
/// and by the annual delivered energy (MWh).
pub fn lcoe(components: &[ComponentCost], delivered_energy_mwh: f64) -> Result<LcoeBreakdown> {
    if !(delivered_energy_mwh.is_finite() && delivered_energy_mwh > 0.0) {
        return Err(Error::invalid(
            "delivered_energy",
            format!("must be > 0 MWh, got {delivered_energy_mwh}"),
        ));
    }
    let mut breakdown = LcoeBreakdown::default();
    for c in components {
        if !(c.realized_lifetime > 0.0) {
            return Err(Error::invalid(
                "realized_lifetime",
                format!("{} has lifetime {}", c.component, c.realized_lifetime),
            ));
        }
        breakdown.contributions.push((
            c.component,
            c.capital_cost / c.realized_lifetime / delivered_energy_mwh,
        ));
    }
    breakdown.total = breakdown.contributions.iter().map(|(_, v)| v).sum();
    Ok(breakdown)
}

/// Backup generation cost per MWh delivered: `shortfall * rate / delivered`.
pub fn backup_penalty(shortfall_mwh: f64, rate_per_mwh: f64, delivered_energy_mwh: f64) -> f64 {
    shortfall_mwh * rate_per_mwh / delivered_energy_mwh
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn single_component() {
        let b = lcoe(&[ComponentCost::new(Component::Tidal, 1e6, 10.0)], 1000.0).unwrap();
        assert_eq!(b.total, 100.0);
    }

    #[test]
    fn empty_is_zero() {
        assert_eq!(lcoe(&[], 4570.0).unwrap().total, 0.0);
    }

    #[test]
    fn additive() {
        let one = ComponentCost::new(Component::Solar, 3.3e5, 30.0);
        let single = lcoe(&[one], 4570.0).unwrap().total;
        let double = lcoe(&[one, one], 4570.0).unwrap().total;
        assert_eq!(double, 2.0 * single);
    }

    #[test]
    fn errors() {
        assert!(lcoe(&[], 0.0).is_err());
        assert!(lcoe(&[ComponentCost::new(Component::Tidal, 1.0, 0.0)], 1.0).is_err());
    }

    #[test]
    fn backup_examples() {
        assert_eq!(backup_penalty(0.0, 10_000.0, 4570.0), 0.0);
        let p = backup_penalty(10.0, 10_000.0, 4570.0);
        assert!((p - 21.88).abs() < 0.005);
        assert_eq!(backup_penalty(10.0, 20_000.0, 4570.0), 2.0 * p);
    }

    proptest! {
        #[test]
        fn homogeneous_and_summing(costs in proptest::collection::vec((0.0f64..1e8, 0.5f64..40.0), 0..7),
                                   alpha in 0.01f64..100.0) {
            let items: Vec<_> = costs.iter().zip(Component::ALL)
                .map(|(&(c, t), k)| ComponentCost::new(k, c, t)).collect();
            let b = lcoe(&items, 4570.0).unwrap();
            let sum: f64 = b.contributions.iter().map(|(_, v)| v).sum();
            prop_assert!((b.total - sum).abs() <= 1e-12 * b.total.max(1e-300));
            prop_assert!(b.contributions.iter().all(|(_, v)| *v >= 0.0));
            let scaled: Vec<_> = items.iter()
                .map(|c| ComponentCost::new(c.component, c.capital_cost * alpha, c.realized_lifetime)).collect();
            let bs = lcoe(&scaled, 4570.0).unwrap();
            prop_assert!((bs.total - alpha * b.total).abs() <= 1e-12 * bs.total.max(1e-300));
        }
    }
}
