//! Global-best particle swarm over a box.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PsoConfig {
    pub swarm_size: usize,
    pub max_iterations: usize,
    pub inertia: f64,
    pub cognitive: f64,
    pub social: f64,
    pub seed: u64,
    /// Stop when the best value improved by less than `stall_tolerance`
    /// (relative) over the last `stall_iterations` iterations.
    pub stall_iterations: usize,
    pub stall_tolerance: f64,
}

impl Default for PsoConfig {
    fn default() -> Self {
        // Constriction-factor coefficients.
        Self {
            swarm_size: 200,
            max_iterations: 200,
            inertia: 0.729,
            cognitive: 1.49445,
            social: 1.49445,
            seed: 0,
            stall_iterations: 20,
            stall_tolerance: 1e-6,
        }
    }
}

impl PsoConfig {
    pub fn validate(&self) -> Result<()> {
        if self.swarm_size < 2 {
            return Err(Error::invalid("swarm_size", "must be >= 2"));
        }
        for (name, v) in [
            ("inertia", self.inertia),
            ("cognitive", self.cognitive),
            ("social", self.social),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(name, format!("must be > 0, got {v}")));
            }
        }
        if !(self.stall_tolerance >= 0.0) {
            return Err(Error::invalid("stall_tolerance", "must be >= 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsoOutcome {
    pub best: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    /// Best value after initialization and after every iteration.
    pub history: Vec<f64>,
}

fn sanitize(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

/// Keeps a coordinate in `[lo, hi]` by mirroring it at the violated bound and
/// reversing its velocity.
fn reflect(x: &mut f64, v: &mut f64, lo: f64, hi: f64) {
    if *x > hi {
        *x = hi - (*x - hi);
        *v = -*v;
    } else if *x < lo {
        *x = lo + (lo - *x);
        *v = -*v;
    }
    *x = x.clamp(lo, hi);
}

/// Minimizes `f` over the box `[lower, upper]`.
///
/// Random draws happen sequentially in particle order and bests are updated
/// after each synchronous evaluation round, so the outcome depends only on
/// the seed, not on how many threads evaluate the swarm.
pub fn minimize<F>(f: F, lower: &[f64], upper: &[f64], config: &PsoConfig) -> Result<PsoOutcome>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    config.validate()?;
    if lower.len() != upper.len() || lower.is_empty() {
        return Err(Error::invalid(
            "bounds",
            "lower and upper must be equal-length and non-empty",
        ));
    }
    if lower.iter().zip(upper).any(|(l, u)| !(l < u)) {
        return Err(Error::invalid(
            "bounds",
            "every lower bound must be below its upper bound",
        ));
    }
    let dim = lower.len();
    let n = config.swarm_size;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let range: Vec<f64> = lower.iter().zip(upper).map(|(l, u)| u - l).collect();

    let mut pos = vec![vec![0.0; dim]; n];
    let mut vel = vec![vec![0.0; dim]; n];
    for (x, v) in pos.iter_mut().zip(&mut vel) {
        for d in 0..dim {
            x[d] = lower[d] + rng.random::<f64>() * range[d];
            let target = lower[d] + rng.random::<f64>() * range[d];
            v[d] = 0.5 * (target - x[d]);
        }
    }

    let evaluate =
        |pos: &[Vec<f64>]| -> Vec<f64> { pos.par_iter().map(|x| sanitize(f(x))).collect() };
    let mut values = evaluate(&pos);
    let mut evaluations = n;
    let mut personal = pos.clone();
    let mut personal_val = values.clone();
    let mut best_idx = 0;
    for i in 1..n {
        if values[i] < values[best_idx] {
            best_idx = i;
        }
    }
    let mut best = pos[best_idx].clone();
    let mut best_val = values[best_idx];
    let mut history = vec![best_val];

    let mut iterations = 0;
    while iterations < config.max_iterations {
        iterations += 1;
        for i in 0..n {
            for d in 0..dim {
                let r1: f64 = rng.random();
                let r2: f64 = rng.random();
                let x = pos[i][d];
                let mut v = config.inertia * vel[i][d]
                    + config.cognitive * r1 * (personal[i][d] - x)
                    + config.social * r2 * (best[d] - x);
                v = v.clamp(-range[d], range[d]);
                let mut nx = x + v;
                reflect(&mut nx, &mut v, lower[d], upper[d]);
                pos[i][d] = nx;
                vel[i][d] = v;
            }
        }
        values = evaluate(&pos);
        evaluations += n;
        for i in 0..n {
            if values[i] < personal_val[i] {
                personal_val[i] = values[i];
                personal[i].clone_from(&pos[i]);
                if values[i] < best_val {
                    best_val = values[i];
                    best.clone_from(&pos[i]);
                }
            }
        }
        history.push(best_val);

        let window = config.stall_iterations;
        if window > 0 && history.len() > window {
            let past = history[history.len() - 1 - window];
            let improvement = past - best_val;
            if past.is_finite() && improvement <= config.stall_tolerance * best_val.abs() {
                break;
            }
        }
    }

    Ok(PsoOutcome {
        best,
        value: best_val,
        iterations,
        evaluations,
        history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere(center: &[f64]) -> impl Fn(&[f64]) -> f64 + Sync + '_ {
        move |x: &[f64]| x.iter().zip(center).map(|(a, c)| (a - c).powi(2)).sum()
    }

    #[test]
    fn finds_sphere_minimum() {
        let center = [0.7, 3.2, 1.9];
        let out = minimize(
            sphere(&center),
            &[-1.0, -1.0, 0.0],
            &[6.0, 6.0, 3.94],
            &PsoConfig::default(),
        )
        .unwrap();
        assert!(out.value < 1e-6, "value = {}", out.value);
        for (b, c) in out.best.iter().zip(center) {
            assert!((b - c).abs() < 1e-3);
        }
    }

    #[test]
    fn seeded_runs_are_identical() {
        let rastrigin = |x: &[f64]| {
            x.iter()
                .map(|v| v * v - 10.0 * (2.0 * std::f64::consts::PI * v).cos() + 10.0)
                .sum::<f64>()
        };
        let cfg = PsoConfig {
            swarm_size: 30,
            max_iterations: 50,
            seed: 99,
            ..PsoConfig::default()
        };
        let a = minimize(rastrigin, &[-5.0; 3], &[5.0; 3], &cfg).unwrap();
        let b = minimize(rastrigin, &[-5.0; 3], &[5.0; 3], &cfg).unwrap();
        assert_eq!(a, b);
        let c = minimize(
            rastrigin,
            &[-5.0; 3],
            &[5.0; 3],
            &PsoConfig { seed: 100, ..cfg },
        )
        .unwrap();
        assert_ne!(a.history, c.history);
    }

    #[test]
    fn candidates_stay_in_bounds() {
        let lower = [0.0, -2.0];
        let upper = [1.0, 2.0];
        // Minimum far outside the box pushes particles into the walls.
        let f = |x: &[f64]| {
            assert!(x[0] >= 0.0 && x[0] <= 1.0 && x[1] >= -2.0 && x[1] <= 2.0);
            (x[0] - 50.0).powi(2) + (x[1] + 80.0).powi(2)
        };
        let out = minimize(
            f,
            &lower,
            &upper,
            &PsoConfig {
                swarm_size: 20,
                ..PsoConfig::default()
            },
        )
        .unwrap();
        // Reflection approaches a wall without landing on it.
        assert!(
            (out.best[0] - 1.0).abs() < 1e-4 && (out.best[1] + 2.0).abs() < 1e-4,
            "{:?}",
            out.best
        );
    }

    #[test]
    fn history_is_monotone() {
        let out = minimize(
            sphere(&[0.3]),
            &[-1.0],
            &[1.0],
            &PsoConfig {
                swarm_size: 5,
                ..PsoConfig::default()
            },
        )
        .unwrap();
        assert!(out.history.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(out.history.len(), out.iterations + 1);
    }

    #[test]
    fn rejects_bad_config() {
        let f = |_: &[f64]| 0.0;
        assert!(minimize(
            f,
            &[0.0],
            &[1.0],
            &PsoConfig {
                swarm_size: 1,
                ..PsoConfig::default()
            }
        )
        .is_err());
        assert!(minimize(
            f,
            &[0.0],
            &[1.0],
            &PsoConfig {
                social: 0.0,
                ..PsoConfig::default()
            }
        )
        .is_err());
        assert!(minimize(f, &[1.0], &[0.0], &PsoConfig::default()).is_err());
    }
}
