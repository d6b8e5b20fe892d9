//! Bound-constrained Nelder-Mead with restarts.
//!
//! Trial points are projected onto the box, and the incumbent best is never
//! replaced by a worse point, so the result is never worse than the start.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalConfig {
    /// Initial simplex edge as a fraction of each variable's range.
    pub initial_step: f64,
    pub max_evaluations: usize,
    /// Convergence: spread of simplex values, relative to the best value.
    pub ftol: f64,
    /// Convergence: largest vertex distance from the best vertex.
    pub xtol: f64,
    /// Extra runs started from the incumbent with a shrinking simplex.
    pub restarts: usize,
}

impl Default for LocalConfig {
    fn default() -> Self {
        Self {
            initial_step: 0.05,
            max_evaluations: 3000,
            ftol: 1e-12,
            xtol: 1e-9,
            restarts: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalOutcome {
    pub best: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    /// Best value after each simplex iteration.
    pub history: Vec<f64>,
}

fn sanitize(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

struct Counter<'a, F> {
    f: &'a F,
    lower: &'a [f64],
    upper: &'a [f64],
    evaluations: usize,
}

impl<F: Fn(&[f64]) -> f64> Counter<'_, F> {
    fn eval(&mut self, x: &mut [f64]) -> f64 {
        for ((v, l), u) in x.iter_mut().zip(self.lower).zip(self.upper) {
            *v = v.clamp(*l, *u);
        }
        self.evaluations += 1;
        sanitize((self.f)(x))
    }
}

/// Minimizes `f` over `[lower, upper]` starting from `start`.
pub fn minimize<F>(
    f: F,
    start: &[f64],
    lower: &[f64],
    upper: &[f64],
    config: &LocalConfig,
) -> Result<LocalOutcome>
where
    F: Fn(&[f64]) -> f64,
{
    let dim = start.len();
    if dim == 0 || lower.len() != dim || upper.len() != dim {
        return Err(Error::invalid("bounds", "dimension mismatch"));
    }
    for d in 0..dim {
        if !(lower[d] < upper[d]) {
            return Err(Error::invalid(
                "bounds",
                "every lower bound must be below its upper bound",
            ));
        }
        if !(start[d] >= lower[d] && start[d] <= upper[d]) {
            return Err(Error::invalid(
                "start",
                format!(
                    "coordinate {d} = {} outside [{}, {}]",
                    start[d], lower[d], upper[d]
                ),
            ));
        }
    }

    let mut counter = Counter {
        f: &f,
        lower,
        upper,
        evaluations: 0,
    };
    let mut best = start.to_vec();
    let mut best_val = counter.eval(&mut best);
    let mut history = vec![best_val];

    let mut step = config.initial_step;
    for run in 0..=config.restarts {
        if counter.evaluations >= config.max_evaluations {
            break;
        }
        let before = best_val;
        let (x, v) = simplex_run(&mut counter, &best, best_val, step, config, &mut history);
        if v < best_val {
            best = x;
            best_val = v;
        }
        if run > 0 && before - best_val <= config.ftol * best_val.abs().max(1e-300) {
            break;
        }
        step *= 0.3;
    }

    Ok(LocalOutcome {
        best,
        value: best_val,
        evaluations: counter.evaluations,
        history,
    })
}

fn simplex_run<F: Fn(&[f64]) -> f64>(
    c: &mut Counter<'_, F>,
    x0: &[f64],
    f0: f64,
    step: f64,
    config: &LocalConfig,
    history: &mut Vec<f64>,
) -> (Vec<f64>, f64) {
    const REFLECT: f64 = 1.0;
    const EXPAND: f64 = 2.0;
    const CONTRACT: f64 = 0.5;
    const SHRINK: f64 = 0.5;

    let dim = x0.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    simplex.push((x0.to_vec(), f0));
    for d in 0..dim {
        let mut x = x0.to_vec();
        let h = step * (c.upper[d] - c.lower[d]);
        x[d] = if x0[d] + h <= c.upper[d] {
            x0[d] + h
        } else {
            x0[d] - h
        };
        let v = c.eval(&mut x);
        simplex.push((x, v));
    }

    while c.evaluations < config.max_evaluations {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        history.push(simplex[0].1.min(*history.last().unwrap_or(&f64::INFINITY)));

        let best = simplex[0].1;
        let worst = simplex[dim].1;
        let spread = worst - best;
        let size = simplex[1..]
            .iter()
            .map(|(x, _)| {
                x.iter()
                    .zip(&simplex[0].0)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if (spread.is_finite()
            && spread <= config.ftol * best.abs().max(1e-300)
            && size <= config.xtol.sqrt())
            || size <= config.xtol
        {
            break;
        }

        let centroid: Vec<f64> = (0..dim)
            .map(|d| simplex[..dim].iter().map(|(x, _)| x[d]).sum::<f64>() / dim as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[dim].0)
                .map(|(cen, w)| cen + t * (cen - w))
                .collect()
        };

        let mut xr = along(REFLECT);
        let fr = c.eval(&mut xr);
        if fr < simplex[0].1 {
            let mut xe = along(EXPAND);
            let fe = c.eval(&mut xe);
            simplex[dim] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[dim - 1].1 {
            simplex[dim] = (xr, fr);
        } else {
            let (xc, fc) = if fr < worst {
                let mut x = along(CONTRACT * REFLECT);
                let v = c.eval(&mut x);
                (x, v)
            } else {
                let mut x = along(-CONTRACT);
                let v = c.eval(&mut x);
                (x, v)
            };
            if fc < fr.min(worst) {
                simplex[dim] = (xc, fc);
            } else {
                let anchor = simplex[0].0.clone();
                for vertex in simplex.iter_mut().skip(1) {
                    for (x, a) in vertex.0.iter_mut().zip(&anchor) {
                        *x = a + SHRINK * (*x - a);
                    }
                    vertex.1 = c.eval(&mut vertex.0);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, v) = simplex.swap_remove(0);
    (x, v)
}
