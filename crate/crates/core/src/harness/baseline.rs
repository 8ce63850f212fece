//! Grid-tuned SGD, the comparator for tuning-free ratios.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stats::median;
use crate::error::{Error, Result};
use crate::linalg;
use crate::optimizers::{run_sgd, CandidateKind, Trajectory};
use crate::oracles::Oracle;
use crate::problems::Problem;
use crate::rng::RngStream;

pub const GRID_POINTS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorMetric {
    FGap,
    GradNormSq,
}

impl ErrorMetric {
    /// `f(x) - f*` (NaN when `f*` is unknown) or `||grad f(x)||^2`.
    pub fn eval(&self, problem: &Problem, x: &[f64]) -> f64 {
        match self {
            ErrorMetric::FGap => problem.gap(x).unwrap_or(f64::NAN),
            ErrorMetric::GradNormSq => linalg::norm_sq(&problem.grad(x)),
        }
    }

    /// Smallest metric over a set of candidate points.
    pub fn best_of<'a>(&self, problem: &Problem, points: impl IntoIterator<Item = &'a [f64]>) -> f64 {
        points.into_iter().map(|x| self.eval(problem, x)).fold(f64::INFINITY, |a, b| if b < a { b } else { a })
    }

    pub fn of_trajectory(&self, problem: &Problem, traj: &Trajectory) -> f64 {
        self.best_of(problem, CandidateKind::ALL.iter().map(|k| traj.candidates.get(*k)))
    }
}

/// Sixteen stepsizes, geometric from `2^-10/L_hi` to `2^5/L_lo`. The ratio
/// is exactly 2 when the smoothness hint is tight.
pub fn sgd_grid(l_lo: f64, l_hi: f64) -> Result<Vec<f64>> {
    if !(l_lo > 0.0 && l_lo <= l_hi && l_hi.is_finite()) {
        return Err(Error::param("need 0 < L_lo <= L_hi"));
    }
    let lo = 2f64.powi(-10) / l_hi;
    let hi = 2f64.powi(5) / l_lo;
    let ratio = (hi / lo).powf(1.0 / (GRID_POINTS - 1) as f64);
    Ok((0..GRID_POINTS).map(|i| if i + 1 == GRID_POINTS { hi } else { lo * ratio.powi(i as i32) }).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BaselineResult {
    pub eta_star: f64,
    pub err_star: f64,
    /// Median metric per grid stepsize, in grid order.
    pub per_eta: Vec<(f64, f64)>,
}

/// Runs SGD `trials` times per stepsize (trial `i` uses substream `i` for
/// every stepsize), scores each run by the best candidate's metric and
/// returns the stepsize with the smallest median score (smaller on ties).
pub fn tune_sgd_baseline<F>(
    factory: F,
    x0: &[f64],
    horizon: usize,
    grid: &[f64],
    trials: usize,
    metric: ErrorMetric,
    rng: &RngStream,
) -> Result<BaselineResult>
where
    F: Fn() -> Result<Oracle> + Sync,
{
    if grid.is_empty() {
        return Err(Error::arg("stepsize grid is empty"));
    }
    if trials == 0 {
        return Err(Error::param("trials must be at least 1"));
    }
    let cells: Vec<(usize, u64)> = (0..grid.len()).flat_map(|i| (0..trials as u64).map(move |s| (i, s))).collect();
    let scores: Vec<f64> = cells
        .par_iter()
        .map(|&(i, s)| -> Result<f64> {
            let mut oracle = factory()?;
            let mut r = rng.derive(s);
            let traj = run_sgd(&mut oracle, x0, grid[i], horizon, &mut r)?;
            let m = metric.of_trajectory(oracle.problem(), &traj);
            Ok(if m.is_nan() { f64::INFINITY } else { m })
        })
        .collect::<Result<_>>()?;
    let per_eta: Vec<(f64, f64)> = grid
        .iter()
        .enumerate()
        .map(|(i, &eta)| (eta, median(&scores[i * trials..(i + 1) * trials]).expect("trials > 0")))
        .collect();
    let mut best = 0;
    for (i, &(eta, err)) in per_eta.iter().enumerate() {
        let (b_eta, b_err) = per_eta[best];
        if err < b_err || (err == b_err && eta < b_eta) {
            best = i;
        }
    }
    Ok(BaselineResult { eta_star: per_eta[best].0, err_star: per_eta[best].1, per_eta })
}
