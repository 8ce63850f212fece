//! Stepsize engines and trajectory bookkeeping.
//!
//! All `run_*` functions are pure given an oracle instance and a random
//! stream. Diagnostics stored in a [`Trajectory`] (true gaps, true gradient
//! norms, best-prefix selection) are computed from the oracle's problem
//! out-of-band and never feed back into the iteration.

mod adaptive;
mod polyak;
mod sgd;

pub use adaptive::{adaptive_stepsize, run_adaptive, run_bounded_adaptive, AdaptiveState, AdaptiveVariant};
pub use polyak::{polyak_lower_estimate, run_polyak, run_polyak_adaptive, PolyakResult};
pub use sgd::{run_sgd, ITERATE_CLAMP};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::problems::Problem;

/// Full iterates are kept for horizons up to this length; longer runs keep
/// iterates only on the power-of-two grid.
pub const FULL_TRACE_LIMIT: usize = 10_000;

#[derive(Clone, Debug, PartialEq)]
pub struct StepRecord {
    pub t: usize,
    /// Iterate `x_t` at which the step's gradient was drawn (thinned for long runs).
    pub x: Option<Vec<f64>>,
    pub f_gap: Option<f64>,
    pub grad_true_norm_sq: f64,
    pub stepsize: f64,
    pub r_bar: f64,
    /// Cumulative oracle calls after this step.
    pub oracle_calls: u64,
    /// Running maximum of the sample variance (variance-estimating methods only).
    pub sigma_bar_sq: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidateKind {
    LastIterate,
    WeightedAverage,
    BestPrefixAverage,
}

impl CandidateKind {
    pub const ALL: [CandidateKind; 3] =
        [CandidateKind::LastIterate, CandidateKind::WeightedAverage, CandidateKind::BestPrefixAverage];

    pub fn as_str(&self) -> &'static str {
        match self {
            CandidateKind::LastIterate => "last",
            CandidateKind::WeightedAverage => "average",
            CandidateKind::BestPrefixAverage => "best_prefix",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Candidates {
    pub last_iterate: Vec<f64>,
    /// Average over the full horizon (deployment choice).
    pub weighted_average: Vec<f64>,
    /// Prefix average with the smallest true objective (diagnostic choice).
    pub best_prefix_average: Vec<f64>,
    /// `(prefix length, average)` on the power-of-two grid.
    pub prefix_averages: Vec<(usize, Vec<f64>)>,
}

impl Candidates {
    pub fn get(&self, kind: CandidateKind) -> &[f64] {
        match kind {
            CandidateKind::LastIterate => &self.last_iterate,
            CandidateKind::WeightedAverage => &self.weighted_average,
            CandidateKind::BestPrefixAverage => &self.best_prefix_average,
        }
    }

    fn constant(x: &[f64]) -> Self {
        Self {
            last_iterate: x.to_vec(),
            weighted_average: x.to_vec(),
            best_prefix_average: x.to_vec(),
            prefix_averages: vec![(0, x.to_vec())],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub x0: Vec<f64>,
    pub steps: Vec<StepRecord>,
    pub candidates: Candidates,
    pub oracle_calls: u64,
    /// Stopped before the horizon at an exact stationary point.
    pub terminated_early: bool,
}

impl Trajectory {
    /// Trajectory of a run that made no steps and returns `x0`.
    pub fn stationary(x0: &[f64], oracle_calls: u64) -> Self {
        Self {
            x0: x0.to_vec(),
            steps: Vec::new(),
            candidates: Candidates::constant(x0),
            oracle_calls,
            terminated_early: true,
        }
    }

    /// All recorded iterates followed by the final one.
    pub fn iterates(&self) -> Vec<&[f64]> {
        let mut out: Vec<&[f64]> = self.steps.iter().filter_map(|s| s.x.as_deref()).collect();
        out.push(&self.candidates.last_iterate);
        out
    }

    pub fn last(&self) -> &[f64] {
        &self.candidates.last_iterate
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weighting {
    Uniform,
    Rbar,
    RbarSq,
}

impl Weighting {
    pub fn weight(&self, r_bar: f64) -> f64 {
        match self {
            Weighting::Uniform => 1.0,
            Weighting::Rbar => r_bar,
            Weighting::RbarSq => r_bar * r_bar,
        }
    }
}

/// Prefix lengths `1, 2, 4, ...` up to `n`, always ending with `n`.
pub fn prefix_grid(n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut k = 1usize;
    while k < n {
        out.push(k);
        k *= 2;
    }
    if n > 0 {
        out.push(n);
    }
    out
}

fn on_trace_grid(t: usize, total: usize) -> bool {
    total <= FULL_TRACE_LIMIT || t.is_power_of_two() || t == 0 || t + 1 == total
}

/// Weighted averages `sum_{i<t} w_i x_i / sum_{i<t} w_i` for every prefix
/// length `t` on [`prefix_grid`].
pub fn weighted_prefix_average(traj: &Trajectory, weights: Weighting) -> Result<Vec<(usize, Vec<f64>)>> {
    if traj.steps.is_empty() {
        return Err(Error::arg("trajectory has no steps"));
    }
    let mut points = Vec::with_capacity(traj.steps.len());
    let mut w = Vec::with_capacity(traj.steps.len());
    for s in &traj.steps {
        let x = s.x.as_ref().ok_or_else(|| Error::arg("trajectory iterates were thinned"))?;
        points.push(x.as_slice());
        w.push(weights.weight(s.r_bar));
    }
    weighted_prefix_average_of(&points, &w)
}

/// Grid prefix averages of explicit points and weights.
pub fn weighted_prefix_average_of(points: &[&[f64]], weights: &[f64]) -> Result<Vec<(usize, Vec<f64>)>> {
    if points.is_empty() || points.len() != weights.len() {
        return Err(Error::arg("need one weight per point and at least one point"));
    }
    let mut acc = PrefixAverager::new(points[0].len(), points.len());
    for (p, &w) in points.iter().zip(weights) {
        acc.push(p, w);
    }
    Ok(acc.snapshots)
}

/// Online version of [`weighted_prefix_average_of`].
#[derive(Clone, Debug)]
pub(crate) struct PrefixAverager {
    sum: Vec<f64>,
    weight: f64,
    count: usize,
    grid: Vec<usize>,
    next: usize,
    snapshots: Vec<(usize, Vec<f64>)>,
}

impl PrefixAverager {
    pub(crate) fn new(dim: usize, horizon: usize) -> Self {
        Self {
            sum: vec![0.0; dim],
            weight: 0.0,
            count: 0,
            grid: prefix_grid(horizon),
            next: 0,
            snapshots: Vec::new(),
        }
    }

    pub(crate) fn push(&mut self, x: &[f64], w: f64) {
        linalg::axpy(w, x, &mut self.sum);
        self.weight += w;
        self.count += 1;
        if self.next < self.grid.len() && self.grid[self.next] == self.count {
            self.next += 1;
            let avg = self.current();
            self.snapshots.push((self.count, avg));
        }
    }

    fn current(&self) -> Vec<f64> {
        self.sum.iter().map(|s| s / self.weight).collect()
    }

    /// Snapshots, plus the running average if the horizon was cut short.
    fn into_snapshots(mut self) -> Vec<(usize, Vec<f64>)> {
        if self.count > 0 && self.snapshots.last().map(|s| s.0) != Some(self.count) {
            let avg = self.current();
            self.snapshots.push((self.count, avg));
        }
        self.snapshots
    }
}

/// Collects step records and prefix averages during a run.
pub(crate) struct Recorder<'a> {
    problem: &'a Problem,
    x0: Vec<f64>,
    horizon: usize,
    weighting: Weighting,
    steps: Vec<StepRecord>,
    averager: PrefixAverager,
}

impl<'a> Recorder<'a> {
    pub(crate) fn new(problem: &'a Problem, x0: &[f64], horizon: usize, weighting: Weighting) -> Self {
        Self {
            problem,
            x0: x0.to_vec(),
            horizon,
            weighting,
            steps: Vec::with_capacity(horizon.min(FULL_TRACE_LIMIT)),
            averager: PrefixAverager::new(x0.len(), horizon),
        }
    }

    pub(crate) fn push(
        &mut self,
        t: usize,
        x: &[f64],
        stepsize: f64,
        r_bar: f64,
        oracle_calls: u64,
        sigma_bar_sq: Option<f64>,
    ) {
        let g = self.problem.grad(x);
        self.steps.push(StepRecord {
            t,
            x: on_trace_grid(t, self.horizon).then(|| x.to_vec()),
            f_gap: self.problem.gap(x),
            grad_true_norm_sq: linalg::norm_sq(&g),
            stepsize,
            r_bar,
            oracle_calls,
            sigma_bar_sq,
        });
        self.averager.push(x, self.weighting.weight(r_bar));
    }

    pub(crate) fn finish(self, last: Vec<f64>, oracle_calls: u64, terminated_early: bool) -> Trajectory {
        if self.steps.is_empty() {
            let mut t = Trajectory::stationary(&self.x0, oracle_calls);
            t.candidates.last_iterate = last;
            t.terminated_early = terminated_early;
            return t;
        }
        let problem = self.problem;
        let prefix_averages = self.averager.into_snapshots();
        let weighted_average = prefix_averages.last().map(|p| p.1.clone()).unwrap_or_else(|| last.clone());
        let best_prefix_average = prefix_averages
            .iter()
            .map(|(_, p)| (problem.value(p), p))
            .fold(None::<(f64, &Vec<f64>)>, |best, (v, p)| match best {
                Some((bv, _)) if bv <= v || v.is_nan() => best,
                _ => Some((v, p)),
            })
            .map(|(_, p)| p.clone())
            .unwrap_or_else(|| last.clone());
        Trajectory {
            x0: self.x0,
            steps: self.steps,
            candidates: Candidates { last_iterate: last, weighted_average, best_prefix_average, prefix_averages },
            oracle_calls,
            terminated_early,
        }
    }
}
