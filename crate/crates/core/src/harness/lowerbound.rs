//! Conflict inequalities and the coupled confusion experiment for the
//! two-branch lower-bound families.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::algos::{run_algo, AlgoSpec};
use crate::error::{Error, Result};
use crate::oracles::{make_coupled_branch_stream, Oracle, Side};
use crate::problems::{FamilyKind, LowerBoundFamily};
use crate::rng::RngStream;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConflictResult {
    pub conflict: bool,
    /// Lower bound on `x_out` forced by competing on `h`.
    pub lower: f64,
    /// Upper bound on `x_out` forced by competing on `f`.
    pub upper: f64,
}

/// Polylog factor used for the lower-bound experiments.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IotaRule {
    /// `iota(T) = ln^2(T + 1)`
    LnSqTPlus1,
    Fixed(f64),
}

impl IotaRule {
    pub fn eval(&self, horizon: usize) -> f64 {
        match self {
            IotaRule::LnSqTPlus1 => {
                let l = (horizon as f64 + 1.0).ln();
                l * l
            }
            IotaRule::Fixed(v) => *v,
        }
    }
}

/// Evaluates the two bounds a tuning-free method would have to satisfy on
/// both members of the family, under the proof's choice of `u` and `v`.
///
/// * smooth: `v = T^2`, `u = v + 1`; lower `u - sqrt(2 c iota)(T^-1/2 + T^-3/4 + T^1/4 sqrt(u))`,
///   upper `sqrt(2 c iota)(T^3/2 + T^5/4)`.
/// * nonsmooth: `u = 1 - 1/T`; lower `u - c iota / sqrt(T)`, upper `c iota / sqrt(T)`.
/// * nonconvex: `v = T^2`, `u = v + 1`; lower `u - sqrt(c iota)(2/sqrt(T) + T^1/4 sqrt(u))`,
///   upper `sqrt(c iota)(sqrt(T) + T^3/2)`.
pub fn lb_conflict_check(kind: FamilyKind, horizon: usize, iota: f64, c: f64) -> Result<ConflictResult> {
    if horizon < 2 {
        return Err(Error::param("T must be at least 2"));
    }
    if !(iota > 0.0 && c > 0.0) {
        return Err(Error::param("iota and c must be positive"));
    }
    let t = horizon as f64;
    let (lower, upper) = match kind {
        FamilyKind::Smooth => {
            let u = t * t + 1.0;
            let k = (2.0 * c * iota).sqrt();
            (u - k * (t.powf(-0.5) + t.powf(-0.75) + t.powf(0.25) * u.sqrt()), k * (t.powf(1.5) + t.powf(1.25)))
        }
        FamilyKind::Nonsmooth => {
            let u = 1.0 - 1.0 / t;
            let k = c * iota / t.sqrt();
            (u - k, k)
        }
        FamilyKind::Nonconvex => {
            let u = t * t + 1.0;
            let k = (c * iota).sqrt();
            (u - k * (2.0 / t.sqrt() + t.powf(0.25) * u.sqrt()), k * (t.sqrt() + t.powf(1.5)))
        }
    };
    Ok(ConflictResult { conflict: lower > upper, lower, upper })
}

/// Smallest `T` in `[2, t_max]` at which the conflict holds, by bisection.
/// Returns `None` if there is no conflict at `t_max`.
pub fn conflict_threshold(kind: FamilyKind, iota: IotaRule, c: f64, t_max: usize) -> Result<Option<usize>> {
    let holds = |t: usize| lb_conflict_check(kind, t, iota.eval(t), c).map(|r| r.conflict);
    if !holds(t_max)? {
        return Ok(None);
    }
    if holds(2)? {
        return Ok(Some(2));
    }
    let (mut lo, mut hi) = (2usize, t_max);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if holds(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfusionResult {
    pub horizon: usize,
    pub trials: usize,
    /// Fraction of trials in which every oracle call drew branch 2.
    pub empirical_p: f64,
    /// `(1 - 1/T)^T`
    pub closed_form_p: f64,
    pub std_err: f64,
    /// In every all-branch-2 trial the f-run and h-run were bit-identical.
    pub coupled_trajectories_identical: bool,
}

/// Probability that `T` independent calls all draw branch 2.
pub fn closed_form_confusion(horizon: usize) -> f64 {
    (1.0 - 1.0 / horizon as f64).powi(horizon as i32)
}

/// Runs `algo` for `T` steps against both sides of `family` per trial with a
/// shared pre-drawn branch sequence and counts the trials in which the two
/// oracles were indistinguishable.
pub fn run_confusion_experiment(
    family: &LowerBoundFamily,
    algo: &AlgoSpec,
    trials: usize,
    rng: &RngStream,
) -> Result<ConfusionResult> {
    if trials == 0 {
        return Err(Error::param("trials must be at least 1"));
    }
    let horizon = family.horizon;
    let calls = algo.oracle_calls(horizon);
    let x0 = family.x0();
    let f_base = Oracle::mixture(family, Side::F);
    let h_base = Oracle::mixture(family, Side::H);
    let outcomes: Vec<(bool, bool)> = (0..trials as u64)
        .into_par_iter()
        .map(|trial| -> Result<(bool, bool)> {
            let mut stream_rng = rng.derive(trial).derive_named("branches");
            let stream = Arc::new(make_coupled_branch_stream(&mut stream_rng, calls, family.branch_prob()));
            let all_two = stream.iter().all(|&b| b == 2);
            let mut fo = f_base.fresh().with_branch_stream(Arc::clone(&stream));
            let mut ho = h_base.fresh().with_branch_stream(stream);
            let run_rng = rng.derive(trial).derive_named("algo");
            let fr = run_algo(algo, &mut fo, &x0, horizon, &mut run_rng.clone())?;
            let hr = run_algo(algo, &mut ho, &x0, horizon, &mut run_rng.clone())?;
            let same = fr.same_path(&hr);
            Ok((all_two, !all_two || same))
        })
        .collect::<Result<_>>()?;
    let hits = outcomes.iter().filter(|o| o.0).count();
    let p = hits as f64 / trials as f64;
    Ok(ConfusionResult {
        horizon,
        trials,
        empirical_p: p,
        closed_form_p: closed_form_confusion(horizon),
        std_err: (p * (1.0 - p) / trials as f64).sqrt(),
        coupled_trajectories_identical: outcomes.iter().all(|o| o.1),
    })
}
