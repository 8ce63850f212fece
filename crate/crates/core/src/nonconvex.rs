//! Leader selection by subsampling and restarted SGD with a doubling
//! stepsize ladder, for smooth nonconvex objectives.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hints::Interval;
use crate::linalg;
use crate::optimizers::ITERATE_CLAMP;
use crate::oracles::Oracle;
use crate::rng::RngStream;

/// Ranges for smoothness `L`, noise bound `R` and initial suboptimality `Delta`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonconvexHints {
    pub l: Interval,
    pub r: Interval,
    pub delta: Interval,
}

impl NonconvexHints {
    pub fn new(l: (f64, f64), r: (f64, f64), delta: (f64, f64)) -> Result<Self> {
        Ok(Self { l: Interval::new(l.0, l.1)?, r: Interval::new(r.0, r.1)?, delta: Interval::new(delta.0, delta.1)? })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LeaderResult {
    pub leader: Vec<f64>,
    /// Averaged stochastic gradient at the leader.
    pub g_hat: Vec<f64>,
    /// `||g_hat||`, the smallest among the sampled estimates.
    pub h_min: f64,
    /// Position in `V` of each draw, in draw order.
    pub sampled_indices: Vec<usize>,
}

/// `M = max(1, ceil(ln(1/delta)))`.
pub fn leader_draws(delta: f64) -> usize {
    ((1.0 / delta).ln().ceil() as usize).max(1)
}

/// Probability of drawing each of `p` points: proportional to `1/sqrt(i+1)`
/// for `i = 1..p` in chronological order.
pub fn leader_probabilities(p: usize) -> Vec<f64> {
    let w: Vec<f64> = (1..=p).map(|i| 1.0 / ((i + 1) as f64).sqrt()).collect();
    let z: f64 = w.iter().sum();
    w.into_iter().map(|wi| wi / z).collect()
}

/// Draws `M` points of `points` with replacement, averages `k` fresh
/// stochastic gradients at each and returns the one with the smallest
/// averaged gradient norm (first on ties). Uses exactly `M k` oracle calls.
pub fn find_leader<P: AsRef<[f64]>>(
    points: &[P],
    delta: f64,
    k: usize,
    oracle: &mut Oracle,
    rng: &mut RngStream,
) -> Result<LeaderResult> {
    if points.is_empty() {
        return Err(Error::arg("leader search needs at least one point"));
    }
    if k == 0 {
        return Err(Error::param("K must be at least 1"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::param(format!("delta must lie in (0, 1), got {delta}")));
    }
    let m = leader_draws(delta);
    let weights: Vec<f64> = (1..=points.len()).map(|i| 1.0 / ((i + 1) as f64).sqrt()).collect();
    let dist = WeightedIndex::new(&weights).map_err(|e| Error::arg(e.to_string()))?;
    let dim = oracle.dim();
    let mut g = vec![0.0; dim];
    let mut best: Option<(f64, usize, Vec<f64>)> = None;
    let mut sampled = Vec::with_capacity(m);
    for _ in 0..m {
        let idx = dist.sample(rng);
        sampled.push(idx);
        let x = points[idx].as_ref();
        let mut avg = vec![0.0; dim];
        for _ in 0..k {
            oracle.sample_into(x, rng, &mut g)?;
            linalg::axpy(1.0 / k as f64, &g, &mut avg);
        }
        let h = linalg::norm(&avg);
        if best.as_ref().is_none_or(|b| h < b.0) {
            best = Some((h, idx, avg));
        }
    }
    let (h_min, idx, g_hat) = best.expect("at least one draw");
    Ok(LeaderResult { leader: points[idx].as_ref().to_vec(), g_hat, h_min, sampled_indices: sampled })
}

/// Number of restart epochs
/// `N = 1 + ceil(ln(min(L_hi, sqrt(5T R_hi^2 / (2 Delta_lo))) / max(L_lo, sqrt(5T R_lo^2 / Delta_hi))))`,
/// at least 1.
pub fn compute_epochs_n(hints: &NonconvexHints, horizon: usize) -> usize {
    let t = horizon as f64;
    let num = hints.l.hi.min((5.0 * t * hints.r.hi * hints.r.hi / (2.0 * hints.delta.lo)).sqrt());
    let den = hints.l.lo.max((5.0 * t * hints.r.lo * hints.r.lo / hints.delta.hi).sqrt());
    let raw = 1.0 + (num / den).ln().ceil();
    if raw.is_finite() && raw >= 1.0 {
        raw as usize
    } else {
        1
    }
}

/// `min(1/L, sqrt(2 Delta / (5 T R^2)))`, the stepsize minimizing the SGD bound.
pub fn optimal_sgd_stepsize(l: f64, r: f64, delta: f64, horizon: usize) -> f64 {
    (1.0 / l).min((2.0 * delta / (5.0 * horizon as f64 * r * r)).sqrt())
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpochResult {
    pub eta: f64,
    pub leader: LeaderResult,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RestartedResult {
    pub y_bar: Vec<f64>,
    pub per_epoch: Vec<EpochResult>,
    pub n_epochs: usize,
    /// Steps per epoch, `ceil(T_total / N)`.
    pub epoch_len: usize,
    pub oracle_calls: u64,
}

/// Runs `N` independent SGD epochs from `y0` with stepsizes `eta0 2^n`,
/// `n = 1..N`, picks a leader from each epoch's iterates with `K = T` and
/// returns the leader with the smallest estimated gradient norm (earliest
/// epoch on ties). Returns `y0` without oracle calls when `T_total < N`.
pub fn restarted_sgd(
    oracle: &mut Oracle,
    y0: &[f64],
    delta: f64,
    hints: &NonconvexHints,
    t_total: usize,
    rng: &mut RngStream,
) -> Result<RestartedResult> {
    if t_total == 0 {
        return Err(Error::param("T_total must be at least 1"));
    }
    if y0.len() != oracle.dim() {
        return Err(Error::arg("y0 dimension does not match oracle"));
    }
    let n = compute_epochs_n(hints, t_total);
    if t_total < n {
        return Ok(RestartedResult { y_bar: y0.to_vec(), per_epoch: Vec::new(), n_epochs: n, epoch_len: 0, oracle_calls: 0 });
    }
    let t = t_total.div_ceil(n);
    let eta0 = optimal_sgd_stepsize(hints.l.hi, hints.r.hi, hints.delta.lo, t);
    let start_calls = oracle.call_count();
    let dim = y0.len();
    let mut g = vec![0.0; dim];
    let mut per_epoch = Vec::with_capacity(n);
    for epoch in 1..=n {
        let eta = eta0 * 2f64.powi(epoch as i32);
        let mut sgd_rng = rng.derive_named(&format!("epoch-{epoch}-sgd"));
        let mut leader_rng = rng.derive_named(&format!("epoch-{epoch}-leader"));
        let mut x = y0.to_vec();
        let mut iterates = Vec::with_capacity(t);
        for _ in 0..t {
            oracle.sample_into(&x, &mut sgd_rng, &mut g)?;
            linalg::axpy(-eta, &g, &mut x);
            for xi in x.iter_mut() {
                *xi = if xi.is_nan() { ITERATE_CLAMP } else { xi.clamp(-ITERATE_CLAMP, ITERATE_CLAMP) };
            }
            iterates.push(x.clone());
        }
        let leader = find_leader(&iterates, delta, t, oracle, &mut leader_rng)?;
        per_epoch.push(EpochResult { eta, leader });
    }
    let best = per_epoch
        .iter()
        .enumerate()
        .fold(0usize, |b, (i, e)| if e.leader.h_min < per_epoch[b].leader.h_min { i } else { b });
    Ok(RestartedResult {
        y_bar: per_epoch[best].leader.leader.clone(),
        per_epoch,
        n_epochs: n,
        epoch_len: t,
        oracle_calls: oracle.call_count() - start_calls,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::NoiseModel;
    use crate::problems::{make_quadratic, make_sinbump};

    #[test]
    fn probabilities_for_three_points() {
        let p = leader_probabilities(3);
        for (got, want) in p.iter().zip([0.39627, 0.32355, 0.28018]) {
            assert!((got - want).abs() < 2e-5, "{got} vs {want}");
        }
    }

    #[test]
    fn sampling_frequencies_match() {
        let pts: Vec<Vec<f64>> = (0..3).map(|i| vec![i as f64]).collect();
        let p = make_quadratic(1.0, &[0.0], 1).unwrap();
        let mut o = Oracle::deterministic(p);
        let mut rng = RngStream::from_seed(9);
        let mut counts = [0usize; 3];
        // delta = e^-1 gives one draw per call
        let delta = (-1.0f64).exp();
        for _ in 0..100_000 {
            let r = find_leader(&pts, delta, 1, &mut o, &mut rng).unwrap();
            counts[r.sampled_indices[0]] += 1;
        }
        for (c, want) in counts.iter().zip(leader_probabilities(3)) {
            assert!((*c as f64 / 1e5 - want).abs() < 0.01);
        }
    }

    #[test]
    fn single_point_is_leader() {
        let p = make_quadratic(1.0, &[0.0, 0.0], 2).unwrap();
        let mut o = Oracle::new(p, NoiseModel::gaussian(1.0).unwrap()).unwrap();
        let mut rng = RngStream::from_seed(1);
        let r = find_leader(&[vec![0.3, 0.4]], 0.01, 5, &mut o, &mut rng).unwrap();
        assert_eq!(r.leader, vec![0.3, 0.4]);
        assert_eq!(r.sampled_indices.len(), 5);
        assert_eq!(o.call_count(), 25);
    }

    #[test]
    fn exact_gradients_pick_argmin_of_sampled() {
        let p = make_sinbump(1.0, 2).unwrap();
        let pts: Vec<Vec<f64>> = vec![vec![2.0, 1.0], vec![0.1, 0.0], vec![-1.0, 3.0], vec![0.5, 0.5]];
        let mut o = Oracle::deterministic(p.clone());
        let mut rng = RngStream::from_seed(4);
        let r = find_leader(&pts, 1e-4, 1, &mut o, &mut rng).unwrap();
        let best = r
            .sampled_indices
            .iter()
            .map(|&i| linalg::norm_sq(&p.grad(&pts[i])))
            .fold(f64::INFINITY, f64::min);
        assert_eq!(linalg::norm_sq(&p.grad(&r.leader)), best);
        assert!((r.h_min * r.h_min - best).abs() < 1e-12);
    }

    #[test]
    fn empty_points_rejected() {
        let p = make_quadratic(1.0, &[0.0], 1).unwrap();
        let mut o = Oracle::deterministic(p);
        let pts: Vec<Vec<f64>> = Vec::new();
        assert!(find_leader(&pts, 0.1, 1, &mut o, &mut RngStream::from_seed(0)).is_err());
    }

    #[test]
    fn epochs_examples() {
        let h = NonconvexHints::new((0.01, 100.0), (0.001, 1.0), (1.0, 1.0)).unwrap();
        assert_eq!(compute_epochs_n(&h, 100), 8);
        let tight = NonconvexHints::new((2.0, 2.0), (0.5, 0.5), (3.0, 3.0)).unwrap();
        for t in [1, 10, 1000, 100_000] {
            assert_eq!(compute_epochs_n(&tight, t), 1);
        }
    }

    #[test]
    fn ladder_start() {
        assert!((optimal_sgd_stepsize(10.0, 1.0, 1.0, 1000) - 0.02).abs() < 1e-15);
    }

    #[test]
    fn call_budget_is_exact() {
        // N = 3 with delta = e^-2 (M = 2)
        let p = make_sinbump(1.0, 3).unwrap();
        let h = NonconvexHints::new((3.0, 3.0 * 1.5f64.exp()), (1e-3, 10.0), (1.0, 1.0)).unwrap();
        let t_total = 300;
        assert_eq!(compute_epochs_n(&h, t_total), 3);
        let mut o = Oracle::new(p, NoiseModel::gaussian(1.0).unwrap()).unwrap();
        let mut rng = RngStream::from_seed(2);
        let delta = (-2.0f64).exp();
        assert_eq!(leader_draws(delta), 2);
        let r = restarted_sgd(&mut o, &[1.0, 1.0, 1.0], delta, &h, t_total, &mut rng).unwrap();
        assert_eq!(r.n_epochs, 3);
        assert_eq!(r.epoch_len, 100);
        assert_eq!(r.oracle_calls, 900);
        let eta0 = r.per_epoch[0].eta / 2.0;
        for (i, e) in r.per_epoch.iter().enumerate() {
            assert_eq!(e.eta, eta0 * 2f64.powi(i as i32 + 1));
        }
    }

    #[test]
    fn short_budget_returns_start() {
        let h = NonconvexHints::new((0.01, 100.0), (0.001, 1.0), (1.0, 1.0)).unwrap();
        let p = make_sinbump(1.0, 1).unwrap();
        let mut o = Oracle::deterministic(p);
        let r = restarted_sgd(&mut o, &[2.0], 0.1, &h, 3, &mut RngStream::from_seed(0)).unwrap();
        assert_eq!(r.y_bar, vec![2.0]);
        assert_eq!(r.oracle_calls, 0);
    }

    #[test]
    fn deterministic_single_epoch_selects_min_gradient() {
        let p = make_sinbump(1.0, 2).unwrap();
        let h = NonconvexHints::new((3.0, 3.0), (1e-3, 1e-3), (1.0, 1.0)).unwrap();
        let mut o = Oracle::deterministic(p.clone());
        let r = restarted_sgd(&mut o, &[1.5, -0.7], 0.01, &h, 50, &mut RngStream::from_seed(5)).unwrap();
        assert_eq!(r.n_epochs, 1);
        assert!(linalg::norm_sq(&p.grad(&r.y_bar)) < linalg::norm_sq(&p.grad(&[1.5, -0.7])));
    }
}
