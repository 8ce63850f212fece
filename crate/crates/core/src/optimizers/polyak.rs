//! Polyak-stepsize gradient descent on the deterministic oracle.

use crate::error::{Error, Result};
use crate::linalg;
use crate::oracles::{NoiseKind, Oracle};
use crate::rng::RngStream;

#[derive(Clone, Debug, PartialEq)]
pub struct PolyakResult {
    /// Best observed iterate by `f`.
    pub point: Vec<f64>,
    pub f_best: f64,
    /// Initial lower estimate `f(x0) - ||grad f(x0)|| D_upper`.
    pub f_hat_0: f64,
    /// Estimate in force when the budget ran out.
    pub f_hat_final: f64,
    pub oracle_calls: u64,
    /// Stopped at an exact stationary point.
    pub stationary: bool,
}

/// Valid lower bound on `f*` for convex `f` when `||x0 - x*|| <= d_upper`.
pub fn polyak_lower_estimate(f0: f64, grad_norm0: f64, d_upper: f64) -> f64 {
    f0 - grad_norm0 * d_upper
}

fn require_deterministic(oracle: &Oracle) -> Result<()> {
    if !matches!(oracle.noise().kind, NoiseKind::None) {
        return Err(Error::arg("Polyak stepsizes need the deterministic oracle"));
    }
    Ok(())
}

struct Best {
    x: Vec<f64>,
    f: f64,
    g: Vec<f64>,
}

/// Gradient descent with `eta_t = (f(x_t) - target) / ||grad f(x_t)||^2`.
pub fn run_polyak(oracle: &mut Oracle, x0: &[f64], target: f64, horizon: usize) -> Result<PolyakResult> {
    require_deterministic(oracle)?;
    let mut rng = RngStream::from_seed(0);
    let mut x = x0.to_vec();
    let mut g = vec![0.0; x0.len()];
    let mut f = oracle.sample_into(&x, &mut rng, &mut g)?.0;
    let mut best = Best { x: x.clone(), f, g: g.clone() };
    for _ in 1..horizon {
        let gn2 = linalg::norm_sq(&g);
        if gn2 == 0.0 || f <= target {
            break;
        }
        linalg::axpy(-(f - target) / gn2, &g, &mut x);
        f = oracle.sample_into(&x, &mut rng, &mut g)?.0;
        if f < best.f {
            best = Best { x: x.clone(), f, g: g.clone() };
        }
    }
    Ok(PolyakResult {
        stationary: linalg::norm_sq(&best.g) == 0.0,
        point: best.x,
        f_best: best.f,
        f_hat_0: target,
        f_hat_final: target,
        oracle_calls: oracle.call_count(),
    })
}

/// Polyak gradient descent driven by an estimated optimal value.
///
/// Starts from `f_hat = f(x0) - ||grad f(x0)|| D_upper`. The budget is split
/// into `ceil(log2 T)` equal slices; when a slice ends without the surrogate
/// gap `f_best - f_hat` halving, the estimate moves to `(f_hat + f_best)/2`.
/// If an iterate reaches `f <= f_hat` the estimate is known to be too high
/// and is reset to `f_best` minus half the slice's starting gap. Each slice
/// restarts from the best point seen so far.
pub fn run_polyak_adaptive(oracle: &mut Oracle, x0: &[f64], d_upper: f64, horizon: usize) -> Result<PolyakResult> {
    require_deterministic(oracle)?;
    if !(d_upper > 0.0 && d_upper.is_finite()) {
        return Err(Error::param(format!("distance bound must be positive, got {d_upper}")));
    }
    if horizon == 0 {
        return Err(Error::param("horizon must be at least 1"));
    }
    let budget = horizon as u64;
    let mut rng = RngStream::from_seed(0);
    let mut g = vec![0.0; x0.len()];
    let f0 = oracle.sample_into(x0, &mut rng, &mut g)?.0;
    let f_hat_0 = polyak_lower_estimate(f0, linalg::norm(&g), d_upper);
    let mut best = Best { x: x0.to_vec(), f: f0, g: g.clone() };
    let mut f_hat = f_hat_0;

    let done = |best: Best, f_hat: f64, calls: u64, stationary: bool| PolyakResult {
        point: best.x,
        f_best: best.f,
        f_hat_0,
        f_hat_final: f_hat,
        oracle_calls: calls,
        stationary,
    };
    if linalg::norm_sq(&g) == 0.0 {
        return Ok(done(best, f_hat, oracle.call_count(), true));
    }

    let slices = (horizon as f64).log2().ceil().max(1.0) as u64;
    let slice_len = budget.div_ceil(slices);

    while oracle.call_count() < budget {
        let gap_start = best.f - f_hat;
        let mut x = best.x.clone();
        let mut f = best.f;
        g.copy_from_slice(&best.g);
        let mut overshoot = false;
        let slice_end = (oracle.call_count() + slice_len).min(budget);
        while oracle.call_count() < slice_end {
            if f <= f_hat {
                overshoot = true;
                break;
            }
            let gn2 = linalg::norm_sq(&g);
            linalg::axpy(-(f - f_hat) / gn2, &g, &mut x);
            f = oracle.sample_into(&x, &mut rng, &mut g)?.0;
            if f < best.f {
                best = Best { x: x.clone(), f, g: g.clone() };
            }
            if linalg::norm_sq(&g) == 0.0 {
                let calls = oracle.call_count();
                return Ok(done(Best { x, f, g }, f_hat, calls, true));
            }
        }
        if overshoot || best.f <= f_hat {
            f_hat = best.f - 0.5 * gap_start;
        } else if best.f - f_hat > 0.5 * gap_start {
            f_hat = 0.5 * (f_hat + best.f);
        }
    }
    let calls = oracle.call_count();
    Ok(done(best, f_hat, calls, false))
}
