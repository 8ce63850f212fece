//! Fixed-stepsize SGD.

use super::{Recorder, Trajectory, Weighting};
use crate::error::{Error, Result};
use crate::linalg;
use crate::oracles::Oracle;
use crate::rng::RngStream;

/// Coordinates are clamped to this magnitude so that divergent runs stay
/// finite.
pub const ITERATE_CLAMP: f64 = 1e150;

/// `x_{t+1} = x_t - eta g_t` for `horizon` steps.
pub fn run_sgd(oracle: &mut Oracle, x0: &[f64], eta: f64, horizon: usize, rng: &mut RngStream) -> Result<Trajectory> {
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::param(format!("SGD stepsize must be positive, got {eta}")));
    }
    if x0.len() != oracle.dim() {
        return Err(Error::arg("x0 dimension does not match oracle"));
    }
    let problem = oracle.problem_arc();
    let mut rec = Recorder::new(&problem, x0, horizon, Weighting::Uniform);
    let mut x = x0.to_vec();
    let mut g = vec![0.0; x0.len()];
    let mut r_bar: f64 = 0.0;
    for t in 0..horizon {
        oracle.sample_into(&x, rng, &mut g)?;
        r_bar = r_bar.max(linalg::dist(&x, x0));
        rec.push(t, &x, eta, r_bar, oracle.call_count(), None);
        linalg::axpy(-eta, &g, &mut x);
        for xi in x.iter_mut() {
            *xi = if xi.is_nan() { ITERATE_CLAMP } else { xi.clamp(-ITERATE_CLAMP, ITERATE_CLAMP) };
        }
    }
    Ok(rec.finish(x, oracle.call_count(), false))
}
