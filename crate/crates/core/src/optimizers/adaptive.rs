//! Distance-over-gradients stepsizes (DoG, DoWG) and their log-damped
//! T-variants.

use serde::{Deserialize, Serialize};

use super::{Recorder, Trajectory, Weighting};
use crate::error::{Error, Result};
use crate::hints::Interval;
use crate::linalg;
use crate::log_plus;
use crate::oracles::Oracle;
use crate::problems::Ball;
use crate::rng::RngStream;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AdaptiveVariant {
    Dog,
    Dowg,
    TDog,
    TDowg,
}

impl AdaptiveVariant {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Dog => "dog",
            Self::Dowg => "dowg",
            Self::TDog => "tdog",
            Self::TDowg => "tdowg",
        }
    }

    /// Averaging weights matching the variant's analysis: `r_bar` for the
    /// DoG family, `r_bar^2` for the DoWG family.
    pub fn weighting(&self) -> Weighting {
        match self {
            Self::Dog | Self::TDog => Weighting::Rbar,
            Self::Dowg | Self::TDowg => Weighting::RbarSq,
        }
    }
}

/// Running quantities of a DoG/DoWG-style run after step `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct AdaptiveState {
    pub t: usize,
    pub x: Vec<f64>,
    pub x0: Vec<f64>,
    /// `max(max_{k<=t} ||x_k - x0||, r_eps)`
    pub r_bar: f64,
    /// `sum_{k<=t} ||g_k||^2`
    pub u: f64,
    /// `sum_{k<=t} r_bar_k^2 ||g_k||^2`
    pub v: f64,
    pub u0: f64,
    pub v0: f64,
    pub r_eps: f64,
}

impl AdaptiveState {
    pub fn new(x0: &[f64], r_eps: f64) -> Self {
        Self { t: 0, x: x0.to_vec(), x0: x0.to_vec(), r_bar: r_eps, u: 0.0, v: 0.0, u0: 0.0, v0: 0.0, r_eps }
    }

    /// Folds in the gradient drawn at the current iterate `self.x`.
    pub fn absorb(&mut self, grad_norm_sq: f64) {
        self.r_bar = self.r_bar.max(linalg::dist(&self.x, &self.x0));
        self.u += grad_norm_sq;
        self.v += self.r_bar * self.r_bar * grad_norm_sq;
        if self.t == 0 {
            self.u0 = self.u;
            self.v0 = self.v;
        }
    }
}

/// DoG `r/sqrt(u)`, DoWG `r^2/sqrt(v)`, T-DoG `r/(sqrt(u) log_+(u/u0))`,
/// T-DoWG `r^2/(sqrt(v) log_+(v/v0))`.
pub fn adaptive_stepsize(variant: AdaptiveVariant, state: &AdaptiveState) -> Result<f64> {
    let r = state.r_bar;
    let (acc, acc0) = match variant {
        AdaptiveVariant::Dog | AdaptiveVariant::TDog => (state.u, state.u0),
        AdaptiveVariant::Dowg | AdaptiveVariant::TDowg => (state.v, state.v0),
    };
    if !(acc > 0.0) {
        return Err(Error::DegenerateState(format!("{} accumulator is zero", variant.name())));
    }
    let eta = match variant {
        AdaptiveVariant::Dog => r / acc.sqrt(),
        AdaptiveVariant::Dowg => r * r / acc.sqrt(),
        AdaptiveVariant::TDog => {
            if !(acc0 > 0.0) {
                return Err(Error::DegenerateState("initial accumulator u0 is zero".into()));
            }
            r / (acc.sqrt() * log_plus(acc / acc0))
        }
        AdaptiveVariant::TDowg => {
            if !(acc0 > 0.0) {
                return Err(Error::DegenerateState("initial accumulator v0 is zero".into()));
            }
            r * r / (acc.sqrt() * log_plus(acc / acc0))
        }
    };
    Ok(eta)
}

/// Runs `horizon` steps of `x <- P(x - eta_t g_t)` with the variant's stepsize.
///
/// If the very first stochastic gradient is exactly zero the run stops and
/// returns `x0`.
pub fn run_adaptive(
    variant: AdaptiveVariant,
    oracle: &mut Oracle,
    x0: &[f64],
    r_eps: f64,
    horizon: usize,
    projection: Option<&Ball>,
    rng: &mut RngStream,
) -> Result<Trajectory> {
    if !(r_eps > 0.0 && r_eps.is_finite()) {
        return Err(Error::param(format!("r_eps must be positive, got {r_eps}")));
    }
    if horizon == 0 {
        return Err(Error::param("horizon must be at least 1"));
    }
    if x0.len() != oracle.dim() {
        return Err(Error::arg("x0 dimension does not match oracle"));
    }
    let problem = oracle.problem_arc();
    let mut rec = Recorder::new(&problem, x0, horizon, variant.weighting());
    let mut state = AdaptiveState::new(x0, r_eps);
    let mut g = vec![0.0; x0.len()];

    for t in 0..horizon {
        state.t = t;
        oracle.sample_into(&state.x, rng, &mut g)?;
        let gn2 = linalg::norm_sq(&g);
        if t == 0 && gn2 == 0.0 {
            return Ok(rec.finish(x0.to_vec(), oracle.call_count(), true));
        }
        state.absorb(gn2);
        let eta = adaptive_stepsize(variant, &state)?;
        rec.push(t, &state.x, eta, state.r_bar, oracle.call_count(), None);
        linalg::axpy(-eta, &g, &mut state.x);
        if let Some(ball) = projection {
            ball.project(&mut state.x);
        }
    }
    Ok(rec.finish(state.x, oracle.call_count(), false))
}

/// Bounded-domain wrapper: returns `x0` without any oracle calls when
/// `T < 4 log_+(D_hi/D_lo)`, otherwise runs [`run_adaptive`] with
/// `r_eps = D_lo` and projection onto `ball`.
pub fn run_bounded_adaptive(
    variant: AdaptiveVariant,
    oracle: &mut Oracle,
    x0: &[f64],
    d_hint: Interval,
    horizon: usize,
    ball: &Ball,
    rng: &mut RngStream,
) -> Result<Trajectory> {
    if (horizon as f64) < 4.0 * log_plus(d_hint.ratio()) {
        let mut traj = Trajectory::stationary(x0, 0);
        traj.terminated_early = false;
        return Ok(traj);
    }
    run_adaptive(variant, oracle, x0, d_hint.lo, horizon, Some(ball), rng)
}
