//! Sample-variance estimation, minibatch sizing and the variance-estimating
//! T-DoG/T-DoWG methods.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::log_plus;
use crate::optimizers::{Recorder, Trajectory, Weighting};
use crate::oracles::Oracle;
use crate::rng::RngStream;

/// `theta_{T,delta} = ln(60 ln(6T) / delta)`.
pub fn theta_t_delta(horizon: usize, delta: f64) -> f64 {
    (60.0 * (6.0 * horizon as f64).ln() / delta).ln()
}

#[derive(Clone, Debug, PartialEq)]
pub struct VarianceEstimate {
    pub mu_hat: Vec<f64>,
    /// `(1/b) sum ||mu_i - mu_hat||^2`
    pub sigma_sq_hat: f64,
    pub b: usize,
    /// Running maximum of `sigma_sq_hat` over the estimates seen so far.
    pub running_max: f64,
}

/// Minibatch mean and biased (`1/b`) sample variance.
pub fn sample_variance<S: AsRef<[f64]>>(samples: &[S]) -> Result<VarianceEstimate> {
    let b = samples.len();
    if b < 2 {
        return Err(Error::param(format!("need at least 2 samples, got {b}")));
    }
    let dim = samples[0].as_ref().len();
    let mut mu = vec![0.0; dim];
    for s in samples {
        let s = s.as_ref();
        if s.len() != dim {
            return Err(Error::arg("samples differ in dimension"));
        }
        linalg::axpy(1.0 / b as f64, s, &mut mu);
    }
    let var = samples.iter().map(|s| linalg::dist_sq(s.as_ref(), &mu)).sum::<f64>() / b as f64;
    Ok(VarianceEstimate { mu_hat: mu, sigma_sq_hat: var, b, running_max: var })
}

/// Minibatch estimator state that folds successive estimates into a running
/// maximum.
#[derive(Clone, Debug, Default)]
pub struct RunningVariance {
    max: Option<f64>,
    first: Option<f64>,
}

impl RunningVariance {
    pub fn update(&mut self, mut est: VarianceEstimate) -> VarianceEstimate {
        let m = self.max.map_or(est.sigma_sq_hat, |m| m.max(est.sigma_sq_hat));
        self.max = Some(m);
        self.first.get_or_insert(est.sigma_sq_hat);
        est.running_max = m;
        est
    }

    pub fn running_max(&self) -> Option<f64> {
        self.max
    }

    pub fn first(&self) -> Option<f64> {
        self.first
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VEConfig {
    pub b: usize,
    pub theta: f64,
    pub delta: f64,
    pub horizon: usize,
    /// `8^4 theta_{T,delta} / theta`
    pub alpha: f64,
    pub beta: f64,
    /// Constant in the minibatch feasibility condition.
    pub c: f64,
}

impl VEConfig {
    /// Config with `beta = T` and `c = 1`.
    pub fn new(b: usize, theta: f64, delta: f64, horizon: usize) -> Result<Self> {
        if b < 2 {
            return Err(Error::param(format!("batch size must be at least 2, got {b}")));
        }
        if !(theta > 0.0 && theta <= 1.0) {
            return Err(Error::param(format!("theta must lie in (0, 1], got {theta}")));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::param(format!("delta must lie in (0, 1), got {delta}")));
        }
        if horizon == 0 {
            return Err(Error::param("horizon must be at least 1"));
        }
        let alpha = 8f64.powi(4) * theta_t_delta(horizon, delta) / theta;
        Ok(Self { b, theta, delta, horizon, alpha, beta: horizon as f64, c: 1.0 })
    }

    pub fn with_beta(mut self, beta: f64) -> Result<Self> {
        if !(beta >= 0.0 && beta.is_finite()) {
            return Err(Error::param(format!("beta must be nonnegative, got {beta}")));
        }
        self.beta = beta;
        Ok(self)
    }

    pub fn with_c(mut self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::param(format!("c must be positive, got {c}")));
        }
        self.c = c;
        Ok(self)
    }
}

/// Left side of the minibatch condition
/// `c [sqrt(ln(2bT/delta)/b) + ln(2 max(b,d) T/delta)/b]`.
pub fn batch_condition_lhs(b: u64, delta: f64, horizon: usize, d: usize, c: f64) -> f64 {
    let (bf, t) = (b as f64, horizon as f64);
    let bd = b.max(d as u64) as f64;
    c * (((2.0 * bf * t / delta).ln() / bf).sqrt() + (2.0 * bd * t / delta).ln() / bf)
}

const SCAN_LIMIT: u64 = 1 << 20;
const BATCH_LIMIT: u64 = 1 << 32;

/// Smallest `b >= 2` with `batch_condition_lhs(b) <= ksnr_sq - theta`.
///
/// The left side decreases in `b`, so past a linear scan of the first 2^20
/// sizes the search continues by doubling and bisection.
pub fn min_batch_size(ksnr_sq: f64, theta: f64, delta: f64, horizon: usize, d: usize, c: f64) -> Result<u64> {
    if !(0.0..=1.0).contains(&theta) || !(0.0..=1.0).contains(&ksnr_sq) {
        return Err(Error::param("theta and ksnr_sq must lie in [0, 1]"));
    }
    if !(c > 0.0) || !(delta > 0.0 && delta < 1.0) || horizon == 0 {
        return Err(Error::param("need c > 0, delta in (0,1) and T >= 1"));
    }
    let rhs = ksnr_sq - theta;
    if rhs <= 0.0 {
        return Err(Error::Infeasible(format!("ksnr_sq {ksnr_sq} <= theta {theta}")));
    }
    let ok = |b: u64| batch_condition_lhs(b, delta, horizon, d, c) <= rhs;
    for b in 2..=SCAN_LIMIT {
        if ok(b) {
            return Ok(b);
        }
    }
    let mut lo = SCAN_LIMIT;
    let mut hi = SCAN_LIMIT * 2;
    while !ok(hi) {
        if hi >= BATCH_LIMIT {
            return Err(Error::Infeasible(format!("no batch size up to 2^32 satisfies the condition (rhs {rhs})")));
        }
        lo = hi;
        hi = (hi * 2).min(BATCH_LIMIT);
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VeVariant {
    TDogVe,
    TDowgVe,
}

impl VeVariant {
    pub fn name(&self) -> &'static str {
        match self {
            Self::TDogVe => "tdog-ve",
            Self::TDowgVe => "tdowg-ve",
        }
    }

    pub fn weighting(&self) -> Weighting {
        match self {
            Self::TDogVe => Weighting::Rbar,
            Self::TDowgVe => Weighting::RbarSq,
        }
    }
}

/// Accumulators of a variance-estimating run.
#[derive(Clone, Debug, PartialEq)]
pub struct VeState {
    pub r_bar: f64,
    pub r_bar0: f64,
    pub u: f64,
    pub v: f64,
    pub u0: f64,
    pub v0: f64,
    pub sigma_bar_sq: f64,
    pub sigma_bar0_sq: f64,
}

/// T-DoG-VE: `r/(alpha sqrt(u + beta s)) / log_+^2(1 + (u+s)/(u0+s0))`;
/// T-DoWG-VE: `r^2/(alpha sqrt(v + beta r^2 s)) / log_+^2(1 + (v+r^2 s)/(v0+r0^2 s0))`,
/// with `s` the running maximum variance.
pub fn ve_stepsize(variant: VeVariant, st: &VeState, alpha: f64, beta: f64) -> Result<f64> {
    let r = st.r_bar;
    let s = st.sigma_bar_sq;
    let (num, inner, ratio_num, ratio_den) = match variant {
        VeVariant::TDogVe => (r, st.u + beta * s, st.u + s, st.u0 + st.sigma_bar0_sq),
        VeVariant::TDowgVe => (
            r * r,
            st.v + beta * r * r * s,
            st.v + r * r * s,
            st.v0 + st.r_bar0 * st.r_bar0 * st.sigma_bar0_sq,
        ),
    };
    if !(inner > 0.0 && ratio_den > 0.0) {
        return Err(Error::DegenerateState(format!("{} accumulators are zero", variant.name())));
    }
    let lp = log_plus(1.0 + ratio_num / ratio_den);
    Ok(num / (alpha * inner.sqrt()) / (lp * lp))
}

/// Runs T-DoG-VE or T-DoWG-VE for `cfg.horizon` steps.
///
/// Each step spends `b` oracle calls on a variance minibatch and one on the
/// stepping gradient, drawn from disjoint substreams of `rng`.
pub fn run_ve_adaptive(
    variant: VeVariant,
    oracle: &mut Oracle,
    x0: &[f64],
    r_eps: f64,
    cfg: &VEConfig,
    rng: &mut RngStream,
) -> Result<Trajectory> {
    if !(r_eps > 0.0 && r_eps.is_finite()) {
        return Err(Error::param(format!("r_eps must be positive, got {r_eps}")));
    }
    if cfg.b < 2 || cfg.horizon == 0 {
        return Err(Error::param("invalid VE config"));
    }
    if x0.len() != oracle.dim() {
        return Err(Error::arg("x0 dimension does not match oracle"));
    }
    let mut var_rng = rng.derive_named("ve-variance");
    let mut step_rng = rng.derive_named("ve-step");
    let problem = oracle.problem_arc();
    let mut rec = Recorder::new(&problem, x0, cfg.horizon, variant.weighting());
    let dim = x0.len();
    let mut x = x0.to_vec();
    let mut batch = vec![vec![0.0; dim]; cfg.b];
    let mut g = vec![0.0; dim];
    let mut running = RunningVariance::default();
    let mut st = VeState { r_bar: r_eps, r_bar0: r_eps, u: 0.0, v: 0.0, u0: 0.0, v0: 0.0, sigma_bar_sq: 0.0, sigma_bar0_sq: 0.0 };

    for t in 0..cfg.horizon {
        for row in batch.iter_mut() {
            oracle.sample_into(&x, &mut var_rng, row)?;
        }
        let est = running.update(sample_variance(&batch)?);
        oracle.sample_into(&x, &mut step_rng, &mut g)?;
        let gn2 = linalg::norm_sq(&g);
        st.r_bar = st.r_bar.max(linalg::dist(&x, x0));
        st.u += gn2;
        st.v += st.r_bar * st.r_bar * gn2;
        st.sigma_bar_sq = est.running_max;
        if t == 0 {
            st.u0 = st.u;
            st.v0 = st.v;
            st.sigma_bar0_sq = est.sigma_sq_hat;
            if gn2 == 0.0 && est.sigma_sq_hat == 0.0 {
                return Ok(rec.finish(x0.to_vec(), oracle.call_count(), true));
            }
        }
        let eta = ve_stepsize(variant, &st, cfg.alpha, cfg.beta)?;
        rec.push(t, &x, eta, st.r_bar, oracle.call_count(), Some(st.sigma_bar_sq));
        linalg::axpy(-eta, &g, &mut x);
    }
    Ok(rec.finish(x, oracle.call_count(), false))
}
