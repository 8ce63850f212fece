//! Uniform front end over every optimizer in the crate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::{run_ve_adaptive, VEConfig, VeVariant};
use crate::hints::Interval;
use crate::nonconvex::{compute_epochs_n, leader_draws, restarted_sgd, NonconvexHints};
use crate::optimizers::{
    run_adaptive, run_bounded_adaptive, run_polyak_adaptive, run_sgd, AdaptiveVariant, CandidateKind, Trajectory,
};
use crate::oracles::Oracle;
use crate::rng::RngStream;

/// Candidate label for methods that return a single point.
pub const OUTPUT_CANDIDATE: &str = "output";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "algo", rename_all = "snake_case")]
pub enum AlgoSpec {
    Sgd { eta: f64 },
    /// `project` uses the problem's ball domain, if any.
    Adaptive { variant: AdaptiveVariant, r_eps: f64, project: bool },
    /// Bounded-domain wrapper: `r_eps = D_lo`, projection onto the problem ball.
    Bounded { variant: AdaptiveVariant, d_hint: Interval },
    Polyak { d_upper: f64 },
    Ve { variant: VeVariant, r_eps: f64, b: usize, theta: f64, delta: f64, beta: Option<f64>, c: f64 },
    Restarted { delta: f64, hints: NonconvexHints },
}

impl AlgoSpec {
    pub fn name(&self) -> &'static str {
        match self {
            AlgoSpec::Sgd { .. } => "sgd",
            AlgoSpec::Adaptive { variant, .. } | AlgoSpec::Bounded { variant, .. } => variant.name(),
            AlgoSpec::Polyak { .. } => "polyak",
            AlgoSpec::Ve { variant, .. } => variant.name(),
            AlgoSpec::Restarted { .. } => "restarted-sgd",
        }
    }

    /// Oracle calls a run with this horizon makes (at most, for methods
    /// that may stop early).
    pub fn oracle_calls(&self, horizon: usize) -> usize {
        match self {
            AlgoSpec::Ve { b, .. } => horizon * (b + 1),
            AlgoSpec::Restarted { delta, hints } => {
                let n = compute_epochs_n(hints, horizon);
                if horizon < n {
                    0
                } else {
                    n * horizon.div_ceil(n) * (1 + leader_draws(*delta))
                }
            }
            _ => horizon,
        }
    }

    pub fn ve_config(&self, horizon: usize) -> Result<Option<VEConfig>> {
        if let AlgoSpec::Ve { b, theta, delta, beta, c, .. } = self {
            let mut cfg = VEConfig::new(*b, *theta, *delta, horizon)?.with_c(*c)?;
            if let Some(beta) = beta {
                cfg = cfg.with_beta(*beta)?;
            }
            return Ok(Some(cfg));
        }
        Ok(None)
    }
}

#[derive(Clone, Debug)]
pub struct AlgoOutput {
    /// `(candidate kind, point)` pairs.
    pub candidates: Vec<(String, Vec<f64>)>,
    pub oracle_calls: u64,
    pub trajectory: Option<Trajectory>,
}

impl AlgoOutput {
    fn single(point: Vec<f64>, oracle_calls: u64) -> Self {
        Self { candidates: vec![(OUTPUT_CANDIDATE.to_string(), point)], oracle_calls, trajectory: None }
    }

    fn from_trajectory(traj: Trajectory) -> Self {
        let candidates = CandidateKind::ALL
            .iter()
            .map(|k| (k.as_str().to_string(), traj.candidates.get(*k).to_vec()))
            .collect();
        Self { candidates, oracle_calls: traj.oracle_calls, trajectory: Some(traj) }
    }

    /// Bitwise equality of every recorded iterate and every candidate the
    /// algorithm itself produces. The best-prefix pick ranks by the true
    /// objective, so it is left out.
    pub fn same_path(&self, other: &AlgoOutput) -> bool {
        let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        let pts = |o: &AlgoOutput| -> Vec<Vec<u64>> {
            let mut out: Vec<Vec<u64>> = o
                .candidates
                .iter()
                .filter(|c| c.0 != CandidateKind::BestPrefixAverage.as_str())
                .map(|c| bits(&c.1))
                .collect();
            if let Some(t) = &o.trajectory {
                out.extend(t.iterates().into_iter().map(bits));
            }
            out
        };
        self.oracle_calls == other.oracle_calls && pts(self) == pts(other)
    }
}

pub fn run_algo(
    spec: &AlgoSpec,
    oracle: &mut Oracle,
    x0: &[f64],
    horizon: usize,
    rng: &mut RngStream,
) -> Result<AlgoOutput> {
    match spec {
        AlgoSpec::Sgd { eta } => Ok(AlgoOutput::from_trajectory(run_sgd(oracle, x0, *eta, horizon, rng)?)),
        AlgoSpec::Adaptive { variant, r_eps, project } => {
            let problem = oracle.problem_arc();
            let ball = if *project { problem.ball() } else { None };
            if *project && ball.is_none() {
                return Err(Error::arg("projection requested but the problem has no ball domain"));
            }
            Ok(AlgoOutput::from_trajectory(run_adaptive(*variant, oracle, x0, *r_eps, horizon, ball, rng)?))
        }
        AlgoSpec::Bounded { variant, d_hint } => {
            let problem = oracle.problem_arc();
            let ball = problem.ball().ok_or_else(|| Error::arg("bounded wrapper needs a ball domain"))?;
            Ok(AlgoOutput::from_trajectory(run_bounded_adaptive(*variant, oracle, x0, *d_hint, horizon, ball, rng)?))
        }
        AlgoSpec::Polyak { d_upper } => {
            let r = run_polyak_adaptive(oracle, x0, *d_upper, horizon)?;
            Ok(AlgoOutput::single(r.point, r.oracle_calls))
        }
        AlgoSpec::Ve { variant, r_eps, .. } => {
            let cfg = spec.ve_config(horizon)?.expect("VE spec");
            Ok(AlgoOutput::from_trajectory(run_ve_adaptive(*variant, oracle, x0, *r_eps, &cfg, rng)?))
        }
        AlgoSpec::Restarted { delta, hints } => {
            let r = restarted_sgd(oracle, x0, *delta, hints, horizon, rng)?;
            Ok(AlgoOutput::single(r.y_bar, r.oracle_calls))
        }
    }
}
