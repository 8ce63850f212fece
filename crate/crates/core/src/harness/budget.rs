//! Reference error bounds of the bounded-domain DoG/DoWG analysis.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::theta_t_delta;
use crate::hints::{Hints, TrueParams};
use crate::log_plus;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BudgetSetting {
    BoundedSmoothDog,
    BoundedSmoothDowg,
    BoundedNonsmoothDowg,
}

impl BudgetSetting {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::BoundedSmoothDog => "bounded_smooth_dog",
            Self::BoundedSmoothDowg => "bounded_smooth_dowg",
            Self::BoundedNonsmoothDowg => "bounded_nonsmooth_dowg",
        }
    }
}

fn need(v: Option<f64>, name: &str) -> Result<f64> {
    v.ok_or_else(|| Error::param(format!("budget needs the true {name}")))
}

/// Full bound value with `theta = ln(60 ln(6T)/delta)`:
///
/// * smooth DoG: `64 ln^2(2D/D_lo) L D^2/T + 320 ln^2(2D/D_lo) theta sigma D/sqrt(T)`
/// * smooth DoWG: `700 theta log_+(D_hi/D_lo) (L D^2/T + sigma D/sqrt(T))`
/// * nonsmooth DoWG: `748 D G theta / sqrt(T) log_+(D_hi/D_lo)`
///
/// `D`, `L`, `sigma`, `G` are the true values; hints enter only through the
/// logarithms.
pub fn polylog_budget(setting: BudgetSetting, truth: &TrueParams, hints: &Hints, horizon: usize, delta: f64) -> Result<f64> {
    if horizon == 0 || !(delta > 0.0 && delta < 1.0) {
        return Err(Error::param("need T >= 1 and delta in (0, 1)"));
    }
    let d_hint = hints.require_d()?;
    let d = need(truth.d, "D")?;
    let t = horizon as f64;
    let theta = theta_t_delta(horizon, delta);
    let lp = log_plus(d_hint.ratio());
    Ok(match setting {
        BudgetSetting::BoundedSmoothDog => {
            let (l, s) = (need(truth.l, "L")?, need(truth.sigma, "sigma")?);
            let lg = (2.0 * d / d_hint.lo).ln().powi(2);
            64.0 * lg * l * d * d / t + 320.0 * lg * theta * s * d / t.sqrt()
        }
        BudgetSetting::BoundedSmoothDowg => {
            let (l, s) = (need(truth.l, "L")?, need(truth.sigma, "sigma")?);
            700.0 * theta * lp * (l * d * d / t + s * d / t.sqrt())
        }
        BudgetSetting::BoundedNonsmoothDowg => {
            let g = need(truth.g, "G")?;
            748.0 * d * g * theta / t.sqrt() * lp
        }
    })
}

/// Gap bounds satisfied by `x0` itself when the horizon is too short for
/// the bounded wrapper to move: `2GD/sqrt(T) sqrt(log_+(D_hi/D_lo))` for
/// `G`-Lipschitz and `2LD^2/T log_+(D_hi/D_lo)` for `L`-smooth objectives.
pub fn short_horizon_fallback(truth: &TrueParams, ratio: f64, horizon: usize) -> (Option<f64>, Option<f64>) {
    let t = horizon as f64;
    let lp = log_plus(ratio);
    let lip = match (truth.g, truth.d) {
        (Some(g), Some(d)) => Some(2.0 * g * d / t.sqrt() * lp.sqrt()),
        _ => None,
    };
    let smooth = match (truth.l, truth.d) {
        (Some(l), Some(d)) => Some(2.0 * l * d * d / t * lp),
        _ => None,
    };
    (lip, smooth)
}
