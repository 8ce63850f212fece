//! `report.json` summary.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::lowerbound::ConfusionResult;
use super::records::RunRecord;
use super::stats::{fit_loglog_slope, median, SlopeFit};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioEntry {
    /// Median over horizons and seeds of `algo error / tuned SGD error`.
    pub median_ratio: f64,
    pub t_max: usize,
    pub median_err_at_t_max: f64,
    /// Reference bound at `t_max`, where the analysis supplies one.
    pub budget_at_t_max: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfusionSummary {
    #[serde(rename = "T")]
    pub horizon: usize,
    pub trials: usize,
    pub empirical_p: f64,
    pub closed_form_p: f64,
}

impl From<&ConfusionResult> for ConfusionSummary {
    fn from(r: &ConfusionResult) -> Self {
        Self { horizon: r.horizon, trials: r.trials, empirical_p: r.empirical_p, closed_form_p: r.closed_form_p }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConflictSummary {
    pub kind: String,
    #[serde(rename = "T_threshold")]
    pub t_threshold: Option<usize>,
    pub c: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportSummary {
    pub schema_version: u32,
    /// Keyed `algo/candidate`.
    pub slopes: BTreeMap<String, SlopeFit>,
    pub ratios: BTreeMap<String, RatioEntry>,
    pub confusion: Option<ConfusionSummary>,
    pub conflict: Option<ConflictSummary>,
}

impl Default for ReportSummary {
    fn default() -> Self {
        Self { schema_version: SCHEMA_VERSION, slopes: BTreeMap::new(), ratios: BTreeMap::new(), confusion: None, conflict: None }
    }
}

/// The error a record is scored by: the f-gap when known, else the
/// squared gradient norm.
pub fn record_error(r: &RunRecord, use_grad: bool) -> f64 {
    if use_grad || r.f_gap.is_nan() {
        r.grad_norm_sq
    } else {
        r.f_gap
    }
}

/// Median error per `(algo/candidate, T)`.
pub fn median_errors(records: &[RunRecord], use_grad: bool) -> BTreeMap<String, Vec<(usize, f64)>> {
    let mut groups: BTreeMap<String, BTreeMap<usize, Vec<f64>>> = BTreeMap::new();
    for r in records {
        groups
            .entry(format!("{}/{}", r.algo, r.candidate_kind))
            .or_default()
            .entry(r.horizon)
            .or_default()
            .push(record_error(r, use_grad));
    }
    groups
        .into_iter()
        .map(|(k, by_t)| (k, by_t.into_iter().map(|(t, v)| (t, median(&v).expect("nonempty group"))).collect()))
        .collect()
}

/// Log-log slopes of median error against `T` for every series with at
/// least three horizons and positive medians.
pub fn fit_slopes(records: &[RunRecord], use_grad: bool) -> BTreeMap<String, SlopeFit> {
    median_errors(records, use_grad)
        .into_iter()
        .filter_map(|(k, pts)| {
            let pairs: Vec<(f64, f64)> = pts.iter().map(|&(t, e)| (t as f64, e)).collect();
            fit_loglog_slope(&pairs).ok().map(|f| (k, f))
        })
        .collect()
}
