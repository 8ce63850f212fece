//! Executes the experiment matrix of a config file.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;

use super::algos::run_algo;
use super::baseline::{sgd_grid, tune_sgd_baseline, BaselineResult, ErrorMetric};
use super::budget::{polylog_budget, BudgetSetting};
use super::config::{AlgoChoice, EtaSpec, ExperimentConfig, ProblemSpec};
use super::lowerbound::{conflict_threshold, run_confusion_experiment, IotaRule};
use super::plot::loglog_svg;
use super::records::{write_runs, RunRecord};
use super::report::{fit_slopes, median_errors, record_error, ConfusionSummary, ConflictSummary, RatioEntry, ReportSummary};
use super::stats::median;
use crate::error::{Error, Result};
use crate::linalg;
use crate::optimizers::AdaptiveVariant;
use crate::rng::RngStream;

/// Largest horizon searched when locating the conflict threshold.
pub const CONFLICT_T_MAX: usize = 1 << 40;

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub records: Vec<RunRecord>,
    pub report: ReportSummary,
    /// Tuned SGD per horizon, when requested.
    pub baselines: BTreeMap<usize, BaselineResult>,
}

impl ExperimentConfig {
    pub fn metric(&self) -> ErrorMetric {
        if self.problem.is_nonconvex() {
            ErrorMetric::GradNormSq
        } else {
            ErrorMetric::FGap
        }
    }

    fn needs_baseline(&self) -> bool {
        self.experiment.baseline
            || (self.algo.eta == Some(EtaSpec::Tuned) && self.algo.algos.contains(&AlgoChoice::Sgd))
    }

    fn budget_setting(&self, choice: AlgoChoice) -> Option<BudgetSetting> {
        let bounded = match &self.problem {
            ProblemSpec::Quadratic { radius: Some(_), .. } => Some(true),
            ProblemSpec::AbsLoss { radius: Some(_), .. } => Some(false),
            _ => None,
        }?;
        match (choice, bounded) {
            (AlgoChoice::Adaptive(AdaptiveVariant::Dog), true) => Some(BudgetSetting::BoundedSmoothDog),
            (AlgoChoice::Adaptive(AdaptiveVariant::Dowg), true) => Some(BudgetSetting::BoundedSmoothDowg),
            (AlgoChoice::Adaptive(AdaptiveVariant::Dowg), false) => Some(BudgetSetting::BoundedNonsmoothDowg),
            _ => None,
        }
    }
}

/// Runs every `(algo, T, seed)` cell, in parallel, and assembles the records
/// in cell order. Cell randomness depends only on `(seed, algo, T)`.
pub fn execute_config(cfg: &ExperimentConfig) -> Result<RunOutcome> {
    let built = cfg.build_problem()?;
    let template = cfg.build_oracle(&built)?;
    let metric = cfg.metric();
    let problem_name = cfg.problem.name();
    let noise_label = cfg.noise.label();

    let mut baselines = BTreeMap::new();
    if cfg.needs_baseline() {
        let l = cfg.hints.l.ok_or_else(|| Error::Config("baseline tuning needs L hints".into()))?;
        let grid = sgd_grid(l.lo, l.hi)?;
        let mut horizons: Vec<usize> = cfg.experiment.t_grid.clone();
        horizons.sort_unstable();
        horizons.dedup();
        for t in horizons {
            let rng = RngStream::from_seed(0).derive_named("baseline").derive(t as u64);
            let factory = || Ok(template.fresh());
            let b = tune_sgd_baseline(factory, &built.x0, t, &grid, cfg.experiment.trials, metric, &rng)?;
            baselines.insert(t, b);
        }
    }

    let mut cells = Vec::new();
    for &choice in &cfg.algo.algos {
        for t in cfg.horizons(choice) {
            for &seed in &cfg.experiment.seeds {
                cells.push((choice, t, seed));
            }
        }
    }
    let per_cell: Vec<Vec<RunRecord>> = cells
        .par_iter()
        .map(|&(choice, t, seed)| -> Result<Vec<RunRecord>> {
            let spec = cfg.algo_spec(choice, baselines.get(&t).map(|b| b.eta_star))?;
            let mut oracle = template.fresh();
            let mut rng = RngStream::new(seed, 0).derive_named(choice.name()).derive(t as u64);
            let start = Instant::now();
            let out = run_algo(&spec, &mut oracle, &built.x0, t, &mut rng)?;
            let wall_ms = start.elapsed().as_millis() as u64;
            let p = oracle.problem();
            Ok(out
                .candidates
                .iter()
                .map(|(kind, x)| RunRecord {
                    run_id: format!("{}-T{t}-s{seed}", choice.name()),
                    algo: choice.name().to_string(),
                    problem: problem_name.to_string(),
                    noise: noise_label.clone(),
                    horizon: t,
                    seed,
                    candidate_kind: kind.clone(),
                    f_gap: p.gap(x).unwrap_or(f64::NAN),
                    grad_norm_sq: linalg::norm_sq(&p.grad(x)),
                    oracle_calls: out.oracle_calls,
                    wall_ms,
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    let records: Vec<RunRecord> = per_cell.into_iter().flatten().collect();

    let use_grad = metric == ErrorMetric::GradNormSq;
    let mut report = ReportSummary { slopes: fit_slopes(&records, use_grad), ..Default::default() };
    if cfg.experiment.baseline {
        report.ratios = ratios(cfg, &records, &baselines, use_grad)?;
    }
    if let (Some(fam), ProblemSpec::LowerBound { kind, .. }) = (&built.family, &cfg.problem) {
        let spec = cfg.algo_spec(cfg.algo.algos[0], None)?;
        let rng = RngStream::from_seed(0).derive_named("confusion");
        let conf = run_confusion_experiment(fam, &spec, cfg.experiment.trials, &rng)?;
        report.confusion = Some(ConfusionSummary::from(&conf));
        report.conflict = Some(ConflictSummary {
            kind: kind.as_str().to_string(),
            t_threshold: conflict_threshold(*kind, IotaRule::LnSqTPlus1, 1.0, CONFLICT_T_MAX)?,
            c: 1.0,
        });
    }
    Ok(RunOutcome { records, report, baselines })
}

/// Best error over the candidates of each run, keyed by `(algo, T, seed)`.
fn best_per_run(records: &[RunRecord], use_grad: bool) -> BTreeMap<(String, usize, u64), f64> {
    let mut out: BTreeMap<(String, usize, u64), f64> = BTreeMap::new();
    for r in records {
        let e = record_error(r, use_grad);
        let slot = out.entry((r.algo.clone(), r.horizon, r.seed)).or_insert(f64::INFINITY);
        if e < *slot {
            *slot = e;
        }
    }
    out
}

fn ratios(
    cfg: &ExperimentConfig,
    records: &[RunRecord],
    baselines: &BTreeMap<usize, BaselineResult>,
    use_grad: bool,
) -> Result<BTreeMap<String, RatioEntry>> {
    let built = cfg.build_problem()?;
    let truth = cfg.true_params(&built);
    let best = best_per_run(records, use_grad);
    let mut out = BTreeMap::new();
    for &choice in &cfg.algo.algos {
        let name = choice.name();
        let runs: Vec<(usize, f64)> =
            best.iter().filter(|((a, _, _), _)| a == name).map(|((_, t, _), e)| (*t, *e)).collect();
        let ratios: Vec<f64> = runs
            .iter()
            .filter_map(|(t, e)| baselines.get(t).map(|b| e / b.err_star))
            .filter(|r| r.is_finite())
            .collect();
        let Some(t_max) = runs.iter().map(|r| r.0).max() else { continue };
        let at_max: Vec<f64> = runs.iter().filter(|r| r.0 == t_max).map(|r| r.1).collect();
        let budget = cfg
            .budget_setting(choice)
            .and_then(|s| polylog_budget(s, &truth, &cfg.hints, t_max, cfg.experiment.delta).ok());
        out.insert(
            name.to_string(),
            RatioEntry {
                median_ratio: median(&ratios).unwrap_or(f64::NAN),
                t_max,
                median_err_at_t_max: median(&at_max).unwrap_or(f64::NAN),
                budget_at_t_max: budget,
            },
        );
    }
    Ok(out)
}

/// Writes `runs.csv`, `report.json` and, if enabled, `plots/err_vs_T.svg`.
pub fn write_outputs(cfg: &ExperimentConfig, outcome: &RunOutcome, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_runs(fs::File::create(dir.join("runs.csv"))?, &outcome.records)?;
    let json = serde_json::to_string_pretty(&outcome.report)?;
    fs::write(dir.join("report.json"), json + "\n")?;
    if cfg.experiment.plots {
        let use_grad = cfg.metric() == ErrorMetric::GradNormSq;
        let series: Vec<(String, Vec<(f64, f64)>)> = median_errors(&outcome.records, use_grad)
            .into_iter()
            .map(|(k, v)| (k, v.into_iter().map(|(t, e)| (t as f64, e)).collect()))
            .collect();
        let y = if use_grad { "median squared gradient norm" } else { "median f-gap" };
        fs::create_dir_all(dir.join("plots"))?;
        fs::write(dir.join("plots").join("err_vs_T.svg"), loglog_svg("error vs horizon", "T", y, &series))?;
    }
    Ok(())
}

/// Sanity checks on finished records; returns one message per violation.
pub fn check_records(records: &[RunRecord]) -> Vec<String> {
    let mut bad = Vec::new();
    for r in records {
        if r.f_gap < -1e-9 {
            bad.push(format!("{} {}: negative gap {}", r.run_id, r.candidate_kind, r.f_gap));
        }
        if !(r.grad_norm_sq >= 0.0) {
            bad.push(format!("{} {}: invalid gradient norm {}", r.run_id, r.candidate_kind, r.grad_norm_sq));
        }
    }
    bad
}

#[cfg(test)]
mod tests {
    use super::*;

    const SGD_ONLY: &str = "\
[problem]
name = quadratic
dim = 2
L = 1
x0 = 1

[noise]
kind = gaussian
sigma = 1

[algo]
algo = sgd
eta = 0.1

[experiment]
T_grid = 50
seeds = 3
";

    #[test]
    fn single_sgd_row_accounting() {
        let cfg = ExperimentConfig::parse(SGD_ONLY).unwrap();
        let out = execute_config(&cfg).unwrap();
        assert_eq!(out.records.len(), 3 * 3);
        assert!(check_records(&out.records).is_empty());
        assert!(out.records.iter().all(|r| r.oracle_calls == 50));
    }

    #[test]
    fn repeated_runs_match() {
        let cfg = ExperimentConfig::parse(&SGD_ONLY.replace("algo = sgd", "algo = sgd, dog\nr_eps = 0.01")).unwrap();
        let strip = |v: Vec<RunRecord>| v.into_iter().map(|mut r| {
            r.wall_ms = 0;
            r
        }).collect::<Vec<_>>();
        let a = strip(execute_config(&cfg).unwrap().records);
        let b = strip(execute_config(&cfg).unwrap().records);
        assert_eq!(format!("{a:?}"), format!("{b:?}"));
    }

    #[test]
    fn baseline_and_budget_in_report() {
        let text = "\
[problem]
name = quadratic
dim = 2
L = 1
radius = 1
x0 = 0.5

[noise]
kind = gaussian
sigma = 1

[algo]
algo = dog, sgd
eta = tuned
project = true

[hints]
D_lo = 0.02
D_hi = 2
L_lo = 1
L_hi = 1

[experiment]
T_grid = 100, 200, 400
seeds = 2
trials = 2
baseline = true
";
        let cfg = ExperimentConfig::parse(text).unwrap();
        let out = execute_config(&cfg).unwrap();
        assert_eq!(out.baselines.len(), 3);
        let dog = &out.report.ratios["dog"];
        assert!(dog.median_ratio.is_finite() && dog.median_ratio >= 0.0);
        assert!(dog.budget_at_t_max.is_some());
        assert!(out.report.ratios["sgd"].budget_at_t_max.is_none());
        assert!(out.report.slopes.contains_key("dog/best_prefix"));
    }

    #[test]
    fn lower_bound_config_fills_confusion() {
        let text = "[problem]\nname = lb-smooth\nsigma = 1\nT = 10\nu = 2\nv = 1\n[algo]\nalgo = sgd\neta = 0.01\n[experiment]\nT_grid = 10\nseeds = 1\ntrials = 200\n";
        let cfg = ExperimentConfig::parse(text).unwrap();
        let out = execute_config(&cfg).unwrap();
        let c = out.report.confusion.unwrap();
        assert_eq!(c.horizon, 10);
        assert!(out.report.conflict.unwrap().t_threshold.is_some());
    }
}
