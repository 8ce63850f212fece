use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use tunefree::harness::report::{fit_slopes, median_errors, ConfusionSummary, ConflictSummary, ReportSummary};
use tunefree::harness::{
    check_records, conflict_threshold, execute_config, lb_conflict_check, read_runs, run_confusion_experiment,
    sgd_grid, tune_sgd_baseline, write_outputs, AlgoSpec, ExperimentConfig, IotaRule, RunOutcome,
};
use tunefree::optimizers::AdaptiveVariant;
use tunefree::problems::{make_lb_family, FamilyKind};
use tunefree::rng::RngStream;
use tunefree::Error;

const EXIT_CONFIG: u8 = 2;
const EXIT_ASSERT: u8 = 3;
const CONFLICT_T_MAX: usize = 1 << 40;

#[derive(Parser)]
#[command(name = "tunefree", version, about = "Tuning-free stochastic optimization experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the experiment matrix and write runs.csv and report.json.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Exit with status 3 if any sanity check on the results fails.
        #[arg(long)]
        assert: bool,
    },
    /// Run the experiment matrix and print median errors per horizon.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        assert: bool,
    },
    /// Tune constant-stepsize SGD on the grid implied by the L hints.
    TuneBaseline {
        #[arg(long)]
        config: PathBuf,
    },
    /// Confusion and conflict experiments on an adversarial family.
    Lowerbound {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long = "T")]
        horizon: usize,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = AlgoArg::Sgd)]
        algo: AlgoArg,
        /// SGD stepsize.
        #[arg(long, default_value_t = 0.01)]
        eta: f64,
        /// Constant in the conflict bounds.
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        #[arg(long)]
        assert: bool,
    },
    /// Recompute slopes from an existing runs.csv.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        grad: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Smooth,
    Nonsmooth,
    Nonconvex,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    Sgd,
    Dog,
    Dowg,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.cmd) {
        Ok(failures) if failures.is_empty() => ExitCode::SUCCESS,
        Ok(failures) => {
            for f in &failures {
                eprintln!("check failed: {f}");
            }
            ExitCode::from(EXIT_ASSERT)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            let config = e.chain().any(|c| c.downcast_ref::<Error>().is_some_and(Error::is_config));
            ExitCode::from(if config { EXIT_CONFIG } else { 1 })
        }
    }
}

fn load(path: &PathBuf) -> anyhow::Result<ExperimentConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(ExperimentConfig::parse(&text)?)
}

/// Returns the list of failed checks; only populated when `--assert` is set.
fn dispatch(cmd: Cmd) -> anyhow::Result<Vec<String>> {
    match cmd {
        Cmd::Run { config, out, assert } => {
            let cfg = load(&config)?;
            let outcome = execute_config(&cfg)?;
            write_outputs(&cfg, &outcome, &out)?;
            println!("wrote {} rows to {}", outcome.records.len(), out.join("runs.csv").display());
            Ok(if assert { outcome_checks(&outcome) } else { Vec::new() })
        }
        Cmd::Sweep { config, assert } => {
            let cfg = load(&config)?;
            let outcome = execute_config(&cfg)?;
            let use_grad = cfg.metric() == tunefree::harness::ErrorMetric::GradNormSq;
            println!("{:<28} {:>10} {:>14}", "series", "T", "median_err");
            for (series, pts) in median_errors(&outcome.records, use_grad) {
                for (t, e) in pts {
                    println!("{series:<28} {t:>10} {e:>14.6e}");
                }
            }
            for (k, s) in &outcome.report.slopes {
                println!("slope {k}: {:.3} +/- {:.3}", s.slope, s.ci95);
            }
            Ok(if assert { outcome_checks(&outcome) } else { Vec::new() })
        }
        Cmd::TuneBaseline { config } => {
            let cfg = load(&config)?;
            let built = cfg.build_problem()?;
            let template = cfg.build_oracle(&built)?;
            let l = cfg.hints.l.context("tune-baseline needs L_lo and L_hi in [hints]").map_err(|e| {
                anyhow::Error::new(Error::Config(e.to_string()))
            })?;
            let grid = sgd_grid(l.lo, l.hi)?;
            println!("{:>10} {:>14} {:>14}", "T", "eta_star", "err_star");
            for &t in &cfg.experiment.t_grid {
                let rng = RngStream::from_seed(0).derive_named("baseline").derive(t as u64);
                let b = tune_sgd_baseline(
                    || Ok(template.fresh()),
                    &built.x0,
                    t,
                    &grid,
                    cfg.experiment.trials,
                    cfg.metric(),
                    &rng,
                )?;
                println!("{t:>10} {:>14.6e} {:>14.6e}", b.eta_star, b.err_star);
            }
            Ok(Vec::new())
        }
        Cmd::Lowerbound { kind, horizon, trials, seed, algo, eta, c, assert } => {
            let kind = match kind {
                KindArg::Smooth => FamilyKind::Smooth,
                KindArg::Nonsmooth => FamilyKind::Nonsmooth,
                KindArg::Nonconvex => FamilyKind::Nonconvex,
            };
            let g = (kind == FamilyKind::Nonsmooth).then_some(1.0);
            let fam = make_lb_family(kind, 1.0, horizon, 2.0, 1.0, g)?;
            let spec = match algo {
                AlgoArg::Sgd => AlgoSpec::Sgd { eta },
                AlgoArg::Dog => AlgoSpec::Adaptive { variant: AdaptiveVariant::Dog, r_eps: 1e-3, project: false },
                AlgoArg::Dowg => AlgoSpec::Adaptive { variant: AdaptiveVariant::Dowg, r_eps: 1e-3, project: false },
            };
            let conf = run_confusion_experiment(&fam, &spec, trials, &RngStream::from_seed(seed))?;
            let rule = IotaRule::LnSqTPlus1;
            let check = lb_conflict_check(kind, horizon, rule.eval(horizon), c)?;
            let summary = ReportSummary {
                confusion: Some(ConfusionSummary::from(&conf)),
                conflict: Some(ConflictSummary {
                    kind: kind.as_str().to_string(),
                    t_threshold: conflict_threshold(kind, rule, c, CONFLICT_T_MAX)?,
                    c,
                }),
                ..Default::default()
            };
            println!("{}", serde_json::to_string_pretty(&summary)?);
            println!("conflict at T={horizon}: {} (lower {:.6e}, upper {:.6e})", check.conflict, check.lower, check.upper);
            let mut failures = Vec::new();
            if assert {
                if (conf.empirical_p - conf.closed_form_p).abs() > 3.0 * conf.std_err.max(1e-12) {
                    failures.push(format!(
                        "empirical p {} is more than 3 standard errors from {}",
                        conf.empirical_p, conf.closed_form_p
                    ));
                }
                if !conf.coupled_trajectories_identical {
                    failures.push("coupled trajectories diverged on an all-branch-2 trial".into());
                }
            }
            Ok(failures)
        }
        Cmd::Report { input, grad } => {
            let file = fs::File::open(&input).with_context(|| format!("opening {}", input.display()))?;
            let records = read_runs(file)?;
            let summary = ReportSummary { slopes: fit_slopes(&records, grad), ..Default::default() };
            println!("{}", serde_json::to_string_pretty(&summary)?);
            Ok(Vec::new())
        }
    }
}

fn outcome_checks(outcome: &RunOutcome) -> Vec<String> {
    let mut failures = check_records(&outcome.records);
    for (algo, r) in &outcome.report.ratios {
        if !(r.median_ratio.is_finite() && r.median_ratio >= 0.0) {
            failures.push(format!("{algo}: ratio {} is not a finite nonnegative number", r.median_ratio));
        }
    }
    if let Some(c) = &outcome.report.confusion {
        let se = (c.closed_form_p * (1.0 - c.closed_form_p) / c.trials as f64).sqrt();
        if (c.empirical_p - c.closed_form_p).abs() > 3.0 * se {
            failures.push(format!("confusion p {} vs closed form {}", c.empirical_p, c.closed_form_p));
        }
    }
    failures
}
