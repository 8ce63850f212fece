//! Typed experiment description read from an INI file.
//!
//! Every key is checked against the section's whitelist; unknown sections
//! and keys are errors. Optional keys have the defaults listed next to them
//! in the README.

use std::path::Path;

use super::algos::AlgoSpec;
use super::ini::{parse_ini, IniEntry, IniSection};
use crate::error::{Error, Result};
use crate::estimation::VeVariant;
use crate::hints::{Hints, Interval, TrueParams};
use crate::nonconvex::NonconvexHints;
use crate::optimizers::AdaptiveVariant;
use crate::oracles::{Direction, NoiseKind, NoiseModel, Oracle, Side};
use crate::problems::{make_abs_loss, make_lb_family, make_quadratic, make_sinbump, Ball, FamilyKind, LowerBoundFamily, Problem};

const SECTIONS: &[(&str, &[&str])] = &[
    ("problem", &["name", "dim", "L", "G", "a", "center", "radius", "x0", "sigma", "T", "u", "v", "side"]),
    ("noise", &["kind", "sigma", "direction", "branch_prob"]),
    ("algo", &["algo", "eta", "r_eps", "project", "d_upper"]),
    ("hints", &["D_lo", "D_hi", "sigma_lo", "sigma_hi", "L_lo", "L_hi", "G_lo", "G_hi", "Delta_lo", "Delta_hi"]),
    ("experiment", &["T_grid", "seeds", "trials", "delta", "baseline", "plots"]),
    ("ve", &["b", "theta", "beta", "c"]),
    ("restarted", &["delta", "T_total", "L_lo", "L_hi", "R_lo", "R_hi", "Delta_lo", "Delta_hi"]),
];

#[derive(Clone, Debug, PartialEq)]
pub enum ProblemSpec {
    Quadratic { dim: usize, l: f64, center: Vec<f64>, radius: Option<f64>, x0: Vec<f64> },
    AbsLoss { g: f64, center: f64, radius: Option<f64>, x0: f64 },
    SinBump { a: f64, dim: usize, x0: Vec<f64> },
    LowerBound { kind: FamilyKind, sigma: f64, horizon: usize, u: f64, v: f64, g: Option<f64>, side: Side },
}

impl ProblemSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ProblemSpec::Quadratic { .. } => "quadratic",
            ProblemSpec::AbsLoss { .. } => "absloss",
            ProblemSpec::SinBump { .. } => "sinbump",
            ProblemSpec::LowerBound { kind: FamilyKind::Smooth, .. } => "lb-smooth",
            ProblemSpec::LowerBound { kind: FamilyKind::Nonsmooth, .. } => "lb-nonsmooth",
            ProblemSpec::LowerBound { kind: FamilyKind::Nonconvex, .. } => "lb-nonconvex",
        }
    }

    /// Nonconvex problems are scored by gradient norm instead of gap.
    pub fn is_nonconvex(&self) -> bool {
        match self {
            ProblemSpec::SinBump { a, .. } => *a > 0.5,
            ProblemSpec::LowerBound { kind, .. } => *kind == FamilyKind::Nonconvex,
            _ => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum NoiseSpec {
    None,
    Gaussian { sigma: f64 },
    Bernoulli { sigma: f64, sphere: bool },
    /// Two-branch oracle of a lower-bound family.
    Mixture { branch_prob: Option<f64> },
}

impl NoiseSpec {
    pub fn label(&self) -> String {
        match self {
            NoiseSpec::None => "none".into(),
            NoiseSpec::Gaussian { sigma } => format!("gaussian:{sigma}"),
            NoiseSpec::Bernoulli { sigma, sphere } => {
                format!("bernoulli-{}:{sigma}", if *sphere { "sphere" } else { "axis" })
            }
            NoiseSpec::Mixture { .. } => "lb-mixture".into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EtaSpec {
    Fixed(f64),
    /// Grid-tuned per horizon.
    Tuned,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AlgoChoice {
    Sgd,
    Adaptive(AdaptiveVariant),
    Polyak,
    Ve(VeVariant),
    Restarted,
}

impl AlgoChoice {
    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "sgd" => AlgoChoice::Sgd,
            "dog" => AlgoChoice::Adaptive(AdaptiveVariant::Dog),
            "dowg" => AlgoChoice::Adaptive(AdaptiveVariant::Dowg),
            "tdog" => AlgoChoice::Adaptive(AdaptiveVariant::TDog),
            "tdowg" => AlgoChoice::Adaptive(AdaptiveVariant::TDowg),
            "polyak" => AlgoChoice::Polyak,
            "tdog-ve" => AlgoChoice::Ve(VeVariant::TDogVe),
            "tdowg-ve" => AlgoChoice::Ve(VeVariant::TDowgVe),
            "restarted-sgd" => AlgoChoice::Restarted,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            AlgoChoice::Sgd => "sgd",
            AlgoChoice::Adaptive(v) => v.name(),
            AlgoChoice::Polyak => "polyak",
            AlgoChoice::Ve(v) => v.name(),
            AlgoChoice::Restarted => "restarted-sgd",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlgoOptions {
    pub algos: Vec<AlgoChoice>,
    pub eta: Option<EtaSpec>,
    pub r_eps: Option<f64>,
    pub project: bool,
    pub d_upper: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSpec {
    pub t_grid: Vec<usize>,
    pub seeds: Vec<u64>,
    /// Trials per stepsize when tuning the SGD baseline (default 3).
    pub trials: usize,
    /// Confidence parameter (default 0.1).
    pub delta: f64,
    /// Tune SGD per horizon and report tuning-free ratios (default false).
    pub baseline: bool,
    /// Write `plots/err_vs_T.svg` (default false).
    pub plots: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VeSpec {
    pub b: usize,
    pub theta: f64,
    /// `None` means `beta = T`.
    pub beta: Option<f64>,
    pub c: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RestartedSpec {
    pub delta: Option<f64>,
    pub t_total: Option<usize>,
    pub hints: NonconvexHints,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub problem: ProblemSpec,
    pub noise: NoiseSpec,
    pub algo: AlgoOptions,
    pub hints: Hints,
    pub experiment: ExperimentSpec,
    pub ve: Option<VeSpec>,
    pub restarted: Option<RestartedSpec>,
}

/// A problem instance together with its starting point and, for the
/// lower-bound families, the family it was drawn from.
#[derive(Clone, Debug)]
pub struct BuiltProblem {
    pub problem: Problem,
    pub x0: Vec<f64>,
    pub family: Option<LowerBoundFamily>,
}

fn line_err(line: usize, msg: impl Into<String>) -> Error {
    Error::ConfigLine { line, msg: msg.into() }
}

struct Reader<'a> {
    section: Option<&'a IniSection>,
    name: &'static str,
}

impl<'a> Reader<'a> {
    fn entry(&self, key: &str) -> Option<&'a IniEntry> {
        self.section.and_then(|s| s.get(key))
    }

    fn missing(&self, key: &str) -> Error {
        match self.section {
            Some(s) => line_err(s.line, format!("[{}] is missing required key '{key}'", self.name)),
            None => Error::Config(format!("missing section [{}] (needs '{key}')", self.name)),
        }
    }

    fn str(&self, key: &str) -> Option<&'a str> {
        self.entry(key).map(|e| e.value.as_str())
    }

    fn req_str(&self, key: &str) -> Result<&'a str> {
        self.str(key).ok_or_else(|| self.missing(key))
    }

    fn f64(&self, key: &str) -> Result<Option<f64>> {
        self.entry(key).map(parse_f64).transpose()
    }

    fn req_f64(&self, key: &str) -> Result<f64> {
        self.f64(key)?.ok_or_else(|| self.missing(key))
    }

    fn usize(&self, key: &str) -> Result<Option<usize>> {
        self.entry(key).map(|e| parse_usize(e, &e.value)).transpose()
    }

    fn req_usize(&self, key: &str) -> Result<usize> {
        self.usize(key)?.ok_or_else(|| self.missing(key))
    }

    fn bool(&self, key: &str) -> Result<Option<bool>> {
        self.entry(key)
            .map(|e| match e.value.as_str() {
                "true" | "yes" | "1" => Ok(true),
                "false" | "no" | "0" => Ok(false),
                v => Err(line_err(e.line, format!("'{}' expects true/false, got '{v}'", e.key))),
            })
            .transpose()
    }

    fn list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        self.entry(key)
            .map(|e| split_list(&e.value).iter().map(|s| parse_num(e, s)).collect::<Result<Vec<_>>>())
            .transpose()
    }

    fn interval(&self, lo: &str, hi: &str) -> Result<Option<Interval>> {
        match (self.f64(lo)?, self.f64(hi)?) {
            (None, None) => Ok(None),
            (Some(a), Some(b)) => {
                let e = self.entry(lo).expect("present");
                Interval::new(a, b).map(Some).map_err(|err| line_err(e.line, err.to_string()))
            }
            (Some(_), None) => Err(self.missing(hi)),
            (None, Some(_)) => Err(self.missing(lo)),
        }
    }
}

fn split_list(v: &str) -> Vec<&str> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty()).collect()
}

fn parse_num(e: &IniEntry, s: &str) -> Result<f64> {
    let v: f64 = s.parse().map_err(|_| line_err(e.line, format!("'{}' expects a number, got '{s}'", e.key)))?;
    if !v.is_finite() {
        return Err(line_err(e.line, format!("'{}' must be finite", e.key)));
    }
    Ok(v)
}

fn parse_f64(e: &IniEntry) -> Result<f64> {
    parse_num(e, &e.value)
}

fn parse_usize(e: &IniEntry, s: &str) -> Result<usize> {
    let v = parse_num(e, s)?;
    if v < 0.0 || v.fract() != 0.0 || v > 1e15 {
        return Err(line_err(e.line, format!("'{}' expects a nonnegative integer, got '{s}'", e.key)));
    }
    Ok(v as usize)
}

fn parse_seeds(e: &IniEntry) -> Result<Vec<u64>> {
    let v = e.value.trim();
    if let Some((a, b)) = v.split_once("..") {
        let (a, b) = (parse_usize(e, a.trim())? as u64, parse_usize(e, b.trim())? as u64);
        if a >= b {
            return Err(line_err(e.line, "seed range must be nonempty"));
        }
        return Ok((a..b).collect());
    }
    let items = split_list(v);
    if items.len() == 1 {
        let n = parse_usize(e, items[0])? as u64;
        return Ok((0..n).collect());
    }
    items.iter().map(|s| parse_usize(e, s).map(|x| x as u64)).collect()
}

fn vector(e: Option<&IniEntry>, values: Option<Vec<f64>>, dim: usize, default: Option<f64>) -> Result<Option<Vec<f64>>> {
    match values {
        None => Ok(default.map(|d| vec![d; dim])),
        Some(v) if v.len() == 1 => Ok(Some(vec![v[0]; dim])),
        Some(v) if v.len() == dim => Ok(Some(v)),
        Some(v) => {
            let e = e.expect("value came from an entry");
            Err(line_err(e.line, format!("'{}' has {} entries, expected 1 or {dim}", e.key, v.len())))
        }
    }
}

impl ExperimentConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let ini = parse_ini(text)?;
        for s in &ini.sections {
            let allowed = SECTIONS
                .iter()
                .find(|(n, _)| *n == s.name)
                .ok_or_else(|| line_err(s.line, format!("unknown section [{}]", s.name)))?
                .1;
            for e in &s.entries {
                if !allowed.contains(&e.key.as_str()) {
                    return Err(line_err(e.line, format!("unknown key '{}' in [{}]", e.key, s.name)));
                }
            }
        }
        let rd = |name: &'static str| Reader { section: ini.section(name), name };

        let exp = rd("experiment");
        let algo = rd("algo");
        let algos = match algo.entry("algo") {
            Some(e) => split_list(&e.value)
                .into_iter()
                .map(|s| AlgoChoice::parse(s).ok_or_else(|| line_err(e.line, format!("unknown algo '{s}'"))))
                .collect::<Result<Vec<_>>>()?,
            None => Vec::new(),
        };
        let t_grid = match exp.entry("T_grid") {
            Some(e) => split_list(&e.value).into_iter().map(|s| parse_usize(e, s)).collect::<Result<Vec<_>>>()?,
            None => Vec::new(),
        };
        let seeds = exp.entry("seeds").map(parse_seeds).transpose()?.unwrap_or_default();
        if algos.is_empty() || t_grid.is_empty() || seeds.is_empty() {
            return Err(Error::NoExperiments);
        }
        if let Some(e) = exp.entry("T_grid") {
            if t_grid.contains(&0) {
                return Err(line_err(e.line, "horizons must be positive"));
            }
        }
        let delta = exp.f64("delta")?.unwrap_or(0.1);
        if !(delta > 0.0 && delta < 1.0) {
            return Err(line_err(exp.entry("delta").map_or(0, |e| e.line), "delta must lie in (0, 1)"));
        }
        let experiment = ExperimentSpec {
            t_grid,
            seeds,
            trials: exp.usize("trials")?.unwrap_or(3).max(1),
            delta,
            baseline: exp.bool("baseline")?.unwrap_or(false),
            plots: exp.bool("plots")?.unwrap_or(false),
        };

        let problem = Self::parse_problem(&rd("problem"))?;
        let noise = Self::parse_noise(&rd("noise"), &problem)?;

        let eta = match algo.entry("eta") {
            Some(e) if e.value == "tuned" => Some(EtaSpec::Tuned),
            Some(e) => {
                let v = parse_f64(e)?;
                if v <= 0.0 {
                    return Err(line_err(e.line, "eta must be positive"));
                }
                Some(EtaSpec::Fixed(v))
            }
            None => None,
        };
        let algo_opts = AlgoOptions {
            algos,
            eta,
            r_eps: algo.f64("r_eps")?,
            project: algo.bool("project")?.unwrap_or(false),
            d_upper: algo.f64("d_upper")?,
        };

        let h = rd("hints");
        let hints = Hints {
            d: h.interval("D_lo", "D_hi")?,
            sigma_or_r: h.interval("sigma_lo", "sigma_hi")?,
            l: h.interval("L_lo", "L_hi")?,
            g: h.interval("G_lo", "G_hi")?,
            delta: h.interval("Delta_lo", "Delta_hi")?,
        };

        let ve_r = rd("ve");
        let ve = match ve_r.section {
            None => None,
            Some(_) => Some(VeSpec {
                b: ve_r.req_usize("b")?,
                theta: ve_r.req_f64("theta")?,
                beta: match ve_r.entry("beta") {
                    Some(e) if e.value == "T" => None,
                    Some(e) => Some(parse_f64(e)?),
                    None => None,
                },
                c: ve_r.f64("c")?.unwrap_or(1.0),
            }),
        };

        let rs = rd("restarted");
        let restarted = match rs.section {
            None => None,
            Some(_) => {
                let need = |lo: &str, hi: &str| -> Result<Interval> { rs.interval(lo, hi)?.ok_or_else(|| rs.missing(lo)) };
                Some(RestartedSpec {
                    delta: rs.f64("delta")?,
                    t_total: rs.usize("T_total")?,
                    hints: NonconvexHints { l: need("L_lo", "L_hi")?, r: need("R_lo", "R_hi")?, delta: need("Delta_lo", "Delta_hi")? },
                })
            }
        };

        let cfg = ExperimentConfig { problem, noise, algo: algo_opts, hints, experiment, ve, restarted };
        cfg.check_algo_requirements(&algo)?;
        let built = cfg.build_problem()?;
        cfg.hints.validate_against(&cfg.true_params(&built))?;
        Ok(cfg)
    }

    fn parse_problem(p: &Reader) -> Result<ProblemSpec> {
        let name = p.req_str("name")?;
        let name_line = p.entry("name").map_or(0, |e| e.line);
        let allowed: &[&str] = match name {
            "quadratic" => &["name", "dim", "L", "center", "radius", "x0"],
            "absloss" => &["name", "G", "center", "radius", "x0"],
            "sinbump" => &["name", "a", "dim", "x0"],
            "lb-smooth" | "lb-nonconvex" => &["name", "sigma", "T", "u", "v", "side"],
            "lb-nonsmooth" => &["name", "sigma", "T", "u", "v", "G", "side"],
            other => return Err(line_err(name_line, format!("unknown problem '{other}'"))),
        };
        for e in p.section.map(|s| s.entries.as_slice()).unwrap_or(&[]) {
            if !allowed.contains(&e.key.as_str()) {
                return Err(line_err(e.line, format!("key '{}' does not apply to problem '{name}'", e.key)));
            }
        }
        let positive = |key: &str, v: f64| -> Result<f64> {
            if v > 0.0 {
                Ok(v)
            } else {
                Err(line_err(p.entry(key).map_or(name_line, |e| e.line), format!("'{key}' must be positive")))
            }
        };
        Ok(match name {
            "quadratic" => {
                let dim = p.usize("dim")?.unwrap_or(1).max(1);
                ProblemSpec::Quadratic {
                    dim,
                    l: positive("L", p.req_f64("L")?)?,
                    center: vector(p.entry("center"), p.list("center")?, dim, Some(0.0))?.expect("default"),
                    radius: p.f64("radius")?.map(|r| positive("radius", r)).transpose()?,
                    x0: vector(p.entry("x0"), p.list("x0")?, dim, None)?.ok_or_else(|| p.missing("x0"))?,
                }
            }
            "absloss" => ProblemSpec::AbsLoss {
                g: positive("G", p.req_f64("G")?)?,
                center: p.f64("center")?.unwrap_or(0.0),
                radius: p.f64("radius")?.map(|r| positive("radius", r)).transpose()?,
                x0: p.req_f64("x0")?,
            },
            "sinbump" => {
                let dim = p.usize("dim")?.unwrap_or(1).max(1);
                ProblemSpec::SinBump {
                    a: p.req_f64("a")?,
                    dim,
                    x0: vector(p.entry("x0"), p.list("x0")?, dim, None)?.ok_or_else(|| p.missing("x0"))?,
                }
            }
            _ => {
                let kind = FamilyKind::parse(name.trim_start_matches("lb-"))?;
                let side = match p.str("side").unwrap_or("f") {
                    "f" => Side::F,
                    "h" => Side::H,
                    v => return Err(line_err(p.entry("side").map_or(0, |e| e.line), format!("side must be f or h, got '{v}'"))),
                };
                let horizon = p.req_usize("T")?;
                if horizon < 2 {
                    return Err(line_err(p.entry("T").map_or(0, |e| e.line), "family horizon T must be at least 2"));
                }
                ProblemSpec::LowerBound {
                    kind,
                    sigma: positive("sigma", p.req_f64("sigma")?)?,
                    horizon,
                    u: p.req_f64("u")?,
                    v: p.req_f64("v")?,
                    g: if kind == FamilyKind::Nonsmooth { Some(positive("G", p.req_f64("G")?)?) } else { None },
                    side,
                }
            }
        })
    }

    fn parse_noise(n: &Reader, problem: &ProblemSpec) -> Result<NoiseSpec> {
        let is_family = matches!(problem, ProblemSpec::LowerBound { .. });
        let kind = match n.section {
            None => return Ok(if is_family { NoiseSpec::Mixture { branch_prob: None } } else { NoiseSpec::None }),
            Some(_) => n.req_str("kind")?,
        };
        let kind_line = n.entry("kind").map_or(0, |e| e.line);
        let sigma = || -> Result<f64> {
            let s = n.req_f64("sigma")?;
            if s < 0.0 {
                return Err(line_err(n.entry("sigma").map_or(kind_line, |e| e.line), "sigma must be nonnegative"));
            }
            Ok(s)
        };
        let reject = |keys: &[&str]| -> Result<()> {
            for k in keys {
                if let Some(e) = n.entry(k) {
                    return Err(line_err(e.line, format!("key '{k}' does not apply to noise kind '{kind}'")));
                }
            }
            Ok(())
        };
        let spec = match kind {
            "none" => {
                reject(&["sigma", "direction", "branch_prob"])?;
                NoiseSpec::None
            }
            "gaussian" => {
                reject(&["direction", "branch_prob"])?;
                NoiseSpec::Gaussian { sigma: sigma()? }
            }
            "bernoulli" => {
                reject(&["branch_prob"])?;
                let sphere = match n.str("direction").unwrap_or("axis") {
                    "axis" => false,
                    "sphere" => true,
                    v => return Err(line_err(n.entry("direction").map_or(0, |e| e.line), format!("direction must be axis or sphere, got '{v}'"))),
                };
                NoiseSpec::Bernoulli { sigma: sigma()?, sphere }
            }
            "mixture" | "lb-mixture" => {
                reject(&["sigma", "direction"])?;
                let bp = n.f64("branch_prob")?;
                if let Some(p) = bp {
                    if !(p > 0.0 && p < 1.0) {
                        return Err(line_err(n.entry("branch_prob").map_or(0, |e| e.line), "branch_prob must lie in (0, 1)"));
                    }
                }
                NoiseSpec::Mixture { branch_prob: bp }
            }
            other => return Err(line_err(kind_line, format!("unknown noise kind '{other}'"))),
        };
        if is_family != matches!(spec, NoiseSpec::Mixture { .. }) {
            return Err(line_err(kind_line, "lower-bound problems need noise kind 'mixture' and other problems must not use it"));
        }
        Ok(spec)
    }

    fn check_algo_requirements(&self, algo: &Reader) -> Result<()> {
        for choice in &self.algo.algos {
            match choice {
                AlgoChoice::Sgd => {
                    if self.algo.eta.is_none() {
                        return Err(algo.missing("eta"));
                    }
                    if self.algo.eta == Some(EtaSpec::Tuned) && self.hints.l.is_none() {
                        return Err(Error::Config("eta = tuned needs L_lo/L_hi hints".into()));
                    }
                }
                AlgoChoice::Adaptive(_) => {
                    if self.algo.r_eps.is_none() && self.hints.d.is_none() {
                        return Err(Error::Config(format!("{} needs r_eps or a D hint", choice.name())));
                    }
                }
                AlgoChoice::Ve(_) => {
                    if self.ve.is_none() {
                        return Err(Error::Config(format!("{} needs a [ve] section", choice.name())));
                    }
                    if self.algo.r_eps.is_none() && self.hints.d.is_none() {
                        return Err(Error::Config(format!("{} needs r_eps or a D hint", choice.name())));
                    }
                }
                AlgoChoice::Polyak => {
                    if self.algo.d_upper.is_none() && self.hints.d.is_none() {
                        return Err(Error::Config("polyak needs d_upper or a D hint".into()));
                    }
                    if self.noise != NoiseSpec::None {
                        return Err(Error::Config("polyak needs noise kind 'none'".into()));
                    }
                }
                AlgoChoice::Restarted => {
                    if self.restarted.is_none() {
                        return Err(Error::Config("restarted-sgd needs a [restarted] section".into()));
                    }
                }
            }
        }
        if self.experiment.baseline && self.hints.l.is_none() {
            return Err(Error::Config("baseline = true needs L_lo/L_hi hints".into()));
        }
        Ok(())
    }

    pub fn build_problem(&self) -> Result<BuiltProblem> {
        Ok(match &self.problem {
            ProblemSpec::Quadratic { dim, l, center, radius, x0 } => {
                let mut p = make_quadratic(*l, center, *dim)?;
                if let Some(r) = radius {
                    p = p.with_domain(Ball::new(vec![0.0; *dim], *r)?)?;
                }
                BuiltProblem { problem: p, x0: x0.clone(), family: None }
            }
            ProblemSpec::AbsLoss { g, center, radius, x0 } => {
                let mut p = make_abs_loss(*g, *center)?;
                if let Some(r) = radius {
                    p = p.with_domain(Ball::new(vec![0.0], *r)?)?;
                }
                BuiltProblem { problem: p, x0: vec![*x0], family: None }
            }
            ProblemSpec::SinBump { a, dim, x0 } => {
                BuiltProblem { problem: make_sinbump(*a, *dim)?, x0: x0.clone(), family: None }
            }
            ProblemSpec::LowerBound { kind, sigma, horizon, u, v, g, side } => {
                let fam = make_lb_family(*kind, *sigma, *horizon, *u, *v, *g)?;
                let p = match side {
                    Side::F => fam.f.clone(),
                    Side::H => fam.h.clone(),
                };
                BuiltProblem { problem: p, x0: fam.x0(), family: Some(fam) }
            }
        })
    }

    pub fn build_oracle(&self, built: &BuiltProblem) -> Result<Oracle> {
        let p = built.problem.clone();
        match &self.noise {
            NoiseSpec::None => Ok(Oracle::deterministic(p)),
            NoiseSpec::Gaussian { sigma } => Oracle::new(p, NoiseModel::gaussian(*sigma)?),
            NoiseSpec::Bernoulli { sigma, sphere } => {
                let dir = if *sphere { Direction::UniformSphere } else { Direction::first_axis(p.dim) };
                Oracle::new(p, NoiseModel::bernoulli(*sigma, dir)?)
            }
            NoiseSpec::Mixture { branch_prob } => {
                let fam = built.family.as_ref().ok_or_else(|| Error::Config("mixture noise needs a lower-bound problem".into()))?;
                let side = match &self.problem {
                    ProblemSpec::LowerBound { side, .. } => *side,
                    _ => Side::F,
                };
                let base = Oracle::mixture(fam, side);
                match branch_prob {
                    None => Ok(base),
                    Some(bp) => {
                        let mut noise = base.noise().clone();
                        if let NoiseKind::LbMixture { branches, .. } = noise.kind {
                            noise.kind = NoiseKind::LbMixture { branch_prob: *bp, branches };
                        }
                        Oracle::new(base.problem_arc(), noise)
                    }
                }
            }
        }
    }

    /// True parameters of the configured instance, where known. `D` is the
    /// domain diameter for ball-constrained problems and the initial
    /// distance to the minimizer otherwise.
    pub fn true_params(&self, built: &BuiltProblem) -> TrueParams {
        let p = &built.problem;
        let d = match p.ball() {
            Some(b) => Some(b.diameter()),
            None => p.initial_distance(&built.x0),
        };
        let sigma = match &self.noise {
            NoiseSpec::None => Some(0.0),
            NoiseSpec::Gaussian { sigma } | NoiseSpec::Bernoulli { sigma, .. } => Some(*sigma),
            NoiseSpec::Mixture { .. } => None,
        };
        TrueParams { d, sigma, l: p.smooth_l, g: p.lipschitz_g, delta: p.gap(&built.x0) }
    }

    fn r_eps(&self) -> f64 {
        self.algo.r_eps.or(self.hints.d.map(|d| d.lo)).expect("checked at load")
    }

    /// Concrete optimizer for one algorithm at one horizon. `tuned_eta`
    /// supplies the stepsize when SGD is configured with `eta = tuned`.
    pub fn algo_spec(&self, choice: AlgoChoice, tuned_eta: Option<f64>) -> Result<AlgoSpec> {
        Ok(match choice {
            AlgoChoice::Sgd => match self.algo.eta {
                Some(EtaSpec::Fixed(eta)) => AlgoSpec::Sgd { eta },
                Some(EtaSpec::Tuned) => AlgoSpec::Sgd {
                    eta: tuned_eta.ok_or_else(|| Error::Config("tuned SGD stepsize not available".into()))?,
                },
                None => return Err(Error::Config("sgd needs eta".into())),
            },
            AlgoChoice::Adaptive(variant) => match (self.algo.project, self.hints.d, self.algo.r_eps) {
                (true, Some(d_hint), None) => AlgoSpec::Bounded { variant, d_hint },
                _ => AlgoSpec::Adaptive { variant, r_eps: self.r_eps(), project: self.algo.project },
            },
            AlgoChoice::Polyak => AlgoSpec::Polyak {
                d_upper: self.algo.d_upper.or(self.hints.d.map(|d| d.hi)).expect("checked at load"),
            },
            AlgoChoice::Ve(variant) => {
                let ve = self.ve.expect("checked at load");
                AlgoSpec::Ve {
                    variant,
                    r_eps: self.r_eps(),
                    b: ve.b,
                    theta: ve.theta,
                    delta: self.experiment.delta,
                    beta: ve.beta,
                    c: ve.c,
                }
            }
            AlgoChoice::Restarted => {
                let rs = self.restarted.expect("checked at load");
                AlgoSpec::Restarted { delta: rs.delta.unwrap_or(self.experiment.delta), hints: rs.hints }
            }
        })
    }

    /// Horizons to run for `choice`: `T_total` for restarted SGD when given,
    /// the experiment grid otherwise.
    pub fn horizons(&self, choice: AlgoChoice) -> Vec<usize> {
        match (choice, self.restarted.and_then(|r| r.t_total)) {
            (AlgoChoice::Restarted, Some(t)) => vec![t],
            _ => self.experiment.t_grid.clone(),
        }
    }
}
