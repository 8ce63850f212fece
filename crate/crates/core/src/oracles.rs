//! Stochastic first-order oracles.
//!
//! An [`Oracle`] pairs a [`Problem`] with a [`NoiseModel`] and counts calls.
//! Oracles carry a mutable counter, so use one instance per worker; draws
//! come from the caller's [`RngStream`].

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg;
use crate::problems::{LowerBoundFamily, Problem};
use crate::rng::RngStream;

/// Direction `phi(x)` of the two-point sign noise `+-sigma * phi(x)`.
#[derive(Clone, Debug, PartialEq)]
pub enum Direction {
    /// A fixed unit vector (normalized at construction).
    Fixed(Vec<f64>),
    /// A fresh uniformly random unit vector per call.
    UniformSphere,
}

impl Direction {
    pub fn fixed(v: Vec<f64>) -> Result<Self> {
        let n = linalg::norm(&v);
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::param("direction must be a nonzero finite vector"));
        }
        Ok(Direction::Fixed(v.into_iter().map(|x| x / n).collect()))
    }

    pub fn first_axis(dim: usize) -> Self {
        let mut v = vec![0.0; dim];
        v[0] = 1.0;
        Direction::Fixed(v)
    }
}

#[derive(Clone, Debug)]
pub enum NoiseKind {
    None,
    /// `N(0, (sigma^2/d) I)`, so `E||n||^2 = sigma^2`.
    GaussianSpherical,
    /// `+-sigma * phi(x)` with equal probability; `||n|| = sigma` always.
    BernoulliSign(Direction),
    /// Two-branch mixture: branch 1 with probability `branch_prob`, else branch 2.
    /// Values and gradients are those of the drawn branch.
    LbMixture { branch_prob: f64, branches: Arc<(Problem, Problem)> },
}

impl NoiseKind {
    pub fn name(&self) -> &'static str {
        match self {
            NoiseKind::None => "none",
            NoiseKind::GaussianSpherical => "gaussian",
            NoiseKind::BernoulliSign(_) => "bernoulli",
            NoiseKind::LbMixture { .. } => "lb-mixture",
        }
    }
}

#[derive(Clone, Debug)]
pub struct NoiseModel {
    pub kind: NoiseKind,
    /// `sqrt(E||n||^2)`.
    pub sigma: f64,
    /// Sub-gaussian norm modulus `R`.
    pub r_modulus: f64,
}

impl NoiseModel {
    pub fn none() -> Self {
        Self { kind: NoiseKind::None, sigma: 0.0, r_modulus: 0.0 }
    }

    pub fn gaussian(sigma: f64) -> Result<Self> {
        check_sigma(sigma)?;
        Ok(Self { kind: NoiseKind::GaussianSpherical, sigma, r_modulus: sigma })
    }

    pub fn bernoulli(sigma: f64, direction: Direction) -> Result<Self> {
        check_sigma(sigma)?;
        Ok(Self { kind: NoiseKind::BernoulliSign(direction), sigma, r_modulus: sigma })
    }

    pub fn with_r_modulus(mut self, r: f64) -> Self {
        self.r_modulus = r;
        self
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }
}

fn check_sigma(sigma: f64) -> Result<()> {
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::param(format!("noise sigma must be nonnegative, got {sigma}")));
    }
    Ok(())
}

/// Noise on the returned function value.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum ValueNoise {
    #[default]
    Exact,
    Gaussian(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleSample {
    pub value_est: f64,
    pub grad_est: Vec<f64>,
    /// Mixture branch (1 or 2) for mixture oracles.
    pub branch: Option<u8>,
}

/// Which side of a lower-bound family an oracle serves.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    F,
    H,
}

#[derive(Clone, Debug)]
pub struct Oracle {
    problem: Arc<Problem>,
    noise: NoiseModel,
    value_noise: ValueNoise,
    call_count: u64,
    branch_stream: Option<Arc<Vec<u8>>>,
}

impl Oracle {
    pub fn new(problem: impl Into<Arc<Problem>>, noise: NoiseModel) -> Result<Self> {
        let problem = problem.into();
        if let NoiseKind::BernoulliSign(Direction::Fixed(v)) = &noise.kind {
            if v.len() != problem.dim {
                return Err(Error::param("noise direction dimension does not match problem"));
            }
        }
        Ok(Self { problem, noise, value_noise: ValueNoise::Exact, call_count: 0, branch_stream: None })
    }

    /// Noise-free oracle returning `{f(x), grad f(x)}`.
    pub fn deterministic(problem: impl Into<Arc<Problem>>) -> Self {
        Self::new(problem, NoiseModel::none()).expect("noise-free oracle is always valid")
    }

    /// Branch-mixture oracle for one side of a lower-bound family.
    pub fn mixture(family: &LowerBoundFamily, side: Side) -> Self {
        let (mean, b1, b2) = match side {
            Side::F => (&family.f, &family.f1, &family.f2),
            Side::H => (&family.h, &family.h1, &family.h2),
        };
        let scale = family.g.unwrap_or(family.sigma);
        let noise = NoiseModel {
            kind: NoiseKind::LbMixture {
                branch_prob: family.branch_prob(),
                branches: Arc::new((b1.clone(), b2.clone())),
            },
            sigma: scale,
            r_modulus: scale,
        };
        Self::new(mean.clone(), noise).expect("family members are one-dimensional")
    }

    pub fn with_value_noise(mut self, vn: ValueNoise) -> Self {
        self.value_noise = vn;
        self
    }

    /// Supplies a pre-drawn branch sequence; call `k` uses entry `k`. Calls
    /// past the end fall back to fresh draws.
    pub fn with_branch_stream(mut self, stream: Arc<Vec<u8>>) -> Self {
        self.branch_stream = Some(stream);
        self
    }

    pub fn problem(&self) -> &Problem {
        &self.problem
    }

    pub fn problem_arc(&self) -> Arc<Problem> {
        Arc::clone(&self.problem)
    }

    pub fn noise(&self) -> &NoiseModel {
        &self.noise
    }

    pub fn dim(&self) -> usize {
        self.problem.dim
    }

    pub fn call_count(&self) -> u64 {
        self.call_count
    }

    /// Fresh copy with the counter reset (and no branch stream).
    pub fn fresh(&self) -> Self {
        Self { call_count: 0, branch_stream: None, ..self.clone() }
    }

    /// Writes a gradient estimate into `grad` and returns the value estimate
    /// and the mixture branch, if any.
    pub fn sample_into(&mut self, x: &[f64], rng: &mut RngStream, grad: &mut [f64]) -> Result<(f64, Option<u8>)> {
        let d = self.problem.dim;
        if x.len() != d || grad.len() != d {
            return Err(Error::arg(format!("point has dimension {}, oracle expects {d}", x.len())));
        }
        let call = self.call_count;
        self.call_count += 1;

        let (mut value, branch) = match &self.noise.kind {
            NoiseKind::None => {
                self.problem.grad_into(x, grad);
                (self.problem.value(x), None)
            }
            NoiseKind::GaussianSpherical => {
                self.problem.grad_into(x, grad);
                let s = self.noise.sigma / (d as f64).sqrt();
                for gi in grad.iter_mut() {
                    *gi += s * rng.standard_normal();
                }
                (self.problem.value(x), None)
            }
            NoiseKind::BernoulliSign(dir) => {
                self.problem.grad_into(x, grad);
                let sign = rng.sign() * self.noise.sigma;
                match dir {
                    Direction::Fixed(phi) => linalg::axpy(sign, phi, grad),
                    Direction::UniformSphere => {
                        let mut phi: Vec<f64> = (0..d).map(|_| rng.standard_normal()).collect();
                        let n = linalg::norm(&phi);
                        linalg::scale(1.0 / n, &mut phi);
                        linalg::axpy(sign, &phi, grad);
                    }
                }
                (self.problem.value(x), None)
            }
            NoiseKind::LbMixture { branch_prob, branches } => {
                // one uniform per call whether or not a coupled stream is attached
                let draw = rng.uniform();
                let branch = match self.branch_stream.as_deref().and_then(|s| s.get(call as usize)) {
                    Some(&b) => b,
                    None => {
                        if draw < *branch_prob {
                            1
                        } else {
                            2
                        }
                    }
                };
                let member = if branch == 1 { &branches.0 } else { &branches.1 };
                member.grad_into(x, grad);
                (member.value(x), Some(branch))
            }
        };
        if let ValueNoise::Gaussian(s) = self.value_noise {
            value += s * rng.standard_normal();
        }
        Ok((value, branch))
    }

    pub fn sample(&mut self, x: &[f64], rng: &mut RngStream) -> Result<OracleSample> {
        let mut grad = vec![0.0; self.problem.dim];
        let (value_est, branch) = self.sample_into(x, rng, &mut grad)?;
        Ok(OracleSample { value_est, grad_est: grad, branch })
    }
}

/// I.i.d. branch sequence of length `len` with `P(branch = 1) = branch_prob`.
///
/// Attaching the same sequence to the `f` and `h` oracles of one family
/// couples them: they return identical samples on every branch-2 call.
pub fn make_coupled_branch_stream(rng: &mut RngStream, len: usize, branch_prob: f64) -> Vec<u8> {
    (0..len).map(|_| if rng.uniform() < branch_prob { 1 } else { 2 }).collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseStats {
    pub mean_norm_sq: f64,
    pub max_norm: f64,
    /// `sqrt(mean_norm_sq) / max_norm`; 1 when the noise is identically zero.
    pub ksnr_hat: f64,
}

/// Empirical noise statistics at `x`, isolating `n = g - grad f(x)`.
pub fn estimate_noise_stats(oracle: &mut Oracle, x: &[f64], m: usize, rng: &mut RngStream) -> Result<NoiseStats> {
    if m < 2 {
        return Err(Error::param(format!("need at least 2 samples, got {m}")));
    }
    let truth = oracle.problem().grad(x);
    let mut g = vec![0.0; truth.len()];
    let mut sum_sq = 0.0;
    let mut max_norm: f64 = 0.0;
    for _ in 0..m {
        oracle.sample_into(x, rng, &mut g)?;
        let n2 = linalg::dist_sq(&g, &truth);
        sum_sq += n2;
        max_norm = max_norm.max(n2.sqrt());
    }
    let mean_norm_sq = sum_sq / m as f64;
    let ksnr_hat = if max_norm > 0.0 { (mean_norm_sq.sqrt() / max_norm).min(1.0) } else { 1.0 };
    Ok(NoiseStats { mean_norm_sq, max_norm, ksnr_hat })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{make_lb_family, make_quadratic, FamilyKind};

    fn quad1() -> Problem {
        make_quadratic(1.0, &[0.0], 1).unwrap()
    }

    #[test]
    fn noiseless_sample_is_exact() {
        let p = make_quadratic(2.0, &[1.0, -1.0], 2).unwrap();
        let mut o = Oracle::deterministic(p.clone());
        let mut rng = RngStream::from_seed(0);
        let s = o.sample(&[0.5, 0.5], &mut rng).unwrap();
        assert_eq!(s.value_est, p.value(&[0.5, 0.5]));
        assert_eq!(s.grad_est, p.grad(&[0.5, 0.5]));
        assert_eq!(s.branch, None);
        assert_eq!(o.call_count(), 1);
    }

    #[test]
    fn dimension_mismatch_is_error() {
        let mut o = Oracle::deterministic(quad1());
        let mut rng = RngStream::from_seed(0);
        assert!(matches!(o.sample(&[1.0, 2.0], &mut rng), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn bernoulli_two_points_balanced() {
        let mut o = Oracle::new(quad1(), NoiseModel::bernoulli(2.0, Direction::first_axis(1)).unwrap()).unwrap();
        let mut rng = RngStream::from_seed(3);
        let x = [1.5];
        let n = 10_000;
        let mut plus = 0;
        for _ in 0..n {
            let g = o.sample(&x, &mut rng).unwrap().grad_est[0];
            if g == 1.5 + 2.0 {
                plus += 1;
            } else {
                assert_eq!(g, 1.5 - 2.0);
            }
        }
        let freq = plus as f64 / n as f64;
        assert!((freq - 0.5).abs() <= 0.02, "freq {freq}");
        assert_eq!(o.call_count(), n as u64);
    }

    #[test]
    fn mixture_noise_bounded_by_sigma() {
        let fam = make_lb_family(FamilyKind::Smooth, 1.5, 10, 3.0, 2.0, None).unwrap();
        let mut o = Oracle::mixture(&fam, Side::F);
        let mut rng = RngStream::from_seed(9);
        let mut seen = [false; 2];
        for i in 0..2000 {
            let x = [-5.0 + 0.005 * i as f64];
            let s = o.sample(&x, &mut rng).unwrap();
            let dev = (s.grad_est[0] - fam.f.grad(&x)[0]).abs();
            match s.branch {
                Some(1) => {
                    assert!((dev - 1.5).abs() < 1e-9);
                    seen[0] = true;
                }
                Some(2) => {
                    assert!((dev - 1.5 / 9.0).abs() < 1e-9);
                    seen[1] = true;
                }
                other => panic!("unexpected branch {other:?}"),
            }
            assert!(dev <= 1.5 + 1e-9);
        }
        assert!(seen[0] && seen[1]);
    }

    #[test]
    fn coupled_stream_examples() {
        let mut a = RngStream::new(5, 1);
        let mut b = RngStream::new(5, 1);
        assert_eq!(make_coupled_branch_stream(&mut a, 50, 0.02), make_coupled_branch_stream(&mut b, 50, 0.02));
        let mut r = RngStream::from_seed(1);
        assert!(make_coupled_branch_stream(&mut r, 1000, 0.0).iter().all(|&b| b == 2));
    }

    #[test]
    fn coupled_stream_drives_branches() {
        let fam = make_lb_family(FamilyKind::Smooth, 1.0, 4, 3.0, 2.0, None).unwrap();
        let stream = Arc::new(vec![1, 2, 2, 1]);
        let mut o = Oracle::mixture(&fam, Side::H).with_branch_stream(stream.clone());
        let mut rng = RngStream::from_seed(0);
        let got: Vec<u8> = (0..4).map(|_| o.sample(&[0.0], &mut rng).unwrap().branch.unwrap()).collect();
        assert_eq!(got, *stream);
        assert_eq!(rng.counter(), 8, "one uniform per call");
    }

    #[test]
    fn noise_stats_examples() {
        let mut rng = RngStream::from_seed(2);
        let mut o = Oracle::new(quad1(), NoiseModel::bernoulli(0.7, Direction::first_axis(1)).unwrap()).unwrap();
        let s = estimate_noise_stats(&mut o, &[0.3], 100, &mut rng).unwrap();
        assert!((s.ksnr_hat - 1.0).abs() < 1e-12);

        let mut o = Oracle::deterministic(quad1());
        let s = estimate_noise_stats(&mut o, &[0.3], 10, &mut rng).unwrap();
        assert_eq!(s.mean_norm_sq, 0.0);

        let p = make_quadratic(1.0, &[], 100).unwrap();
        let mut o = Oracle::new(p, NoiseModel::gaussian(1.0).unwrap()).unwrap();
        let x = vec![0.1; 100];
        let s = estimate_noise_stats(&mut o, &x, 10_000, &mut rng).unwrap();
        assert!((s.mean_norm_sq - 1.0).abs() <= 0.05, "{}", s.mean_norm_sq);
        assert!(s.ksnr_hat > 0.0 && s.ksnr_hat <= 1.0);

        assert!(estimate_noise_stats(&mut o, &x, 1, &mut rng).is_err());
    }

    #[test]
    fn value_noise_is_optional() {
        let mut o = Oracle::deterministic(quad1()).with_value_noise(ValueNoise::Gaussian(1.0));
        let mut rng = RngStream::from_seed(4);
        let s = o.sample(&[2.0], &mut rng).unwrap();
        assert_ne!(s.value_est, 2.0);
        assert_eq!(s.grad_est, vec![2.0]);
    }
}
