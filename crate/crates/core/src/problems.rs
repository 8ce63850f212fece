//! Objective families.
//!
//! Every [`Problem`] is immutable after construction and evaluation is pure,
//! so problems can be shared freely across worker threads.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hints::{Hints, Interval};
use crate::linalg;

/// Euclidean ball used as the feasible set in the bounded setting. The
/// diameter `2 * radius` plays the role of `D`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::param(format!("ball radius must be positive, got {radius}")));
        }
        Ok(Self { center, radius })
    }

    pub fn diameter(&self) -> f64 {
        2.0 * self.radius
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        linalg::dist(x, &self.center) <= self.radius * (1.0 + 1e-12)
    }

    /// Euclidean projection, in place.
    pub fn project(&self, x: &mut [f64]) {
        let d = linalg::dist(x, &self.center);
        if d > self.radius {
            let s = self.radius / d;
            for (xi, ci) in x.iter_mut().zip(&self.center) {
                *xi = ci + s * (*xi - ci);
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Domain {
    Unbounded,
    Ball(Ball),
}

/// One-dimensional piecewise quadratic
/// `c/2 (x - m)^2 + sum_i a_i |x - k_i| + s x + o`.
///
/// The lower-bound families and the absolute loss are all of this form. The
/// derivative of `|x - k|` at `x = k` is taken to be 0.
#[derive(Clone, Debug, PartialEq)]
pub struct Univariate {
    pub curvature: f64,
    pub center: f64,
    pub abs_terms: Vec<(f64, f64)>,
    pub slope: f64,
    pub offset: f64,
}

fn sgn0(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

impl Univariate {
    pub fn quadratic(curvature: f64, center: f64) -> Self {
        Self { curvature, center, abs_terms: Vec::new(), slope: 0.0, offset: 0.0 }
    }

    pub fn with_abs(mut self, coef: f64, kink: f64) -> Self {
        self.abs_terms.push((coef, kink));
        self
    }

    pub fn with_slope(mut self, slope: f64) -> Self {
        self.slope = slope;
        self
    }

    pub fn with_offset(mut self, offset: f64) -> Self {
        self.offset = offset;
        self
    }

    pub fn value(&self, x: f64) -> f64 {
        let d = x - self.center;
        let mut v = 0.5 * self.curvature * d * d + self.slope * x + self.offset;
        for &(a, k) in &self.abs_terms {
            v += a * (x - k).abs();
        }
        v
    }

    pub fn deriv(&self, x: f64) -> f64 {
        let mut g = self.curvature * (x - self.center) + self.slope;
        for &(a, k) in &self.abs_terms {
            g += a * sgn0(x - k);
        }
        g
    }

    /// Exact global minimizer, or `None` when unbounded below.
    pub fn minimize(&self) -> Option<(f64, f64)> {
        if self.curvature < 0.0 {
            return None;
        }
        let mut kinks: Vec<f64> = self.abs_terms.iter().map(|&(_, k)| k).collect();
        kinks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        kinks.dedup();

        // slope of the non-quadratic part on the open interval (lo, hi)
        let linear_slope = |probe: f64| -> f64 {
            self.slope + self.abs_terms.iter().map(|&(a, k)| a * sgn0(probe - k)).sum::<f64>()
        };

        let mut candidates: Vec<f64> = kinks.clone();
        let n = kinks.len();
        for i in 0..=n {
            let lo = if i == 0 { f64::NEG_INFINITY } else { kinks[i - 1] };
            let hi = if i == n { f64::INFINITY } else { kinks[i] };
            let probe = match (lo.is_finite(), hi.is_finite()) {
                (true, true) => 0.5 * (lo + hi),
                (true, false) => lo + 1.0,
                (false, true) => hi - 1.0,
                (false, false) => 0.0,
            };
            let s = linear_slope(probe);
            if self.curvature > 0.0 {
                let stat = self.center - s / self.curvature;
                candidates.push(stat.clamp(lo, hi));
            } else {
                if (!lo.is_finite() && s > 0.0) || (!hi.is_finite() && s < 0.0) {
                    return None;
                }
                if n == 0 {
                    candidates.push(0.0);
                }
            }
        }
        candidates
            .into_iter()
            .filter(|c| c.is_finite())
            .map(|c| (c, self.value(c)))
            .fold(None, |best: Option<(f64, f64)>, (c, v)| match best {
                Some((_, bv)) if bv <= v => best,
                _ => Some((c, v)),
            })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Form {
    /// `(L/2) ||x - center||^2`
    Quadratic { l: f64, center: Vec<f64> },
    /// `sum_i x_i^2/2 + a sin^2(x_i)`
    SinBump { a: f64 },
    Univariate(Univariate),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Problem {
    pub name: String,
    pub dim: usize,
    pub form: Form,
    pub f_star: Option<f64>,
    pub x_star: Option<Vec<f64>>,
    pub smooth_l: Option<f64>,
    pub lipschitz_g: Option<f64>,
    pub domain: Domain,
}

impl Problem {
    pub fn value(&self, x: &[f64]) -> f64 {
        match &self.form {
            Form::Quadratic { l, center } => 0.5 * l * linalg::dist_sq(x, center),
            Form::SinBump { a } => x.iter().map(|&xi| 0.5 * xi * xi + a * xi.sin().powi(2)).sum(),
            Form::Univariate(u) => u.value(x[0]),
        }
    }

    pub fn grad_into(&self, x: &[f64], out: &mut [f64]) {
        match &self.form {
            Form::Quadratic { l, center } => {
                for ((o, xi), ci) in out.iter_mut().zip(x).zip(center) {
                    *o = l * (xi - ci);
                }
            }
            Form::SinBump { a } => {
                for (o, &xi) in out.iter_mut().zip(x) {
                    *o = xi + a * (2.0 * xi).sin();
                }
            }
            Form::Univariate(u) => out[0] = u.deriv(x[0]),
        }
    }

    pub fn grad(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.dim];
        self.grad_into(x, &mut g);
        g
    }

    /// `f(x) - f*`, when `f*` is known.
    pub fn gap(&self, x: &[f64]) -> Option<f64> {
        self.f_star.map(|fs| self.value(x) - fs)
    }

    /// `D* = ||x0 - x*||`, when `x*` is known.
    pub fn initial_distance(&self, x0: &[f64]) -> Option<f64> {
        self.x_star.as_ref().map(|xs| linalg::dist(x0, xs))
    }

    pub fn ball(&self) -> Option<&Ball> {
        match &self.domain {
            Domain::Ball(b) => Some(b),
            Domain::Unbounded => None,
        }
    }

    pub fn with_domain(mut self, ball: Ball) -> Result<Self> {
        if ball.center.len() != self.dim {
            return Err(Error::param("ball center dimension does not match problem"));
        }
        // Restricting to the ball moves the minimizer when it lies outside.
        // For isotropic quadratics and convex 1-D members the constrained
        // minimizer is the projection; otherwise it is left unknown.
        if let Some(xs) = self.x_star.as_ref().filter(|xs| !ball.contains(xs)) {
            let convex = match &self.form {
                Form::Quadratic { .. } => true,
                Form::Univariate(u) => u.curvature >= 0.0 && u.abs_terms.iter().all(|t| t.0 >= 0.0),
                Form::SinBump { .. } => false,
            };
            if convex {
                let mut p = xs.clone();
                ball.project(&mut p);
                self.f_star = Some(self.value(&p));
                self.x_star = Some(p);
            } else {
                self.f_star = None;
                self.x_star = None;
            }
        }
        self.domain = Domain::Ball(ball);
        Ok(self)
    }

    fn univariate(name: &str, u: Univariate) -> Self {
        let (x_star, f_star) = match u.minimize() {
            Some((x, f)) => (Some(vec![x]), Some(f)),
            None => (None, None),
        };
        let smooth_l = u.abs_terms.is_empty().then_some(u.curvature.abs());
        let lipschitz_g = (u.curvature == 0.0)
            .then(|| u.slope.abs() + u.abs_terms.iter().map(|(a, _)| a.abs()).sum::<f64>());
        Problem {
            name: name.to_string(),
            dim: 1,
            form: Form::Univariate(u),
            f_star,
            x_star,
            smooth_l,
            lipschitz_g,
            domain: Domain::Unbounded,
        }
    }

    fn renamed(&self, name: &str) -> Self {
        let mut p = self.clone();
        p.name = name.to_string();
        p
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// `(L/2) ||x - center||^2` in `dim` dimensions.
pub fn make_quadratic(l: f64, center: &[f64], dim: usize) -> Result<Problem> {
    if !(l > 0.0 && l.is_finite()) {
        return Err(Error::param(format!("quadratic needs L > 0, got {l}")));
    }
    if dim == 0 {
        return Err(Error::param("dimension must be at least 1"));
    }
    let center = if center.is_empty() { vec![0.0; dim] } else { center.to_vec() };
    if center.len() != dim {
        return Err(Error::param(format!("center has {} coordinates, expected {dim}", center.len())));
    }
    Ok(Problem {
        name: "quadratic".into(),
        dim,
        form: Form::Quadratic { l, center: center.clone() },
        f_star: Some(0.0),
        x_star: Some(center),
        smooth_l: Some(l),
        lipschitz_g: None,
        domain: Domain::Unbounded,
    })
}

/// `G |x - center|` on the real line.
pub fn make_abs_loss(g: f64, center: f64) -> Result<Problem> {
    if !(g > 0.0 && g.is_finite()) {
        return Err(Error::param(format!("absolute loss needs G > 0, got {g}")));
    }
    let mut p = Problem::univariate("absloss", Univariate::quadratic(0.0, 0.0).with_abs(g, center));
    p.smooth_l = None;
    Ok(p)
}

/// `sum_i x_i^2/2 + a sin^2(x_i)`; smooth with `L = 1 + 2a`, nonconvex for `a > 1/2`.
pub fn make_sinbump(a: f64, dim: usize) -> Result<Problem> {
    if !(a >= 0.0 && a.is_finite()) {
        return Err(Error::param(format!("sinbump needs a >= 0, got {a}")));
    }
    if dim == 0 {
        return Err(Error::param("dimension must be at least 1"));
    }
    Ok(Problem {
        name: "sinbump".into(),
        dim,
        form: Form::SinBump { a },
        f_star: Some(0.0),
        x_star: Some(vec![0.0; dim]),
        smooth_l: Some(1.0 + 2.0 * a),
        lipschitz_g: None,
        domain: Domain::Unbounded,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    Smooth,
    Nonsmooth,
    Nonconvex,
}

impl FamilyKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "smooth" => Ok(Self::Smooth),
            "nonsmooth" => Ok(Self::Nonsmooth),
            "nonconvex" => Ok(Self::Nonconvex),
            _ => Err(Error::param(format!("unknown lower-bound kind {s:?}"))),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Smooth => "smooth",
            Self::Nonsmooth => "nonsmooth",
            Self::Nonconvex => "nonconvex",
        }
    }
}

/// Pair of one-dimensional objectives `f`, `h` each written as a
/// `(1/T, 1 - 1/T)` mixture of two branches, with the second branches equal.
#[derive(Clone, Debug)]
pub struct LowerBoundFamily {
    pub kind: FamilyKind,
    pub sigma: f64,
    pub horizon: usize,
    pub u: f64,
    pub v: f64,
    pub g: Option<f64>,
    /// `sigma * T` for the smooth and nonconvex kinds.
    pub l_derived: Option<f64>,
    pub f: Problem,
    pub f1: Problem,
    pub f2: Problem,
    pub h: Problem,
    pub h1: Problem,
    pub h2: Problem,
    pub hint_table: Hints,
}

impl LowerBoundFamily {
    /// Probability of drawing branch 1.
    pub fn branch_prob(&self) -> f64 {
        1.0 / self.horizon as f64
    }

    /// Common initialization `x0 = v`.
    pub fn x0(&self) -> Vec<f64> {
        vec![self.v]
    }
}

/// Builds the two-function adversarial family of the given kind.
///
/// Smooth and nonconvex kinds use `L = sigma * T` and
/// `f = (L/2) x^2`, `h = (L/2)(x - u)^2`; the nonsmooth kind uses
/// `f = G|x|`, `h = G|x - u|`. In every kind the branch-2 members `f2` and
/// `h2` are the same function, so the two oracles agree whenever branch 2 is
/// drawn.
pub fn make_lb_family(
    kind: FamilyKind,
    sigma: f64,
    horizon: usize,
    u: f64,
    v: f64,
    g: Option<f64>,
) -> Result<LowerBoundFamily> {
    if horizon < 2 {
        return Err(Error::param(format!("lower-bound horizon must be >= 2, got {horizon}")));
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::param(format!("sigma must be positive, got {sigma}")));
    }
    if !(u.is_finite() && v.is_finite()) {
        return Err(Error::param("u and v must be finite"));
    }
    let t = horizon as f64;
    let d_lo = v.abs().min((u - v).abs());
    let d_hi = v.abs().max((u - v).abs());

    match kind {
        FamilyKind::Smooth | FamilyKind::Nonconvex => {
            if g.is_some() {
                return Err(Error::param("G is only meaningful for the nonsmooth family"));
            }
            let l = sigma * t;
            let f = Univariate::quadratic(l, 0.0);
            let f1 = Univariate::quadratic(l, 0.0).with_slope(sigma);
            let f2 = Univariate::quadratic(l, 0.0).with_slope(-sigma / (t - 1.0));
            let h = Univariate::quadratic(l, u);
            let h1 = Univariate::quadratic(l, u)
                .with_slope(sigma - (t - 1.0) * l * u)
                .with_offset(0.5 * (t - 1.0) * l * u * u);

            let f2 = Problem::univariate("f2", f2);
            let sig = Interval::new(sigma, sigma + t * l * u.abs())?;
            let hint_table = match kind {
                FamilyKind::Smooth => Hints {
                    d: Some(Interval::new(d_lo, d_hi)?),
                    sigma_or_r: Some(sig),
                    l: Some(Interval::exact(l)?),
                    ..Default::default()
                },
                _ => Hints {
                    delta: Some(Interval::new(0.5 * l * d_lo, 0.5 * l * d_hi)?),
                    sigma_or_r: Some(sig),
                    l: Some(Interval::exact(l)?),
                    ..Default::default()
                },
            };
            Ok(LowerBoundFamily {
                kind,
                sigma,
                horizon,
                u,
                v,
                g: None,
                l_derived: Some(l),
                f: Problem::univariate("f", f),
                f1: Problem::univariate("f1", f1),
                h2: f2.renamed("h2"),
                f2,
                h: Problem::univariate("h", h),
                h1: Problem::univariate("h1", h1),
                hint_table,
            })
        }
        FamilyKind::Nonsmooth => {
            let g = g.ok_or_else(|| Error::param("nonsmooth family requires G"))?;
            if !(g > 0.0 && g.is_finite()) {
                return Err(Error::param(format!("G must be positive, got {g}")));
            }
            let base = || Univariate::quadratic(0.0, 0.0);
            let f = base().with_abs(g, 0.0);
            let f1 = base().with_abs(g, 0.0).with_slope(g);
            let f2 = base().with_abs(g, 0.0).with_slope(-g / (t - 1.0));
            let h = base().with_abs(g, u);
            // Coefficient T on |x - u| so that (1/T) h1 + (1 - 1/T) h2 = h.
            let h1 = base().with_abs(t * g, u).with_abs(-(t - 1.0) * g, 0.0).with_slope(g);

            let f2 = Problem::univariate("f2", f2);
            let mut h1 = Problem::univariate("h1", h1);
            h1.smooth_l = None;
            h1.lipschitz_g = None;
            let hint_table = Hints {
                d: Some(Interval::new(d_lo, d_hi)?),
                sigma_or_r: Some(Interval::new(g, 2.0 * t * g)?),
                g: Some(Interval::exact(g)?),
                ..Default::default()
            };
            Ok(LowerBoundFamily {
                kind,
                sigma,
                horizon,
                u,
                v,
                g: Some(g),
                l_derived: None,
                f: Problem::univariate("f", f),
                f1: Problem::univariate("f1", f1),
                h2: f2.renamed("h2"),
                f2,
                h: Problem::univariate("h", h),
                h1,
                hint_table,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn domain_moves_outside_minimizer() {
        let ball = Ball::new(vec![0.0, 0.0], 1.0).unwrap();
        let p = make_quadratic(2.0, &[3.0, 0.0], 2).unwrap().with_domain(ball.clone()).unwrap();
        assert_eq!(p.x_star, Some(vec![1.0, 0.0]));
        assert_eq!(p.f_star, Some(4.0));
        let inside = make_quadratic(2.0, &[0.5, 0.0], 2).unwrap().with_domain(ball).unwrap();
        assert_eq!(inside.f_star, Some(0.0));
        let abs = make_abs_loss(1.0, -4.0).unwrap().with_domain(Ball::new(vec![0.0], 2.0).unwrap()).unwrap();
        assert_eq!((abs.x_star, abs.f_star), (Some(vec![-2.0]), Some(2.0)));
        let sb = make_sinbump(1.0, 1).unwrap().with_domain(Ball::new(vec![5.0], 1.0).unwrap()).unwrap();
        assert_eq!(sb.f_star, None);
    }

    #[test]
    fn quadratic_examples() {
        let p = make_quadratic(2.0, &[0.0], 1).unwrap();
        assert_eq!(p.value(&[3.0]), 9.0);
        assert_eq!(p.grad(&[3.0]), vec![6.0]);
        let q = make_quadratic(1.0, &[1.0, 1.0], 2).unwrap();
        assert_eq!(q.value(&[1.0, 1.0]), 0.0);
        let sigma = 1.0;
        let t = 100.0;
        let r = make_quadratic(sigma * t, &[0.0], 1).unwrap();
        assert_eq!(r.smooth_l, Some(100.0));
        assert_eq!(r.f_star, Some(0.0));
        assert_eq!(r.lipschitz_g, None);
    }

    #[test]
    fn quadratic_rejects_bad_params() {
        assert!(matches!(make_quadratic(0.0, &[], 1), Err(Error::InvalidParameter(_))));
        assert!(matches!(make_quadratic(-1.0, &[], 1), Err(Error::InvalidParameter(_))));
        assert!(matches!(make_quadratic(1.0, &[], 0), Err(Error::InvalidParameter(_))));
        assert!(make_quadratic(1.0, &[0.0, 0.0], 3).is_err());
    }

    #[test]
    fn abs_loss_examples() {
        let p = make_abs_loss(3.0, 0.0).unwrap();
        assert_eq!(p.value(&[-2.0]), 6.0);
        assert_eq!(p.grad(&[-2.0]), vec![-3.0]);
        assert_eq!(p.value(&[0.0]), 0.0);
        assert_eq!(p.grad(&[0.0]), vec![0.0]);
        assert_eq!(p.lipschitz_g, Some(3.0));
        assert_eq!(p.smooth_l, None);
        assert_eq!(p.x_star, Some(vec![0.0]));

        let t = 4.0;
        let q = make_abs_loss(1.0, 1.0 - 1.0 / t).unwrap();
        assert_eq!(q.x_star, Some(vec![0.75]));
        assert!(make_abs_loss(0.0, 0.0).is_err());
    }

    #[test]
    fn sinbump_examples() {
        let p0 = make_sinbump(0.0, 3).unwrap();
        let q = make_quadratic(1.0, &[], 3).unwrap();
        let x = [0.3, -1.2, 2.5];
        assert_eq!(p0.value(&x), q.value(&x));
        assert_eq!(p0.grad(&x), q.grad(&x));

        let p = make_sinbump(1.0, 1).unwrap();
        let h = std::f64::consts::FRAC_PI_2;
        assert!((p.value(&[h]) - (h * h / 2.0 + 1.0)).abs() < 1e-15);
        assert!((p.grad(&[h])[0] - h).abs() < 1e-15);
        assert_eq!(p.smooth_l, Some(3.0));
    }

    #[test]
    fn sinbump_curvature_bound_matches_grid_oracle() {
        // max over a dense grid of |f''(x)| = |1 + 2a cos(2x)|
        for &a in &[0.0, 0.25, 1.0, 3.0] {
            let n = 200_000;
            let max = (0..=n)
                .map(|i| -4.0 + 8.0 * i as f64 / n as f64)
                .map(|x| (1.0 + 2.0 * a * (2.0 * x).cos()).abs())
                .fold(0.0, f64::max);
            let p = make_sinbump(a, 1).unwrap();
            assert!((p.smooth_l.unwrap() - max).abs() < 1e-6, "a={a}: {max}");
        }
    }

    #[test]
    fn smooth_family_example() {
        let v = 100.0;
        let fam = make_lb_family(FamilyKind::Smooth, 1.0, 10, v + 1.0, v, None).unwrap();
        assert_eq!(fam.l_derived, Some(10.0));
        for &x in &[-3.0, 0.0, 0.5, 7.0] {
            assert!((fam.f1.value(&[x]) - (5.0 * x * x + x)).abs() < 1e-12);
        }
        assert_eq!(fam.f2.value(&[0.7]), fam.h2.value(&[0.7]));
        let t = 10.0;
        let mix = fam.f1.grad(&[1.0])[0] / t + (1.0 - 1.0 / t) * fam.f2.grad(&[1.0])[0];
        assert!((mix - 10.0).abs() < 1e-12);
    }

    #[test]
    fn smooth_hint_table() {
        let t = 10usize;
        let v = (t * t) as f64;
        let u = v + 1.0;
        let fam = make_lb_family(FamilyKind::Smooth, 2.0, t, u, v, None).unwrap();
        let l = 20.0;
        let h = &fam.hint_table;
        assert_eq!(h.l, Some(Interval { lo: l, hi: l }));
        assert_eq!(h.d, Some(Interval { lo: 1.0, hi: v }));
        assert_eq!(h.sigma_or_r, Some(Interval { lo: 2.0, hi: 2.0 + 10.0 * l * u }));
        let nc = make_lb_family(FamilyKind::Nonconvex, 2.0, t, u, v, None).unwrap();
        assert_eq!(nc.hint_table.delta, Some(Interval { lo: 0.5 * l, hi: 0.5 * l * v }));
        assert_eq!(nc.hint_table.d, None);
    }

    #[test]
    fn family_errors() {
        assert!(make_lb_family(FamilyKind::Smooth, 1.0, 1, 2.0, 1.0, None).is_err());
        assert!(make_lb_family(FamilyKind::Nonsmooth, 1.0, 5, 0.8, 1.0, None).is_err());
        assert!(make_lb_family(FamilyKind::Smooth, 1.0, 5, 2.0, 1.0, Some(1.0)).is_err());
        assert!(make_lb_family(FamilyKind::Smooth, 0.0, 5, 2.0, 1.0, None).is_err());
    }

    #[test]
    fn members_report_minimizers() {
        let fam = make_lb_family(FamilyKind::Smooth, 1.0, 10, 3.0, 2.0, None).unwrap();
        assert_eq!(fam.f.x_star, Some(vec![0.0]));
        assert_eq!(fam.h.x_star, Some(vec![3.0]));
        // f1 = 5x^2 + x, minimized at -0.1 with value -0.05
        let (x1, v1) = (fam.f1.x_star.clone().unwrap()[0], fam.f1.f_star.unwrap());
        assert!((x1 + 0.1).abs() < 1e-15 && (v1 + 0.05).abs() < 1e-15);

        let ns = make_lb_family(FamilyKind::Nonsmooth, 1.0, 4, 0.75, 1.0, Some(2.0)).unwrap();
        assert_eq!(ns.h.x_star, Some(vec![0.75]));
        assert_eq!(ns.f2.x_star, Some(vec![0.0]));
        assert_eq!(ns.h1.lipschitz_g, None);
    }

    #[test]
    fn univariate_unbounded_below() {
        let u = Univariate::quadratic(0.0, 0.0).with_abs(1.0, 0.0).with_slope(2.0);
        assert!(u.minimize().is_none());
    }

    #[test]
    fn projection_onto_ball() {
        let b = Ball::new(vec![0.0, 0.0], 0.5).unwrap();
        let mut x = vec![3.0, 4.0];
        b.project(&mut x);
        assert!((x[0] - 0.3).abs() < 1e-15 && (x[1] - 0.4).abs() < 1e-15);
        let mut y = vec![0.1, 0.1];
        b.project(&mut y);
        assert_eq!(y, vec![0.1, 0.1]);
    }
}
