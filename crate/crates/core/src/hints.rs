//! Lower/upper bound pairs on problem parameters.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A closed interval `[lo, hi]` with `0 < lo <= hi`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo <= 0.0 || lo > hi {
            return Err(Error::param(format!("hint interval [{lo}, {hi}] must satisfy 0 < lo <= hi")));
        }
        Ok(Self { lo, hi })
    }

    /// Degenerate interval `[v, v]`.
    pub fn exact(v: f64) -> Result<Self> {
        Self::new(v, v)
    }

    pub fn ratio(&self) -> f64 {
        self.hi / self.lo
    }

    pub fn contains(&self, v: f64) -> bool {
        // relative slack for values derived through floating-point arithmetic
        let tol = 1e-12 * self.hi.abs().max(1.0);
        v >= self.lo - tol && v <= self.hi + tol
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Hints {
    /// Distance: domain diameter (bounded) or initial distance to the optimum.
    pub d: Option<Interval>,
    /// Noise bound (almost-sure bound or sub-gaussian modulus).
    pub sigma_or_r: Option<Interval>,
    pub l: Option<Interval>,
    pub g: Option<Interval>,
    /// Initial function gap `f(x0) - f*`.
    pub delta: Option<Interval>,
}

impl Hints {
    /// Checks that every known true value lies in its hint interval.
    pub fn validate_against(&self, truth: &TrueParams) -> Result<()> {
        let pairs = [
            ("D", self.d, truth.d),
            ("sigma", self.sigma_or_r, truth.sigma),
            ("L", self.l, truth.l),
            ("G", self.g, truth.g),
            ("Delta", self.delta, truth.delta),
        ];
        for (name, hint, value) in pairs {
            if let (Some(h), Some(v)) = (hint, value) {
                if !h.contains(v) {
                    return Err(Error::param(format!(
                        "true {name} = {v} lies outside hint [{}, {}]",
                        h.lo, h.hi
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn require_d(&self) -> Result<Interval> {
        self.d.ok_or_else(|| Error::param("missing D hint"))
    }
}

/// True problem parameters, where known. Used for validation and for
/// evaluating reference bounds; never consulted by the algorithms.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct TrueParams {
    pub d: Option<f64>,
    pub sigma: Option<f64>,
    pub l: Option<f64>,
    pub g: Option<f64>,
    pub delta: Option<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_inverted() {
        assert!(Interval::new(2.0, 1.0).is_err());
        assert!(Interval::new(0.0, 1.0).is_err());
        assert!(Interval::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn validation_flags_outside() {
        let h = Hints { l: Some(Interval::new(1.0, 2.0).unwrap()), ..Default::default() };
        assert!(h.validate_against(&TrueParams { l: Some(1.5), ..Default::default() }).is_ok());
        assert!(h.validate_against(&TrueParams { l: Some(3.0), ..Default::default() }).is_err());
    }
}
