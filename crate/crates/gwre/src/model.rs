//! Offspring probability-generating functions and finite random environments.
//!
//! Offspring counts start at 1 (no extinction term), so populations never
//! shrink and the survival probability per step is `p_1 > 0`. An environment
//! is a finite weighted family of such distributions sharing a common mean.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::fmt;

/// Tolerance for probability-vector normalization at construction.
const SUM_TOL: f64 = 1e-12;
/// Tolerance on the common-mean requirement across environment members.
const MEAN_TOL: f64 = 1e-12;

/// One offspring distribution: `probs[k]` is the probability of producing
/// `k + 1` offspring; the generating function is `p_1 z + p_2 z^2 + ...`.
#[derive(Debug, Clone, PartialEq)]
pub struct OffspringPgf {
    probs: Vec<f64>,
    mean: f64,
}

impl OffspringPgf {
    /// Builds a distribution from probabilities indexed from offspring
    /// count 1. The mean is derived, not supplied.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidPgf("no probabilities given".into()));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidPgf(
                "probabilities must be finite and non-negative".into(),
            ));
        }
        if probs[0] <= 0.0 {
            return Err(Error::InvalidPgf(
                "p_1 must be positive (per-step survival of a single line)".into(),
            ));
        }
        if *probs.last().unwrap() == 0.0 {
            return Err(Error::InvalidPgf(
                "trailing zero probability; trim the vector to its true degree".into(),
            ));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidPgf(format!(
                "probabilities sum to {sum:.17}, off by {:.3e}",
                sum - 1.0
            )));
        }
        let mean = probs
            .iter()
            .enumerate()
            .map(|(i, p)| (i + 1) as f64 * p)
            .sum();
        Ok(Self { probs, mean })
    }

    /// Builds from power-series coefficients starting at z^0. A nonzero
    /// constant term (positive extinction probability) is rejected: the
    /// model requires every individual to leave at least one offspring.
    pub fn from_power_series(coeffs: &[f64]) -> Result<Self> {
        match coeffs.first() {
            None => Err(Error::InvalidPgf("no coefficients given".into())),
            Some(&c0) if c0 != 0.0 => Err(Error::InvalidPgf(format!(
                "constant term {c0} not allowed: extinction probability must be zero"
            ))),
            _ => Self::new(coeffs[1..].to_vec()),
        }
    }

    /// Largest offspring count with positive probability.
    pub fn degree(&self) -> usize {
        self.probs.len()
    }

    /// Probability of producing exactly `k` offspring (1-based; 0 outside).
    pub fn prob(&self, k: usize) -> f64 {
        if k == 0 || k > self.probs.len() {
            0.0
        } else {
            self.probs[k - 1]
        }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Expected offspring per individual.
    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Evaluates the generating function by Horner's scheme.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &p in self.probs.iter().rev() {
            acc = acc * z + p;
        }
        acc * z
    }
}

/// A broken invariant found by [`Environment::validate`].
#[derive(Debug, Clone)]
pub struct Violation {
    /// Index of the offending member, if member-specific.
    pub member: Option<usize>,
    pub invariant: String,
    pub discrepancy: f64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.member {
            Some(i) => write!(
                f,
                "member {i}: {} (discrepancy {:.3e})",
                self.invariant, self.discrepancy
            ),
            None => write!(f, "{} (discrepancy {:.3e})", self.invariant, self.discrepancy),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvMember {
    pub weight: f64,
    pub pgf: OffspringPgf,
}

/// Finite weighted family of offspring distributions, one drawn per
/// generation. Construction rejects structural garbage only; numeric drift
/// (weight sums, mean mismatches, subcriticality) is reported by
/// [`Environment::validate`] so diagnostics can name what is wrong.
#[derive(Debug, Clone, PartialEq)]
pub struct Environment {
    members: Vec<EnvMember>,
    common_mean: f64,
}

impl Environment {
    pub fn new(members: Vec<(f64, OffspringPgf)>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidEnvironment("no members".into()));
        }
        if members.iter().any(|(w, _)| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidEnvironment(
                "weights must be finite and non-negative".into(),
            ));
        }
        let common_mean = members[0].1.mean();
        Ok(Self {
            members: members
                .into_iter()
                .map(|(weight, pgf)| EnvMember { weight, pgf })
                .collect(),
            common_mean,
        })
    }

    pub fn members(&self) -> &[EnvMember] {
        &self.members
    }

    /// The common per-step expectation E (nominal: taken from member 0;
    /// `validate` reports members that disagree).
    pub fn common_mean(&self) -> f64 {
        self.common_mean
    }

    pub fn max_degree(&self) -> usize {
        self.members
            .iter()
            .map(|m| m.pgf.degree())
            .max()
            .unwrap_or(0)
    }

    /// Diagnostic invariant check; returns an empty list iff the environment
    /// satisfies the model assumptions. Never fails.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let wsum: f64 = self.members.iter().map(|m| m.weight).sum();
        if (wsum - 1.0).abs() > SUM_TOL {
            out.push(Violation {
                member: None,
                invariant: format!("weights sum to {wsum:.17}, expected 1"),
                discrepancy: wsum - 1.0,
            });
        }
        for (i, m) in self.members.iter().enumerate() {
            let d = m.pgf.mean() - self.common_mean;
            if d.abs() > MEAN_TOL {
                out.push(Violation {
                    member: Some(i),
                    invariant: format!(
                        "mean {:.17} differs from common mean {:.17}",
                        m.pgf.mean(),
                        self.common_mean
                    ),
                    discrepancy: d,
                });
            }
            let psum: f64 = m.pgf.probs().iter().sum();
            if (psum - 1.0).abs() > 1e-14 {
                out.push(Violation {
                    member: Some(i),
                    invariant: format!("probabilities sum to {psum:.17}"),
                    discrepancy: psum - 1.0,
                });
            }
        }
        if self.common_mean <= 1.0 {
            out.push(Violation {
                member: None,
                invariant: format!(
                    "mean {} is not supercritical (need E > 1)",
                    self.common_mean
                ),
                discrepancy: self.common_mean - 1.0,
            });
        }
        out
    }
}

/// The two-polynomial family: `P_0(z) = p z + (1-p) z^2` and
/// `P_1(z) = q z + (1-q) z^3` with `q = (1+p)/2` so both have mean
/// `E = 2 - p`, drawn with probability 1/2 each.
pub fn two_poly_family(p: f64) -> Result<Environment> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::OutOfRange(format!(
            "two-poly parameter p must lie in (0,1), got {p}"
        )));
    }
    let q = (1.0 + p) / 2.0;
    let p0 = OffspringPgf::new(vec![p, 1.0 - p])?;
    let p1 = OffspringPgf::new(vec![q, 0.0, 1.0 - q])?;
    Environment::new(vec![(0.5, p0), (0.5, p1)])
}
