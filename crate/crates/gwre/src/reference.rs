//! Brute-force reference density: enumerate all environment sequences of a
//! finite depth, average the composed generating functions, and invert the
//! resulting characteristic function by the trapezoidal rule.
//!
//! The average over sequences shares suffixes through a depth-first traversal
//! of the member tree, so a depth-t evaluation costs ~|R|^(t+1)/(|R|-1)
//! polynomial evaluations instead of t*|R|^t.

use crate::curve::{CurveMeta, DensityCurve};
use crate::error::{Error, Result};
use crate::model::Environment;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Default cap on the number of enumerated environment sequences.
pub const DEFAULT_SEQUENCE_BUDGET: u64 = 1 << 20;

/// Iterates must stay essentially inside the closed unit disk; anything
/// clearly above 1 means the depth is too small for the requested frequency.
const MODULUS_GUARD: f64 = 1.0 + 1e-6;

#[derive(Debug, Clone)]
pub struct ReferenceConfig {
    /// Composition depth.
    pub t: usize,
    /// Integration cutoff for the inversion integral.
    pub y_max: f64,
    /// Quadrature step.
    pub dy: f64,
    /// Evaluation grid for the density.
    pub xs: Vec<f64>,
    /// Cap on enumerated sequences (|members|^t must fit).
    pub budget: u64,
}

impl ReferenceConfig {
    /// Desk-scale defaults: depth 12, cutoff 200, step 0.02.
    pub fn desk_scale(xs: Vec<f64>) -> Self {
        ReferenceConfig {
            t: 12,
            y_max: 200.0,
            dy: 0.02,
            xs,
            budget: DEFAULT_SEQUENCE_BUDGET,
        }
    }

    fn validate(&self, env: &Environment) -> Result<()> {
        if self.t < 1 {
            return Err(Error::OutOfRange("depth t must be at least 1".into()));
        }
        if !(self.dy > 0.0) || self.dy > self.y_max {
            return Err(Error::OutOfRange(format!(
                "need 0 < dy <= y_max, got dy={} y_max={}",
                self.dy, self.y_max
            )));
        }
        check_budget(env, self.t, self.budget)?;
        if self.xs.is_empty() {
            return Err(Error::OutOfRange("empty evaluation grid".into()));
        }
        if self.xs[0] <= 0.0 || self.xs.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::OutOfRange(
                "evaluation grid must be positive and strictly increasing".into(),
            ));
        }
        Ok(())
    }
}

fn check_budget(env: &Environment, t: usize, budget: u64) -> Result<()> {
    let sequences = (env.members().len() as u64).checked_pow(t as u32);
    match sequences {
        Some(s) if s <= budget => Ok(()),
        _ => Err(Error::BudgetExceeded(format!(
            "{} members at depth {t} exceed the sequence budget {budget}",
            env.members().len()
        ))),
    }
}

/// Weighted average over all depth-`remaining` member sequences of the
/// composition applied to `w`, innermost function first.
fn compose_avg(env: &Environment, remaining: usize, w: Complex64) -> Complex64 {
    if remaining == 0 {
        return w;
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for member in env.members() {
        acc += member.weight * compose_avg(env, remaining - 1, member.pgf.eval(w));
    }
    acc
}

/// Depth-t approximation of the martingale-limit characteristic function:
/// the environment-averaged composition evaluated at `1 - z/E^t`.
pub fn pi_t(env: &Environment, t: usize, z: Complex64) -> Result<Complex64> {
    check_budget(env, t, DEFAULT_SEQUENCE_BUDGET)?;
    let scale = env.common_mean().powi(t as i32);
    Ok(compose_avg(env, t, Complex64::new(1.0, 0.0) - z / scale))
}

/// Trapezoidal inversion of the depth-t characteristic function:
/// `p(x) = Re((1/pi) * integral_0^y_max Pi_t(iy) e^(iyx) dy)`.
///
/// The Pi values are computed once per y node (in parallel) and reused for
/// every x; each x-sum runs in fixed node order, so results are independent
/// of the thread count.
pub fn reference_density(env: &Environment, cfg: &ReferenceConfig) -> Result<DensityCurve> {
    cfg.validate(env)?;
    let scale = env.common_mean().powi(cfg.t as i32);
    let ny = (cfg.y_max / cfg.dy).round() as usize;

    let piv: Vec<Complex64> = (0..=ny)
        .into_par_iter()
        .map(|k| {
            let y = k as f64 * cfg.dy;
            let w0 = Complex64::new(1.0, -y / scale);
            compose_avg(env, cfg.t, w0)
        })
        .collect();

    for (k, v) in piv.iter().enumerate() {
        let modulus = v.norm();
        if !(modulus <= MODULUS_GUARD) {
            return Err(Error::UnstableReference {
                t: cfg.t,
                y: k as f64 * cfg.dy,
                modulus,
                scale,
            });
        }
    }

    let evaluated: Vec<(f64, f64)> = cfg
        .xs
        .par_iter()
        .map(|&x| {
            let mut sum = Complex64::new(0.0, 0.0);
            for (k, &v) in piv.iter().enumerate() {
                let weight = if k == 0 || k == ny { 0.5 } else { 1.0 };
                sum += weight * v * Complex64::from_polar(1.0, k as f64 * cfg.dy * x);
            }
            sum *= cfg.dy / PI;
            (sum.re, sum.im.abs())
        })
        .collect();

    let curve = DensityCurve {
        xs: cfg.xs.clone(),
        ps: evaluated.iter().map(|e| e.0).collect(),
        aux: evaluated.iter().map(|e| e.1).collect(),
        meta: CurveMeta::Reference {
            t: cfg.t,
            y_max: cfg.y_max,
            dy: cfg.dy,
        },
    };
    curve.assert_valid();
    Ok(curve)
}

/// Trapezoidal mass and mean of a sampled curve over its own grid.
pub fn reference_moments<R: crate::real::Real>(curve: &DensityCurve<R>) -> (f64, f64) {
    assert!(!curve.is_empty(), "moments of an empty curve");
    let mut mass = 0.0;
    let mut mean = 0.0;
    for k in 1..curve.len() {
        let dx = curve.xs[k] - curve.xs[k - 1];
        let p0 = curve.ps[k - 1].to_f64();
        let p1 = curve.ps[k].to_f64();
        mass += 0.5 * dx * (p0 + p1);
        mean += 0.5 * dx * (curve.xs[k - 1] * p0 + curve.xs[k] * p1);
    }
    (mass, mean)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{two_poly_family, Environment, OffspringPgf};
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
        let n = ((hi - lo) / step).round() as usize;
        (0..=n).map(|k| lo + k as f64 * step).collect()
    }

    #[test]
    fn fixes_one_at_zero() {
        let env = two_poly_family(0.2).unwrap();
        for t in [1, 3, 8] {
            let v = pi_t(&env, t, c(0.0, 0.0)).unwrap();
            assert_relative_eq!(v.re, 1.0, max_relative = 1e-14);
            assert_eq!(v.im, 0.0);
        }
    }

    #[test]
    fn single_member_is_plain_self_composition() {
        let g = OffspringPgf::new(vec![0.2, 0.8]).unwrap();
        let env = Environment::new(vec![(1.0, g.clone())]).unwrap();
        let t = 9;
        let z = c(0.3, 0.4);
        let mut w = c(1.0, 0.0) - z / 1.8f64.powi(t as i32);
        for _ in 0..t {
            w = g.eval(w);
        }
        let v = pi_t(&env, t, z).unwrap();
        assert_relative_eq!(v.re, w.re, max_relative = 1e-12);
        assert_relative_eq!(v.im, w.im, max_relative = 1e-12);
    }

    #[test]
    fn unit_slope_at_zero() {
        // d/dz Pi_t(0) = -1 for every depth, by the chain rule at the fixed
        // point; checked with a central finite difference
        let env = two_poly_family(0.2).unwrap();
        let h = 1e-6;
        for t in [4, 10] {
            let plus = pi_t(&env, t, c(h, 0.0)).unwrap();
            let minus = pi_t(&env, t, c(-h, 0.0)).unwrap();
            let slope = (plus - minus) / (2.0 * h);
            assert!((slope.re + 1.0).abs() <= 1e-5, "t={t}: slope {}", slope.re);
            assert!(slope.im.abs() <= 1e-9);
        }
    }

    #[test]
    fn conjugate_symmetry_is_exact() {
        let env = two_poly_family(0.4).unwrap();
        for &y in &[0.3, 2.0, 40.0] {
            let a = pi_t(&env, 10, c(0.0, y)).unwrap();
            let b = pi_t(&env, 10, c(0.0, -y)).unwrap();
            assert_eq!(a.re, b.re);
            assert_eq!(a.im, -b.im);
        }
    }

    #[test]
    fn modulus_bounded_on_grid() {
        let env = two_poly_family(0.2).unwrap();
        for k in 0..=200 {
            let v = pi_t(&env, 12, c(0.0, k as f64)).unwrap();
            assert!(v.norm() <= 1.0 + 1e-9, "y={k}: |Pi|={}", v.norm());
        }
    }

    #[test]
    fn budget_is_enforced() {
        let env = two_poly_family(0.2).unwrap();
        assert!(matches!(
            pi_t(&env, 21, c(0.0, 1.0)),
            Err(Error::BudgetExceeded(_))
        ));
        let mut cfg = ReferenceConfig::desk_scale(vec![1.0]);
        cfg.t = 25;
        assert!(reference_density(&env, &cfg).is_err());
    }

    #[test]
    fn desk_scale_matches_independent_values() {
        // frozen values from an independent implementation of the same
        // quadrature (depth 12, cutoff 200, step 0.02, p = 0.2)
        let env = two_poly_family(0.2).unwrap();
        let cfg = ReferenceConfig::desk_scale(vec![0.5, 1.0]);
        let curve = reference_density(&env, &cfg).unwrap();
        assert_relative_eq!(curve.ps[0], 0.6358231700308685, max_relative = 1e-9);
        assert_relative_eq!(curve.ps[1], 0.575203642040457, max_relative = 1e-9);
    }

    #[test]
    fn shallow_depth_on_wide_band_is_rejected() {
        // E = 1.4 at depth 12 cannot reach frequencies near 200
        let env = two_poly_family(0.6).unwrap();
        let cfg = ReferenceConfig::desk_scale(grid(0.3, 1.5, 0.1));
        assert!(matches!(
            reference_density(&env, &cfg),
            Err(Error::UnstableReference { t: 12, .. })
        ));
    }

    #[test]
    fn depth_consistency() {
        // depth 10 cannot reach y = 200 for this family (iterates escape
        // above y ~ 0.4 * E^t = 145), so compare the two valid depths 12, 14
        let env = two_poly_family(0.2).unwrap();
        let xs = grid(0.3, 1.5, 0.05);
        let mut cfg = ReferenceConfig::desk_scale(xs.clone());
        let a = reference_density(&env, &cfg).unwrap();
        cfg.t = 14;
        let b = reference_density(&env, &cfg).unwrap();
        let mut worst = 0.0f64;
        for k in 0..xs.len() {
            worst = worst.max(((a.ps[k] - b.ps[k]) / b.ps[k]).abs());
        }
        assert!(worst <= 0.02, "depth drift {worst:.4}");
    }

    #[test]
    fn moments_of_simple_curves() {
        // densely sampled uniform density on [0, 1]
        let xs: Vec<f64> = (1..=1000).map(|k| k as f64 / 1000.0).collect();
        let ps = vec![1.0; xs.len()];
        let aux = vec![0.0; xs.len()];
        let curve = DensityCurve {
            xs,
            ps,
            aux,
            meta: CurveMeta::Reference {
                t: 0,
                y_max: 0.0,
                dy: 0.0,
            },
        };
        let (mass, mean) = reference_moments(&curve);
        assert_relative_eq!(mass, 0.999, max_relative = 1e-12); // [1e-3, 1] window
        assert_relative_eq!(mean, 0.4999995, max_relative = 1e-9);

        // two-point trapezoid by hand
        let curve = DensityCurve {
            xs: vec![1.0, 3.0],
            ps: vec![2.0, 4.0],
            aux: vec![0.0, 0.0],
            meta: curve.meta.clone(),
        };
        let (mass, mean) = reference_moments(&curve);
        assert_relative_eq!(mass, 6.0, max_relative = 1e-14);
        assert_relative_eq!(mean, (1.0 * 2.0 + 3.0 * 4.0), max_relative = 1e-14);
    }
}
