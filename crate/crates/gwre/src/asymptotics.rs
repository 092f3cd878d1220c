//! Power-law amplitude extraction and the closed-form density approximation.
//!
//! Column j of the ratio table grows like `m^(1 + log_E q_j)` times a
//! one-periodic modulation of `-log_E m` that is numerically near-constant.
//! Freezing that modulation at a sampled amplitude `A_jM` and combining with
//! the pseudo-inverse coefficients gives the left-tail density approximation
//! `p(x) = sum_j b_j A_jM x^(-1 - log_E q_j)`.

use crate::curve::{CurveMeta, DensityCurve};
use crate::error::{Error, Result};
use crate::phi::PhiTable;
use crate::pseudo_inverse::BVector;
use crate::real::Real;

/// Phase tolerance for Richardson pairs (fraction of one period).
const PHASE_TOL: f64 = 0.02;

/// `1 + log_E q_j`: the power of m that rescales column j to its amplitude.
pub fn scale_exponent<R: Real>(table: &PhiTable<R>, j: usize) -> R {
    let ln_e = R::from_f64(table.mean()).ln();
    R::one() + table.q(j).ln() / ln_e
}

/// Sampled amplitude `A_jM = M^(1 + log_E q_j) * phi_Mj`, evaluated in
/// exponent form so extreme magnitudes of either factor cannot overflow.
pub fn amplitude<R: Real>(table: &PhiTable<R>, j: usize, m: usize) -> Result<R> {
    if j < 1 || j > table.j_max() || m < j || m > table.n_max() {
        return Err(Error::OutOfRange(format!(
            "amplitude needs j <= m <= n_max (j={j}, m={m}, n_max={})",
            table.n_max()
        )));
    }
    let phi = table.value(m, j);
    if !(phi > R::zero()) {
        return Err(Error::ZeroRatio { m, j });
    }
    let ex = scale_exponent(table, j);
    Ok((ex * R::from_usize(m).ln() + phi.ln()).exp())
}

/// Fractional part of `-log_E m`, the phase at which the one-periodic
/// modulation is sampled.
pub fn phase(mean: f64, m: usize) -> f64 {
    let x = -(m as f64).ln() / mean.ln();
    x.rem_euclid(1.0)
}

/// Circular distance between the sampling phases of two indices.
fn phase_distance(mean: f64, m1: usize, m2: usize) -> f64 {
    let d = (phase(mean, m1) - phase(mean, m2)).abs();
    d.min(1.0 - d)
}

/// Nearest index to `m * E^k` with `k = max(1, round(log_E factor))`: a
/// larger sample point at (nearly) the same phase.
pub fn matched_multiple(mean: f64, m: usize, factor: f64) -> usize {
    let k = (factor.ln() / mean.ln()).round().max(1.0);
    (m as f64 * mean.powf(k)).round() as usize
}

/// First-order Richardson refinement at matched phase: with
/// `g(m) = m^(1+log_E q_j) phi_mj`, returns `(m2 g(m2) - m1 g(m1))/(m2 - m1)`,
/// which cancels the 1/m correction of the asymptotic expansion.
pub fn amplitude_richardson<R: Real>(
    table: &PhiTable<R>,
    j: usize,
    m1: usize,
    m2: usize,
) -> Result<R> {
    if m1 >= m2 {
        return Err(Error::OutOfRange(format!(
            "richardson needs m1 < m2, got {m1}, {m2}"
        )));
    }
    let delta = phase_distance(table.mean(), m1, m2);
    if delta > PHASE_TOL {
        return Err(Error::PhaseMismatch { m1, m2, delta });
    }
    let g1 = amplitude(table, j, m1)?;
    let g2 = amplitude(table, j, m2)?;
    let r1 = R::from_usize(m1);
    let r2 = R::from_usize(m2);
    Ok((r2 * g2 - r1 * g1) / (r2 - r1))
}

/// Samples `g_j(m)` on `samples` integers spanning one full period
/// `[m, round(m*E)]`, tagged with their phases. The spread of the returned
/// values bounds the oscillation of the periodic modulation plus the O(1/m)
/// trend across the window.
pub fn oscillation_scan<R: Real>(
    table: &PhiTable<R>,
    j: usize,
    m: usize,
    samples: usize,
) -> Result<Vec<(f64, R)>> {
    let m_end = (m as f64 * table.mean()).round() as usize;
    if m_end > table.n_max() {
        return Err(Error::OutOfRange(format!(
            "scan window [{m}, {m_end}] exceeds n_max={}",
            table.n_max()
        )));
    }
    if samples < 2 || m_end <= m {
        return Err(Error::OutOfRange(
            "scan needs samples >= 2 and a nonempty window".into(),
        ));
    }
    let mut out = Vec::with_capacity(samples);
    let mut prev = 0usize;
    for k in 0..samples {
        let mk = (m as f64 + k as f64 * (m_end - m) as f64 / (samples - 1) as f64).round() as usize;
        if mk == prev {
            continue;
        }
        prev = mk;
        out.push((phase(table.mean(), mk), amplitude(table, j, mk)?));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AmplitudeMethod {
    Plain { m: usize },
    Richardson { m1: usize, m2: usize },
}

#[derive(Debug, Clone)]
pub struct AmplitudeRecord<R: Real> {
    pub j: usize,
    /// Power of x carried by this term in the density: `-1 - log_E q_j`.
    pub alpha: R,
    pub amplitude: R,
    pub method: AmplitudeMethod,
}

/// Per-column amplitudes with the x-exponents they multiply.
#[derive(Debug, Clone)]
pub struct AmplitudeSet<R: Real> {
    records: Vec<AmplitudeRecord<R>>,
    base_m: usize,
    richardson: bool,
}

impl<R: Real> AmplitudeSet<R> {
    pub fn records(&self) -> &[AmplitudeRecord<R>] {
        &self.records
    }
    pub fn len(&self) -> usize {
        self.records.len()
    }
    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
    /// Record for column j (1-based).
    pub fn get(&self, j: usize) -> &AmplitudeRecord<R> {
        &self.records[j - 1]
    }
    pub fn base_m(&self) -> usize {
        self.base_m
    }
    pub fn richardson(&self) -> bool {
        self.richardson
    }
}

/// Extracts amplitudes for columns `1..=j_max` at sample index `m`, refined
/// by one Richardson step against `round(m*E)` when requested.
pub fn amplitude_set<R: Real>(
    table: &PhiTable<R>,
    j_max: usize,
    m: usize,
    richardson: bool,
) -> Result<AmplitudeSet<R>> {
    if j_max > table.j_max() {
        return Err(Error::OutOfRange(format!(
            "amplitude set needs j_max <= table columns ({})",
            table.j_max()
        )));
    }
    let mut records = Vec::with_capacity(j_max);
    for j in 1..=j_max {
        let ex = scale_exponent(table, j);
        let (amp, method) = if richardson {
            let m2 = matched_multiple(table.mean(), m, table.mean());
            (
                amplitude_richardson(table, j, m, m2)?,
                AmplitudeMethod::Richardson { m1: m, m2 },
            )
        } else {
            (amplitude(table, j, m)?, AmplitudeMethod::Plain { m })
        };
        records.push(AmplitudeRecord {
            j,
            alpha: -ex,
            amplitude: amp,
            method,
        });
    }
    Ok(AmplitudeSet {
        records,
        base_m: m,
        richardson,
    })
}

/// The closed-form approximation `p(x) = sum_{j<=J} b_j A_j x^alpha_j`,
/// each power evaluated in exponent form and terms summed in increasing j.
/// The auxiliary column reports the magnitude of the last retained term,
/// an exact bound on the truncation step J-1 -> J.
pub fn density_series<R: Real>(
    bs: &BVector<R>,
    amps: &AmplitudeSet<R>,
    j_terms: usize,
    xs: &[f64],
) -> Result<DensityCurve<R>> {
    if j_terms < 1 || j_terms > bs.len() || j_terms > amps.len() {
        return Err(Error::OutOfRange(format!(
            "j_terms={j_terms} exceeds available coefficients (b: {}, amplitudes: {})",
            bs.len(),
            amps.len()
        )));
    }
    if xs.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::OutOfRange(
            "density series needs strictly positive x".into(),
        ));
    }
    let mut ps = Vec::with_capacity(xs.len());
    let mut aux = Vec::with_capacity(xs.len());
    for &x in xs {
        let ln_x = R::from_f64(x).ln();
        let mut acc = R::zero();
        let mut last = R::zero();
        for j in 1..=j_terms {
            let rec = amps.get(j);
            last = bs.get(j) * rec.amplitude * (rec.alpha * ln_x).exp();
            acc = acc + last;
        }
        ps.push(acc);
        aux.push(last.abs());
    }
    let curve = DensityCurve {
        xs: xs.to_vec(),
        ps,
        aux,
        meta: CurveMeta::Series {
            j_terms,
            m: amps.base_m(),
            richardson: amps.richardson(),
        },
    };
    curve.assert_valid();
    Ok(curve)
}
