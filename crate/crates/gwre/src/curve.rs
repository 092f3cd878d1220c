//! Sampled density curves with provenance metadata.

use crate::real::Real;

/// How a curve was produced, with its truncation parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum CurveMeta {
    /// Closed-form power-law series approximation.
    Series {
        j_terms: usize,
        m: usize,
        richardson: bool,
    },
    /// Brute-force composition + trapezoidal Fourier inversion.
    Reference { t: usize, y_max: f64, dy: f64 },
    /// Simulation histogram.
    MonteCarlo {
        horizon: u32,
        trials: u64,
        seed: u64,
        bins: usize,
        sample_mean: f64,
        sample_sd: f64,
    },
}

impl CurveMeta {
    pub fn method(&self) -> &'static str {
        match self {
            CurveMeta::Series { .. } => "series",
            CurveMeta::Reference { .. } => "reference",
            CurveMeta::MonteCarlo { .. } => "montecarlo",
        }
    }
}

/// Sampled (x, p(x)) pairs plus one method-specific auxiliary column:
/// the last-term bound for series curves, the imaginary-part residual for
/// reference curves, raw bin counts for simulation histograms.
#[derive(Debug, Clone)]
pub struct DensityCurve<R: Real = f64> {
    pub xs: Vec<f64>,
    pub ps: Vec<R>,
    pub aux: Vec<R>,
    pub meta: CurveMeta,
}

impl<R: Real> DensityCurve<R> {
    /// Checks the structural invariants: xs strictly increasing and positive,
    /// ps finite, matching lengths.
    pub(crate) fn assert_valid(&self) {
        assert_eq!(self.xs.len(), self.ps.len());
        assert_eq!(self.xs.len(), self.aux.len());
        for w in self.xs.windows(2) {
            debug_assert!(w[0] < w[1], "xs must be strictly increasing");
        }
        if let Some(&x0) = self.xs.first() {
            debug_assert!(x0 > 0.0, "xs must be positive");
        }
        debug_assert!(self.ps.iter().all(|p| p.is_finite()), "ps must be finite");
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }
}
