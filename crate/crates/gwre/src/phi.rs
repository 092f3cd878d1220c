//! Limiting rare-event ratios and their generating functions.
//!
//! `phi_nj` is the limit of `P(X_t = n) / P(X_t = j)` for the process started
//! from j individuals. Columns satisfy the triangular recurrence
//! `phi_nj = (sum_m q_nm phi_mj) / (q_j - q_n)` with `phi_jj = 1`, and the
//! generating function of column j is an eigenfunction of the environment-
//! averaged composition operator with eigenvalue `q_j`.

use crate::error::{Error, Result};
use crate::qmatrix::QMatrix;
use crate::real::Real;
use num_complex::Complex64;
use rayon::prelude::*;

/// Triangular table of ratio limits, stored column-major: column j holds
/// `phi_nj` for `j <= n <= n_max`.
#[derive(Debug, Clone)]
pub struct PhiTable<R: Real> {
    j_max: usize,
    n_max: usize,
    mean: f64,
    cols: Vec<Vec<R>>,
    q_diag: Vec<R>,
}

impl<R: Real> PhiTable<R> {
    pub fn j_max(&self) -> usize {
        self.j_max
    }
    pub fn n_max(&self) -> usize {
        self.n_max
    }
    /// Common per-step expectation E of the source environment.
    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// `phi_nj`; zero for n < j by construction.
    #[inline]
    pub fn value(&self, n: usize, j: usize) -> R {
        debug_assert!(j >= 1 && j <= self.j_max, "column {j} out of range");
        debug_assert!(n >= 1 && n <= self.n_max, "row {n} out of range");
        if n < j {
            R::zero()
        } else {
            self.cols[j - 1][n - j]
        }
    }

    /// Diagonal coefficient `q_j` copied from the source table.
    #[inline]
    pub fn q(&self, j: usize) -> R {
        self.q_diag[j - 1]
    }

    /// Builds a table from an explicit rule; used for synthetic fixtures
    /// (known asymptotic models, degenerate processes) in tests and checks.
    pub fn from_fn(
        j_max: usize,
        n_max: usize,
        mean: f64,
        q_diag: Vec<R>,
        f: impl Fn(usize, usize) -> R,
    ) -> Self {
        assert!(j_max >= 1 && n_max >= j_max);
        assert_eq!(q_diag.len(), n_max);
        let cols = (1..=j_max)
            .map(|j| (j..=n_max).map(|n| f(n, j)).collect())
            .collect();
        PhiTable {
            j_max,
            n_max,
            mean,
            cols,
            q_diag,
        }
    }
}

fn column_from_q<R: Real>(qmat: &QMatrix<R>, j: usize, n_max: usize) -> Result<Vec<R>> {
    let d_max = qmat.d_max();
    let qj = qmat.diag(j);
    let mut col = vec![R::zero(); n_max - j + 1];
    col[0] = R::one();
    for n in (j + 1)..=n_max {
        let denom = qj - qmat.diag(n);
        if !(denom > R::zero()) {
            return Err(Error::DegenerateDiagonal { j, n });
        }
        // q_nm = 0 below m = ceil(n / d_max); phi_mj = 0 below m = j.
        let lo = n.div_ceil(d_max).max(j);
        let mut s = R::zero();
        for m in lo..n {
            s = s + qmat.entry(n, m) * col[m - j];
        }
        col[n - j] = s / denom;
    }
    Ok(col)
}

/// Fills the ratio table column by column from a prebuilt coefficient table.
pub fn phi_table<R: Real>(qmat: &QMatrix<R>, j_max: usize, n_max: usize) -> Result<PhiTable<R>> {
    if j_max < 1 || j_max > n_max || n_max > qmat.n_max() {
        return Err(Error::OutOfRange(format!(
            "need 1 <= j_max <= n_max <= {}, got j_max={j_max} n_max={n_max}",
            qmat.n_max()
        )));
    }
    let cols: Result<Vec<_>> = (1..=j_max)
        .into_par_iter()
        .map(|j| column_from_q(qmat, j, n_max))
        .collect();
    Ok(PhiTable {
        j_max,
        n_max,
        mean: qmat.mean(),
        cols: cols?,
        q_diag: (1..=n_max).map(|n| qmat.diag(n)).collect(),
    })
}

/// Specialized fast path for the two-polynomial family. Equivalent to
/// `phi_table(q_matrix(two_poly_family(p), n_max), ...)` but the inner sums
/// use the closed-form binomial weights of the quadratic and cubic members,
/// each evaluated as exp of a sum over a precomputed log-factorial table so
/// the terms stay stable at every magnitude.
pub fn phi_table_two_poly<R: Real>(p: f64, j_max: usize, n_max: usize) -> Result<PhiTable<R>> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::OutOfRange(format!(
            "two-poly parameter p must lie in (0,1), got {p}"
        )));
    }
    if j_max < 1 || j_max > n_max {
        return Err(Error::OutOfRange(format!(
            "need 1 <= j_max <= n_max, got j_max={j_max} n_max={n_max}"
        )));
    }
    let half = R::from_f64(0.5);
    let rp = R::from_f64(p);
    let rq = (R::one() + rp) * half;

    // ln(i!) for i <= n_max
    let mut lnfact = vec![R::zero(); n_max + 1];
    for i in 2..=n_max {
        lnfact[i] = lnfact[i - 1] + R::from_usize(i).ln();
    }
    let ln_p = rp.ln();
    let ln_1p = (R::one() - rp).ln();
    let ln_q = rq.ln();
    let ln_1q = (R::one() - rq).ln();

    // running powers p^n, q^n for n <= n_max
    let mut pow_p = vec![R::one(); n_max + 1];
    let mut pow_q = vec![R::one(); n_max + 1];
    for n in 1..=n_max {
        pow_p[n] = pow_p[n - 1] * rp;
        pow_q[n] = pow_q[n - 1] * rq;
    }
    let q_diag: Vec<R> = (1..=n_max).map(|n| (pow_p[n] + pow_q[n]) * half).collect();

    let compute_col = |j: usize| -> Result<Vec<R>> {
        let mut col = vec![R::zero(); n_max - j + 1];
        col[0] = R::one();
        let base = pow_p[j] + pow_q[j];
        for n in (j + 1)..=n_max {
            let denom = base - pow_p[n] - pow_q[n];
            if !(denom > R::zero()) {
                return Err(Error::DegenerateDiagonal { j, n });
            }
            let mut s = R::zero();
            // quadratic member: m = n - i parents, i of them split in two
            let mut i = 1;
            while 2 * i <= n && n - i >= j {
                let lb = lnfact[n - i] - lnfact[n - 2 * i] - lnfact[i]
                    + R::from_usize(n - 2 * i) * ln_p
                    + R::from_usize(i) * ln_1p;
                s = s + lb.exp() * col[n - i - j];
                i += 1;
            }
            // cubic member: m = n - 2i parents, i of them split in three
            let mut i = 1;
            while 3 * i <= n && n - 2 * i >= j {
                let lb = lnfact[n - 2 * i] - lnfact[n - 3 * i] - lnfact[i]
                    + R::from_usize(n - 3 * i) * ln_q
                    + R::from_usize(i) * ln_1q;
                s = s + lb.exp() * col[n - 2 * i - j];
                i += 1;
            }
            col[n - j] = s / denom;
        }
        Ok(col)
    };

    let cols: Result<Vec<_>> = (1..=j_max).into_par_iter().map(compute_col).collect();
    Ok(PhiTable {
        j_max,
        n_max,
        mean: 2.0 - p,
        cols: cols?,
        q_diag,
    })
}

/// Truncated generating function of column j evaluated at complex z.
pub fn phi_gf_eval<R: Real>(table: &PhiTable<R>, j: usize, z: Complex64) -> Complex64 {
    assert!(j >= 1 && j <= table.j_max(), "column {j} out of range");
    let mut acc = Complex64::new(0.0, 0.0);
    for n in (j..=table.n_max()).rev() {
        acc = acc * z + table.value(n, j).to_f64();
    }
    acc * z.powu(j as u32)
}
