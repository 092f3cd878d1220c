//! Environment-averaged transition coefficients.
//!
//! `q_nm` is the probability that m individuals produce n offspring in one
//! generation: the z^n coefficient of P_r(z)^m averaged over the environment.
//! Computed by iterated truncated convolution (one running power per member),
//! which is the multinomial expansion without enumerating compositions.

use crate::error::{Error, Result};
use crate::model::{Environment, OffspringPgf};
use crate::real::Real;

/// Refuse allocations beyond this many bytes for the triangular store.
const MAX_TABLE_BYTES: usize = 2 << 30;

/// Lower-triangular array `q_nm` for `1 <= m <= n <= n_max`.
#[derive(Debug, Clone)]
pub struct QMatrix<R: Real> {
    n_max: usize,
    d_max: usize,
    mean: f64,
    entries: Vec<R>,
}

#[inline]
fn tri_index(n: usize, m: usize) -> usize {
    n * (n - 1) / 2 + (m - 1)
}

impl<R: Real> QMatrix<R> {
    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Largest member degree; `q_nm = 0` whenever `n > m * d_max`.
    pub fn d_max(&self) -> usize {
        self.d_max
    }

    /// Common per-step expectation of the source environment.
    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// `q_nm`, zero outside the structural band `m <= n <= m * d_max`.
    #[inline]
    pub fn entry(&self, n: usize, m: usize) -> R {
        debug_assert!(n >= 1 && n <= self.n_max);
        if m == 0 || m > n || n > m * self.d_max {
            return R::zero();
        }
        self.entries[tri_index(n, m)]
    }

    /// Diagonal value `q_n = q_nn` (average n-th power of the p_1's).
    #[inline]
    pub fn diag(&self, n: usize) -> R {
        self.entries[tri_index(n, n)]
    }
}

/// Coefficients of `P(z)^m` truncated at `z^n_max`, indexed by power of z
/// (index 0 unused for m >= 1; support is `[m, min(m*d, n_max)]`).
pub fn power_coeffs<R: Real>(pgf: &OffspringPgf, m: usize, n_max: usize) -> Vec<R> {
    assert!(m >= 1 && n_max >= m, "need m >= 1 and n_max >= m");
    let probs: Vec<R> = pgf.probs().iter().map(|&p| R::from_f64(p)).collect();
    let mut cur = vec![R::zero(); n_max + 1];
    cur[0] = R::one();
    for step in 1..=m {
        cur = convolve_once(&cur, &probs, step, n_max);
    }
    cur
}

/// One convolution step: takes coefficients of P^(step-1), returns P^step,
/// truncated above `n_max`. Support of the input is [step-1, (step-1)*d].
fn convolve_once<R: Real>(cur: &[R], probs: &[R], step: usize, n_max: usize) -> Vec<R> {
    let mut next = vec![R::zero(); n_max + 1];
    let lo = step - 1;
    let hi = ((step - 1) * probs.len()).min(n_max);
    for (i, &c) in cur.iter().enumerate().take(hi + 1).skip(lo) {
        if c == R::zero() {
            continue;
        }
        for (k, &p) in probs.iter().enumerate() {
            let n = i + k + 1;
            if n > n_max {
                break;
            }
            if p != R::zero() {
                next[n] = next[n] + c * p;
            }
        }
    }
    next
}

/// Builds the full triangular table for the environment.
pub fn q_matrix<R: Real>(env: &Environment, n_max: usize) -> Result<QMatrix<R>> {
    if n_max < 1 {
        return Err(Error::OutOfRange("n_max must be at least 1".into()));
    }
    let len = n_max * (n_max + 1) / 2;
    let bytes = len.saturating_mul(std::mem::size_of::<R>());
    if bytes > MAX_TABLE_BYTES {
        return Err(Error::BudgetExceeded(format!(
            "q table for n_max={n_max} needs {bytes} bytes"
        )));
    }
    let mut entries = vec![R::zero(); len];
    for member in env.members() {
        let w = R::from_f64(member.weight);
        let probs: Vec<R> = member.pgf.probs().iter().map(|&p| R::from_f64(p)).collect();
        let mut cur = vec![R::zero(); n_max + 1];
        cur[0] = R::one();
        for m in 1..=n_max {
            cur = convolve_once(&cur, &probs, m, n_max);
            let hi = (m * probs.len()).min(n_max);
            for n in m..=hi {
                entries[tri_index(n, m)] = entries[tri_index(n, m)] + w * cur[n];
            }
        }
    }
    Ok(QMatrix {
        n_max,
        d_max: env.max_degree(),
        mean: env.common_mean(),
        entries,
    })
}

/// Returns the convolution-based `q_{n,n-1}` next to its closed form
/// `(n-1) * avg(p_1^{n-2} p_2)`; the two must agree.
pub fn q_subdiag_check<R: Real>(env: &Environment, n: usize) -> (R, R) {
    assert!(n >= 2, "subdiagonal needs n >= 2");
    let mut computed = R::zero();
    let mut closed = R::zero();
    for member in env.members() {
        let w = R::from_f64(member.weight);
        let coeffs = power_coeffs::<R>(&member.pgf, n - 1, n);
        computed = computed + w * coeffs[n];
        let p1 = R::from_f64(member.pgf.prob(1));
        let p2 = R::from_f64(member.pgf.prob(2));
        closed = closed + w * p1.powu((n - 2) as u32) * p2;
    }
    closed = closed * R::from_usize(n - 1);
    (computed, closed)
}
