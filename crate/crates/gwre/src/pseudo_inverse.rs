//! Pseudo-inverse coefficients.
//!
//! The coefficients b_j express the identity map through the column
//! generating functions: z = sum_j b_j Phi_j(z). Because the coefficient
//! matrix of that linear system is unit lower triangular in the ratio values,
//! b solves by forward substitution; an independent determinant route
//! (Cramer's rule on the same system) cross-checks the recurrence.

use crate::error::{Error, Result};
use crate::phi::PhiTable;
use crate::real::Real;

/// The coefficient vector `b_1..b_J`; `b_1 = 1` always.
#[derive(Debug, Clone)]
pub struct BVector<R: Real> {
    values: Vec<R>,
}

impl<R: Real> BVector<R> {
    /// `b_j` (1-based).
    pub fn get(&self, j: usize) -> R {
        self.values[j - 1]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn as_slice(&self) -> &[R] {
        &self.values
    }
}

/// Forward substitution: `b_1 = 1`, `b_n = -sum_{m<n} phi_nm b_m`.
pub fn b_recurrence<R: Real>(table: &PhiTable<R>) -> BVector<R> {
    let j_max = table.j_max();
    let mut values = vec![R::zero(); j_max];
    values[0] = R::one();
    for n in 2..=j_max {
        let mut s = R::zero();
        for m in 1..n {
            s = s + table.value(n, m) * values[m - 1];
        }
        values[n - 1] = -s;
    }
    BVector { values }
}

/// Cramer's-rule route: `b_n = (-1)^(n-1) det(H_n)` where `H_n` is the
/// (n-1)x(n-1) lower-Hessenberg block with rows `(phi_{k+1,1}, ...,
/// phi_{k+1,k}, 1, 0, ...)`. The unit superdiagonal entries serve as pivots,
/// so the row reduction is division-free; the sign comes from expanding the
/// reduced matrix along its only nonzero column.
pub fn b_determinant<R: Real>(table: &PhiTable<R>, n: usize) -> Result<R> {
    if n < 2 || n > table.j_max() {
        return Err(Error::OutOfRange(format!(
            "determinant route needs 2 <= n <= j_max={}, got {n}",
            table.j_max()
        )));
    }
    let k = n - 1;
    // h[i][j] = H[(i+1), (j+1)] for 0-based i, j
    let mut h: Vec<Vec<R>> = (0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    if j == i + 1 {
                        R::one()
                    } else if j <= i {
                        table.value(i + 2, j + 1)
                    } else {
                        R::zero()
                    }
                })
                .collect()
        })
        .collect();
    // eliminate column j+1 below row j using the unit pivot at (j, j+1);
    // columns are processed right to left, which keeps the arithmetic
    // grouped differently from the forward substitution it cross-checks
    for j in (0..k.saturating_sub(1)).rev() {
        for i in (j + 1)..k {
            let factor = h[i][j + 1];
            if factor == R::zero() {
                continue;
            }
            let pivot_row: Vec<R> = h[j][..=j + 1].to_vec();
            for (c, &v) in pivot_row.iter().enumerate() {
                h[i][c] = h[i][c] - factor * v;
            }
        }
    }
    // only column 1 of the last row survives; det = (-1)^(k+1) * that entry
    let g = h[k - 1][0];
    let det = if k.is_multiple_of(2) { -g } else { g };
    // b_n = (-1)^(n-1) det = (-1)^k det
    Ok(if k.is_multiple_of(2) { det } else { -det })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::two_poly_family;
    use crate::phi::{phi_table, PhiTable};
    use crate::qmatrix::q_matrix;
    use approx::assert_relative_eq;

    fn table_02(j_max: usize, n_max: usize) -> PhiTable<f64> {
        let env = two_poly_family(0.2).unwrap();
        let q = q_matrix::<f64>(&env, n_max).unwrap();
        phi_table(&q, j_max, n_max).unwrap()
    }

    #[test]
    fn recurrence_hand_values() {
        let t = table_02(6, 12);
        let b = b_recurrence(&t);
        assert_eq!(b.get(1), 1.0);
        assert_relative_eq!(b.get(2), -2.0, max_relative = 1e-13);
        assert_relative_eq!(b.get(3), 725.0 / 396.0, max_relative = 1e-13);
        // exact fractions for p = 1/5
        assert_relative_eq!(b.get(4), 18125.0 / 4389.0, max_relative = 1e-12);
        assert_relative_eq!(b.get(5), -4.74595426620648, max_relative = 1e-11);
        assert_relative_eq!(b.get(6), -18.6814468189411, max_relative = 1e-11);
    }

    #[test]
    fn determinant_agrees_with_recurrence() {
        let t = table_02(10, 20);
        let b = b_recurrence(&t);
        for n in 2..=10usize {
            let d = b_determinant(&t, n).unwrap();
            assert!(
                ((d - b.get(n)) / b.get(n)).abs() <= 1e-12,
                "n={n}: det {d:.15e} vs rec {:.15e}",
                b.get(n)
            );
        }
        // explicit 1x1 and 2x2 checks
        let d2 = b_determinant(&t, 2).unwrap();
        assert_relative_eq!(d2, -t.value(2, 1), max_relative = 1e-15);
        let d3 = b_determinant(&t, 3).unwrap();
        let by_hand = t.value(2, 1) * t.value(3, 2) - t.value(3, 1);
        assert_relative_eq!(d3, by_hand, max_relative = 1e-14);
    }

    #[test]
    fn identity_process_gives_zero_b() {
        // phi_nm = 0 off the diagonal: the identity map needs only Phi_1
        let q_diag: Vec<f64> = (1..=6).map(|n| 1.0 / (n as f64 + 1.0)).collect();
        let t = PhiTable::from_fn(6, 6, 1.0, q_diag, |n, j| if n == j { 1.0 } else { 0.0 });
        let b = b_recurrence(&t);
        assert_eq!(b.get(1), 1.0);
        for n in 2..=6usize {
            assert_eq!(b.get(n), 0.0);
            assert_eq!(b_determinant(&t, n).unwrap(), 0.0);
        }
    }

    #[test]
    fn out_of_range_is_an_error() {
        let t = table_02(4, 8);
        assert!(b_determinant(&t, 1).is_err());
        assert!(b_determinant(&t, 5).is_err());
    }

    #[test]
    fn triangular_solve_residual() {
        // multiplying the unit-lower-triangular ratio matrix by b must give e_1
        let t = table_02(12, 24);
        let b = b_recurrence(&t);
        let mut max_resid = 0.0f64;
        for n in 1..=12usize {
            let mut acc = 0.0;
            for m in 1..=n {
                let coef = if m == n { 1.0 } else { t.value(n, m) };
                acc += coef * b.get(m);
            }
            let target = if n == 1 { 1.0 } else { 0.0 };
            max_resid = max_resid.max((acc - target).abs());
        }
        assert!(max_resid <= 1e-10, "residual {max_resid:.3e}");
    }
}
