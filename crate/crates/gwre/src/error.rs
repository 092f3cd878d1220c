use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid offspring distribution: {0}")]
    InvalidPgf(String),

    #[error("invalid environment: {0}")]
    InvalidEnvironment(String),

    #[error("{0}")]
    OutOfRange(String),

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    /// The ratio recurrence divides by q_jj - q_nn; a non-positive difference
    /// means the diagonal is not strictly decreasing where it must be.
    #[error("degenerate diagonal: q[{j}] - q[{n}] is not positive (column {j}, row {n})")]
    DegenerateDiagonal { j: usize, n: usize },

    #[error("ratio value phi[{m},{j}] is zero; amplitude is undefined there")]
    ZeroRatio { m: usize, j: usize },

    #[error(
        "phase mismatch between m1={m1} and m2={m2}: fractional parts of the \
         log-scaled indices differ by {delta:.4} (limit 0.02); pick m2 = round(m1*E^k)"
    )]
    PhaseMismatch { m1: usize, m2: usize, delta: f64 },

    /// Finite-depth compositions are only meaningful while the iterates stay
    /// near the unit disk; too large y for the chosen depth escapes instead.
    #[error(
        "characteristic-function iterate unstable at y={y:.3}: |Pi_t(iy)|={modulus:.3e} \
         exceeds 1; depth t={t} is too small for this frequency (need roughly y < 0.7*E^t, \
         E^t={scale:.1}) — increase t or decrease y_max"
    )]
    UnstableReference {
        t: usize,
        y: f64,
        modulus: f64,
        scale: f64,
    },

    #[error("no trial ended at the conditioning state: count(X_t = {j}) = 0; \
             reduce the horizon or raise the trial budget")]
    EmptyConditioning { j: u64 },
}
