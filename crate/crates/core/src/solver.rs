//! Residuated solving of tropical linear systems.
//!
//! Over (max,+), the inequality system `A ⊗ x ⪯ c` always has solutions and
//! admits a greatest one, computed entrywise as `x_i = min_j (c_j - A_ji)`.
//! [`solve_left`] and [`solve_right`] are the column-/row-wise matrix forms
//! used by the factorization updates, generalized to skip missing entries of
//! the data matrix. A minimum with no given term is a hard
//! [`Error::EmptyMinimum`] rather than a silent +∞: an infinite factor entry
//! would poison every later max-plus product.

use crate::error::{Error, Result};
use crate::matrix::{Matrix, MaskedMatrix};

/// System `A ⊗ x ⪯ c` with a per-entry given mask on `A` and on `c`.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    a: MaskedMatrix,
    c: Vec<f64>,
    c_given: Vec<bool>,
}

impl LinearSystem {
    pub fn new(a: MaskedMatrix, c: Vec<f64>, c_given: Vec<bool>) -> Result<Self> {
        if c.len() != a.rows() || c_given.len() != a.rows() {
            return Err(Error::DimensionMismatch {
                context: "LinearSystem::new",
                expected: format!("{} right-hand entries", a.rows()),
                found: format!("{} values / {} flags", c.len(), c_given.len()),
            });
        }
        for (j, (&v, &given)) in c.iter().zip(&c_given).enumerate() {
            if given && !v.is_finite() {
                return Err(Error::NonFiniteEntry { row: j, col: 0, value: v });
            }
        }
        Ok(LinearSystem { a, c, c_given })
    }

    /// Fully-given convenience constructor.
    pub fn fully_given(a: Matrix, c: Vec<f64>) -> Result<Self> {
        let given = vec![true; c.len()];
        LinearSystem::new(MaskedMatrix::fully_given(a)?, c, given)
    }

    pub fn coefficients(&self) -> &MaskedMatrix {
        &self.a
    }

    pub fn rhs(&self) -> &[f64] {
        &self.c
    }
}

/// Greatest subsolution of `A ⊗ x = c`: `x_i = min_j (c_j - A_ji)`, the
/// minimum running over rows where both `A[j][i]` and `c_j` are given.
pub fn greatest_subsolution(sys: &LinearSystem) -> Result<Vec<f64>> {
    let a = &sys.a;
    let (m, n) = a.shape();
    let mut x = vec![f64::INFINITY; n];
    let mut seen = vec![false; n];
    for j in 0..m {
        if !sys.c_given[j] {
            continue;
        }
        let c_j = sys.c[j];
        for i in 0..n {
            if a.is_given(j, i) {
                let v = c_j - a.get(j, i);
                if !seen[i] || v < x[i] {
                    x[i] = v;
                    seen[i] = true;
                }
            }
        }
    }
    if let Some(i) = seen.iter().position(|&s| !s) {
        return Err(Error::EmptyMinimum { row: 0, col: i });
    }
    Ok(x)
}

/// Column-wise greatest subsolution of `U ⊗ X = R` on given entries:
/// `V[k][j] = min_i (R[i][j] - U[i][k])` over rows where `R[i][j]` is given.
///
/// This is `(-U)^T ⊗* R` with `U` fully given.
pub fn solve_left(u: &Matrix, r: &MaskedMatrix) -> Result<Matrix> {
    if u.rows() != r.rows() {
        return Err(Error::DimensionMismatch {
            context: "solve_left",
            expected: format!("{} rows", r.rows()),
            found: format!("{}", u.rows()),
        });
    }
    let rank = u.cols();
    let n = r.cols();
    let mut v = Matrix::zeros(rank, n);
    for k in 0..rank {
        solve_left_row(u, r, k, v.row_mut(k))?;
    }
    Ok(v)
}

/// One row of [`solve_left`]: fills `out[j] = min_i (R[i][j] - U[i][k])`.
/// Factored out so the fit loop can refresh a single row after seeding one
/// entry of `U`; the reduction order is identical to the full solve.
pub(crate) fn solve_left_row(
    u: &Matrix,
    r: &MaskedMatrix,
    k: usize,
    out: &mut [f64],
) -> Result<()> {
    let (m, n) = r.shape();
    debug_assert_eq!(out.len(), n);
    let mut seen = vec![false; n];
    for i in 0..m {
        let u_ik = u.get(i, k);
        let mask_row = r.mask().row(i);
        let val_row = r.values().row(i);
        for j in 0..n {
            if mask_row[j] {
                let cand = val_row[j] - u_ik;
                if !seen[j] || cand < out[j] {
                    out[j] = cand;
                    seen[j] = true;
                }
            }
        }
    }
    if let Some(j) = seen.iter().position(|&s| !s) {
        return Err(Error::EmptyMinimum { row: k, col: j });
    }
    Ok(())
}

/// Row-wise mirror: `U[i][k] = min_j (R[i][j] - V[k][j])` over columns where
/// `R[i][j]` is given. This is `R ⊗* (-V)^T` with `V` fully given.
pub fn solve_right(v: &Matrix, r: &MaskedMatrix) -> Result<Matrix> {
    if v.cols() != r.cols() {
        return Err(Error::DimensionMismatch {
            context: "solve_right",
            expected: format!("{} columns", r.cols()),
            found: format!("{}", v.cols()),
        });
    }
    let rank = v.rows();
    let m = r.rows();
    let mut u = Matrix::zeros(m, rank);
    for k in 0..rank {
        solve_right_col(v, r, k, &mut u)?;
    }
    Ok(u)
}

/// One column of [`solve_right`]: fills `u[:, k]`.
pub(crate) fn solve_right_col(
    v: &Matrix,
    r: &MaskedMatrix,
    k: usize,
    u: &mut Matrix,
) -> Result<()> {
    let (m, n) = r.shape();
    let v_row = v.row(k);
    for i in 0..m {
        let mask_row = r.mask().row(i);
        let val_row = r.values().row(i);
        let mut best: Option<f64> = None;
        for j in 0..n {
            if mask_row[j] {
                let cand = val_row[j] - v_row[j];
                best = Some(match best {
                    Some(cur) if cur <= cand => cur,
                    _ => cand,
                });
            }
        }
        match best {
            Some(val) => u.set(i, k, val),
            None => return Err(Error::EmptyMinimum { row: i, col: k }),
        }
    }
    Ok(())
}
