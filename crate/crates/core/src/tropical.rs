//! Scalar and matrix algebra over the tropical (max,+) semiring.
//!
//! The carrier is ℝ ∪ {−∞} with `max` as addition (⊕) and `+` as
//! multiplication (⊗); −∞ is the additive identity and 0 the multiplicative
//! identity. −∞ is a dedicated enum variant rather than `f64::NEG_INFINITY`
//! so that absorption is explicit and NaN can never enter a reduction.
//!
//! The masked (min,+) product [`sparse_minplus_matmul`] is the mechanism for
//! solving linear systems while skipping missing entries, and [`b_norm`] is
//! the factorization objective: the sum of absolute residuals over given
//! entries.

use crate::error::{Error, Result};
use crate::matrix::{Matrix, MaskedMatrix};

/// Element of ℝ ∪ {−∞}. Finite values are guaranteed finite; +∞ and NaN are
/// unrepresentable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TropicalValue {
    NegInfinity,
    Finite(f64),
}

impl TropicalValue {
    /// Wraps a finite value.
    ///
    /// # Panics
    /// If `v` is NaN or infinite.
    pub fn finite(v: f64) -> Self {
        assert!(v.is_finite(), "TropicalValue::finite requires a finite value, got {v}");
        TropicalValue::Finite(v)
    }

    /// Additive identity −∞.
    pub fn zero() -> Self {
        TropicalValue::NegInfinity
    }

    /// Multiplicative identity 0.
    pub fn one() -> Self {
        TropicalValue::Finite(0.0)
    }

    pub fn is_neg_infinity(&self) -> bool {
        matches!(self, TropicalValue::NegInfinity)
    }

    /// Tropical addition: max, with −∞ as the neutral element.
    pub fn tropical_add(self, other: Self) -> Self {
        match (self, other) {
            (TropicalValue::NegInfinity, w) => w,
            (z, TropicalValue::NegInfinity) => z,
            (TropicalValue::Finite(a), TropicalValue::Finite(b)) => {
                TropicalValue::Finite(if a >= b { a } else { b })
            }
        }
    }

    /// Tropical multiplication: +, with −∞ absorbing.
    pub fn tropical_mul(self, other: Self) -> Self {
        match (self, other) {
            (TropicalValue::NegInfinity, _) | (_, TropicalValue::NegInfinity) => {
                TropicalValue::NegInfinity
            }
            (TropicalValue::Finite(a), TropicalValue::Finite(b)) => TropicalValue::Finite(a + b),
        }
    }

    /// Semiring order: z ⪯ w iff z ⊕ w = w; −∞ is the bottom element.
    pub fn tropical_leq(self, other: Self) -> bool {
        self.tropical_add(other) == other
    }
}

impl std::ops::Add for TropicalValue {
    type Output = TropicalValue;
    fn add(self, rhs: Self) -> Self {
        self.tropical_add(rhs)
    }
}

impl std::ops::Mul for TropicalValue {
    type Output = TropicalValue;
    fn mul(self, rhs: Self) -> Self {
        self.tropical_mul(rhs)
    }
}

/// Max-plus matrix product: `out[i][j] = max_k (a[i][k] + b[k][j])`.
///
/// Both operands are fully given; the k-loop runs in fixed ascending order so
/// results are bit-reproducible.
pub fn trop_matmul(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    if a.cols() != b.rows() {
        return Err(Error::DimensionMismatch {
            context: "trop_matmul",
            expected: format!("inner dimension {}", a.cols()),
            found: format!("{}", b.rows()),
        });
    }
    let (m, p) = a.shape();
    let n = b.cols();
    let mut out = Matrix::zeros(m, n);
    for i in 0..m {
        let a_row = a.row(i);
        let out_row = out.row_mut(i);
        for (j, slot) in out_row.iter_mut().enumerate() {
            let mut best = a_row[0] + b.get(0, j);
            for k in 1..p {
                let v = a_row[k] + b.get(k, j);
                if v > best {
                    best = v;
                }
            }
            *slot = best;
        }
    }
    Ok(out)
}

/// Masked (min,+) product ⊗*: minimizes `a[i][k] + b[k][j]` over the `k`
/// where both entries are given. The result is fully given; an output entry
/// with no given pair is an [`Error::EmptyMinimum`].
pub fn sparse_minplus_matmul(a: &MaskedMatrix, b: &MaskedMatrix) -> Result<Matrix> {
    if a.cols() != b.rows() {
        return Err(Error::DimensionMismatch {
            context: "sparse_minplus_matmul",
            expected: format!("inner dimension {}", a.cols()),
            found: format!("{}", b.rows()),
        });
    }
    let (m, p) = a.shape();
    let n = b.cols();
    let mut out = Matrix::zeros(m, n);
    for i in 0..m {
        for j in 0..n {
            let mut best: Option<f64> = None;
            for k in 0..p {
                if a.is_given(i, k) && b.is_given(k, j) {
                    let v = a.get(i, k) + b.get(k, j);
                    best = Some(match best {
                        Some(cur) if cur <= v => cur,
                        _ => v,
                    });
                }
            }
            match best {
                Some(v) => out.set(i, j, v),
                None => return Err(Error::EmptyMinimum { row: i, col: j }),
            }
        }
    }
    Ok(out)
}

/// Objective: sum of `|R[i][j] - approx[i][j]|` over the given entries of `R`.
pub fn b_norm(r: &MaskedMatrix, approx: &Matrix) -> Result<f64> {
    if r.shape() != approx.shape() {
        return Err(Error::DimensionMismatch {
            context: "b_norm",
            expected: format!("{:?}", r.shape()),
            found: format!("{:?}", approx.shape()),
        });
    }
    let mut sum = 0.0;
    for i in 0..r.rows() {
        let mask_row = r.mask().row(i);
        let val_row = r.values().row(i);
        let approx_row = approx.row(i);
        for j in 0..r.cols() {
            if mask_row[j] {
                sum += (val_row[j] - approx_row[j]).abs();
            }
        }
    }
    Ok(sum)
}

/// `b_norm(r, U ⊗ V)` without materializing the product. Accumulation stops
/// early once the partial sum reaches `bail_above`, returning that bound
/// instead; pass `f64::INFINITY` for an exact result.
pub(crate) fn b_norm_of_product(
    r: &MaskedMatrix,
    u: &Matrix,
    v: &Matrix,
    bail_above: f64,
) -> f64 {
    let rank = u.cols();
    let mut sum = 0.0;
    for i in 0..r.rows() {
        let mask_row = r.mask().row(i);
        let val_row = r.values().row(i);
        let u_row = u.row(i);
        for j in 0..r.cols() {
            if mask_row[j] {
                let mut best = u_row[0] + v.get(0, j);
                for k in 1..rank {
                    let cand = u_row[k] + v.get(k, j);
                    if cand > best {
                        best = cand;
                    }
                }
                sum += (val_row[j] - best).abs();
            }
        }
        if sum >= bail_above {
            return sum;
        }
    }
    sum
}
