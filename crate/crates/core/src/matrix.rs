//! Dense matrices, given-entry masks, and column permutations.
//!
//! All matrices are row-major `f64`. A [`MaskedMatrix`] pairs values with a
//! boolean mask (`true` = given) and enforces the coverage invariant the
//! masked solvers rely on: every row and every column holds at least one
//! given, finite entry.

use crate::error::{Error, Result};

/// Dense row-major matrix of finite `f64` values.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// Matrix with every entry set to `fill`.
    pub fn filled(rows: usize, cols: usize, fill: f64) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![fill; rows * cols],
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::filled(rows, cols, 0.0)
    }

    /// Builds from a row-major vector; `data.len()` must equal `rows * cols`.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                context: "Matrix::from_vec",
                expected: format!("{} values", rows * cols),
                found: format!("{}", data.len()),
            });
        }
        Ok(Matrix { rows, cols, data })
    }

    /// Builds from nested rows. Intended for small literals in tests.
    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows in Matrix::from_rows");
            data.extend_from_slice(row);
        }
        Matrix { rows: r, cols: c, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    /// Entrywise map.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Mean of all entries.
    pub fn mean(&self) -> f64 {
        if self.data.is_empty() {
            return 0.0;
        }
        self.data.iter().sum::<f64>() / self.data.len() as f64
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.data.iter().copied()
    }
}

/// Boolean matrix marking given (`true`) entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    rows: usize,
    cols: usize,
    data: Vec<bool>,
}

impl Mask {
    pub fn filled(rows: usize, cols: usize, value: bool) -> Self {
        Mask {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<bool>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                context: "Mask::from_vec",
                expected: format!("{} flags", rows * cols),
                found: format!("{}", data.len()),
            });
        }
        Ok(Mask { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[bool] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }

    /// Indices of `true` entries in row-major order.
    pub fn true_entries(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.count());
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self.get(i, j) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Entrywise AND.
    pub fn and(&self, other: &Mask) -> Mask {
        assert_eq!(self.shape(), other.shape());
        Mask {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| a && b)
                .collect(),
        }
    }
}

/// Dense matrix with a per-entry given/missing mask.
///
/// Invariants, enforced at construction:
/// - every given entry is finite;
/// - every row and every column has at least one given entry.
#[derive(Debug, Clone)]
pub struct MaskedMatrix {
    values: Matrix,
    mask: Mask,
}

/// Equality compares masks and the values at given entries; whatever sits at
/// missing positions is irrelevant.
impl PartialEq for MaskedMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.values.shape() == other.values.shape()
            && self.mask == other.mask
            && self
                .given_entries()
                .zip(other.given_entries())
                .all(|(a, b)| a == b)
    }
}

impl MaskedMatrix {
    pub fn new(values: Matrix, mask: Mask) -> Result<Self> {
        if values.shape() != mask.shape() {
            return Err(Error::DimensionMismatch {
                context: "MaskedMatrix::new",
                expected: format!("{:?}", values.shape()),
                found: format!("{:?}", mask.shape()),
            });
        }
        let (rows, cols) = values.shape();
        let mut row_cover = vec![false; rows];
        let mut col_cover = vec![false; cols];
        for i in 0..rows {
            for j in 0..cols {
                if mask.get(i, j) {
                    let v = values.get(i, j);
                    if !v.is_finite() {
                        return Err(Error::NonFiniteEntry { row: i, col: j, value: v });
                    }
                    row_cover[i] = true;
                    col_cover[j] = true;
                }
            }
        }
        if let Some(i) = row_cover.iter().position(|&c| !c) {
            return Err(Error::UncoveredRow(i));
        }
        if let Some(j) = col_cover.iter().position(|&c| !c) {
            return Err(Error::UncoveredColumn(j));
        }
        Ok(MaskedMatrix { values, mask })
    }

    /// Wraps a fully-given matrix (all-true mask).
    pub fn fully_given(values: Matrix) -> Result<Self> {
        let mask = Mask::filled(values.rows(), values.cols(), true);
        MaskedMatrix::new(values, mask)
    }

    /// Same values restricted to a different mask (e.g. a train split).
    pub fn with_mask(&self, mask: Mask) -> Result<Self> {
        MaskedMatrix::new(self.values.clone(), mask)
    }

    pub fn rows(&self) -> usize {
        self.values.rows()
    }

    pub fn cols(&self) -> usize {
        self.values.cols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.values.shape()
    }

    #[inline]
    pub fn is_given(&self, i: usize, j: usize) -> bool {
        self.mask.get(i, j)
    }

    /// Raw value at (i, j); meaningful only where the mask is true.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values.get(i, j)
    }

    pub fn values(&self) -> &Matrix {
        &self.values
    }

    pub fn mask(&self) -> &Mask {
        &self.mask
    }

    pub fn is_fully_given(&self) -> bool {
        self.mask.count() == self.rows() * self.cols()
    }

    pub fn given_count(&self) -> usize {
        self.mask.count()
    }

    /// `(i, j, value)` for every given entry, row-major.
    pub fn given_entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let cols = self.cols();
        (0..self.rows()).flat_map(move |i| {
            (0..cols).filter_map(move |j| {
                if self.mask.get(i, j) {
                    Some((i, j, self.values.get(i, j)))
                } else {
                    None
                }
            })
        })
    }

    /// Mean over given entries.
    pub fn given_mean(&self) -> f64 {
        let mut sum = 0.0;
        let mut n = 0usize;
        for (_, _, v) in self.given_entries() {
            sum += v;
            n += 1;
        }
        sum / n as f64
    }
}

/// Column permutation with its inverse.
///
/// `forward[j]` is the source column placed at position `j`, so permuting a
/// matrix gives `out[:, j] = in[:, forward[j]]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    forward: Vec<usize>,
    inverse: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        let forward: Vec<usize> = (0..n).collect();
        Permutation {
            inverse: forward.clone(),
            forward,
        }
    }

    /// Builds from a forward map; indices must be a permutation of `0..n`.
    pub fn from_forward(forward: Vec<usize>) -> Result<Self> {
        let n = forward.len();
        let mut inverse = vec![usize::MAX; n];
        for (pos, &src) in forward.iter().enumerate() {
            if src >= n || inverse[src] != usize::MAX {
                return Err(Error::DimensionMismatch {
                    context: "Permutation::from_forward",
                    expected: format!("permutation of 0..{n}"),
                    found: format!("index {src} at position {pos}"),
                });
            }
            inverse[src] = pos;
        }
        Ok(Permutation { forward, inverse })
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.forward.iter().enumerate().all(|(i, &f)| i == f)
    }

    pub fn forward(&self) -> &[usize] {
        &self.forward
    }

    pub fn inverse(&self) -> &[usize] {
        &self.inverse
    }
}

/// Reorders columns: `out[:, j] = input[:, p.forward[j]]`, mask included.
pub fn permute_columns(input: &MaskedMatrix, p: &Permutation) -> Result<MaskedMatrix> {
    if p.len() != input.cols() {
        return Err(Error::DimensionMismatch {
            context: "permute_columns",
            expected: format!("permutation of length {}", input.cols()),
            found: format!("{}", p.len()),
        });
    }
    let (rows, cols) = input.shape();
    let mut values = Matrix::zeros(rows, cols);
    let mut mask = Mask::filled(rows, cols, false);
    for j in 0..cols {
        let src = p.forward()[j];
        for i in 0..rows {
            values.set(i, j, input.get(i, src));
            mask.set(i, j, input.is_given(i, src));
        }
    }
    MaskedMatrix::new(values, mask)
}

/// Maps the columns of a fitted factor back to the original order:
/// `out[:, j] = v[:, p.inverse[j]]`. Undoes [`permute_columns`].
pub fn apply_inverse_to_columns(v: &Matrix, p: &Permutation) -> Result<Matrix> {
    if p.len() != v.cols() {
        return Err(Error::DimensionMismatch {
            context: "apply_inverse_to_columns",
            expected: format!("permutation of length {}", v.cols()),
            found: format!("{}", p.len()),
        });
    }
    let mut out = Matrix::zeros(v.rows(), v.cols());
    for j in 0..v.cols() {
        let src = p.inverse()[j];
        for i in 0..v.rows() {
            out.set(i, j, v.get(i, src));
        }
    }
    Ok(out)
}
