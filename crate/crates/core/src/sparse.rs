//! Compressed-row sparse matrices.

use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// A sparse matrix in compressed-row form.
///
/// Column indices are strictly increasing within every row and all stored
/// values are finite.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            row_ptr: vec![0; rows + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            rows: n,
            cols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    /// Builds a matrix from raw compressed-row arrays, validating every invariant.
    pub fn from_csr(
        rows: usize,
        cols: usize,
        row_ptr: Vec<usize>,
        col_idx: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if row_ptr.len() != rows + 1 || row_ptr[0] != 0 {
            return Err(Error::DimensionMismatch("row pointer length"));
        }
        if col_idx.len() != values.len() || row_ptr[rows] != values.len() {
            return Err(Error::DimensionMismatch("column/value arrays"));
        }
        for r in 0..rows {
            let (s, e) = (row_ptr[r], row_ptr[r + 1]);
            if s > e {
                return Err(Error::InvalidArgument("row pointer not monotone"));
            }
            for p in s..e {
                if col_idx[p] >= cols {
                    return Err(Error::DimensionMismatch("column index out of bounds"));
                }
                if p > s && col_idx[p] <= col_idx[p - 1] {
                    return Err(Error::InvalidArgument("column indices not increasing"));
                }
            }
        }
        if let Some(p) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(p));
        }
        Ok(Self {
            rows,
            cols,
            row_ptr,
            col_idx,
            values,
        })
    }

    /// Builds a matrix from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let mut t: Vec<(usize, usize, f64)> = triplets.into_iter().collect();
        for (i, &(r, c, v)) in t.iter().enumerate() {
            if r >= rows || c >= cols {
                return Err(Error::DimensionMismatch("triplet index out of bounds"));
            }
            if !v.is_finite() {
                return Err(Error::NonFinite(i));
            }
        }
        t.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; rows + 1];
        let mut col_idx = Vec::with_capacity(t.len());
        let mut values: Vec<f64> = Vec::with_capacity(t.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in t {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..rows {
            row_ptr[r + 1] += row_ptr[r];
        }
        Ok(Self {
            rows,
            cols,
            row_ptr,
            col_idx,
            values,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column indices and values of row `r`.
    pub fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let (s, e) = (self.row_ptr[r], self.row_ptr[r + 1]);
        (&self.col_idx[s..e], &self.values[s..e])
    }

    /// Entry `(r, c)`, zero when not stored.
    pub fn get(&self, r: usize, c: usize) -> f64 {
        let (cols, vals) = self.row(r);
        cols.binary_search(&c).map_or(0.0, |p| vals[p])
    }

    /// Iterates over stored entries as `(row, col, value)`.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.rows).flat_map(move |r| {
            let (c, v) = self.row(r);
            c.iter().zip(v).map(move |(&c, &v)| (r, c, v))
        })
    }

    /// Mutable access to stored values; the pattern stays fixed.
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn scale(&mut self, s: f64) {
        self.values.iter_mut().for_each(|v| *v *= s);
    }

    /// `y = A x`.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols, "mul_vec dimension");
        (0..self.rows)
            .map(|r| {
                let (c, v) = self.row(r);
                c.iter().zip(v).map(|(&c, &v)| v * x[c]).sum()
            })
            .collect()
    }

    /// `y = A^T x`.
    pub fn transpose_mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.rows, "transpose_mul_vec dimension");
        let mut y = vec![0.0; self.cols];
        for r in 0..self.rows {
            let (c, v) = self.row(r);
            for (&c, &v) in c.iter().zip(v) {
                y[c] += v * x[r];
            }
        }
        y
    }

    /// `x^T A x` for a square matrix.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        assert_eq!(self.rows, self.cols);
        (0..self.rows)
            .map(|r| {
                let (c, v) = self.row(r);
                x[r] * c.iter().zip(v).map(|(&c, &v)| v * x[c]).sum::<f64>()
            })
            .sum()
    }

    /// Sum of every row.
    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.rows).map(|r| self.row(r).1.iter().sum()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut counts = vec![0usize; self.cols + 1];
        for &c in &self.col_idx {
            counts[c + 1] += 1;
        }
        for c in 0..self.cols {
            counts[c + 1] += counts[c];
        }
        let row_ptr = counts.clone();
        let mut next = counts;
        let mut col_idx = vec![0; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        for r in 0..self.rows {
            let (c, v) = self.row(r);
            for (&c, &v) in c.iter().zip(v) {
                let p = next[c];
                col_idx[p] = r;
                values[p] = v;
                next[c] += 1;
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            row_ptr,
            col_idx,
            values,
        }
    }

    /// The Gram matrix `A^T A` (cols x cols).
    pub fn gram(&self) -> Self {
        let at = self.transpose();
        let mut row_ptr = vec![0usize; self.cols + 1];
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        let mut acc = vec![0.0f64; self.cols];
        let mut mark = vec![usize::MAX; self.cols];
        let mut pattern: Vec<usize> = Vec::new();
        for i in 0..self.cols {
            pattern.clear();
            let (rs, vs) = at.row(i);
            for (&r, &vi) in rs.iter().zip(vs) {
                let (cs, vr) = self.row(r);
                for (&j, &vj) in cs.iter().zip(vr) {
                    if mark[j] != i {
                        mark[j] = i;
                        acc[j] = 0.0;
                        pattern.push(j);
                    }
                    acc[j] += vi * vj;
                }
            }
            pattern.sort_unstable();
            for &j in &pattern {
                col_idx.push(j);
                values.push(acc[j]);
            }
            row_ptr[i + 1] = col_idx.len();
        }
        Self {
            rows: self.cols,
            cols: self.cols,
            row_ptr,
            col_idx,
            values,
        }
    }

    /// Kronecker product `A ⊗ B`.
    pub fn kron(&self, other: &Self) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut row_ptr = Vec::with_capacity(rows + 1);
        row_ptr.push(0);
        let mut col_idx = Vec::with_capacity(self.nnz() * other.nnz());
        let mut values = Vec::with_capacity(self.nnz() * other.nnz());
        for ra in 0..self.rows {
            let (ca, va) = self.row(ra);
            for rb in 0..other.rows {
                let (cb, vb) = other.row(rb);
                for (&a, &x) in ca.iter().zip(va) {
                    for (&b, &y) in cb.iter().zip(vb) {
                        col_idx.push(a * other.cols + b);
                        values.push(x * y);
                    }
                }
                row_ptr.push(col_idx.len());
            }
        }
        Self {
            rows,
            cols,
            row_ptr,
            col_idx,
            values,
        }
    }

    /// Element-wise sum of two matrices of equal shape.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch("matrix sum"));
        }
        Self::from_triplets(
            self.rows,
            self.cols,
            self.triplets().chain(other.triplets()),
        )
    }

    /// Whether the matrix equals its transpose exactly.
    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols && self.triplets().all(|(r, c, v)| self.get(c, r) == v)
    }

    /// Dense row-major copy; intended for small matrices and tests.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.rows * self.cols];
        for (r, c, v) in self.triplets() {
            d[r * self.cols + c] = v;
        }
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SparseMatrix {
        SparseMatrix::from_triplets(
            3,
            2,
            [(0, 0, 1.0), (0, 1, 2.0), (2, 1, 3.0), (2, 1, 1.0), (1, 0, -1.0)],
        )
        .unwrap()
    }

    #[test]
    fn triplets_sum_duplicates() {
        let a = small();
        assert_eq!(a.nnz(), 4);
        assert_eq!(a.get(2, 1), 4.0);
        assert_eq!(a.get(1, 1), 0.0);
    }

    #[test]
    fn products_match_dense() {
        let a = small();
        assert_eq!(a.mul_vec(&[1.0, 1.0]), vec![3.0, -1.0, 4.0]);
        assert_eq!(a.transpose_mul_vec(&[1.0, 1.0, 1.0]), vec![0.0, 6.0]);
        let g = a.gram();
        // A^T A = [[2, 2], [2, 20]]
        assert_eq!(g.to_dense(), vec![2.0, 2.0, 2.0, 20.0]);
        assert!(g.is_symmetric());
    }

    #[test]
    fn transpose_twice_is_identity() {
        let a = small();
        assert_eq!(a.transpose().transpose(), a);
    }

    #[test]
    fn kron_with_identity() {
        let i2 = SparseMatrix::identity(2);
        let a = SparseMatrix::from_triplets(2, 2, [(0, 1, 5.0), (1, 0, 7.0)]).unwrap();
        let k = i2.kron(&a);
        assert_eq!(k.rows(), 4);
        assert_eq!(k.get(0, 1), 5.0);
        assert_eq!(k.get(3, 2), 7.0);
        assert_eq!(k.get(0, 3), 0.0);
    }

    #[test]
    fn rejects_unsorted_csr() {
        let r = SparseMatrix::from_csr(1, 3, vec![0, 2], vec![2, 1], vec![1.0, 1.0]);
        assert!(r.is_err());
        let r = SparseMatrix::from_csr(1, 3, vec![0, 1], vec![1], vec![f64::NAN]);
        assert_eq!(r, Err(Error::NonFinite(0)));
    }
}
