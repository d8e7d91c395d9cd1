//! Sparse Cholesky factorization of symmetric positive-definite matrices.
//!
//! The factorization is split into a symbolic phase ([`SymbolicCholesky`]),
//! computed once per sparsity pattern, and a numeric phase that can be
//! repeated for new values on the same pattern. With the permutation `P`
//! chosen by the ordering, the factor satisfies `P A Pᵀ = L Lᵀ`.

use alloc::vec;
use alloc::vec::Vec;

use crate::sparse::SparseMatrix;
use crate::{Error, Result};

const NONE: usize = usize::MAX;

/// Fill-reducing ordering applied before factorization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Ordering {
    /// Keep the input order.
    Natural,
    /// Greedy minimum degree on the explicit elimination graph; ties go to
    /// the lowest index.
    #[default]
    MinimumDegree,
}

/// Minimum-degree permutation of a symmetric pattern, as `perm[new] = old`.
pub fn minimum_degree(a: &SparseMatrix) -> Vec<usize> {
    let n = a.rows();
    let mut adj: Vec<Vec<usize>> = (0..n)
        .map(|r| a.row(r).0.iter().copied().filter(|&c| c != r).collect())
        .collect();
    let mut queue: alloc::collections::BTreeSet<(usize, usize)> =
        (0..n).map(|v| (adj[v].len(), v)).collect();
    let mut eliminated = vec![false; n];
    let mut perm = Vec::with_capacity(n);
    let mut merged = Vec::new();
    while let Some((_, v)) = queue.pop_first() {
        eliminated[v] = true;
        perm.push(v);
        let nbrs = core::mem::take(&mut adj[v]);
        for &u in &nbrs {
            queue.remove(&(adj[u].len(), u));
            // adj[u] := (adj[u] ∪ nbrs) \ {u, v}
            merged.clear();
            let (x, y) = (&adj[u], &nbrs);
            let (mut i, mut j) = (0, 0);
            while i < x.len() || j < y.len() {
                let next = if j == y.len() || (i < x.len() && x[i] < y[j]) {
                    i += 1;
                    x[i - 1]
                } else if i == x.len() || y[j] < x[i] {
                    j += 1;
                    y[j - 1]
                } else {
                    i += 1;
                    j += 1;
                    x[i - 1]
                };
                if next != u && next != v {
                    merged.push(next);
                }
            }
            core::mem::swap(&mut adj[u], &mut merged);
            queue.insert((adj[u].len(), u));
        }
        debug_assert!(nbrs.iter().all(|&u| !eliminated[u]));
    }
    perm
}

/// Ordering, elimination tree and the non-zero pattern of the factor.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolicCholesky {
    n: usize,
    perm: Vec<usize>,
    iperm: Vec<usize>,
    parent: Vec<usize>,
    /// Column pointers of L; the diagonal is the first entry of each column.
    l_colptr: Vec<usize>,
    l_rowidx: Vec<usize>,
    /// Off-diagonal pattern of each row of L, ascending.
    row_ptr: Vec<usize>,
    row_pattern: Vec<usize>,
    /// Upper-triangle entries of `P A Pᵀ` per column: (row, index into A's values).
    a_colptr: Vec<usize>,
    a_entries: Vec<(usize, usize)>,
    a_row_ptr: Vec<usize>,
    a_col_idx: Vec<usize>,
}

impl SymbolicCholesky {
    pub fn analyze(a: &SparseMatrix, ordering: Ordering) -> Result<Self> {
        let n = a.rows();
        if a.cols() != n {
            return Err(Error::DimensionMismatch("factorization needs a square matrix"));
        }
        if !a.is_symmetric() {
            return Err(Error::InvalidArgument("matrix is not symmetric"));
        }
        let perm = match ordering {
            Ordering::Natural => (0..n).collect(),
            Ordering::MinimumDegree => minimum_degree(a),
        };
        let mut iperm = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            iperm[old] = new;
        }

        // Upper triangle of the permuted matrix, grouped by column.
        let mut a_colptr = vec![0usize; n + 1];
        for (r, c, _) in a.triplets() {
            let (pr, pc) = (iperm[r], iperm[c]);
            if pr <= pc {
                a_colptr[pc + 1] += 1;
            }
        }
        for k in 0..n {
            a_colptr[k + 1] += a_colptr[k];
        }
        let mut next = a_colptr.clone();
        let mut a_entries = vec![(0, 0); a_colptr[n]];
        for (src, (r, c, _)) in a.triplets().enumerate() {
            let (pr, pc) = (iperm[r], iperm[c]);
            if pr <= pc {
                a_entries[next[pc]] = (pr, src);
                next[pc] += 1;
            }
        }

        // Elimination tree with path compression.
        let mut parent = vec![NONE; n];
        let mut ancestor = vec![NONE; n];
        for k in 0..n {
            for &(mut i, _) in &a_entries[a_colptr[k]..a_colptr[k + 1]] {
                while i != NONE && i < k {
                    let up = ancestor[i];
                    ancestor[i] = k;
                    if up == NONE {
                        parent[i] = k;
                    }
                    i = up;
                }
            }
        }

        // Row patterns of L from the row subtrees.
        let mut mark = vec![NONE; n];
        let mut row_ptr = Vec::with_capacity(n + 1);
        row_ptr.push(0);
        let mut row_pattern = Vec::new();
        let mut counts = vec![1usize; n];
        for k in 0..n {
            mark[k] = k;
            let start = row_pattern.len();
            for &(mut i, _) in &a_entries[a_colptr[k]..a_colptr[k + 1]] {
                while mark[i] != k {
                    row_pattern.push(i);
                    mark[i] = k;
                    i = parent[i];
                }
            }
            row_pattern[start..].sort_unstable();
            for &i in &row_pattern[start..] {
                counts[i] += 1;
            }
            row_ptr.push(row_pattern.len());
        }
        let mut l_colptr = vec![0usize; n + 1];
        for j in 0..n {
            l_colptr[j + 1] = l_colptr[j] + counts[j];
        }
        let mut fill = l_colptr.clone();
        let mut l_rowidx = vec![0usize; l_colptr[n]];
        for k in 0..n {
            for &i in &row_pattern[row_ptr[k]..row_ptr[k + 1]] {
                fill[i] += 1;
                l_rowidx[fill[i]] = k;
            }
            l_rowidx[l_colptr[k]] = k;
        }

        Ok(Self {
            n,
            perm,
            iperm,
            parent,
            l_colptr,
            l_rowidx,
            row_ptr,
            row_pattern,
            a_colptr,
            a_entries,
            a_row_ptr: a.row_ptr().to_vec(),
            a_col_idx: a.col_idx().to_vec(),
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `perm[new] = old`.
    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    /// Elimination tree parents; roots are `usize::MAX`.
    pub fn etree(&self) -> &[usize] {
        &self.parent
    }

    /// Number of stored entries of L, diagonal included.
    pub fn factor_nnz(&self) -> usize {
        self.l_rowidx.len()
    }

    fn same_pattern(&self, a: &SparseMatrix) -> bool {
        a.rows() == self.n && a.row_ptr() == self.a_row_ptr && a.col_idx() == self.a_col_idx
    }
}

/// Numeric Cholesky factor together with its symbolic analysis.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseFactor {
    symbolic: SymbolicCholesky,
    l_values: Vec<f64>,
}

/// Factorizes a symmetric positive-definite matrix with a minimum-degree ordering.
pub fn factorize(q: &SparseMatrix) -> Result<SparseFactor> {
    SparseFactor::new(SymbolicCholesky::analyze(q, Ordering::MinimumDegree)?, q)
}

impl SparseFactor {
    pub fn new(symbolic: SymbolicCholesky, a: &SparseMatrix) -> Result<Self> {
        let mut f = Self {
            l_values: vec![0.0; symbolic.factor_nnz()],
            symbolic,
        };
        f.refactorize(a)?;
        Ok(f)
    }

    /// Recomputes the numeric factor for new values on the analysed pattern.
    pub fn refactorize(&mut self, a: &SparseMatrix) -> Result<()> {
        let s = &self.symbolic;
        if !s.same_pattern(a) {
            return Err(Error::DimensionMismatch("pattern differs from the analysed matrix"));
        }
        let vals = a.values();
        let lx = &mut self.l_values;
        let li = &s.l_rowidx;
        let mut x = vec![0.0f64; s.n];
        let mut fill: Vec<usize> = s.l_colptr[..s.n].to_vec();
        for k in 0..s.n {
            for &(i, src) in &s.a_entries[s.a_colptr[k]..s.a_colptr[k + 1]] {
                x[i] += vals[src];
            }
            let mut d = x[k];
            x[k] = 0.0;
            for &i in &s.row_pattern[s.row_ptr[k]..s.row_ptr[k + 1]] {
                let lki = x[i] / lx[s.l_colptr[i]];
                x[i] = 0.0;
                // entries of column i computed so far, all in rows < k
                for p in s.l_colptr[i] + 1..=fill[i] {
                    x[li[p]] -= lx[p] * lki;
                }
                d -= lki * lki;
                fill[i] += 1;
                debug_assert_eq!(li[fill[i]], k);
                lx[fill[i]] = lki;
            }
            if !(d > 0.0) {
                return Err(Error::NonPositivePivot {
                    index: s.perm[k],
                    value: d,
                });
            }
            lx[s.l_colptr[k]] = libm::sqrt(d);
        }
        Ok(())
    }

    pub fn symbolic(&self) -> &SymbolicCholesky {
        &self.symbolic
    }

    pub fn dim(&self) -> usize {
        self.symbolic.n
    }

    /// Stored factor as `(col_ptr, row_idx, values)` of L in permuted order.
    pub fn factor_csc(&self) -> (&[usize], &[usize], &[f64]) {
        (&self.symbolic.l_colptr, &self.symbolic.l_rowidx, &self.l_values)
    }

    /// Smallest diagonal entry of L.
    pub fn min_pivot(&self) -> f64 {
        let s = &self.symbolic;
        (0..s.n)
            .map(|j| self.l_values[s.l_colptr[j]])
            .fold(f64::INFINITY, f64::min)
    }

    /// `log det A = 2 Σ log L_jj`.
    pub fn log_det(&self) -> f64 {
        let s = &self.symbolic;
        2.0 * (0..s.n)
            .map(|j| libm::log(self.l_values[s.l_colptr[j]]))
            .sum::<f64>()
    }

    /// Solves `L y = y` in place (permuted coordinates).
    pub fn solve_lower_in_place(&self, y: &mut [f64]) {
        let s = &self.symbolic;
        for j in 0..s.n {
            let (a, b) = (s.l_colptr[j], s.l_colptr[j + 1]);
            y[j] /= self.l_values[a];
            let yj = y[j];
            for p in a + 1..b {
                y[s.l_rowidx[p]] -= self.l_values[p] * yj;
            }
        }
    }

    /// Solves `Lᵀ x = x` in place (permuted coordinates).
    pub fn solve_upper_in_place(&self, x: &mut [f64]) {
        let s = &self.symbolic;
        for j in (0..s.n).rev() {
            let (a, b) = (s.l_colptr[j], s.l_colptr[j + 1]);
            let mut v = x[j];
            for p in a + 1..b {
                v -= self.l_values[p] * x[s.l_rowidx[p]];
            }
            x[j] = v / self.l_values[a];
        }
    }

    /// Applies `P`: returns `v` in permuted coordinates.
    pub fn permute(&self, v: &[f64]) -> Vec<f64> {
        self.symbolic.perm.iter().map(|&old| v[old]).collect()
    }

    /// Applies `Pᵀ`: returns permuted `w` in original coordinates.
    pub fn unpermute(&self, w: &[f64]) -> Vec<f64> {
        let mut v = vec![0.0; w.len()];
        for (new, &old) in self.symbolic.perm.iter().enumerate() {
            v[old] = w[new];
        }
        v
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.dim(), "solve dimension");
        let mut w = self.permute(b);
        self.solve_lower_in_place(&mut w);
        self.solve_upper_in_place(&mut w);
        self.unpermute(&w)
    }

    /// Diagonal of `A⁻¹`, through one sparse forward solve per column.
    ///
    /// `(A⁻¹)_ii = ‖L⁻¹ P e_i‖²`, and `L⁻¹ e_j` is non-zero only on the
    /// elimination-tree path from `j` to its root.
    pub fn inverse_diagonal(&self) -> Vec<f64> {
        let s = &self.symbolic;
        let mut x = vec![0.0f64; s.n];
        let mut path = Vec::new();
        let mut diag_perm = vec![0.0; s.n];
        for j in 0..s.n {
            path.clear();
            let mut t = j;
            while t != NONE {
                path.push(t);
                t = s.parent[t];
            }
            x[j] = 1.0;
            let mut sum = 0.0;
            for &t in &path {
                let (a, b) = (s.l_colptr[t], s.l_colptr[t + 1]);
                let xt = x[t] / self.l_values[a];
                x[t] = 0.0;
                sum += xt * xt;
                for p in a + 1..b {
                    x[s.l_rowidx[p]] -= self.l_values[p] * xt;
                }
            }
            diag_perm[j] = sum;
        }
        self.unpermute(&diag_perm)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    fn tridiag(n: usize) -> SparseMatrix {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
                t.push((i + 1, i, -1.0));
            }
        }
        SparseMatrix::from_triplets(n, n, t).unwrap()
    }

    /// Dense Cholesky-based solve used as an oracle.
    fn dense_solve(a: &[f64], n: usize, b: &[f64]) -> Vec<f64> {
        let mut l = vec![0.0; n * n];
        for j in 0..n {
            let mut d = a[j * n + j];
            for k in 0..j {
                d -= l[j * n + k] * l[j * n + k];
            }
            l[j * n + j] = d.sqrt();
            for i in j + 1..n {
                let mut v = a[i * n + j];
                for k in 0..j {
                    v -= l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = v / l[j * n + j];
            }
        }
        let mut y = b.to_vec();
        for i in 0..n {
            for k in 0..i {
                y[i] -= l[i * n + k] * y[k];
            }
            y[i] /= l[i * n + i];
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                y[i] -= l[k * n + i] * y[k];
            }
            y[i] /= l[i * n + i];
        }
        y
    }

    #[test]
    fn identity_factor_is_identity() {
        let f = factorize(&SparseMatrix::identity(6)).unwrap();
        let (cp, _, v) = f.factor_csc();
        assert_eq!(cp, &[0, 1, 2, 3, 4, 5, 6]);
        assert!(v.iter().all(|&x| x == 1.0));
    }

    #[test]
    fn tridiagonal_solve_matches_dense() {
        let a = tridiag(5);
        let b = [1.0, -2.0, 0.5, 3.0, 4.0];
        let want = dense_solve(&a.to_dense(), 5, &b);
        for ordering in [Ordering::Natural, Ordering::MinimumDegree] {
            let f = SparseFactor::new(SymbolicCholesky::analyze(&a, ordering).unwrap(), &a).unwrap();
            let x = f.solve(&b);
            for (x, w) in x.iter().zip(&want) {
                assert!((x - w).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn indefinite_reports_pivot() {
        let a = SparseMatrix::from_triplets(
            2,
            2,
            [(0, 0, 1.0), (0, 1, 2.0), (1, 0, 2.0), (1, 1, 1.0)],
        )
        .unwrap();
        let e = SparseFactor::new(SymbolicCholesky::analyze(&a, Ordering::Natural).unwrap(), &a)
            .unwrap_err();
        assert!(matches!(e, Error::NonPositivePivot { index: 1, .. }));
    }

    #[test]
    fn asymmetric_rejected() {
        let a = SparseMatrix::from_triplets(2, 2, [(0, 0, 1.0), (0, 1, 0.5), (1, 1, 1.0)]).unwrap();
        assert!(SymbolicCholesky::analyze(&a, Ordering::Natural).is_err());
    }

    #[test]
    fn refactorize_requires_same_pattern() {
        let a = tridiag(4);
        let mut f = factorize(&a).unwrap();
        let mut b = a.clone();
        b.scale(3.0);
        f.refactorize(&b).unwrap();
        let x = f.solve(&[3.0, 0.0, 0.0, 3.0]);
        let want = dense_solve(&b.to_dense(), 4, &[3.0, 0.0, 0.0, 3.0]);
        for (x, w) in x.iter().zip(&want) {
            assert!((x - w).abs() < 1e-12);
        }
        assert!(f.refactorize(&tridiag(5)).is_err());
    }

    #[test]
    fn minimum_degree_is_a_permutation() {
        let a = tridiag(30);
        let mut p = minimum_degree(&a);
        p.sort_unstable();
        assert_eq!(p, (0..30).collect::<Vec<_>>());
    }

    #[test]
    fn inverse_diagonal_matches_dense() {
        let a = tridiag(7);
        let f = factorize(&a).unwrap();
        let d = f.inverse_diagonal();
        for i in 0..7 {
            let mut e = vec![0.0; 7];
            e[i] = 1.0;
            let col = dense_solve(&a.to_dense(), 7, &e);
            assert!((d[i] - col[i]).abs() < 1e-12);
        }
    }
}
