//! Sparse Boolean matrices in compressed row layout.
//!
//! A [`SparseBoolMatrix`] stores only the positions holding a logical one.
//! Every kernel here works over the Boolean semiring `({0,1}, ∨, ∧)` and
//! returns a canonical matrix: column indices strictly increasing within a
//! row, no duplicates. Two matrices representing the same relation are
//! therefore structurally equal.
//!
//! The complement of a matrix is never built. It only appears fused into
//! [`SparseBoolMatrix::mask_complement`].

use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

/// Minimum row count before a product is split across the rayon pool.
const PAR_MIN_ROWS: usize = 256;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatrixError {
    #[error("dimension mismatch in {op}: {left:?} vs {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("position ({row}, {col}) outside a {nrows}x{ncols} matrix")]
    OutOfBounds {
        row: usize,
        col: usize,
        nrows: usize,
        ncols: usize,
    },
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SparseBoolMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
}

impl SparseBoolMatrix {
    /// The all-zero `nrows x ncols` matrix.
    pub fn zero(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            row_ptr: vec![0; nrows + 1],
            col_idx: Vec::new(),
        }
    }

    /// The `n x n` diagonal matrix.
    pub fn identity(n: usize) -> Self {
        Self {
            nrows: n,
            ncols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
        }
    }

    /// Builds a matrix from arbitrary (row, col) positions. Duplicates collapse.
    pub fn from_entries<I>(nrows: usize, ncols: usize, entries: I) -> Result<Self, MatrixError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut pairs: Vec<(usize, usize)> = entries.into_iter().collect();
        if let Some(&(row, col)) = pairs.iter().find(|&&(r, c)| r >= nrows || c >= ncols) {
            return Err(MatrixError::OutOfBounds { row, col, nrows, ncols });
        }
        pairs.sort_unstable();
        pairs.dedup();
        let mut row_ptr = vec![0; nrows + 1];
        for &(r, _) in &pairs {
            row_ptr[r + 1] += 1;
        }
        for r in 0..nrows {
            row_ptr[r + 1] += row_ptr[r];
        }
        let col_idx = pairs.into_iter().map(|(_, c)| c).collect();
        Ok(Self {
            nrows,
            ncols,
            row_ptr,
            col_idx,
        })
    }

    /// A `1 x ncols` row vector with ones at `cols`.
    pub fn row_vector<I>(ncols: usize, cols: I) -> Result<Self, MatrixError>
    where
        I: IntoIterator<Item = usize>,
    {
        Self::from_entries(1, ncols, cols.into_iter().map(|c| (0, c)))
    }

    /// Assembles a matrix from per-row sorted, deduplicated column lists.
    fn from_rows(nrows: usize, ncols: usize, rows: Vec<Vec<usize>>) -> Self {
        debug_assert_eq!(rows.len(), nrows);
        let mut row_ptr = Vec::with_capacity(nrows + 1);
        row_ptr.push(0);
        let total = rows.iter().map(Vec::len).sum();
        let mut col_idx = Vec::with_capacity(total);
        for row in rows {
            col_idx.extend_from_slice(&row);
            row_ptr.push(col_idx.len());
        }
        Self {
            nrows,
            ncols,
            row_ptr,
            col_idx,
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.nrows, self.ncols)
    }

    /// Number of stored positions.
    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }

    pub fn is_zero(&self) -> bool {
        self.col_idx.is_empty()
    }

    /// Sorted column indices of row `i`.
    pub fn row(&self, i: usize) -> &[usize] {
        &self.col_idx[self.row_ptr[i]..self.row_ptr[i + 1]]
    }

    pub fn contains(&self, row: usize, col: usize) -> bool {
        row < self.nrows && self.row(row).binary_search(&col).is_ok()
    }

    /// All stored positions in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.nrows).flat_map(move |r| self.row(r).iter().map(move |&c| (r, c)))
    }

    /// Checks the structural invariants of the compressed layout.
    pub fn is_canonical(&self) -> bool {
        self.row_ptr.len() == self.nrows + 1
            && self.row_ptr[0] == 0
            && self.row_ptr[self.nrows] == self.col_idx.len()
            && self.row_ptr.windows(2).all(|w| w[0] <= w[1])
            && (0..self.nrows).all(|r| {
                let row = self.row(r);
                row.windows(2).all(|w| w[0] < w[1]) && row.iter().all(|&c| c < self.ncols)
            })
    }

    pub fn transpose(&self) -> Self {
        let mut counts = vec![0usize; self.ncols + 1];
        for &c in &self.col_idx {
            counts[c + 1] += 1;
        }
        for c in 0..self.ncols {
            counts[c + 1] += counts[c];
        }
        let row_ptr = counts.clone();
        let mut next = counts;
        let mut col_idx = vec![0usize; self.col_idx.len()];
        // Rows are visited in increasing order, so each output row comes out sorted.
        for r in 0..self.nrows {
            for &c in self.row(r) {
                col_idx[next[c]] = r;
                next[c] += 1;
            }
        }
        Self {
            nrows: self.ncols,
            ncols: self.nrows,
            row_ptr,
            col_idx,
        }
    }

    fn check_same_shape(&self, other: &Self, op: &'static str) -> Result<(), MatrixError> {
        if self.shape() != other.shape() {
            return Err(MatrixError::DimensionMismatch {
                op,
                left: self.shape(),
                right: other.shape(),
            });
        }
        Ok(())
    }

    /// Row-by-row merge of two matrices with the same shape.
    fn merge_rows<F>(&self, other: &Self, mut merge: F) -> Self
    where
        F: FnMut(&[usize], &[usize], &mut Vec<usize>),
    {
        let mut row_ptr = Vec::with_capacity(self.nrows + 1);
        row_ptr.push(0);
        let mut col_idx = Vec::with_capacity(self.nnz().max(other.nnz()));
        for r in 0..self.nrows {
            merge(self.row(r), other.row(r), &mut col_idx);
            row_ptr.push(col_idx.len());
        }
        Self {
            nrows: self.nrows,
            ncols: self.ncols,
            row_ptr,
            col_idx,
        }
    }

    /// Elementwise disjunction `A ⊕ B`.
    pub fn or_sum(&self, other: &Self) -> Result<Self, MatrixError> {
        self.check_same_shape(other, "or_sum")?;
        if other.is_zero() {
            return Ok(self.clone());
        }
        if self.is_zero() {
            return Ok(other.clone());
        }
        Ok(self.merge_rows(other, |a, b, out| {
            let (mut i, mut j) = (0, 0);
            while i < a.len() && j < b.len() {
                match a[i].cmp(&b[j]) {
                    std::cmp::Ordering::Less => {
                        out.push(a[i]);
                        i += 1;
                    }
                    std::cmp::Ordering::Greater => {
                        out.push(b[j]);
                        j += 1;
                    }
                    std::cmp::Ordering::Equal => {
                        out.push(a[i]);
                        i += 1;
                        j += 1;
                    }
                }
            }
            out.extend_from_slice(&a[i..]);
            out.extend_from_slice(&b[j..]);
        }))
    }

    /// Masking `A⟨M⟩`: keeps the positions of `self` also present in `mask`.
    pub fn mask(&self, mask: &Self) -> Result<Self, MatrixError> {
        self.check_same_shape(mask, "mask")?;
        Ok(self.merge_rows(mask, |a, m, out| {
            let (mut i, mut j) = (0, 0);
            while i < a.len() && j < m.len() {
                match a[i].cmp(&m[j]) {
                    std::cmp::Ordering::Less => i += 1,
                    std::cmp::Ordering::Greater => j += 1,
                    std::cmp::Ordering::Equal => {
                        out.push(a[i]);
                        i += 1;
                        j += 1;
                    }
                }
            }
        }))
    }

    /// Complemented masking `A⟨¬M⟩`: keeps the positions of `self` absent from `mask`.
    pub fn mask_complement(&self, mask: &Self) -> Result<Self, MatrixError> {
        self.check_same_shape(mask, "mask_complement")?;
        if mask.is_zero() {
            return Ok(self.clone());
        }
        Ok(self.merge_rows(mask, |a, m, out| {
            let mut j = 0;
            for &c in a {
                while j < m.len() && m[j] < c {
                    j += 1;
                }
                if j >= m.len() || m[j] != c {
                    out.push(c);
                }
            }
        }))
    }

    /// Boolean product `A ⊗ B`.
    ///
    /// Row `i` of the result is the union of the rows of `other` selected by
    /// the columns of row `i` in `self`. Rows are independent, so large
    /// products are split across the current rayon pool; the output does not
    /// depend on the number of threads.
    pub fn bool_matmul(&self, other: &Self) -> Result<Self, MatrixError> {
        if self.ncols != other.nrows {
            return Err(MatrixError::DimensionMismatch {
                op: "bool_matmul",
                left: self.shape(),
                right: other.shape(),
            });
        }
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.nrows, other.ncols));
        }
        let ncols = other.ncols;
        let row_product = |i: usize| -> Vec<usize> {
            let sel = self.row(i);
            match sel.len() {
                0 => Vec::new(),
                1 => other.row(sel[0]).to_vec(),
                _ => {
                    let mut acc: Vec<usize> = Vec::new();
                    for &k in sel {
                        acc.extend_from_slice(other.row(k));
                    }
                    if acc.len() * 8 < ncols {
                        acc.sort_unstable();
                        acc.dedup();
                        acc
                    } else {
                        let mut seen = vec![false; ncols];
                        for &c in &acc {
                            seen[c] = true;
                        }
                        seen.iter()
                            .enumerate()
                            .filter_map(|(c, &hit)| hit.then_some(c))
                            .collect()
                    }
                }
            }
        };
        let rows: Vec<Vec<usize>> = if self.nrows >= PAR_MIN_ROWS && rayon::current_num_threads() > 1 {
            (0..self.nrows).into_par_iter().map(row_product).collect()
        } else {
            (0..self.nrows).map(row_product).collect()
        };
        Ok(Self::from_rows(self.nrows, ncols, rows))
    }
}

impl fmt::Debug for SparseBoolMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SparseBoolMatrix({}x{}, ", self.nrows, self.ncols)?;
        f.debug_set().entries(self.iter()).finish()?;
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn m(nrows: usize, ncols: usize, entries: &[(usize, usize)]) -> SparseBoolMatrix {
        SparseBoolMatrix::from_entries(nrows, ncols, entries.iter().copied()).unwrap()
    }

    fn dense_matmul(a: &SparseBoolMatrix, b: &SparseBoolMatrix) -> BTreeSet<(usize, usize)> {
        let mut out = BTreeSet::new();
        for i in 0..a.nrows() {
            for k in 0..b.ncols() {
                if (0..a.ncols()).any(|j| a.contains(i, j) && b.contains(j, k)) {
                    out.insert((i, k));
                }
            }
        }
        out
    }

    fn set(a: &SparseBoolMatrix) -> BTreeSet<(usize, usize)> {
        a.iter().collect()
    }

    fn arb_matrix(nrows: usize, ncols: usize) -> impl Strategy<Value = SparseBoolMatrix> {
        proptest::collection::vec((0..nrows, 0..ncols), 0..(nrows * ncols + 1))
            .prop_map(move |e| SparseBoolMatrix::from_entries(nrows, ncols, e).unwrap())
    }

    fn arb_chain() -> impl Strategy<Value = (SparseBoolMatrix, SparseBoolMatrix, SparseBoolMatrix)> {
        (1usize..8, 1usize..8, 1usize..8, 1usize..8)
            .prop_flat_map(|(n, k, l, p)| (arb_matrix(n, k), arb_matrix(k, l), arb_matrix(l, p)))
    }

    #[test]
    fn zero_has_no_entries() {
        let z = SparseBoolMatrix::zero(3, 4);
        assert_eq!(z.shape(), (3, 4));
        assert_eq!(z.nnz(), 0);
        let z = SparseBoolMatrix::zero(0, 0);
        assert_eq!(z.shape(), (0, 0));
        assert!(z.is_canonical());
        let x = m(1, 5, &[(0, 1), (0, 4)]);
        assert_eq!(SparseBoolMatrix::zero(1, 5).or_sum(&x).unwrap(), x);
    }

    #[test]
    fn transpose_small() {
        assert_eq!(SparseBoolMatrix::zero(2, 3).transpose(), SparseBoolMatrix::zero(3, 2));
        let a = m(2, 3, &[(0, 1), (1, 2)]);
        assert_eq!(a.transpose(), m(3, 2, &[(1, 0), (2, 1)]));
    }

    #[test]
    fn or_sum_examples() {
        let a = m(1, 2, &[(0, 0)]);
        let b = m(1, 2, &[(0, 1)]);
        assert_eq!(a.or_sum(&b).unwrap(), m(1, 2, &[(0, 0), (0, 1)]));
        assert_eq!(a.or_sum(&a).unwrap(), a);
        assert!(matches!(
            a.or_sum(&SparseBoolMatrix::zero(2, 1)),
            Err(MatrixError::DimensionMismatch { op: "or_sum", .. })
        ));
    }

    #[test]
    fn matmul_examples() {
        let a = m(2, 2, &[(0, 1)]);
        let b = m(2, 2, &[(1, 0)]);
        assert_eq!(a.bool_matmul(&b).unwrap(), m(2, 2, &[(0, 0)]));
        assert_eq!(
            a.bool_matmul(&SparseBoolMatrix::zero(2, 5)).unwrap(),
            SparseBoolMatrix::zero(2, 5)
        );
        assert_eq!(SparseBoolMatrix::identity(2).bool_matmul(&a).unwrap(), a);
        assert!(a.bool_matmul(&SparseBoolMatrix::zero(3, 3)).is_err());
    }

    #[test]
    fn matmul_dense_accumulator_path() {
        // Enough candidates per row to take the bitmap branch.
        let a = m(1, 3, &[(0, 0), (0, 1), (0, 2)]);
        let b = m(3, 4, &[(0, 3), (1, 3), (1, 0), (2, 2)]);
        assert_eq!(a.bool_matmul(&b).unwrap(), m(1, 4, &[(0, 0), (0, 2), (0, 3)]));
    }

    #[test]
    fn mask_examples() {
        let a = m(2, 2, &[(0, 0), (0, 1)]);
        assert_eq!(a.mask(&m(2, 2, &[(0, 1), (1, 1)])).unwrap(), m(2, 2, &[(0, 1)]));
        assert_eq!(a.mask(&a).unwrap(), a);
        assert!(a.mask(&SparseBoolMatrix::zero(2, 2)).unwrap().is_zero());
    }

    #[test]
    fn mask_complement_examples() {
        let a = m(1, 2, &[(0, 0), (0, 1)]);
        assert_eq!(a.mask_complement(&m(1, 2, &[(0, 1)])).unwrap(), m(1, 2, &[(0, 0)]));
        assert_eq!(a.mask_complement(&SparseBoolMatrix::zero(1, 2)).unwrap(), a);
        assert!(a.mask_complement(&a).unwrap().is_zero());
        assert!(a.mask_complement(&SparseBoolMatrix::zero(2, 2)).is_err());
    }

    #[test]
    fn out_of_bounds_rejected() {
        assert_eq!(
            SparseBoolMatrix::from_entries(2, 2, [(2, 0)]),
            Err(MatrixError::OutOfBounds {
                row: 2,
                col: 0,
                nrows: 2,
                ncols: 2
            })
        );
    }

    #[test]
    fn zero_dimension_kernels() {
        let z = SparseBoolMatrix::zero(0, 3);
        let w = SparseBoolMatrix::zero(3, 0);
        assert_eq!(z.bool_matmul(&w).unwrap().shape(), (0, 0));
        assert_eq!(w.bool_matmul(&z).unwrap().shape(), (3, 3));
        assert_eq!(z.transpose().shape(), (3, 0));
    }

    proptest! {
        #[test]
        fn matmul_matches_dense_oracle((a, b, _) in arb_chain()) {
            let c = a.bool_matmul(&b).unwrap();
            prop_assert!(c.is_canonical());
            prop_assert_eq!(set(&c), dense_matmul(&a, &b));
        }

        #[test]
        fn matmul_is_associative((a, b, c) in arb_chain()) {
            let left = a.bool_matmul(&b).unwrap().bool_matmul(&c).unwrap();
            let right = a.bool_matmul(&b.bool_matmul(&c).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }

        #[test]
        fn transpose_reverses_products((a, b, _) in arb_chain()) {
            let lhs = a.bool_matmul(&b).unwrap().transpose();
            let rhs = b.transpose().bool_matmul(&a.transpose()).unwrap();
            prop_assert_eq!(lhs.clone(), rhs);
            prop_assert!(lhs.is_canonical());
            prop_assert_eq!(a.transpose().transpose(), a);
        }

        #[test]
        fn masks_partition(
            (a, mk) in (1usize..8, 1usize..8).prop_flat_map(|(r, c)| (arb_matrix(r, c), arb_matrix(r, c)))
        ) {
            let inside = a.mask(&mk).unwrap();
            let outside = a.mask_complement(&mk).unwrap();
            prop_assert!(inside.is_canonical() && outside.is_canonical());
            prop_assert!(inside.mask(&outside).unwrap().is_zero());
            prop_assert_eq!(inside.or_sum(&outside).unwrap(), a.clone());
            let sa = set(&a);
            let sm = set(&mk);
            prop_assert_eq!(set(&inside), sa.intersection(&sm).copied().collect::<BTreeSet<_>>());
            prop_assert_eq!(set(&outside), sa.difference(&sm).copied().collect::<BTreeSet<_>>());
            prop_assert_eq!(
                set(&a.or_sum(&mk).unwrap()),
                sa.union(&sm).copied().collect::<BTreeSet<_>>()
            );
        }
    }
}
