use crate::error::{check_dim, Result};

/// Compressed sparse row matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds the matrix from `(row, col, value)` triplets, summing duplicates.
    ///
    /// Duplicates are summed in input order, so two entries fed by the same
    /// sequence of contributions are bitwise equal.
    pub fn from_triplets(nrows: usize, ncols: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0; nrows + 1];
        let mut col_idx = Vec::with_capacity(triplets.len() / 4);
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len() / 4);
        let mut last = None;
        for (r, c, v) in triplets {
            assert!(r < nrows && c < ncols, "triplet ({r}, {c}) out of bounds");
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..nrows {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self { nrows, ncols, row_ptr, col_idx, values }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.col_idx[range.clone()].binary_search(&j) {
            Ok(k) => self.values[range.start + k],
            Err(_) => 0.0,
        }
    }

    /// Iterates `(row, col, value)` over stored entries.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nrows).flat_map(move |i| {
            (self.row_ptr[i]..self.row_ptr[i + 1]).map(move |k| (i, self.col_idx[k], self.values[k]))
        })
    }

    /// `y = A x`
    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate().take(self.nrows) {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.values[k] * x[self.col_idx[k]];
            }
            *yi = acc;
        }
    }
}

/// Symmetric operator on a vector FE space, stored as one scalar block
/// repeated on the diagonal for each velocity component.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricOperator {
    block: CsrMatrix,
    components: usize,
}

impl SymmetricOperator {
    pub fn block_diagonal(block: CsrMatrix, components: usize) -> Self {
        assert_eq!(block.nrows(), block.ncols());
        Self { block, components }
    }

    /// The scalar block acting on one velocity component.
    pub fn block(&self) -> &CsrMatrix {
        &self.block
    }

    pub fn dim(&self) -> usize {
        self.block.nrows() * self.components
    }

    /// Entry `(i, j)` of the full operator.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let n = self.block.nrows();
        if i / n != j / n {
            0.0
        } else {
            self.block.get(i % n, j % n)
        }
    }

    pub fn apply_into(&self, x: &[f64], y: &mut [f64]) -> Result<()> {
        check_dim(self.dim(), x.len())?;
        check_dim(self.dim(), y.len())?;
        let n = self.block.nrows();
        for (xc, yc) in x.chunks(n).zip(y.chunks_mut(n)) {
            self.block.mul_vec_into(xc, yc);
        }
        Ok(())
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut y = vec![0.0; self.dim()];
        self.apply_into(x, &mut y)?;
        Ok(y)
    }

    /// `x^T A y`
    pub fn inner(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        let ay = self.apply(y)?;
        Ok(x.iter().zip(&ay).map(|(a, b)| a * b).sum())
    }
}
