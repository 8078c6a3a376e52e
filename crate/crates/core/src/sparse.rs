//! Compressed-row sparse matrices.
//!
//! All assembled operators (mass, stiffness, trace, coupling) live in this
//! format. Assembly accumulates triplets and compresses them once; after
//! compression the column indices within each row are sorted and unique and
//! exact zeros are dropped.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use std::io::Write;

/// Real sparse matrix in compressed-row storage.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n_rows: usize,
    n_cols: usize,
    row_offsets: Vec<usize>,
    col_indices: Vec<usize>,
    values: Vec<f64>,
}

/// Triplet accumulator used during assembly.
#[derive(Debug, Clone)]
pub struct CooBuilder {
    n_rows: usize,
    n_cols: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl CooBuilder {
    pub fn new(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, row: usize, col: usize, value: f64) {
        debug_assert!(row < self.n_rows && col < self.n_cols);
        self.entries.push((row, col, value));
    }

    /// Compress into CSR: duplicates are summed in a fixed order, exact zeros
    /// dropped.
    pub fn build(mut self) -> SparseMatrix {
        self.entries
            .sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_offsets = vec![0usize; self.n_rows + 1];
        let mut col_indices = Vec::new();
        let mut values = Vec::new();
        let mut i = 0;
        while i < self.entries.len() {
            let (r, c, _) = self.entries[i];
            let mut sum = 0.0;
            while i < self.entries.len() && self.entries[i].0 == r && self.entries[i].1 == c {
                sum += self.entries[i].2;
                i += 1;
            }
            if sum != 0.0 {
                col_indices.push(c);
                values.push(sum);
                row_offsets[r + 1] += 1;
            }
        }
        for r in 0..self.n_rows {
            row_offsets[r + 1] += row_offsets[r];
        }
        SparseMatrix {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            row_offsets,
            col_indices,
            values,
        }
    }
}

impl SparseMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            row_offsets: vec![0; n_rows + 1],
            col_indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut b = CooBuilder::new(n, n);
        for i in 0..n {
            b.push(i, i, 1.0);
        }
        b.build()
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let lo = self.row_offsets[r];
        let hi = self.row_offsets[r + 1];
        (&self.col_indices[lo..hi], &self.values[lo..hi])
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let (cols, vals) = self.row(r);
        match cols.binary_search(&c) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    pub fn matvec(&self, x: &DVector<f64>) -> DVector<f64> {
        assert_eq!(x.len(), self.n_cols, "matvec dimension mismatch");
        let mut y = DVector::zeros(self.n_rows);
        for r in 0..self.n_rows {
            let (cols, vals) = self.row(r);
            let mut acc = 0.0;
            for (c, v) in cols.iter().zip(vals) {
                acc += v * x[*c];
            }
            y[r] = acc;
        }
        y
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut b = CooBuilder::new(self.n_cols, self.n_rows);
        for r in 0..self.n_rows {
            let (cols, vals) = self.row(r);
            for (c, v) in cols.iter().zip(vals) {
                b.push(*c, r, *v);
            }
        }
        b.build()
    }

    /// self + factor * other.
    pub fn add_scaled(&self, other: &SparseMatrix, factor: f64) -> Result<SparseMatrix> {
        if self.n_rows != other.n_rows || self.n_cols != other.n_cols {
            return Err(Error::DimensionMismatch(format!(
                "add_scaled: {}x{} vs {}x{}",
                self.n_rows, self.n_cols, other.n_rows, other.n_cols
            )));
        }
        let mut b = CooBuilder::new(self.n_rows, self.n_cols);
        for r in 0..self.n_rows {
            let (cols, vals) = self.row(r);
            for (c, v) in cols.iter().zip(vals) {
                b.push(r, *c, *v);
            }
            let (cols, vals) = other.row(r);
            for (c, v) in cols.iter().zip(vals) {
                b.push(r, *c, factor * v);
            }
        }
        Ok(b.build())
    }

    pub fn scale(&self, factor: f64) -> SparseMatrix {
        let mut m = self.clone();
        for v in &mut m.values {
            *v *= factor;
        }
        m
    }

    /// Sparse product self * other.
    pub fn matmul(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        if self.n_cols != other.n_rows {
            return Err(Error::DimensionMismatch(format!(
                "matmul: {}x{} * {}x{}",
                self.n_rows, self.n_cols, other.n_rows, other.n_cols
            )));
        }
        let mut b = CooBuilder::new(self.n_rows, other.n_cols);
        for r in 0..self.n_rows {
            let (cols, vals) = self.row(r);
            for (k, v) in cols.iter().zip(vals) {
                let (ocols, ovals) = other.row(*k);
                for (c, w) in ocols.iter().zip(ovals) {
                    b.push(r, *c, v * w);
                }
            }
        }
        Ok(b.build())
    }

    /// Block-diagonal composition diag(self, other).
    pub fn block_diag(&self, other: &SparseMatrix) -> SparseMatrix {
        let mut b = CooBuilder::new(self.n_rows + other.n_rows, self.n_cols + other.n_cols);
        for r in 0..self.n_rows {
            let (cols, vals) = self.row(r);
            for (c, v) in cols.iter().zip(vals) {
                b.push(r, *c, *v);
            }
        }
        for r in 0..other.n_rows {
            let (cols, vals) = other.row(r);
            for (c, v) in cols.iter().zip(vals) {
                b.push(self.n_rows + r, self.n_cols + c, *v);
            }
        }
        b.build()
    }

    /// Horizontal composition [self | other].
    pub fn hstack(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        if self.n_rows != other.n_rows {
            return Err(Error::DimensionMismatch(format!(
                "hstack: {} vs {} rows",
                self.n_rows, other.n_rows
            )));
        }
        let mut b = CooBuilder::new(self.n_rows, self.n_cols + other.n_cols);
        for r in 0..self.n_rows {
            let (cols, vals) = self.row(r);
            for (c, v) in cols.iter().zip(vals) {
                b.push(r, *c, *v);
            }
            let (cols, vals) = other.row(r);
            for (c, v) in cols.iter().zip(vals) {
                b.push(r, self.n_cols + c, *v);
            }
        }
        Ok(b.build())
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.n_rows, self.n_cols);
        for r in 0..self.n_rows {
            let (cols, vals) = self.row(r);
            for (c, v) in cols.iter().zip(vals) {
                m[(r, *c)] = *v;
            }
        }
        m
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Relative symmetry defect max |a_ij - a_ji| / max |a_ij|.
    pub fn symmetry_defect(&self) -> f64 {
        let scale = self.max_abs();
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0f64;
        for r in 0..self.n_rows {
            let (cols, vals) = self.row(r);
            for (c, v) in cols.iter().zip(vals) {
                worst = worst.max((v - self.get(*c, r)).abs());
            }
        }
        worst / scale
    }

    /// MatrixMarket coordinate format with 17 significant digits.
    pub fn write_matrix_market<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
        writeln!(w, "{} {} {}", self.n_rows, self.n_cols, self.nnz())?;
        for r in 0..self.n_rows {
            let (cols, vals) = self.row(r);
            for (c, v) in cols.iter().zip(vals) {
                writeln!(w, "{} {} {:.16e}", r + 1, c + 1, v)?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicate_entries_are_summed_and_zeros_dropped() {
        let mut b = CooBuilder::new(2, 2);
        b.push(0, 0, 1.0);
        b.push(0, 0, 2.0);
        b.push(1, 0, 5.0);
        b.push(1, 0, -5.0);
        b.push(1, 1, 4.0);
        let m = b.build();
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.get(0, 0), 3.0);
        assert_eq!(m.get(1, 0), 0.0);
        assert_eq!(m.get(1, 1), 4.0);
    }

    #[test]
    fn rows_sorted_unique() {
        let mut b = CooBuilder::new(1, 4);
        b.push(0, 3, 1.0);
        b.push(0, 1, 2.0);
        b.push(0, 2, 3.0);
        let m = b.build();
        let (cols, _) = m.row(0);
        assert_eq!(cols, &[1, 2, 3]);
    }

    #[test]
    fn matvec_and_transpose() {
        let mut b = CooBuilder::new(2, 3);
        b.push(0, 0, 1.0);
        b.push(0, 2, 2.0);
        b.push(1, 1, -1.0);
        let m = b.build();
        let x = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        let y = m.matvec(&x);
        assert_eq!(y.as_slice(), &[7.0, -2.0]);
        let mt = m.transpose();
        assert_eq!(mt.n_rows(), 3);
        assert_eq!(mt.get(2, 0), 2.0);
    }

    #[test]
    fn block_and_stack_shapes() {
        let a = SparseMatrix::identity(2);
        let d = a.block_diag(&a);
        assert_eq!((d.n_rows(), d.n_cols()), (4, 4));
        let h = a.hstack(&a).unwrap();
        assert_eq!((h.n_rows(), h.n_cols()), (2, 4));
        assert_eq!(h.get(1, 3), 1.0);
    }

    #[test]
    fn matrix_market_output() {
        let m = SparseMatrix::identity(2);
        let mut buf = Vec::new();
        m.write_matrix_market(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("%%MatrixMarket"));
        assert!(s.contains("1 1 1.0000000000000000e0"));
    }

    proptest::proptest! {
        // arbitrary triplet soup (duplicates included) assembles to the
        // same operator as naive dense accumulation
        #[test]
        fn builder_matches_dense_accumulation(
            triplets in proptest::collection::vec((0usize..5, 0usize..5, -10.0f64..10.0), 0..40)
        ) {
            let mut coo = CooBuilder::new(5, 5);
            let mut dense = nalgebra::DMatrix::<f64>::zeros(5, 5);
            for &(i, j, v) in &triplets {
                coo.push(i, j, v);
                dense[(i, j)] += v;
            }
            let m = coo.build();
            proptest::prop_assert!((m.to_dense() - &dense).abs().max() <= 1e-12);
            let x = nalgebra::DVector::from_fn(5, |k, _| (k as f64) - 2.0);
            proptest::prop_assert!((m.matvec(&x) - dense * &x).amax() <= 1e-12);
        }
    }
}
