//! Symmetric positive-definite banded matrices with an in-place Cholesky
//! factorization.

use crate::error::{Error, Result};

/// Lower band of a symmetric matrix; row `i` stores columns
/// `i - bandwidth ..= i`.
#[derive(Debug, Clone)]
pub struct BandedSpd {
    n: usize,
    bandwidth: usize,
    data: Vec<f64>,
    factored: bool,
}

impl BandedSpd {
    pub fn zeros(n: usize, bandwidth: usize) -> Self {
        BandedSpd { n, bandwidth, data: vec![0.0; n * (bandwidth + 1)], factored: false }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn slot(&self, row: usize, col: usize) -> usize {
        debug_assert!(col <= row && row - col <= self.bandwidth);
        row * (self.bandwidth + 1) + (col + self.bandwidth - row)
    }

    /// Add `v` to entry (row, col); only the lower triangle is stored, so
    /// callers add each symmetric pair once.
    pub fn add(&mut self, row: usize, col: usize, v: f64) {
        let (r, c) = if col <= row { (row, col) } else { (col, row) };
        let s = self.slot(r, c);
        self.data[s] += v;
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        let (r, c) = if col <= row { (row, col) } else { (col, row) };
        if r - c > self.bandwidth {
            return 0.0;
        }
        self.data[self.slot(r, c)]
    }

    /// Overwrite with the Cholesky factor L (A = L L^T).
    pub fn factor(&mut self) -> Result<()> {
        let bw = self.bandwidth;
        let w = bw + 1;
        for i in 0..self.n {
            let first = i.saturating_sub(bw);
            for col in first..=i {
                let k0 = first.max(col.saturating_sub(bw));
                let len = col - k0;
                let row_i = i * w + (k0 + bw - i);
                let row_c = col * w + (k0 + bw - col);
                let dot: f64 =
                    self.data[row_i..row_i + len].iter().zip(&self.data[row_c..row_c + len]).map(|(a, b)| a * b).sum();
                let s = self.slot(i, col);
                let v = self.data[s] - dot;
                if col == i {
                    if !(v > 0.0) {
                        return Err(Error::Solver(format!("matrix not positive definite at row {i}")));
                    }
                    self.data[s] = v.sqrt();
                } else {
                    let diag = self.data[self.slot(col, col)];
                    self.data[s] = v / diag;
                }
            }
        }
        self.factored = true;
        Ok(())
    }

    /// Solve A x = b in place using the stored factor.
    pub fn solve_in_place(&self, b: &mut [f64]) -> Result<()> {
        if !self.factored {
            return Err(Error::Solver("matrix has not been factored".into()));
        }
        if b.len() != self.n {
            return Err(Error::Solver("right-hand side has the wrong length".into()));
        }
        let bw = self.bandwidth;
        for i in 0..self.n {
            let first = i.saturating_sub(bw);
            let mut s = b[i];
            for (k, bk) in b.iter().enumerate().take(i).skip(first) {
                s -= self.data[self.slot(i, k)] * bk;
            }
            b[i] = s / self.data[self.slot(i, i)];
        }
        for i in (0..self.n).rev() {
            let last = (i + bw).min(self.n - 1);
            let mut s = b[i];
            for (k, bk) in b.iter().enumerate().take(last + 1).skip(i + 1) {
                s -= self.data[self.slot(k, i)] * bk;
            }
            b[i] = s / self.data[self.slot(i, i)];
        }
        Ok(())
    }
}
