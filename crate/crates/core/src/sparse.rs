//! Compressed sparse row storage for the complex single-excitation Hamiltonians.

use num_complex::Complex64;

/// Row-major compressed sparse matrix. Column indices are sorted within each row
/// and duplicates are summed at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
}

impl CsrMatrix {
    /// Builds a `dim × dim` matrix from `(row, col, value)` triplets.
    /// Repeated positions accumulate; entries that sum to exactly zero are dropped.
    pub fn from_triplets(dim: usize, triplets: &[(usize, usize, Complex64)]) -> Self {
        let mut sorted: Vec<(usize, usize, Complex64)> = triplets.to_vec();
        sorted.sort_by_key(|e| (e.0, e.1));

        let mut row_ptr = vec![0usize; dim + 1];
        let mut cols = Vec::with_capacity(sorted.len());
        let mut vals: Vec<Complex64> = Vec::with_capacity(sorted.len());
        let mut rows = Vec::with_capacity(sorted.len());

        for (r, c, v) in sorted {
            assert!(r < dim && c < dim, "triplet ({r},{c}) outside {dim}x{dim}");
            if rows.last() == Some(&r) && cols.last() == Some(&c) {
                *vals.last_mut().unwrap() += v;
            } else {
                rows.push(r);
                cols.push(c);
                vals.push(v);
            }
        }

        let mut keep_cols = Vec::with_capacity(cols.len());
        let mut keep_vals = Vec::with_capacity(vals.len());
        for ((r, c), v) in rows.into_iter().zip(cols).zip(vals) {
            if v == Complex64::new(0.0, 0.0) {
                continue;
            }
            row_ptr[r + 1] += 1;
            keep_cols.push(c);
            keep_vals.push(v);
        }
        for i in 0..dim {
            row_ptr[i + 1] += row_ptr[i];
        }

        Self {
            dim,
            row_ptr,
            cols: keep_cols,
            vals: keep_vals,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Stored `(col, value)` pairs of one row.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, Complex64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[span.clone()]
            .iter()
            .copied()
            .zip(self.vals[span].iter().copied())
    }

    /// Entry lookup; zero when not stored.
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.cols[span.clone()].binary_search(&c) {
            Ok(pos) => self.vals[span.start + pos],
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    /// `out = self · x`.
    pub fn mul_vec_into(&self, x: &[Complex64], out: &mut [Complex64]) {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(out.len(), self.dim);
        for (r, o) in out.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            *o = acc;
        }
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim];
        self.mul_vec_into(x, &mut out);
        out
    }

    /// `⟨x|A|x⟩`, real part only (the matrices here are Hermitian).
    pub fn expectation(&self, x: &[Complex64]) -> f64 {
        let mut acc = 0.0;
        for (r, xr) in x.iter().enumerate() {
            let mut row = Complex64::new(0.0, 0.0);
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                row += self.vals[k] * x[self.cols[k]];
            }
            acc += (xr.conj() * row).re;
        }
        acc
    }

    /// `max |A_ij − conj(A_ji)|` over all stored entries of either triangle.
    pub fn hermitian_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..self.dim {
            for (c, v) in self.row(r) {
                worst = worst.max((v - self.get(c, r).conj()).norm());
            }
        }
        worst
    }

    /// Gershgorin enclosure `[lo, hi]` of the spectrum, valid for Hermitian matrices.
    pub fn gershgorin_bounds(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for r in 0..self.dim {
            let mut centre = 0.0;
            let mut radius = 0.0;
            for (c, v) in self.row(r) {
                if c == r {
                    centre = v.re;
                } else {
                    radius += v.norm();
                }
            }
            lo = lo.min(centre - radius);
            hi = hi.max(centre + radius);
        }
        (lo, hi)
    }

    /// Dense row-major copy, for small-N oracles.
    pub fn to_dense(&self) -> Vec<Vec<Complex64>> {
        let mut dense = vec![vec![Complex64::new(0.0, 0.0); self.dim]; self.dim];
        for (r, row) in dense.iter_mut().enumerate() {
            for (c, v) in self.row(r) {
                row[c] = v;
            }
        }
        dense
    }

    /// All stored `(row, col, value)` entries in row order.
    pub fn triplets(&self) -> Vec<(usize, usize, Complex64)> {
        (0..self.dim)
            .flat_map(|r| self.row(r).map(move |(c, v)| (r, c, v)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn duplicates_accumulate_and_zeros_drop() {
        let m = CsrMatrix::from_triplets(
            3,
            &[(0, 1, c(1.0)), (0, 1, c(2.0)), (2, 2, c(0.0)), (1, 0, c(-1.0))],
        );
        assert_eq!(m.get(0, 1), c(3.0));
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.get(2, 2), c(0.0));
    }

    #[test]
    fn matvec_and_expectation() {
        let m = CsrMatrix::from_triplets(
            2,
            &[(0, 0, c(1.0)), (0, 1, Complex64::new(0.0, 1.0)), (1, 0, Complex64::new(0.0, -1.0))],
        );
        let x = vec![c(1.0), c(1.0)];
        let y = m.mul_vec(&x);
        assert_eq!(y, vec![Complex64::new(1.0, 1.0), Complex64::new(0.0, -1.0)]);
        assert!((m.expectation(&x) - 1.0).abs() < 1e-15);
        assert_eq!(m.hermitian_residual(), 0.0);
    }

    #[test]
    fn gershgorin_encloses_two_level_spectrum() {
        // eigenvalues ±1
        let m = CsrMatrix::from_triplets(2, &[(0, 1, c(1.0)), (1, 0, c(1.0))]);
        let (lo, hi) = m.gershgorin_bounds();
        assert!(lo <= -1.0 && hi >= 1.0);
    }
}
