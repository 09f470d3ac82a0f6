//! Sparse symmetric matrices and their profile Cholesky factorization.
//!
//! Grid operators are numbered row by row, so the nonzeros of row `i` lie
//! within a band of a few grid rows to the left of the diagonal. The profile
//! (skyline) layout stores each lower row from its first nonzero to the
//! diagonal; Cholesky fill stays inside that profile.

use alloc::vec;
use alloc::vec::Vec;

use libm::sqrt;

use crate::{Error, Result};

/// Symmetric matrix stored as lower-triangle rows of `(col, value)` pairs,
/// `col <= row`, sorted by column.
#[derive(Clone, Debug, Default)]
pub struct SparseSym {
    n: usize,
    rows: Vec<Vec<(usize, f64)>>,
}

impl SparseSym {
    pub fn new(n: usize) -> Self {
        SparseSym {
            n,
            rows: vec![Vec::new(); n],
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Adds `v` at `(i, j)` (and implicitly at `(j, i)`).
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        let row = &mut self.rows[r];
        match row.binary_search_by_key(&c, |e| e.0) {
            Ok(p) => row[p].1 += v,
            Err(p) => row.insert(p, (c, v)),
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        match self.rows[r].binary_search_by_key(&c, |e| e.0) {
            Ok(p) => self.rows[r][p].1,
            Err(_) => 0.0,
        }
    }

    pub fn lower_row(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    /// `y = A x`.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                y[i] += v * x[j];
                if j != i {
                    y[j] += v * x[i];
                }
            }
        }
        y
    }

    /// `xᵀ A x`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        super::dot(x, &self.matvec(x))
    }

    pub fn is_finite(&self) -> bool {
        self.rows.iter().flatten().all(|e| e.1.is_finite())
    }
}

/// Lower-triangular Cholesky factor in profile storage.
#[derive(Clone, Debug)]
pub struct SkylineCholesky {
    first: Vec<usize>,
    start: Vec<usize>,
    values: Vec<f64>,
}

impl SkylineCholesky {
    pub fn factor(a: &SparseSym) -> Result<Self> {
        let n = a.dim();
        let first: Vec<usize> = (0..n)
            .map(|i| a.lower_row(i).first().map(|e| e.0).unwrap_or(i).min(i))
            .collect();
        let mut start = Vec::with_capacity(n + 1);
        let mut total = 0usize;
        for i in 0..n {
            start.push(total);
            total += i - first[i] + 1;
        }
        start.push(total);
        let mut values = vec![0.0; total];
        for i in 0..n {
            for &(j, v) in a.lower_row(i) {
                values[start[i] + j - first[i]] = v;
            }
        }

        for i in 0..n {
            let fi = first[i];
            for j in fi..=i {
                let fj = first[j];
                let k0 = fi.max(fj);
                let ri = start[i] + (k0 - fi);
                let rj = start[j] + (k0 - fj);
                let len = j - k0;
                let s = super::dot(&values[ri..ri + len], &values[rj..rj + len]);
                let idx = start[i] + j - fi;
                let v = values[idx] - s;
                if j == i {
                    if !(v > 0.0) {
                        return Err(Error::NotPositiveDefinite { pivot: i, value: v });
                    }
                    values[idx] = sqrt(v);
                } else {
                    values[idx] = v / values[start[j] + j - fj];
                }
            }
        }
        Ok(SkylineCholesky {
            first,
            start,
            values,
        })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.first.len()
    }

    /// Number of stored factor entries.
    pub fn profile_size(&self) -> usize {
        self.values.len()
    }

    /// Solves `L Lᵀ x = b` in place.
    pub fn solve_in_place(&self, x: &mut [f64]) {
        let n = self.dim();
        // forward: L y = b
        for i in 0..n {
            let fi = self.first[i];
            let row = &self.values[self.start[i]..self.start[i + 1]];
            let s = super::dot(&row[..i - fi], &x[fi..i]);
            x[i] = (x[i] - s) / row[i - fi];
        }
        // backward: Lᵀ x = y, column-oriented
        for i in (0..n).rev() {
            let fi = self.first[i];
            let row = &self.values[self.start[i]..self.start[i + 1]];
            x[i] /= row[i - fi];
            let xi = x[i];
            for (k, &l) in row[..i - fi].iter().enumerate() {
                x[fi + k] -= l * xi;
            }
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian_1d(n: usize) -> SparseSym {
        let mut a = SparseSym::new(n);
        for i in 0..n {
            a.add(i, i, 2.0);
            if i > 0 {
                a.add(i, i - 1, -1.0);
            }
        }
        a
    }

    #[test]
    fn solves_tridiagonal_system() {
        let a = laplacian_1d(50);
        let x_true: Vec<f64> = (0..50).map(|i| libm::sin(i as f64 * 0.3)).collect();
        let b = a.matvec(&x_true);
        let chol = SkylineCholesky::factor(&a).unwrap();
        let x = chol.solve(&b);
        for (u, v) in x.iter().zip(&x_true) {
            assert!((u - v).abs() < 1e-10);
        }
    }

    #[test]
    fn solves_system_with_gaps_in_profile() {
        // 2D 5-point Laplacian on a 7x5 grid, row-major
        let (nx, ny) = (7, 5);
        let n = nx * ny;
        let mut a = SparseSym::new(n);
        for j in 0..ny {
            for i in 0..nx {
                let p = j * nx + i;
                a.add(p, p, 4.0 + 0.1 * i as f64);
                if i > 0 {
                    a.add(p, p - 1, -1.0);
                }
                if j > 0 {
                    a.add(p, p - nx, -1.0);
                }
            }
        }
        let x_true: Vec<f64> = (0..n).map(|i| (i as f64).sqrt()).collect();
        let b = a.matvec(&x_true);
        let x = SkylineCholesky::factor(&a).unwrap().solve(&b);
        for (u, v) in x.iter().zip(&x_true) {
            assert!((u - v).abs() < 1e-10);
        }
    }

    #[test]
    fn rejects_indefinite_matrix() {
        let mut a = laplacian_1d(4);
        a.add(2, 2, -5.0);
        assert!(matches!(
            SkylineCholesky::factor(&a),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }
}
