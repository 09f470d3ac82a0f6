use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use libm::{fabs, sqrt};

use crate::{Error, Result};

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_fn<F: FnMut(usize, usize) -> f64>(rows: usize, cols: usize, mut f: F) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.rows).map(|i| super::dot(self.row(i), x)).collect()
    }

    /// `(A + Aᵀ) / 2`.
    pub fn symmetrized(&self) -> DenseMatrix {
        DenseMatrix::from_fn(self.rows, self.cols, |i, j| {
            0.5 * (self[(i, j)] + self[(j, i)])
        })
    }

    /// Solves `A x = b` by Gaussian elimination with partial pivoting.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.rows;
        assert_eq!(n, self.cols);
        assert_eq!(n, b.len());
        let mut a = self.clone();
        let mut x = b.to_vec();
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&i, &j| fabs(a[(i, col)]).total_cmp(&fabs(a[(j, col)])))
                .unwrap();
            let pv = a[(piv, col)];
            if pv == 0.0 || !pv.is_finite() {
                return Err(Error::InvalidInput("singular matrix".into()));
            }
            if piv != col {
                for j in 0..n {
                    a.data.swap(col * n + j, piv * n + j);
                }
                x.swap(col, piv);
            }
            for i in col + 1..n {
                let f = a[(i, col)] / pv;
                if f == 0.0 {
                    continue;
                }
                for j in col..n {
                    let v = a[(col, j)];
                    a[(i, j)] -= f * v;
                }
                x[i] -= f * x[col];
            }
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= a[(i, j)] * x[j];
            }
            x[i] = s / a[(i, i)];
        }
        Ok(x)
    }

    /// Least-squares solution of `A x ≈ b` (`rows >= cols`) by Householder QR.
    pub fn least_squares(&self, b: &[f64]) -> Result<Vec<f64>> {
        let (m, n) = (self.rows, self.cols);
        if m < n {
            return Err(Error::InvalidInput(
                "least squares needs rows >= cols".into(),
            ));
        }
        let mut a = self.clone();
        let mut rhs = b.to_vec();
        let mut diag = vec![0.0; n];
        for k in 0..n {
            let norm = sqrt((k..m).map(|i| a[(i, k)] * a[(i, k)]).sum::<f64>());
            if norm == 0.0 {
                return Err(Error::InvalidInput(
                    "rank-deficient least-squares system".into(),
                ));
            }
            let alpha = if a[(k, k)] > 0.0 { -norm } else { norm };
            // v = x - alpha e1, stored in column k
            a[(k, k)] -= alpha;
            let vnorm2: f64 = (k..m).map(|i| a[(i, k)] * a[(i, k)]).sum();
            for j in k + 1..n {
                let s: f64 = (k..m).map(|i| a[(i, k)] * a[(i, j)]).sum::<f64>() * 2.0 / vnorm2;
                for i in k..m {
                    let v = a[(i, k)];
                    a[(i, j)] -= s * v;
                }
            }
            let s: f64 = (k..m).map(|i| a[(i, k)] * rhs[i]).sum::<f64>() * 2.0 / vnorm2;
            for i in k..m {
                rhs[i] -= s * a[(i, k)];
            }
            diag[k] = alpha;
        }
        let scale = diag.iter().map(|d| fabs(*d)).fold(0.0, f64::max);
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            if fabs(diag[i]) <= 1e-13 * scale {
                return Err(Error::InvalidInput(
                    "rank-deficient least-squares system".into(),
                ));
            }
            let mut s = rhs[i];
            for j in i + 1..n {
                s -= a[(i, j)] * x[j];
            }
            x[i] = s / diag[i];
        }
        Ok(x)
    }

    /// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
    /// Returns eigenvalues ascending and the matching eigenvectors as columns.
    pub fn symmetric_eigen(&self) -> (Vec<f64>, DenseMatrix) {
        let n = self.rows;
        assert_eq!(n, self.cols);
        let mut a = self.symmetrized();
        let mut v = DenseMatrix::identity(n);
        for _sweep in 0..100 {
            let off: f64 = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| a[(i, j)] * a[(i, j)])
                .sum();
            let total: f64 = off + (0..n).map(|i| a[(i, i)] * a[(i, i)]).sum::<f64>();
            if off <= 1e-30 * total || off == 0.0 {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    let apq = a[(p, q)];
                    if fabs(apq) < 1e-300 {
                        continue;
                    }
                    let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                    let t = theta.signum() / (fabs(theta) + sqrt(theta * theta + 1.0));
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / sqrt(t * t + 1.0);
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        a[(k, p)] = c * akp - s * akq;
                        a[(k, q)] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[(p, k)];
                        let aqk = a[(q, k)];
                        a[(p, k)] = c * apk - s * aqk;
                        a[(q, k)] = s * apk + c * aqk;
                    }
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = c * vkp - s * vkq;
                        v[(k, q)] = s * vkp + c * vkq;
                    }
                }
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
        let vals = order.iter().map(|&i| a[(i, i)]).collect();
        let vecs = DenseMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
        (vals, vecs)
    }

    /// Singular values, descending.
    pub fn singular_values(&self) -> Vec<f64> {
        let ata = self.transpose().matmul(self);
        let (vals, _) = ata.symmetric_eigen();
        let mut s: Vec<f64> = vals.into_iter().map(|v| sqrt(v.max(0.0))).collect();
        s.reverse();
        s
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}
