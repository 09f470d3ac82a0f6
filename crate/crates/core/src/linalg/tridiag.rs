//! Symmetric tridiagonal eigenproblems: Sturm-sequence bisection for the
//! eigenvalues and inverse iteration for the eigenvectors.

use alloc::vec;
use alloc::vec::Vec;

use libm::fabs;

/// Symmetric tridiagonal matrix with diagonal `d` and off-diagonal `e`
/// (`e[i]` couples rows `i` and `i + 1`).
#[derive(Clone, Debug)]
pub struct SymTridiagonal {
    pub d: Vec<f64>,
    pub e: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(d: Vec<f64>, e: Vec<f64>) -> Self {
        assert_eq!(e.len() + 1, d.len());
        SymTridiagonal { d, e }
    }

    pub fn dim(&self) -> usize {
        self.d.len()
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = self.d[0] - x;
        if q < 0.0 {
            count += 1;
        }
        for i in 1..self.dim() {
            let denom = if q == 0.0 {
                f64::EPSILON * (fabs(self.e[i - 1]) + 1.0)
            } else {
                q
            };
            q = self.d[i] - x - self.e[i - 1] * self.e[i - 1] / denom;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { fabs(self.e[i - 1]) } else { 0.0 }
                + if i + 1 < n { fabs(self.e[i]) } else { 0.0 };
            lo = lo.min(self.d[i] - r);
            hi = hi.max(self.d[i] + r);
        }
        (lo, hi)
    }

    /// The `k`-th smallest eigenvalue (0-based) by bisection.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        let (mut lo, mut hi) = self.gershgorin();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Eigenvector for an (accurate) eigenvalue `lambda`, unit Euclidean norm.
    pub fn eigenvector(&self, lambda: f64) -> Vec<f64> {
        let n = self.dim();
        let scale = self.d.iter().map(|v| fabs(*v)).fold(0.0, f64::max).max(1.0);
        let shift = lambda + 1e-13 * scale;
        let mut x = vec![1.0; n];
        for (i, v) in x.iter_mut().enumerate() {
            // deterministic, not orthogonal to any eigenvector in practice
            let g = i as f64 * 0.618_033_988_75;
            *v += 1e-3 * (g - libm::floor(g));
        }
        for _ in 0..3 {
            x = self.solve_shifted(shift, &x);
            let nrm = libm::sqrt(x.iter().map(|v| v * v).sum::<f64>());
            x.iter_mut().for_each(|v| *v /= nrm);
        }
        x
    }

    /// Solves `(T - s I) x = b` by Gaussian elimination with partial pivoting.
    fn solve_shifted(&self, s: f64, b: &[f64]) -> Vec<f64> {
        let n = self.dim();
        // rows become (l, d, u, u2) after pivoting: upper bandwidth 2
        let mut diag: Vec<f64> = self.d.iter().map(|v| v - s).collect();
        let mut up: Vec<f64> = self.e.clone();
        up.push(0.0);
        let mut up2 = vec![0.0; n];
        let mut low: Vec<f64> = self.e.clone();
        let mut rhs = b.to_vec();
        let tiny = 1e-300;
        for i in 0..n - 1 {
            if fabs(low[i]) > fabs(diag[i]) {
                // swap rows i and i+1
                let (d_next, u_next) = (diag[i + 1], up[i + 1]);
                let (di, ui, u2i) = (diag[i], up[i], up2[i]);
                diag[i] = low[i];
                up[i] = d_next;
                up2[i] = u_next;
                low[i] = di;
                diag[i + 1] = ui;
                up[i + 1] = u2i;
                rhs.swap(i, i + 1);
            }
            let piv = if diag[i] == 0.0 { tiny } else { diag[i] };
            let f = low[i] / piv;
            diag[i + 1] -= f * up[i];
            up[i + 1] -= f * up2[i];
            rhs[i + 1] -= f * rhs[i];
        }
        let mut x = vec![0.0; n];
        for i in (0..n).rev() {
            let mut v = rhs[i];
            if i + 1 < n {
                v -= up[i] * x[i + 1];
            }
            if i + 2 < n {
                v -= up2[i] * x[i + 2];
            }
            let piv = if diag[i] == 0.0 { tiny } else { diag[i] };
            x[i] = v / piv;
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn second_difference_spectrum() {
        let n = 40;
        let t = SymTridiagonal::new(vec![2.0; n], vec![-1.0; n - 1]);
        for k in 0..5 {
            let exact = 2.0 - 2.0 * libm::cos((k + 1) as f64 * PI / (n + 1) as f64);
            let lam = t.eigenvalue(k);
            assert!((lam - exact).abs() < 1e-13, "{k}");
            let v = t.eigenvector(lam);
            // compare against sin(j (k+1) π / (n+1)) up to sign
            let norm = libm::sqrt(
                (1..=n)
                    .map(|j| libm::sin(j as f64 * (k + 1) as f64 * PI / (n + 1) as f64).powi(2))
                    .sum::<f64>(),
            );
            let sign = v[0].signum();
            for j in 0..n {
                let e = libm::sin((j + 1) as f64 * (k + 1) as f64 * PI / (n + 1) as f64) / norm;
                assert!((sign * v[j] - e).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn shifted_solve_with_pivoting() {
        let t = SymTridiagonal::new(vec![0.0, 1.0, 3.0, -2.0], vec![5.0, 1.0, 2.0]);
        let b = [1.0, 2.0, 3.0, 4.0];
        let x = t.solve_shifted(0.5, &b);
        // check residual
        let n = 4;
        for i in 0..n {
            let mut r = (t.d[i] - 0.5) * x[i];
            if i > 0 {
                r += t.e[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                r += t.e[i] * x[i + 1];
            }
            assert!((r - b[i]).abs() < 1e-12);
        }
    }
}
