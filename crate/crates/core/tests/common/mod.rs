#![allow(dead_code)]

use ispd_core::{ConvexBody, SupportFn};

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `J_n(x)` from its power series; accurate for `x ≲ 10`.
pub fn bessel_j(n: usize, x: f64) -> f64 {
    (0..40)
        .map(|m| {
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            sign * (0.5 * x).powi((2 * m + n) as i32) / (factorial(m) * factorial(m + n))
        })
        .sum()
}

/// `I_n(x)` from its power series.
pub fn bessel_i(n: usize, x: f64) -> f64 {
    (0..40)
        .map(|m| (0.5 * x).powi((2 * m + n) as i32) / (factorial(m) * factorial(m + n)))
        .sum()
}

pub fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let fa = f(a);
    assert!(fa * f(b) < 0.0, "no sign change on [{a}, {b}]");
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (f(m) > 0.0) == (fa > 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// `j₀,₁²`, the first Dirichlet eigenvalue of the unit disk.
pub fn disk_membrane_lambda() -> f64 {
    let j = bisect(|x| bessel_j(0, x), 2.0, 3.0);
    j * j
}

/// `k⁴` for the first root of `J₀(k)I₁(k) + I₀(k)J₁(k)`, the first clamped
/// plate eigenvalue of the unit disk.
pub fn disk_plate_lambda() -> f64 {
    let k = bisect(
        |x| bessel_j(0, x) * bessel_i(1, x) + bessel_i(0, x) * bessel_j(1, x),
        3.0,
        3.4,
    );
    k * k * k * k
}

/// Body with `h = 1 + 0.2 cos 2θ`.
pub fn oval() -> ConvexBody {
    ConvexBody::new(SupportFn::from_modes(1.0, &[(2, 0.2, 0.0)]).unwrap(), 512).unwrap()
}

/// Small deterministic generator for test inputs.
pub struct Lcg(pub u64);

impl Lcg {
    pub fn uniform(&mut self) -> f64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn range(&mut self, a: f64, b: f64) -> f64 {
        a + (b - a) * self.uniform()
    }

    /// Random convex Fourier body of order 4 with curvature radius at least
    /// half the mean radius.
    pub fn body(&mut self) -> SupportFn {
        let a0 = self.range(0.5, 2.0);
        let mut modes = vec![(self.range(-1.0, 1.0), self.range(-1.0, 1.0))];
        // Σ (k² - 1)(|a_k| + |b_k|) ≤ a0 / 2
        let budget = 0.5 * a0 / 3.0;
        for k in 2..=4 {
            let c = budget / ((k * k - 1) as f64 * 2.0);
            modes.push((self.range(-c, c), self.range(-c, c)));
        }
        SupportFn::new(a0, modes)
    }
}
