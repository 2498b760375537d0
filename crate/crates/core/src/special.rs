//! Laguerre polynomials and factorial helpers.

#[allow(unused_imports)]
use num_traits::Float;

/// Largest `n` for which `n!` is stored exactly in an `f64` table.
pub const EXACT_FACTORIAL_MAX: u32 = 20;

const FACTORIALS: [f64; 21] = {
    let mut t = [1.0f64; 21];
    let mut i = 1;
    while i < 21 {
        t[i] = t[i - 1] * i as f64;
        i += 1;
    }
    t
};

/// `n!` as a float. Exact for `n <= 20`, `inf` once it overflows.
pub fn factorial(n: u32) -> f64 {
    if n <= EXACT_FACTORIAL_MAX {
        FACTORIALS[n as usize]
    } else {
        ln_factorial(n).exp()
    }
}

/// `ln(n!)`; table lookup up to 20, `lgamma` beyond.
pub fn ln_factorial(n: u32) -> f64 {
    if n <= EXACT_FACTORIAL_MAX {
        FACTORIALS[n as usize].ln()
    } else {
        libm::lgamma(n as f64 + 1.0)
    }
}

/// Laguerre polynomial `L_n(x)` via the three-term recurrence
/// `(k+1) L_{k+1} = (2k+1-x) L_k - k L_{k-1}`.
pub fn laguerre(n: u32, x: f64) -> f64 {
    assoc_laguerre(n, 0, x)
}

/// Generalized Laguerre polynomial `L_n^{(k)}(x)`.
pub fn assoc_laguerre(n: u32, k: u32, x: f64) -> f64 {
    let k = k as f64;
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + k - x;
    for i in 1..n {
        let i = i as f64;
        let next = ((2.0 * i + 1.0 + k - x) * cur - (i + k) * prev) / (i + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `e^{-s} s^n / n!`, the Poisson weight of `n` at mean `s >= 0`.
pub fn poisson_weight(n: u32, s: f64) -> f64 {
    if n == 0 {
        return (-s).exp();
    }
    if s == 0.0 {
        return 0.0;
    }
    if n <= EXACT_FACTORIAL_MAX {
        (-s).exp() * s.powi(n as i32) / FACTORIALS[n as usize]
    } else {
        (n as f64 * s.ln() - s - ln_factorial(n)).exp()
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl core::iter::FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::default();
        iter.into_iter().for_each(|x| acc.add(x));
        acc
    }
}
