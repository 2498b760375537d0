//! Truncated two-mode Fock-space reference simulator.
//!
//! Nothing here uses the closed forms from [`crate::correlators`]; states and
//! operators are built from number-state expansions so that the two routes
//! can be checked against each other.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;
#[allow(unused_imports)]
use num_traits::Float;

use num_complex::Complex64;

use crate::amplitude::Amplitude;
use crate::error::{Error, Result};
use crate::special;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Tail mass below which a truncated coherent state is renormalized.
pub const RENORMALIZE_TAIL: f64 = 1e-12;

/// Default truncation: `ceil(4 max|s|^2) + n + 10`.
pub fn default_cutoff(n: u32, settings: &[Amplitude]) -> usize {
    let max_sq = settings.iter().map(|a| a.norm_sqr()).fold(0.0, f64::max);
    (4.0 * max_sq).ceil() as usize + n as usize + 10
}

fn guard(alpha: Amplitude, cutoff: usize) -> Result<()> {
    let s = alpha.norm_sqr();
    if !alpha.is_finite() || s > cutoff as f64 / 4.0 {
        return Err(Error::Truncation { norm_sqr: s, cutoff, required: (4.0 * s).ceil() as usize });
    }
    Ok(())
}

/// Single-mode state vector `sum_n c_n |n>`, `n < cutoff`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeVector {
    amplitudes: Vec<Complex64>,
}

impl ModeVector {
    pub fn cutoff(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn component(&self, n: usize) -> Complex64 {
        self.amplitudes.get(n).copied().unwrap_or(ZERO)
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// Two-mode state with amplitudes indexed by `(n_a, n_b)`, row-major in `n_a`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    cutoff: usize,
    amplitudes: Vec<Complex64>,
}

impl FockVector {
    pub fn zeros(cutoff: usize) -> Self {
        FockVector { cutoff, amplitudes: vec![ZERO; cutoff * cutoff] }
    }

    pub fn vacuum(cutoff: usize) -> Self {
        let mut v = Self::zeros(cutoff);
        v.amplitudes[0] = ONE;
        v
    }

    /// `|a> (x) |b>`; both factors must share a cutoff.
    pub fn product(a: &ModeVector, b: &ModeVector) -> Result<Self> {
        if a.cutoff() != b.cutoff() {
            return Err(Error::Dimension { cutoff: b.cutoff(), required_above: a.cutoff() - 1 });
        }
        let cutoff = a.cutoff();
        let mut amplitudes = Vec::with_capacity(cutoff * cutoff);
        for ca in &a.amplitudes {
            amplitudes.extend(b.amplitudes.iter().map(|cb| ca * cb));
        }
        Ok(FockVector { cutoff, amplitudes })
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// Amplitude of `|n_a, n_b>`; zero outside the truncated space.
    pub fn amplitude(&self, n_a: usize, n_b: usize) -> Complex64 {
        if n_a < self.cutoff && n_b < self.cutoff {
            self.amplitudes[n_a * self.cutoff + n_b]
        } else {
            ZERO
        }
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `<self|other>`
    pub fn inner(&self, other: &FockVector) -> Complex64 {
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum()
    }

    /// Largest amplitude difference; `inf` on mismatched cutoffs.
    pub fn max_abs_diff(&self, other: &FockVector) -> f64 {
        if self.cutoff != other.cutoff {
            return f64::INFINITY;
        }
        self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// `<self| A (x) B |self>` for single-mode operators `A` on mode a and `B` on mode b.
    pub fn expect_product(&self, a: &FockOperator, b: &FockOperator) -> Complex64 {
        let c = self.cutoff;
        debug_assert!(a.dim == c && b.dim == c);
        // (A (x) B) psi  ==  A Psi B^T  with Psi the c x c amplitude matrix
        let mut a_psi = vec![ZERO; c * c];
        for i in 0..c {
            for k in 0..c {
                let aik = a.matrix[i * c + k];
                if aik == ZERO {
                    continue;
                }
                let row = &self.amplitudes[k * c..(k + 1) * c];
                for (dst, src) in a_psi[i * c..(i + 1) * c].iter_mut().zip(row) {
                    *dst += aik * src;
                }
            }
        }
        let mut acc = ZERO;
        for i in 0..c {
            for j in 0..c {
                let psi_ij = self.amplitudes[i * c + j];
                if psi_ij == ZERO {
                    continue;
                }
                let mut out = ZERO;
                for l in 0..c {
                    out += a_psi[i * c + l] * b.matrix[j * c + l];
                }
                acc += psi_ij.conj() * out;
            }
        }
        acc
    }
}

/// Dense single-mode operator on the truncated space.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    dim: usize,
    matrix: Vec<Complex64>,
}

impl FockOperator {
    pub fn identity(dim: usize) -> Self {
        let mut matrix = vec![ZERO; dim * dim];
        for i in 0..dim {
            matrix[i * dim + i] = ONE;
        }
        FockOperator { dim, matrix }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.matrix[row * self.dim + col]
    }

    pub fn matrix(&self) -> &[Complex64] {
        &self.matrix
    }

    pub fn mul(&self, rhs: &FockOperator) -> FockOperator {
        let d = self.dim;
        let mut matrix = vec![ZERO; d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.matrix[i * d + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..d {
                    matrix[i * d + j] += a * rhs.matrix[k * d + j];
                }
            }
        }
        FockOperator { dim: d, matrix }
    }

    pub fn adjoint(&self) -> FockOperator {
        let d = self.dim;
        let mut matrix = vec![ZERO; d * d];
        for i in 0..d {
            for j in 0..d {
                matrix[j * d + i] = self.matrix[i * d + j].conj();
            }
        }
        FockOperator { dim: d, matrix }
    }

    /// Largest `|A_ij - I_ij|` over the leading `block x block` submatrix.
    pub fn identity_defect(&self, block: usize) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..block.min(self.dim) {
            for j in 0..block.min(self.dim) {
                let target = if i == j { ONE } else { ZERO };
                worst = worst.max((self.get(i, j) - target).norm());
            }
        }
        worst
    }

    /// Largest `|A_ij - conj(A_ji)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in 0..self.dim {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// `D (.) D^dagger` for a diagonal middle operator given by `diag`.
    fn conjugate_diagonal(d: &FockOperator, diag: impl Fn(usize) -> f64) -> FockOperator {
        let c = d.dim;
        let mut matrix = vec![ZERO; c * c];
        for i in 0..c {
            for k in 0..c {
                let mut acc = ZERO;
                for m in 0..c {
                    let w = diag(m);
                    if w != 0.0 {
                        acc += d.matrix[i * c + m] * d.matrix[k * c + m].conj() * w;
                    }
                }
                matrix[i * c + k] = acc;
            }
        }
        FockOperator { dim: c, matrix }
    }
}

/// `(|n,0> - |0,n>)/sqrt(2)`.
pub fn noon_state(n: u32, cutoff: usize) -> Result<FockVector> {
    let n = n as usize;
    if n == 0 {
        return Err(Error::PhotonNumber(0));
    }
    if cutoff <= n {
        return Err(Error::Dimension { cutoff, required_above: n });
    }
    let mut v = FockVector::zeros(cutoff);
    v.amplitudes[n * cutoff] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    v.amplitudes[n] = Complex64::new(-FRAC_1_SQRT_2, 0.0);
    Ok(v)
}

/// Truncated coherent state from its number-state series.
pub fn coherent_state(alpha: Amplitude, cutoff: usize) -> Result<ModeVector> {
    guard(alpha, cutoff)?;
    let a = alpha.0;
    let mut amplitudes = Vec::with_capacity(cutoff);
    let mut c = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    for n in 0..cutoff {
        amplitudes.push(c);
        c = c * a / ((n + 1) as f64).sqrt();
    }
    let mut v = ModeVector { amplitudes };
    let norm = v.norm_sqr();
    if (1.0 - norm).abs() < RENORMALIZE_TAIL {
        let scale = 1.0 / norm.sqrt();
        v.amplitudes.iter_mut().for_each(|c| *c *= scale);
    }
    Ok(v)
}

/// `<m|D(alpha)|n>` for all `m, n < cutoff`, from the associated-Laguerre form
/// `sqrt(n!/m!) alpha^{m-n} e^{-|alpha|^2/2} L_n^{(m-n)}(|alpha|^2)` (and its
/// mirror for `m < n`).
pub fn displacement_matrix(alpha: Amplitude, cutoff: usize) -> Result<FockOperator> {
    guard(alpha, cutoff)?;
    let s = alpha.norm_sqr();
    if s == 0.0 {
        return Ok(FockOperator::identity(cutoff));
    }
    let a = alpha.0;
    let (ln_r, theta) = (0.5 * s.ln(), a.arg());
    let mut matrix = vec![ZERO; cutoff * cutoff];
    for m in 0..cutoff {
        for n in 0..cutoff {
            let (lo, hi) = (m.min(n), m.max(n));
            let k = hi - lo;
            let ln_pref =
                0.5 * (special::ln_factorial(lo as u32) - special::ln_factorial(hi as u32)) + k as f64 * ln_r - 0.5 * s;
            let lag = special::assoc_laguerre(lo as u32, k as u32, s);
            // alpha^k above the diagonal, (-alpha*)^k below
            let phase = if m >= n {
                Complex64::from_polar(1.0, k as f64 * theta)
            } else {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                Complex64::from_polar(sign, -(k as f64) * theta)
            };
            matrix[m * cutoff + n] = phase * (ln_pref.exp() * lag);
        }
    }
    Ok(FockOperator { dim: cutoff, matrix })
}

/// No-click POVM element `D(alpha)|0><0|D^dagger(alpha)`.
pub fn vacuum_projector(alpha: Amplitude, cutoff: usize) -> Result<FockOperator> {
    let d = displacement_matrix(alpha, cutoff)?;
    Ok(FockOperator::conjugate_diagonal(&d, |m| if m == 0 { 1.0 } else { 0.0 }))
}

/// Displaced parity `D(alpha)(-1)^n D^dagger(alpha)`.
pub fn displaced_parity(alpha: Amplitude, cutoff: usize) -> Result<FockOperator> {
    let d = displacement_matrix(alpha, cutoff)?;
    Ok(FockOperator::conjugate_diagonal(&d, |m| if m % 2 == 0 { 1.0 } else { -1.0 }))
}

/// Even (`even = true`) or odd parity POVM element at `alpha`.
pub fn parity_projector(alpha: Amplitude, even: bool, cutoff: usize) -> Result<FockOperator> {
    let d = displacement_matrix(alpha, cutoff)?;
    let want = if even { 0 } else { 1 };
    Ok(FockOperator::conjugate_diagonal(&d, |m| if m % 2 == want { 1.0 } else { 0.0 }))
}

/// `|<alpha,beta|Psi>|^2` evaluated in the truncated space.
pub fn oracle_q_joint(n: u32, alpha: Amplitude, beta: Amplitude, cutoff: usize) -> Result<f64> {
    let psi = noon_state(n, cutoff)?;
    let a = coherent_state(alpha, cutoff)?;
    let b = coherent_state(beta, cutoff)?;
    let probe = FockVector::product(&a, &b)?;
    Ok(probe.inner(&psi).norm_sqr())
}

/// Parity correlation `<Psi| D_a P_a D_a^+ (x) D_b P_b D_b^+ |Psi>` by matrix algebra.
pub fn oracle_parity_corr(n: u32, alpha: Amplitude, beta: Amplitude, cutoff: usize) -> Result<f64> {
    let needed = (4.0 * alpha.norm_sqr().max(beta.norm_sqr())).ceil() as usize + n as usize + 10;
    if cutoff < needed {
        return Err(Error::Truncation { norm_sqr: alpha.norm_sqr().max(beta.norm_sqr()), cutoff, required: needed });
    }
    let psi = noon_state(n, cutoff)?;
    let pa = displaced_parity(alpha, cutoff)?;
    let pb = displaced_parity(beta, cutoff)?;
    Ok(psi.expect_product(&pa, &pb).re)
}

/// Applies `U (x) U` where `U` exchanges `|1>` and `|n>` and fixes every other
/// number state.
pub fn apply_swap_unitary(n: u32, state: &FockVector) -> Result<FockVector> {
    let c = state.cutoff;
    let n = n as usize;
    if n == 0 {
        return Err(Error::PhotonNumber(0));
    }
    if c <= n.max(1) {
        return Err(Error::Dimension { cutoff: c, required_above: n.max(1) });
    }
    let swap = |k: usize| match k {
        1 => n,
        k if k == n => 1,
        k => k,
    };
    let mut out = FockVector::zeros(c);
    for i in 0..c {
        for j in 0..c {
            out.amplitudes[swap(i) * c + swap(j)] = state.amplitudes[i * c + j];
        }
    }
    Ok(out)
}
