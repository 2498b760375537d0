//! Closed-form detection probabilities and parity correlations for the state
//! `(|N,0> - |0,N>)/sqrt(2)`.
//!
//! `q_*` are displaced-vacuum ("no click") probabilities, [`click_probabilities`]
//! the complementary on-off click probabilities, and [`parity_corr`] the
//! displaced-parity correlation whose scaled form is the two-mode Wigner
//! function.

use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use num_complex::Complex64;

use crate::amplitude::Amplitude;
use crate::error::{Error, Result};
use crate::special::{self, EXACT_FACTORIAL_MAX};

/// Photon number of the N00N state. The relative phase is fixed at pi.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NoonParams {
    n: u32,
}

impl NoonParams {
    pub const RELATIVE_PHASE: f64 = PI;

    pub fn new(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::PhotonNumber(n));
        }
        Ok(NoonParams { n })
    }

    #[inline]
    pub fn n(self) -> u32 {
        self.n
    }

    pub fn relative_phase(self) -> f64 {
        Self::RELATIVE_PHASE
    }
}

/// Fock amplitude `<n|alpha> = e^{-|alpha|^2/2} alpha^n / sqrt(n!)`.
pub(crate) fn coherent_amplitude(n: u32, alpha: Complex64) -> Complex64 {
    let s = alpha.norm_sqr();
    if n == 0 {
        return Complex64::new((-0.5 * s).exp(), 0.0);
    }
    if s == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    if n <= EXACT_FACTORIAL_MAX {
        alpha.powu(n) * ((-0.5 * s).exp() / special::factorial(n).sqrt())
    } else {
        let mag = (0.5 * n as f64 * s.ln() - 0.5 * s - 0.5 * special::ln_factorial(n)).exp();
        Complex64::from_polar(mag, n as f64 * alpha.arg())
    }
}

/// Two-mode no-click probability `Q_ab(alpha, beta) = |<alpha,beta|Psi>|^2`.
pub fn q_joint(p: NoonParams, alpha: Amplitude, beta: Amplitude) -> f64 {
    let n = p.n();
    let (a, b) = (alpha.0, beta.0);
    let overlap =
        coherent_amplitude(n, a) * coherent_amplitude(0, b) - coherent_amplitude(0, a) * coherent_amplitude(n, b);
    0.5 * overlap.norm_sqr()
}

/// Single-mode no-click probability `Q_a(alpha)`; by symmetry also `Q_b`.
pub fn q_single(p: NoonParams, alpha: Amplitude) -> f64 {
    let s = alpha.norm_sqr();
    0.5 * (special::poisson_weight(p.n(), s) + (-s).exp())
}

pub fn q_single_a(p: NoonParams, alpha: Amplitude) -> f64 {
    q_single(p, alpha)
}

pub fn q_single_b(p: NoonParams, beta: Amplitude) -> f64 {
    q_single(p, beta)
}

/// On-off click probabilities obtained from the Q functions by completeness.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClickProbabilities {
    pub p_a: f64,
    pub p_b: f64,
    pub p_ab: f64,
}

pub fn click_probabilities(p: NoonParams, alpha: Amplitude, beta: Amplitude) -> ClickProbabilities {
    let qa = q_single_a(p, alpha);
    let qb = q_single_b(p, beta);
    let qab = q_joint(p, alpha, beta);
    ClickProbabilities { p_a: 1.0 - qa, p_b: 1.0 - qb, p_ab: 1.0 - qa - qb + qab }
}

/// Displaced-parity correlation `Pi(alpha, beta)` in `[-1, 1]`.
pub fn parity_corr(p: NoonParams, alpha: Amplitude, beta: Amplitude) -> f64 {
    parity_corr_with(p, alpha, beta, special::laguerre)
}

/// [`parity_corr`] with a caller-supplied Laguerre evaluator.
pub fn parity_corr_with<L>(p: NoonParams, alpha: Amplitude, beta: Amplitude, laguerre: L) -> f64
where
    L: Fn(u32, f64) -> f64,
{
    let n = p.n();
    let (sa, sb) = (alpha.norm_sqr(), beta.norm_sqr());
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let diagonal = 0.5 * (-2.0 * (sa + sb)).exp() * sign * (laguerre(n, 4.0 * sa) + laguerre(n, 4.0 * sb));
    // 2^{2N}/N! e^{-2|a|^2-2|b|^2} conj(a)^N b^N  ==  conj(<N|2a>) <N|2b>
    let ga = coherent_amplitude(n, alpha.0 * 2.0);
    let gb = coherent_amplitude(n, beta.0 * 2.0);
    diagonal - (ga.conj() * gb).re
}

/// Two-mode Wigner function `W = 4 Pi / pi^2`.
pub fn wigner(p: NoonParams, alpha: Amplitude, beta: Amplitude) -> f64 {
    parity_corr(p, alpha, beta) * WIGNER_SCALE
}

pub const WIGNER_SCALE: f64 = 4.0 / (PI * PI);
