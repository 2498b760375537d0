//! Self-checks of the closed forms against the Fock-space oracle, exact
//! identities and, at the full level, the optimizer.
//!
//! The closed forms under test come through [`ClosedForms`], so a corrupted
//! implementation can be substituted to confirm that the checks catch it.

use std::f64::consts::LN_2;

use noonbell_core::correlators::{self, parity_corr_with};
use noonbell_core::fock::{apply_swap_unitary, noon_state, oracle_parity_corr, oracle_q_joint};
use noonbell_core::inequalities::{ch_analytic_reduced, ch_reduced_excess, ch_reduced_settings, ch_value, j_value};
use noonbell_core::marginals::{MarginalKind, Marginals, DEFAULT_ORDER};
use noonbell_core::optimizer::optimize_with;
use noonbell_core::{special, Amplitude, BellFunctional, Executor, NoonParams, OptimizerConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::params::Level;

pub trait ClosedForms: Sync {
    fn laguerre(&self, n: u32, x: f64) -> f64 {
        special::laguerre(n, x)
    }

    fn q_joint(&self, p: NoonParams, a: Amplitude, b: Amplitude) -> f64 {
        correlators::q_joint(p, a, b)
    }

    fn parity_corr(&self, p: NoonParams, a: Amplitude, b: Amplitude) -> f64 {
        parity_corr_with(p, a, b, |n, x| self.laguerre(n, x))
    }
}

/// The library implementations.
pub struct Library;

impl ClosedForms for Library {}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub requirement: String,
    pub tolerance: f64,
    pub observed: f64,
    pub passed: bool,
}

impl Check {
    fn at_most(name: &str, what: &str, observed: f64, tolerance: f64) -> Check {
        Check {
            name: name.into(),
            requirement: format!("{what} <= tolerance"),
            tolerance,
            observed,
            passed: observed <= tolerance,
        }
    }

    fn above(name: &str, what: &str, observed: f64, threshold: f64) -> Check {
        Check {
            name: name.into(),
            requirement: format!("{what} > tolerance"),
            tolerance: threshold,
            observed,
            passed: observed > threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub level: Level,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl VerifyReport {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn text(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            s.push_str(&format!(
                "{} {:<28} observed={:<12.4e} tolerance={:.1e} ({})\n",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.observed,
                c.tolerance,
                c.requirement
            ));
        }
        let failed = self.failures().count();
        s.push_str(&format!("{} of {} checks passed\n", self.checks.len() - failed, self.checks.len()));
        s
    }
}

fn p(n: u32) -> NoonParams {
    NoonParams::new(n).expect("n >= 1")
}

fn disk(rng: &mut ChaCha8Rng, radius: f64) -> Amplitude {
    let r = radius * rng.gen::<f64>().sqrt();
    Amplitude::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
}

/// Explicit series `sum_k (-1)^k C(n,k) x^k / k!`.
fn laguerre_series(n: u32, x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..=n {
        term *= -x * f64::from(n - k + 1) / f64::from(k * k);
        sum += term;
    }
    sum
}

fn laguerre_check<F: ClosedForms>(forms: &F) -> Check {
    let mut worst = 0.0f64;
    for n in 0..=12 {
        for i in 0..=16 {
            let x = 0.5 * f64::from(i);
            let exact = laguerre_series(n, x);
            worst = worst.max((forms.laguerre(n, x) - exact).abs() / exact.abs().max(1.0));
        }
    }
    Check::at_most("laguerre-series", "max relative error", worst, 1e-9)
}

fn oracle_checks<F: ClosedForms>(forms: &F, n_max: u32, samples: usize, cutoff: usize) -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let (mut q_err, mut pi_err) = (0.0f64, 0.0f64);
    for i in 0..samples {
        let n = 1 + (i as u32 % n_max);
        let (a, b) = (disk(&mut rng, 2.5), disk(&mut rng, 2.5));
        let q = oracle_q_joint(n, a, b, cutoff).map_or(f64::INFINITY, |o| (forms.q_joint(p(n), a, b) - o).abs());
        q_err = q_err.max(q);
        let (a, b) = (disk(&mut rng, 1.5), disk(&mut rng, 1.5));
        let pi =
            oracle_parity_corr(n, a, b, cutoff).map_or(f64::INFINITY, |o| (forms.parity_corr(p(n), a, b) - o).abs());
        pi_err = pi_err.max(pi);
    }
    vec![
        Check::at_most(&format!("q-joint-oracle-c{cutoff}"), "max abs error", q_err, 1e-9),
        Check::at_most(&format!("parity-oracle-c{cutoff}"), "max abs error", pi_err, 1e-7),
    ]
}

fn witness_checks() -> Vec<Check> {
    let (mut mismatch, mut min_excess) = (0.0f64, f64::INFINITY);
    for n in 1..=8 {
        for i in 1..=50 {
            let s = LN_2 * f64::from(i) / 51.0;
            let settings = ch_reduced_settings(p(n), s);
            let direct = ch_value(p(n), &settings).unwrap_or(f64::NAN);
            let err = (direct - ch_analytic_reduced(p(n), s)).abs();
            mismatch = if err.is_nan() { f64::INFINITY } else { mismatch.max(err) };
            min_excess = min_excess.min(ch_reduced_excess(p(n), s));
        }
    }
    vec![
        Check::at_most("ch-witness-agreement", "max abs error", mismatch, 1e-12),
        Check::above("ch-witness-below-minus-one", "min excess below -1", min_excess, 0.0),
    ]
}

fn plateau_checks() -> Vec<Check> {
    let zeros = [Amplitude::ZERO; 4];
    let j2 = (1..=10).map(|n| (j_value(2, p(n), &zeros).unwrap_or(f64::NAN) - 4.0).abs()).fold(0.0, f64::max);
    let j4 = BellFunctional::j(4).expect("j4");
    let at_infinity = [false, false, false, true];
    let limit = (1..=6)
        .map(|n| (j4.evaluate_limit(p(n), &zeros, &at_infinity).unwrap_or(f64::NAN) - 1.5).abs())
        .fold(0.0, f64::max);
    vec![
        Check::at_most("j2-zero-settings", "max |J2 - 4|", j2, 1e-12),
        Check::at_most("j4-large-delta-limit", "max |J4 - 1.5|", limit, 1e-12),
    ]
}

fn swap_check() -> Check {
    let one = noon_state(1, 16).expect("cutoff");
    let worst = (2..=6)
        .map(|n| match (apply_swap_unitary(n, &one), noon_state(n, 16)) {
            (Ok(a), Ok(b)) => a.max_abs_diff(&b),
            _ => f64::INFINITY,
        })
        .fold(0.0, f64::max);
    Check::at_most("swap-unitary", "max abs error", worst, 1e-12)
}

fn marginal_checks<E: Executor>(exec: &E, ns: &[u32], grid: bool) -> Vec<Check> {
    let m = Marginals::new(DEFAULT_ORDER).expect("order");
    let (mut mass, mut corr) = (0.0f64, 0.0f64);
    for &kind in &[MarginalKind::Q, MarginalKind::W] {
        for &n in ns {
            mass = mass.max((m.total_mass(kind, p(n)) - 1.0).abs());
            if n >= 2 {
                corr = corr.max(m.correlation_coefficient(kind, p(n)).map_or(f64::INFINITY, f64::abs));
            }
        }
    }
    let mut checks = vec![
        Check::at_most("marginal-mass", "max |mass - 1|", mass, 1e-6),
        Check::at_most("marginal-correlation", "max |r|, N >= 2", corr, 1e-8),
    ];
    if grid {
        let lowest = (1..=3)
            .map(|n| {
                m.density_grid_with(exec, MarginalKind::W, p(n), 4.0, 101).map_or(f64::NEG_INFINITY, |g| g.min_value())
            })
            .fold(f64::INFINITY, f64::min);
        checks.push(Check::at_most("w-marginal-nonnegative", "max negativity", (-lowest).max(0.0), 1e-9));
    }
    checks
}

fn optimizer_checks<E: Executor>(exec: &E) -> Vec<Check> {
    let cfg = OptimizerConfig::default();
    let run = |f: &BellFunctional, n: u32| optimize_with(exec, f, p(n), &cfg).map_or(f64::NAN, |r| r.best_value);
    let chsh = BellFunctional::chsh();
    let chsh1 = run(&chsh, 1).abs();
    let chsh_rest = (2..=5).map(|n| run(&chsh, n).abs()).fold(0.0, f64::max);
    let j2 = BellFunctional::j(2).expect("j2");
    let j2_err = (1..=10).map(|n| (run(&j2, n) - 4.0).abs()).fold(0.0, f64::max);
    let ch = BellFunctional::ch();
    let dominance = (1..=4)
        .map(|n| {
            let witness =
                (1..=200).map(|i| ch_analytic_reduced(p(n), 3.0 * f64::from(i) / 200.0)).fold(f64::INFINITY, f64::min);
            run(&ch, n) - witness
        })
        .fold(f64::NEG_INFINITY, f64::max);
    vec![
        Check::above("chsh-n1-violation", "|CHSH(N=1)| - 2", chsh1 - 2.0, 1e-3),
        Check::at_most("chsh-n2-5-no-violation", "max |CHSH| - 2", chsh_rest - 2.0, 1e-6),
        Check::at_most("j2-optimum", "max |J2 - 4|", j2_err, 1e-8),
        Check::at_most("ch-witness-dominance", "max optimum - witness", dominance, 0.0),
    ]
}

/// Runs the checks of `level` against `forms`.
pub fn run<F: ClosedForms, E: Executor>(level: Level, forms: &F, exec: &E) -> VerifyReport {
    let mut checks = vec![laguerre_check(forms)];
    match level {
        Level::Quick => checks.extend(oracle_checks(forms, 5, 60, 48)),
        Level::Full => checks.extend(oracle_checks(forms, 5, 200, 64)),
    }
    checks.extend(witness_checks());
    checks.extend(plateau_checks());
    checks.push(swap_check());
    match level {
        Level::Quick => checks.extend(marginal_checks(exec, &[1, 2, 3], false)),
        Level::Full => {
            checks.extend(marginal_checks(exec, &[1, 2, 3, 4, 5], true));
            checks.extend(optimizer_checks(exec));
        }
    }
    let passed = checks.iter().all(|c| c.passed);
    VerifyReport { level, checks, passed }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_matches_known_polynomials() {
        assert!((laguerre_series(2, 3.0) - (9.0 - 12.0 + 2.0) / 2.0).abs() < 1e-15);
        assert_eq!(laguerre_series(0, 5.0), 1.0);
    }
}
