//! Bell functionals as data, plus hand-written evaluators for the ones used
//! throughout (CH, CHSH, three-event and six-event on-off inequalities).
//!
//! A [`BellFunctional`] is a linear combination of single and joint
//! probabilities over a list of settings. Joint terms `(i, j)` always place
//! setting `i` on mode a and setting `j` on mode b.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::Deref;
#[allow(unused_imports)]
use num_traits::Float;

use num_complex::Complex64;

use crate::amplitude::Amplitude;
use crate::correlators::{self, NoonParams};
use crate::error::{Error, Result};
use crate::special;

/// Which measurement the probabilities in a functional come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum ProbabilityKind {
    /// On-off detection, click probabilities `P = 1 - Q`.
    OnOffClick,
    /// On-off detection, no-click probabilities `Q` used directly.
    OnOffNoClick,
    /// Displaced-parity correlations `Pi`.
    Parity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Party {
    A,
    B,
    /// Measurable by either party; evaluated with the mode-a formula.
    Either,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum ViolationDirection {
    AboveUpper,
    BelowLower,
    /// Either side of a two-sided bound counts.
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SingleTerm {
    pub setting: usize,
    pub party: Party,
    pub coefficient: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct JointTerm {
    pub setting_a: usize,
    pub setting_b: usize,
    pub coefficient: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BellFunctional {
    pub name: String,
    pub setting_labels: Vec<String>,
    pub single_terms: Vec<SingleTerm>,
    pub joint_terms: Vec<JointTerm>,
    pub lower_bound: Option<f64>,
    pub upper_bound: Option<f64>,
    pub violation_direction: ViolationDirection,
    pub probability_kind: ProbabilityKind,
    /// Treat events of identical settings as the same event, so that the
    /// joint probability of coincident settings is the single probability.
    pub identify_coincident_events: bool,
}

/// Ordered settings evaluated against a functional.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct SettingsVector(pub Vec<Amplitude>);

impl SettingsVector {
    pub fn new(settings: Vec<Amplitude>) -> Result<Self> {
        if let Some(i) = settings.iter().position(|a| !a.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(SettingsVector(settings))
    }

    pub fn zeros(len: usize) -> Self {
        SettingsVector(vec![Amplitude::ZERO; len])
    }

    /// Lexicographic total order over `(re, im)` pairs.
    pub fn total_cmp(&self, other: &Self) -> core::cmp::Ordering {
        for (a, b) in self.0.iter().zip(&other.0) {
            match a.total_cmp(b) {
                core::cmp::Ordering::Equal => {}
                ord => return ord,
            }
        }
        self.0.len().cmp(&other.0.len())
    }

    pub fn max_norm(&self) -> f64 {
        self.0.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }
}

impl Deref for SettingsVector {
    type Target = [Amplitude];
    fn deref(&self) -> &[Amplitude] {
        &self.0
    }
}

impl From<Vec<Amplitude>> for SettingsVector {
    fn from(v: Vec<Amplitude>) -> Self {
        SettingsVector(v)
    }
}

/// Value of a functional together with the side(s) of the classical band it breaks.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BellValue {
    pub value: f64,
    pub below_lower: bool,
    pub above_upper: bool,
}

fn labels(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

fn single(setting: usize, party: Party, coefficient: f64) -> SingleTerm {
    SingleTerm { setting, party, coefficient }
}

fn joint(setting_a: usize, setting_b: usize, coefficient: f64) -> JointTerm {
    JointTerm { setting_a, setting_b, coefficient }
}

const SIX_EVENT_LABELS: [&str; 4] = ["alpha", "beta", "gamma", "delta"];
const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

impl BellFunctional {
    pub fn num_settings(&self) -> usize {
        self.setting_labels.len()
    }

    /// Clauser–Horne combination over `(alpha, alpha', beta, beta')`, bounds `[-1, 0]`.
    pub fn ch() -> Self {
        BellFunctional {
            name: "ch".into(),
            setting_labels: labels(&["alpha", "alpha'", "beta", "beta'"]),
            single_terms: vec![single(1, Party::A, -1.0), single(2, Party::B, -1.0)],
            joint_terms: vec![joint(0, 2, 1.0), joint(0, 3, -1.0), joint(1, 2, 1.0), joint(1, 3, 1.0)],
            lower_bound: Some(-1.0),
            upper_bound: Some(0.0),
            violation_direction: ViolationDirection::BelowLower,
            probability_kind: ProbabilityKind::OnOffClick,
            identify_coincident_events: false,
        }
    }

    /// CHSH combination of parity correlations, bounds `[-2, 2]`.
    pub fn chsh() -> Self {
        BellFunctional {
            name: "chsh".into(),
            setting_labels: labels(&["alpha", "alpha'", "beta", "beta'"]),
            single_terms: vec![],
            joint_terms: vec![joint(0, 2, 1.0), joint(1, 2, 1.0), joint(0, 3, 1.0), joint(1, 3, -1.0)],
            lower_bound: Some(-2.0),
            upper_bound: Some(2.0),
            violation_direction: ViolationDirection::Both,
            probability_kind: ProbabilityKind::Parity,
            identify_coincident_events: false,
        }
    }

    /// `0 <= p_i - p_ij - p_ik + p_jk`
    pub fn bell_wigner_1() -> Self {
        BellFunctional {
            name: "bw1".into(),
            setting_labels: labels(&["i", "j", "k"]),
            single_terms: vec![single(0, Party::Either, 1.0)],
            joint_terms: vec![joint(0, 1, -1.0), joint(0, 2, -1.0), joint(1, 2, 1.0)],
            lower_bound: Some(0.0),
            upper_bound: None,
            violation_direction: ViolationDirection::BelowLower,
            probability_kind: ProbabilityKind::OnOffClick,
            identify_coincident_events: true,
        }
    }

    /// `p_i + p_j + p_k - p_ij - p_ik - p_jk <= 1`
    pub fn bell_wigner_2() -> Self {
        BellFunctional {
            name: "bw2".into(),
            setting_labels: labels(&["i", "j", "k"]),
            single_terms: (0..3).map(|i| single(i, Party::Either, 1.0)).collect(),
            joint_terms: vec![joint(0, 1, -1.0), joint(0, 2, -1.0), joint(1, 2, -1.0)],
            lower_bound: None,
            upper_bound: Some(1.0),
            violation_direction: ViolationDirection::AboveUpper,
            probability_kind: ProbabilityKind::OnOffClick,
            identify_coincident_events: true,
        }
    }

    /// Six-event inequality `J_which` (1..=4) over `(alpha, beta, gamma, delta)`,
    /// evaluated on no-click probabilities.
    pub fn j(which: u8) -> Result<Self> {
        let (singles, joints, lower, upper, direction): (
            [f64; 4],
            [f64; 6],
            Option<f64>,
            Option<f64>,
            ViolationDirection,
        ) = match which {
            1 => ([1.0; 4], [-1.0; 6], None, Some(1.0), ViolationDirection::AboveUpper),
            2 => ([2.0; 4], [-1.0; 6], None, Some(3.0), ViolationDirection::AboveUpper),
            3 => (
                [1.0, 0.0, 0.0, 0.0],
                [-1.0, -1.0, -1.0, 1.0, 1.0, 1.0],
                Some(0.0),
                None,
                ViolationDirection::BelowLower,
            ),
            4 => (
                [1.0, 1.0, 1.0, -2.0],
                [-1.0, -1.0, 1.0, -1.0, 1.0, 1.0],
                None,
                Some(1.0),
                ViolationDirection::AboveUpper,
            ),
            other => return Err(Error::UnknownJ(other)),
        };
        Ok(BellFunctional {
            name: alloc::format!("j{which}"),
            setting_labels: labels(&SIX_EVENT_LABELS),
            single_terms: singles
                .iter()
                .enumerate()
                .filter(|(_, c)| **c != 0.0)
                .map(|(i, c)| single(i, Party::Either, *c))
                .collect(),
            joint_terms: PAIRS.iter().zip(joints).map(|(&(a, b), c)| joint(a, b, c)).collect(),
            lower_bound: lower,
            upper_bound: upper,
            violation_direction: direction,
            probability_kind: ProbabilityKind::OnOffNoClick,
            identify_coincident_events: false,
        })
    }

    pub fn by_name(name: &str) -> Option<Self> {
        catalog().into_iter().find(|f| f.name.eq_ignore_ascii_case(name))
    }

    /// Checks the structural invariants of the term lists.
    pub fn validate(&self) -> Result<()> {
        let n = self.num_settings();
        let bad_single = self.single_terms.iter().any(|t| t.setting >= n);
        let bad_joint = self.joint_terms.iter().any(|t| t.setting_a >= n || t.setting_b >= n);
        if bad_single || bad_joint {
            return Err(Error::Config(alloc::format!("{}: term references setting >= {n}", self.name)));
        }
        if self.lower_bound.is_none() && self.upper_bound.is_none() {
            return Err(Error::Config(alloc::format!("{}: no classical bound", self.name)));
        }
        if self.probability_kind == ProbabilityKind::Parity && !self.single_terms.is_empty() {
            return Err(Error::Config(alloc::format!("{}: parity functionals take joint terms only", self.name)));
        }
        Ok(())
    }

    fn check_arity(&self, settings: &[Amplitude]) -> Result<()> {
        if settings.len() != self.num_settings() {
            return Err(Error::Arity { name: self.name.clone(), expected: self.num_settings(), got: settings.len() });
        }
        Ok(())
    }

    /// Generic evaluation from the term lists.
    pub fn evaluate(&self, p: NoonParams, settings: &[Amplitude]) -> Result<f64> {
        self.check_arity(settings)?;
        Ok(self.evaluate_unchecked(p, settings, None))
    }

    /// Evaluation with some settings sent to infinite amplitude, where every
    /// no-click probability and parity correlation involving them vanishes.
    pub fn evaluate_limit(&self, p: NoonParams, settings: &[Amplitude], at_infinity: &[bool]) -> Result<f64> {
        self.check_arity(settings)?;
        if at_infinity.len() != settings.len() {
            return Err(Error::Arity { name: self.name.clone(), expected: settings.len(), got: at_infinity.len() });
        }
        Ok(self.evaluate_unchecked(p, settings, Some(at_infinity)))
    }

    /// Value plus which side(s) of the classical band it lies beyond.
    pub fn classify(&self, value: f64) -> BellValue {
        BellValue {
            value,
            below_lower: self.lower_bound.is_some_and(|b| value < b),
            above_upper: self.upper_bound.is_some_and(|b| value > b),
        }
    }

    /// Evaluation without arity checks; `settings.len()` must equal
    /// [`Self::num_settings`].
    pub fn evaluate_unchecked(&self, p: NoonParams, settings: &[Amplitude], at_infinity: Option<&[bool]>) -> f64 {
        let inf = |i: usize| at_infinity.is_some_and(|m| m[i]);
        let q1 = |i: usize| if inf(i) { 0.0 } else { correlators::q_single(p, settings[i]) };
        let single_p = |i: usize| match self.probability_kind {
            ProbabilityKind::OnOffClick => 1.0 - q1(i),
            ProbabilityKind::OnOffNoClick => q1(i),
            ProbabilityKind::Parity => 0.0,
        };
        let coincident =
            |i: usize, j: usize| self.identify_coincident_events && settings[i] == settings[j] && inf(i) == inf(j);
        let joint2 = |i: usize, j: usize| {
            if inf(i) || inf(j) {
                return 0.0;
            }
            match self.probability_kind {
                ProbabilityKind::Parity => correlators::parity_corr(p, settings[i], settings[j]),
                _ => correlators::q_joint(p, settings[i], settings[j]),
            }
        };
        let mut acc = special::CompensatedSum::default();
        for t in &self.single_terms {
            acc.add(t.coefficient * single_p(t.setting));
        }
        for t in &self.joint_terms {
            let (i, j, c) = (t.setting_a, t.setting_b, t.coefficient);
            if coincident(i, j) {
                acc.add(c * single_p(i));
            } else if self.probability_kind == ProbabilityKind::OnOffClick {
                // P_ab = 1 - Q_a - Q_b + Q_ab, summed term by term
                acc.add(c);
                acc.add(-c * q1(i));
                acc.add(-c * q1(j));
                acc.add(c * joint2(i, j));
            } else {
                acc.add(c * joint2(i, j));
            }
        }
        acc.value()
    }
}

/// Every functional known to the library, in a fixed order.
pub fn catalog() -> Vec<BellFunctional> {
    let mut out = vec![
        BellFunctional::ch(),
        BellFunctional::chsh(),
        BellFunctional::bell_wigner_1(),
        BellFunctional::bell_wigner_2(),
    ];
    out.extend((1..=4).map(|k| BellFunctional::j(k).expect("1..=4 are valid")));
    out
}

fn arity<const K: usize>(name: &str, s: &[Amplitude]) -> Result<[Amplitude; K]> {
    s.try_into().map_err(|_| Error::Arity { name: name.to_string(), expected: K, got: s.len() })
}

/// CH combination, settings `(alpha, alpha', beta, beta')`.
pub fn ch_value(p: NoonParams, s: &[Amplitude]) -> Result<f64> {
    let [a, ap, b, bp] = arity::<4>("ch", s)?;
    let pab = |x, y| correlators::click_probabilities(p, x, y).p_ab;
    let pa = 1.0 - correlators::q_single_a(p, ap);
    let pb = 1.0 - correlators::q_single_b(p, b);
    Ok(pab(a, b) - pab(a, bp) + pab(ap, b) + pab(ap, bp) - pa - pb)
}

/// CH on the restricted family `alpha' = beta = 0`, `|alpha|^2 = |beta'|^2 = s`,
/// `beta'^N = -alpha^N`: `s^N e^{-s} (1 - 2 e^{-s}) / N! - 1`.
pub fn ch_analytic_reduced(p: NoonParams, s: f64) -> f64 {
    -1.0 - ch_reduced_excess(p, s)
}

/// Amount by which [`ch_analytic_reduced`] lies below -1, computed without
/// the cancellation against -1 (positive exactly on `0 < s < ln 2`).
pub fn ch_reduced_excess(p: NoonParams, s: f64) -> f64 {
    special::poisson_weight(p.n(), s) * (2.0 * (-s).exp() - 1.0)
}

/// Settings on which [`ch_value`] equals [`ch_analytic_reduced`] for every `N`:
/// `alpha = sqrt(s)`, `beta' = -alpha` for odd `N` and `alpha e^{i pi/N}` for
/// even `N`.
pub fn ch_reduced_settings(p: NoonParams, s: f64) -> [Amplitude; 4] {
    let n = p.n();
    let a = Complex64::new(s.sqrt(), 0.0);
    let bp = if n % 2 == 1 { -a } else { a * Complex64::from_polar(1.0, PI / n as f64) };
    [Amplitude(a), Amplitude::ZERO, Amplitude::ZERO, Amplitude(bp)]
}

/// The sign-flip family `beta' = (-1)^N alpha` (so `beta' = alpha` for even
/// `N`). It coincides with [`ch_reduced_settings`] for odd `N`; for even `N`
/// the interference term cancels and CH stays above -1.
pub fn ch_reduced_settings_sign_flip(p: NoonParams, s: f64) -> [Amplitude; 4] {
    let a = Amplitude::new(s.sqrt(), 0.0);
    let bp = if p.n() % 2 == 1 { Amplitude::new(-s.sqrt(), 0.0) } else { a };
    [a, Amplitude::ZERO, Amplitude::ZERO, bp]
}

/// CHSH combination of parity correlations, settings `(alpha, alpha', beta, beta')`.
pub fn chsh_value(p: NoonParams, s: &[Amplitude]) -> Result<f64> {
    let [a, ap, b, bp] = arity::<4>("chsh", s)?;
    let pi = |x, y| correlators::parity_corr(p, x, y);
    Ok(pi(a, b) + pi(ap, b) + pi(a, bp) - pi(ap, bp))
}

/// Both three-event inequalities at settings `(i, j, k)` on click probabilities:
/// `(p_i - p_ij - p_ik + p_jk, p_i + p_j + p_k - p_ij - p_ik - p_jk)`.
pub fn bell_wigner_values(p: NoonParams, s: &[Amplitude]) -> Result<(f64, f64)> {
    let settings = arity::<3>("bw", s)?;
    let single = |x: usize| 1.0 - correlators::q_single(p, settings[x]);
    let pair = |x: usize, y: usize| {
        if settings[x] == settings[y] {
            single(x)
        } else {
            correlators::click_probabilities(p, settings[x], settings[y]).p_ab
        }
    };
    let (pi, pj, pk) = (single(0), single(1), single(2));
    let (pij, pik, pjk) = (pair(0, 1), pair(0, 2), pair(1, 2));
    Ok((pi - pij - pik + pjk, pi + pj + pk - pij - pik - pjk))
}

/// Six-event functional `J_which` on no-click probabilities, settings
/// `(alpha, beta, gamma, delta)`.
pub fn j_value(which: u8, p: NoonParams, s: &[Amplitude]) -> Result<f64> {
    if !(1..=4).contains(&which) {
        return Err(Error::UnknownJ(which));
    }
    let [a, b, c, d] = arity::<4>("j", s)?;
    let q = |x| correlators::q_single(p, x);
    let qq = |x, y| correlators::q_joint(p, x, y);
    Ok(match which {
        1 => q(a) + q(b) + q(c) + q(d) - qq(a, b) - qq(a, c) - qq(a, d) - qq(b, c) - qq(b, d) - qq(c, d),
        2 => 2.0 * (q(a) + q(b) + q(c) + q(d)) - qq(a, b) - qq(a, c) - qq(a, d) - qq(b, c) - qq(b, d) - qq(c, d),
        3 => q(a) - qq(a, b) - qq(a, c) - qq(a, d) + qq(b, c) + qq(b, d) + qq(c, d),
        _ => q(a) + q(b) + q(c) - 2.0 * q(d) - qq(a, b) - qq(a, c) + qq(a, d) - qq(b, c) + qq(b, d) + qq(c, d),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn np(n: u32) -> NoonParams {
        NoonParams::new(n).unwrap()
    }

    fn settings(k: usize) -> impl Strategy<Value = Vec<Amplitude>> {
        proptest::collection::vec((-2.5..2.5f64, -2.5..2.5f64).prop_map(|(r, i)| Amplitude::new(r, i)), k)
    }

    #[test]
    fn catalog_is_valid() {
        let cat = catalog();
        assert_eq!(cat.len(), 8);
        for f in &cat {
            f.validate().unwrap();
        }
        let ch = BellFunctional::ch();
        assert_eq!(ch.single_terms.len() + ch.joint_terms.len(), 6);
        assert_eq!((ch.lower_bound, ch.upper_bound), (Some(-1.0), Some(0.0)));
        let chsh = BellFunctional::chsh();
        assert_eq!(chsh.joint_terms.len(), 4);
        assert_eq!((chsh.lower_bound, chsh.upper_bound), (Some(-2.0), Some(2.0)));
        assert!(BellFunctional::by_name("J4").is_some());
        assert!(BellFunctional::by_name("nosuch").is_none());
        assert_eq!(BellFunctional::j(5), Err(Error::UnknownJ(5)));
    }

    #[test]
    fn ch_examples() {
        let z = [Amplitude::ZERO; 4];
        assert_abs_diff_eq!(ch_value(np(1), &z).unwrap(), -1.0, epsilon = 1e-15);
        let s = 0.5f64;
        let expect = -1.0 + s * (-s).exp() * (1.0 - 2.0 * (-s).exp());
        let a = Amplitude::new(s.sqrt(), 0.0);
        let odd = [a, Amplitude::ZERO, Amplitude::ZERO, Amplitude(-a.0)];
        assert_abs_diff_eq!(ch_value(np(1), &odd).unwrap(), expect, epsilon = 1e-14);
        assert_abs_diff_eq!(expect, -1.0646141113151255, epsilon = 1e-14);
        assert!(matches!(ch_value(np(1), &z[..3]), Err(Error::Arity { expected: 4, got: 3, .. })));
    }

    #[test]
    fn ch_reduced_examples() {
        for n in 1..6 {
            assert_eq!(ch_analytic_reduced(np(n), 0.0), -1.0);
            assert_abs_diff_eq!(ch_analytic_reduced(np(n), 2f64.ln()), -1.0, epsilon = 1e-16);
        }
        let s = 0.4f64;
        let expect = -1.0 - (s.powi(3) / 6.0) * (-s).exp() * (2.0 * (-s).exp() - 1.0);
        assert_abs_diff_eq!(ch_analytic_reduced(np(3), s), expect, epsilon = 1e-15);
        assert!(ch_analytic_reduced(np(3), s) < -1.0);
    }

    #[test]
    fn ch_reduced_settings_reproduce_closed_form() {
        for n in 1..=8 {
            for k in 1..50 {
                let s = 2f64.ln() * k as f64 / 50.0;
                let v = ch_value(np(n), &ch_reduced_settings(np(n), s)).unwrap();
                assert_abs_diff_eq!(v, ch_analytic_reduced(np(n), s), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn sign_flip_family_fails_for_even_n() {
        // beta' = alpha cancels the interference term: CH = s^N e^{-s}/N! - 1 > -1
        let s = 0.5;
        let v = ch_value(np(2), &ch_reduced_settings_sign_flip(np(2), s)).unwrap();
        assert_abs_diff_eq!(v, special::poisson_weight(2, s) - 1.0, epsilon = 1e-14);
        assert!(v > -1.0);
        let v = ch_value(np(3), &ch_reduced_settings_sign_flip(np(3), s)).unwrap();
        assert_abs_diff_eq!(v, ch_analytic_reduced(np(3), s), epsilon = 1e-14);
    }

    #[test]
    fn analytic_witness_scan() {
        for n in 1..=8 {
            for k in 1..=50 {
                let s = 2f64.ln() * k as f64 / 51.0;
                // s^N/N! drops below one ulp of 1 for small s and large N
                assert!(ch_reduced_excess(np(n), s) > 0.0, "N={n} s={s}");
                assert!(ch_analytic_reduced(np(n), s) <= -1.0);
            }
        }
    }

    #[test]
    fn chsh_examples() {
        let z = [Amplitude::ZERO; 4];
        assert_abs_diff_eq!(chsh_value(np(1), &z).unwrap(), -2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(chsh_value(np(2), &z).unwrap(), 2.0, epsilon = 1e-15);
    }

    #[test]
    fn j_examples() {
        let z = [Amplitude::ZERO; 4];
        for n in 1..=10 {
            assert_eq!(j_value(2, np(n), &z).unwrap(), 4.0);
            assert_eq!(j_value(1, np(n), &z).unwrap(), 2.0);
        }
        // delta far out: J4 -> 3/2
        let far = [Amplitude::ZERO, Amplitude::ZERO, Amplitude::ZERO, Amplitude::new(9.0, 0.0)];
        assert_abs_diff_eq!(j_value(4, np(1), &far).unwrap(), 1.5, epsilon = 1e-15);
        let j4 = BellFunctional::j(4).unwrap();
        let limit = j4.evaluate_limit(np(1), &z, &[false, false, false, true]).unwrap();
        assert_eq!(limit, 1.5);
        assert_eq!(j_value(0, np(1), &z), Err(Error::UnknownJ(0)));
    }

    #[test]
    fn bell_wigner_examples() {
        let z = [Amplitude::ZERO; 3];
        // all settings coincide: every event is the same event
        let (v1, v2) = bell_wigner_values(np(1), &z).unwrap();
        assert_abs_diff_eq!(v1, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v2, 0.0, epsilon = 1e-15);
        let a = Amplitude::new(0.7, 0.1);
        let k = Amplitude::new(-0.3, 0.9);
        let (v1, _) = bell_wigner_values(np(2), &[a, a, k]).unwrap();
        assert_abs_diff_eq!(v1, 0.0, epsilon = 1e-15);
        let bw1 = BellFunctional::bell_wigner_1();
        assert_abs_diff_eq!(bw1.evaluate(np(2), &[a, a, k]).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn limit_matches_large_amplitude() {
        let ch = BellFunctional::ch();
        let s = [Amplitude::new(0.3, 0.0), Amplitude::new(40.0, 0.0), Amplitude::new(-0.2, 0.4), Amplitude::ZERO];
        let far = ch.evaluate(np(2), &s).unwrap();
        let lim = ch.evaluate_limit(np(2), &s, &[false, true, false, false]).unwrap();
        assert_abs_diff_eq!(far, lim, epsilon = 1e-14);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn generic_matches_hand_coded(n in 1u32..7, s in settings(4), s3 in settings(3)) {
            let p = np(n);
            let ch = BellFunctional::ch().evaluate(p, &s).unwrap();
            prop_assert!((ch - ch_value(p, &s).unwrap()).abs() < 1e-12);
            let chsh = BellFunctional::chsh().evaluate(p, &s).unwrap();
            prop_assert!((chsh - chsh_value(p, &s).unwrap()).abs() < 1e-12);
            for k in 1..=4u8 {
                let g = BellFunctional::j(k).unwrap().evaluate(p, &s).unwrap();
                prop_assert!((g - j_value(k, p, &s).unwrap()).abs() < 1e-12);
            }
            let (b1, b2) = bell_wigner_values(p, &s3).unwrap();
            prop_assert!((BellFunctional::bell_wigner_1().evaluate(p, &s3).unwrap() - b1).abs() < 1e-12);
            prop_assert!((BellFunctional::bell_wigner_2().evaluate(p, &s3).unwrap() - b2).abs() < 1e-12);
            prop_assert!(b1.abs() <= 3.0 && b2.abs() <= 3.0);
        }

        #[test]
        fn chsh_within_tsirelson(n in 1u32..7, s in settings(4)) {
            prop_assert!(chsh_value(np(n), &s).unwrap().abs() <= 2.0 * 2f64.sqrt() + 1e-9);
        }

        #[test]
        fn ch_rotation_invariant(n in 1u32..6, s in settings(4), theta in 0.0..(2.0 * PI)) {
            let rot = Complex64::from_polar(1.0, theta);
            let r: Vec<Amplitude> = s.iter().map(|a| Amplitude(a.0 * rot)).collect();
            prop_assert!((ch_value(np(n), &s).unwrap() - ch_value(np(n), &r).unwrap()).abs() < 1e-12);
        }
    }
}
