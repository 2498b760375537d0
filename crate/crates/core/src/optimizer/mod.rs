//! Violation-maximizing search over measurement settings.
//!
//! The search has two stages. First, a deterministic grid over the real
//! coordinates of the settings is scanned exhaustively. Second, Nelder–Mead
//! polishes run from the best distinct grid cells and from seeded random
//! points. Settings are confined to the disk `|setting| <= search_radius` by
//! radial projection. The joint phase of all settings is irrelevant to every
//! functional, so by default the first setting is kept real.
//!
//! Grid cells and starts are addressed by index and merged under a total
//! order (objective, then settings lexicographically), so the result is a
//! pure function of the configuration whatever [`Executor`] runs the work.

mod nelder_mead;

pub use nelder_mead::{minimize, SimplexOptions, SimplexOutcome};

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
#[allow(unused_imports)]
use num_traits::Float;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::amplitude::Amplitude;
use crate::correlators::NoonParams;
use crate::error::{Error, Result};
use crate::exec::{Executor, Serial};
use crate::inequalities::{BellFunctional, SettingsVector, ViolationDirection};

/// Number of index ranges the grid scan is split into.
const GRID_CHUNKS: usize = 64;
/// Additional simplex restarts from the incumbent of each start.
const MAX_RESTARTS: usize = 4;
/// Relative distance from the search radius counted as a boundary hit.
const BOUNDARY_FRACTION: f64 = 1e-6;
/// Simplex size, in amplitude units, below which a polish may stop.
const POLISH_X_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct OptimizerConfig {
    pub num_starts: usize,
    pub search_radius: f64,
    pub coarse_grid_points_per_axis: usize,
    pub simplex_tolerance: f64,
    pub max_iterations: usize,
    pub rng_seed: u64,
    /// Keep the first setting real (joint-phase symmetry reduction).
    pub fix_phase: bool,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            num_starts: 64,
            search_radius: 5.0,
            coarse_grid_points_per_axis: 7,
            simplex_tolerance: 1e-9,
            max_iterations: 20_000,
            rng_seed: 0,
            fix_phase: true,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(Error::Config(msg.into()));
        if self.num_starts == 0 {
            return fail("num_starts must be at least 1");
        }
        if !(self.search_radius > 0.0 && self.search_radius.is_finite()) {
            return fail("search_radius must be positive");
        }
        if self.simplex_tolerance.is_nan() || self.simplex_tolerance <= 0.0 {
            return fail("simplex_tolerance must be positive");
        }
        if self.coarse_grid_points_per_axis < 2 {
            return fail("coarse grid needs at least 2 points per axis");
        }
        Ok(())
    }

    fn grid_starts(&self) -> usize {
        self.num_starts.div_ceil(2)
    }

    fn random_starts(&self) -> usize {
        self.num_starts / 2
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OptimizationResult {
    pub functional_name: alloc::string::String,
    pub n: u32,
    /// Side of the classical band this result is reported against.
    pub direction: ViolationDirection,
    pub best_value: f64,
    pub bound: f64,
    /// Signed distance past `bound` in the violation direction; `<= 0` means no violation.
    pub violation_margin: f64,
    pub best_settings: SettingsVector,
    pub starts_converged: usize,
    pub num_starts: usize,
    pub seed: u64,
    pub grid_best_value: f64,
    /// Some setting sits on the search-radius cap.
    pub boundary_hit: bool,
    /// Value with every capped setting sent to infinite amplitude.
    pub asymptotic_limit: Option<f64>,
}

impl OptimizationResult {
    pub fn violates(&self) -> bool {
        self.violation_margin > 0.0
    }
}

fn margin(direction: ViolationDirection, value: f64, bound: f64) -> f64 {
    match direction {
        ViolationDirection::BelowLower => bound - value,
        _ => value - bound,
    }
}

/// A single-direction search problem in real coordinates.
struct Problem<'a> {
    f: &'a BellFunctional,
    p: NoonParams,
    /// +1 minimizes the functional, -1 maximizes it.
    sign: f64,
    radius: f64,
    fix_phase: bool,
}

#[derive(Debug, Clone)]
struct Candidate {
    objective: f64,
    settings: SettingsVector,
}

impl Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.objective.total_cmp(&other.objective).then_with(|| self.settings.total_cmp(&other.settings))
    }
}

/// Sorted, duplicate-free list of the `k` best candidates.
#[derive(Debug, Clone)]
struct TopK {
    k: usize,
    items: Vec<Candidate>,
}

impl TopK {
    fn new(k: usize) -> Self {
        TopK { k, items: Vec::with_capacity(k + 1) }
    }

    fn would_accept(&self, objective: f64) -> bool {
        self.items.len() < self.k || self.items.last().is_some_and(|w| objective <= w.objective)
    }

    fn push(&mut self, c: Candidate) {
        match self.items.binary_search_by(|probe| probe.cmp(&c)) {
            Ok(_) => {}
            Err(pos) => {
                if pos < self.k {
                    self.items.insert(pos, c);
                    self.items.truncate(self.k);
                }
            }
        }
    }

    fn merge(mut self, other: TopK) -> TopK {
        for c in other.items {
            self.push(c);
        }
        self
    }
}

impl<'a> Problem<'a> {
    fn new(f: &'a BellFunctional, p: NoonParams, sign: f64, cfg: &OptimizerConfig) -> Self {
        Problem { f, p, sign, radius: cfg.search_radius, fix_phase: cfg.fix_phase }
    }

    fn num_settings(&self) -> usize {
        self.f.num_settings()
    }

    fn dims(&self) -> usize {
        2 * self.num_settings() - usize::from(self.fix_phase)
    }

    fn decode_into(&self, x: &[f64], out: &mut [Amplitude]) {
        let mut j = 0;
        for (i, slot) in out.iter_mut().enumerate() {
            let a = if i == 0 && self.fix_phase {
                j += 1;
                Amplitude::new(x[0], 0.0)
            } else {
                j += 2;
                Amplitude::new(x[j - 2], x[j - 1])
            };
            let norm = a.norm();
            *slot = if norm > self.radius { Amplitude(a.0 * (self.radius / norm)) } else { a };
        }
    }

    fn decode(&self, x: &[f64]) -> SettingsVector {
        let mut out = vec![Amplitude::ZERO; self.num_settings()];
        self.decode_into(x, &mut out);
        SettingsVector(out)
    }

    fn encode(&self, s: &[Amplitude]) -> Vec<f64> {
        let mut x = Vec::with_capacity(self.dims());
        for (i, a) in s.iter().enumerate() {
            x.push(a.re());
            if !(i == 0 && self.fix_phase) {
                x.push(a.im());
            }
        }
        x
    }

    fn objective(&self, settings: &[Amplitude]) -> f64 {
        self.sign * self.f.evaluate_unchecked(self.p, settings, None)
    }

    fn grid_value(&self, points: usize, i: usize) -> f64 {
        let last = (points - 1) as f64;
        self.radius * (2.0 * i as f64 - last) / last
    }

    fn grid_size(&self, points: usize) -> usize {
        points.pow(self.dims() as u32)
    }

    /// Scans grid indices `range` and keeps the `k` best distinct cells.
    fn scan_grid(&self, points: usize, range: core::ops::Range<usize>, k: usize) -> TopK {
        let dims = self.dims();
        let mut top = TopK::new(k);
        let mut x = vec![0.0; dims];
        let mut buf = vec![Amplitude::ZERO; self.num_settings()];
        for index in range {
            let mut rem = index;
            for xi in x.iter_mut() {
                *xi = self.grid_value(points, rem % points);
                rem /= points;
            }
            self.decode_into(&x, &mut buf);
            let objective = self.objective(&buf);
            if top.would_accept(objective) {
                top.push(Candidate { objective, settings: SettingsVector(buf.clone()) });
            }
        }
        top
    }

    fn scan_grid_with<E: Executor>(&self, exec: &E, points: usize, k: usize) -> TopK {
        let total = self.grid_size(points);
        let chunk = total.div_ceil(GRID_CHUNKS);
        exec.map(GRID_CHUNKS, |c| {
            let lo = (c * chunk).min(total);
            let hi = ((c + 1) * chunk).min(total);
            self.scan_grid(points, lo..hi, k)
        })
        .into_iter()
        .fold(TopK::new(k), TopK::merge)
    }

    fn random_start(&self, seed: u64, index: usize) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index as u64 + 1);
        let mut s = Vec::with_capacity(self.num_settings());
        for i in 0..self.num_settings() {
            let u = rng.gen::<f64>();
            let r = self.radius * u * u;
            if i == 0 && self.fix_phase {
                let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                s.push(Amplitude::new(sign * r, 0.0));
            } else {
                let theta = rng.gen_range(0.0..core::f64::consts::TAU);
                s.push(Amplitude::from_polar(r, theta));
            }
        }
        self.encode(&s)
    }

    /// Simplex polish with restarts from the incumbent.
    fn polish(&self, x0: &[f64], cfg: &OptimizerConfig) -> (Candidate, bool) {
        let f = |x: &[f64]| {
            let s = self.decode(x);
            self.objective(&s)
        };
        let base_step = 2.0 * self.radius / (cfg.coarse_grid_points_per_axis - 1) as f64 / 2.0;
        let mut budget = cfg.max_iterations;
        let mut opts = SimplexOptions {
            step: base_step,
            f_tolerance: cfg.simplex_tolerance,
            x_tolerance: POLISH_X_TOLERANCE,
            max_iterations: budget,
        };
        let mut out = minimize(f, x0, &opts);
        let mut converged = out.converged;
        budget = budget.saturating_sub(out.iterations);
        for restart in 1..=MAX_RESTARTS {
            if budget == 0 {
                break;
            }
            opts.step = base_step * 0.25f64.powi(restart as i32);
            opts.max_iterations = budget;
            let again = minimize(f, &out.x, &opts);
            budget = budget.saturating_sub(again.iterations);
            let improved = out.value - again.value;
            converged = again.converged;
            if again.value < out.value {
                out = again;
            }
            if improved <= cfg.simplex_tolerance {
                break;
            }
        }
        let settings = self.decode(&out.x);
        let objective = self.objective(&settings);
        (Candidate { objective, settings }, converged)
    }

    fn solve<E: Executor>(&self, exec: &E, cfg: &OptimizerConfig) -> (Candidate, usize, f64) {
        let grid = self.scan_grid_with(exec, cfg.coarse_grid_points_per_axis, cfg.grid_starts().max(1));
        let grid_best = grid.items[0].clone();
        let mut starts: Vec<Vec<f64>> =
            grid.items.iter().take(cfg.grid_starts()).map(|c| self.encode(&c.settings)).collect();
        starts.extend((0..cfg.random_starts()).map(|i| self.random_start(cfg.rng_seed, i)));
        let outcomes = exec.map(starts.len(), |i| self.polish(&starts[i], cfg));
        let converged = outcomes.iter().filter(|(_, ok)| *ok).count();
        let best = outcomes.into_iter().map(|(c, _)| c).fold(grid_best.clone(), |acc, c| {
            if c.cmp(&acc) == Ordering::Less {
                c
            } else {
                acc
            }
        });
        (best, converged, self.sign * grid_best.objective)
    }
}

fn sides(f: &BellFunctional) -> Vec<(ViolationDirection, f64, f64)> {
    let lower = f.lower_bound.map(|b| (ViolationDirection::BelowLower, 1.0, b));
    let upper = f.upper_bound.map(|b| (ViolationDirection::AboveUpper, -1.0, b));
    match f.violation_direction {
        ViolationDirection::BelowLower => lower.into_iter().collect(),
        ViolationDirection::AboveUpper => upper.into_iter().collect(),
        ViolationDirection::Both => lower.into_iter().chain(upper).collect(),
    }
}

/// Optimizes `f` toward its violation direction(s) with a serial executor.
pub fn optimize(f: &BellFunctional, p: NoonParams, cfg: &OptimizerConfig) -> Result<OptimizationResult> {
    optimize_with(&Serial, f, p, cfg)
}

/// Optimizes `f`, distributing grid chunks and starts over `exec`. Two-sided
/// functionals are searched in both directions and the side with the larger
/// margin is reported (the lower side on ties).
pub fn optimize_with<E: Executor>(
    exec: &E,
    f: &BellFunctional,
    p: NoonParams,
    cfg: &OptimizerConfig,
) -> Result<OptimizationResult> {
    cfg.validate()?;
    f.validate()?;
    let mut best: Option<OptimizationResult> = None;
    for (direction, sign, bound) in sides(f) {
        let problem = Problem::new(f, p, sign, cfg);
        let (cand, starts_converged, grid_best_value) = problem.solve(exec, cfg);
        let best_value = f.evaluate_unchecked(p, &cand.settings, None);
        let cap = cfg.search_radius * (1.0 - BOUNDARY_FRACTION);
        let at_cap: Vec<bool> = cand.settings.iter().map(|a| a.norm() >= cap).collect();
        let boundary_hit = at_cap.iter().any(|b| *b);
        let asymptotic_limit = boundary_hit.then(|| f.evaluate_unchecked(p, &cand.settings, Some(&at_cap)));
        let result = OptimizationResult {
            functional_name: f.name.clone(),
            n: p.n(),
            direction,
            best_value,
            bound,
            violation_margin: margin(direction, best_value, bound),
            best_settings: cand.settings,
            starts_converged,
            num_starts: cfg.num_starts,
            seed: cfg.rng_seed,
            grid_best_value,
            boundary_hit,
            asymptotic_limit,
        };
        best = match best {
            Some(prev) if prev.violation_margin >= result.violation_margin => Some(prev),
            _ => Some(result),
        };
    }
    best.ok_or_else(|| Error::Config(alloc::format!("{} has no bound to optimize against", f.name)))
}

/// One optimization per photon number in `n_min..=n_max`, each seeded with
/// `cfg.rng_seed ^ N`.
pub fn sweep_n(f: &BellFunctional, n_min: u32, n_max: u32, cfg: &OptimizerConfig) -> Result<Vec<OptimizationResult>> {
    sweep_n_with(&Serial, f, n_min, n_max, cfg)
}

pub fn sweep_n_with<E: Executor>(
    exec: &E,
    f: &BellFunctional,
    n_min: u32,
    n_max: u32,
    cfg: &OptimizerConfig,
) -> Result<Vec<OptimizationResult>> {
    if n_min == 0 || n_min > n_max {
        return Err(Error::Config(alloc::format!("invalid photon-number range {n_min}..={n_max}")));
    }
    (n_min..=n_max)
        .map(|n| {
            let cfg = OptimizerConfig { rng_seed: cfg.rng_seed ^ u64::from(n), ..cfg.clone() };
            optimize_with(exec, f, NoonParams::new(n)?, &cfg)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertifyOptions {
    pub grid_points: usize,
    pub radius: f64,
    /// Largest amount a grid point may beat the optimizer by and still pass.
    pub slack: f64,
    pub fix_phase: bool,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions { grid_points: 9, radius: 5.0, slack: 1e-3, fix_phase: true }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CertificationReport {
    pub functional: alloc::string::String,
    pub n: u32,
    pub direction: ViolationDirection,
    pub grid_points: usize,
    pub radius: f64,
    pub optimizer_value: f64,
    pub grid_best_value: f64,
    pub grid_best_settings: SettingsVector,
    /// How far the optimizer is ahead of the best grid point in the
    /// optimization direction; negative means the grid found something better.
    pub gap: f64,
    pub slack: f64,
    pub passed: bool,
}

/// Exhaustive grid check of an optimization result.
pub fn certify_with_grid(
    f: &BellFunctional,
    p: NoonParams,
    result: &OptimizationResult,
    opts: &CertifyOptions,
) -> Result<CertificationReport> {
    certify_with_grid_with(&Serial, f, p, result, opts)
}

pub fn certify_with_grid_with<E: Executor>(
    exec: &E,
    f: &BellFunctional,
    p: NoonParams,
    result: &OptimizationResult,
    opts: &CertifyOptions,
) -> Result<CertificationReport> {
    if opts.grid_points < 3 {
        return Err(Error::Grid(alloc::format!("certification needs >= 3 points per axis, got {}", opts.grid_points)));
    }
    let sign = match result.direction {
        ViolationDirection::AboveUpper => -1.0,
        _ => 1.0,
    };
    let cfg = OptimizerConfig { search_radius: opts.radius, fix_phase: opts.fix_phase, ..OptimizerConfig::default() };
    cfg.validate()?;
    let problem = Problem::new(f, p, sign, &cfg);
    let top = problem.scan_grid_with(exec, opts.grid_points, 1);
    let best = top.items.into_iter().next().expect("grid is non-empty");
    let grid_best_value = sign * best.objective;
    let gap = sign * (grid_best_value - result.best_value);
    Ok(CertificationReport {
        functional: f.name.clone(),
        n: p.n(),
        direction: result.direction,
        grid_points: opts.grid_points,
        radius: opts.radius,
        optimizer_value: result.best_value,
        grid_best_value,
        grid_best_settings: best.settings,
        gap,
        slack: opts.slack,
        passed: gap >= -opts.slack,
    })
}
