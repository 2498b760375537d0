//! Marginal phase-space densities `Q_m(y, v)` and `W_m(y, v)`.
//!
//! With `alpha = x + i y` and `beta = u + i v`, the marginals integrate the
//! two-mode Q or Wigner function over `x` and `u`. Both integrands are a
//! polynomial times `e^{-c (x^2 + u^2)}` (`c = 1` for Q, `c = 2` for the
//! Wigner function), so Gauss–Hermite quadrature with rescaled nodes is exact
//! once the order exceeds the photon number.
//!
//! Q-marginals are divided by `pi^2` and the Wigner function carries its
//! `4/pi^2` factor, so both densities integrate to one over `(y, v)`.

use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use crate::amplitude::Amplitude;
use crate::correlators::{self, NoonParams};
use crate::error::{Error, Result};
use crate::exec::{Executor, Serial};
use crate::quadrature::GaussHermite;

pub const DEFAULT_ORDER: usize = 40;
pub const DEFAULT_RANGE: f64 = 4.0;
pub const MIN_GRID_COUNT: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum MarginalKind {
    #[cfg_attr(feature = "serde", serde(rename = "q-marginal"))]
    Q,
    #[cfg_attr(feature = "serde", serde(rename = "w-marginal"))]
    W,
}

impl MarginalKind {
    pub fn label(self) -> &'static str {
        match self {
            MarginalKind::Q => "q-marginal",
            MarginalKind::W => "w-marginal",
        }
    }

    /// Gaussian decay rate `c` of the integrand in every quadrature.
    fn decay(self) -> f64 {
        match self {
            MarginalKind::Q => 1.0,
            MarginalKind::W => 2.0,
        }
    }

    /// Constant dividing the raw `dx du` integral to give a unit-mass density.
    pub fn normalization(self) -> f64 {
        match self {
            MarginalKind::Q => PI * PI,
            MarginalKind::W => PI * PI / 4.0,
        }
    }

    /// Raw integrand: `Q_ab` or the parity correlation `Pi`.
    fn raw(self, p: NoonParams, alpha: Amplitude, beta: Amplitude) -> f64 {
        match self {
            MarginalKind::Q => correlators::q_joint(p, alpha, beta),
            MarginalKind::W => correlators::parity_corr(p, alpha, beta),
        }
    }
}

impl core::str::FromStr for MarginalKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "q" | "Q" | "q-marginal" => Ok(MarginalKind::Q),
            "w" | "W" | "w-marginal" => Ok(MarginalKind::W),
            other => Err(Error::Config(alloc::format!("unknown marginal kind {other:?}"))),
        }
    }
}

/// Quadrature engine for marginal densities and their moments.
#[derive(Debug, Clone)]
pub struct Marginals {
    rule: GaussHermite,
}

impl Default for Marginals {
    fn default() -> Self {
        Marginals::new(DEFAULT_ORDER).expect("default order is valid")
    }
}

impl Marginals {
    pub fn new(order: usize) -> Result<Self> {
        Ok(Marginals { rule: GaussHermite::new(order)? })
    }

    pub fn order(&self) -> usize {
        self.rule.order()
    }

    /// `int int e^{-c(x^2+u^2)} g(x, u) dx du` given `f = e^{-c(...)} g`.
    fn integrate_pair<F: Fn(f64, f64) -> f64>(&self, c: f64, f: F) -> f64 {
        let k = c.sqrt();
        let (t, w) = (self.rule.nodes(), self.rule.weights());
        let mut acc = 0.0;
        for (ti, wi) in t.iter().zip(w) {
            let gi = wi * (ti * ti).exp();
            for (tj, wj) in t.iter().zip(w) {
                acc += gi * wj * (tj * tj).exp() * f(ti / k, tj / k);
            }
        }
        acc / c
    }

    /// Unnormalized `int int (Q_ab or Pi) dx du`.
    pub fn raw(&self, kind: MarginalKind, p: NoonParams, y: f64, v: f64) -> f64 {
        self.integrate_pair(kind.decay(), |x, u| kind.raw(p, Amplitude::new(x, y), Amplitude::new(u, v)))
    }

    /// Unit-mass marginal density at `(y, v)`.
    pub fn density(&self, kind: MarginalKind, p: NoonParams, y: f64, v: f64) -> f64 {
        self.raw(kind, p, y, v) / kind.normalization()
    }

    /// `int int rho(y, v) g(y, v) dy dv` for the normalized density `rho`.
    pub fn expectation<G: Fn(f64, f64) -> f64>(&self, kind: MarginalKind, p: NoonParams, g: G) -> f64 {
        self.integrate_pair(kind.decay(), |y, v| self.density(kind, p, y, v) * g(y, v))
    }

    /// Total mass of the density over the plane.
    pub fn total_mass(&self, kind: MarginalKind, p: NoonParams) -> f64 {
        self.expectation(kind, p, |_, _| 1.0)
    }

    /// Linear correlation coefficient `cov(y, v) / (sigma_y sigma_v)`.
    pub fn correlation_coefficient(&self, kind: MarginalKind, p: NoonParams) -> Result<f64> {
        let m = self.moments(kind, p);
        let var_y = m.yy - m.y * m.y;
        let var_v = m.vv - m.v * m.v;
        if !(var_y > 0.0 && var_v > 0.0) {
            return Err(Error::Undefined(alloc::format!("degenerate variance ({var_y}, {var_v})")));
        }
        Ok((m.yv - m.y * m.v) / (var_y * var_v).sqrt())
    }

    /// First and second moments of the normalized density.
    pub fn moments(&self, kind: MarginalKind, p: NoonParams) -> Moments {
        let k = kind.decay().sqrt();
        let (t, w) = (self.rule.nodes(), self.rule.weights());
        let mut m = Moments::default();
        for (ti, wi) in t.iter().zip(w) {
            for (tj, wj) in t.iter().zip(w) {
                let (y, v) = (ti / k, tj / k);
                let rho = wi * wj * (ti * ti + tj * tj).exp() * self.density(kind, p, y, v);
                m.mass += rho;
                m.y += rho * y;
                m.v += rho * v;
                m.yy += rho * y * y;
                m.vv += rho * v * v;
                m.yv += rho * y * v;
            }
        }
        let c = kind.decay();
        Moments { mass: m.mass / c, y: m.y / c, v: m.v / c, yy: m.yy / c, vv: m.vv / c, yv: m.yv / c }
    }

    pub fn density_grid(&self, kind: MarginalKind, p: NoonParams, range: f64, count: usize) -> Result<DensityGrid> {
        self.density_grid_with(&Serial, kind, p, range, count)
    }

    /// Grid of densities over `[-range, range]^2`, rows evaluated through `exec`.
    pub fn density_grid_with<E: Executor>(
        &self,
        exec: &E,
        kind: MarginalKind,
        p: NoonParams,
        range: f64,
        count: usize,
    ) -> Result<DensityGrid> {
        if !(range > 0.0 && range.is_finite()) {
            return Err(Error::Grid(alloc::format!("range must be positive, got {range}")));
        }
        if count < MIN_GRID_COUNT {
            return Err(Error::Grid(alloc::format!("count must be at least {MIN_GRID_COUNT}, got {count}")));
        }
        let axis = Axis { min: -range, max: range, count };
        let rows: Vec<Vec<f64>> = exec.map(count, |iy| {
            let y = axis.point(iy);
            (0..count).map(|iv| self.raw(kind, p, y, axis.point(iv))).collect()
        });
        let normalization = kind.normalization();
        let values = rows.into_iter().flatten().map(|raw| raw / normalization).collect();
        Ok(DensityGrid { kind, n: p.n(), y_axis: axis, v_axis: axis, values, normalization })
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    pub mass: f64,
    pub y: f64,
    pub v: f64,
    pub yy: f64,
    pub vv: f64,
    pub yv: f64,
}

/// Uniform axis of `count` points from `min` to `max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    pub fn step(&self) -> f64 {
        (self.max - self.min) / (self.count - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.count {
            self.max
        } else {
            self.min + i as f64 * self.step()
        }
    }

    fn trapezoid_weight(&self, i: usize) -> f64 {
        if i == 0 || i + 1 == self.count {
            0.5 * self.step()
        } else {
            self.step()
        }
    }
}

/// Sampled marginal density, row-major with `y` along rows.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DensityGrid {
    pub kind: MarginalKind,
    pub n: u32,
    pub y_axis: Axis,
    pub v_axis: Axis,
    /// Normalized densities; `values[iy * v_count + iv]`.
    pub values: Vec<f64>,
    /// Constant the raw `dx du` integrals were divided by.
    pub normalization: f64,
}

impl DensityGrid {
    pub fn get(&self, iy: usize, iv: usize) -> f64 {
        self.values[iy * self.v_axis.count + iv]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks(self.v_axis.count)
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Trapezoid-rule mass of the sampled window.
    pub fn trapezoid_integral(&self) -> f64 {
        let mut acc = 0.0;
        for iy in 0..self.y_axis.count {
            let wy = self.y_axis.trapezoid_weight(iy);
            for iv in 0..self.v_axis.count {
                acc += wy * self.v_axis.trapezoid_weight(iv) * self.get(iy, iv);
            }
        }
        acc
    }

    /// `(rho_y, rho_v)` one-dimensional marginals of the sampled density.
    pub fn axis_marginals(&self) -> (Vec<f64>, Vec<f64>) {
        let mut ry = alloc::vec![0.0; self.y_axis.count];
        let mut rv = alloc::vec![0.0; self.v_axis.count];
        for (iy, row) in self.rows().enumerate() {
            let wy = self.y_axis.trapezoid_weight(iy);
            for (iv, (x, r)) in row.iter().zip(rv.iter_mut()).enumerate() {
                ry[iy] += self.v_axis.trapezoid_weight(iv) * x;
                *r += wy * x;
            }
        }
        (ry, rv)
    }

    /// L1 distance between the joint density and the product of its
    /// one-dimensional marginals; zero iff `y` and `v` are independent on the grid.
    pub fn dependence_l1(&self) -> f64 {
        let (ry, rv) = self.axis_marginals();
        let mut acc = 0.0;
        for (iy, (row, py)) in self.rows().zip(&ry).enumerate() {
            let wy = self.y_axis.trapezoid_weight(iy);
            for (iv, (x, pv)) in row.iter().zip(&rv).enumerate() {
                acc += wy * self.v_axis.trapezoid_weight(iv) * (x - py * pv).abs();
            }
        }
        acc
    }
}

/// Normalized `Q_m(y, v)` at the default quadrature order.
pub fn marginal_q(p: NoonParams, y: f64, v: f64) -> f64 {
    Marginals::default().density(MarginalKind::Q, p, y, v)
}

/// Normalized `W_m(y, v)` at the default quadrature order.
pub fn marginal_w(p: NoonParams, y: f64, v: f64) -> f64 {
    Marginals::default().density(MarginalKind::W, p, y, v)
}

pub fn correlation_coefficient(kind: MarginalKind, p: NoonParams) -> Result<f64> {
    Marginals::default().correlation_coefficient(kind, p)
}

pub fn density_grid(kind: MarginalKind, p: NoonParams, range: f64, count: usize) -> Result<DensityGrid> {
    Marginals::default().density_grid(kind, p, range, count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn np(n: u32) -> NoonParams {
        NoonParams::new(n).unwrap()
    }

    #[test]
    fn n1_q_marginal_closed_form() {
        // |alpha - beta|^2 integrated over x, u gives pi (1 + (y - v)^2)
        let m = Marginals::default();
        for &(y, v) in &[(0.0f64, 0.0f64), (0.5, -1.0), (1.3, 0.2), (-2.0, 2.5)] {
            let expect = (1.0 + (y - v) * (y - v)) * (-(y * y) - v * v).exp() / (2.0 * PI);
            assert_abs_diff_eq!(m.density(MarginalKind::Q, np(1), y, v), expect, epsilon = 1e-14);
        }
    }

    #[test]
    fn n1_q_correlation_is_minus_one_third() {
        let r = correlation_coefficient(MarginalKind::Q, np(1)).unwrap();
        assert_abs_diff_eq!(r, -1.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn normalization_and_symmetry() {
        let m = Marginals::default();
        for n in 1..=5 {
            for kind in [MarginalKind::Q, MarginalKind::W] {
                assert_abs_diff_eq!(m.total_mass(kind, np(n)), 1.0, epsilon = 1e-10);
            }
            for &(y, v) in &[(0.3, -0.8), (1.1, 0.4)] {
                let a = m.density(MarginalKind::Q, np(n), y, v);
                assert_abs_diff_eq!(a, m.density(MarginalKind::Q, np(n), v, y), epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn monte_carlo_oracle_at_origin() {
        use rand_distr_free::normal_pair;
        // x, u ~ N(0, 1/2) have density e^{-x^2}/sqrt(pi)
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let samples = 200_000;
        let (mut sum, mut sum_sq) = (0.0, 0.0);
        for _ in 0..samples {
            let (x, u) = normal_pair(&mut rng);
            let (x, u) = (x * 0.5f64.sqrt(), u * 0.5f64.sqrt());
            let q = correlators::q_joint(np(1), Amplitude::new(x, 0.0), Amplitude::new(u, 0.0));
            let g = q * (x * x + u * u).exp() * PI / (PI * PI);
            sum += g;
            sum_sq += g * g;
        }
        let mean = sum / samples as f64;
        let se = ((sum_sq / samples as f64 - mean * mean) / samples as f64).sqrt();
        let quad = marginal_q(np(1), 0.0, 0.0);
        assert!((mean - quad).abs() < 3.0 * se, "mc {mean} +- {se}, quad {quad}");
    }

    #[test]
    fn quadrature_converged_at_default_order() {
        let lo = Marginals::new(DEFAULT_ORDER).unwrap();
        let hi = Marginals::new(2 * DEFAULT_ORDER).unwrap();
        for n in 1..=5 {
            for kind in [MarginalKind::Q, MarginalKind::W] {
                for &(y, v) in &[(0.0, 0.0), (0.7, -1.2), (2.0, 1.5)] {
                    let d = (lo.density(kind, np(n), y, v) - hi.density(kind, np(n), y, v)).abs();
                    assert!(d < 1e-8, "{kind:?} N={n} ({y},{v}) diff {d}");
                }
            }
        }
    }

    #[test]
    fn grid_preconditions() {
        assert!(matches!(density_grid(MarginalKind::W, np(1), 3.0, 8), Err(Error::Grid(_))));
        assert!(matches!(density_grid(MarginalKind::W, np(1), -1.0, 32), Err(Error::Grid(_))));
    }

    #[test]
    fn grid_shape_and_mass() {
        let g = density_grid(MarginalKind::Q, np(1), 3.0, 64).unwrap();
        assert_eq!(g.values.len(), 64 * 64);
        assert!(g.min_value() >= 0.0);
        assert_eq!(g.normalization, PI * PI);
        for n in 1..=5 {
            for kind in [MarginalKind::Q, MarginalKind::W] {
                let g = density_grid(kind, np(n), DEFAULT_RANGE, 81).unwrap();
                let mass = g.trapezoid_integral();
                assert!((0.98..=1.0 + 1e-9).contains(&mass), "{kind:?} N={n} mass {mass}");
            }
        }
    }

    mod rand_distr_free {
        use rand::Rng;
        /// Box–Muller pair of standard normals.
        pub fn normal_pair<R: Rng>(rng: &mut R) -> (f64, f64) {
            let u1: f64 = 1.0 - rng.gen::<f64>();
            let u2: f64 = rng.gen();
            let r = (-2.0 * u1.ln()).sqrt();
            let t = 2.0 * core::f64::consts::PI * u2;
            (r * t.cos(), r * t.sin())
        }
    }
}
