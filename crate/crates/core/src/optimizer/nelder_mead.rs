//! Nelder–Mead simplex minimization with dimension-adaptive coefficients.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOptions {
    /// Initial edge length along each coordinate.
    pub step: f64,
    /// Converged once `f_worst - f_best` is at most this and the
    /// `x_tolerance` condition also holds.
    pub f_tolerance: f64,
    /// Largest coordinate distance of any vertex from the best one.
    pub x_tolerance: f64,
    pub max_iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
}

/// Minimizes `f` from `x0`.
pub fn minimize<F: Fn(&[f64]) -> f64>(f: F, x0: &[f64], opts: &SimplexOptions) -> SimplexOutcome {
    let n = x0.len();
    let nf = n as f64;
    // Gao & Han adaptive parameters
    let (reflect, expand, contract, shrink) =
        if n >= 2 { (1.0, 1.0 + 2.0 / nf, 0.75 - 1.0 / (2.0 * nf), 1.0 - 1.0 / nf) } else { (1.0, 2.0, 0.5, 0.5) };

    let mut evaluations = 0usize;
    let mut eval = |x: &[f64]| {
        evaluations += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += opts.step;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|x| eval(x)).collect();
    let mut order: Vec<usize> = (0..=n).collect();
    let mut centroid = vec![0.0; n];
    let mut trial = vec![0.0; n];
    let mut trial2 = vec![0.0; n];
    let mut iterations = 0;
    let mut converged = false;

    loop {
        // stable sort keeps earlier vertices first among equal values
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let best = order[0];
        let worst = order[n];
        let spread = values[worst] - values[best];
        let size = simplex
            .iter()
            .map(|x| x.iter().zip(&simplex[best]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if spread <= opts.f_tolerance && size <= opts.x_tolerance {
            converged = true;
            break;
        }
        if iterations >= opts.max_iterations {
            break;
        }
        iterations += 1;

        centroid.iter_mut().for_each(|c| *c = 0.0);
        for &idx in &order[..n] {
            for (c, x) in centroid.iter_mut().zip(&simplex[idx]) {
                *c += x / nf;
            }
        }
        let second_worst = values[order[n - 1]];
        let along = |t: &mut [f64], coef: f64, from: &[f64], c: &[f64]| {
            for ((ti, fi), ci) in t.iter_mut().zip(from).zip(c) {
                *ti = ci + coef * (ci - fi);
            }
        };

        along(&mut trial, reflect, &simplex[worst], &centroid);
        let fr = eval(&trial);
        if fr < values[best] {
            along(&mut trial2, reflect * expand, &simplex[worst], &centroid);
            let fe = eval(&trial2);
            if fe < fr {
                simplex[worst].copy_from_slice(&trial2);
                values[worst] = fe;
            } else {
                simplex[worst].copy_from_slice(&trial);
                values[worst] = fr;
            }
            continue;
        }
        if fr < second_worst {
            simplex[worst].copy_from_slice(&trial);
            values[worst] = fr;
            continue;
        }
        let (fc, accepted) = if fr < values[worst] {
            // outside contraction
            along(&mut trial2, reflect * contract, &simplex[worst], &centroid);
            let fc = eval(&trial2);
            (fc, fc <= fr)
        } else {
            along(&mut trial2, -contract, &simplex[worst], &centroid);
            let fc = eval(&trial2);
            (fc, fc < values[worst])
        };
        if accepted {
            simplex[worst].copy_from_slice(&trial2);
            values[worst] = fc;
            continue;
        }
        let anchor = simplex[best].clone();
        for &idx in &order[1..] {
            for (x, a) in simplex[idx].iter_mut().zip(&anchor) {
                *x = a + shrink * (*x - a);
            }
            values[idx] = eval(&simplex[idx]);
        }
    }

    let best = order[0];
    SimplexOutcome { x: simplex.swap_remove(best), value: values[best], iterations, evaluations, converged }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> SimplexOptions {
        SimplexOptions { step: 0.5, f_tolerance: 1e-14, x_tolerance: 1e-12, max_iterations: 20_000 }
    }

    #[test]
    fn quadratic_bowl() {
        let f = |x: &[f64]| (x[0] - 1.0).powi(2) + 3.0 * (x[1] + 2.0).powi(2) + (x[2] - 0.5).powi(2);
        let out = minimize(f, &[0.0, 0.0, 0.0], &opts());
        assert!(out.converged);
        assert!((out.x[0] - 1.0).abs() < 1e-5 && (out.x[1] + 2.0).abs() < 1e-5);
        assert!(out.value < 1e-10);
    }

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2);
        let out = minimize(f, &[-1.2, 1.0], &opts());
        assert!(out.converged);
        assert!((out.x[0] - 1.0).abs() < 1e-4 && (out.x[1] - 1.0).abs() < 1e-4);
    }

    #[test]
    fn iteration_cap_reports_non_convergence() {
        let f = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>();
        let mut o = opts();
        o.max_iterations = 3;
        let out = minimize(f, &[5.0; 6], &o);
        assert!(!out.converged);
        assert_eq!(out.iterations, 3);
    }

    #[test]
    fn deterministic() {
        let f = |x: &[f64]| (x[0] * 3.0).sin() + x[1] * x[1] + 0.1 * x[0] * x[0];
        let a = minimize(f, &[0.4, -0.7], &opts());
        let b = minimize(f, &[0.4, -0.7], &opts());
        assert_eq!(a, b);
    }
}
