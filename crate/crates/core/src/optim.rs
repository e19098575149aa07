//! Thin wrappers over argmin's derivative-free solvers, in `f64`.

use argmin::core::{CostFunction, Executor, State};
use argmin::solver::goldensectionsearch::GoldenSectionSearch;
use argmin::solver::neldermead::NelderMead;

struct Objective<F>(F);

impl<F: Fn(&[f64]) -> f64> CostFunction for Objective<F> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Self::Param) -> Result<f64, argmin::core::Error> {
        let v = (self.0)(p);
        Ok(if v.is_nan() { f64::INFINITY } else { v })
    }
}

struct Scalar<F>(F);

impl<F: Fn(f64) -> f64> CostFunction for Scalar<F> {
    type Param = f64;
    type Output = f64;

    fn cost(&self, p: &f64) -> Result<f64, argmin::core::Error> {
        let v = (self.0)(*p);
        Ok(if v.is_nan() { f64::INFINITY } else { v })
    }
}

/// Nelder–Mead from `start` with an axis-aligned initial simplex of size `step`.
/// Returns the best point and its cost.
pub fn nelder_mead<F>(f: F, start: &[f64], step: &[f64], max_iters: u64, tol: f64) -> (Vec<f64>, f64)
where
    F: Fn(&[f64]) -> f64,
{
    let mut simplex = vec![start.to_vec()];
    for (i, s) in step.iter().enumerate() {
        let mut p = start.to_vec();
        p[i] += s;
        simplex.push(p);
    }
    let fallback = (start.to_vec(), f(start));
    let solver = match NelderMead::new(simplex).with_sd_tolerance(tol) {
        Ok(s) => s,
        Err(_) => return fallback,
    };
    let run = Executor::new(Objective(f), solver)
        .configure(|s| s.max_iters(max_iters))
        .run();
    match run {
        Ok(res) => {
            let state = res.state();
            match state.get_best_param() {
                Some(p) if state.get_best_cost() <= fallback.1 => (p.clone(), state.get_best_cost()),
                _ => fallback,
            }
        }
        Err(_) => fallback,
    }
}

/// Golden-section minimisation of a unimodal function on `[lo, hi]`.
pub fn golden_section<F>(f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let mid = 0.5 * (lo + hi);
    let solver = GoldenSectionSearch::new(lo, hi).and_then(|s| s.with_tolerance(tol));
    let solver = match solver {
        Ok(s) => s,
        Err(_) => return (mid, f(mid)),
    };
    let run = Executor::new(Scalar(&f), solver)
        .configure(|s| s.param(mid).max_iters(500))
        .run();
    match run {
        Ok(res) => {
            let state = res.state();
            let x = state.get_best_param().copied().unwrap_or(mid);
            (x, f(x))
        }
        Err(_) => (mid, f(mid)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock() {
        let f = |p: &[f64]| (1.0 - p[0]).powi(2) + 100.0 * (p[1] - p[0] * p[0]).powi(2);
        let (x, fx) = nelder_mead(f, &[-1.2, 1.0], &[0.5, 0.5], 5000, 1e-14);
        assert!(fx < 1e-10, "{x:?} {fx}");
    }

    #[test]
    fn parabola() {
        let (x, _) = golden_section(|x| (x - 0.3).powi(2), -1.0, 2.0, 1e-8);
        assert!((x - 0.3).abs() < 1e-6);
    }
}
