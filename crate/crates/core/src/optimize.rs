//! Gradient-free local search over the unitary group.
//!
//! A unitary near a base point `U₀` is written `U₀ · exp(iH(θ))` where `H(θ)`
//! is the Hermitian matrix carried by `n²` real parameters. Each restart runs
//! an adaptive Nelder–Mead simplex in `θ` starting from `θ = 0`, then re-centers
//! on the best point and re-runs with a smaller simplex until the value stops
//! moving.

use rayon::prelude::*;

use crate::error::Result;
use crate::matcore::{self, CMatrix};
use crate::scalar::{c, cr, Real};

/// Options for one simplex run.
#[derive(Debug, Clone, Copy)]
pub struct SimplexOptions<T> {
    /// Stop once the spread of vertex values is below this.
    pub ftol: T,
    /// ... and every vertex lies within this distance of the best one.
    pub xtol: T,
    pub max_iters: usize,
    pub initial_step: T,
}

#[derive(Debug, Clone)]
pub struct SimplexResult<T> {
    pub x: Vec<T>,
    pub value: T,
    pub iterations: usize,
    pub converged: bool,
}

/// Minimizes `f` with the Nelder–Mead method using dimension-adaptive
/// coefficients (reflection 1, expansion 1 + 2/d, contraction 3/4 − 1/(2d),
/// shrink 1 − 1/d).
pub fn nelder_mead<T: Real>(mut f: impl FnMut(&[T]) -> T, x0: &[T], opts: &SimplexOptions<T>) -> SimplexResult<T> {
    let d = x0.len();
    if d == 0 {
        return SimplexResult { x: vec![], value: f(&[]), iterations: 0, converged: true };
    }
    let df = T::from_usize(d).unwrap();
    let (one, two, half) = (T::one(), T::lit(2.0), T::lit(0.5));
    let alpha = one;
    let gamma = one + two / df;
    let beta = T::lit(0.75) - half / df;
    let delta = if d > 1 { one - one / df } else { half };

    let mut simplex: Vec<Vec<T>> = Vec::with_capacity(d + 1);
    simplex.push(x0.to_vec());
    for i in 0..d {
        let mut v = x0.to_vec();
        v[i] += opts.initial_step;
        simplex.push(v);
    }
    let mut values: Vec<T> = simplex.iter().map(|v| f(v)).collect();

    let along = |a: &[T], b: &[T], t: T| -> Vec<T> { a.iter().zip(b).map(|(&ai, &bi)| ai + t * (bi - ai)).collect() };

    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iters {
        let mut order: Vec<usize> = (0..=d).collect();
        order.sort_by(|&i, &j| values[i].partial_cmp(&values[j]).unwrap_or(std::cmp::Ordering::Equal));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let spread = values[d] - values[0];
        let size = simplex[1..]
            .iter()
            .flat_map(|v| v.iter().zip(&simplex[0]).map(|(&a, &b)| (a - b).abs()))
            .fold(T::zero(), |acc, x| acc.max(x));
        if spread <= opts.ftol && size <= opts.xtol {
            converged = true;
            break;
        }
        iterations += 1;

        let mut centroid = vec![T::zero(); d];
        for v in &simplex[..d] {
            for (ci, &vi) in centroid.iter_mut().zip(v) {
                *ci += vi / df;
            }
        }
        let worst = simplex[d].clone();
        let reflected = along(&centroid, &worst, -alpha);
        let fr = f(&reflected);
        if fr < values[0] {
            let expanded = along(&centroid, &worst, -gamma);
            let fe = f(&expanded);
            if fe < fr {
                simplex[d] = expanded;
                values[d] = fe;
            } else {
                simplex[d] = reflected;
                values[d] = fr;
            }
            continue;
        }
        if fr < values[d - 1] {
            simplex[d] = reflected;
            values[d] = fr;
            continue;
        }
        let (contracted, fc) = if fr < values[d] {
            let p = along(&centroid, &worst, -alpha * beta);
            let fp = f(&p);
            (p, fp)
        } else {
            let p = along(&centroid, &worst, beta);
            let fp = f(&p);
            (p, fp)
        };
        if fc < fr.min(values[d]) {
            simplex[d] = contracted;
            values[d] = fc;
            continue;
        }
        let best = simplex[0].clone();
        for i in 1..=d {
            simplex[i] = along(&best, &simplex[i], delta);
            values[i] = f(&simplex[i]);
        }
    }
    let (best, value) = simplex
        .iter()
        .zip(&values)
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap_or(std::cmp::Ordering::Equal))
        .map(|(x, &v)| (x.clone(), v))
        .unwrap();
    SimplexResult { x: best, value, iterations, converged }
}

/// Hermitian `n x n` matrix from `n²` real parameters: the diagonal first,
/// then real and imaginary parts of each upper-triangular entry row by row.
pub fn hermitian_from_params<T: Real>(theta: &[T], n: usize) -> CMatrix<T> {
    debug_assert_eq!(theta.len(), n * n);
    let mut h = CMatrix::zeros(n, n);
    for i in 0..n {
        h[(i, i)] = cr(theta[i]);
    }
    let mut idx = n;
    for i in 0..n {
        for j in i + 1..n {
            let z = c(theta[idx], theta[idx + 1]);
            h[(i, j)] = z;
            h[(j, i)] = z.conj();
            idx += 2;
        }
    }
    h
}

/// `U₀ · exp(iH(θ))`.
pub fn unitary_at<T: Real>(base: &CMatrix<T>, theta: &[T]) -> Result<CMatrix<T>> {
    let h = hermitian_from_params(theta, base.nrows());
    Ok(base * matcore::unitary_exp(&h)?)
}

/// Options for a multi-start unitary search.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SearchOptions {
    /// Haar-random starting points, in addition to any supplied seeds.
    pub restarts: usize,
    pub tol: f64,
    /// Simplex iterations per restart.
    pub max_iters: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { restarts: 16, tol: 1e-8, max_iters: 2000 }
    }
}

const POLISH_ROUNDS: usize = 4;
const INITIAL_STEP: f64 = 0.4;

#[derive(Debug, Clone)]
pub struct RestartOutcome<T: Real> {
    pub unitary: CMatrix<T>,
    pub value: T,
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub struct SearchOutcome<T: Real> {
    pub best: RestartOutcome<T>,
    pub restarts_used: usize,
    /// Best two restarts agree within `10 · tol` (or there is a single start).
    pub converged: bool,
}

fn local_search<T: Real>(
    start: &CMatrix<T>,
    objective: &(impl Fn(&CMatrix<T>) -> T + Sync),
    opts: &SearchOptions,
) -> Result<RestartOutcome<T>> {
    let n = start.nrows();
    let mut base = start.clone();
    let mut value = objective(&base);
    let mut step = T::lit(INITIAL_STEP);
    let mut converged = false;
    let tol = T::lit(opts.tol);
    for _ in 0..POLISH_ROUNDS {
        let simplex_opts =
            SimplexOptions { ftol: tol, xtol: tol.sqrt(), max_iters: opts.max_iters, initial_step: step };
        let eval = |theta: &[T]| match unitary_at(&base, theta) {
            Ok(u) => objective(&u),
            Err(_) => T::max_value().unwrap_or_else(T::one),
        };
        let run = nelder_mead(eval, &vec![T::zero(); n * n], &simplex_opts);
        converged = run.converged;
        if run.value >= value {
            break;
        }
        base = unitary_at(&base, &run.x)?;
        let improvement = value - run.value;
        value = run.value;
        if improvement <= tol {
            break;
        }
        step *= T::lit(0.25);
    }
    Ok(RestartOutcome { unitary: base, value, converged })
}

/// Minimizes `objective` over unitaries from every start in `starts`.
///
/// Restarts run concurrently; the winner is the lowest value, ties broken by
/// position in `starts`, so the result does not depend on scheduling.
pub fn minimize_over_unitaries<T: Real>(
    starts: &[CMatrix<T>],
    objective: impl Fn(&CMatrix<T>) -> T + Sync,
    opts: &SearchOptions,
) -> Result<SearchOutcome<T>> {
    let outcomes: Vec<RestartOutcome<T>> =
        starts.par_iter().map(|s| local_search(s, &objective, opts)).collect::<Result<_>>()?;
    let mut order: Vec<usize> = (0..outcomes.len()).collect();
    order.sort_by(|&i, &j| outcomes[i].value.partial_cmp(&outcomes[j].value).unwrap_or(std::cmp::Ordering::Equal).then(i.cmp(&j)));
    let best = outcomes[order[0]].clone();
    let converged = match order.get(1) {
        Some(&second) => outcomes[second].value - best.value <= T::lit(10.0 * opts.tol),
        None => best.converged,
    };
    Ok(SearchOutcome { best, restarts_used: outcomes.len(), converged })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::random::{haar_unitary, stream};

    #[test]
    fn simplex_finds_quadratic_minimum() {
        let f = |x: &[f64]| (x[0] - 1.0).powi(2) + 10.0 * (x[1] + 2.0).powi(2) + 0.5;
        let opts = SimplexOptions { ftol: 1e-14, xtol: 1e-8, max_iters: 5000, initial_step: 0.5 };
        let r = nelder_mead(f, &[0.0, 0.0], &opts);
        assert!(r.converged);
        assert!((r.x[0] - 1.0).abs() < 1e-6 && (r.x[1] + 2.0).abs() < 1e-6);
        assert!((r.value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn simplex_handles_rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let opts = SimplexOptions { ftol: 1e-16, xtol: 1e-9, max_iters: 10_000, initial_step: 0.5 };
        let r = nelder_mead(f, &[-1.2, 1.0], &opts);
        assert!(r.value < 1e-10, "{}", r.value);
    }

    #[test]
    fn parametrized_unitaries_are_unitary() {
        let mut rng = stream(8, 0);
        let base = haar_unitary::<f64, _>(3, &mut rng);
        let theta: Vec<f64> = (0..9).map(|i| 0.3 * (i as f64) - 1.0).collect();
        let u = unitary_at(&base, &theta).unwrap();
        assert!(matcore::max_abs(&(u.adjoint() * &u - matcore::identity::<f64>(3))) < 1e-12);
        let at_zero = unitary_at(&base, &[0.0; 9]).unwrap();
        assert!(matcore::max_abs(&(at_zero - base)) < 1e-15);
    }

    #[test]
    fn search_aligns_a_unitary_with_a_target_projector() {
        // Minimize 1 - |<0|U|0>|^2, whose optimum is 0.
        let mut rng = stream(9, 0);
        let starts: Vec<_> = (0..3).map(|_| haar_unitary::<f64, _>(2, &mut rng)).collect();
        let out = minimize_over_unitaries(&starts, |u| 1.0 - u[(0, 0)].norm_sqr(), &SearchOptions::default()).unwrap();
        assert!(out.best.value < 1e-8);
        assert!(out.converged);
        assert_eq!(out.restarts_used, 3);
    }
}
