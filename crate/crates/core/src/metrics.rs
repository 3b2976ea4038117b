//! Skew information, variance, total uncertainty and local quantum uncertainty.

use rand::Rng;

use crate::error::{dim_mismatch, Result};
use crate::matcore::{self, embed_local, kron, trace_product, CMatrix, Subsystem};
use crate::optimize::{minimize_over_unitaries, SearchOptions};
use crate::quantum::{haar_unitary, BipartiteState, DensityMatrix, NondegenerateObservable, Observable, ObservableBasis, Spectrum};
use crate::scalar::Real;

/// Values in `[-1e-10, 0)` are floating-point noise and reported as zero.
pub const CLAMP_WINDOW: f64 = 1e-10;

pub(crate) fn clamp_noise<T: Real>(v: T) -> T {
    if v < T::zero() && v >= -T::tol(CLAMP_WINDOW) {
        T::zero()
    } else {
        v
    }
}

fn check_dims<T: Real>(rho: &DensityMatrix<T>, x: &CMatrix<T>) -> Result<()> {
    if x.shape() != (rho.dim(), rho.dim()) {
        return Err(dim_mismatch(format!("observable {:?} on a {}-dimensional state", x.shape(), rho.dim())));
    }
    Ok(())
}

/// `Tr(ρX²) − Tr(√ρ X √ρ X)` given `ρ` and `√ρ` explicitly.
pub(crate) fn skew_raw<T: Real>(rho: &CMatrix<T>, sqrt_rho: &CMatrix<T>, x: &CMatrix<T>) -> T {
    let x2 = x * x;
    let sx = sqrt_rho * x;
    clamp_noise(trace_product(rho, &x2).re - trace_product(&sx, &sx).re)
}

/// Wigner–Yanase skew information `I(ρ, X) = −½ Tr[√ρ, X]²`.
pub fn skew_information<T: Real>(rho: &DensityMatrix<T>, x: &Observable<T>) -> Result<T> {
    check_dims(rho, x.matrix())?;
    Ok(skew_raw(rho.matrix(), rho.sqrt(), x.matrix()))
}

/// Variance `Tr(ρX²) − (Tr ρX)²`.
pub fn variance<T: Real>(rho: &DensityMatrix<T>, x: &Observable<T>) -> Result<T> {
    check_dims(rho, x.matrix())?;
    let m = x.matrix();
    let mean = trace_product(rho.matrix(), m).re;
    Ok(clamp_noise(trace_product(rho.matrix(), &(m * m)).re - mean * mean))
}

/// `Q(ρ) = Σ_i I(ρ, X^i)` over an orthonormal observable basis.
pub fn q_total<T: Real>(rho: &DensityMatrix<T>, basis: &ObservableBasis<T>) -> Result<T> {
    if basis.dim() != rho.dim() {
        return Err(dim_mismatch(format!("basis on dimension {} for state of dimension {}", basis.dim(), rho.dim())));
    }
    basis.elements().iter().try_fold(T::zero(), |acc, x| Ok(acc + skew_information(rho, x)?))
}

/// `Q_S(ρ_AB) = Σ_i I(ρ_AB, X_S^i ⊗ I)` with the basis living on side `side`.
pub fn q_local<T: Real>(state: &BipartiteState<T>, side: Subsystem, basis: &ObservableBasis<T>) -> Result<T> {
    if basis.dim() != state.dim_of(side) {
        return Err(dim_mismatch(format!(
            "basis on dimension {} for side {side:?} of dimension {}",
            basis.dim(),
            state.dim_of(side)
        )));
    }
    let rho = state.state();
    basis.elements().iter().try_fold(T::zero(), |acc, x| {
        let embedded = embed_local(x.matrix(), side, state.dims())?;
        Ok(acc + skew_raw(rho.matrix(), rho.sqrt(), &embedded))
    })
}

/// `I(ρ_AB, K ⊗ I)` (or `I ⊗ K`) for a local observable.
pub fn local_skew<T: Real>(state: &BipartiteState<T>, side: Subsystem, k: &CMatrix<T>) -> Result<T> {
    let embedded = embed_local(k, side, state.dims())?;
    let rho = state.state();
    Ok(skew_raw(rho.matrix(), rho.sqrt(), &embedded))
}

/// Options for [`lqu`].
#[derive(Debug, Clone)]
pub struct LquOptions<T: Real> {
    pub search: SearchOptions,
    /// Extra starting observables; only their eigenbases are used.
    pub seeds: Vec<NondegenerateObservable<T>>,
}

impl<T: Real> Default for LquOptions<T> {
    fn default() -> Self {
        Self { search: SearchOptions::default(), seeds: Vec::new() }
    }
}

/// Outcome of the LQU minimization; `value` is an upper bound on the true minimum.
#[derive(Debug, Clone)]
pub struct LquResult<T: Real> {
    pub value: T,
    pub minimizer: NondegenerateObservable<T>,
    pub restarts_used: usize,
    pub converged: bool,
}

/// Local quantum uncertainty: `min_K I(ρ_AB, K ⊗ I)` over local observables
/// `K = U diag(Λ) U†` on `side`.
///
/// The search starts from every seed in `opts.seeds` and from
/// `opts.search.restarts` Haar-random eigenbases drawn from `rng`.
pub fn lqu<T: Real, R: Rng + ?Sized>(
    state: &BipartiteState<T>,
    spectrum: &Spectrum<T>,
    side: Subsystem,
    opts: &LquOptions<T>,
    rng: &mut R,
) -> Result<LquResult<T>> {
    let spectrum = Spectrum::new(spectrum.values().to_vec())?;
    let n = state.dim_of(side);
    if spectrum.len() != n {
        return Err(dim_mismatch(format!("spectrum of length {} for side {side:?} of dimension {n}", spectrum.len())));
    }
    if let Some(bad) = opts.seeds.iter().find(|s| s.dim() != n) {
        return Err(dim_mismatch(format!("seed observable of dimension {} for side of dimension {n}", bad.dim())));
    }
    let mut starts: Vec<CMatrix<T>> = opts.seeds.iter().map(|s| s.eigenbasis().clone()).collect();
    starts.extend((0..opts.search.restarts).map(|_| haar_unitary::<T, R>(n, rng)));
    if starts.is_empty() {
        starts.push(matcore::identity(n));
    }

    let dims = state.dims();
    let rho = state.state();
    let lambda = spectrum.values().to_vec();
    let objective = |u: &CMatrix<T>| {
        let k = with_spectrum(u, &lambda);
        let embedded = match side {
            Subsystem::A => kron(&k, &matcore::identity(dims.1)),
            Subsystem::B => kron(&matcore::identity(dims.0), &k),
        };
        skew_raw(rho.matrix(), rho.sqrt(), &embedded)
    };
    let outcome = minimize_over_unitaries(&starts, objective, &opts.search)?;
    Ok(LquResult {
        value: outcome.best.value,
        minimizer: NondegenerateObservable::new(spectrum, reunitarize(&outcome.best.unitary))?,
        restarts_used: outcome.restarts_used,
        converged: outcome.converged,
    })
}

fn with_spectrum<T: Real>(u: &CMatrix<T>, lambda: &[T]) -> CMatrix<T> {
    let mut scaled = u.clone();
    for (j, &l) in lambda.iter().enumerate() {
        for i in 0..u.nrows() {
            scaled[(i, j)] *= crate::scalar::cr(l);
        }
    }
    scaled * u.adjoint()
}

/// Removes the rounding drift accumulated by repeated products of unitaries.
fn reunitarize<T: Real>(u: &CMatrix<T>) -> CMatrix<T> {
    let n = u.nrows();
    let mut q = u.clone();
    for j in 0..n {
        for k in 0..j {
            let proj = (0..n).fold(crate::scalar::cr(T::zero()), |acc, i| acc + q[(i, k)].conj() * q[(i, j)]);
            for i in 0..n {
                let qik = q[(i, k)];
                q[(i, j)] -= qik * proj;
            }
        }
        let norm = q.column(j).iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt();
        for i in 0..n {
            q[(i, j)] /= crate::scalar::cr(norm);
        }
    }
    q
}

/// Closed-form LQU for `n_A = 2` and spectrum `{−1, +1}`: `1 − λ_max(W)` with
/// `W_ij = Tr[√ρ (σ_i ⊗ I) √ρ (σ_j ⊗ I)]`.
pub fn lqu_2xd<T: Real>(state: &BipartiteState<T>) -> Result<T> {
    let (n_a, n_b) = state.dims();
    if n_a != 2 {
        return Err(dim_mismatch(format!("closed-form LQU needs a qubit on side A, got dimension {n_a}")));
    }
    let sqrt = state.state().sqrt();
    let id_b = matcore::identity::<T>(n_b);
    let products: Vec<CMatrix<T>> = matcore::pauli::<T>().iter().map(|p| sqrt * kron(p, &id_b)).collect();
    let w = CMatrix::from_fn(3, 3, |i, j| crate::scalar::cr(trace_product(&products[i], &products[j]).re));
    let w = (&w + w.transpose()) * crate::scalar::cr(T::lit(0.5));
    let top = matcore::hermitian_eig(&w)?.max_eigenvalue();
    Ok((T::one() - top).max(T::zero()).min(T::one() + T::tol(1e-9)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::pauli;
    use crate::quantum::{gell_mann_basis, ginibre_state, stream};
    use crate::scalar::cr;

    fn obs(m: CMatrix<f64>) -> Observable<f64> {
        Observable::new(m).unwrap()
    }

    fn bell() -> BipartiteState<f64> {
        let ket = [cr(1.0), cr(0.0), cr(0.0), cr(1.0)];
        BipartiteState::new(DensityMatrix::pure(&ket).unwrap(), 2, 2).unwrap()
    }

    #[test]
    fn skew_examples() {
        let [sx, _, sz] = pauli::<f64>();
        let mixed = DensityMatrix::<f64>::maximally_mixed(2);
        assert_eq!(skew_information(&mixed, &obs(sz.clone())).unwrap(), 0.0);
        let zero = DensityMatrix::<f64>::diagonal(&[1.0, 0.0]).unwrap();
        assert!((skew_information(&zero, &obs(sx.clone())).unwrap() - 1.0).abs() < 1e-12);
        assert!((variance(&zero, &obs(sx.clone())).unwrap() - 1.0).abs() < 1e-12);
        // I = 1 − 2√(p(1−p)) for diag(p, 1−p) and σ_x.
        let rho = DensityMatrix::<f64>::diagonal(&[0.9, 0.1]).unwrap();
        assert!((skew_information(&rho, &obs(sx)).unwrap() - 0.4).abs() < 1e-12);
    }

    #[test]
    fn variance_examples() {
        let [_, _, sz] = pauli::<f64>();
        let zero = DensityMatrix::<f64>::diagonal(&[1.0, 0.0]).unwrap();
        assert_eq!(variance(&zero, &obs(sz.clone())).unwrap(), 0.0);
        let mixed = DensityMatrix::<f64>::maximally_mixed(2);
        assert!((variance(&mixed, &obs(sz)).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn dimension_errors() {
        let [sx, ..] = pauli::<f64>();
        let rho = DensityMatrix::<f64>::maximally_mixed(3);
        assert!(skew_information(&rho, &obs(sx.clone())).is_err());
        assert!(variance(&rho, &obs(sx)).is_err());
        assert!(q_total(&rho, &gell_mann_basis(2)).is_err());
        assert!(q_local(&bell(), Subsystem::A, &gell_mann_basis(3)).is_err());
        let state = BipartiteState::new(DensityMatrix::<f64>::maximally_mixed(6), 3, 2).unwrap();
        assert!(lqu_2xd(&state).is_err());
        let mut rng = stream(0, 0);
        let spec = Spectrum::equally_spaced(2);
        assert!(lqu(&state, &spec, Subsystem::A, &LquOptions::default(), &mut rng).is_err());
    }

    #[test]
    fn q_examples() {
        let mixed = DensityMatrix::<f64>::maximally_mixed(3);
        assert!(q_total(&mixed, &gell_mann_basis(3)).unwrap().abs() < 1e-12);
        let rho = DensityMatrix::<f64>::diagonal(&[0.9, 0.1]).unwrap();
        assert!((q_total(&rho, &gell_mann_basis(2)).unwrap() - 0.4).abs() < 1e-12);
        let mut rng = stream(10, 0);
        let pure = ginibre_state::<f64, _>(2, 1, &mut rng).unwrap();
        assert!((q_total(&pure, &gell_mann_basis(2)).unwrap() - 1.0).abs() < 1e-8);

        assert!((q_local(&bell(), Subsystem::B, &gell_mann_basis(2)).unwrap() - 1.5).abs() < 1e-10);
        let mm = BipartiteState::new(DensityMatrix::<f64>::maximally_mixed(4), 2, 2).unwrap();
        for side in [Subsystem::A, Subsystem::B] {
            assert!(q_local(&mm, side, &gell_mann_basis(2)).unwrap().abs() < 1e-12);
        }
        let ra = ginibre_state::<f64, _>(2, 2, &mut rng).unwrap();
        let tb = ginibre_state::<f64, _>(3, 3, &mut rng).unwrap();
        let prod = BipartiteState::product(&ra, &tb).unwrap();
        let lhs = q_local(&prod, Subsystem::B, &gell_mann_basis(3)).unwrap();
        assert!((lhs - q_total(&tb, &gell_mann_basis(3)).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn lqu_closed_form_examples() {
        assert!((lqu_2xd(&bell()).unwrap() - 1.0).abs() < 1e-12);
        let mut rng = stream(11, 0);
        let zero = DensityMatrix::<f64>::diagonal(&[1.0, 0.0]).unwrap();
        let tb = ginibre_state::<f64, _>(3, 3, &mut rng).unwrap();
        let prod = BipartiteState::product(&zero, &tb).unwrap();
        assert!(lqu_2xd(&prod).unwrap().abs() < 1e-9);
    }

    #[test]
    fn lqu_numerical_examples() {
        let mut rng = stream(12, 0);
        let spec = Spectrum::equally_spaced(2);
        let opts = LquOptions { search: SearchOptions { restarts: 4, ..Default::default() }, seeds: vec![] };
        let bell_lqu = lqu(&bell(), &spec, Subsystem::A, &opts, &mut rng).unwrap();
        assert!((bell_lqu.value - 1.0).abs() < 1e-6);

        let ra = ginibre_state::<f64, _>(2, 2, &mut rng).unwrap();
        let tb = ginibre_state::<f64, _>(2, 2, &mut rng).unwrap();
        let prod = BipartiteState::product(&ra, &tb).unwrap();
        let r = lqu(&prod, &spec, Subsystem::A, &opts, &mut rng).unwrap();
        assert!(r.value.abs() < 1e-7, "{}", r.value);
        assert_eq!(r.restarts_used, 4);
        let at_min = local_skew(&prod, Subsystem::A, &r.minimizer.matrix()).unwrap();
        assert!(r.value <= at_min + 1e-9);
    }

    #[test]
    fn lqu_uses_seed_points() {
        let mut rng = stream(13, 0);
        let state = BipartiteState::new(ginibre_state::<f64, _>(6, 6, &mut rng).unwrap(), 3, 2).unwrap();
        let seed = crate::quantum::random_nondegenerate_observable::<f64, _>(3, None, &mut rng).unwrap();
        let at_seed = local_skew(&state, Subsystem::A, &seed.matrix()).unwrap();
        let opts = LquOptions { search: SearchOptions { restarts: 0, ..Default::default() }, seeds: vec![seed] };
        let r = lqu(&state, &Spectrum::equally_spaced(3), Subsystem::A, &opts, &mut rng).unwrap();
        assert!(r.value <= at_seed);
        assert_eq!(r.restarts_used, 1);
    }
}
