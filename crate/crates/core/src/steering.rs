//! Steering of Bob's subsystem by Alice's rank-one projective measurements.

use rand::Rng;

use crate::error::{dim_mismatch, Error, Result};
use crate::matcore::{self, CMatrix};
use crate::metrics::{q_total, skew_information};
use crate::optimize::{minimize_over_unitaries, SearchOptions};
use crate::quantum::{haar_unitary, BipartiteState, DensityMatrix, Observable, ObservableBasis};
use crate::scalar::{cr, Real, C};

/// Outcomes less likely than this are dropped from every weighted sum.
pub const MIN_OUTCOME_PROBABILITY: f64 = 1e-12;

const UNITARY_TOL: f64 = 1e-10;

/// Orthonormal basis `{|θ^i⟩}` of Alice's space, stored as the columns of a unitary.
#[derive(Debug, Clone)]
pub struct MeasurementBasis<T: Real> {
    unitary: CMatrix<T>,
}

impl<T: Real> MeasurementBasis<T> {
    pub fn new(unitary: CMatrix<T>) -> Result<Self> {
        if !unitary.is_square() {
            return Err(dim_mismatch("measurement basis must be square"));
        }
        let residual = matcore::max_abs(&(unitary.adjoint() * &unitary - matcore::identity::<T>(unitary.nrows())));
        if residual > T::tol(UNITARY_TOL) {
            return Err(Error::InvalidArgument(format!("measurement basis is not orthonormal (residual {residual:e})")));
        }
        Ok(Self { unitary })
    }

    pub fn computational(n: usize) -> Self {
        Self { unitary: matcore::identity(n) }
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        Self { unitary: haar_unitary(n, rng) }
    }

    pub fn dim(&self) -> usize {
        self.unitary.nrows()
    }

    pub fn unitary(&self) -> &CMatrix<T> {
        &self.unitary
    }

    /// Projector `|θ^i⟩⟨θ^i|`.
    pub fn projector(&self, i: usize) -> CMatrix<T> {
        let col = self.unitary.column(i);
        col * col.adjoint()
    }

    /// Same basis with its vectors reordered: column `k` becomes old column `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = self.dim();
        Self { unitary: CMatrix::from_fn(n, n, |i, k| self.unitary[(i, perm[k])]) }
    }
}

#[derive(Debug, Clone)]
pub struct SteeredOutcome<T: Real> {
    /// Index of the basis vector that produced this outcome.
    pub index: usize,
    pub probability: T,
    pub state: DensityMatrix<T>,
}

/// Bob's conditional states after Alice measures.
#[derive(Debug, Clone)]
pub struct SteeringEnsemble<T: Real> {
    pub outcomes: Vec<SteeredOutcome<T>>,
    /// Outcome indices with probability below [`MIN_OUTCOME_PROBABILITY`].
    pub skipped: Vec<usize>,
    pub skipped_mass: T,
}

impl<T: Real> SteeringEnsemble<T> {
    pub fn total_probability(&self) -> T {
        self.outcomes.iter().fold(self.skipped_mass, |acc, o| acc + o.probability)
    }

    /// `Σ_i p^i f(ρ_B^i)` over retained outcomes.
    pub fn weighted_sum(&self, mut f: impl FnMut(&DensityMatrix<T>) -> Result<T>) -> Result<T> {
        self.outcomes.iter().try_fold(T::zero(), |acc, o| Ok(acc + o.probability * f(&o.state)?))
    }
}

/// `p^i = Tr[ρ_AB (θ^i ⊗ I)]`, `ρ_B^i = ⟨θ^i|ρ_AB|θ^i⟩ / p^i`.
pub fn steer<T: Real>(state: &BipartiteState<T>, basis: &MeasurementBasis<T>) -> Result<SteeringEnsemble<T>> {
    let (n_a, n_b) = state.dims();
    if basis.dim() != n_a {
        return Err(dim_mismatch(format!("measurement basis of dimension {} for side A of dimension {n_a}", basis.dim())));
    }
    let rho = state.state().matrix();
    let zero = C::new(T::zero(), T::zero());
    let mut outcomes = Vec::with_capacity(n_a);
    let mut skipped = Vec::new();
    let mut skipped_mass = T::zero();
    for i in 0..n_a {
        let theta = basis.unitary.column(i);
        let block = CMatrix::from_fn(n_b, n_b, |b, b2| {
            let mut acc = zero;
            for a in 0..n_a {
                for a2 in 0..n_a {
                    acc += theta[a].conj() * rho[(a * n_b + b, a2 * n_b + b2)] * theta[a2];
                }
            }
            acc
        });
        let block = (&block + block.adjoint()) * cr(T::lit(0.5));
        let p = matcore::trace(&block).re;
        if p < T::lit(MIN_OUTCOME_PROBABILITY) {
            skipped.push(i);
            skipped_mass += p.max(T::zero());
            continue;
        }
        outcomes.push(SteeredOutcome { index: i, probability: p, state: DensityMatrix::new(block / cr(p))? });
    }
    Ok(SteeringEnsemble { outcomes, skipped, skipped_mass })
}

/// `Σ_i p^i I(ρ_B^i, K_B)` for one measurement basis.
pub fn steered_skew_sum<T: Real>(state: &BipartiteState<T>, basis: &MeasurementBasis<T>, k_b: &Observable<T>) -> Result<T> {
    if k_b.dim() != state.dims().1 {
        return Err(dim_mismatch(format!("observable of dimension {} on side B of dimension {}", k_b.dim(), state.dims().1)));
    }
    steer(state, basis)?.weighted_sum(|rho| skew_information(rho, k_b))
}

/// `Σ_i p^i Q(ρ_B^i)` for one measurement basis.
pub fn steered_q_sum<T: Real>(
    state: &BipartiteState<T>,
    basis: &MeasurementBasis<T>,
    basis_b: &ObservableBasis<T>,
) -> Result<T> {
    if basis_b.dim() != state.dims().1 {
        return Err(dim_mismatch(format!("basis of dimension {} on side B of dimension {}", basis_b.dim(), state.dims().1)));
    }
    steer(state, basis)?.weighted_sum(|rho| q_total(rho, basis_b))
}

#[derive(Debug, Clone)]
pub struct SteeringOptions<T: Real> {
    pub search: SearchOptions,
    /// Starting bases tried before the Haar-random ones.
    pub seeds: Vec<MeasurementBasis<T>>,
}

impl<T: Real> Default for SteeringOptions<T> {
    fn default() -> Self {
        Self { search: SearchOptions::default(), seeds: Vec::new() }
    }
}

/// Best value found by a maximization over measurement bases; a lower bound
/// on the true maximum.
#[derive(Debug, Clone)]
pub struct SteeringOptimum<T: Real> {
    pub value: T,
    pub maximizer: MeasurementBasis<T>,
    pub restarts_used: usize,
    pub converged: bool,
}

fn maximize_over_bases<T: Real, R: Rng + ?Sized>(
    n_a: usize,
    objective: impl Fn(&MeasurementBasis<T>) -> Result<T> + Sync,
    opts: &SteeringOptions<T>,
    rng: &mut R,
) -> Result<SteeringOptimum<T>> {
    if let Some(bad) = opts.seeds.iter().find(|s| s.dim() != n_a) {
        return Err(dim_mismatch(format!("seed basis of dimension {} for side A of dimension {n_a}", bad.dim())));
    }
    let mut starts: Vec<CMatrix<T>> = opts.seeds.iter().map(|s| s.unitary.clone()).collect();
    starts.extend((0..opts.search.restarts).map(|_| haar_unitary::<T, R>(n_a, rng)));
    if starts.is_empty() {
        starts.push(matcore::identity(n_a));
    }
    // Bases the optimizer wanders into that produce ill-conditioned outcomes
    // are treated as infeasible.
    let penalty = T::max_value().unwrap_or_else(T::one);
    let negated = |u: &CMatrix<T>| match objective(&MeasurementBasis { unitary: u.clone() }) {
        Ok(v) => -v,
        Err(_) => penalty,
    };
    let outcome = minimize_over_unitaries(&starts, negated, &opts.search)?;
    let maximizer = MeasurementBasis { unitary: outcome.best.unitary };
    Ok(SteeringOptimum {
        value: objective(&maximizer)?,
        maximizer,
        restarts_used: outcome.restarts_used,
        converged: outcome.converged,
    })
}

/// Steering-induced skew information `max_Θ Σ_i p^i I(ρ_B^i, K_B)`.
pub fn steering_induced_skew<T: Real, R: Rng + ?Sized>(
    state: &BipartiteState<T>,
    k_b: &Observable<T>,
    opts: &SteeringOptions<T>,
    rng: &mut R,
) -> Result<SteeringOptimum<T>> {
    if k_b.dim() != state.dims().1 {
        return Err(dim_mismatch(format!("observable of dimension {} on side B of dimension {}", k_b.dim(), state.dims().1)));
    }
    maximize_over_bases(state.dims().0, |basis| steered_skew_sum(state, basis, k_b), opts, rng)
}

/// Average steering-induced skew information `max_Θ Σ_i p^i Q(ρ_B^i)`.
pub fn average_steering_induced_q<T: Real, R: Rng + ?Sized>(
    state: &BipartiteState<T>,
    basis_b: &ObservableBasis<T>,
    opts: &SteeringOptions<T>,
    rng: &mut R,
) -> Result<SteeringOptimum<T>> {
    if basis_b.dim() != state.dims().1 {
        return Err(dim_mismatch(format!("basis of dimension {} on side B of dimension {}", basis_b.dim(), state.dims().1)));
    }
    maximize_over_bases(state.dims().0, |basis| steered_q_sum(state, basis, basis_b), opts, rng)
}
