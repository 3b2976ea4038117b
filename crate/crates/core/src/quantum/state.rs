use nalgebra::DVector;

use crate::error::{dim_mismatch, Error, Result};
use crate::matcore::{self, kron, partial_trace, CMatrix, Subsystem};
use crate::quantum::random::gaussian_matrix;
use crate::scalar::{cr, Real, C};
use rand::Rng;

const HERMITIAN_TOL: f64 = 1e-9;
const TRACE_TOL: f64 = 1e-9;
const PSD_TOL: f64 = 1e-10;

/// A validated density matrix: Hermitian, positive semidefinite, unit trace.
///
/// The principal square root is computed once at construction.
#[derive(Debug, Clone)]
pub struct DensityMatrix<T: Real> {
    matrix: CMatrix<T>,
    sqrt: CMatrix<T>,
}

impl<T: Real> DensityMatrix<T> {
    pub fn new(matrix: CMatrix<T>) -> Result<Self> {
        let residual = matcore::hermitian_residual(&matrix)?;
        if residual > T::tol(HERMITIAN_TOL) {
            return Err(Error::InvalidState { invariant: "hermiticity", residual: residual.to_f64_lossy() });
        }
        let trace_residual = crate::scalar::cabs(matcore::trace(&matrix) - cr(T::one()));
        if trace_residual > T::tol(TRACE_TOL) {
            return Err(Error::InvalidState { invariant: "unit trace", residual: trace_residual.to_f64_lossy() });
        }
        let eig = matcore::hermitian_eig(&matrix)?;
        let min = eig.min_eigenvalue();
        if min < -T::tol(PSD_TOL) {
            return Err(Error::InvalidState { invariant: "positivity", residual: (-min).to_f64_lossy() });
        }
        let sqrt = matcore::sqrt_from_eig(&eig)?;
        let half = cr(T::lit(0.5));
        let matrix = (&matrix + matrix.adjoint()) * half;
        Ok(Self { matrix, sqrt })
    }

    /// Normalizes a PSD matrix by its trace.
    pub fn from_unnormalized(matrix: CMatrix<T>) -> Result<Self> {
        let tr = matcore::trace(&matrix).re;
        if tr <= T::zero() {
            return Err(Error::InvalidState { invariant: "positive trace", residual: tr.to_f64_lossy() });
        }
        Self::new(matrix / cr(tr))
    }

    pub fn maximally_mixed(n: usize) -> Self {
        Self::new(matcore::identity::<T>(n) / cr(T::from_usize(n).unwrap())).expect("maximally mixed state is valid")
    }

    /// `|ψ⟩⟨ψ|` for a (not necessarily normalized) ket.
    pub fn pure(ket: &[C<T>]) -> Result<Self> {
        let v = DVector::from_column_slice(ket);
        Self::from_unnormalized(&v * v.adjoint())
    }

    /// Diagonal state with the given populations.
    pub fn diagonal(populations: &[T]) -> Result<Self> {
        let n = populations.len();
        Self::new(CMatrix::from_fn(n, n, |i, j| if i == j { cr(populations[i]) } else { cr(T::zero()) }))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    /// Principal square root `ρ^{1/2}`.
    pub fn sqrt(&self) -> &CMatrix<T> {
        &self.sqrt
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> T {
        matcore::trace_product(&self.matrix, &self.matrix).re
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.matrix
    }
}

/// Random density matrix `GG† / Tr(GG†)` with `G` an `n x rank` complex Gaussian matrix.
pub fn ginibre_state<T: Real, R: Rng + ?Sized>(n: usize, rank: usize, rng: &mut R) -> Result<DensityMatrix<T>> {
    if n == 0 || rank == 0 || rank > n {
        return Err(Error::InvalidArgument(format!("ginibre rank {rank} must lie in 1..={n}")));
    }
    let g = gaussian_matrix::<T, R>(n, rank, rng);
    DensityMatrix::from_unnormalized(&g * g.adjoint())
}

/// A density matrix on `A ⊗ B` together with its factorization.
#[derive(Debug, Clone)]
pub struct BipartiteState<T: Real> {
    state: DensityMatrix<T>,
    dims: (usize, usize),
}

impl<T: Real> BipartiteState<T> {
    pub fn new(state: DensityMatrix<T>, n_a: usize, n_b: usize) -> Result<Self> {
        if n_a == 0 || n_b == 0 || n_a * n_b != state.dim() {
            return Err(dim_mismatch(format!("dims ({n_a}, {n_b}) do not factor a {}-dimensional state", state.dim())));
        }
        Ok(Self { state, dims: (n_a, n_b) })
    }

    /// `ρ_A ⊗ τ_B`.
    pub fn product(rho_a: &DensityMatrix<T>, tau_b: &DensityMatrix<T>) -> Result<Self> {
        let joint = DensityMatrix::new(kron(rho_a.matrix(), tau_b.matrix()))?;
        Self::new(joint, rho_a.dim(), tau_b.dim())
    }

    pub fn state(&self) -> &DensityMatrix<T> {
        &self.state
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn dim_of(&self, side: Subsystem) -> usize {
        match side {
            Subsystem::A => self.dims.0,
            Subsystem::B => self.dims.1,
        }
    }

    /// Reduced state of `keep`.
    pub fn marginal(&self, keep: Subsystem) -> Result<DensityMatrix<T>> {
        DensityMatrix::new(partial_trace(self.state.matrix(), self.dims, keep.other())?)
    }
}
