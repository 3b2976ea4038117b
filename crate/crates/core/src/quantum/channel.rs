use rand::Rng;

use crate::error::{dim_mismatch, Error, Result};
use crate::matcore::{self, CMatrix};
use crate::quantum::observable::NondegenerateObservable;
use crate::quantum::random::haar_unitary;
use crate::quantum::state::DensityMatrix;
use crate::scalar::{cr, Real, C};

const COMPLETENESS_TOL: f64 = 1e-8;

/// Completely positive trace-preserving map `ρ ↦ Σ_j E_j ρ E_j†`.
#[derive(Debug, Clone)]
pub struct KrausChannel<T: Real> {
    dim: usize,
    ops: Vec<CMatrix<T>>,
}

impl<T: Real> KrausChannel<T> {
    /// Validates shapes and `Σ_j E_j†E_j = I` within `1e-8`.
    pub fn new(ops: Vec<CMatrix<T>>) -> Result<Self> {
        let dim = ops.first().map(|e| e.nrows()).ok_or_else(|| Error::InvalidArgument("no Kraus operators".into()))?;
        if ops.iter().any(|e| e.shape() != (dim, dim)) {
            return Err(dim_mismatch("Kraus operators must share one square shape"));
        }
        let channel = Self { dim, ops };
        let residual = channel.completeness_residual();
        if residual > T::tol(COMPLETENESS_TOL) {
            return Err(Error::InvalidChannel { residual: residual.to_f64_lossy() });
        }
        Ok(channel)
    }

    pub fn identity(n: usize) -> Self {
        Self { dim: n, ops: vec![matcore::identity(n)] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kraus_ops(&self) -> &[CMatrix<T>] {
        &self.ops
    }

    /// `max |Σ_j E_j†E_j - I|`.
    pub fn completeness_residual(&self) -> T {
        let mut sum = -matcore::identity::<T>(self.dim);
        for e in &self.ops {
            sum += e.adjoint() * e;
        }
        matcore::max_abs(&sum)
    }

    pub fn apply(&self, rho: &DensityMatrix<T>) -> Result<DensityMatrix<T>> {
        if rho.dim() != self.dim {
            return Err(dim_mismatch(format!("channel on dimension {} applied to state of dimension {}", self.dim, rho.dim())));
        }
        let mut out = CMatrix::zeros(self.dim, self.dim);
        for e in &self.ops {
            out += e * rho.matrix() * e.adjoint();
        }
        DensityMatrix::new(out)
    }

    /// `max_j |[E_j, X]|`.
    pub fn max_commutator_with(&self, x: &CMatrix<T>) -> Result<T> {
        self.ops
            .iter()
            .map(|e| matcore::commutator(e, x).map(|m| matcore::max_abs(&m)))
            .try_fold(T::zero(), |acc, r| r.map(|v| acc.max(v)))
    }
}

/// Random channel with `kraus_count` operators from a Stinespring dilation.
///
/// The Kraus operators are the `n x n` row blocks of the first `n` columns of
/// a Haar unitary on `n · kraus_count` dimensions.
pub fn random_cptp<T: Real, R: Rng + ?Sized>(n: usize, kraus_count: usize, rng: &mut R) -> Result<KrausChannel<T>> {
    if n == 0 || kraus_count == 0 {
        return Err(Error::InvalidArgument("dimension and Kraus count must be positive".into()));
    }
    let big = haar_unitary::<T, R>(n * kraus_count, rng);
    let ops = (0..kraus_count).map(|j| big.view((j * n, 0), (n, n)).into_owned()).collect();
    KrausChannel::new(ops)
}

/// Channel on `A ⊗ B` whose Kraus operators all commute with `K ⊗ I_B`.
///
/// `E_j = Σ_k |u_k⟩⟨u_k| ⊗ B_j^(k)` where `|u_k⟩` are the eigenvectors of `K`
/// and each `{B_j^(k)}_j` is an independent [`random_cptp`] Kraus set on `B`.
/// For nondegenerate `K` the commutant of `K ⊗ I` consists exactly of such
/// block-diagonal operators; this sampler fixes the number of blocks per
/// eigenvector to `kraus_count`.
pub fn commuting_kraus_channel<T: Real, R: Rng + ?Sized>(
    k: &NondegenerateObservable<T>,
    n_b: usize,
    kraus_count: usize,
    rng: &mut R,
) -> Result<KrausChannel<T>> {
    let n_a = k.dim();
    let u = k.eigenbasis();
    let blocks: Vec<KrausChannel<T>> = (0..n_a).map(|_| random_cptp(n_b, kraus_count, rng)).collect::<Result<_>>()?;
    let projectors: Vec<CMatrix<T>> = (0..n_a)
        .map(|idx| {
            let col = u.column(idx);
            col * col.adjoint()
        })
        .collect();
    let n = n_a * n_b;
    let ops = (0..kraus_count)
        .map(|j| {
            let mut e = CMatrix::<T>::from_element(n, n, C::new(T::zero(), T::zero()));
            for (p, block) in projectors.iter().zip(&blocks) {
                e += matcore::kron(p, &block.kraus_ops()[j]);
            }
            e
        })
        .collect();
    KrausChannel::new(ops)
}

/// Fully depolarizing qubit channel, Kraus `{I, σ_x, σ_y, σ_z} / 2`.
pub fn fully_depolarizing_qubit<T: Real>() -> KrausChannel<T> {
    let half = cr(T::lit(0.5));
    let [sx, sy, sz] = matcore::pauli::<T>();
    let ops = vec![matcore::identity::<T>(2) * half, sx * half, sy * half, sz * half];
    KrausChannel::new(ops).expect("depolarizing Kraus set is complete")
}

/// Projective dephasing in the computational basis, Kraus `{|k⟩⟨k|}`.
pub fn dephasing<T: Real>(n: usize) -> KrausChannel<T> {
    let ops = (0..n)
        .map(|k| {
            let mut p = CMatrix::<T>::zeros(n, n);
            p[(k, k)] = cr(T::one());
            p
        })
        .collect();
    KrausChannel::new(ops).expect("projectors resolve the identity")
}
