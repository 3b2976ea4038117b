//! Dense complex linear algebra: Hermitian eigensolver, PSD square root,
//! tensor products and partial traces.
//!
//! Subsystem `A` is always the outer (slow) tensor factor: the joint index of
//! `|a⟩ ⊗ |b⟩` is `a * n_b + b`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{dim_mismatch, Error, Result};
use crate::scalar::{c, cr, Real, C};

/// Dense complex matrix, column-major storage.
pub type CMatrix<T> = DMatrix<C<T>>;

/// Largest joint dimension the toolkit is tuned for.
pub const MAX_DIM: usize = 32;

const HERMITIAN_TOL: f64 = 1e-9;
const PSD_TOL: f64 = 1e-10;
const MAX_SWEEPS: usize = 64;

/// Which tensor factor an operation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Subsystem {
    A,
    B,
}

impl Subsystem {
    pub fn other(self) -> Self {
        match self {
            Subsystem::A => Subsystem::B,
            Subsystem::B => Subsystem::A,
        }
    }
}

/// Eigen-decomposition `M = U diag(λ) U†` of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen<T: Real> {
    /// Ascending.
    pub eigenvalues: Vec<T>,
    /// Column eigenvectors, unitary.
    pub eigenvectors: CMatrix<T>,
}

impl<T: Real> HermitianEigen<T> {
    /// `U f(λ) U†` for a real function of the spectrum.
    pub fn map_spectrum(&self, f: impl Fn(T) -> T) -> CMatrix<T> {
        let u = &self.eigenvectors;
        let n = u.nrows();
        let mut scaled = u.clone();
        for (j, &lam) in self.eigenvalues.iter().enumerate() {
            let s = cr(f(lam));
            for i in 0..n {
                scaled[(i, j)] *= s;
            }
        }
        scaled * u.adjoint()
    }

    pub fn reconstruct(&self) -> CMatrix<T> {
        self.map_spectrum(|x| x)
    }

    pub fn min_eigenvalue(&self) -> T {
        self.eigenvalues.first().copied().unwrap_or_else(T::zero)
    }

    pub fn max_eigenvalue(&self) -> T {
        self.eigenvalues.last().copied().unwrap_or_else(T::zero)
    }
}

pub fn identity<T: Real>(n: usize) -> CMatrix<T> {
    CMatrix::identity(n, n)
}

/// Pauli matrices `σ_x`, `σ_y`, `σ_z`.
pub fn pauli<T: Real>() -> [CMatrix<T>; 3] {
    let (o, l) = (T::zero(), T::one());
    [
        CMatrix::from_row_slice(2, 2, &[cr(o), cr(l), cr(l), cr(o)]),
        CMatrix::from_row_slice(2, 2, &[cr(o), c(o, -l), c(o, l), cr(o)]),
        CMatrix::from_row_slice(2, 2, &[cr(l), cr(o), cr(o), cr(-l)]),
    ]
}

/// Largest entry modulus.
pub fn max_abs<T: Real>(m: &CMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc.max(crate::scalar::cabs(*z)))
}

/// `max |M - M†|`, or an error if `M` is not square.
pub fn hermitian_residual<T: Real>(m: &CMatrix<T>) -> Result<T> {
    if !m.is_square() {
        return Err(dim_mismatch(format!("expected square matrix, got {}x{}", m.nrows(), m.ncols())));
    }
    let n = m.nrows();
    let mut worst = T::zero();
    for i in 0..n {
        for j in i..n {
            worst = worst.max(crate::scalar::cabs(m[(i, j)] - m[(j, i)].conj()));
        }
    }
    Ok(worst)
}

fn hermitian_part<T: Real>(m: &CMatrix<T>) -> CMatrix<T> {
    let half = cr(T::lit(0.5));
    (m + m.adjoint()) * half
}

/// Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// The input is symmetrized before iterating; asymmetry above `1e-9` is
/// rejected with [`Error::NotHermitian`].
pub fn hermitian_eig<T: Real>(m: &CMatrix<T>) -> Result<HermitianEigen<T>> {
    let residual = hermitian_residual(m)?;
    if residual > T::tol(HERMITIAN_TOL) {
        return Err(Error::NotHermitian { residual: residual.to_f64_lossy() });
    }
    jacobi_eig(hermitian_part(m))
}

fn jacobi_eig<T: Real>(mut a: CMatrix<T>) -> Result<HermitianEigen<T>> {
    let n = a.nrows();
    let mut v = identity::<T>(n);
    for i in 0..n {
        a[(i, i)].im = T::zero();
    }
    let scale = a.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt();
    let threshold = scale * T::default_epsilon() * T::lit(0.5);

    let mut converged = n < 2 || scale == T::zero();
    let mut sweeps = 0;
    while !converged {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps });
        }
        sweeps += 1;
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        let off = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .fold(T::zero(), |acc, (i, j)| acc + a[(i, j)].norm_sqr())
            .sqrt();
        converged = off <= threshold;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).unwrap_or(std::cmp::Ordering::Equal));
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let eigenvectors = CMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(HermitianEigen { eigenvalues, eigenvectors })
}

/// One Jacobi rotation annihilating `a[(p, q)]`; `a ← G† a G`, `v ← v G`.
fn rotate<T: Real>(a: &mut CMatrix<T>, v: &mut CMatrix<T>, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = crate::scalar::cabs(apq);
    if r == T::zero() {
        return;
    }
    let n = a.nrows();
    let d = apq.conj() / cr(r);
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let tau = (aqq - app) / (T::lit(2.0) * r);
    let t = if tau >= T::zero() {
        T::one() / (tau + (T::one() + tau * tau).sqrt())
    } else {
        -T::one() / (-tau + (T::one() + tau * tau).sqrt())
    };
    let cs = T::one() / (T::one() + t * t).sqrt();
    let sn = t * cs;
    let (g_pp, g_pq, g_qp, g_qq) = (cr(cs), cr(sn), -d * cr(sn), d * cr(cs));

    for k in 0..n {
        let (x, y) = (a[(k, p)], a[(k, q)]);
        a[(k, p)] = x * g_pp + y * g_qp;
        a[(k, q)] = x * g_pq + y * g_qq;
    }
    for k in 0..n {
        let (x, y) = (a[(p, k)], a[(q, k)]);
        a[(p, k)] = g_pp.conj() * x + g_qp.conj() * y;
        a[(q, k)] = g_pq.conj() * x + g_qq.conj() * y;
    }
    for k in 0..n {
        let (x, y) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = x * g_pp + y * g_qp;
        v[(k, q)] = x * g_pq + y * g_qq;
    }
    a[(p, q)] = C::new(T::zero(), T::zero());
    a[(q, p)] = C::new(T::zero(), T::zero());
    a[(p, p)] = cr(app - t * r);
    a[(q, q)] = cr(aqq + t * r);
}

/// Principal square root of a Hermitian PSD matrix.
///
/// Eigenvalues in `[-1e-10, 0)` are clamped to zero; anything more negative
/// is [`Error::NotPsd`].
pub fn sqrtm_psd<T: Real>(m: &CMatrix<T>) -> Result<CMatrix<T>> {
    let eig = hermitian_eig(m)?;
    sqrt_from_eig(&eig)
}

pub(crate) fn sqrt_from_eig<T: Real>(eig: &HermitianEigen<T>) -> Result<CMatrix<T>> {
    let min = eig.min_eigenvalue();
    if min < -T::tol(PSD_TOL) {
        return Err(Error::NotPsd { min_eigenvalue: min.to_f64_lossy() });
    }
    // Eigenvalues below the solver's resolution are indistinguishable from 0.
    let n = T::from_usize(eig.eigenvalues.len()).unwrap();
    let floor = T::lit(8.0) * n * T::default_epsilon() * eig.max_eigenvalue().abs().max(min.abs());
    Ok(eig.map_spectrum(|x| if x <= floor { T::zero() } else { x.sqrt() }))
}

/// `exp(iH)` for Hermitian `H`.
pub fn unitary_exp<T: Real>(h: &CMatrix<T>) -> Result<CMatrix<T>> {
    let eig = hermitian_eig(h)?;
    let u = &eig.eigenvectors;
    let n = u.nrows();
    let mut scaled = u.clone();
    for (j, &lam) in eig.eigenvalues.iter().enumerate() {
        let phase = c(lam.cos(), lam.sin());
        for i in 0..n {
            scaled[(i, j)] *= phase;
        }
    }
    Ok(scaled * u.adjoint())
}

/// Tensor product with `a`'s indices outermost.
pub fn kron<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> CMatrix<T> {
    a.kronecker(b)
}

/// Embeds a local operator into the joint space, `X ⊗ I` or `I ⊗ X`.
pub fn embed_local<T: Real>(x: &CMatrix<T>, side: Subsystem, dims: (usize, usize)) -> Result<CMatrix<T>> {
    let (na, nb) = dims;
    match side {
        Subsystem::A if x.nrows() == na && x.ncols() == na => Ok(kron(x, &identity(nb))),
        Subsystem::B if x.nrows() == nb && x.ncols() == nb => Ok(kron(&identity(na), x)),
        _ => Err(dim_mismatch(format!(
            "local operator {}x{} does not fit side {side:?} of {na}x{nb}",
            x.nrows(),
            x.ncols()
        ))),
    }
}

/// Partial trace over `traced_out` of an operator on `A ⊗ B`.
pub fn partial_trace<T: Real>(m: &CMatrix<T>, dims: (usize, usize), traced_out: Subsystem) -> Result<CMatrix<T>> {
    let (na, nb) = dims;
    if !m.is_square() || m.nrows() != na * nb {
        return Err(dim_mismatch(format!(
            "partial trace of {}x{} matrix with dims ({na}, {nb})",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(match traced_out {
        Subsystem::B => CMatrix::from_fn(na, na, |a, a2| {
            (0..nb).fold(C::new(T::zero(), T::zero()), |acc, b| acc + m[(a * nb + b, a2 * nb + b)])
        }),
        Subsystem::A => CMatrix::from_fn(nb, nb, |b, b2| {
            (0..na).fold(C::new(T::zero(), T::zero()), |acc, a| acc + m[(a * nb + b, a * nb + b2)])
        }),
    })
}

fn check_conformable<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> Result<()> {
    if a.shape() != b.shape() || !a.is_square() {
        return Err(dim_mismatch(format!("operands {:?} and {:?} are not conformable", a.shape(), b.shape())));
    }
    Ok(())
}

/// `[A, B] = AB - BA`.
pub fn commutator<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> Result<CMatrix<T>> {
    check_conformable(a, b)?;
    Ok(a * b - b * a)
}

/// Hilbert–Schmidt inner product `Tr(A† B)`.
pub fn trace_inner<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> Result<C<T>> {
    if a.shape() != b.shape() {
        return Err(dim_mismatch(format!("operands {:?} and {:?} are not conformable", a.shape(), b.shape())));
    }
    Ok(a.iter().zip(b.iter()).fold(C::new(T::zero(), T::zero()), |acc, (x, y)| acc + x.conj() * y))
}

/// `Tr(AB)` without forming the product.
pub(crate) fn trace_product<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> C<T> {
    let n = a.nrows();
    let mut acc = C::new(T::zero(), T::zero());
    for i in 0..n {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

pub(crate) fn trace<T: Real>(m: &CMatrix<T>) -> C<T> {
    m.diagonal().iter().fold(C::new(T::zero(), T::zero()), |acc, z| acc + z)
}
