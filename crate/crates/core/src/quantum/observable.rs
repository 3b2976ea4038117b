use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{self, CMatrix};
use crate::quantum::random::haar_unitary;
use crate::scalar::{c, cr, Real};

const HERMITIAN_TOL: f64 = 1e-9;
const UNITARY_TOL: f64 = 1e-9;
/// Smallest admissible gap between consecutive eigenvalues.
pub const MIN_SPECTRAL_GAP: f64 = 1e-6;

/// A Hermitian operator.
#[derive(Debug, Clone)]
pub struct Observable<T: Real> {
    matrix: CMatrix<T>,
}

impl<T: Real> Observable<T> {
    pub fn new(matrix: CMatrix<T>) -> Result<Self> {
        let residual = matcore::hermitian_residual(&matrix)?;
        if residual > T::tol(HERMITIAN_TOL) {
            return Err(Error::NotHermitian { residual: residual.to_f64_lossy() });
        }
        Ok(Self { matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }
}

/// A strictly ascending spectrum with every gap at least [`MIN_SPECTRAL_GAP`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum<T>(Vec<T>);

impl<T: Real> Spectrum<T> {
    pub fn new(values: Vec<T>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("empty spectrum".into()));
        }
        let min_gap = values
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(None, |acc: Option<T>, g| Some(acc.map_or(g, |a| a.min(g))));
        match min_gap {
            Some(g) if g < T::lit(MIN_SPECTRAL_GAP) => Err(Error::DegenerateSpectrum { min_gap: g.to_f64_lossy() }),
            _ => Ok(Self(values)),
        }
    }

    /// `λ_k = -1 + 2k/(n-1)`, i.e. `{-1, +1}` for a qubit; `{0}` when `n = 1`.
    pub fn equally_spaced(n: usize) -> Self {
        if n <= 1 {
            return Self(vec![T::zero()]);
        }
        let step = T::lit(2.0) / T::from_usize(n - 1).unwrap();
        Self((0..n).map(|k| -T::one() + step * T::from_usize(k).unwrap()).collect())
    }

    pub fn values(&self) -> &[T] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Observable `K = U diag(Λ) U†` with nondegenerate spectrum `Λ`.
#[derive(Debug, Clone)]
pub struct NondegenerateObservable<T: Real> {
    spectrum: Spectrum<T>,
    eigenbasis: CMatrix<T>,
}

impl<T: Real> NondegenerateObservable<T> {
    pub fn new(spectrum: Spectrum<T>, eigenbasis: CMatrix<T>) -> Result<Self> {
        let n = spectrum.len();
        if eigenbasis.shape() != (n, n) {
            return Err(Error::DimensionMismatch(format!(
                "eigenbasis {:?} does not match spectrum of length {n}",
                eigenbasis.shape()
            )));
        }
        let residual = matcore::max_abs(&(eigenbasis.adjoint() * &eigenbasis - matcore::identity::<T>(n)));
        if residual > T::tol(UNITARY_TOL) {
            return Err(Error::InvalidArgument(format!("eigenbasis is not unitary (residual {residual:e})")));
        }
        Ok(Self { spectrum, eigenbasis })
    }

    /// Diagonal in the computational basis.
    pub fn diagonal(spectrum: Spectrum<T>) -> Self {
        let n = spectrum.len();
        Self { spectrum, eigenbasis: matcore::identity(n) }
    }

    pub fn dim(&self) -> usize {
        self.spectrum.len()
    }

    pub fn spectrum(&self) -> &Spectrum<T> {
        &self.spectrum
    }

    pub fn eigenbasis(&self) -> &CMatrix<T> {
        &self.eigenbasis
    }

    pub fn matrix(&self) -> CMatrix<T> {
        self.spectral_function(|x| x)
    }

    /// `U f(Λ) U†`.
    pub fn spectral_function(&self, f: impl Fn(T) -> T) -> CMatrix<T> {
        let u = &self.eigenbasis;
        let mut scaled = u.clone();
        for (j, &lam) in self.spectrum.values().iter().enumerate() {
            let s = cr(f(lam));
            for i in 0..u.nrows() {
                scaled[(i, j)] *= s;
            }
        }
        scaled * u.adjoint()
    }

    pub fn to_observable(&self) -> Observable<T> {
        Observable { matrix: self.matrix() }
    }
}

/// `U diag(Λ) U†` with `U` Haar-random; `Λ` defaults to [`Spectrum::equally_spaced`].
pub fn random_nondegenerate_observable<T: Real, R: Rng + ?Sized>(
    n: usize,
    spectrum: Option<Spectrum<T>>,
    rng: &mut R,
) -> Result<NondegenerateObservable<T>> {
    let spectrum = match spectrum {
        Some(s) => Spectrum::new(s.0)?,
        None => Spectrum::equally_spaced(n),
    };
    if spectrum.len() != n {
        return Err(Error::DimensionMismatch(format!("spectrum of length {} for dimension {n}", spectrum.len())));
    }
    let u = haar_unitary(n, rng);
    Ok(NondegenerateObservable { spectrum, eigenbasis: u })
}

/// Trace-orthonormal basis of the `n²`-dimensional real space of observables.
#[derive(Debug, Clone)]
pub struct ObservableBasis<T: Real> {
    dim: usize,
    elements: Vec<Observable<T>>,
}

impl<T: Real> ObservableBasis<T> {
    /// Checks orthonormality `Tr(X^i X^j) = δ_ij` within `1e-10`.
    pub fn new(dim: usize, elements: Vec<Observable<T>>) -> Result<Self> {
        if elements.len() != dim * dim || elements.iter().any(|x| x.dim() != dim) {
            return Err(Error::DimensionMismatch(format!(
                "an operator basis on dimension {dim} needs {} elements of that dimension",
                dim * dim
            )));
        }
        let basis = Self { dim, elements };
        let residual = basis.gram_residual();
        if residual > T::tol(1e-10) {
            return Err(Error::InvalidArgument(format!("basis not orthonormal (residual {residual:e})")));
        }
        Ok(basis)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn elements(&self) -> &[Observable<T>] {
        &self.elements
    }

    /// `max |Tr(X^i X^j) - δ_ij|`.
    pub fn gram_residual(&self) -> T {
        let mut worst = T::zero();
        for (i, x) in self.elements.iter().enumerate() {
            for (j, y) in self.elements.iter().enumerate() {
                let g = matcore::trace_product(x.matrix(), y.matrix());
                let target = if i == j { T::one() } else { T::zero() };
                worst = worst.max(crate::scalar::cabs(g - cr(target)));
            }
        }
        worst
    }

    /// `{U X^i U†}`, again an orthonormal basis.
    pub fn rotated(&self, u: &CMatrix<T>) -> Result<Self> {
        let elements = self
            .elements
            .iter()
            .map(|x| Observable::new(u * x.matrix() * u.adjoint()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.dim, elements)
    }
}

/// Generalized Gell-Mann matrices scaled to unit Hilbert–Schmidt norm, plus `I/√n`.
///
/// Order: for each pair `j < k` the symmetric then antisymmetric element, then
/// the diagonal family, then the identity. For `n = 2` this is
/// `{σ_x, σ_y, σ_z, I} / √2`.
pub fn gell_mann_basis<T: Real>(n: usize) -> ObservableBasis<T> {
    let zero = CMatrix::<T>::zeros(n, n);
    let inv_sqrt2 = T::one() / T::lit(2.0).sqrt();
    let mut elements = Vec::with_capacity(n * n);
    for j in 0..n {
        for k in j + 1..n {
            let mut sym = zero.clone();
            sym[(j, k)] = cr(inv_sqrt2);
            sym[(k, j)] = cr(inv_sqrt2);
            elements.push(Observable { matrix: sym });
            let mut anti = zero.clone();
            anti[(j, k)] = c(T::zero(), -inv_sqrt2);
            anti[(k, j)] = c(T::zero(), inv_sqrt2);
            elements.push(Observable { matrix: anti });
        }
    }
    for l in 1..n {
        let lf = T::from_usize(l).unwrap();
        let norm = T::one() / (lf * (lf + T::one())).sqrt();
        let mut d = zero.clone();
        for i in 0..l {
            d[(i, i)] = cr(norm);
        }
        d[(l, l)] = cr(-lf * norm);
        elements.push(Observable { matrix: d });
    }
    let id = matcore::identity::<T>(n) / cr(T::from_usize(n).unwrap().sqrt());
    elements.push(Observable { matrix: id });
    ObservableBasis { dim: n, elements }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::random::stream;

    #[test]
    fn qubit_gell_mann_is_scaled_pauli() {
        let basis = gell_mann_basis::<f64>(2);
        let [sx, sy, sz] = matcore::pauli::<f64>();
        let s = cr(1.0 / 2f64.sqrt());
        let expected = [&sx * s, &sy * s, &sz * s, matcore::identity::<f64>(2) * s];
        for (x, e) in basis.elements().iter().zip(expected.iter()) {
            assert!(matcore::max_abs(&(x.matrix() - e)) < 1e-15);
        }
    }

    #[test]
    fn gell_mann_is_orthonormal_and_complete() {
        for n in 1..=5 {
            let basis = gell_mann_basis::<f64>(n);
            assert_eq!(basis.elements().len(), n * n);
            assert!(basis.gram_residual() < 1e-10);
            // Brute-force sum of squares against n·I.
            let mut sum = CMatrix::<f64>::zeros(n, n);
            for x in basis.elements() {
                sum += x.matrix() * x.matrix();
            }
            let target = matcore::identity::<f64>(n) * cr(n as f64);
            assert!(matcore::max_abs(&(sum - target)) < 1e-9);
        }
    }

    #[test]
    fn spectrum_validation() {
        assert_eq!(Spectrum::<f64>::equally_spaced(2).values(), &[-1.0, 1.0]);
        assert_eq!(Spectrum::<f64>::equally_spaced(3).values(), &[-1.0, 0.0, 1.0]);
        assert!(matches!(Spectrum::new(vec![1.0, 1.0]), Err(Error::DegenerateSpectrum { .. })));
        assert!(matches!(Spectrum::new(vec![1.0, 0.0]), Err(Error::DegenerateSpectrum { .. })));
        assert!(Spectrum::new(vec![0.0, 2e-6]).is_ok());
    }

    #[test]
    fn random_observable_properties() {
        let mut rng = stream(3, 0);
        let k = random_nondegenerate_observable::<f64, _>(2, None, &mut rng).unwrap();
        let m = k.matrix();
        assert!(matcore::trace(&m).norm() < 1e-12);
        assert!(matcore::max_abs(&(&m * &m - matcore::identity::<f64>(2))) < 1e-9);

        let k3 = random_nondegenerate_observable::<f64, _>(3, None, &mut rng).unwrap();
        assert!(matcore::trace(&k3.matrix()).norm() < 1e-12);

        let spec = Spectrum::new(vec![-0.3, 0.1, 2.5, 4.0]).unwrap();
        let k4 = random_nondegenerate_observable::<f64, _>(4, Some(spec.clone()), &mut rng).unwrap();
        let eig = matcore::hermitian_eig(&k4.matrix()).unwrap();
        for (a, b) in eig.eigenvalues.iter().zip(spec.values()) {
            assert!((a - b).abs() < 1e-10);
        }
        assert!(random_nondegenerate_observable::<f64, _>(3, Some(spec), &mut rng).is_err());
    }
}
