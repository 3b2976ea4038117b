//! Seeded random streams and the Haar / Ginibre samplers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::matcore::CMatrix;
use crate::scalar::{c, Real, C};

/// Counter-based random stream; every trial owns one.
pub type Stream = ChaCha20Rng;

/// Stream number `index` of the family keyed by `master_seed`.
///
/// Streams are independent of each other and of the order in which they are
/// created, so parallel trials reproduce sequential ones exactly.
pub fn stream(master_seed: u64, index: u64) -> Stream {
    let mut rng = ChaCha20Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

/// Standard complex Gaussian entry (independent N(0,1) real and imaginary parts).
pub fn complex_gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R) -> C<T> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(T::lit(re), T::lit(im))
}

pub fn gaussian_matrix<T: Real, R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix<T> {
    // Row-major draw order so the stream layout does not depend on storage.
    let mut m = CMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = complex_gaussian(rng);
        }
    }
    m
}

/// Haar-random `n x n` unitary.
///
/// Orthonormalizes a complex Gaussian matrix column by column (Gram–Schmidt
/// with one re-orthogonalization pass). This is the QR factorization whose `R`
/// has a positive real diagonal, which is the phase fix that makes the law Haar.
pub fn haar_unitary<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix<T> {
    let mut q = gaussian_matrix::<T, R>(n, n, rng);
    for j in 0..n {
        for _pass in 0..2 {
            for k in 0..j {
                let proj = (0..n).fold(C::new(T::zero(), T::zero()), |acc, i| acc + q[(i, k)].conj() * q[(i, j)]);
                for i in 0..n {
                    let qik = q[(i, k)];
                    q[(i, j)] -= qik * proj;
                }
            }
        }
        let norm = q.column(j).iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt();
        let inv = C::new(T::one() / norm, T::zero());
        for i in 0..n {
            q[(i, j)] *= inv;
        }
    }
    q
}
