//! Seeded random streams.
//!
//! Every stochastic routine draws from a ChaCha stream keyed by the user seed
//! and a stream id, so independent draws never share state and reruns repeat.

use nalgebra::{Complex, DMatrix};
use rand::{Rng as _, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::scalar::{lit, Real};

pub type Rng = ChaCha8Rng;

/// Stream `stream` of the generator keyed by `seed`.
pub fn stream(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Seed for the `index`-th independent sub-experiment of `seed`.
pub fn child_seed(seed: u64, index: u64) -> u64 {
    stream(seed, index).next_u64()
}

/// Integer uniform in `−bound..=bound`.
pub fn symmetric_int(rng: &mut Rng, bound: i64) -> i64 {
    rng.random_range(-bound..=bound)
}

pub fn normal<T: Real>(rng: &mut Rng) -> T {
    let x: f64 = StandardNormal.sample(rng);
    lit(x)
}

pub fn gaussian_matrix<T: Real>(rows: usize, cols: usize, rng: &mut Rng) -> DMatrix<T> {
    DMatrix::from_fn(rows, cols, |_, _| normal(rng))
}

pub fn complex_gaussian_matrix<T: Real>(rows: usize, cols: usize, rng: &mut Rng) -> DMatrix<Complex<T>> {
    DMatrix::from_fn(rows, cols, |_, _| Complex::new(normal(rng), normal(rng)))
}

/// Haar-distributed unitary matrix: QR of a complex Gaussian matrix with the
/// phases of `R`'s diagonal moved into `Q`.
pub fn random_unitary<T: Real>(n: usize, rng: &mut Rng) -> DMatrix<Complex<T>> {
    if n == 0 {
        return DMatrix::zeros(0, 0);
    }
    let z = complex_gaussian_matrix::<T>(n, n, rng);
    let qr = z.qr();
    let (mut q, r) = qr.unpack();
    for j in 0..n {
        let d = r[(j, j)];
        let norm = crate::scalar::cabs(d);
        if norm > T::zero() {
            let phase = d.unscale(norm);
            for i in 0..n {
                q[(i, j)] *= phase;
            }
        }
    }
    q
}

/// Haar-distributed real orthogonal matrix.
pub fn random_orthogonal<T: Real>(n: usize, rng: &mut Rng) -> DMatrix<T> {
    if n == 0 {
        return DMatrix::zeros(0, 0);
    }
    let z = gaussian_matrix::<T>(n, n, rng);
    let (mut q, r) = z.qr().unpack();
    for j in 0..n {
        if r[(j, j)] < T::zero() {
            for i in 0..n {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    q
}

/// Random skew-Hermitian matrix with Gaussian entries scaled by `scale`.
pub fn random_skew_hermitian<T: Real>(n: usize, scale: T, rng: &mut Rng) -> DMatrix<Complex<T>> {
    let z = complex_gaussian_matrix::<T>(n, n, rng);
    (&z - z.adjoint()).map(|c| c.scale(scale * lit(0.5)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: f64 = normal(&mut stream(7, 0));
        let b: f64 = normal(&mut stream(7, 0));
        let c: f64 = normal(&mut stream(7, 1));
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn random_unitary_is_unitary() {
        let u = random_unitary::<f64>(4, &mut stream(3, 0));
        let err = (u.adjoint() * &u - DMatrix::identity(4, 4)).norm();
        assert!(err < 1e-12, "{err}");
    }
}
