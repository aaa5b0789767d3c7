use nalgebra::DMatrix;

use super::{classify_coisotropic, CoisotropicSubspace, Subspace, SymplecticSpace};
use crate::error::{Error, Result};
use crate::linalg;
use crate::rng;
use crate::scalar::Real;

/// `U · (C^k ⊕ R^{n−k})` for a Haar-random unitary `U` drawn from `seed`.
pub fn random_coisotropic<T: Real>(s: &SymplecticSpace<T>, k: usize, seed: u64) -> Result<CoisotropicSubspace<T>> {
    let n = s.n();
    if k > n {
        return Err(Error::Argument(format!("rank {k} exceeds the complex dimension {n}")));
    }
    let u = rng::random_unitary::<T>(n, &mut rng::stream(seed, 0));
    let r = linalg::realify(&u);
    let mut basis = DMatrix::zeros(2 * n, n + k);
    basis.columns_mut(0, n).copy_from(&r.columns(0, n));
    basis.columns_mut(n, k).copy_from(&r.columns(n, k));
    let c = Subspace::from_orthonormal(basis, s.tol())?;
    classify_coisotropic(s, &c)
}

/// Orthonormal basis of the Lagrangian `U · R^n`.
pub fn random_lagrangian_basis<T: Real>(n: usize, seed: u64) -> DMatrix<T> {
    let u = rng::random_unitary::<T>(n, &mut rng::stream(seed, 0));
    linalg::realify(&u).columns(0, n).into_owned()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_rank_gives_whole_space() {
        let s = SymplecticSpace::<f64>::new(3).unwrap();
        let c = random_coisotropic(&s, 3, 4).unwrap();
        assert!(c.space().same_span(&Subspace::whole(6), s.tol()));
        assert_eq!(c.kernel().dim(), 0);
    }

    #[test]
    fn rank_zero_gives_lagrangian() {
        let s = SymplecticSpace::<f64>::new(3).unwrap();
        let c = random_coisotropic(&s, 0, 9).unwrap();
        assert!(c.kernel().same_span(c.space(), s.tol()));
    }

    #[test]
    fn deterministic_per_seed() {
        let s = SymplecticSpace::<f64>::new(2).unwrap();
        let a = random_coisotropic(&s, 1, 21).unwrap();
        let b = random_coisotropic(&s, 1, 21).unwrap();
        let c = random_coisotropic(&s, 1, 22).unwrap();
        assert_eq!(a.space(), b.space());
        assert_ne!(a.space(), c.space());
    }
}
