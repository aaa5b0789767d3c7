use nalgebra::{Complex, DMatrix, DVector};

use super::{CoisotropicSubspace, SymplecticSpace};
use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::{lit, to_f64, Real};

/// Orthonormal Darboux frame `(e_1..e_n, f_1..f_n)` with `f_i = J e_i`, adapted to
/// a coisotropic subspace: `e_1..e_k, f_1..f_k` span `H_C` and `e_{k+1}..e_n` span
/// the kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptedFrame<T: Real> {
    k: usize,
    e: DMatrix<T>,
    f: DMatrix<T>,
}

impl<T: Real> AdaptedFrame<T> {
    /// Builds the frame from its `e` columns; `f = J e`.
    pub fn from_e(s: &SymplecticSpace<T>, e: DMatrix<T>, k: usize) -> Result<Self> {
        if e.nrows() != s.dim() || e.ncols() != s.n() || k > s.n() {
            return Err(Error::Argument("frame has the wrong shape".into()));
        }
        let f = s.apply_j_columns(&e);
        Ok(Self { k, e, f })
    }

    /// Frame whose `j`-th unitary vector is column `j` of `u`.
    pub fn from_unitary(u: &DMatrix<Complex<T>>, k: usize) -> Self {
        let n = u.nrows();
        let e = DMatrix::from_fn(2 * n, n, |i, j| if i < n { u[(i, j)].re } else { u[(i - n, j)].im });
        let f = DMatrix::from_fn(2 * n, n, |i, j| if i < n { -u[(i, j)].im } else { u[(i - n, j)].re });
        Self { k, e, f }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.e.ncols()
    }

    pub fn e(&self) -> &DMatrix<T> {
        &self.e
    }

    pub fn f(&self) -> &DMatrix<T> {
        &self.f
    }

    pub fn e_col(&self, j: usize) -> DVector<T> {
        self.e.column(j).into_owned()
    }

    pub fn f_col(&self, j: usize) -> DVector<T> {
        self.f.column(j).into_owned()
    }

    /// Unitary frame matrix: column `j` is `e_j` read as a vector of `C^n`.
    pub fn unitary(&self) -> DMatrix<Complex<T>> {
        linalg::columns_to_complex(&self.e)
    }

    /// The first `k` columns of [`Self::unitary`].
    pub fn h_unitary(&self) -> DMatrix<Complex<T>> {
        self.unitary().columns(0, self.k).into_owned()
    }

    /// The last `n − k` columns of [`Self::unitary`].
    pub fn kernel_unitary(&self) -> DMatrix<Complex<T>> {
        let n = self.n();
        self.unitary().columns(self.k, n - self.k).into_owned()
    }

    /// `(e_1..e_k, f_1..f_k)` as columns.
    pub fn h_basis(&self) -> DMatrix<T> {
        let k = self.k;
        let mut m = DMatrix::zeros(self.e.nrows(), 2 * k);
        m.columns_mut(0, k).copy_from(&self.e.columns(0, k));
        m.columns_mut(k, k).copy_from(&self.f.columns(0, k));
        m
    }

    /// `(e_{k+1}..e_n)` as columns.
    pub fn kernel_basis(&self) -> DMatrix<T> {
        self.e.columns(self.k, self.n() - self.k).into_owned()
    }

    /// `(e_1..e_n, f_1..f_k)`, a basis of the adapted subspace.
    pub fn tangent_basis(&self) -> DMatrix<T> {
        let (n, k) = (self.n(), self.k);
        let mut m = DMatrix::zeros(self.e.nrows(), n + k);
        m.columns_mut(0, n).copy_from(&self.e);
        m.columns_mut(n, k).copy_from(&self.f.columns(0, k));
        m
    }

    /// Largest deviation from the Darboux and orthonormality relations.
    pub fn darboux_defect(&self, s: &SymplecticSpace<T>) -> T {
        let n = self.n();
        let id = DMatrix::<T>::identity(n, n);
        let om = s.omega();
        let ef = self.e.transpose() * om * &self.f - &id;
        let ee = self.e.transpose() * om * &self.e;
        let ff = self.f.transpose() * om * &self.f;
        let mut full = DMatrix::zeros(2 * n, 2 * n);
        full.columns_mut(0, n).copy_from(&self.e);
        full.columns_mut(n, n).copy_from(&self.f);
        let orth = linalg::orthonormality_defect(&full);
        let jdef = linalg::max_abs(&(s.apply_j_columns(&self.e) - &self.f));
        [linalg::max_abs(&ef), linalg::max_abs(&ee), linalg::max_abs(&ff), orth, jdef]
            .into_iter()
            .fold(T::zero(), |a, b| a.max(b))
    }

    /// Checks the Darboux relations and that the frame is adapted to `c`.
    pub fn check_adapted(&self, s: &SymplecticSpace<T>, c: &CoisotropicSubspace<T>) -> Result<()> {
        let tol = s.tol();
        if self.k != c.k() {
            return Err(Error::Argument(format!("frame rank {} differs from subspace rank {}", self.k, c.k())));
        }
        let d = to_f64(self.darboux_defect(s));
        if d > tol.darboux {
            return Err(Error::Consistency(format!("frame violates the Darboux relations by {d:e}")));
        }
        let bound = tol.subspace_angle.sin().max(tol.darboux);
        let h = super::Subspace::span(&self.h_basis());
        let kern = super::Subspace::span(&self.kernel_basis());
        let rh = to_f64(c.h_part().containment_residual(&h));
        let rk = to_f64(c.kernel().containment_residual(&kern));
        if rh > bound || rk > bound {
            return Err(Error::Consistency(format!("frame is not adapted (residuals {rh:e}, {rk:e})")));
        }
        Ok(())
    }

    /// The frame `U · diag(v, o)`: `v ∈ U(k)` acts on the `H_C` part and `o ∈ O(n−k)`
    /// on the kernel part.
    pub fn reframed(&self, v: &DMatrix<Complex<T>>, o: &DMatrix<T>) -> Result<Self> {
        let (n, k) = (self.n(), self.k);
        if v.shape() != (k, k) || o.shape() != (n - k, n - k) {
            return Err(Error::Argument("reframing blocks have the wrong shape".into()));
        }
        let mut block = DMatrix::<Complex<T>>::zeros(n, n);
        block.view_mut((0, 0), (k, k)).copy_from(v);
        block.view_mut((k, k), (n - k, n - k)).copy_from(&o.map(|x| Complex::new(x, T::zero())));
        Ok(Self::from_unitary(&(self.unitary() * block), k))
    }

    /// Largest Euclidean distance between corresponding `e` columns.
    pub fn distance(&self, other: &Self) -> T {
        (0..self.n()).fold(T::zero(), |acc, j| acc.max((self.e.column(j) - other.e.column(j)).norm()))
    }

    /// `U_selfᴴ U_other`, the unitary change of frame from `self` to `other`.
    pub fn transition_to(&self, other: &Self) -> DMatrix<Complex<T>> {
        self.unitary().adjoint() * other.unitary()
    }
}

/// Picks `count` orthonormal vectors from the residuals of `candidates`, largest
/// residual first (lowest index on ties). With `complex` set, each chosen vector
/// also removes its `J`-image from later candidates.
pub(crate) fn pivoted_gram_schmidt<T: Real>(
    s: &SymplecticSpace<T>,
    candidates: &[DVector<T>],
    count: usize,
    complex: bool,
) -> Result<Vec<DVector<T>>> {
    let mut chosen: Vec<DVector<T>> = Vec::new();
    let mut span: Vec<DVector<T>> = Vec::new();
    let mut resid: Vec<DVector<T>> = candidates.to_vec();
    while chosen.len() < count {
        let norms: Vec<T> = resid.iter().map(|r| r.norm()).collect();
        let best = norms.iter().fold(T::zero(), |a, &b| a.max(b));
        if to_f64(best) < 1e-8 {
            return Err(Error::Consistency("frame candidates do not span the target".into()));
        }
        let cut = best * lit(1.0 - 1e-9);
        let idx = norms.iter().position(|&x| x >= cut).expect("a maximum exists");
        let mut v = resid[idx].clone();
        for _ in 0..2 {
            for q in &span {
                let c = q.dot(&v);
                v -= q * c;
            }
        }
        let v = v.normalize();
        span.push(v.clone());
        if complex {
            span.push(s.apply_j(&v));
        }
        let new: Vec<DVector<T>> = span[span.len() - if complex { 2 } else { 1 }..].to_vec();
        for r in resid.iter_mut() {
            for q in &new {
                let c = q.dot(r);
                *r -= q * c;
            }
        }
        chosen.push(v);
    }
    Ok(chosen)
}

/// Projects each hint column onto the target, orthonormalizes in order, and
/// fails when a column loses too much norm.
fn hinted_gram_schmidt<T: Real>(
    s: &SymplecticSpace<T>,
    projector: &DMatrix<T>,
    hints: &[DVector<T>],
    offset: usize,
    complex: bool,
) -> Result<Vec<DVector<T>>> {
    let floor = s.tol().hint_projection;
    let mut span: Vec<DVector<T>> = Vec::new();
    let mut out = Vec::new();
    for (i, h) in hints.iter().enumerate() {
        let mut v = projector * h;
        for _ in 0..2 {
            for q in &span {
                let c = q.dot(&v);
                v -= q * c;
            }
        }
        let norm = to_f64(v.norm());
        if norm < floor {
            return Err(Error::ContinuityLoss { column: offset + i, norm });
        }
        let v = v.normalize();
        span.push(v.clone());
        if complex {
            span.push(s.apply_j(&v));
        }
        out.push(v);
    }
    Ok(out)
}

/// An adapted frame of `c`. Without a hint the frame is built from projected
/// standard basis vectors; with a hint, the hint's columns are projected and
/// re-orthonormalized in order, which keeps the frame close to the hint.
pub fn adapted_frame<T: Real>(
    s: &SymplecticSpace<T>,
    c: &CoisotropicSubspace<T>,
    hint: Option<&AdaptedFrame<T>>,
) -> Result<AdaptedFrame<T>> {
    let n = s.n();
    let k = c.k();
    let ph = c.h_part().projector();
    let pk = c.kernel().projector();
    let (h, kern) = match hint {
        None => {
            let std: Vec<DVector<T>> = (0..2 * n).map(|i| unit(2 * n, i)).collect();
            let hc: Vec<DVector<T>> = std.iter().map(|v| &ph * v).collect();
            let kc: Vec<DVector<T>> = std.iter().map(|v| &pk * v).collect();
            (pivoted_gram_schmidt(s, &hc, k, true)?, pivoted_gram_schmidt(s, &kc, n - k, false)?)
        }
        Some(hint) => {
            if hint.n() != n || hint.k() != k {
                return Err(Error::Argument("hint frame has a different shape".into()));
            }
            let hh: Vec<DVector<T>> = (0..k).map(|a| hint.e_col(a)).collect();
            let hk: Vec<DVector<T>> = (k..n).map(|a| hint.e_col(a)).collect();
            (hinted_gram_schmidt(s, &ph, &hh, 0, true)?, hinted_gram_schmidt(s, &pk, &hk, k, false)?)
        }
    };
    let cols: Vec<DVector<T>> = h.into_iter().chain(kern).collect();
    let e = DMatrix::from_columns(&cols);
    let frame = AdaptedFrame::from_e(s, e, k)?;
    let d = to_f64(frame.darboux_defect(s));
    if d > s.tol().darboux {
        return Err(Error::Consistency(format!("constructed frame violates the Darboux relations by {d:e}")));
    }
    Ok(frame)
}

fn unit<T: Real>(m: usize, i: usize) -> DVector<T> {
    DVector::from_fn(m, |r, _| if r == i { T::one() } else { T::zero() })
}

#[cfg(test)]
mod tests {
    use super::super::{classify_coisotropic, standard_model, Subspace};
    use super::*;
    use crate::rng;

    #[test]
    fn standard_model_gets_standard_frame() {
        let s = SymplecticSpace::<f64>::new(2).unwrap();
        let c = standard_model(&s, 1).unwrap();
        let fr = adapted_frame(&s, &c, None).unwrap();
        assert!((fr.e() - DMatrix::from_columns(&[s.e(0), s.e(1)])).amax() < 1e-14);
        assert!((fr.f() - DMatrix::from_columns(&[s.f(0), s.f(1)])).amax() < 1e-14);
    }

    #[test]
    fn valid_hint_is_a_fixed_point() {
        let s = SymplecticSpace::<f64>::new(3).unwrap();
        let c = super::super::random_coisotropic(&s, 1, 11).unwrap();
        let fr = adapted_frame(&s, &c, None).unwrap();
        let again = adapted_frame(&s, &c, Some(&fr)).unwrap();
        assert!(fr.distance(&again) < 1e-12);
        assert!(fr.darboux_defect(&s) < 1e-12);
        fr.check_adapted(&s, &c).unwrap();
    }

    #[test]
    fn small_rotation_moves_frame_little() {
        let s = SymplecticSpace::<f64>::new(2).unwrap();
        let c0 = standard_model(&s, 1).unwrap();
        let f0 = adapted_frame(&s, &c0, None).unwrap();
        let eps = 1e-3f64;
        let rot = DMatrix::from_diagonal(&DVector::from_vec(vec![
            Complex::new(eps.cos(), eps.sin()),
            Complex::new(eps.cos(), eps.sin()),
        ]));
        let r = linalg::realify(&rot);
        let c1 = classify_coisotropic(&s, &Subspace::span(&(r * c0.space().basis()))).unwrap();
        let f1 = adapted_frame(&s, &c1, Some(&f0)).unwrap();
        assert!(f1.distance(&f0) < 2e-3);
        f1.check_adapted(&s, &c1).unwrap();
    }

    #[test]
    fn orthogonal_hint_loses_continuity() {
        let s = SymplecticSpace::<f64>::new(1).unwrap();
        let c = classify_coisotropic(&s, &Subspace::span(&DMatrix::from_columns(&[s.e(0)]))).unwrap();
        let fr = adapted_frame(&s, &c, None).unwrap();
        let c2 = classify_coisotropic(&s, &Subspace::span(&DMatrix::from_columns(&[s.f(0)]))).unwrap();
        assert!(matches!(adapted_frame(&s, &c2, Some(&fr)), Err(Error::ContinuityLoss { column: 0, .. })));
    }

    #[test]
    fn reframing_keeps_adaptedness() {
        let s = SymplecticSpace::<f64>::new(3).unwrap();
        let c = super::super::random_coisotropic(&s, 2, 5).unwrap();
        let fr = adapted_frame(&s, &c, None).unwrap();
        let mut g = rng::stream(1, 0);
        let v = rng::random_unitary(2, &mut g);
        let o = rng::random_orthogonal(1, &mut g);
        let r = fr.reframed(&v, &o).unwrap();
        r.check_adapted(&s, &c).unwrap();
        let t = fr.transition_to(&r);
        assert!((t.view((0, 0), (2, 2)) - &v).norm() < 1e-12);
    }
}
