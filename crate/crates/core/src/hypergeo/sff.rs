use nalgebra::{DMatrix, DVector};

use super::surface::{tangent_splitting, LevelSetHypersurface, TangentSplitting};
use crate::error::{Error, Result};
use crate::scalar::{to_f64, Real};
use crate::symplin::{AdaptedFrame, SymplecticSpace};

/// Components of the second fundamental form along one normal `f_α` of an
/// adapted frame with `H`-part `e_1..e_k, f_1..f_k`, leaf directions
/// `e_{k+1}..e_n` and normals `f_{k+1}..f_n`.
///
/// `a[(j,l)] = S^α(e_j,e_l)` over all `n` e-directions, `b[(j,b)] = S^α(e_j,f_b)`,
/// `c[(b,j)] = S^α(f_b,e_j)` and `d[(b,c)] = S^α(f_b,f_c)` with `b,c ≤ k`.
/// The first argument is the direction of differentiation.
#[derive(Debug, Clone, PartialEq)]
pub struct SffBlock<T: Real> {
    pub a: DMatrix<T>,
    pub b: DMatrix<T>,
    pub c: DMatrix<T>,
    pub d: DMatrix<T>,
}

/// All blocks at one point in one frame; entry `i` belongs to the normal `f_{k+1+i}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SffBlocks<T: Real> {
    pub n: usize,
    pub k: usize,
    pub normals: Vec<SffBlock<T>>,
}

impl<T: Real> SffBlocks<T> {
    /// Evaluates a normal-valued bilinear form `s(v, w)` on the frame.
    pub fn from_bilinear(frame: &AdaptedFrame<T>, s: impl Fn(&DVector<T>, &DVector<T>) -> DVector<T>) -> Self {
        let (n, k) = (frame.n(), frame.k());
        let es: Vec<DVector<T>> = (0..n).map(|j| frame.e_col(j)).collect();
        let fs: Vec<DVector<T>> = (0..n).map(|j| frame.f_col(j)).collect();
        let ee: Vec<Vec<DVector<T>>> = es.iter().map(|v| es.iter().map(|w| s(v, w)).collect()).collect();
        let ef: Vec<Vec<DVector<T>>> = es.iter().map(|v| fs[..k].iter().map(|w| s(v, w)).collect()).collect();
        let fe: Vec<Vec<DVector<T>>> = fs[..k].iter().map(|v| es.iter().map(|w| s(v, w)).collect()).collect();
        let ff: Vec<Vec<DVector<T>>> = fs[..k].iter().map(|v| fs[..k].iter().map(|w| s(v, w)).collect()).collect();
        let normals = (k..n)
            .map(|al| {
                let nu = &fs[al];
                SffBlock {
                    a: DMatrix::from_fn(n, n, |j, l| ee[j][l].dot(nu)),
                    b: DMatrix::from_fn(n, k, |j, b| ef[j][b].dot(nu)),
                    c: DMatrix::from_fn(k, n, |b, j| fe[b][j].dot(nu)),
                    d: DMatrix::from_fn(k, k, |b, c| ff[b][c].dot(nu)),
                }
            })
            .collect();
        Self { n, k, normals }
    }

    /// The block of normal `f_α`, `α` counted from 0 over all `n` frame indices.
    pub fn normal(&self, alpha: usize) -> &SffBlock<T> {
        &self.normals[alpha - self.k]
    }

    /// Largest violation of `A = Aᵀ`, `D = Dᵀ`, `B = Cᵀ`.
    pub fn symmetry_residual(&self) -> T {
        let mut r = T::zero();
        for blk in &self.normals {
            r = r.max((&blk.a - blk.a.transpose()).amax());
            r = r.max((&blk.d - blk.d.transpose()).amax());
            r = r.max((&blk.b - blk.c.transpose()).amax());
        }
        r
    }

    pub fn check_symmetry(&self, tol: f64) -> Result<()> {
        let r = to_f64(self.symmetry_residual());
        if r > tol || !r.is_finite() {
            return Err(Error::NumericalQuality(format!("second fundamental form is asymmetric by {r:e}")));
        }
        Ok(())
    }

    /// `max |⟨S(X,Y),JZ⟩ − ⟨S(X,Z),JY⟩|` over leaf directions `X,Y,Z`.
    pub fn leaf_symmetry_residual(&self) -> T {
        let mut r = T::zero();
        for x in self.k..self.n {
            for y in self.k..self.n {
                for z in self.k..self.n {
                    r = r.max((self.normal(z).a[(x, y)] - self.normal(y).a[(x, z)]).abs());
                }
            }
        }
        r
    }

    /// Largest entry over all blocks.
    pub fn max_abs(&self) -> T {
        self.normals.iter().fold(T::zero(), |m, blk| m.max(blk.a.amax()).max(blk.b.amax()).max(blk.c.amax()).max(blk.d.amax()))
    }
}

/// Normal-valued second fundamental form `S(v,w) = −⟨Hess ρ v, w⟩/|∇ρ| · ν` of `Y`
/// at the splitting's point.
pub fn sff_vector<T: Real>(y: &LevelSetHypersurface<T>, split: &TangentSplitting<T>) -> impl Fn(&DVector<T>, &DVector<T>) -> DVector<T> {
    let hess = y.hessian(&split.point) / split.grad_norm;
    let nu = split.normal.clone();
    move |v: &DVector<T>, w: &DVector<T>| &nu * -(w.dot(&(&hess * v)))
}

/// Blocks of the second fundamental form in the splitting's frame, after a symmetry check.
pub fn second_fundamental_form<T: Real>(y: &LevelSetHypersurface<T>, split: &TangentSplitting<T>) -> Result<SffBlocks<T>> {
    let blocks = SffBlocks::from_bilinear(&split.frame, sff_vector(y, split));
    blocks.check_symmetry(y.space().tol().sff_symmetry)?;
    Ok(blocks)
}

/// Second fundamental form at `p` in the default frame.
pub fn second_fundamental_form_at<T: Real>(y: &LevelSetHypersurface<T>, p: &DVector<T>) -> Result<SffBlocks<T>> {
    second_fundamental_form(y, &tangent_splitting(y, p)?)
}

/// Leafwise mean curvature and its one-form.
#[derive(Debug, Clone, PartialEq)]
pub struct LeafwiseMeanCurvature<T: Real> {
    /// `H^∥ = Σ_β S(e_β, e_β)` over leaf directions.
    pub vector: DVector<T>,
    /// `α^∥ = ω(H^∥, ·)` on the tangent basis `e_1..e_n, f_1..f_k`.
    pub form: DVector<T>,
    /// The same values from `α^∥ = −Σ_β A^α_{ββ} e*_α`.
    pub frame_formula: DVector<T>,
    /// The same values from `−Σ_β A^β_{αβ} e*_α`.
    pub frame_formula_transposed: DVector<T>,
}

impl<T: Real> LeafwiseMeanCurvature<T> {
    /// Norm of `α^∥` on `T_pY` (the tangent basis is orthonormal).
    pub fn norm(&self) -> T {
        self.form.norm()
    }

    /// Largest disagreement between the contraction and either frame formula.
    pub fn consistency_residual(&self) -> T {
        (&self.form - &self.frame_formula).amax().max((&self.form - &self.frame_formula_transposed).amax())
    }
}

/// Leafwise mean curvature from blocks and a frame, for any coisotropic submanifold.
pub fn leafwise_mean_curvature_from_blocks<T: Real>(
    s: &SymplecticSpace<T>,
    frame: &AdaptedFrame<T>,
    blocks: &SffBlocks<T>,
) -> LeafwiseMeanCurvature<T> {
    let (n, k) = (blocks.n, blocks.k);
    let mut vector = DVector::zeros(s.dim());
    for al in k..n {
        let tr = (k..n).fold(T::zero(), |acc, be| acc + blocks.normal(al).a[(be, be)]);
        vector += frame.f_col(al) * tr;
    }
    let tangent = frame.tangent_basis();
    let form = DVector::from_fn(tangent.ncols(), |i, _| s.omega_of(&vector, &tangent.column(i).into_owned()));
    let mut frame_formula = DVector::zeros(tangent.ncols());
    let mut transposed = DVector::zeros(tangent.ncols());
    for al in k..n {
        frame_formula[al] = -(k..n).fold(T::zero(), |acc, be| acc + blocks.normal(al).a[(be, be)]);
        transposed[al] = -(k..n).fold(T::zero(), |acc, be| acc + blocks.normal(be).a[(al, be)]);
    }
    LeafwiseMeanCurvature { vector, form, frame_formula, frame_formula_transposed: transposed }
}

/// Leafwise mean curvature of `Y` at the splitting's point; fails when the two
/// frame formulas and the direct contraction disagree beyond 1e-6.
pub fn leafwise_mean_curvature<T: Real>(y: &LevelSetHypersurface<T>, split: &TangentSplitting<T>) -> Result<LeafwiseMeanCurvature<T>> {
    let blocks = second_fundamental_form(y, split)?;
    let h = leafwise_mean_curvature_from_blocks(y.space(), &split.frame, &blocks);
    let r = to_f64(h.consistency_residual());
    if r > 1e-6 {
        return Err(Error::Consistency(format!("leafwise mean curvature routes disagree by {r:e}")));
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::super::surface::{complex_ellipsoid, cylinder, hyperplane, sphere};
    use super::*;
    use crate::symplin::SymplecticSpace;

    fn sp(n: usize) -> SymplecticSpace<f64> {
        SymplecticSpace::new(n).unwrap()
    }

    #[test]
    fn hyperplane_is_flat() {
        let s = sp(2);
        let y = hyperplane(&s);
        let b = second_fundamental_form_at(&y, &s.e(0)).unwrap();
        assert_eq!(b.max_abs(), 0.0);
        let h = leafwise_mean_curvature(&y, &tangent_splitting(&y, &s.e(0)).unwrap()).unwrap();
        assert_eq!(h.norm(), 0.0);
    }

    #[test]
    fn unit_sphere_blocks_are_identities() {
        let s = sp(2);
        let y = sphere(&s, 1.0);
        let split = tangent_splitting(&y, &s.e(0)).unwrap();
        let b = second_fundamental_form(&y, &split).unwrap();
        let blk = b.normal(1);
        assert!((&blk.a - DMatrix::identity(2, 2)).amax() < 1e-14);
        assert!((&blk.d - DMatrix::identity(1, 1)).amax() < 1e-14);
        assert!(blk.b.amax() < 1e-14);
        // along ν the coefficient is −⟨v,w⟩
        let sv = sff_vector(&y, &split);
        let v = s.e(1);
        assert!((sv(&v, &v).dot(&split.normal) + 1.0).abs() < 1e-14);
        let h = leafwise_mean_curvature(&y, &split).unwrap();
        assert!((&h.vector + &split.normal).norm() < 1e-14);
        assert!((h.form[1].abs() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn sphere_radius_scaling() {
        let s = sp(2);
        let y = sphere(&s, 2.5);
        let p = &y.sample_points(1, 9).unwrap()[0];
        let h = leafwise_mean_curvature(&y, &tangent_splitting(&y, p).unwrap()).unwrap();
        assert!((h.norm() - 0.4).abs() < 1e-12);
    }

    #[test]
    fn cylinder_curvature_in_first_plane() {
        let s = sp(2);
        let y = cylinder(&s);
        let split = tangent_splitting(&y, &s.e(0)).unwrap();
        let h = leafwise_mean_curvature(&y, &split).unwrap();
        assert!((h.norm() - 1.0).abs() < 1e-14);
        let b = second_fundamental_form(&y, &split).unwrap();
        assert!(b.normal(1).d.amax() < 1e-14);
    }

    #[test]
    fn ellipsoid_axis_point_matches_principal_curvatures() {
        // at (a,0,0,0) on x²/a² + y²/b² + … the principal curvatures along the
        // other axes are a/b_i²
        let s = sp(2);
        let axes = [1.5, 1.1];
        let y = complex_ellipsoid(&s, &axes).unwrap();
        let p = s.e(0) * axes[0];
        let split = tangent_splitting(&y, &p).unwrap();
        let sv = sff_vector(&y, &split);
        for (dir, ax) in [(s.f(0), axes[0]), (s.e(1), axes[1]), (s.f(1), axes[1])] {
            let kappa = sv(&dir, &dir).dot(&split.normal);
            assert!((kappa + axes[0] / (ax * ax)).abs() < 1e-12, "{kappa}");
        }
    }
}
