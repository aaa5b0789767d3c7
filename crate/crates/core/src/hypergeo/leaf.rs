use nalgebra::DVector;

use super::sff::second_fundamental_form;
use super::surface::{LevelSetHypersurface, TangentSplitting};
use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

/// Curvature of the characteristic leaf through a point, inside `Y`, in
/// `(e_1..e_k, f_1..f_k)` coordinates of `N_J𝓕`.
#[derive(Debug, Clone, PartialEq)]
pub struct LeafMinimality<T: Real> {
    pub minimal: bool,
    /// Second difference of the flow of `X_ρ`, projected onto `N_J𝓕`.
    pub flow_curvature: DVector<T>,
    /// `(−C_{b,n})_b` followed by `(A_{b,n})_b`, from the second fundamental form.
    pub frame_curvature: DVector<T>,
    /// Largest coordinate difference between the two routes.
    pub residual: T,
}

fn rk4_step<T: Real>(y: &LevelSetHypersurface<T>, x: &DVector<T>, h: T) -> Result<DVector<T>> {
    let field = |q: &DVector<T>| y.characteristic(q);
    let two = lit::<T>(2.0);
    let k1 = field(x)?;
    let k2 = field(&(x + &k1 * (h / two)))?;
    let k3 = field(&(x + &k2 * (h / two)))?;
    let k4 = field(&(x + &k3 * h))?;
    Ok(x + (k1 + k2 * two + k3 * two + k4) * (h / lit::<T>(6.0)))
}

/// Tests whether the leaf of the characteristic foliation through the
/// splitting's point is a geodesic of `Y`, by two routes.
pub fn leaf_minimality<T: Real>(y: &LevelSetHypersurface<T>, split: &TangentSplitting<T>) -> Result<LeafMinimality<T>> {
    let tol = y.space().tol();
    let h: T = lit(tol.flow_step);
    let p = &split.point;
    let fwd = rk4_step(y, p, h)?;
    let bwd = rk4_step(y, p, -h)?;
    let acc = (&fwd + &bwd - p * lit::<T>(2.0)) / (h * h);
    if !acc.iter().all(|x| to_f64(*x).is_finite()) {
        return Err(Error::NumericalQuality("leaf flow integration diverged".into()));
    }
    let frame = &split.frame;
    let k = frame.k();
    let n = frame.n();
    let flow = DVector::from_fn(2 * k, |i, _| if i < k { acc.dot(&frame.e_col(i)) } else { acc.dot(&frame.f_col(i - k)) });
    let blocks = second_fundamental_form(y, split)?;
    let blk = blocks.normal(n - 1);
    let formula = DVector::from_fn(2 * k, |i, _| if i < k { -blk.c[(i, n - 1)] } else { blk.a[(i - k, n - 1)] });
    let residual = (&flow - &formula).amax();
    if to_f64(residual) > 1e-4 {
        return Err(Error::Consistency(format!("leaf curvature routes disagree by {:e}", to_f64(residual))));
    }
    let minimal = to_f64(flow.norm()) < tol.minimality;
    Ok(LeafMinimality { minimal, flow_curvature: flow, frame_curvature: formula, residual })
}

#[cfg(test)]
mod tests {
    use super::super::surface::{complex_ellipsoid, hyperplane, sphere, tangent_splitting};
    use super::*;
    use crate::symplin::SymplecticSpace;

    #[test]
    fn fixtures() {
        let s = SymplecticSpace::<f64>::new(2).unwrap();
        let yh = hyperplane(&s);
        let p = yh.sample_points(1, 1).unwrap().remove(0);
        assert!(leaf_minimality(&yh, &tangent_splitting(&yh, &p).unwrap()).unwrap().minimal);
        let ys = sphere(&s, 1.0);
        for p in ys.sample_points(4, 2).unwrap() {
            let m = leaf_minimality(&ys, &tangent_splitting(&ys, &p).unwrap()).unwrap();
            assert!(m.minimal && m.flow_curvature.norm() < 1e-5);
        }
        let ye = complex_ellipsoid(&s, &[1.0, 1.3]).unwrap();
        let p = ye.sample_points(1, 3).unwrap().remove(0);
        let m = leaf_minimality(&ye, &tangent_splitting(&ye, &p).unwrap()).unwrap();
        assert!(!m.minimal && m.flow_curvature.norm() > 1e-2);
    }
}
