//! Independent reference computations used to validate the main routines.
//! They share only dense linear algebra with the code they check.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::{lit, to_f64, Real};
use crate::symplin::{Subspace, SymplecticSpace};

fn flatten<T: Real>(m: &DMatrix<T>) -> DVector<T> {
    DVector::from_column_slice(m.as_slice())
}

fn numeric_rank(cols: &[DVector<f64>], rel: f64) -> usize {
    let m = DMatrix::from_columns(cols);
    let s = linalg::singular_values(&m);
    let top = s.first().copied().unwrap_or(0.0);
    s.iter().filter(|&&x| x > rel * top).count()
}

/// Rank of the tangent space of the coisotropic Grassmannian at `c`, measured as
/// the span of finite-difference velocities `d/dt exp(tX) c` over a basis of
/// `sp(2n)`, each projected to `Hom(c, c^⊥)`.
pub fn tangent_rank_orbit(s: &SymplecticSpace<f64>, c: &Subspace<f64>) -> usize {
    let m = s.dim();
    let b = c.basis();
    let perp = DMatrix::identity(m, m) - b * b.transpose();
    let h = 1e-4;
    let mut vel = Vec::new();
    for i in 0..m {
        for j in i..m {
            let mut sym = DMatrix::zeros(m, m);
            sym[(i, j)] = 1.0;
            sym[(j, i)] = 1.0;
            let x = -(s.omega() * sym);
            let fwd = (&x * h).exp() * b;
            let bwd = (&x * -h).exp() * b;
            vel.push(flatten(&(&perp * ((fwd - bwd) / (2.0 * h)))));
        }
    }
    numeric_rank(&vel, 1e-7)
}

/// Tangent dimension from the linearized constraint: velocities `Z` with `BᵀZ = 0`
/// subject to `N_Kᵀ (ZᵀΩB + BᵀΩZ) N_K = 0`, where `N_K` spans the kernel of `BᵀΩB`.
pub fn tangent_rank_constraints(s: &SymplecticSpace<f64>, c: &Subspace<f64>) -> Result<usize> {
    let m = s.dim();
    let b = c.basis();
    let d = b.ncols();
    let form = b.transpose() * s.omega() * b;
    let nk = linalg::null_space(&form, 1e-9, 1e-3)?;
    let comp = c.orthogonal_complement();
    let q = comp.basis();
    let r = q.ncols();
    let mut images = Vec::new();
    for a in 0..r {
        for col in 0..d {
            let mut z = DMatrix::zeros(m, d);
            z.set_column(col, &q.column(a));
            let lin = z.transpose() * s.omega() * b + b.transpose() * s.omega() * &z;
            images.push(flatten(&(nk.transpose() * lin * &nk)));
        }
    }
    let rank = if images.iter().all(|v| v.amax() < 1e-12) { 0 } else { numeric_rank(&images, 1e-9) };
    Ok(r * d - rank)
}

/// Classical Maslov index of a closed loop of Lagrangian subspaces given by
/// bases `(X; Y)`: the winding of `det(X + iY)² / |det(X + iY)|²`.
pub fn classical_maslov<T: Real>(bases: &[DMatrix<T>]) -> Result<i64> {
    if bases.is_empty() {
        return Err(Error::Argument("empty loop".into()));
    }
    let n = bases[0].ncols();
    let phase = |b: &DMatrix<T>| -> Result<Complex<f64>> {
        let u = DMatrix::from_fn(n, n, |i, j| Complex::new(to_f64(b[(i, j)]), to_f64(b[(n + i, j)])));
        let d = u.determinant();
        let d2 = d * d;
        if d2.norm() < 1e-14 {
            return Err(Error::Degenerate("basis is not Lagrangian-transverse to iR^n".into()));
        }
        Ok(d2 / d2.norm())
    };
    let ph: Result<Vec<Complex<f64>>> = bases.iter().map(phase).collect();
    let ph = ph?;
    let mut total = 0.0;
    for i in 0..ph.len() {
        let step = (ph[(i + 1) % ph.len()] * ph[i].conj()).arg();
        if step.abs() > std::f64::consts::FRAC_PI_2 {
            return Err(Error::Aliasing { index: i, jump: step });
        }
        total += step;
    }
    let w = total / std::f64::consts::TAU;
    let r = w.round();
    if (w - r).abs() > 0.05 {
        return Err(Error::Closure { residual: (w - r).abs() });
    }
    Ok(r as i64)
}

/// Normal curvature `⟨c''(0), ν⟩` of the curve on `{ρ = 1}` through `p` with
/// velocity `v`, built by solving `ρ(p + tv + s(t)ν) = 1` for `s` and taking a
/// second difference. Only values of `ρ` are used.
pub fn curve_normal_curvature<T: Real>(
    rho: &dyn Fn(&DVector<T>) -> T,
    p: &DVector<T>,
    nu: &DVector<T>,
    v: &DVector<T>,
    t: T,
) -> Result<T> {
    let solve = |tt: T| -> Result<T> {
        let f = |s: T| rho(&(p + v * tt + nu * s)) - T::one();
        let mut s = T::zero();
        let ds: T = lit(1e-7);
        for _ in 0..50 {
            let val = f(s);
            if to_f64(val.abs()) < 1e-15 {
                return Ok(s);
            }
            let slope = (f(s + ds) - f(s - ds)) / (ds * lit(2.0));
            if to_f64(slope.abs()) < 1e-12 {
                break;
            }
            s -= val / slope;
        }
        if to_f64(f(s).abs()) < 1e-13 {
            Ok(s)
        } else {
            Err(Error::NumericalQuality("curve projection did not converge".into()))
        }
    };
    let (sp, s0, sm) = (solve(t)?, solve(T::zero())?, solve(-t)?);
    Ok((sp - s0 * lit(2.0) + sm) / (t * t))
}

/// `⟨S(v,w), ν⟩` by polarization of [`curve_normal_curvature`].
pub fn curve_sff<T: Real>(rho: &dyn Fn(&DVector<T>) -> T, p: &DVector<T>, nu: &DVector<T>, v: &DVector<T>, w: &DVector<T>, t: T) -> Result<T> {
    let plus = curve_normal_curvature(rho, p, nu, &(v + w), t)?;
    let minus = curve_normal_curvature(rho, p, nu, &(v - w), t)?;
    Ok((plus - minus) / lit(4.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplin::{grassmannian_dim, random_coisotropic, random_lagrangian_basis};

    #[test]
    fn tangent_ranks_match_the_dimension_formula() {
        for (n, k) in [(1, 0), (2, 0), (2, 1), (3, 1)] {
            let s = SymplecticSpace::new(n).unwrap();
            let c = random_coisotropic(&s, k, 7).unwrap();
            let want = grassmannian_dim(n, k).unwrap();
            assert_eq!(tangent_rank_orbit(&s, c.space()), want);
            assert_eq!(tangent_rank_constraints(&s, c.space()).unwrap(), want);
        }
    }

    #[test]
    fn classical_index_of_rotation() {
        for n in 1..=3 {
            let bases: Vec<DMatrix<f64>> = (0..64)
                .map(|i| {
                    let t = std::f64::consts::PI * i as f64 / 64.0;
                    let mut b = DMatrix::zeros(2 * n, n);
                    for j in 0..n {
                        b[(j, j)] = t.cos();
                        b[(n + j, j)] = t.sin();
                    }
                    b
                })
                .collect();
            assert_eq!(classical_maslov(&bases).unwrap(), n as i64);
        }
        let b = random_lagrangian_basis::<f64>(2, 3);
        assert_eq!(classical_maslov(&vec![b; 8]).unwrap(), 0);
    }

    #[test]
    fn curve_curvature_of_great_circles() {
        let rho = |x: &DVector<f64>| x.norm();
        let p = DVector::from_vec(vec![1.0, 0.0, 0.0, 0.0]);
        let v = DVector::from_vec(vec![0.0, 0.3, 0.4, 0.0]);
        let w = DVector::from_vec(vec![0.0, 0.0, 0.0, 1.0]);
        let k = curve_normal_curvature(&rho, &p, &p, &v, 1e-3).unwrap();
        assert!((k + 0.25).abs() < 1e-6);
        assert!(curve_sff(&rho, &p, &p, &v, &w, 1e-3).unwrap().abs() < 1e-6);
    }
}
