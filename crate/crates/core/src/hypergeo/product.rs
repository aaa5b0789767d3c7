use nalgebra::{DMatrix, DVector};

use super::polynomial::Polynomial;
use super::sff::{SffBlock, SffBlocks};
use crate::error::{Error, Result};
use crate::maslov::CoisotropicSubmanifold;
use crate::rng::{self};
use crate::scalar::{lit, to_f64, Real};
use crate::symplin::{AdaptedFrame, Subspace, SymplecticSpace};

/// `Y = L × C^m ⊂ C^p × C^m` with `L = {(x, ∇f(x))}` the Lagrangian graph of a
/// polynomial `f` on `R^p`. The leaves of `Y` are the copies of `L`, so
/// `dim T𝓕 = p`.
#[derive(Debug, Clone)]
pub struct LagrangianGraphProduct<T: Real> {
    space: SymplecticSpace<T>,
    f: Polynomial<T>,
    p: usize,
    m: usize,
    step: T,
}

impl<T: Real> LagrangianGraphProduct<T> {
    pub fn new(f: Polynomial<T>, m: usize) -> Result<Self> {
        let p = f.nvars();
        if p == 0 {
            return Err(Error::Argument("the Lagrangian factor needs at least one variable".into()));
        }
        Ok(Self { space: SymplecticSpace::new(p + m)?, f, p, m, step: lit(1e-4) })
    }

    /// Step of the finite-difference route.
    pub fn with_step(mut self, h: T) -> Self {
        self.step = h;
        self
    }

    pub fn leaf_dim(&self) -> usize {
        self.p
    }

    /// The point `(x + i∇f(x), w)` for `x ∈ R^p` and `w ∈ C^m` given as `(Re w, Im w)`.
    pub fn point(&self, x: &DVector<T>, w: &DVector<T>) -> DVector<T> {
        let n = self.p + self.m;
        let g = self.f.gradient(x);
        let mut out = DVector::zeros(2 * n);
        for i in 0..self.p {
            out[i] = x[i];
            out[n + i] = g[i];
        }
        for a in 0..self.m {
            out[self.p + a] = w[a];
            out[n + self.p + a] = w[self.m + a];
        }
        out
    }

    fn parameter(&self, q: &DVector<T>) -> DVector<T> {
        DVector::from_fn(self.p, |i, _| q[i])
    }

    pub fn sample_points(&self, count: usize, seed: u64) -> Vec<DVector<T>> {
        let mut g = rng::stream(seed, 0x1a9);
        (0..count)
            .map(|_| {
                let x = DVector::from_fn(self.p, |_, _| rng::normal::<T>(&mut g) * lit(0.5));
                let w = DVector::from_fn(2 * self.m, |_, _| rng::normal::<T>(&mut g));
                self.point(&x, &w)
            })
            .collect()
    }

    /// Coordinate tangent vectors `T_i = (e_i, Hess f · e_i)` of `L` as columns, and
    /// `G` with `T·G` orthonormal.
    fn leaf_tangents(&self, x: &DVector<T>) -> (DMatrix<T>, DMatrix<T>) {
        let n = self.p + self.m;
        let hf = self.f.hessian(x);
        let mut t = DMatrix::zeros(2 * n, self.p);
        for i in 0..self.p {
            t[(i, i)] = T::one();
            for j in 0..self.p {
                t[(n + j, i)] = hf[(j, i)];
            }
        }
        let r = t.clone().qr().r();
        let g = r.try_inverse().expect("graph tangents are independent");
        (t, g)
    }

    /// Adapted frame with `e_1..e_m` the `C^m` directions and `e_{m+1}..e_n` orthonormalized leaf tangents.
    pub fn frame(&self, q: &DVector<T>) -> Result<AdaptedFrame<T>> {
        let n = self.p + self.m;
        let (t, g) = self.leaf_tangents(&self.parameter(q));
        let mut e = DMatrix::zeros(2 * n, n);
        for a in 0..self.m {
            e[(self.p + a, a)] = T::one();
        }
        e.columns_mut(self.m, self.p).copy_from(&(t * g));
        AdaptedFrame::from_e(&self.space, e, self.m)
    }

    /// Closed form `S^γ(e_α, e_β) = Σ f_{ijl} G_{iα} G_{jβ} G_{lγ}` on leaf directions, zero elsewhere.
    pub fn sff_closed_form(&self, q: &DVector<T>) -> SffBlocks<T> {
        let (n, k) = (self.p + self.m, self.m);
        let x = self.parameter(q);
        let (_, g) = self.leaf_tangents(&x);
        let third = self.f.third(&x);
        let normals = (0..self.p)
            .map(|gm| {
                let mut a = DMatrix::zeros(n, n);
                for al in 0..self.p {
                    for be in 0..self.p {
                        let mut v = T::zero();
                        for i in 0..self.p {
                            for j in 0..self.p {
                                for l in 0..self.p {
                                    v += third[i][(j, l)] * g[(i, al)] * g[(j, be)] * g[(l, gm)];
                                }
                            }
                        }
                        a[(k + al, k + be)] = v;
                    }
                }
                SffBlock { a, b: DMatrix::zeros(n, k), c: DMatrix::zeros(k, n), d: DMatrix::zeros(k, k) }
            })
            .collect();
        SffBlocks { n, k, normals }
    }

    /// Second fundamental form from central second differences of the embedding.
    pub fn sff_numeric(&self, q: &DVector<T>) -> Result<SffBlocks<T>> {
        let frame = self.frame(q)?;
        let x = self.parameter(q);
        let h = self.step;
        let zero_w = DVector::zeros(2 * self.m);
        let phi = |d: &DVector<T>| self.point(&(&x + d), &zero_w);
        let unit = |i: usize| DVector::from_fn(self.p, |r, _| if r == i { h } else { T::zero() });
        let second: Vec<Vec<DVector<T>>> = (0..self.p)
            .map(|i| {
                (0..self.p)
                    .map(|j| {
                        let (a, b) = (unit(i), unit(j));
                        (phi(&(&a + &b)) - phi(&(&a - &b)) - phi(&(&b - &a)) + phi(&(-&a - &b))) / (lit::<T>(4.0) * h * h)
                    })
                    .collect()
            })
            .collect();
        let n = self.p + self.m;
        let normals: Vec<DVector<T>> = (self.m..n).map(|g| frame.f_col(g)).collect();
        let p = self.p;
        let blocks = SffBlocks::from_bilinear(&frame, |v: &DVector<T>, w: &DVector<T>| {
            // the x-coordinates of the L-part of a tangent vector are its coefficients on T_i
            let mut acc = DVector::zeros(2 * n);
            for i in 0..p {
                for j in 0..p {
                    acc += &second[i][j] * (v[i] * w[j]);
                }
            }
            normals.iter().fold(DVector::zeros(2 * n), |s, nu| s + nu * acc.dot(nu))
        });
        Ok(blocks)
    }
}

impl<T: Real> CoisotropicSubmanifold<T> for LagrangianGraphProduct<T> {
    fn space(&self) -> &SymplecticSpace<T> {
        &self.space
    }

    fn rank(&self) -> usize {
        self.m
    }

    fn off_surface(&self, q: &DVector<T>) -> T {
        let n = self.p + self.m;
        let g = self.f.gradient(&self.parameter(q));
        (0..self.p).fold(T::zero(), |m, i| m.max((q[n + i] - g[i]).abs()))
    }

    fn tangent_space(&self, q: &DVector<T>) -> Result<Subspace<T>> {
        let r = to_f64(self.off_surface(q));
        if r > self.space.tol().on_surface {
            return Err(Error::OffSurface { residual: r });
        }
        Ok(Subspace::span(&self.frame(q)?.tangent_basis()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplin::classify_coisotropic;

    fn cubic() -> Polynomial<f64> {
        // f = x³/3 + x y² + y³/6 − x²y/2
        Polynomial::new(2, vec![(1.0 / 3.0, vec![3, 0]), (1.0, vec![1, 2]), (1.0 / 6.0, vec![0, 3]), (-0.5, vec![2, 1])]).unwrap()
    }

    #[test]
    fn product_is_coisotropic_with_two_dimensional_leaves() {
        let y = LagrangianGraphProduct::new(cubic(), 1).unwrap();
        let q = &y.sample_points(1, 4)[0];
        let t = y.tangent_space(q).unwrap();
        let c = classify_coisotropic(y.space(), &t).unwrap();
        assert_eq!(c.k(), 1);
        assert_eq!(y.leaf_dim(), 2);
        y.frame(q).unwrap().check_adapted(y.space(), &c).unwrap();
    }

    #[test]
    fn closed_form_matches_finite_differences() {
        let y = LagrangianGraphProduct::new(cubic(), 1).unwrap();
        for q in y.sample_points(4, 8) {
            let a = y.sff_closed_form(&q);
            let b = y.sff_numeric(&q).unwrap();
            for (x, z) in a.normals.iter().zip(&b.normals) {
                assert!((&x.a - &z.a).amax() < 1e-6);
                assert!(z.b.amax() < 1e-6 && z.d.amax() < 1e-6);
            }
            assert!(a.leaf_symmetry_residual() < 1e-12);
            assert!(b.leaf_symmetry_residual() < 1e-6);
        }
    }
}
