use std::fmt;
use std::sync::Arc;

use nalgebra::{Complex, DMatrix, DVector};

use super::polynomial::Polynomial;
use crate::error::{Error, Result};
use crate::linalg;
use crate::maslov::CoisotropicSubmanifold;
use crate::rng::{self, Rng};
use crate::scalar::{lit, to_f64, Real};
use crate::symplin::{pivoted_gram_schmidt, AdaptedFrame, Subspace, SymplecticSpace};

pub type ScalarField<T> = Arc<dyn Fn(&DVector<T>) -> T + Send + Sync>;
pub type VectorField<T> = Arc<dyn Fn(&DVector<T>) -> DVector<T> + Send + Sync>;
pub type MatrixField<T> = Arc<dyn Fn(&DVector<T>) -> DMatrix<T> + Send + Sync>;
pub type PointSampler<T> = Arc<dyn Fn(&mut Rng) -> DVector<T> + Send + Sync>;

/// A real hypersurface `Y = {ρ = 1}` of `C^n` with derivative oracles.
///
/// Missing gradient or Hessian oracles fall back to central differences with
/// step `h`. A defining function whose gradient is not of unit length on `Y`
/// is renormalized pointwise unless strict mode is on.
#[derive(Clone)]
pub struct LevelSetHypersurface<T: Real> {
    space: SymplecticSpace<T>,
    name: String,
    rho: ScalarField<T>,
    grad: Option<VectorField<T>>,
    hess: Option<MatrixField<T>>,
    h: T,
    richardson: bool,
    strict: bool,
    sampler: Option<PointSampler<T>>,
}

impl<T: Real> fmt::Debug for LevelSetHypersurface<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LevelSetHypersurface")
            .field("name", &self.name)
            .field("n", &self.space.n())
            .field("analytic_gradient", &self.grad.is_some())
            .field("analytic_hessian", &self.hess.is_some())
            .field("h", &self.h)
            .field("strict", &self.strict)
            .finish()
    }
}

impl<T: Real> LevelSetHypersurface<T> {
    pub fn new(space: SymplecticSpace<T>, name: impl Into<String>, rho: ScalarField<T>) -> Self {
        let h = lit(space.tol().fd_step);
        Self { space, name: name.into(), rho, grad: None, hess: None, h, richardson: false, strict: false, sampler: None }
    }

    pub fn with_gradient(mut self, grad: VectorField<T>) -> Self {
        self.grad = Some(grad);
        self
    }

    pub fn with_hessian(mut self, hess: MatrixField<T>) -> Self {
        self.hess = Some(hess);
        self
    }

    pub fn with_sampler(mut self, sampler: PointSampler<T>) -> Self {
        self.sampler = Some(sampler);
        self
    }

    /// Finite-difference step.
    pub fn with_step(mut self, h: T) -> Self {
        self.h = h;
        self
    }

    /// Drops analytic derivative oracles so every derivative is finite-differenced.
    pub fn numeric(mut self) -> Self {
        self.grad = None;
        self.hess = None;
        self
    }

    /// Drops only the analytic Hessian, which is then differenced from the gradient.
    pub fn numeric_hessian(mut self) -> Self {
        self.hess = None;
        self
    }

    /// Richardson extrapolation of finite differences (`h` and `h/2`).
    pub fn with_richardson(mut self, on: bool) -> Self {
        self.richardson = on;
        self
    }

    /// Require `|∇ρ| = 1` on `Y` instead of renormalizing.
    pub fn with_strict(mut self, on: bool) -> Self {
        self.strict = on;
        self
    }

    pub fn space(&self) -> &SymplecticSpace<T> {
        &self.space
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.space.n()
    }

    pub fn step(&self) -> T {
        self.h
    }

    pub fn has_sampler(&self) -> bool {
        self.sampler.is_some()
    }

    pub fn value(&self, p: &DVector<T>) -> T {
        (self.rho)(p)
    }

    fn fd_gradient(&self, p: &DVector<T>, h: T) -> DVector<T> {
        let two = lit::<T>(2.0);
        DVector::from_fn(p.len(), |i, _| {
            let mut a = p.clone();
            let mut b = p.clone();
            a[i] += h;
            b[i] -= h;
            ((self.rho)(&a) - (self.rho)(&b)) / (two * h)
        })
    }

    fn fd_hessian(&self, p: &DVector<T>, h: T) -> DMatrix<T> {
        let m = p.len();
        let two = lit::<T>(2.0);
        match &self.grad {
            // column j is the derivative of the gradient along e_j
            Some(g) => {
                let mut out = DMatrix::zeros(m, m);
                for j in 0..m {
                    let mut a = p.clone();
                    let mut b = p.clone();
                    a[j] += h;
                    b[j] -= h;
                    out.set_column(j, &((g(&a) - g(&b)) / (two * h)));
                }
                out
            }
            None => DMatrix::from_fn(m, m, |i, j| {
                let shifted = |si: T, sj: T| {
                    let mut q = p.clone();
                    q[i] += si;
                    q[j] += sj;
                    (self.rho)(&q)
                };
                (shifted(h, h) - shifted(h, -h) - shifted(-h, h) + shifted(-h, -h)) / (lit::<T>(4.0) * h * h)
            }),
        }
    }

    pub fn gradient(&self, p: &DVector<T>) -> DVector<T> {
        match &self.grad {
            Some(g) => g(p),
            None if self.richardson => {
                let half = self.h * lit(0.5);
                (self.fd_gradient(p, half) * lit::<T>(4.0) - self.fd_gradient(p, self.h)) / lit::<T>(3.0)
            }
            None => self.fd_gradient(p, self.h),
        }
    }

    pub fn hessian(&self, p: &DVector<T>) -> DMatrix<T> {
        match &self.hess {
            Some(hs) => hs(p),
            None if self.richardson => {
                let half = self.h * lit(0.5);
                (self.fd_hessian(p, half) * lit::<T>(4.0) - self.fd_hessian(p, self.h)) / lit::<T>(3.0)
            }
            None => self.fd_hessian(p, self.h),
        }
    }

    /// Outward unit normal `∇ρ/|∇ρ|` and `|∇ρ|`, at any point where the gradient is nonzero.
    pub fn unit_normal(&self, p: &DVector<T>) -> Result<(DVector<T>, T)> {
        let g = self.gradient(p);
        let norm = g.norm();
        if to_f64(norm) <= 0.0 || !to_f64(norm).is_finite() {
            return Err(Error::Degenerate("defining function has a critical point".into()));
        }
        Ok((g / norm, norm))
    }

    /// Fails unless `|ρ(p) − 1|` is within the on-surface tolerance.
    pub fn check_on_surface(&self, p: &DVector<T>) -> Result<()> {
        if p.len() != self.space.dim() {
            return Err(Error::Argument(format!("point has dimension {}, expected {}", p.len(), self.space.dim())));
        }
        let r = to_f64(((self.rho)(p) - T::one()).abs());
        if r > self.space.tol().on_surface || !r.is_finite() {
            return Err(Error::OffSurface { residual: r });
        }
        Ok(())
    }

    /// Random points on `Y` from the fixture's sampler.
    pub fn sample_points(&self, count: usize, seed: u64) -> Result<Vec<DVector<T>>> {
        let sampler = self.sampler.as_ref().ok_or_else(|| Error::Argument(format!("fixture `{}` has no point sampler", self.name)))?;
        let mut g = rng::stream(seed, 0x5eed);
        Ok((0..count).map(|_| sampler(&mut g)).collect())
    }

    /// Orthogonal projector onto `N_J𝓕(q) = span_C{ν(q)}^⊥`, at any regular point `q`.
    pub fn complex_tangency_projector(&self, q: &DVector<T>) -> Result<DMatrix<T>> {
        let (nu, _) = self.unit_normal(q)?;
        let jnu = self.space.apply_j(&nu);
        let m = self.space.dim();
        Ok(DMatrix::identity(m, m) - &nu * nu.transpose() - &jnu * jnu.transpose())
    }

    /// The characteristic direction `X_ρ = J ν` at any regular point.
    pub fn characteristic(&self, q: &DVector<T>) -> Result<DVector<T>> {
        let (nu, _) = self.unit_normal(q)?;
        Ok(self.space.apply_j(&nu))
    }
}

/// The splitting `T_pY = N_J𝓕 ⊕ span{X_ρ}` together with an adapted frame whose
/// last vector is `X_ρ` (so `f_n = −ν`).
#[derive(Debug, Clone)]
pub struct TangentSplitting<T: Real> {
    pub point: DVector<T>,
    pub normal: DVector<T>,
    pub x_rho: DVector<T>,
    pub grad_norm: T,
    pub frame: AdaptedFrame<T>,
    /// `‖(I − P_N) J N‖` for the computed basis `N` of `N_J𝓕`.
    pub j_invariance_defect: T,
}

impl<T: Real> TangentSplitting<T> {
    /// `N_J𝓕` as a subspace.
    pub fn complex_tangency(&self) -> Subspace<T> {
        Subspace::span(&self.frame.h_basis())
    }

    /// The same splitting with the `N_J𝓕` frame rotated by `v ∈ U(n−1)`.
    pub fn rotated(&self, v: &DMatrix<Complex<T>>) -> Result<Self> {
        let frame = self.frame.reframed(v, &DMatrix::identity(1, 1))?;
        Ok(Self { frame, ..self.clone() })
    }
}

/// Normal, characteristic direction and adapted frame at `p ∈ Y`.
pub fn tangent_splitting<T: Real>(y: &LevelSetHypersurface<T>, p: &DVector<T>) -> Result<TangentSplitting<T>> {
    y.check_on_surface(p)?;
    let s = y.space();
    let n = s.n();
    let (nu, norm) = y.unit_normal(p)?;
    if y.strict && (to_f64(norm) - 1.0).abs() > s.tol().gradient_norm {
        return Err(Error::Unnormalized { norm: to_f64(norm) });
    }
    let x_rho = s.apply_j(&nu);
    let proj = y.complex_tangency_projector(p)?;
    let cands: Vec<DVector<T>> = (0..2 * n).map(|i| proj.column(i).into_owned()).collect();
    let mut cols = pivoted_gram_schmidt(s, &cands, n - 1, true)?;
    cols.push(x_rho.clone());
    let frame = AdaptedFrame::from_e(s, DMatrix::from_columns(&cols), n - 1)?;
    let nb = frame.h_basis();
    let jn = s.apply_j_columns(&nb);
    let defect = linalg::op_norm(&(&jn - &nb * (nb.transpose() * &jn)));
    let darboux = to_f64(frame.darboux_defect(s));
    if darboux > s.tol().darboux {
        return Err(Error::Consistency(format!("hypersurface frame violates the Darboux relations by {darboux:e}")));
    }
    Ok(TangentSplitting { point: p.clone(), normal: nu, x_rho, grad_norm: norm, frame, j_invariance_defect: defect })
}

impl<T: Real> CoisotropicSubmanifold<T> for LevelSetHypersurface<T> {
    fn space(&self) -> &SymplecticSpace<T> {
        &self.space
    }

    fn rank(&self) -> usize {
        self.space.n() - 1
    }

    fn off_surface(&self, p: &DVector<T>) -> T {
        ((self.rho)(p) - T::one()).abs()
    }

    fn tangent_space(&self, p: &DVector<T>) -> Result<Subspace<T>> {
        Ok(Subspace::span(&tangent_splitting(self, p)?.frame.tangent_basis()))
    }
}

fn gaussian_vector<T: Real>(m: usize, g: &mut Rng) -> DVector<T> {
    DVector::from_fn(m, |_, _| rng::normal(g))
}

/// `{x_1 = 1}`, with `ρ = x_1`.
pub fn hyperplane<T: Real>(space: &SymplecticSpace<T>) -> LevelSetHypersurface<T> {
    let m = space.dim();
    LevelSetHypersurface::new(space.clone(), "hyperplane", Arc::new(|p: &DVector<T>| p[0]))
        .with_gradient(Arc::new(move |_p: &DVector<T>| DVector::from_fn(m, |i, _| if i == 0 { T::one() } else { T::zero() })))
        .with_hessian(Arc::new(move |_p: &DVector<T>| DMatrix::zeros(m, m)))
        .with_sampler(Arc::new(move |g: &mut Rng| {
            let mut v = gaussian_vector::<T>(m, g);
            v[0] = T::one();
            v
        }))
}

/// The sphere `|z| = r`, with `ρ = |z| − r + 1` so that `|∇ρ| = 1`.
pub fn sphere<T: Real>(space: &SymplecticSpace<T>, r: T) -> LevelSetHypersurface<T> {
    let m = space.dim();
    LevelSetHypersurface::new(space.clone(), "sphere", Arc::new(move |p: &DVector<T>| p.norm() - r + T::one()))
        .with_gradient(Arc::new(|p: &DVector<T>| p / p.norm()))
        .with_hessian(Arc::new(move |p: &DVector<T>| {
            let len = p.norm();
            let u = p / len;
            (DMatrix::identity(m, m) - &u * u.transpose()) / len
        }))
        .with_sampler(Arc::new(move |g: &mut Rng| {
            let v = gaussian_vector::<T>(m, g);
            let len = v.norm();
            v * (r / len)
        }))
}

/// The cylinder `|z_1| = 1`, with `ρ = |z_1|`.
pub fn cylinder<T: Real>(space: &SymplecticSpace<T>) -> LevelSetHypersurface<T> {
    let n = space.n();
    let m = space.dim();
    LevelSetHypersurface::new(space.clone(), "cylinder", Arc::new(move |p: &DVector<T>| p[0].hypot(p[n])))
        .with_gradient(Arc::new(move |p: &DVector<T>| {
            let r = p[0].hypot(p[n]);
            DVector::from_fn(m, |i, _| if i == 0 { p[0] / r } else if i == n { p[n] / r } else { T::zero() })
        }))
        .with_hessian(Arc::new(move |p: &DVector<T>| {
            let r = p[0].hypot(p[n]);
            let (a, b) = (p[0] / r, p[n] / r);
            let mut h = DMatrix::zeros(m, m);
            h[(0, 0)] = (T::one() - a * a) / r;
            h[(n, n)] = (T::one() - b * b) / r;
            h[(0, n)] = -a * b / r;
            h[(n, 0)] = -a * b / r;
            h
        }))
        .with_sampler(Arc::new(move |g: &mut Rng| {
            let mut v = gaussian_vector::<T>(m, g);
            let r = v[0].hypot(v[n]);
            v[0] /= r;
            v[n] /= r;
            v
        }))
}

/// The ellipsoid `Σ x_i²/a_i² = 1` over all `2n` real coordinates, with
/// `ρ = sqrt(Σ x_i²/a_i²)` (not unit-gradient; renormalized pointwise).
pub fn ellipsoid<T: Real>(space: &SymplecticSpace<T>, axes: &[T]) -> Result<LevelSetHypersurface<T>> {
    let m = space.dim();
    if axes.len() != m || axes.iter().any(|&a| to_f64(a) <= 0.0) {
        return Err(Error::Argument(format!("ellipsoid needs {m} positive semi-axes")));
    }
    let w: DVector<T> = DVector::from_fn(m, |i, _| T::one() / (axes[i] * axes[i]));
    let a: DVector<T> = DVector::from_column_slice(axes);
    let (w1, w2, w3) = (w.clone(), w.clone(), w);
    Ok(LevelSetHypersurface::new(
        space.clone(),
        "ellipsoid",
        Arc::new(move |p: &DVector<T>| p.component_mul(p).dot(&w1).sqrt()),
    )
    .with_gradient(Arc::new(move |p: &DVector<T>| {
        let rho = p.component_mul(p).dot(&w2).sqrt();
        p.component_mul(&w2) / rho
    }))
    .with_hessian(Arc::new(move |p: &DVector<T>| {
        let rho = p.component_mul(p).dot(&w3).sqrt();
        let dp = p.component_mul(&w3);
        DMatrix::from_diagonal(&w3) / rho - &dp * dp.transpose() / (rho * rho * rho)
    }))
    .with_sampler(Arc::new(move |g: &mut Rng| {
        let v = gaussian_vector::<T>(m, g);
        let len = v.norm();
        (v / len).component_mul(&a)
    })))
}

/// Ellipsoid `Σ |z_j|²/a_j² = 1` with one semi-axis per complex coordinate.
pub fn complex_ellipsoid<T: Real>(space: &SymplecticSpace<T>, axes: &[T]) -> Result<LevelSetHypersurface<T>> {
    let n = space.n();
    if axes.len() != n {
        return Err(Error::Argument(format!("complex ellipsoid needs {n} semi-axes")));
    }
    let full: Vec<T> = (0..2 * n).map(|i| axes[i % n]).collect();
    ellipsoid(space, &full)
}

/// `{P = 1}` for a polynomial `P` in the `2n` real coordinates, with exact derivatives.
pub fn polynomial<T: Real>(space: &SymplecticSpace<T>, p: Polynomial<T>) -> Result<LevelSetHypersurface<T>> {
    if p.nvars() != space.dim() {
        return Err(Error::Argument(format!("polynomial has {} variables, expected {}", p.nvars(), space.dim())));
    }
    let (p1, p2, p3) = (p.clone(), p.clone(), p);
    Ok(LevelSetHypersurface::new(space.clone(), "polynomial", Arc::new(move |x: &DVector<T>| p1.value(x)))
        .with_gradient(Arc::new(move |x: &DVector<T>| p2.gradient(x)))
        .with_hessian(Arc::new(move |x: &DVector<T>| p3.hessian(x))))
}
