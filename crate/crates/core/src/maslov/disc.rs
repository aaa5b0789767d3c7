use std::sync::Arc;

use nalgebra::{Complex, DMatrix, DVector};

use super::{canonical_coordinate, form_coordinate, maslov_index, unwrap_phases, MaslovSection, Winding};
use crate::error::{Error, Result};
use crate::grassmann::{CoisotropicLoop, SubspaceFamily};
use crate::linalg;
use crate::scalar::{cis, lit, sample_angle, to_f64, Real};
use crate::symplin::{AdaptedFrame, CoisotropicSubspace, Subspace, SymplecticSpace};
use crate::tolerance::Tolerances;

/// An embedded coisotropic submanifold of `C^n`, described pointwise.
pub trait CoisotropicSubmanifold<T: Real>: Send + Sync {
    fn space(&self) -> &SymplecticSpace<T>;
    /// Rank parameter `k`: the submanifold has dimension `n + k`.
    fn rank(&self) -> usize;
    /// Distance-like residual measuring how far `p` is from the submanifold.
    fn off_surface(&self, p: &DVector<T>) -> T;
    fn tangent_space(&self, p: &DVector<T>) -> Result<Subspace<T>>;
}

/// An affine coisotropic subspace `p_0 + C`.
#[derive(Debug, Clone)]
pub struct LinearCoisotropic<T: Real> {
    space: SymplecticSpace<T>,
    base: DVector<T>,
    plane: CoisotropicSubspace<T>,
}

impl<T: Real> LinearCoisotropic<T> {
    pub fn new(space: SymplecticSpace<T>, base: DVector<T>, plane: CoisotropicSubspace<T>) -> Self {
        Self { space, base, plane }
    }
}

impl<T: Real> CoisotropicSubmanifold<T> for LinearCoisotropic<T> {
    fn space(&self) -> &SymplecticSpace<T> {
        &self.space
    }

    fn rank(&self) -> usize {
        self.plane.k()
    }

    fn off_surface(&self, p: &DVector<T>) -> T {
        self.plane.space().distance_to(&(p - &self.base))
    }

    fn tangent_space(&self, _p: &DVector<T>) -> Result<Subspace<T>> {
        Ok(self.plane.space().clone())
    }
}

/// Assigns to a point of the submanifold and an adapted frame there the
/// coordinate of a transverse Maslov charge in that frame.
pub trait Grading<T: Real>: Send + Sync {
    fn charge(&self, point: &DVector<T>, frame: &AdaptedFrame<T>) -> Result<Complex<T>>;
}

/// The grading induced by `dz_1∧…∧dz_n`.
#[derive(Debug, Clone, Default)]
pub struct CanonicalGrading {
    pub tol: Tolerances,
}

impl<T: Real> Grading<T> for CanonicalGrading {
    fn charge(&self, _point: &DVector<T>, frame: &AdaptedFrame<T>) -> Result<Complex<T>> {
        canonical_coordinate(frame, &self.tol)
    }
}

/// The grading given by the square of a constant complex `k`-form restricted to `H_C`.
#[derive(Debug, Clone)]
pub struct FormGrading<T: Real> {
    pub form: DMatrix<Complex<T>>,
    pub tol: Tolerances,
}

impl<T: Real> FormGrading<T> {
    pub fn new(form: DMatrix<Complex<T>>) -> Self {
        Self { form, tol: Tolerances::default() }
    }
}

impl<T: Real> Grading<T> for FormGrading<T> {
    fn charge(&self, _point: &DVector<T>, frame: &AdaptedFrame<T>) -> Result<Complex<T>> {
        form_coordinate(&self.form, frame, &self.tol)
    }
}

/// Boundary map `θ ↦ w(θ)` of a disc, periodic on `[0, 2π]`.
pub type BoundaryFamily<T> = Arc<dyn Fn(T) -> DVector<T> + Send + Sync>;

/// Result of a disc-boundary index computation.
#[derive(Debug, Clone)]
pub struct DiscIndex<T: Real> {
    pub winding: Winding,
    pub tangent_loop: CoisotropicLoop<T>,
    pub points: Vec<DVector<T>>,
    pub charge: MaslovSection<T>,
}

/// Index of the pair (tangent loop along `∂w`, grading along `∂w`).
pub fn disc_boundary_index<T: Real>(
    y: Arc<dyn CoisotropicSubmanifold<T>>,
    boundary: BoundaryFamily<T>,
    grading: &dyn Grading<T>,
    m: usize,
) -> Result<DiscIndex<T>> {
    let s = y.space().clone();
    let limit = s.tol().on_surface;
    let (y2, b2) = (y.clone(), boundary.clone());
    let family: SubspaceFamily<T> = Arc::new(move |theta: T| {
        let p = b2(theta);
        let r = to_f64(y2.off_surface(&p));
        if r > limit {
            return Err(Error::OffSurface { residual: r });
        }
        y2.tangent_space(&p)
    });
    let tangent_loop = CoisotropicLoop::from_family(&s, y.rank(), family, m)?;
    let mm = tangent_loop.len();
    let points: Vec<DVector<T>> = (0..mm).map(|i| boundary(sample_angle(i, mm))).collect();
    let values: Result<Vec<Complex<T>>> =
        points.iter().zip(tangent_loop.frames()).map(|(p, f)| grading.charge(p, f)).collect();
    let closing = grading.charge(&points[0], tangent_loop.closing_frame())?;
    let charge = MaslovSection::new(values?, closing, s.tol())?;
    let winding = maslov_index(&tangent_loop, &charge)?;
    Ok(DiscIndex { winding, tangent_loop, points, charge })
}

/// Frames along the loop in which the section has coordinate 1: the first
/// `H_C` vector of frame `i` is rotated by `e^{−iφ_i/2}`, `φ` being the section's
/// continuously unwrapped phase. Returns `M + 1` frames, the last adapted to
/// sample 0 and continuing the path.
pub fn admissible_frames<T: Real>(gamma: &CoisotropicLoop<T>, section: &MaslovSection<T>) -> Result<Vec<AdaptedFrame<T>>> {
    if section.len() != gamma.len() {
        return Err(Error::GridMismatch { expected: gamma.len(), found: section.len() });
    }
    let k = gamma.k();
    let n = gamma.space().n();
    let mut values = section.values().to_vec();
    values.push(section.closing());
    let frames: Vec<&AdaptedFrame<T>> = gamma.frames().iter().chain(std::iter::once(gamma.closing_frame())).collect();
    if k == 0 {
        let phi = unwrap_phases(&values);
        if phi.iter().any(|p| p.abs() > 1e-9) {
            return Err(Error::Argument("rank-zero charge can only be normalized when it is identically 1".into()));
        }
        return Ok(frames.into_iter().cloned().collect());
    }
    let phi = unwrap_phases(&values);
    let id_o = DMatrix::<T>::identity(n - k, n - k);
    frames
        .into_iter()
        .zip(phi)
        .map(|(f, p)| {
            let mut v = DMatrix::<Complex<T>>::identity(k, k);
            v[(0, 0)] = cis(lit::<T>(-p / 2.0));
            f.reframed(&v, &id_o)
        })
        .collect()
}

/// `(i/π) ∮ tr(U⁻¹ dU)` along a path of frames, accumulated as discrete
/// increments of `arg det U`.
pub fn connection_integral_index<T: Real>(frames: &[AdaptedFrame<T>], tol: &Tolerances) -> Result<Winding> {
    if frames.len() < 2 {
        return Err(Error::Argument("a frame path needs at least two frames".into()));
    }
    let dets: Vec<Complex<T>> = frames.iter().map(|f| linalg::det_c(&f.unitary())).collect();
    let mut total = 0.0;
    for (i, w) in dets.windows(2).enumerate() {
        let q = w[1] * w[0].conj();
        let step = to_f64(q.im.atan2(q.re));
        if step.abs() >= tol.winding_jump {
            return Err(Error::Aliasing { index: i, jump: step });
        }
        total += step;
    }
    let value = -total / std::f64::consts::PI;
    let degree = value.round();
    let residual = (value - degree).abs();
    if residual >= tol.winding_residual {
        return Err(Error::Closure { residual });
    }
    Ok(Winding { degree: degree as i64, residual, total_phase: total })
}
