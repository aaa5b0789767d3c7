//! Loops in the coisotropic Grassmannian and loops of symplectic matrices.

use std::fmt;
use std::sync::Arc;

use nalgebra::{Complex, DMatrix};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::{sample_angle, to_f64, Real};
use crate::symplin::{adapted_frame, classify_coisotropic, AdaptedFrame, CoisotropicSubspace, Subspace, SymplecticSpace};

/// A parametric family `θ ↦ C(θ)` on `[0, 2π]`.
pub type SubspaceFamily<T> = Arc<dyn Fn(T) -> Result<Subspace<T>> + Send + Sync>;

/// A parametric family `θ ↦ A(θ)` of `2n×2n` matrices on `[0, 2π]`.
pub type MatrixFamily<T> = Arc<dyn Fn(T) -> DMatrix<T> + Send + Sync>;

/// A uniformly sampled loop `θ_i = 2πi/M` of coisotropic subspaces together with
/// adapted frames propagated around it.
///
/// `closing_frame` is the frame obtained by propagating once more, from the last
/// sample back to sample 0. It is adapted to sample 0 but generally differs from
/// `frames[0]`; the difference is the monodromy.
#[derive(Clone)]
pub struct CoisotropicLoop<T: Real> {
    space: SymplecticSpace<T>,
    k: usize,
    samples: Vec<CoisotropicSubspace<T>>,
    frames: Vec<AdaptedFrame<T>>,
    closing_frame: AdaptedFrame<T>,
    closure_defect: T,
    generator: Option<SubspaceFamily<T>>,
}

impl<T: Real> fmt::Debug for CoisotropicLoop<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CoisotropicLoop")
            .field("n", &self.space.n())
            .field("k", &self.k)
            .field("samples", &self.samples.len())
            .field("closure_defect", &self.closure_defect)
            .field("has_generator", &self.generator.is_some())
            .finish()
    }
}

fn classify_all<T: Real>(s: &SymplecticSpace<T>, k: usize, subs: &[Subspace<T>]) -> Result<Vec<CoisotropicSubspace<T>>> {
    subs.par_iter()
        .enumerate()
        .map(|(i, c)| {
            let cs = classify_coisotropic(s, c)?;
            if cs.k() != k {
                return Err(Error::Argument(format!("sample {i} has rank {} instead of {k}", cs.k())));
            }
            Ok(cs)
        })
        .collect()
}

fn max_step<T: Real>(samples: &[CoisotropicSubspace<T>]) -> Result<T> {
    let m = samples.len();
    let steps: Result<Vec<T>> = (0..m)
        .into_par_iter()
        .map(|i| samples[i].space().max_angle(samples[(i + 1) % m].space()))
        .collect();
    Ok(steps?.into_iter().fold(T::zero(), |a, b| a.max(b)))
}

fn propagate<T: Real>(
    s: &SymplecticSpace<T>,
    samples: &[CoisotropicSubspace<T>],
    start: Option<&AdaptedFrame<T>>,
) -> Result<(Vec<AdaptedFrame<T>>, AdaptedFrame<T>)> {
    let mut frames: Vec<AdaptedFrame<T>> = Vec::with_capacity(samples.len());
    let first = match start {
        Some(f) => {
            f.check_adapted(s, &samples[0])?;
            f.clone()
        }
        None => adapted_frame(s, &samples[0], None)?,
    };
    frames.push(first);
    for c in &samples[1..] {
        let next = adapted_frame(s, c, frames.last())?;
        frames.push(next);
    }
    let closing = adapted_frame(s, &samples[0], frames.last())?;
    Ok((frames, closing))
}

impl<T: Real> CoisotropicLoop<T> {
    /// Samples `generator` at `m` points, doubling `m` until consecutive samples are
    /// within the continuity tolerance and frame propagation succeeds.
    pub fn from_family(s: &SymplecticSpace<T>, k: usize, generator: SubspaceFamily<T>, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::Argument("a loop needs at least one sample".into()));
        }
        let tol = s.tol();
        let start = generator(T::zero())?;
        let end = generator(T::two_pi())?;
        let defect = start.max_angle(&end).map_err(|_| Error::OpenLoop { defect: f64::INFINITY })?;
        if to_f64(defect) > tol.loop_closure {
            return Err(Error::OpenLoop { defect: to_f64(defect) });
        }
        let mut m = m;
        loop {
            let subs: Result<Vec<Subspace<T>>> = (0..m).into_par_iter().map(|i| generator(sample_angle(i, m))).collect();
            let samples = classify_all(s, k, &subs?)?;
            let step = max_step(&samples)?;
            let refine = if to_f64(step) > tol.loop_step {
                Some(to_f64(step))
            } else {
                match propagate(s, &samples, None) {
                    Ok((frames, closing_frame)) => {
                        return Ok(Self {
                            space: s.clone(),
                            k,
                            samples,
                            frames,
                            closing_frame,
                            closure_defect: defect,
                            generator: Some(generator),
                        })
                    }
                    Err(Error::ContinuityLoss { .. }) => Some(to_f64(step)),
                    Err(e) => return Err(e),
                }
            };
            if let Some(step) = refine {
                if 2 * m > tol.max_loop_samples {
                    return Err(Error::DiscontinuousLoop { max_step: step, samples: m });
                }
                m *= 2;
            }
        }
    }

    /// A loop from explicit samples at `θ_i = 2πi/M`; no refinement is possible.
    pub fn from_subspaces(s: &SymplecticSpace<T>, k: usize, subs: &[Subspace<T>]) -> Result<Self> {
        if subs.is_empty() {
            return Err(Error::Argument("a loop needs at least one sample".into()));
        }
        let samples = classify_all(s, k, subs)?;
        Self::from_classified(s, k, samples, None)
    }

    fn from_classified(
        s: &SymplecticSpace<T>,
        k: usize,
        samples: Vec<CoisotropicSubspace<T>>,
        generator: Option<SubspaceFamily<T>>,
    ) -> Result<Self> {
        let step = max_step(&samples)?;
        if to_f64(step) > s.tol().loop_step {
            return Err(Error::DiscontinuousLoop { max_step: to_f64(step), samples: samples.len() });
        }
        let (frames, closing_frame) = propagate(s, &samples, None).map_err(|e| match e {
            Error::ContinuityLoss { .. } => Error::DiscontinuousLoop { max_step: to_f64(step), samples: samples.len() },
            e => e,
        })?;
        Ok(Self { space: s.clone(), k, samples, frames, closing_frame, closure_defect: T::zero(), generator })
    }

    /// The same loop with frames re-propagated from `start`, a frame adapted to sample 0.
    pub fn repropagated(&self, start: &AdaptedFrame<T>) -> Result<Self> {
        let (frames, closing_frame) = propagate(&self.space, &self.samples, Some(start))?;
        Ok(Self { frames, closing_frame, ..self.clone() })
    }

    /// The same loop carrying caller-supplied frames, which need not be continuous.
    pub fn with_frames(&self, frames: Vec<AdaptedFrame<T>>, closing_frame: AdaptedFrame<T>) -> Result<Self> {
        if frames.len() != self.samples.len() {
            return Err(Error::GridMismatch { expected: self.samples.len(), found: frames.len() });
        }
        for (f, c) in frames.iter().zip(&self.samples) {
            f.check_adapted(&self.space, c)?;
        }
        closing_frame.check_adapted(&self.space, &self.samples[0])?;
        Ok(Self { frames, closing_frame, ..self.clone() })
    }

    /// Resamples the generating family at `m` points (or more, if refinement is needed).
    pub fn resample(&self, m: usize) -> Result<Self> {
        match &self.generator {
            Some(g) => Self::from_family(&self.space, self.k, g.clone(), m),
            None => Err(Error::GridMismatch { expected: m, found: self.len() }),
        }
    }

    pub fn space(&self) -> &SymplecticSpace<T> {
        &self.space
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn theta(&self, i: usize) -> T {
        sample_angle(i, self.len())
    }

    pub fn samples(&self) -> &[CoisotropicSubspace<T>] {
        &self.samples
    }

    pub fn frames(&self) -> &[AdaptedFrame<T>] {
        &self.frames
    }

    pub fn closing_frame(&self) -> &AdaptedFrame<T> {
        &self.closing_frame
    }

    pub fn closure_defect(&self) -> T {
        self.closure_defect
    }

    pub fn generator(&self) -> Option<&SubspaceFamily<T>> {
        self.generator.as_ref()
    }

    /// Unitary change of frame from `frames[0]` to the closing frame.
    pub fn monodromy(&self) -> DMatrix<Complex<T>> {
        self.frames[0].transition_to(&self.closing_frame)
    }

    /// Largest principal angle between consecutive samples, wrap-around included.
    pub fn max_step(&self) -> Result<T> {
        max_step(&self.samples)
    }
}

/// Transverse unitary frames `u_α = e_α + i f_α`, `α = k+1..n`, along a loop.
#[derive(Debug, Clone)]
pub struct TransverseFrames<T: Real> {
    /// One `n×(n−k)` complex matrix per sample.
    pub frames: Vec<DMatrix<Complex<T>>>,
    /// Change of transverse frame after one circuit, `(n−k)×(n−k)`.
    pub monodromy: DMatrix<Complex<T>>,
}

pub fn transverse_frame_loop<T: Real>(gamma: &CoisotropicLoop<T>) -> TransverseFrames<T> {
    let frames: Vec<DMatrix<Complex<T>>> = gamma.frames().iter().map(|f| f.kernel_unitary()).collect();
    let end = gamma.closing_frame().kernel_unitary();
    let monodromy = frames[0].adjoint() * end;
    TransverseFrames { frames, monodromy }
}

/// A sampled loop of symplectic matrices.
#[derive(Clone)]
pub struct SymplecticMatrixLoop<T: Real> {
    space: SymplecticSpace<T>,
    samples: Vec<DMatrix<T>>,
    generator: Option<MatrixFamily<T>>,
}

impl<T: Real> fmt::Debug for SymplecticMatrixLoop<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SymplecticMatrixLoop")
            .field("n", &self.space.n())
            .field("samples", &self.samples.len())
            .field("has_generator", &self.generator.is_some())
            .finish()
    }
}

fn symplectic_defect<T: Real>(s: &SymplecticSpace<T>, a: &DMatrix<T>) -> f64 {
    let om = s.omega();
    let scale = to_f64(linalg::op_norm(a)).max(1.0);
    to_f64(linalg::max_abs(&(a.transpose() * om * a - om))) / (scale * scale)
}

impl<T: Real> SymplecticMatrixLoop<T> {
    /// Samples `family`, doubling `m` until consecutive samples are within the
    /// operator-norm step bound.
    pub fn from_family(s: &SymplecticSpace<T>, family: MatrixFamily<T>, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::Argument("a loop needs at least one sample".into()));
        }
        let tol = s.tol();
        let a0 = family(T::zero());
        let a1 = family(T::two_pi());
        let defect = to_f64(linalg::op_norm(&(&a1 - &a0)));
        if defect > tol.loop_closure * to_f64(linalg::op_norm(&a0)).max(1.0) {
            return Err(Error::OpenLoop { defect });
        }
        let mut m = m;
        loop {
            let samples: Vec<DMatrix<T>> = (0..m).into_par_iter().map(|i| family(sample_angle(i, m))).collect();
            match Self::checked(s, samples, Some(family.clone())) {
                Err(Error::DiscontinuousLoop { max_step, .. }) => {
                    if 2 * m > tol.max_loop_samples {
                        return Err(Error::DiscontinuousLoop { max_step, samples: m });
                    }
                    m *= 2;
                }
                other => return other,
            }
        }
    }

    pub fn from_samples(s: &SymplecticSpace<T>, samples: Vec<DMatrix<T>>) -> Result<Self> {
        Self::checked(s, samples, None)
    }

    pub fn constant(s: &SymplecticSpace<T>, a: DMatrix<T>, m: usize) -> Result<Self> {
        let a2 = a.clone();
        Self::from_family(s, Arc::new(move |_| a2.clone()), m).and_then(|l| {
            if l.len() == m {
                Ok(l)
            } else {
                Err(Error::Consistency("constant loop was refined".into()))
            }
        })
        .map(|l| Self { samples: vec![a; m], ..l })
    }

    pub fn identity(s: &SymplecticSpace<T>, m: usize) -> Self {
        let id = DMatrix::identity(s.dim(), s.dim());
        let id2 = id.clone();
        Self { space: s.clone(), samples: vec![id; m], generator: Some(Arc::new(move |_| id2.clone())) }
    }

    fn checked(s: &SymplecticSpace<T>, samples: Vec<DMatrix<T>>, generator: Option<MatrixFamily<T>>) -> Result<Self> {
        let tol = s.tol();
        if samples.is_empty() {
            return Err(Error::Argument("a loop needs at least one sample".into()));
        }
        for (i, a) in samples.iter().enumerate() {
            if a.shape() != (s.dim(), s.dim()) {
                return Err(Error::Argument(format!("sample {i} has the wrong shape")));
            }
            let d = symplectic_defect(s, a);
            if d > tol.symplectic {
                return Err(Error::Argument(format!("sample {i} is not symplectic (defect {d:e})")));
            }
        }
        let m = samples.len();
        let step = (0..m)
            .map(|i| to_f64(linalg::op_norm(&(&samples[(i + 1) % m] - &samples[i]))))
            .fold(0.0, f64::max);
        if step > tol.matrix_loop_step {
            return Err(Error::DiscontinuousLoop { max_step: step, samples: m });
        }
        Ok(Self { space: s.clone(), samples, generator })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[DMatrix<T>] {
        &self.samples
    }

    pub fn space(&self) -> &SymplecticSpace<T> {
        &self.space
    }

    pub fn generator(&self) -> Option<&MatrixFamily<T>> {
        self.generator.as_ref()
    }

    /// Samplewise inverse `A⁻¹ = −Ω Aᵀ Ω`.
    pub fn inverse(&self) -> Self {
        let om = self.space.omega().clone();
        let inv = move |a: &DMatrix<T>| -(&om * a.transpose() * &om);
        let samples = self.samples.iter().map(&inv).collect();
        let generator = self.generator.clone().map(|g| {
            let inv = inv.clone();
            Arc::new(move |t: T| inv(&g(t))) as MatrixFamily<T>
        });
        Self { space: self.space.clone(), samples, generator }
    }

    pub fn resample(&self, m: usize) -> Result<Self> {
        match &self.generator {
            Some(g) => Self::from_family(&self.space, g.clone(), m),
            None => Err(Error::GridMismatch { expected: m, found: self.len() }),
        }
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Resamples both loops onto one grid, refining until their lengths agree.
pub fn align_grids<T: Real>(a: &SymplecticMatrixLoop<T>, gamma: &CoisotropicLoop<T>) -> Result<(SymplecticMatrixLoop<T>, CoisotropicLoop<T>)> {
    let (mut ra, mut rg) = (a.clone(), gamma.clone());
    while ra.len() != rg.len() {
        let m = ra.len().max(rg.len());
        if ra.len() != m {
            ra = ra.resample(m)?;
        }
        if rg.len() != m {
            rg = rg.resample(m)?;
        }
    }
    Ok((ra, rg))
}

/// `θ ↦ A(θ)·γ(θ)`. Grids must agree, or both loops must carry generators so
/// they can be resampled on the common grid.
pub fn pushforward<T: Real>(a: &SymplecticMatrixLoop<T>, gamma: &CoisotropicLoop<T>) -> Result<CoisotropicLoop<T>> {
    let s = gamma.space();
    if a.space().n() != s.n() {
        return Err(Error::Argument("matrix loop acts on a different space".into()));
    }
    let (a, gamma) = if a.len() == gamma.len() {
        (a.clone(), gamma.clone())
    } else {
        let l = a.len() / gcd(a.len(), gamma.len()) * gamma.len();
        let ra = a.resample(l)?;
        let rg = gamma.resample(l)?;
        if ra.len() != rg.len() {
            return Err(Error::GridMismatch { expected: ra.len(), found: rg.len() });
        }
        (ra, rg)
    };
    let k = gamma.k();
    let samples: Result<Vec<CoisotropicSubspace<T>>> = a
        .samples()
        .par_iter()
        .zip(gamma.samples().par_iter())
        .enumerate()
        .map(|(i, (ai, ci))| {
            let image = Subspace::span(&(ai * ci.space().basis()));
            let cs = classify_coisotropic(s, &image)
                .map_err(|e| Error::Consistency(format!("image of sample {i} is not coisotropic: {e}")))?;
            if cs.k() != k {
                return Err(Error::Consistency(format!("image of sample {i} changed rank")));
            }
            Ok(cs)
        })
        .collect();
    let generator = match (a.generator(), gamma.generator()) {
        (Some(fa), Some(fg)) => {
            let (fa, fg) = (fa.clone(), fg.clone());
            Some(Arc::new(move |t: T| Ok(Subspace::span(&(fa(t) * fg(t)?.basis())))) as SubspaceFamily<T>)
        }
        _ => None,
    };
    CoisotropicLoop::from_classified(s, k, samples?, generator)
}
