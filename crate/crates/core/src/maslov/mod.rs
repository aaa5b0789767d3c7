//! Coisotropic Maslov indices of loops and of disc boundaries.
//!
//! A section of the squared transverse canonical line is stored by its
//! coordinates: sample `i` is the value of the section on `(u_1,…,u_k)` taken
//! from the loop's frame `i`, so a change of `H_C` frame `u' = u V` multiplies a
//! coordinate by `det(V)²`. One extra coordinate is kept for sample 0 read in
//! the loop's closing frame. The canonical section has coordinate `det(U)²`.

mod disc;
mod special;

pub use special::{is_leafwise_special, LeafwiseSpecial};
pub use disc::{
    admissible_frames, connection_integral_index, disc_boundary_index, BoundaryFamily, CanonicalGrading,
    CoisotropicSubmanifold, DiscIndex, FormGrading, Grading, LinearCoisotropic,
};

use nalgebra::{Complex, DMatrix};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grassmann::{pushforward, CoisotropicLoop, SymplecticMatrixLoop};
use crate::linalg;
use crate::scalar::{cabs, cis, lit, to_f64, unit, Real};
use crate::symplin::AdaptedFrame;
use crate::tolerance::Tolerances;

/// Integer winding of a closed sequence of phases, with its rounding residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Winding {
    pub degree: i64,
    /// `|total/2π − degree|`.
    pub residual: f64,
    /// Accumulated phase in radians.
    pub total_phase: f64,
}

fn phase_step<T: Real>(from: Complex<T>, to: Complex<T>) -> f64 {
    let q = to * from.conj();
    to_f64(q.im.atan2(q.re))
}

fn round_checked(x: f64, tol: &Tolerances) -> Result<(i64, f64)> {
    let d = x.round();
    let r = (x - d).abs();
    if r >= tol.winding_residual {
        return Err(Error::Closure { residual: r });
    }
    Ok((d as i64, r))
}

/// Degree of the closed loop through `phases` (the last sample connects back to the first).
pub fn winding<T: Real>(phases: &[Complex<T>], tol: &Tolerances) -> Result<Winding> {
    if phases.is_empty() {
        return Err(Error::Argument("winding of an empty sequence".into()));
    }
    if let Some(i) = phases.iter().position(|z| to_f64(cabs(*z)) == 0.0 || !to_f64(cabs(*z)).is_finite()) {
        return Err(Error::Argument(format!("phase sample {i} is zero or not finite")));
    }
    let m = phases.len();
    let mut total = 0.0;
    for i in 0..m {
        let step = phase_step(phases[i], phases[(i + 1) % m]);
        if step.abs() >= tol.winding_jump {
            return Err(Error::Aliasing { index: i, jump: step });
        }
        total += step;
    }
    let (degree, residual) = round_checked(total / std::f64::consts::TAU, tol)?;
    Ok(Winding { degree, residual, total_phase: total })
}

/// Continuous phase along an open path, starting at the principal argument of the first sample.
pub fn unwrap_phases<T: Real>(values: &[Complex<T>]) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    if let Some(&z0) = values.first() {
        let mut acc = to_f64(z0.im.atan2(z0.re));
        out.push(acc);
        for w in values.windows(2) {
            acc += phase_step(w[0], w[1]);
            out.push(acc);
        }
    }
    out
}

/// Coordinates of a section of the squared transverse canonical line along a loop.
#[derive(Debug, Clone, PartialEq)]
pub struct MaslovSection<T: Real> {
    values: Vec<Complex<T>>,
    closing: Complex<T>,
}

impl<T: Real> MaslovSection<T> {
    /// Wraps unit-modulus coordinates; `closing` is sample 0 read in the closing frame.
    pub fn new(values: Vec<Complex<T>>, closing: Complex<T>, tol: &Tolerances) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Argument("a section needs at least one sample".into()));
        }
        for (i, z) in values.iter().chain(std::iter::once(&closing)).enumerate() {
            let d = (to_f64(cabs(*z)) - 1.0).abs();
            if d > tol.unit_modulus {
                return Err(Error::Argument(format!("section sample {i} has modulus off by {d:e}")));
            }
        }
        Ok(Self { values, closing })
    }

    /// Coordinates in the loop's own frames; the closing coordinate follows from
    /// the frame monodromy. The result only closes continuously when the values
    /// do, e.g. constant values need `det(monodromy)² = 1`.
    pub fn on_loop(gamma: &CoisotropicLoop<T>, values: Vec<Complex<T>>) -> Result<Self> {
        if values.len() != gamma.len() {
            return Err(Error::GridMismatch { expected: gamma.len(), found: values.len() });
        }
        let d = linalg::det_c(&gamma.monodromy());
        let closing = values[0] * d * d;
        Self::new(values, closing, gamma.space().tol())
    }

    /// Evaluates `rule` at every frame of the loop and at its closing frame.
    pub fn from_rule(gamma: &CoisotropicLoop<T>, rule: &dyn SectionRule<T>) -> Result<Self> {
        let m = gamma.len();
        let values: Result<Vec<Complex<T>>> =
            (0..m).into_par_iter().map(|i| rule.coordinate(gamma.theta(i), &gamma.frames()[i])).collect();
        let closing = rule.coordinate(T::two_pi(), gamma.closing_frame())?;
        Self::new(values?, closing, gamma.space().tol())
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn closing(&self) -> Complex<T> {
        self.closing
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Largest phase jump between consecutive coordinates, ending at the closing value.
    pub fn max_jump(&self) -> f64 {
        let mut j: f64 = 0.0;
        for w in self.values.windows(2) {
            j = j.max(phase_step(w[0], w[1]).abs());
        }
        j.max(phase_step(*self.values.last().expect("nonempty"), self.closing).abs())
    }
}

/// A rule producing section coordinates from a parameter and an adapted frame.
pub trait SectionRule<T: Real>: Send + Sync {
    fn coordinate(&self, theta: T, frame: &AdaptedFrame<T>) -> Result<Complex<T>>;
}

impl<T: Real, F> SectionRule<T> for F
where
    F: Fn(T, &AdaptedFrame<T>) -> Result<Complex<T>> + Send + Sync,
{
    fn coordinate(&self, theta: T, frame: &AdaptedFrame<T>) -> Result<Complex<T>> {
        self(theta, frame)
    }
}

/// Coordinate of the canonical section `((u_{k+1}∧…∧u_n) ⌟ dz)^⊗2` in `frame`.
///
/// The contraction evaluated on `u_1..u_k` is `dz(u_{k+1},…,u_n,u_1,…,u_k)`.
pub fn canonical_coordinate<T: Real>(frame: &AdaptedFrame<T>, tol: &Tolerances) -> Result<Complex<T>> {
    let n = frame.n();
    let k = frame.k();
    let u = frame.unitary();
    let reordered = DMatrix::from_fn(n, n, |i, j| if j < n - k { u[(i, k + j)] } else { u[(i, j - (n - k))] });
    let d = linalg::det_c(&reordered);
    let r = to_f64(cabs(d));
    if r < tol.contraction_floor {
        return Err(Error::FrameDegeneracy { norm: r });
    }
    let d = d.unscale(cabs(d));
    Ok(d * d)
}

/// Coordinate of `(Λ restricted to H_C)^⊗2`, normalized, for a `k×n` matrix of
/// complex covectors `Λ` (rows are `(1,0)`-forms `Σ_j λ_j dz_j`).
pub fn form_coordinate<T: Real>(form: &DMatrix<Complex<T>>, frame: &AdaptedFrame<T>, tol: &Tolerances) -> Result<Complex<T>> {
    let k = frame.k();
    if form.shape() != (k, frame.n()) {
        return Err(Error::Argument(format!("form must be {k}×{}", frame.n())));
    }
    let d = linalg::det_c(&(form * frame.h_unitary()));
    let r = to_f64(cabs(d));
    if r < tol.contraction_floor {
        return Err(Error::FrameDegeneracy { norm: r });
    }
    let d = d.unscale(cabs(d));
    Ok(d * d)
}

/// `e^{i w θ}` times the canonical section.
#[derive(Debug, Clone, Copy)]
pub struct CanonicalTwist {
    pub winding: i64,
    pub tol: f64,
}

impl CanonicalTwist {
    pub fn new(winding: i64) -> Self {
        Self { winding, tol: Tolerances::default().contraction_floor }
    }
}

impl<T: Real> SectionRule<T> for CanonicalTwist {
    fn coordinate(&self, theta: T, frame: &AdaptedFrame<T>) -> Result<Complex<T>> {
        let tol = Tolerances { contraction_floor: self.tol, ..Tolerances::default() };
        Ok(cis(theta * lit(self.winding as f64)) * canonical_coordinate(frame, &tol)?)
    }
}

/// `e^{i w θ}` times the squared restriction of a fixed complex `k`-form.
#[derive(Debug, Clone)]
pub struct FormRule<T: Real> {
    pub form: DMatrix<Complex<T>>,
    pub winding: i64,
}

impl<T: Real> SectionRule<T> for FormRule<T> {
    fn coordinate(&self, theta: T, frame: &AdaptedFrame<T>) -> Result<Complex<T>> {
        Ok(cis(theta * lit(self.winding as f64)) * form_coordinate(&self.form, frame, &Tolerances::default())?)
    }
}

/// The canonical section `ζ_(γ;dz)` of a loop.
pub fn canonical_section<T: Real>(gamma: &CoisotropicLoop<T>) -> Result<MaslovSection<T>> {
    let tol = gamma.space().tol().clone();
    let rule = move |_: T, f: &AdaptedFrame<T>| canonical_coordinate(f, &tol);
    MaslovSection::from_rule(gamma, &rule)
}

/// `g_i = ζ_i / ζ_(γ;dz),i` for every sample, followed by the closing ratio.
pub fn index_ratio<T: Real>(gamma: &CoisotropicLoop<T>, zeta: &MaslovSection<T>) -> Result<Vec<Complex<T>>> {
    if zeta.len() != gamma.len() {
        return Err(Error::GridMismatch { expected: gamma.len(), found: zeta.len() });
    }
    let can = canonical_section(gamma)?;
    let ratio = |z: Complex<T>, c: Complex<T>| unit(z * c.conj()).ok_or(Error::FrameDegeneracy { norm: 0.0 });
    let mut g: Vec<Complex<T>> = zeta.values().iter().zip(can.values()).map(|(&z, &c)| ratio(z, c)).collect::<Result<_>>()?;
    g.push(ratio(zeta.closing(), can.closing())?);
    Ok(g)
}

/// The coisotropic Maslov index `μ(γ; ζ) = deg(g)` where `ζ = g · ζ_(γ;dz)`.
pub fn maslov_index<T: Real>(gamma: &CoisotropicLoop<T>, zeta: &MaslovSection<T>) -> Result<Winding> {
    let g = index_ratio(gamma, zeta)?;
    winding(&g, gamma.space().tol())
}

/// Index of `γ` against the section built by `section`, doubling the loop's grid
/// while the index ratio aliases. The loop must carry its generator. A jump that
/// does not shrink under doubling is a genuine discontinuity and is returned.
pub fn refined_index<T: Real>(
    gamma: &CoisotropicLoop<T>,
    section: &dyn Fn(&CoisotropicLoop<T>) -> Result<MaslovSection<T>>,
) -> Result<(CoisotropicLoop<T>, MaslovSection<T>, Winding)> {
    let mut g = gamma.clone();
    let mut previous = f64::INFINITY;
    loop {
        let zeta = section(&g)?;
        match maslov_index(&g, &zeta) {
            Ok(w) => return Ok((g, zeta, w)),
            Err(Error::Aliasing { index, jump }) => {
                let stuck = jump.abs() > 0.75 * previous;
                if stuck || 2 * g.len() > g.space().tol().max_loop_samples || g.generator().is_none() {
                    return Err(Error::Aliasing { index, jump });
                }
                previous = jump.abs();
                g = g.resample(2 * g.len())?;
            }
            Err(e) => return Err(e),
        }
    }
}

/// Unitary part of the map `H_C → H_C'` induced by `a`, in the frames' complex bases.
fn quotient_unitary<T: Real>(a: &DMatrix<T>, from: &AdaptedFrame<T>, to: &AdaptedFrame<T>) -> Result<DMatrix<Complex<T>>> {
    let q = to.h_basis().transpose() * a * from.h_basis();
    let o = linalg::polar_orthogonal(&q);
    let defect = to_f64(linalg::complex_linearity_defect(&o));
    if defect > 1e-6 {
        return Err(Error::Consistency(format!("induced quotient map is not symplectic (defect {defect:e})")));
    }
    Ok(linalg::complexify(&o))
}

/// `det(Q)` for the unitary polar factor `Q` of a symplectic matrix.
fn unitary_part_det<T: Real>(a: &DMatrix<T>) -> Result<Complex<T>> {
    let o = linalg::polar_orthogonal(a);
    let defect = to_f64(linalg::complex_linearity_defect(&o));
    if defect > 1e-6 {
        return Err(Error::Consistency(format!("polar factor is not unitary (defect {defect:e})")));
    }
    Ok(linalg::det_c(&linalg::complexify(&o)))
}

/// The pushed-forward pair `(A·γ, A_*ζ)`.
///
/// The section is moved by the unitary part of the induced map between the
/// `H_C` frames and rescaled by `det(Q)²` for the unitary part `Q` of `A`, which
/// accounts for the change of `dz` under `Q`.
pub fn pushforward_section<T: Real>(
    a: &SymplecticMatrixLoop<T>,
    gamma: &CoisotropicLoop<T>,
    zeta: &MaslovSection<T>,
) -> Result<(CoisotropicLoop<T>, MaslovSection<T>)> {
    let m = gamma.len();
    if a.len() != m {
        return Err(Error::GridMismatch { expected: m, found: a.len() });
    }
    if zeta.len() != m {
        return Err(Error::GridMismatch { expected: m, found: zeta.len() });
    }
    let pushed = pushforward(a, gamma)?;
    if pushed.len() != m {
        return Err(Error::GridMismatch { expected: m, found: pushed.len() });
    }
    let factor = |ai: &DMatrix<T>, from: &AdaptedFrame<T>, to: &AdaptedFrame<T>| -> Result<Complex<T>> {
        let dq = unitary_part_det(ai)?;
        let dw = linalg::det_c(&quotient_unitary(ai, from, to)?);
        unit(dq * dq / (dw * dw)).ok_or(Error::FrameDegeneracy { norm: 0.0 })
    };
    let values: Result<Vec<Complex<T>>> = (0..m)
        .into_par_iter()
        .map(|i| Ok(zeta.values()[i] * factor(&a.samples()[i], &gamma.frames()[i], &pushed.frames()[i])?))
        .collect();
    let closing = zeta.closing() * factor(&a.samples()[0], gamma.closing_frame(), pushed.closing_frame())?;
    let section = MaslovSection::new(values?, closing, gamma.space().tol())?;
    Ok((pushed, section))
}
