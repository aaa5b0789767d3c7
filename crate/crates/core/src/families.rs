//! Named parametric loops: explicit rotations and seeded random loops in
//! `U(n)`, `Sp(2n)` and `Γ_k`.

use std::sync::Arc;

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};
use crate::grassmann::{align_grids, pushforward, CoisotropicLoop, MatrixFamily, SubspaceFamily, SymplecticMatrixLoop};
use crate::linalg;
use crate::maslov::{canonical_coordinate, maslov_index, pushforward_section, MaslovSection, SectionRule};
use crate::rng;
use crate::scalar::{cis, lit, Real};
use crate::symplin::{AdaptedFrame, Subspace, SymplecticSpace};
use crate::tolerance::Tolerances;

/// A family `θ ↦ U(θ)` of complex `n×n` matrices.
pub type UnitaryFamily<T> = Arc<dyn Fn(T) -> DMatrix<Complex<T>> + Send + Sync>;

/// Real `2n×(n+k)` basis of the standard model `C^k ⊕ R^{n−k}`.
fn standard_basis<T: Real>(n: usize, k: usize) -> DMatrix<T> {
    let mut b = DMatrix::zeros(2 * n, n + k);
    for j in 0..n {
        b[(j, j)] = T::one();
    }
    for a in 0..k {
        b[(n + a, n + a)] = T::one();
    }
    b
}

/// `θ ↦ U(θ)·(C^k ⊕ R^{n−k})`.
pub fn unitary_orbit<T: Real>(n: usize, k: usize, u: UnitaryFamily<T>) -> SubspaceFamily<T> {
    let base = standard_basis::<T>(n, k);
    Arc::new(move |th: T| Ok(Subspace::span(&(linalg::realify(&u(th)) * &base))))
}

/// `diag(e^{i w_j θ})`.
pub fn diagonal_phases<T: Real>(windings: Vec<i64>) -> UnitaryFamily<T> {
    Arc::new(move |th: T| {
        let d: Vec<Complex<T>> = windings.iter().map(|&w| cis(th * lit(w as f64))).collect();
        DMatrix::from_diagonal(&nalgebra::DVector::from_vec(d))
    })
}

/// The Lagrangian rotation `t ↦ e^{iπt} R^n`, `t = θ/2π`.
pub fn lagrangian_rotation<T: Real>(n: usize) -> SubspaceFamily<T> {
    let half = diagonal_phases::<T>(vec![1; n]);
    Arc::new(move |th: T| {
        let u = half(th * lit(0.5));
        Ok(Subspace::span(&(linalg::realify(&u) * standard_basis::<T>(n, 0))))
    })
}

/// Bases `(Re U; Im U)` of the Lagrangian loop `U(θ) R^n`.
pub fn lagrangian_bases<T: Real>(u: &UnitaryFamily<T>, thetas: &[T]) -> Vec<DMatrix<T>> {
    thetas
        .iter()
        .map(|&t| {
            let m = u(t);
            linalg::realify(&m).columns(0, m.ncols()).into_owned()
        })
        .collect()
}

/// The unitary path `θ ↦ e^{iθ/2}·I`, whose Lagrangian orbit is [`lagrangian_rotation`].
pub fn half_rotation<T: Real>(n: usize) -> UnitaryFamily<T> {
    let d = diagonal_phases::<T>(vec![1; n]);
    Arc::new(move |th: T| d(th * lit(0.5)))
}

/// Seeded random loop `U_0 · exp(X(θ)) · diag(e^{i w_j θ})` in `U(n)`, where `X` is a
/// skew-Hermitian trigonometric polynomial with `modes` harmonics of size `amplitude`.
pub fn random_unitary_loop<T: Real>(n: usize, seed: u64, windings: Vec<i64>, amplitude: T, modes: usize) -> UnitaryFamily<T> {
    let mut g = rng::stream(seed, 0xc1);
    let u0 = rng::random_unitary::<T>(n, &mut g);
    let coeffs: Vec<[DMatrix<Complex<T>>; 2]> = (0..modes)
        .map(|_| [rng::random_skew_hermitian(n, amplitude, &mut g), rng::random_skew_hermitian(n, amplitude, &mut g)])
        .collect();
    let d = diagonal_phases::<T>(windings);
    Arc::new(move |th: T| {
        let mut x = DMatrix::<Complex<T>>::zeros(n, n);
        for (m, [a, b]) in coeffs.iter().enumerate() {
            let arg = th * lit((m + 1) as f64);
            x += a.map(|z| z.scale(arg.cos())) + b.map(|z| z.scale(arg.sin()));
        }
        &u0 * x.exp() * d(th)
    })
}

/// `n` seeded windings in `−bound..=bound`.
pub fn random_windings(n: usize, seed: u64, bound: i64) -> Vec<i64> {
    let mut g = rng::stream(seed, 0xd7);
    (0..n).map(|_| rng::symmetric_int(&mut g, bound)).collect()
}

/// Realified unitary loop as a symplectic matrix family.
pub fn unitary_matrix_loop<T: Real>(u: UnitaryFamily<T>) -> MatrixFamily<T> {
    Arc::new(move |th: T| linalg::realify(&u(th)))
}

/// Seeded random symplectic loop `exp(−Ω S(θ)) · U(θ)` with `S` a real symmetric
/// trigonometric polynomial and `U` from [`random_unitary_loop`].
pub fn random_symplectic_loop<T: Real>(n: usize, seed: u64, windings: Vec<i64>, amplitude: T, modes: usize) -> MatrixFamily<T> {
    let s = SymplecticSpace::<T>::new(n).expect("n is positive");
    let omega = s.omega().clone();
    let mut g = rng::stream(seed, 0x5e);
    let sym = |g: &mut rng::Rng| {
        let a = rng::gaussian_matrix::<T>(2 * n, 2 * n, g);
        (&a + a.transpose()) * (amplitude * lit(0.5))
    };
    let coeffs: Vec<(DMatrix<T>, DMatrix<T>)> = (0..modes).map(|_| (sym(&mut g), sym(&mut g))).collect();
    let u = random_unitary_loop(n, seed ^ 0x9e37_79b9, windings, amplitude, modes);
    Arc::new(move |th: T| {
        let mut x = DMatrix::<T>::zeros(2 * n, 2 * n);
        for (m, (a, b)) in coeffs.iter().enumerate() {
            let arg = th * lit((m + 1) as f64);
            x += a * arg.cos() + b * arg.sin();
        }
        (-(&omega * x)).exp() * linalg::realify(&u(th))
    })
}

/// The orientation-preserving circle diffeomorphism `θ ↦ θ + a(sin(θ+b) − sin b)`, `|a| < 1`.
pub fn reparameterization<T: Real>(a: T, b: T) -> Arc<dyn Fn(T) -> T + Send + Sync> {
    Arc::new(move |th: T| th + a * ((th + b).sin() - b.sin()))
}

/// `γ ∘ φ`.
pub fn reparameterized<T: Real>(family: SubspaceFamily<T>, phi: Arc<dyn Fn(T) -> T + Send + Sync>) -> SubspaceFamily<T> {
    Arc::new(move |th: T| family(phi(th)))
}

/// Section `e^{i(wθ + c sin(θ + d))} · ζ_(γ;dz)`, with `c, d` drawn from `seed`.
#[derive(Debug, Clone)]
pub struct RandomSection<T: Real> {
    pub winding: i64,
    pub wobble: T,
    pub shift: T,
    pub reparameterize: Option<(T, T)>,
    pub tol: Tolerances,
}

impl<T: Real> RandomSection<T> {
    pub fn new(winding: i64, seed: u64) -> Self {
        let mut g = rng::stream(seed, 0x5ec);
        let wobble = rng::normal::<T>(&mut g) * lit(0.5);
        let shift = rng::normal::<T>(&mut g);
        Self { winding, wobble, shift, reparameterize: None, tol: Tolerances::default() }
    }

    /// The same section precomposed with [`reparameterization`]`(a, b)`.
    pub fn reparameterized(mut self, a: T, b: T) -> Self {
        self.reparameterize = Some((a, b));
        self
    }
}

impl<T: Real> SectionRule<T> for RandomSection<T> {
    fn coordinate(&self, theta: T, frame: &AdaptedFrame<T>) -> Result<Complex<T>> {
        let th = match self.reparameterize {
            Some((a, b)) => reparameterization(a, b)(theta),
            None => theta,
        };
        let phase = th * lit(self.winding as f64) + self.wobble * (th + self.shift).sin();
        Ok(cis(phase) * canonical_coordinate(frame, &self.tol)?)
    }
}

/// A loop, a section on it and a symplectic matrix loop on a common grid on
/// which the pushforward loop is continuous and neither index aliases.
#[derive(Debug, Clone)]
pub struct Triple<T: Real> {
    pub gamma: CoisotropicLoop<T>,
    pub zeta: MaslovSection<T>,
    pub a: SymplecticMatrixLoop<T>,
}

/// Builds a [`Triple`], doubling the grid until `A·γ` is continuous and both indices resolve.
pub fn aligned_triple<T: Real>(
    s: &SymplecticSpace<T>,
    k: usize,
    family: SubspaceFamily<T>,
    matrices: MatrixFamily<T>,
    rule: &dyn SectionRule<T>,
    m: usize,
) -> Result<Triple<T>> {
    let mut m = m;
    loop {
        let gamma = CoisotropicLoop::from_family(s, k, family.clone(), m)?;
        let a = SymplecticMatrixLoop::from_family(s, matrices.clone(), gamma.len())?;
        let (a, gamma) = align_grids(&a, &gamma)?;
        let attempt = pushforward(&a, &gamma).and_then(|_| {
            let zeta = MaslovSection::from_rule(&gamma, rule)?;
            maslov_index(&gamma, &zeta)?;
            let (g2, z2) = pushforward_section(&a, &gamma, &zeta)?;
            maslov_index(&g2, &z2)?;
            Ok(zeta)
        });
        match attempt {
            Ok(zeta) => return Ok(Triple { gamma, zeta, a }),
            Err(Error::DiscontinuousLoop { max_step, samples }) => {
                if 2 * gamma.len() > s.tol().max_loop_samples {
                    return Err(Error::DiscontinuousLoop { max_step, samples });
                }
                m = 2 * gamma.len();
            }
            Err(Error::Aliasing { index, jump }) => {
                if 2 * gamma.len() > s.tol().max_loop_samples {
                    return Err(Error::Aliasing { index, jump });
                }
                m = 2 * gamma.len();
            }
            Err(e) => return Err(e),
        }
    }
}
