use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};

use super::sff::{second_fundamental_form, SffBlocks};
use super::surface::{LevelSetHypersurface, TangentSplitting};
use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::{cabs, lit, to_f64, Real};

/// The Levi form on `N_J𝓕` at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct LeviForm<T: Real> {
    /// `dd^cρ(X_i, X_j) = ⟨H J X_i, X_j⟩ − ⟨H X_i, J X_j⟩` on `(e_1..e_k, f_1..f_k)`,
    /// with `H = Hess ρ/|∇ρ|` and `d^cρ = −dρ∘J`.
    pub ddc: DMatrix<T>,
    /// `L(X,Y) = ½ dd^cρ(X, JY)`, symmetric and `J`-invariant; `L(X,X) = 1` for
    /// unit `X` on the unit sphere.
    pub quadratic: DMatrix<T>,
    /// Eigenvalues of the Hermitian Levi matrix `L(u_a, ū_b)`-scaled to match `quadratic`.
    pub eigenvalues: Vec<T>,
    pub positive_definite: bool,
    pub flat: bool,
}

impl<T: Real> LeviForm<T> {
    /// `L(X,X)` for `X = Σ x_i X_i` in the `N_J𝓕` basis.
    pub fn value(&self, x: &DVector<T>) -> T {
        x.dot(&(&self.quadratic * x))
    }
}

/// Levi form of `Y` at the splitting's point.
pub fn levi_form<T: Real>(y: &LevelSetHypersurface<T>, split: &TangentSplitting<T>) -> Result<LeviForm<T>> {
    let s = y.space();
    let h = y.hessian(&split.point) / split.grad_norm;
    let basis = split.frame.h_basis();
    let jb = s.apply_j_columns(&basis);
    let hb = &h * &basis;
    let hjb = &h * &jb;
    // ddc[(i,j)] = ⟨H J X_i, X_j⟩ − ⟨H X_i, J X_j⟩
    let ddc = hjb.transpose() * &basis - hb.transpose() * &jb;
    // L(X_i, X_j) = ½ ddc(X_i, J X_j) = ½(⟨H J X_i, J X_j⟩ + ⟨H X_i, X_j⟩)
    let quadratic = (hjb.transpose() * &jb + hb.transpose() * &basis) * lit::<T>(0.5);
    let sym = (&quadratic + quadratic.transpose()) * lit::<T>(0.5);
    let mut eigenvalues: Vec<T> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
    eigenvalues.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    // each complex eigenvalue appears twice in the real form
    let eigenvalues: Vec<T> = eigenvalues.iter().step_by(2).copied().collect();
    let floor = s.tol().leafwise_special;
    let positive_definite = eigenvalues.iter().all(|&e| to_f64(e) > floor);
    let flat = eigenvalues.iter().all(|&e| to_f64(e).abs() <= floor);
    Ok(LeviForm { ddc, quadratic, eigenvalues, positive_definite, flat })
}

/// Transverse symplectic curvature at one point, with its complex type decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct TransverseCurvature<T: Real> {
    pub k: usize,
    /// Entry `i`: coefficients along the leaf direction `e_{k+1+i}`, an antisymmetric
    /// `2k×2k` matrix on `(e_1..e_k, f_1..f_k)`.
    pub components: Vec<DMatrix<T>>,
    /// `F(u_a, u_b)` with `u_a = ½(e_a − i f_a)`, per component.
    pub f20: Vec<DMatrix<Complex<T>>>,
    /// `F(u_a, ū_b)`, per component.
    pub f11: Vec<DMatrix<Complex<T>>>,
    /// `F(ū_a, ū_b)`, per component.
    pub f02: Vec<DMatrix<Complex<T>>>,
    /// Largest entrywise difference between `F` and its reassembled type components.
    pub reassembly_residual: T,
    /// `ρ^trans = −Σ_a (A^α_{aa} + D^α_{aa})`, per normal.
    pub rho_trans: Option<DVector<T>>,
    /// `max |C^α_{ab} − C^α_{ba}|` over `a,b ≤ k`, when computed from blocks.
    pub c_asymmetry: Option<T>,
}

impl<T: Real> TransverseCurvature<T> {
    /// Builds the type decomposition of the given real components.
    pub fn from_components(k: usize, components: Vec<DMatrix<T>>) -> Self {
        let mut f20 = Vec::new();
        let mut f11 = Vec::new();
        let mut f02 = Vec::new();
        let mut resid = T::zero();
        let half = lit::<T>(0.5);
        for f in &components {
            let fc = f.map(|x| Complex::new(x, T::zero()));
            // columns: u_a = ½(e_a − i f_a), ū_a = ½(e_a + i f_a) in the (e, f) basis
            let mut u = DMatrix::<Complex<T>>::zeros(2 * k, k);
            for a in 0..k {
                u[(a, a)] = Complex::new(half, T::zero());
                u[(k + a, a)] = Complex::new(T::zero(), -half);
            }
            let ub = u.map(|z| z.conj());
            let p = u.transpose() * &fc * &u;
            let q = u.transpose() * &fc * &ub;
            let r = ub.transpose() * &fc * &ub;
            // θ^a = e*_a + i f*_a on the basis vectors
            let mut theta = DMatrix::<Complex<T>>::zeros(k, 2 * k);
            for a in 0..k {
                theta[(a, a)] = Complex::new(T::one(), T::zero());
                theta[(a, k + a)] = Complex::new(T::zero(), T::one());
            }
            let thb = theta.map(|z| z.conj());
            // F = ½ P θ∧θ + Q θ∧θ̄ + ½ R θ̄∧θ̄
            let pp = theta.transpose() * &p * &theta;
            let qq = theta.transpose() * &q * &thb;
            let rr = thb.transpose() * &r * &thb;
            let re = &pp + &qq - qq.transpose() + &rr;
            let diff = re - &fc;
            resid = resid.max(diff.iter().fold(T::zero(), |m, z| m.max(cabs(*z))));
            f20.push(p);
            f11.push(q);
            f02.push(r);
        }
        Self { k, components, f20, f11, f02, reassembly_residual: resid, rho_trans: None, c_asymmetry: None }
    }

    /// The single component of a hypersurface (coefficient along `X_ρ`).
    pub fn scalar(&self) -> &DMatrix<T> {
        &self.components[0]
    }

    /// Largest `|F^{2,0}|` and `|F^{0,2}|` entry over all components.
    pub fn non_11_part(&self) -> T {
        let m = |v: &Vec<DMatrix<Complex<T>>>| v.iter().flat_map(|x| x.iter()).fold(T::zero(), |acc, z| acc.max(cabs(*z)));
        m(&self.f20).max(m(&self.f02))
    }

    pub fn is_type_11(&self, tol: f64) -> bool {
        to_f64(self.non_11_part()) < tol
    }

    /// Largest entrywise difference of the real components.
    pub fn distance(&self, other: &Self) -> T {
        self.components
            .iter()
            .zip(&other.components)
            .fold(T::zero(), |m, (a, b)| m.max((a - b).amax()))
    }

    /// Largest entry of `|F|`.
    pub fn max_abs(&self) -> T {
        self.components.iter().fold(T::zero(), |m, a| m.max(a.amax()))
    }
}

/// `F` from second fundamental form blocks:
/// `F(e_a,e_b) = C_ba − C_ab`, `F(f_a,f_b) = B_ab − B_ba`, `F(e_a,f_b) = −A_ba − D_ab`.
pub fn transverse_curvature_from_blocks<T: Real>(blocks: &SffBlocks<T>) -> TransverseCurvature<T> {
    let k = blocks.k;
    let mut comps = Vec::new();
    let mut rho = DVector::zeros(blocks.normals.len());
    let mut casym = T::zero();
    for (i, blk) in blocks.normals.iter().enumerate() {
        let mut f = DMatrix::zeros(2 * k, 2 * k);
        for a in 0..k {
            for b in 0..k {
                f[(a, b)] = blk.c[(b, a)] - blk.c[(a, b)];
                f[(k + a, k + b)] = blk.b[(a, b)] - blk.b[(b, a)];
                let mixed = -blk.a[(b, a)] - blk.d[(a, b)];
                f[(a, k + b)] = mixed;
                f[(k + b, a)] = -mixed;
                casym = casym.max((blk.c[(a, b)] - blk.c[(b, a)]).abs());
            }
            rho[i] -= blk.a[(a, a)] + blk.d[(a, a)];
        }
        comps.push(f);
    }
    let mut out = TransverseCurvature::from_components(k, comps);
    out.rho_trans = Some(rho);
    out.c_asymmetry = Some(casym);
    out
}

/// `F` of `Y` at the splitting's point, assembled from the second fundamental form.
pub fn transverse_curvature_sff<T: Real>(y: &LevelSetHypersurface<T>, split: &TangentSplitting<T>) -> Result<TransverseCurvature<T>> {
    Ok(transverse_curvature_from_blocks(&second_fundamental_form(y, split)?))
}

/// How an `N_J𝓕` vector at `p` is extended to a vector field near `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extension {
    /// `X(q) = P(q) v`, the orthogonal projection onto `N_J𝓕(q)`.
    Projected,
    /// `X(q) = R(q) v` for the unitary `R(q)` rotating `ν(p)` to a phase-aligned `ν(q)`
    /// in the complex line they span.
    Transported,
}

fn complex_of<T: Real>(v: &DVector<T>) -> DVector<Complex<T>> {
    linalg::to_complex(v)
}

fn extend<T: Real>(y: &LevelSetHypersurface<T>, ext: Extension, nu_p: &DVector<Complex<T>>, v: &DVector<T>, q: &DVector<T>) -> Result<DVector<T>> {
    match ext {
        Extension::Projected => Ok(y.complex_tangency_projector(q)? * v),
        Extension::Transported => {
            let (nu_q, _) = y.unit_normal(q)?;
            let b = complex_of(&nu_q);
            let ip = nu_p.dotc(&b);
            let ph = cabs(ip);
            if to_f64(ph) < 0.5 {
                return Err(Error::NumericalQuality("normal rotates too far for transported extension".into()));
            }
            let b = b * (ip.conj() / Complex::new(ph, T::zero()));
            let c = Complex::new(ph, T::zero());
            let one = Complex::new(T::one(), T::zero());
            let z = complex_of(v);
            let s = nu_p + &b;
            let rz = &z - &s * (s.dotc(&z) / (one + c)) + &b * (nu_p.dotc(&z) * lit::<T>(2.0));
            Ok(linalg::to_real(&rz))
        }
    }
}

/// `F` of `Y` at the splitting's point from Lie brackets of extended `N_J𝓕` fields,
/// differenced with step `tol.bracket_step`.
pub fn transverse_curvature_bracket<T: Real>(
    y: &LevelSetHypersurface<T>,
    split: &TangentSplitting<T>,
    ext: Extension,
) -> Result<TransverseCurvature<T>> {
    let s = y.space();
    let h: T = lit(s.tol().bracket_step);
    let two = lit::<T>(2.0);
    let p = &split.point;
    let basis = split.frame.h_basis();
    let k = basis.ncols() / 2;
    let nu_p = complex_of(&split.normal);
    let fields: Vec<DVector<T>> = (0..2 * k).map(|i| basis.column(i).into_owned()).collect();
    // derivative of field i along field j
    let mut deriv = vec![vec![DVector::zeros(s.dim()); 2 * k]; 2 * k];
    for (i, v) in fields.iter().enumerate() {
        for (j, w) in fields.iter().enumerate() {
            let fwd = extend(y, ext, &nu_p, v, &(p + w * h))?;
            let bwd = extend(y, ext, &nu_p, v, &(p - w * h))?;
            deriv[i][j] = (fwd - bwd) / (two * h);
        }
    }
    let mut f = DMatrix::zeros(2 * k, 2 * k);
    let mut tangency = 0.0f64;
    let mut scale = 1.0f64;
    for i in 0..2 * k {
        for j in 0..2 * k {
            // [X_i, X_j] = D_{X_i} X_j − D_{X_j} X_i
            let br = &deriv[j][i] - &deriv[i][j];
            tangency = tangency.max(to_f64(br.dot(&split.normal).abs()));
            scale = scale.max(to_f64(br.norm()));
            f[(i, j)] = br.dot(&split.x_rho);
        }
    }
    if tangency > s.tol().bracket_tangency * scale {
        return Err(Error::NumericalQuality(format!("bracket leaves the hypersurface by {tangency:e}")));
    }
    let f = (&f - f.transpose()) * lit::<T>(0.5);
    Ok(TransverseCurvature::from_components(k, vec![f]))
}

/// Outcome of the two-route integrability test.
#[derive(Debug, Clone, PartialEq)]
pub struct Integrability<T: Real> {
    pub integrable: bool,
    pub sff_non_11: T,
    pub bracket_non_11: T,
    /// Frame-dependent diagnostic `max |C_ab − C_ba|`.
    pub c_asymmetry: T,
}

/// Whether the transverse curvature is of type (1,1), tested on the second
/// fundamental form route and the bracket route; the routes must agree.
pub fn is_integrable_prekahler<T: Real>(y: &LevelSetHypersurface<T>, split: &TangentSplitting<T>) -> Result<Integrability<T>> {
    let tol = y.space().tol();
    let sff = transverse_curvature_sff(y, split)?;
    let br = transverse_curvature_bracket(y, split, Extension::Projected)?;
    let a = sff.is_type_11(tol.integrability);
    let b = br.is_type_11(tol.route_agreement);
    if a != b {
        return Err(Error::Consistency(format!(
            "type (1,1) test disagrees between routes ({:e} vs {:e})",
            to_f64(sff.non_11_part()),
            to_f64(br.non_11_part())
        )));
    }
    Ok(Integrability {
        integrable: a,
        sff_non_11: sff.non_11_part(),
        bracket_non_11: br.non_11_part(),
        c_asymmetry: sff.c_asymmetry.unwrap_or_else(T::zero),
    })
}
