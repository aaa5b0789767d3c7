//! Symplectic linear algebra on `R^{2n}` with its standard Kähler structure.
//!
//! Coordinates are `(x_1..x_n, y_1..y_n)` with `z_j = x_j + i y_j`. The
//! symplectic form is `ω(X, Y) = XᵀΩY` with `ω(e_i, f_j) = δ_ij`, the complex
//! structure `J` sends `e_j` to `f_j`, and `g = ω(·, J·)` is the Euclidean metric.

mod frame;
mod random;

pub use frame::{adapted_frame, AdaptedFrame};
pub(crate) use frame::pivoted_gram_schmidt;
pub use random::{random_coisotropic, random_lagrangian_basis};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::{to_f64, Real};
use crate::tolerance::Tolerances;

/// `R^{2n}` with the standard symplectic form, complex structure and metric.
#[derive(Debug, Clone)]
pub struct SymplecticSpace<T: Real> {
    n: usize,
    omega: DMatrix<T>,
    j: DMatrix<T>,
    g: DMatrix<T>,
    tol: Tolerances,
}

impl<T: Real> SymplecticSpace<T> {
    pub fn new(n: usize) -> Result<Self> {
        Self::with_tolerances(n, Tolerances::default())
    }

    pub fn with_tolerances(n: usize, tol: Tolerances) -> Result<Self> {
        if n == 0 {
            return Err(Error::Argument("complex dimension must be positive".into()));
        }
        let mut omega = DMatrix::zeros(2 * n, 2 * n);
        let mut j = DMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            omega[(i, n + i)] = T::one();
            omega[(n + i, i)] = -T::one();
            j[(n + i, i)] = T::one();
            j[(i, n + i)] = -T::one();
        }
        // g(X,Y) = ω(X, JY) = Xᵀ Ω J Y
        let g = &omega * &j;
        let space = Self { n, omega, j, g, tol };
        space.check_invariants()?;
        Ok(space)
    }

    /// Complex dimension `n`.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Real dimension `2n`.
    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn omega(&self) -> &DMatrix<T> {
        &self.omega
    }

    pub fn j(&self) -> &DMatrix<T> {
        &self.j
    }

    /// Gram matrix of the metric `g(X,Y) = ω(X, JY)`.
    pub fn g(&self) -> &DMatrix<T> {
        &self.g
    }

    pub fn tol(&self) -> &Tolerances {
        &self.tol
    }

    pub fn omega_of(&self, v: &DVector<T>, w: &DVector<T>) -> T {
        v.dot(&(&self.omega * w))
    }

    /// `J v`, computed by permutation rather than a matrix product.
    pub fn apply_j(&self, v: &DVector<T>) -> DVector<T> {
        let n = self.n;
        DVector::from_fn(2 * n, |i, _| if i < n { -v[n + i] } else { v[i - n] })
    }

    pub fn apply_j_columns(&self, m: &DMatrix<T>) -> DMatrix<T> {
        let n = self.n;
        DMatrix::from_fn(m.nrows(), m.ncols(), |i, c| if i < n { -m[(n + i, c)] } else { m[(i - n, c)] })
    }

    /// Basis vector `e_j` (0-based).
    pub fn e(&self, j: usize) -> DVector<T> {
        DVector::from_fn(2 * self.n, |i, _| if i == j { T::one() } else { T::zero() })
    }

    /// Basis vector `f_j = J e_j` (0-based).
    pub fn f(&self, j: usize) -> DVector<T> {
        DVector::from_fn(2 * self.n, |i, _| if i == self.n + j { T::one() } else { T::zero() })
    }

    /// Verifies antisymmetry and nondegeneracy of `Ω`, `J² = −I`, `JᵀΩJ = Ω`
    /// and positivity of `g`.
    pub fn check_invariants(&self) -> Result<()> {
        let m = 2 * self.n;
        let eps = self.tol.isotropy;
        let id = DMatrix::<T>::identity(m, m);
        let bad = |what: &str, x: T| -> Result<()> {
            if to_f64(x) > eps {
                Err(Error::Consistency(format!("{what} violated by {:e}", to_f64(x))))
            } else {
                Ok(())
            }
        };
        bad("antisymmetry of omega", linalg::max_abs(&(&self.omega + self.omega.transpose())))?;
        bad("J squared = -1", linalg::max_abs(&(&self.j * &self.j + &id)))?;
        bad("J preserves omega", linalg::max_abs(&(self.j.transpose() * &self.omega * &self.j - &self.omega)))?;
        bad("symmetry of g", linalg::max_abs(&(&self.g - self.g.transpose())))?;
        let det = self.omega.clone().determinant();
        if to_f64(det.abs()) < 0.5 {
            return Err(Error::Consistency("omega is degenerate".into()));
        }
        let lam = self.g.clone().symmetric_eigen().eigenvalues;
        if lam.iter().any(|&x| to_f64(x) <= eps) {
            return Err(Error::Consistency("g is not positive definite".into()));
        }
        Ok(())
    }
}

/// A linear subspace of `R^{2n}` held as a column-orthonormal basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace<T: Real> {
    basis: DMatrix<T>,
}

impl<T: Real> Subspace<T> {
    /// Wraps a basis that is already orthonormal, checking it.
    pub fn from_orthonormal(basis: DMatrix<T>, tol: &Tolerances) -> Result<Self> {
        let defect = to_f64(linalg::orthonormality_defect(&basis));
        if defect > tol.orthonormality {
            return Err(Error::Argument(format!("basis is not orthonormal (defect {defect:e})")));
        }
        Ok(Self { basis })
    }

    /// Span of the columns of `vectors`; numerically dependent columns are dropped.
    pub fn span(vectors: &DMatrix<T>) -> Self {
        Self { basis: linalg::orthonormalize(vectors, 1e-10) }
    }

    pub fn zero(ambient: usize) -> Self {
        Self { basis: DMatrix::zeros(ambient, 0) }
    }

    pub fn whole(ambient: usize) -> Self {
        Self { basis: DMatrix::identity(ambient, ambient) }
    }

    pub fn basis(&self) -> &DMatrix<T> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    /// Orthogonal projector onto the subspace.
    pub fn projector(&self) -> DMatrix<T> {
        &self.basis * self.basis.transpose()
    }

    pub fn project(&self, v: &DVector<T>) -> DVector<T> {
        &self.basis * (self.basis.transpose() * v)
    }

    /// Norm of the component of `v` orthogonal to the subspace.
    pub fn distance_to(&self, v: &DVector<T>) -> T {
        (v - self.project(v)).norm()
    }

    /// Orthogonal complement in `R^{2n}`.
    pub fn orthogonal_complement(&self) -> Self {
        let m = self.ambient_dim();
        if self.dim() == 0 {
            return Self::whole(m);
        }
        let p = DMatrix::<T>::identity(m, m) - self.projector();
        Self { basis: linalg::range_basis(&p, m - self.dim()) }
    }

    /// Largest principal angle between `self` and `other` (which must have equal dimension).
    pub fn max_angle(&self, other: &Self) -> Result<T> {
        Ok(principal_angles(self, other)?.into_iter().fold(T::zero(), |a, b| a.max(b)))
    }

    /// True when the spans agree up to the principal-angle tolerance.
    pub fn same_span(&self, other: &Self, tol: &Tolerances) -> bool {
        self.dim() == other.dim()
            && self.ambient_dim() == other.ambient_dim()
            && self.max_angle(other).map(|a| to_f64(a) < tol.subspace_angle).unwrap_or(false)
    }

    /// Largest sine of the angle between a unit vector of `inner` and `self`.
    pub fn containment_residual(&self, inner: &Self) -> T {
        if inner.dim() == 0 {
            return T::zero();
        }
        let r = inner.basis() - self.projector() * inner.basis();
        linalg::op_norm(&r)
    }
}

/// Principal angles in `[0, π/2]`, sorted by decreasing cosine.
///
/// Cosines and sines come from separate SVDs so both small and large angles
/// are resolved to full precision.
pub fn principal_angles<T: Real>(a: &Subspace<T>, b: &Subspace<T>) -> Result<Vec<T>> {
    if a.dim() != b.dim() || a.ambient_dim() != b.ambient_dim() {
        return Err(Error::Argument(format!(
            "principal angles need equal dimensions, got {} and {}",
            a.dim(),
            b.dim()
        )));
    }
    let m = a.dim();
    if m == 0 {
        return Ok(Vec::new());
    }
    let cos = linalg::singular_values(&(a.basis().transpose() * b.basis()));
    let resid = b.basis() - a.projector() * b.basis();
    let mut sin = linalg::singular_values(&resid);
    sin.reverse();
    let thresh = T::FRAC_1_SQRT_2();
    Ok((0..m)
        .map(|i| {
            let c = cos[i].min(T::one());
            if c > thresh {
                sin[i].min(T::one()).asin()
            } else {
                c.max(T::zero()).acos()
            }
        })
        .collect())
}

/// `C^ω = {v : ω(v, c) = 0 for all c ∈ C}`.
pub fn symplectic_complement<T: Real>(s: &SymplecticSpace<T>, c: &Subspace<T>) -> Result<Subspace<T>> {
    if c.ambient_dim() != s.dim() {
        return Err(Error::Argument("subspace lives in a different ambient space".into()));
    }
    let a = c.basis().transpose() * s.omega();
    let k = linalg::null_space(&a, s.tol().svd_cutoff, s.tol().svd_gap)?;
    if k.ncols() != s.dim() - c.dim() {
        return Err(Error::Degenerate(format!(
            "complement has dimension {} instead of {}",
            k.ncols(),
            s.dim() - c.dim()
        )));
    }
    Ok(Subspace { basis: k })
}

/// A certified coisotropic subspace with its splitting `C = H_C ⊕ C^ω`.
#[derive(Debug, Clone)]
pub struct CoisotropicSubspace<T: Real> {
    space: Subspace<T>,
    k: usize,
    kernel: Subspace<T>,
    h_part: Subspace<T>,
}

impl<T: Real> CoisotropicSubspace<T> {
    pub fn space(&self) -> &Subspace<T> {
        &self.space
    }

    /// Rank parameter: `dim C = n + k`.
    pub fn k(&self) -> usize {
        self.k
    }

    /// The null directions `C^ω`, of dimension `n − k`.
    pub fn kernel(&self) -> &Subspace<T> {
        &self.kernel
    }

    /// The `J`-invariant complement `H_C` of the kernel in `C`, of dimension `2k`.
    pub fn h_part(&self) -> &Subspace<T> {
        &self.h_part
    }

    /// `S = C^ω ⊕ J C^ω`.
    pub fn kernel_complexification(&self, s: &SymplecticSpace<T>) -> Subspace<T> {
        let k = self.kernel.basis();
        let jk = s.apply_j_columns(k);
        let mut m = DMatrix::zeros(k.nrows(), 2 * k.ncols());
        m.columns_mut(0, k.ncols()).copy_from(k);
        m.columns_mut(k.ncols(), k.ncols()).copy_from(&jk);
        Subspace::span(&m)
    }
}

/// Certifies `C` as coisotropic and computes its canonical splitting.
pub fn classify_coisotropic<T: Real>(s: &SymplecticSpace<T>, c: &Subspace<T>) -> Result<CoisotropicSubspace<T>> {
    let n = s.n();
    let m = c.dim();
    if c.ambient_dim() != s.dim() {
        return Err(Error::Argument("subspace lives in a different ambient space".into()));
    }
    if m < n {
        return Err(Error::NotCoisotropic {
            reason: format!("dimension {m} is below the complex dimension {n}"),
            witness: None,
        });
    }
    let tol = s.tol();
    let kernel = symplectic_complement(s, c)?;
    // the complement vector leaving C the most
    if kernel.dim() > 0 {
        let resid = kernel.basis() - c.projector() * kernel.basis();
        let (u, sv, v) = linalg::svd_sorted(&resid);
        let worst = to_f64(sv[0]);
        if worst > tol.subspace_angle.sin() {
            let dir = kernel.basis() * v.column(0);
            let out = u.column(0) * sv[0];
            return Err(Error::NotCoisotropic {
                reason: format!("symplectic complement leaves the subspace (sine {worst:e})"),
                witness: Some((dir.iter().map(|&x| to_f64(x)).collect(), out.iter().map(|&x| to_f64(x)).collect())),
            });
        }
        let iso = to_f64(linalg::max_abs(&(kernel.basis().transpose() * s.omega() * c.basis())));
        if iso > tol.isotropy {
            return Err(Error::NotCoisotropic {
                reason: format!("kernel is not ω-orthogonal to the subspace ({iso:e})"),
                witness: None,
            });
        }
    }
    let k = m - n;
    let h_part = if k == 0 {
        Subspace::zero(s.dim())
    } else {
        let p = c.basis() - kernel.projector() * c.basis();
        Subspace { basis: linalg::range_basis(&p, 2 * k) }
    };
    if k > 0 {
        let jh = s.apply_j_columns(h_part.basis());
        let leak = to_f64(linalg::op_norm(&(&jh - h_part.projector() * &jh)));
        if leak > tol.subspace_angle.sin().max(tol.isotropy) {
            return Err(Error::Consistency(format!("complement of the kernel is not J-invariant ({leak:e})")));
        }
    }
    Ok(CoisotropicSubspace { space: c.clone(), k, kernel, h_part })
}

/// The standard model `C^k ⊕ R^{n−k} = span{e_1..e_n, f_1..f_k}`.
pub fn standard_model<T: Real>(s: &SymplecticSpace<T>, k: usize) -> Result<CoisotropicSubspace<T>> {
    if k > s.n() {
        return Err(Error::Argument(format!("rank {k} exceeds the complex dimension {}", s.n())));
    }
    let n = s.n();
    let basis = DMatrix::from_fn(2 * n, n + k, |i, j| if (j < n && i == j) || (j >= n && i == j) { T::one() } else { T::zero() });
    classify_coisotropic(s, &Subspace { basis })
}

/// Dimension `(n+3k+1)(n−k)/2` of the Grassmannian of coisotropic `(n+k)`-planes in `R^{2n}`.
pub fn grassmannian_dim(n: usize, k: usize) -> Result<usize> {
    if k > n {
        return Err(Error::Argument(format!("rank {k} exceeds the complex dimension {n}")));
    }
    Ok((n + 3 * k + 1) * (n - k) / 2)
}
