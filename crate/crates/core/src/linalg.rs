//! Dense linear-algebra helpers: complex identification, SVD utilities, polar factors.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

/// Complex vector `z_j = x_j + i y_j` of a real vector `(x_1..x_n, y_1..y_n)`.
pub fn to_complex<T: Real>(v: &DVector<T>) -> DVector<Complex<T>> {
    let n = v.len() / 2;
    DVector::from_fn(n, |j, _| Complex::new(v[j], v[n + j]))
}

/// Inverse of [`to_complex`].
pub fn to_real<T: Real>(z: &DVector<Complex<T>>) -> DVector<T> {
    let n = z.len();
    DVector::from_fn(2 * n, |i, _| if i < n { z[i].re } else { z[i - n].im })
}

/// Columns of `m` read as complex vectors.
pub fn columns_to_complex<T: Real>(m: &DMatrix<T>) -> DMatrix<Complex<T>> {
    let n = m.nrows() / 2;
    DMatrix::from_fn(n, m.ncols(), |i, j| Complex::new(m[(i, j)], m[(n + i, j)]))
}

/// Real `2n×2m` matrix of a complex-linear map `C^m → C^n`.
pub fn realify<T: Real>(m: &DMatrix<Complex<T>>) -> DMatrix<T> {
    let (r, c) = m.shape();
    DMatrix::from_fn(2 * r, 2 * c, |i, j| {
        let z = m[(i % r, j % c)];
        match (i < r, j < c) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}

/// Complex `n×m` matrix read off the left block column of a real matrix that commutes with `J`.
pub fn complexify<T: Real>(m: &DMatrix<T>) -> DMatrix<Complex<T>> {
    let r = m.nrows() / 2;
    let c = m.ncols() / 2;
    DMatrix::from_fn(r, c, |i, j| Complex::new(m[(i, j)], m[(r + i, j)]))
}

/// How far a real `2n×2m` matrix is from being complex linear.
pub fn complex_linearity_defect<T: Real>(m: &DMatrix<T>) -> T {
    (m - realify(&complexify(m))).norm()
}

/// Full singular value decomposition with singular values sorted in decreasing order.
///
/// Returns `(U, σ, V)` with `U` of size `r×min(r,c)` and `V` of size `c×min(r,c)`.
/// The decomposition is computed by `faer` in double precision.
pub fn svd_sorted<T: Real>(a: &DMatrix<T>) -> (DMatrix<T>, Vec<T>, DMatrix<T>) {
    let (r, c) = a.shape();
    let p = r.min(c);
    if p == 0 {
        return (DMatrix::zeros(r, 0), Vec::new(), DMatrix::zeros(c, 0));
    }
    let m = faer::Mat::<f64>::from_fn(r, c, |i, j| to_f64(a[(i, j)]));
    let svd = m.thin_svd().expect("singular value decomposition converges");
    let (fu, fs, fv) = (svd.U(), svd.S(), svd.V());
    let sv: Vec<f64> = (0..p).map(|i| fs[i]).collect();
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&i, &j| sv[j].partial_cmp(&sv[i]).unwrap_or(std::cmp::Ordering::Equal).then(i.cmp(&j)));
    let u = DMatrix::from_fn(r, p, |i, j| lit(fu[(i, order[j])]));
    let v = DMatrix::from_fn(c, p, |i, j| lit(fv[(i, order[j])]));
    let s = order.iter().map(|&i| lit(sv[i])).collect();
    (u, s, v)
}

pub fn singular_values<T: Real>(a: &DMatrix<T>) -> Vec<T> {
    svd_sorted(a).1
}

/// Numerical rank with the degeneracy gap check: a singular value strictly between
/// `cutoff` and `gap * σ_max` makes the rank ambiguous and is rejected.
pub fn gapped_rank<T: Real>(s: &[T], cutoff: f64, gap: f64) -> Result<usize> {
    let smax = s.first().map(|&x| to_f64(x)).unwrap_or(0.0);
    let mut rank = 0;
    for &x in s {
        let x = to_f64(x);
        if x > cutoff {
            if x < gap * smax {
                return Err(Error::Degenerate(format!(
                    "singular value {x:e} lies in the gap ({cutoff:e}, {:e})",
                    gap * smax
                )));
            }
            rank += 1;
        }
    }
    Ok(rank)
}

/// Orthonormal basis of the kernel of `a` (columns in `R^{a.ncols()}`).
pub fn null_space<T: Real>(a: &DMatrix<T>, cutoff: f64, gap: f64) -> Result<DMatrix<T>> {
    let c = a.ncols();
    if a.nrows() == 0 {
        return Ok(DMatrix::identity(c, c));
    }
    // pad to at least square so the SVD exposes a full right basis
    let padded = if a.nrows() < c {
        let mut p = DMatrix::zeros(c, c);
        p.view_mut((0, 0), a.shape()).copy_from(a);
        p
    } else {
        a.clone()
    };
    let (_, s, v) = svd_sorted(&padded);
    let rank = gapped_rank(&s, cutoff, gap)?;
    Ok(v.columns(rank, c - rank).into_owned())
}

/// Orthonormal basis of the column span of `a`, of the given dimension.
pub fn range_basis<T: Real>(a: &DMatrix<T>, dim: usize) -> DMatrix<T> {
    if dim == 0 {
        return DMatrix::zeros(a.nrows(), 0);
    }
    let (u, _, _) = svd_sorted(a);
    u.columns(0, dim).into_owned()
}

/// Orthogonal factor of the polar decomposition `a = O·P`.
pub fn polar_orthogonal<T: Real>(a: &DMatrix<T>) -> DMatrix<T> {
    if a.is_empty() {
        return a.clone();
    }
    let (u, _, v) = svd_sorted(a);
    u * v.transpose()
}

/// Determinant of a complex square matrix; the empty matrix has determinant one.
pub fn det_c<T: Real>(m: &DMatrix<Complex<T>>) -> Complex<T> {
    if m.nrows() == 0 {
        Complex::new(T::one(), T::zero())
    } else {
        m.clone().determinant()
    }
}

pub fn max_abs<T: Real>(m: &DMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, &x| acc.max(x.abs()))
}

/// Largest singular value.
pub fn op_norm<T: Real>(m: &DMatrix<T>) -> T {
    singular_values(m).first().copied().unwrap_or_else(T::zero)
}

/// Modified Gram–Schmidt orthonormalization dropping columns whose residual
/// falls below `drop * (original norm)`.
pub fn orthonormalize<T: Real>(a: &DMatrix<T>, drop: f64) -> DMatrix<T> {
    let mut out: Vec<DVector<T>> = Vec::new();
    for j in 0..a.ncols() {
        let orig = a.column(j).into_owned();
        let scale = orig.norm();
        if scale == T::zero() {
            continue;
        }
        let mut v = orig;
        for _ in 0..2 {
            for q in &out {
                let c = q.dot(&v);
                v -= q * c;
            }
        }
        let r = v.norm();
        if to_f64(r) > drop * to_f64(scale) {
            out.push(v / r);
        }
    }
    if out.is_empty() {
        DMatrix::zeros(a.nrows(), 0)
    } else {
        DMatrix::from_columns(&out)
    }
}

/// `‖BᵀB − I‖_max` for a matrix with (supposedly) orthonormal columns.
pub fn orthonormality_defect<T: Real>(b: &DMatrix<T>) -> T {
    let m = b.ncols();
    max_abs(&(b.transpose() * b - DMatrix::identity(m, m)))
}

pub fn unit_complex<T: Real>() -> Complex<T> {
    Complex::new(T::one(), T::zero())
}

pub fn half<T: Real>() -> T {
    lit(0.5)
}
