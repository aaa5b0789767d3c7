use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Largest total degree accepted for user-supplied polynomials.
pub const MAX_DEGREE: u32 = 6;

/// A real polynomial given by a coefficient table `Σ c · Π x_i^{e_i}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial<T: Real> {
    nvars: usize,
    terms: Vec<(T, Vec<u32>)>,
}

impl<T: Real> Polynomial<T> {
    pub fn new(nvars: usize, terms: Vec<(T, Vec<u32>)>) -> Result<Self> {
        for (i, (_, e)) in terms.iter().enumerate() {
            if e.len() != nvars {
                return Err(Error::Argument(format!("term {i} has {} exponents, expected {nvars}", e.len())));
            }
            let deg: u32 = e.iter().sum();
            if deg > MAX_DEGREE {
                return Err(Error::Argument(format!("term {i} has degree {deg} above {MAX_DEGREE}")));
            }
        }
        Ok(Self { nvars, terms })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[(T, Vec<u32>)] {
        &self.terms
    }

    /// Mixed partial derivative `∂^{|idx|} / ∂x_{idx[0]} ⋯ ∂x_{idx[r]}` at `x`.
    pub fn derivative(&self, x: &DVector<T>, idx: &[usize]) -> T {
        let mut total = T::zero();
        let mut mult = vec![0u32; self.nvars];
        for &i in idx {
            mult[i] += 1;
        }
        'terms: for (c, e) in &self.terms {
            let mut v = *c;
            for i in 0..self.nvars {
                let (ei, di) = (e[i], mult[i]);
                if di > ei {
                    continue 'terms;
                }
                for r in 0..di {
                    v *= lit::<T>((ei - r) as f64);
                }
                for _ in 0..(ei - di) {
                    v *= x[i];
                }
            }
            total += v;
        }
        total
    }

    pub fn value(&self, x: &DVector<T>) -> T {
        self.derivative(x, &[])
    }

    pub fn gradient(&self, x: &DVector<T>) -> DVector<T> {
        DVector::from_fn(self.nvars, |i, _| self.derivative(x, &[i]))
    }

    pub fn hessian(&self, x: &DVector<T>) -> DMatrix<T> {
        DMatrix::from_fn(self.nvars, self.nvars, |i, j| self.derivative(x, &[i, j]))
    }

    /// Third derivatives as one matrix per first index.
    pub fn third(&self, x: &DVector<T>) -> Vec<DMatrix<T>> {
        (0..self.nvars)
            .map(|i| DMatrix::from_fn(self.nvars, self.nvars, |j, l| self.derivative(x, &[i, j, l])))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivatives_of_a_cubic() {
        // x^3 y + 2 y^2
        let p = Polynomial::<f64>::new(2, vec![(1.0, vec![3, 1]), (2.0, vec![0, 2])]).unwrap();
        let x = DVector::from_vec(vec![2.0, -1.0]);
        assert_eq!(p.value(&x), -8.0 + 2.0);
        assert_eq!(p.gradient(&x), DVector::from_vec(vec![-12.0, 8.0 - 4.0]));
        assert_eq!(p.hessian(&x), DMatrix::from_row_slice(2, 2, &[-12.0, 12.0, 12.0, 4.0]));
        assert_eq!(p.derivative(&x, &[0, 0, 1]), 12.0);
        assert_eq!(p.derivative(&x, &[1, 1, 1]), 0.0);
    }

    #[test]
    fn degree_limit() {
        assert!(Polynomial::<f64>::new(1, vec![(1.0, vec![7])]).is_err());
        assert!(Polynomial::<f64>::new(2, vec![(1.0, vec![1])]).is_err());
    }
}
