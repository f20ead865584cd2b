//! Small dense square matrices over anything ring-like.
//!
//! The chart actions have to run with entries that are plain reals,
//! perturbation numbers, or whole truncated polynomials (for `Dξ|_v`), so the
//! matrix code is written against [`Ring`] rather than a concrete scalar.

use nalgebra::DMatrix;

use crate::error::{JetError, Result};
use crate::poly::TruncatedPolynomial;
use crate::scalar::{Dual, Scalar};

pub trait Ring: Clone + std::fmt::Debug {
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn scale(&self, c: f64) -> Self;
    /// Additive identity of the same shape as `self`.
    fn zero_like(&self) -> Self;
    /// Multiplicative identity of the same shape as `self`.
    fn one_like(&self) -> Self;
    /// Real value at the base point (the constant, unperturbed part).
    fn lead(&self) -> f64;
    /// Real power; requires `lead() > 0`.
    fn pow_real(&self, e: f64) -> Result<Self>;
    /// Inverse; requires `lead() != 0`.
    fn try_recip(&self) -> Result<Self>;

    /// `|self|`, taking the sign from the base point.
    fn signed_abs(&self) -> Result<Self> {
        let l = self.lead();
        if l == 0.0 {
            Err(JetError::Domain(
                "absolute value at a zero base point".into(),
            ))
        } else if l > 0.0 {
            Ok(self.clone())
        } else {
            Ok(self.neg())
        }
    }
}

macro_rules! scalar_ring {
    ($t:ty) => {
        impl Ring for $t {
            fn add(&self, other: &Self) -> Self {
                *self + *other
            }
            fn sub(&self, other: &Self) -> Self {
                *self - *other
            }
            fn mul(&self, other: &Self) -> Self {
                *self * *other
            }
            fn neg(&self) -> Self {
                -*self
            }
            fn scale(&self, c: f64) -> Self {
                *self * <$t as Scalar>::from_f64(c)
            }
            fn zero_like(&self) -> Self {
                <$t as Scalar>::zero()
            }
            fn one_like(&self) -> Self {
                <$t as Scalar>::one()
            }
            fn lead(&self) -> f64 {
                Scalar::re(self)
            }
            fn pow_real(&self, e: f64) -> Result<Self> {
                if Scalar::re(self) > 0.0 {
                    Ok(Scalar::powf(*self, e))
                } else {
                    Err(JetError::Domain(format!(
                        "real power of non-positive value {:?}",
                        self
                    )))
                }
            }
            fn try_recip(&self) -> Result<Self> {
                if Scalar::re(self) == 0.0 {
                    Err(JetError::Domain("division by zero".into()))
                } else {
                    Ok(<$t as Scalar>::one() / *self)
                }
            }
        }
    };
}

scalar_ring!(f64);
scalar_ring!(Dual);

impl<S: Scalar> Ring for TruncatedPolynomial<S> {
    fn add(&self, other: &Self) -> Self {
        TruncatedPolynomial::add(self, other)
    }
    fn sub(&self, other: &Self) -> Self {
        TruncatedPolynomial::sub(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        TruncatedPolynomial::mul(self, other)
    }
    fn neg(&self) -> Self {
        TruncatedPolynomial::neg(self)
    }
    fn scale(&self, c: f64) -> Self {
        TruncatedPolynomial::scale(self, S::from_f64(c))
    }
    fn zero_like(&self) -> Self {
        TruncatedPolynomial::zero(self.vars(), self.order())
    }
    fn one_like(&self) -> Self {
        TruncatedPolynomial::constant(self.vars(), self.order(), S::one())
    }
    fn lead(&self) -> f64 {
        self.constant_term().re()
    }
    fn pow_real(&self, e: f64) -> Result<Self> {
        TruncatedPolynomial::pow_real(self, e)
    }
    fn try_recip(&self) -> Result<Self> {
        TruncatedPolynomial::recip(self)
    }
}

/// Square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    dim: usize,
    entries: Vec<T>,
}

impl<T: Ring> Matrix<T> {
    pub fn from_rows(dim: usize, entries: Vec<T>) -> Self {
        assert_eq!(entries.len(), dim * dim, "matrix needs dim² entries");
        Matrix { dim, entries }
    }

    /// Identity matrix whose entries have the shape of `like`.
    pub fn identity_like(dim: usize, like: &T) -> Self {
        let zero = like.zero_like();
        let one = like.one_like();
        let entries = (0..dim * dim)
            .map(|k| {
                if k / dim == k % dim {
                    one.clone()
                } else {
                    zero.clone()
                }
            })
            .collect();
        Matrix { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.entries[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.entries[i * self.dim + j] = v;
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn map<U: Ring>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            dim: self.dim,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim;
        let entries = (0..n * n).map(|k| self.get(k % n, k / n).clone()).collect();
        Matrix { dim: n, entries }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "matrix dimension mismatch");
        let n = self.dim;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = self.get(i, 0).mul(other.get(0, j));
                for k in 1..n {
                    acc = acc.add(&self.get(i, k).mul(other.get(k, j)));
                }
                entries.push(acc);
            }
        }
        Matrix { dim: n, entries }
    }

    pub fn scale_by(&self, c: &T) -> Self {
        self.map(|e| e.mul(c))
    }

    /// Determinant: cofactor expansion up to 4×4, pivoted elimination
    /// beyond that.
    pub fn det(&self) -> Result<T> {
        if self.dim <= 4 {
            let rows: Vec<usize> = (0..self.dim).collect();
            let cols: Vec<usize> = (0..self.dim).collect();
            Ok(self.cofactor_det(&rows, &cols))
        } else {
            self.elimination_det()
        }
    }

    fn cofactor_det(&self, rows: &[usize], cols: &[usize]) -> T {
        match rows.len() {
            0 => self.entries[0].one_like(),
            1 => self.get(rows[0], cols[0]).clone(),
            2 => self
                .get(rows[0], cols[0])
                .mul(self.get(rows[1], cols[1]))
                .sub(&self.get(rows[0], cols[1]).mul(self.get(rows[1], cols[0]))),
            _ => {
                let sub_rows = &rows[1..];
                let mut acc: Option<T> = None;
                for (k, &c) in cols.iter().enumerate() {
                    let sub_cols: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
                    let term = self
                        .get(rows[0], c)
                        .mul(&self.cofactor_det(sub_rows, &sub_cols));
                    acc = Some(match acc {
                        None => term,
                        Some(a) if k % 2 == 0 => a.add(&term),
                        Some(a) => a.sub(&term),
                    });
                }
                acc.expect("nonempty expansion")
            }
        }
    }

    fn elimination_det(&self) -> Result<T> {
        let n = self.dim;
        let mut a = self.entries.clone();
        let mut det = a[0].one_like();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&x, &y| {
                    a[x * n + col]
                        .lead()
                        .abs()
                        .total_cmp(&a[y * n + col].lead().abs())
                })
                .expect("nonempty range");
            if a[pivot * n + col].lead() == 0.0 {
                return Ok(a[0].zero_like());
            }
            if pivot != col {
                for j in 0..n {
                    a.swap(pivot * n + j, col * n + j);
                }
                det = det.neg();
            }
            let p = a[col * n + col].clone();
            det = det.mul(&p);
            let inv = p.try_recip()?;
            for row in col + 1..n {
                let f = a[row * n + col].mul(&inv);
                for j in col..n {
                    let v = a[row * n + j].sub(&f.mul(&a[col * n + j]));
                    a[row * n + j] = v;
                }
            }
        }
        Ok(det)
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting on the
    /// base-point values.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.dim;
        let mut a = self.entries.clone();
        let mut inv = Matrix::identity_like(n, &self.entries[0]).entries;
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&x, &y| {
                    a[x * n + col]
                        .lead()
                        .abs()
                        .total_cmp(&a[y * n + col].lead().abs())
                })
                .expect("nonempty range");
            if a[pivot * n + col].lead() == 0.0 {
                return Err(JetError::Domain("singular matrix".into()));
            }
            if pivot != col {
                for j in 0..n {
                    a.swap(pivot * n + j, col * n + j);
                    inv.swap(pivot * n + j, col * n + j);
                }
            }
            let p_inv = a[col * n + col].try_recip()?;
            for j in 0..n {
                a[col * n + j] = a[col * n + j].mul(&p_inv);
                inv[col * n + j] = inv[col * n + j].mul(&p_inv);
            }
            for row in 0..n {
                if row == col {
                    continue;
                }
                let f = a[row * n + col].clone();
                for j in 0..n {
                    let va = a[row * n + j].sub(&f.mul(&a[col * n + j]));
                    let vi = inv[row * n + j].sub(&f.mul(&inv[col * n + j]));
                    a[row * n + j] = va;
                    inv[row * n + j] = vi;
                }
            }
        }
        Ok(Matrix {
            dim: n,
            entries: inv,
        })
    }

    /// Real matrix of base-point values.
    pub fn lead_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.dim, self.dim, |i, j| self.get(i, j).lead())
    }
}

/// 2-norm condition number `σ_max / σ_min`; infinite when singular.
pub fn condition_number(m: &DMatrix<f64>) -> f64 {
    let sv = m.clone().singular_values();
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if min == 0.0 || !min.is_finite() {
        f64::INFINITY
    } else {
        max / min
    }
}
