//! Small dense complex matrices and the two Jacobi solvers the measures need.
//!
//! Dimensions here never exceed a few dozen, so everything is plain row-major
//! storage with cyclic Jacobi sweeps: Hermitian eigendecomposition for
//! density matrices and one-sided (Hestenes) Jacobi for singular values.
//! One-sided Jacobi keeps small singular values accurate to `eps * ||A||`,
//! which the spin-flip concurrence relies on.

use std::ops::{Add, Index, IndexMut, Mul};

use crate::scalar::{abs, cis, conj, czero, norm_sqr, Real, C};

const MAX_SWEEPS: usize = 64;

#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<C<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![czero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C::new(T::one(), T::zero());
        }
        m
    }

    /// Builds a matrix from row-major data. Panics if the length is wrong.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<C<T>>) -> Self {
        assert_eq!(data.len(), rows * cols, "row-major data has wrong length");
        Self { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn diagonal(d: &[T]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &x) in d.iter().enumerate() {
            m[(i, i)] = C::new(x, T::zero());
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C<T>] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| conj(self[(j, i)]))
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conjugate(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| conj(self[(i, j)]))
    }

    pub fn trace(&self) -> C<T> {
        (0..self.rows.min(self.cols)).fold(czero(), |acc, i| acc + self[(i, i)])
    }

    pub fn frobenius_sqr(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, &z| acc + norm_sqr(z))
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self::from_fn(self.rows * other.rows, self.cols * other.cols, |i, j| {
            self[(i / other.rows, j / other.cols)] * other[(i % other.rows, j % other.cols)]
        })
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |acc, (&a, &b)| acc.max(abs(a - b)))
    }

    /// Largest deviation from Hermiticity, `max |a_ij - conj(a_ji)|`.
    pub fn hermiticity_residual(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.rows {
            for j in 0..self.cols {
                worst = worst.max(abs(self[(i, j)] - conj(self[(j, i)])));
            }
        }
        worst
    }

    /// `max |(U^dagger U - 1)_ij|`.
    pub fn unitarity_residual(&self) -> T {
        let g = &self.adjoint() * self;
        g.max_abs_diff(&Self::identity(self.cols))
    }

    pub fn map(&self, f: impl Fn(C<T>) -> C<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn column(&self, j: usize) -> Vec<C<T>> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }
}

impl<T> Index<(usize, usize)> for CMatrix<T> {
    type Output = C<T>;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for CMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Real> Mul for &CMatrix<T> {
    type Output = CMatrix<T>;

    fn mul(self, rhs: &CMatrix<T>) -> CMatrix<T> {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.re == T::zero() && a.im == T::zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] = out[(i, j)] + a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl<T: Real> Add for &CMatrix<T> {
    type Output = CMatrix<T>;

    fn add(self, rhs: &CMatrix<T>) -> CMatrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix sum shape mismatch");
        CMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)] + rhs[(i, j)])
    }
}

/// Plane rotation `[[u00, u01], [u10, u11]]` acting on coordinates `(p, q)`.
#[derive(Clone, Copy, Debug)]
struct PlaneRotation<T> {
    u: [[C<T>; 2]; 2],
}

/// Unitary that diagonalises the Hermitian 2x2 block `[[app, apq], [conj(apq), aqq]]`
/// via `U^dagger B U`. Returns `None` when the block is already diagonal.
fn jacobi_rotation<T: Real>(app: T, aqq: T, apq: C<T>) -> Option<PlaneRotation<T>> {
    let r = abs(apq);
    if r == T::zero() {
        return None;
    }
    // Rephase so the off-diagonal entry is real and positive, then apply the
    // real symmetric Jacobi rotation.
    let phase = cis(-apq.im.atan2(apq.re));
    let two = T::lit(2.0);
    let theta = (aqq - app) / (two * r);
    let t = if theta.is_infinite() {
        T::zero()
    } else {
        let sign = if theta >= T::zero() { T::one() } else { -T::one() };
        sign / (theta.abs() + (theta * theta + T::one()).sqrt())
    };
    let c = T::one() / (t * t + T::one()).sqrt();
    let s = t * c;
    let cc = C::new(c, T::zero());
    let sc = C::new(s, T::zero());
    Some(PlaneRotation {
        u: [[cc, sc], [-(phase * sc), phase * cc]],
    })
}

/// Eigendecomposition of a Hermitian matrix.
#[derive(Clone, Debug)]
pub struct HermitianEigen<T> {
    /// Eigenvalues in descending order.
    pub values: Vec<T>,
    /// Column `k` is the unit eigenvector for `values[k]`.
    pub vectors: CMatrix<T>,
}

/// Cyclic complex Jacobi. The input is assumed Hermitian; only the upper
/// triangle drives the rotations.
pub fn hermitian_eigen<T: Real>(a: &CMatrix<T>) -> HermitianEigen<T> {
    assert!(a.is_square(), "eigendecomposition needs a square matrix");
    let n = a.rows();
    let mut m = a.clone();
    // Symmetrise away roundoff in the imaginary part of the diagonal.
    for i in 0..n {
        m[(i, i)] = C::new(m[(i, i)].re, T::zero());
    }
    let mut v = CMatrix::identity(n);
    let scale = m.frobenius_sqr();
    let threshold = scale * T::precision() * T::precision();

    for _ in 0..MAX_SWEEPS {
        let mut off = T::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                off = off + norm_sqr(m[(p, q)]);
            }
        }
        if off <= threshold {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let Some(rot) = jacobi_rotation(m[(p, p)].re, m[(q, q)].re, m[(p, q)]) else {
                    continue;
                };
                let u = rot.u;
                // m <- m U
                for k in 0..n {
                    let (mp, mq) = (m[(k, p)], m[(k, q)]);
                    m[(k, p)] = mp * u[0][0] + mq * u[1][0];
                    m[(k, q)] = mp * u[0][1] + mq * u[1][1];
                }
                // m <- U^dagger m
                for k in 0..n {
                    let (mp, mq) = (m[(p, k)], m[(q, k)]);
                    m[(p, k)] = conj(u[0][0]) * mp + conj(u[1][0]) * mq;
                    m[(q, k)] = conj(u[0][1]) * mp + conj(u[1][1]) * mq;
                }
                m[(p, q)] = czero();
                m[(q, p)] = czero();
                m[(p, p)] = C::new(m[(p, p)].re, T::zero());
                m[(q, q)] = C::new(m[(q, q)].re, T::zero());
                for k in 0..n {
                    let (vp, vq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = vp * u[0][0] + vq * u[1][0];
                    v[(k, q)] = vp * u[0][1] + vq * u[1][1];
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        m[(j, j)]
            .re
            .partial_cmp(&m[(i, i)].re)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&i| m[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    HermitianEigen { values, vectors }
}

/// Singular values in descending order, `min(rows, cols)` of them.
pub fn singular_values<T: Real>(a: &CMatrix<T>) -> Vec<T> {
    // Work on the orientation with fewer columns.
    let mut w = if a.cols() > a.rows() {
        a.adjoint()
    } else {
        a.clone()
    };
    let (m, n) = (w.rows(), w.cols());
    let eps = T::precision();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let mut alpha = T::zero();
                let mut beta = T::zero();
                let mut gamma = czero();
                for k in 0..m {
                    let (x, y) = (w[(k, p)], w[(k, q)]);
                    alpha = alpha + norm_sqr(x);
                    beta = beta + norm_sqr(y);
                    gamma = gamma + conj(x) * y;
                }
                if abs(gamma) <= eps * (alpha * beta).sqrt() || abs(gamma) == T::zero() {
                    continue;
                }
                let Some(rot) = jacobi_rotation(alpha, beta, gamma) else {
                    continue;
                };
                rotated = true;
                let u = rot.u;
                for k in 0..m {
                    let (x, y) = (w[(k, p)], w[(k, q)]);
                    w[(k, p)] = x * u[0][0] + y * u[1][0];
                    w[(k, q)] = x * u[0][1] + y * u[1][1];
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut s: Vec<T> = (0..n)
        .map(|j| (0..m).fold(T::zero(), |acc, k| acc + norm_sqr(w[(k, j)])).sqrt())
        .collect();
    s.sort_by(|x, y| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal));
    s
}

/// Principal square root of a positive semidefinite Hermitian matrix.
/// Eigenvalues below zero are treated as zero.
pub fn psd_sqrt<T: Real>(a: &CMatrix<T>) -> CMatrix<T> {
    let eig = hermitian_eigen(a);
    let d: Vec<T> = eig.values.iter().map(|&x| x.max(T::zero()).sqrt()).collect();
    let vd = &eig.vectors * &CMatrix::diagonal(&d);
    &vd * &eig.vectors.adjoint()
}
