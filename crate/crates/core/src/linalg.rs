//! Small dense linear algebra: a column-major matrix and a one-sided Jacobi
//! (Hestenes) SVD that works for real and complex entries over any [`Real`].

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;

use crate::scalar::Real;

/// Matrix entry: a real scalar or a complex number over one.
pub trait Entry<R: Real>:
    Copy + Debug + Send + Sync + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn zero() -> Self;
    fn from_real(r: R) -> Self;
    fn conj(self) -> Self;
    fn norm_sqr(self) -> R;
    fn scale(self, r: R) -> Self;
}

impl<R: Real> Entry<R> for R {
    #[inline]
    fn zero() -> Self {
        R::zero()
    }
    #[inline]
    fn from_real(r: R) -> Self {
        r
    }
    #[inline]
    fn conj(self) -> Self {
        self
    }
    #[inline]
    fn norm_sqr(self) -> R {
        self * self
    }
    #[inline]
    fn scale(self, r: R) -> Self {
        self * r
    }
}

impl<R: Real> Entry<R> for Complex<R> {
    #[inline]
    fn zero() -> Self {
        Complex::new(R::zero(), R::zero())
    }
    #[inline]
    fn from_real(r: R) -> Self {
        Complex::new(r, R::zero())
    }
    #[inline]
    fn conj(self) -> Self {
        Complex::new(self.re, -self.im)
    }
    #[inline]
    fn norm_sqr(self) -> R {
        self.re * self.re + self.im * self.im
    }
    #[inline]
    fn scale(self, r: R) -> Self {
        Complex::new(self.re * r, self.im * r)
    }
}

/// Dense column-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat<E> {
    rows: usize,
    cols: usize,
    data: Vec<E>,
}

impl<E: Copy> Mat<E> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> E) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for c in 0..cols {
            for r in 0..rows {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> E {
        self.data[c * self.rows + r]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: E) {
        self.data[c * self.rows + r] = v;
    }

    pub fn col(&self, c: usize) -> &[E] {
        &self.data[c * self.rows..(c + 1) * self.rows]
    }

    pub fn col_mut(&mut self, c: usize) -> &mut [E] {
        &mut self.data[c * self.rows..(c + 1) * self.rows]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r))
    }
}

impl<E> Mat<E> {
    pub fn zeros<R: Real>(rows: usize, cols: usize) -> Self
    where
        E: Entry<R>,
    {
        Self {
            rows,
            cols,
            data: vec![E::zero(); rows * cols],
        }
    }
}

/// Thin singular value decomposition `A = U diag(s) V^H` with `s` sorted in
/// decreasing order. `U` is `rows × cols`; columns belonging to zero
/// singular values are left zero. `V` is `cols × cols` and unitary.
#[derive(Clone, Debug)]
pub struct Svd<E, R> {
    pub u: Mat<E>,
    pub s: Vec<R>,
    pub v: Mat<E>,
    pub sweeps: usize,
}

const MAX_SWEEPS: usize = 80;

/// One-sided Jacobi SVD. Relative accuracy of the small singular values is
/// what makes it suitable for null-vector extraction.
pub fn svd<R: Real, E: Entry<R>>(a: &Mat<E>) -> Svd<E, R> {
    let (m, n) = (a.rows(), a.cols());
    let mut w = a.clone();
    let mut v = Mat::<E>::from_fn(n, n, |r, c| if r == c { E::from_real(R::one()) } else { E::zero() });
    let tol = R::epsilon() * R::from_usize_lossy(m.max(1));
    let mut sweeps = 0;
    let mut norms: Vec<R> = (0..n).map(|j| col_norm_sqr(w.col(j))).collect();
    // Columns below ε²‖A‖ in norm carry no information; rotating them only
    // churns through subnormals.
    let total = norms.iter().fold(R::zero(), |a, &b| a + b);
    let eps2 = R::epsilon() * R::epsilon();
    let negligible = total * eps2 * eps2;

    while sweeps < MAX_SWEEPS {
        sweeps += 1;
        let mut rotated = false;
        for i in 0..n {
            for j in (i + 1)..n {
                let alpha = norms[i];
                let beta = norms[j];
                if alpha <= negligible || beta <= negligible {
                    continue;
                }
                let gamma = inner(w.col(i), w.col(j));
                let g = gamma.norm_sqr().sqrt();
                if g <= tol * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                // Rotate column j by the conjugate phase of gamma so the
                // remaining 2×2 problem is real.
                let phase = gamma.conj().scale(R::one() / g);
                let zeta = (beta - alpha) / (R::two() * g);
                let t = zeta.signum() / (zeta.abs() + zeta.hypot(R::one()));
                let c = R::one() / (R::one() + t * t).sqrt();
                let s = c * t;
                rotate(&mut w, i, j, phase, c, s);
                rotate(&mut v, i, j, phase, c, s);
                norms[i] = col_norm_sqr(w.col(i));
                norms[j] = col_norm_sqr(w.col(j));
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let sv: Vec<R> = (0..n).map(|j| col_norm_sqr(w.col(j)).sqrt()).collect();
    order.sort_by(|&x, &y| sv[y].partial_cmp(&sv[x]).unwrap_or(std::cmp::Ordering::Equal));

    let smax = order.first().map(|&k| sv[k]).unwrap_or(R::zero());
    let cutoff = smax * R::epsilon();
    let mut u = Mat::<E>::zeros(m, n);
    let mut vs = Mat::<E>::zeros(n, n);
    let mut s = Vec::with_capacity(n);
    for (dst, &src) in order.iter().enumerate() {
        let sigma = sv[src];
        s.push(sigma);
        if sigma > cutoff && sigma > R::zero() {
            let inv = R::one() / sigma;
            for r in 0..m {
                u.set(r, dst, w.get(r, src).scale(inv));
            }
        }
        for r in 0..n {
            vs.set(r, dst, v.get(r, src));
        }
    }
    Svd { u, s, v: vs, sweeps }
}

fn col_norm_sqr<R: Real, E: Entry<R>>(x: &[E]) -> R {
    x.iter().fold(R::zero(), |acc, &e| acc + e.norm_sqr())
}

fn inner<R: Real, E: Entry<R>>(x: &[E], y: &[E]) -> E {
    x.iter().zip(y).fold(E::zero(), |acc, (&a, &b)| acc + a.conj() * b)
}

fn rotate<R: Real, E: Entry<R>>(m: &mut Mat<E>, i: usize, j: usize, phase: E, c: R, s: R) {
    let rows = m.rows();
    for r in 0..rows {
        let xi = m.get(r, i);
        let xj = m.get(r, j) * phase;
        m.set(r, i, xi.scale(c) - xj.scale(s));
        m.set(r, j, xi.scale(s) + xj.scale(c));
    }
}

/// Least-squares solution of `A x = b` through the SVD, discarding singular
/// values below `rcond · s_max`.
pub fn lstsq<R: Real>(a: &Mat<R>, b: &[R], rcond: R) -> Vec<R> {
    let dec = svd(a);
    let n = a.cols();
    let smax = dec.s.first().copied().unwrap_or(R::zero());
    let mut x = vec![R::zero(); n];
    for (k, &sigma) in dec.s.iter().enumerate() {
        if sigma <= rcond * smax || sigma == R::zero() {
            continue;
        }
        let coef = dec
            .u
            .col(k)
            .iter()
            .zip(b)
            .fold(R::zero(), |acc, (&u, &bi)| acc + u * bi)
            / sigma;
        for (xi, &vk) in x.iter_mut().zip(dec.v.col(k)) {
            *xi = *xi + coef * vk;
        }
    }
    x
}

pub fn norm2<R: Real, E: Entry<R>>(x: &[E]) -> R {
    col_norm_sqr(x).sqrt()
}
