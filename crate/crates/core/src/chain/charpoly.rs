use crate::scalar::Real;

use super::JacobiMatrix;

/// `det(xI − m)` and `det(xI − m′)` sharing the binary exponent `exp2`:
/// the true values are `q·2^exp2` and `p·2^exp2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaledCharPoly<T> {
    pub q: T,
    pub p: T,
    pub exp2: i32,
}

impl<T: Real> ScaledCharPoly<T> {
    /// `Q/P`, independent of the shared exponent.
    pub fn ratio(&self) -> T {
        self.q / self.p
    }

    pub fn unscaled(&self) -> (T, T) {
        let f = T::two().powi(self.exp2);
        (self.q * f, self.p * f)
    }
}

const RESCALE_BITS: i32 = 128;

/// Three-term recurrence `p_k = (x − a_k)p_{k−1} − b_{k−1}² p_{k−2}` run from
/// the far end of `m` towards row 0 (the junction end), rescaling by powers
/// of two so long chains neither overflow nor underflow.
///
/// `m′` is `m` with row and column 0 removed; an empty `m` gives `(1, 0)`.
pub fn char_poly_eval_scaled<T: Real>(m: &JacobiMatrix<T>, x: T) -> ScaledCharPoly<T> {
    let n = m.size();
    let mut prev = T::zero();
    let mut cur = T::one();
    let mut exp2 = 0i32;
    let big = T::two().powi(RESCALE_BITS);
    let small = T::one() / big;
    for k in (0..n).rev() {
        let coupling_sq = if k + 1 < n {
            m.offdiag[k] * m.offdiag[k]
        } else {
            T::zero()
        };
        let next = (x - m.diag[k]) * cur - coupling_sq * prev;
        prev = cur;
        cur = next;
        let mag = cur.abs().max(prev.abs());
        if mag > big {
            cur = cur * small;
            prev = prev * small;
            exp2 += RESCALE_BITS;
        } else if mag < small && mag > T::zero() {
            cur = cur * big;
            prev = prev * big;
            exp2 -= RESCALE_BITS;
        }
    }
    ScaledCharPoly { q: cur, p: prev, exp2 }
}

/// `(Q(x), P(x))` with `Q = det(xI − m)` and `P` the same for `m` without its
/// first row and column.
pub fn char_poly_eval<T: Real>(m: &JacobiMatrix<T>, x: T) -> (T, T) {
    char_poly_eval_scaled(m, x).unscaled()
}

/// Monomial coefficients (ascending) of `Q` and `P`.
pub fn char_polys<T: Real>(m: &JacobiMatrix<T>) -> (Vec<T>, Vec<T>) {
    let n = m.size();
    let mut prev: Vec<T> = vec![];
    let mut cur: Vec<T> = vec![T::one()];
    for k in (0..n).rev() {
        let coupling_sq = if k + 1 < n {
            m.offdiag[k] * m.offdiag[k]
        } else {
            T::zero()
        };
        let mut next = vec![T::zero(); cur.len() + 1];
        for (i, &c) in cur.iter().enumerate() {
            next[i + 1] = next[i + 1] + c;
            next[i] = next[i] - m.diag[k] * c;
        }
        for (i, &c) in prev.iter().enumerate() {
            next[i] = next[i] - coupling_sq * c;
        }
        prev = cur;
        cur = next;
    }
    (cur, prev)
}
