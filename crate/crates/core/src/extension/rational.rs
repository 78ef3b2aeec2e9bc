use crate::scalar::Real;

/// `R(x)/Q(x)` with coefficients in ascending degree and `Q` monic.
///
/// For an extension `R = J²P_A` and `Q = Q_A`.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalFunction<T = f64> {
    pub numerator: Vec<T>,
    pub denominator: Vec<T>,
}

impl<T: Real> RationalFunction<T> {
    pub fn eval(&self, x: T) -> T {
        horner(&self.numerator, x) / horner(&self.denominator, x)
    }

    pub fn degree_num(&self) -> usize {
        self.numerator.len().saturating_sub(1)
    }

    pub fn degree_den(&self) -> usize {
        self.denominator.len().saturating_sub(1)
    }

    /// True when the numerator has the parity opposite to the denominator's
    /// degree and the denominator the parity of its degree, so that
    /// `f(−x) = −f(x)`.
    pub fn is_odd(&self) -> bool {
        let m = self.degree_den();
        let wrong = |c: &[T], parity: usize| c.iter().enumerate().any(|(k, v)| k % 2 != parity && !v.is_zero());
        !wrong(&self.denominator, m % 2) && !wrong(&self.numerator, (m + 1) % 2)
    }

    /// `f(s·u)/s` as a function of `u`, numerator and denominator rescaled so
    /// the denominator stays monic.
    pub fn rescaled(&self, s: T) -> Self {
        let m = self.degree_den() as i32;
        Self {
            denominator: self
                .denominator
                .iter()
                .enumerate()
                .map(|(k, &c)| c * s.powi(k as i32 - m))
                .collect(),
            numerator: self
                .numerator
                .iter()
                .enumerate()
                .map(|(k, &c)| c * s.powi(k as i32 - m - 1))
                .collect(),
        }
    }
}

pub(crate) fn horner<T: Real>(c: &[T], x: T) -> T {
    c.iter().rev().fold(T::zero(), |acc, &a| acc * x + a)
}

/// Sum of `|c_k x^k|`, the scale against which a polynomial value is judged.
pub(crate) fn abs_terms<T: Real>(c: &[T], x: T) -> T {
    let ax = x.abs();
    c.iter().rev().fold(T::zero(), |acc, &a| acc * ax + a.abs())
}
