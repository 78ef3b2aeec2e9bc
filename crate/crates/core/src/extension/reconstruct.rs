use crate::error::{Error, Result};
use crate::scalar::Real;

use super::rational::RationalFunction;

/// Jacobi data recovered from `J²P/Q`, ordered from the junction outward.
#[derive(Clone, Debug, PartialEq)]
pub struct Reconstruction<T = f64> {
    pub fields: Vec<T>,
    pub couplings: Vec<T>,
    pub junction: T,
}

/// Euclidean expansion `Q/P = (x − a₁) − b₁²/((x − a₂) − …)`.
///
/// `J²` is the leading numerator coefficient. Every `b_k²` must come out
/// positive, which is equivalent to strict interlacing of the zeros of `Q`
/// and `P`; otherwise no chain realizes the function.
pub fn reconstruct_chain<T: Real>(f: &RationalFunction<T>) -> Result<Reconstruction<T>> {
    let m = f.degree_den();
    if m == 0 || f.denominator.len() != m + 1 || f.numerator.len() != m {
        return Err(Error::InvalidArgument(format!(
            "need numerator degree {} under denominator degree {}",
            m.saturating_sub(1),
            m
        )));
    }
    if f.denominator[m] != T::one() {
        return Err(Error::InvalidArgument("denominator must be monic".into()));
    }
    let j2 = f.numerator[m - 1];
    if !(j2 > T::zero()) || !j2.is_finite() {
        return Err(Error::Infeasible(format!(
            "junction coupling squared is {:e}",
            j2.to_f64_lossy()
        )));
    }

    let mut q = f.denominator.clone();
    let mut p: Vec<T> = f.numerator.iter().map(|&c| c / j2).collect();
    p[m - 1] = T::one();
    let mut fields = Vec::with_capacity(m);
    let mut couplings = Vec::with_capacity(m.saturating_sub(1));

    for step in 0..m {
        let d = q.len() - 1;
        if d == 1 {
            fields.push(-q[0]);
            break;
        }
        let a = p[d - 2] - q[d - 1];
        // rem = Q − (x − a)P, degree ≤ d − 2; the top two terms cancel.
        let rem: Vec<T> = (0..d - 1)
            .map(|k| {
                let shifted = if k == 0 { T::zero() } else { p[k - 1] };
                q[k] - shifted + a * p[k]
            })
            .collect();
        let b2 = -rem[d - 2];
        if !(b2 > T::zero()) || !b2.is_finite() {
            return Err(Error::Infeasible(format!(
                "coupling {} of the extension would have squared value {:e}",
                step + 1,
                b2.to_f64_lossy()
            )));
        }
        fields.push(a);
        couplings.push(b2.sqrt());
        let mut next: Vec<T> = rem.iter().map(|&c| -c / b2).collect();
        next[d - 2] = T::one();
        q = std::mem::replace(&mut p, next);
    }

    Ok(Reconstruction {
        fields,
        couplings,
        junction: j2.sqrt(),
    })
}
