use crate::error::{Error, Result};
use crate::linalg::{svd, Mat};
use crate::scalar::Real;

use super::rational::{abs_terms, horner, RationalFunction};
use super::{TargetNode, TargetValue};

/// Shape of the rational function sought by [`interpolate_rational`].
#[derive(Clone, Copy, Debug)]
pub struct InterpolationSpec<T> {
    /// Degree `M` of the monic denominator; the numerator has degree `M−1`.
    pub degree: usize,
    /// Restrict to odd functions: denominator of parity `M`, numerator of
    /// parity `M−1`. Each node then also constrains `−node`.
    pub odd: bool,
    /// Prescribed leading numerator coefficient (`J²` for a known junction).
    pub leading: Option<T>,
    /// Relative residual allowed at each node after the solve.
    pub tolerance: T,
}

/// Result of the linearized solve, in the rescaled variable `u = x/scale`.
#[derive(Clone, Debug)]
pub struct LinearFit<T> {
    /// `f(scale·u)/scale`.
    pub scaled: RationalFunction<T>,
    pub scale: T,
    /// Largest over second-smallest singular value of the constraint matrix.
    pub condition: f64,
    /// Smallest over largest singular value; zero for a consistent system.
    pub inconsistency: f64,
}

impl<T: Real> LinearFit<T> {
    pub fn function(&self) -> RationalFunction<T> {
        self.scaled.rescaled(T::one() / self.scale)
    }
}

/// Fits `R/Q` through the data by writing every constraint as the linear
/// condition `a·Q(x) − b·R(x) = 0` and taking the smallest singular direction
/// of the stacked system. A pole node contributes `Q(x) = 0`.
///
/// Nodes are divided by their largest magnitude first.
pub fn interpolate_rational<T: Real>(data: &[TargetNode<T>], spec: &InterpolationSpec<T>) -> Result<LinearFit<T>> {
    let m = spec.degree;
    if m == 0 {
        return Err(Error::InvalidProblem("denominator degree must be at least 1".into()));
    }
    let scale = data.iter().fold(T::zero(), |acc, d| acc.max(d.node.abs()));
    if scale.is_zero() || !scale.is_finite() {
        return Err(Error::InvalidProblem(
            "interpolation nodes must be finite and not all zero".into(),
        ));
    }

    let q_cols: Vec<usize> = (0..=m).filter(|k| !spec.odd || k % 2 == m % 2).collect();
    let r_cols: Vec<usize> = (0..m).filter(|k| !spec.odd || k % 2 != m % 2).collect();
    let n_cols = q_cols.len() + r_cols.len();
    let n_rows = data.len() + usize::from(spec.leading.is_some());
    if n_rows + 1 < n_cols {
        return Err(Error::InvalidProblem(format!(
            "{} constraints cannot fix {} coefficients",
            n_rows,
            n_cols - 1
        )));
    }

    // Row weights (a, b) with max(|a|, |b|) = 1.
    let weights: Vec<(T, T)> = data
        .iter()
        .map(|d| match d.value {
            TargetValue::Pole => (T::one(), T::zero()),
            TargetValue::Value(f) => {
                let g = f / scale;
                let w = T::one().max(g.abs());
                (g / w, T::one() / w)
            }
        })
        .collect();
    let nodes: Vec<T> = data.iter().map(|d| d.node / scale).collect();

    let mut a = Mat::<T>::zeros(n_rows, n_cols);
    for (i, (&u, &(wa, wb))) in nodes.iter().zip(&weights).enumerate() {
        for (c, &k) in q_cols.iter().enumerate() {
            a.set(i, c, wa * u.powi(k as i32));
        }
        for (c, &k) in r_cols.iter().enumerate() {
            a.set(i, q_cols.len() + c, -wb * u.powi(k as i32));
        }
    }
    if let Some(lead) = spec.leading {
        // r̂_{M−1} = (J²/s²)·ĉ_M in the scaled variable.
        let row = n_rows - 1;
        let target = lead / (scale * scale);
        let w = T::one().max(target.abs());
        a.set(row, q_cols.len() - 1, -target / w);
        a.set(row, n_cols - 1, T::one() / w);
    }

    let dec = svd::<T, T>(&a);
    let smax = dec.s[0];
    let smin = dec.s[n_cols - 1];
    let snext = if n_cols >= 2 { dec.s[n_cols - 2] } else { smax };
    let condition = (smax / snext).to_f64_lossy();
    if !(snext > T::epsilon() * smax) {
        return Err(Error::Degenerate {
            condition,
            detail: "constraint matrix has a null space of dimension above one".into(),
        });
    }
    let v = dec.v.col(n_cols - 1);
    let lead_q = v[q_cols.len() - 1];
    if lead_q.abs() <= T::epsilon() * T::from_usize_lossy(n_cols) {
        return Err(Error::Degenerate {
            condition,
            detail: "solution has a vanishing leading denominator coefficient".into(),
        });
    }

    let mut den = vec![T::zero(); m + 1];
    let mut num = vec![T::zero(); m];
    for (c, &k) in q_cols.iter().enumerate() {
        den[k] = v[c] / lead_q;
    }
    for (c, &k) in r_cols.iter().enumerate() {
        num[k] = v[q_cols.len() + c] / lead_q;
    }
    den[m] = T::one();

    for ((d, &u), &(wa, wb)) in data.iter().zip(&nodes).zip(&weights) {
        let qv = horner(&den, u);
        let rv = horner(&num, u);
        let residual = (wa * qv - wb * rv).abs();
        let size = wa.abs() * abs_terms(&den, u) + wb.abs() * abs_terms(&num, u);
        if residual > spec.tolerance * size {
            let q_size = abs_terms(&den, u);
            return Err(if qv.abs() <= spec.tolerance * q_size && d.value != TargetValue::Pole {
                Error::Unattainable {
                    node: d.node.to_f64_lossy(),
                    detail: "value requires Q(x) = 0 with R(x) ≠ 0".into(),
                }
            } else {
                Error::Infeasible(format!(
                    "constraints are inconsistent at x = {:e} (relative residual {:.3e})",
                    d.node.to_f64_lossy(),
                    (residual / size).to_f64_lossy()
                ))
            });
        }
    }

    Ok(LinearFit {
        scaled: RationalFunction {
            numerator: num,
            denominator: den,
        },
        scale,
        condition,
        inconsistency: (smin / smax).to_f64_lossy(),
    })
}

/// Maps odd-function data to `y = x²`, `g = f/x`. Poles stay poles.
pub fn fieldfree_reduce<T: Real>(data: &[TargetNode<T>]) -> Result<Vec<TargetNode<T>>> {
    data.iter()
        .map(|d| {
            if d.node.is_zero() {
                return Err(Error::InvalidProblem("zero node cannot be reduced".into()));
            }
            Ok(TargetNode {
                node: d.node * d.node,
                value: match d.value {
                    TargetValue::Value(f) => TargetValue::Value(f / d.node),
                    TargetValue::Pole => TargetValue::Pole,
                },
            })
        })
        .collect()
}

/// `g = p/q ↦ f(x) = x·p(x²)/q(x²)`.
pub fn fieldfree_lift<T: Real>(g: &RationalFunction<T>) -> RationalFunction<T> {
    let spread = |c: &[T], odd: bool| {
        let mut out = vec![T::zero(); 2 * c.len() - usize::from(!odd)];
        for (k, &v) in c.iter().enumerate() {
            out[2 * k + usize::from(odd)] = v;
        }
        out
    };
    RationalFunction {
        numerator: spread(&g.numerator, true),
        denominator: spread(&g.denominator, false),
    }
}

/// Thiele continued-fraction interpolation of `1/f = Q/R`.
///
/// `n` points give a numerator of degree ⌈n/2⌉ and denominator of degree
/// ⌊n/2⌋ for the reciprocal, so `2M` points fix `f = R/Q` of type
/// `(M−1, M)`. Nodes are rescaled by their largest magnitude.
pub fn thiele_interpolate<T: Real>(data: &[TargetNode<T>]) -> Result<RationalFunction<T>> {
    let n = data.len();
    if n < 2 || n % 2 != 0 {
        return Err(Error::InvalidProblem(format!(
            "continued-fraction interpolation needs an even number of points, got {n}"
        )));
    }
    let scale = data.iter().fold(T::zero(), |acc, d| acc.max(d.node.abs()));
    let xs: Vec<T> = data.iter().map(|d| d.node / scale).collect();
    let mut rho: Vec<T> = data
        .iter()
        .map(|d| match d.value {
            TargetValue::Value(f) => scale / f,
            TargetValue::Pole => T::zero(),
        })
        .collect();

    // Inverse differences, in place: after pass k, rho[i] = ρ_k(x_i) for i ≥ k.
    let mut phi = Vec::with_capacity(n);
    phi.push(rho[0]);
    for k in 1..n {
        let pivot = rho[k - 1];
        for i in k..n {
            let diff = rho[i] - pivot;
            if diff.is_zero() || !diff.is_finite() {
                return Err(Error::Degenerate {
                    condition: f64::INFINITY,
                    detail: format!("inverse difference {k} is singular"),
                });
            }
            rho[i] = (xs[i] - xs[k - 1]) / diff;
        }
        phi.push(rho[k]);
    }

    // Convergents A_k/B_k with A_k = φ_k A_{k−1} + (x − x_{k−1}) A_{k−2}.
    let mut a_prev = vec![T::one()];
    let mut b_prev: Vec<T> = vec![];
    let mut a = vec![phi[0]];
    let mut b = vec![T::one()];
    for k in 1..n {
        let next = |cur: &[T], prev: &[T]| {
            let len = cur.len().max(prev.len() + 1);
            let mut out = vec![T::zero(); len];
            for (i, &c) in cur.iter().enumerate() {
                out[i] = out[i] + phi[k] * c;
            }
            for (i, &c) in prev.iter().enumerate() {
                out[i + 1] = out[i + 1] + c;
                out[i] = out[i] - xs[k - 1] * c;
            }
            out
        };
        let a_next = next(&a, &a_prev);
        let b_next = next(&b, &b_prev);
        a_prev = std::mem::replace(&mut a, a_next);
        b_prev = std::mem::replace(&mut b, b_next);
    }

    // A/B = Q̂/R̂ in the scaled variable.
    let m = n / 2;
    a.resize(m + 1, T::zero());
    b.resize(m, T::zero());
    let lead = a[m];
    if lead.is_zero() || !lead.is_finite() {
        return Err(Error::Degenerate {
            condition: f64::INFINITY,
            detail: "continued fraction has a deficient denominator degree".into(),
        });
    }
    let scaled = RationalFunction {
        numerator: b.iter().map(|&c| c / lead).collect(),
        denominator: a.iter().map(|&c| c / lead).collect(),
    };
    Ok(scaled.rescaled(T::one() / scale))
}
