use crate::error::{Error, Result};
use crate::scalar::Real;

use super::{JacobiMatrix, Symmetry};

/// Eigenpairs of a Jacobi matrix, eigenvalues in decreasing order.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition<T = f64> {
    pub eigenvalues: Vec<T>,
    /// `eigenvectors[k]` belongs to `eigenvalues[k]`; first entry positive.
    pub eigenvectors: Vec<Vec<T>>,
    /// Mirror-symmetry sector per eigenvector, when the matrix is mirror
    /// symmetric.
    pub symmetry_labels: Option<Vec<Symmetry>>,
}

impl<T: Real> SpectralDecomposition<T> {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Largest `‖Mv − λv‖` over all pairs.
    pub fn max_residual(&self, m: &JacobiMatrix<T>) -> T {
        self.eigenvalues
            .iter()
            .zip(&self.eigenvectors)
            .map(|(&lam, v)| {
                m.apply(v)
                    .iter()
                    .zip(v)
                    .fold(T::zero(), |acc, (&mv, &vi)| {
                        let r = mv - lam * vi;
                        acc + r * r
                    })
                    .sqrt()
            })
            .fold(T::zero(), T::max)
    }

    /// `|⟨site|λ_k⟩|²` for every eigenvector.
    pub fn site_weights(&self, site: usize) -> Vec<T> {
        self.eigenvectors.iter().map(|v| v[site] * v[site]).collect()
    }
}

/// Eigenvalues only, decreasing. O(N²).
pub fn eigenvalues<T: Real>(m: &JacobiMatrix<T>) -> Result<Vec<T>> {
    let mut d = m.diag.clone();
    let mut e = m.offdiag.clone();
    e.push(T::zero());
    implicit_ql(&mut d, &mut e, None)?;
    d.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    Ok(d)
}

/// Full eigendecomposition by implicit-shift QL on the tridiagonal form.
///
/// Exactly palindromic matrices are solved sector by sector, so eigenvectors
/// are exactly (anti)symmetric even where the mirror pairs are degenerate to
/// machine precision.
pub fn eigendecompose<T: Real>(m: &JacobiMatrix<T>) -> Result<SpectralDecomposition<T>> {
    let n = m.size();
    let deviation = super::mirror_deviation(&m.diag, &m.offdiag);
    if n >= 2 && deviation <= T::epsilon() * T::lit(8.0) {
        return sector_decompose(m);
    }
    let (eigenvalues, eigenvectors) = full_decompose(m)?;
    let symmetry_labels = if n > 0 && deviation <= T::lit(super::DEFAULT_TOLERANCE) {
        Some(
            eigenvectors
                .iter()
                .map(|v| {
                    // End amplitudes can underflow for states localized in the
                    // middle, so use the full mirror overlap.
                    let overlap = (0..n).fold(T::zero(), |acc, i| acc + v[i] * v[n - 1 - i]);
                    if overlap.is_sign_negative() {
                        Symmetry::Antisymmetric
                    } else {
                        Symmetry::Symmetric
                    }
                })
                .collect(),
        )
    } else {
        None
    };

    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
        symmetry_labels,
    })
}

fn full_decompose<T: Real>(m: &JacobiMatrix<T>) -> Result<(Vec<T>, Vec<Vec<T>>)> {
    let n = m.size();
    let mut d = m.diag.clone();
    let mut e = m.offdiag.clone();
    e.push(T::zero());
    // Row-major accumulator: z[r * n + k] is entry r of eigenvector k.
    let mut z = vec![T::zero(); n * n];
    for i in 0..n {
        z[i * n + i] = T::one();
    }
    implicit_ql(&mut d, &mut e, Some(&mut z))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[b].partial_cmp(&d[a]).unwrap_or(std::cmp::Ordering::Equal));

    let eigenvalues: Vec<T> = order.iter().map(|&k| d[k]).collect();
    let eigenvectors: Vec<Vec<T>> = order
        .iter()
        .map(|&k| {
            let mut v: Vec<T> = (0..n).map(|r| z[r * n + k]).collect();
            if v.first().is_some_and(|x| x.is_sign_negative()) {
                v.iter_mut().for_each(|x| *x = -*x);
            }
            v
        })
        .collect();
    Ok((eigenvalues, eigenvectors))
}

fn sector_decompose<T: Real>(m: &JacobiMatrix<T>) -> Result<SpectralDecomposition<T>> {
    let n = m.size();
    let (plus, minus) = super::fold_parts(&m.diag, &m.offdiag);
    let (lp, vp) = full_decompose(&plus)?;
    let (lm, vm) = full_decompose(&minus)?;
    let r = T::two().sqrt().recip();
    let unfold = |u: &[T], sign: T| {
        let mut v = vec![T::zero(); n];
        for (i, &x) in u.iter().enumerate() {
            if 2 * i + 1 == n {
                v[i] = x;
            } else {
                v[i] = x * r;
                v[n - 1 - i] = sign * x * r;
            }
        }
        v
    };
    let mut pairs: Vec<(T, Vec<T>, Symmetry)> = lp
        .into_iter()
        .zip(&vp)
        .map(|(l, u)| (l, unfold(u, T::one()), Symmetry::Symmetric))
        .chain(
            lm.into_iter()
                .zip(&vm)
                .map(|(l, u)| (l, unfold(u, -T::one()), Symmetry::Antisymmetric)),
        )
        .collect();
    if m.offdiag.iter().all(|&x| x != T::zero()) {
        // Nonzero couplings force strict interlacing with the sectors
        // alternating from the top; interleaving keeps that even where the
        // computed values of a pair tie or cross by rounding.
        let (mut s, mut a): (Vec<_>, Vec<_>) = pairs.into_iter().partition(|p| p.2 == Symmetry::Symmetric);
        s.reverse();
        a.reverse();
        pairs = Vec::with_capacity(n);
        for k in 0..n {
            let next = if k % 2 == 0 { s.pop() } else { a.pop() };
            pairs.extend(next);
        }
    } else {
        pairs.sort_by(|x, y| y.0.partial_cmp(&x.0).unwrap_or(std::cmp::Ordering::Equal));
    }
    let mut eigenvalues = Vec::with_capacity(n);
    let mut eigenvectors = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for (l, v, s) in pairs {
        eigenvalues.push(l);
        eigenvectors.push(v);
        labels.push(s);
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
        symmetry_labels: Some(labels),
    })
}

const MAX_ITERATIONS: usize = 60;

/// Implicit QL with Wilkinson shifts. `e[i]` couples `i` and `i+1`; `e[n-1]`
/// is scratch. When `z` is given it accumulates the rotations (row-major n×n).
fn implicit_ql<T: Real>(d: &mut [T], e: &mut [T], mut z: Option<&mut [T]>) -> Result<()> {
    let n = d.len();
    let eps = T::epsilon();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= eps * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_ITERATIONS {
                return Err(Error::NoConvergence(l));
            }
            let mut g = (d[l + 1] - d[l]) / (T::two() * e[l]);
            let mut r = g.hypot(T::one());
            let signed_r = if g.is_sign_negative() { -r } else { r };
            g = d[m] - d[l] + e[l] / (g + signed_r);
            let mut s = T::one();
            let mut c = T::one();
            let mut p = T::zero();
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] = d[i + 1] - p;
                    e[m] = T::zero();
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + T::two() * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = z.as_deref_mut() {
                    for k in 0..n {
                        let f = z[k * n + i + 1];
                        z[k * n + i + 1] = s * z[k * n + i] + c * f;
                        z[k * n + i] = c * z[k * n + i] - s * f;
                    }
                }
            }
            if deflated {
                continue;
            }
            d[l] = d[l] - p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
    Ok(())
}
