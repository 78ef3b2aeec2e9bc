//! Chains, their single-excitation Hamiltonians and mirror-symmetry folding.

mod charpoly;
mod eigen;

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

pub use charpoly::{char_poly_eval, char_poly_eval_scaled, char_polys, ScaledCharPoly};
pub use eigen::{eigendecompose, eigenvalues, SpectralDecomposition};

/// Default relative tolerance for symmetry and spectrum comparisons.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

/// Coupling strengths `J_n` and fields `B_n` of an XX chain (ħ = 1).
///
/// Couplings are kept in the positive gauge: a negative coupling is a
/// similarity transform away from its absolute value.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainSpec<T = f64> {
    couplings: Vec<T>,
    fields: Vec<T>,
}

impl<T: Real> ChainSpec<T> {
    pub fn new(couplings: Vec<T>, fields: Vec<T>) -> Result<Self> {
        if fields.is_empty() {
            return Err(Error::InvalidChain("a chain needs at least one site".into()));
        }
        if fields.len() != couplings.len() + 1 {
            return Err(Error::InvalidChain(format!(
                "{} couplings need {} fields, got {}",
                couplings.len(),
                couplings.len() + 1,
                fields.len()
            )));
        }
        if let Some(bad) = couplings.iter().chain(&fields).find(|x| !x.is_finite()) {
            return Err(Error::InvalidChain(format!("non-finite entry {bad:?}")));
        }
        if let Some(index) = couplings.iter().position(|j| j.is_zero()) {
            return Err(Error::ReducibleChain { index });
        }
        let couplings = couplings.into_iter().map(|j| j.abs()).collect();
        Ok(Self { couplings, fields })
    }

    /// Field-free chain with the given couplings.
    pub fn field_free(couplings: Vec<T>) -> Result<Self> {
        let n = couplings.len() + 1;
        Self::new(couplings, vec![T::zero(); n])
    }

    /// Uniformly coupled, field-free chain of `n` sites.
    pub fn uniform(n: usize, coupling: T) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidChain("a chain needs at least one site".into()));
        }
        Self::field_free(vec![coupling; n - 1])
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    pub fn couplings(&self) -> &[T] {
        &self.couplings
    }

    pub fn fields(&self) -> &[T] {
        &self.fields
    }

    /// Chain read in the opposite direction.
    pub fn reversed(&self) -> Self {
        let mut couplings = self.couplings.clone();
        couplings.reverse();
        let mut fields = self.fields.clone();
        fields.reverse();
        Self { couplings, fields }
    }

    pub fn max_coupling(&self) -> T {
        self.couplings.iter().fold(T::zero(), |m, &j| m.max(j))
    }

    pub fn map<U: Real>(&self, f: impl Fn(T) -> U) -> ChainSpec<U> {
        ChainSpec {
            couplings: self.couplings.iter().map(|&x| f(x)).collect(),
            fields: self.fields.iter().map(|&x| f(x)).collect(),
        }
    }
}

/// Real symmetric tridiagonal matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct JacobiMatrix<T = f64> {
    pub diag: Vec<T>,
    pub offdiag: Vec<T>,
}

impl<T: Real> JacobiMatrix<T> {
    pub fn new(diag: Vec<T>, offdiag: Vec<T>) -> Result<Self> {
        if offdiag.len() + 1 != diag.len() && !(diag.is_empty() && offdiag.is_empty()) {
            return Err(Error::InvalidChain(format!(
                "tridiagonal matrix of size {} needs {} off-diagonal entries, got {}",
                diag.len(),
                diag.len().saturating_sub(1),
                offdiag.len()
            )));
        }
        Ok(Self { diag, offdiag })
    }

    pub fn size(&self) -> usize {
        self.diag.len()
    }

    /// Entry `(r, c)` of the dense form.
    pub fn entry(&self, r: usize, c: usize) -> T {
        if r == c {
            self.diag[r]
        } else if r + 1 == c {
            self.offdiag[r]
        } else if c + 1 == r {
            self.offdiag[c]
        } else {
            T::zero()
        }
    }

    /// Infinity norm; equals the 2-norm bound used for residual scaling.
    pub fn norm_inf(&self) -> T {
        let n = self.size();
        (0..n).fold(T::zero(), |m, i| {
            let left = if i > 0 { self.offdiag[i - 1].abs() } else { T::zero() };
            let right = if i + 1 < n { self.offdiag[i].abs() } else { T::zero() };
            m.max(self.diag[i].abs() + left + right)
        })
    }

    /// `y = M x`.
    pub fn apply(&self, x: &[T]) -> Vec<T> {
        let n = self.size();
        (0..n)
            .map(|i| {
                let mut acc = self.diag[i] * x[i];
                if i > 0 {
                    acc = acc + self.offdiag[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    acc = acc + self.offdiag[i] * x[i + 1];
                }
                acc
            })
            .collect()
    }

    /// Palindromic within relative tolerance `tol`.
    pub fn is_mirror_symmetric(&self, tol: T) -> bool {
        mirror_deviation(&self.diag, &self.offdiag) <= tol
    }

    /// The chain this matrix is the single-excitation block of.
    pub fn to_chain(&self) -> Result<ChainSpec<T>> {
        ChainSpec::new(self.offdiag.clone(), self.diag.clone())
    }
}

/// Single-excitation Hamiltonian: off-diagonal `J_n`, diagonal `B_n`.
///
/// The constant `½ΣB` from the Z terms is a global phase and is dropped; the
/// sign of the per-site shift is absorbed into `B_n`.
pub fn build_hamiltonian<T: Real>(spec: &ChainSpec<T>) -> JacobiMatrix<T> {
    JacobiMatrix {
        diag: spec.fields.clone(),
        offdiag: spec.couplings.clone(),
    }
}

pub(crate) fn mirror_deviation<T: Real>(diag: &[T], offdiag: &[T]) -> T {
    let scale = diag
        .iter()
        .chain(offdiag)
        .fold(T::zero(), |m, x| m.max(x.abs()))
        .max(T::min_positive_value());
    let dev = |xs: &[T]| {
        xs.iter()
            .zip(xs.iter().rev())
            .fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs()))
    };
    dev(diag).max(dev(offdiag)) / scale
}

/// Relative deviation from mirror symmetry `J_n = J_{N-n}`, `B_n = B_{N+1-n}`.
pub fn mirror_asymmetry<T: Real>(spec: &ChainSpec<T>) -> T {
    mirror_deviation(&spec.fields, &spec.couplings)
}

/// True when the chain is invariant under site reversal (relative 1e-12).
pub fn mirror_symmetric<T: Real>(spec: &ChainSpec<T>) -> bool {
    mirror_asymmetry(spec) <= T::lit(1e-12)
}

/// Symmetry sector of an eigenvector under site reversal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Symmetry {
    #[serde(rename = "+")]
    Symmetric,
    #[serde(rename = "-")]
    Antisymmetric,
}

impl Symmetry {
    pub fn flipped(self) -> Self {
        match self {
            Symmetry::Symmetric => Symmetry::Antisymmetric,
            Symmetry::Antisymmetric => Symmetry::Symmetric,
        }
    }

    pub fn sign(self) -> f64 {
        match self {
            Symmetry::Symmetric => 1.0,
            Symmetry::Antisymmetric => -1.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Symmetry::Symmetric => "+",
            Symmetry::Antisymmetric => "-",
        }
    }
}

impl std::str::FromStr for Symmetry {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "+" | "sym" | "symmetric" => Ok(Symmetry::Symmetric),
            "-" | "anti" | "antisymmetric" => Ok(Symmetry::Antisymmetric),
            other => Err(Error::InvalidArgument(format!("unknown symmetry label {other:?}"))),
        }
    }
}

/// Splits a mirror-symmetric chain into its symmetric and antisymmetric
/// sectors `(H₊, H₋)`.
///
/// Each block is the left half of the chain, outermost site first. For even
/// length the innermost diagonal entry is shifted by `±J_mid`. For odd length
/// `H₊` keeps the middle site with its coupling scaled by √2 and `H₋` drops it.
pub fn fold_symmetric<T: Real>(spec: &ChainSpec<T>) -> Result<(JacobiMatrix<T>, JacobiMatrix<T>)> {
    fold_with_tolerance(spec, T::lit(1e-12))
}

pub fn fold_with_tolerance<T: Real>(spec: &ChainSpec<T>, tol: T) -> Result<(JacobiMatrix<T>, JacobiMatrix<T>)> {
    let deviation = mirror_asymmetry(spec);
    if deviation > tol {
        return Err(Error::NotMirrorSymmetric {
            deviation: deviation.to_f64_lossy(),
        });
    }
    Ok(fold_parts(&spec.fields, &spec.couplings))
}

/// Sector blocks of a palindromic tridiagonal matrix; symmetry is assumed.
pub(crate) fn fold_parts<T: Real>(diag: &[T], offdiag: &[T]) -> (JacobiMatrix<T>, JacobiMatrix<T>) {
    let n = diag.len();
    let h = n / 2;
    if n % 2 == 0 {
        let mid = offdiag[h - 1];
        let mut plus_diag = diag[..h].to_vec();
        let mut minus_diag = plus_diag.clone();
        plus_diag[h - 1] = plus_diag[h - 1] + mid;
        minus_diag[h - 1] = minus_diag[h - 1] - mid;
        let off = offdiag[..h - 1].to_vec();
        (
            JacobiMatrix {
                diag: plus_diag,
                offdiag: off.clone(),
            },
            JacobiMatrix {
                diag: minus_diag,
                offdiag: off,
            },
        )
    } else {
        let mut plus_off = offdiag[..h].to_vec();
        if h > 0 {
            plus_off[h - 1] = plus_off[h - 1] * T::two().sqrt();
        }
        (
            JacobiMatrix {
                diag: diag[..=h].to_vec(),
                offdiag: plus_off,
            },
            JacobiMatrix {
                diag: diag[..h].to_vec(),
                offdiag: offdiag[..h.saturating_sub(1)].to_vec(),
            },
        )
    }
}

/// Engineered perfect-transfer chain `J_n = scale·√(n(N−n))`, zero fields.
///
/// Its spectrum is the ladder `scale·(N−1−2k)`, `k = 0..N−1`, and transfer
/// from site 1 to site N is perfect at `t₀ = π/(2·scale)`.
pub fn make_pst_chain<T: Real>(n: usize, scale: T) -> Result<ChainSpec<T>> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "a perfect-transfer chain needs at least 2 sites, got {n}"
        )));
    }
    let couplings = (1..n)
        .map(|k| scale * T::from_usize_lossy(k * (n - k)).sqrt())
        .collect();
    ChainSpec::field_free(couplings)
}

/// Transfer time of [`make_pst_chain`] with the given scale.
pub fn pst_transfer_time<T: Real>(scale: T) -> T {
    T::pi() / (T::two() * scale)
}

/// Input, bulk and output site ranges (0-based, half-open).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegionPartition {
    pub input: Range<usize>,
    pub bulk: Range<usize>,
    pub output: Range<usize>,
}

impl RegionPartition {
    /// Contiguous ranges that must be disjoint, cover `0..n`, and mirror each
    /// other under `i ↦ n−1−i`.
    pub fn new(n: usize, input: Range<usize>, bulk: Range<usize>, output: Range<usize>) -> Result<Self> {
        let p = Self { input, bulk, output };
        p.validate(n)?;
        Ok(p)
    }

    /// First `m_in` and last `m_out` sites, bulk in between.
    pub fn ends(n: usize, m_in: usize, m_out: usize) -> Result<Self> {
        if m_in + m_out > n {
            return Err(Error::InvalidPartition(format!(
                "regions of size {m_in} and {m_out} do not fit in {n} sites"
            )));
        }
        Self::new(n, 0..m_in, m_in..n - m_out, n - m_out..n)
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let ranges = [&self.input, &self.bulk, &self.output];
        if self.input.is_empty() || self.output.is_empty() {
            return Err(Error::InvalidPartition(
                "input and output regions must be nonempty".into(),
            ));
        }
        if ranges.iter().any(|r| r.start > r.end || r.end > n) {
            return Err(Error::InvalidPartition(format!("range outside 0..{n}")));
        }
        let mut sorted: Vec<&Range<usize>> = ranges.into_iter().filter(|r| !r.is_empty()).collect();
        sorted.sort_by_key(|r| r.start);
        let mut cursor = 0;
        for r in &sorted {
            if r.start != cursor {
                return Err(Error::InvalidPartition(format!(
                    "regions must be disjoint and cover all {n} sites (gap or overlap at {cursor})"
                )));
            }
            cursor = r.end;
        }
        if cursor != n {
            return Err(Error::InvalidPartition(format!(
                "regions stop at {cursor} of {n} sites"
            )));
        }
        let mirrored = (n - self.input.end)..(n - self.input.start);
        if mirrored != self.output {
            return Err(Error::InvalidPartition(format!(
                "output {:?} is not the mirror image of input {:?}",
                self.output, self.input
            )));
        }
        Ok(())
    }
}
