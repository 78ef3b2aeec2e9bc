use std::ops::Range;

use num_complex::Complex;
use serde::Serialize;

use crate::chain::{ChainSpec, RegionPartition, SpectralDecomposition, Symmetry};
use crate::error::{Error, Result};
use crate::linalg::{svd, Mat};

use super::{Propagator, SingleExcitationState};

/// Singular values at or below this mark a direction as null.
pub const DEFAULT_NULL_THRESHOLD: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct ClassifyOptions {
    /// Admissible distance to the ladder, in units of `δ`.
    pub tolerance: f64,
    /// Ladder offset `c` in `[0, 2)`; inferred from the spectrum when absent.
    pub offset: Option<f64>,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-6,
            offset: None,
        }
    }
}

/// Split of the spectrum into eigenvalues that meet the perfect-transfer
/// phase condition at `t₀` and those that do not.
///
/// The condition is `e^{−iλt₀} = ±e^{iφ}` with `+` in the symmetric sector.
/// With `δ = π/t₀` this reads `λ/δ ≡ c + [σ = −] (mod 2)` and `φ = −cπ`.
#[derive(Clone, Debug, Serialize)]
pub struct EigenvalueClassification {
    pub satisfied: Vec<usize>,
    pub violated: Vec<usize>,
    pub phase: f64,
    pub delta: f64,
    pub t0: f64,
    pub offset: f64,
    /// `|λ − nearest admissible value|`, absolute units.
    pub deviations: Vec<f64>,
    pub tolerance: f64,
}

impl EigenvalueClassification {
    pub fn is_perfect(&self) -> bool {
        self.violated.is_empty()
    }
}

/// Distance between residues on the circle of circumference 2.
fn circular(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0);
    d.min(2.0 - d)
}

fn residue(lambda: f64, delta: f64, s: Symmetry) -> f64 {
    let shift = if s == Symmetry::Antisymmetric { 1.0 } else { 0.0 };
    (lambda / delta - shift).rem_euclid(2.0)
}

/// Classifies every eigenvalue of a mirror-symmetric chain against the ladder
/// defined by `t₀`.
///
/// Without an explicit offset the most populated residue class wins; ties go
/// to the smaller residue. The offset is then the circular mean of that class.
pub fn classify_eigenvalues(
    decomp: &SpectralDecomposition,
    t0: f64,
    opts: &ClassifyOptions,
) -> Result<EigenvalueClassification> {
    if !(t0 > 0.0) || !t0.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "transfer time must be positive, got {t0}"
        )));
    }
    if !(opts.tolerance >= 0.0) {
        return Err(Error::InvalidArgument(
            "classification tolerance must be nonnegative".into(),
        ));
    }
    let labels = decomp
        .symmetry_labels
        .as_ref()
        .ok_or(Error::NotMirrorSymmetric { deviation: f64::NAN })?;
    let delta = std::f64::consts::PI / t0;
    let tol = opts.tolerance;
    let residues: Vec<f64> = decomp
        .eigenvalues
        .iter()
        .zip(labels)
        .map(|(&l, &s)| residue(l, delta, s))
        .collect();

    let offset = match opts.offset {
        Some(c) => c.rem_euclid(2.0),
        None => infer_offset(&residues, tol),
    };

    let deviations: Vec<f64> = residues.iter().map(|&r| circular(r, offset) * delta).collect();
    let (satisfied, violated) = (0..residues.len()).partition(|&k| deviations[k] <= tol * delta);
    let mut phase = -offset * std::f64::consts::PI;
    if phase <= -std::f64::consts::PI {
        phase += 2.0 * std::f64::consts::PI;
    }
    Ok(EigenvalueClassification {
        satisfied,
        violated,
        phase,
        delta,
        t0,
        offset,
        deviations,
        tolerance: tol * delta,
    })
}

fn infer_offset(residues: &[f64], tol: f64) -> f64 {
    if residues.is_empty() {
        return 0.5;
    }
    let mut best = (0usize, f64::INFINITY);
    for &r in residues {
        let count = residues.iter().filter(|&&q| circular(q, r) <= tol).count();
        if count > best.0 || (count == best.0 && r < best.1) {
            best = (count, r);
        }
    }
    let centre = best.1;
    let members: Vec<f64> = residues
        .iter()
        .filter(|&&q| circular(q, centre) <= tol)
        .map(|&q| {
            // Unwrap onto the branch nearest the centre before averaging.
            let d = (q - centre + 1.0).rem_euclid(2.0) - 1.0;
            centre + d
        })
        .collect();
    (members.iter().sum::<f64>() / members.len() as f64).rem_euclid(2.0)
}

/// Orthonormal encodings on the input region together with their transfer
/// fidelity at `t₀`.
#[derive(Clone, Debug)]
pub struct EncodingResult {
    pub inputs: Vec<SingleExcitationState>,
    /// `Π_out e^{−iHt₀}ψ`, normalized; the site basis vector when it vanishes.
    pub outputs: Vec<SingleExcitationState>,
    pub fidelities: Vec<f64>,
    pub null_dimension: usize,
    /// Eigenvalue indices the encodings are orthogonal to.
    pub excluded: Vec<usize>,
    /// Largest singular value accepted as null.
    pub boundary_singular: f64,
}

impl EncodingResult {
    pub fn min_fidelity(&self) -> f64 {
        self.fidelities.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Input states orthogonal to every `Π_in|λ_n⟩` with `n ∈ Γ_P̄`.
pub fn null_space_encoding(
    spec: &ChainSpec,
    partition: &RegionPartition,
    classification: &EigenvalueClassification,
) -> Result<EncodingResult> {
    let prop = Propagator::new(spec)?;
    encode_excluding(
        &prop,
        partition,
        &classification.violated,
        classification.t0,
        DEFAULT_NULL_THRESHOLD,
    )
}

/// Encoding against an explicit set of eigenvalue indices, using an existing
/// propagator.
pub fn encode_excluding(
    prop: &Propagator,
    partition: &RegionPartition,
    excluded: &[usize],
    t0: f64,
    threshold: f64,
) -> Result<EncodingResult> {
    let n = prop.len();
    partition.validate(n)?;
    let input = &partition.input;
    let m = input.len();
    let vs = &prop.decomposition().eigenvectors;
    if let Some(&bad) = excluded.iter().find(|&&k| k >= n) {
        return Err(Error::InvalidArgument(format!("eigenvalue index {bad} outside 0..{n}")));
    }

    let (basis, boundary) = if excluded.is_empty() {
        let basis: Vec<Vec<f64>> = (0..m)
            .map(|i| (0..m).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        (basis, 0.0)
    } else {
        let a = Mat::from_fn(excluded.len(), m, |r, c| vs[excluded[r]][input.start + c]);
        let dec = svd::<f64, f64>(&a);
        let null: Vec<usize> = (0..m).filter(|&k| dec.s[k] <= threshold).collect();
        if null.is_empty() {
            return Err(Error::EmptyNullSpace {
                smallest_singular: dec.s[m - 1],
            });
        }
        let boundary = null.iter().map(|&k| dec.s[k]).fold(0.0, f64::max);
        (null.iter().map(|&k| dec.v.col(k).to_vec()).collect(), boundary)
    };

    let mut result = EncodingResult {
        inputs: Vec::with_capacity(basis.len()),
        outputs: Vec::with_capacity(basis.len()),
        fidelities: Vec::with_capacity(basis.len()),
        null_dimension: basis.len(),
        excluded: excluded.to_vec(),
        boundary_singular: boundary,
    };
    for local in basis {
        let mut amps = vec![Complex::new(0.0, 0.0); n];
        for (k, &a) in local.iter().enumerate() {
            amps[input.start + k] = Complex::new(a, 0.0);
        }
        let state = SingleExcitationState::normalized(amps).expect("singular vectors are unit");
        let (fidelity, output) = project_evolved(prop, &state, &partition.output, t0);
        result.inputs.push(state);
        result.outputs.push(output);
        result.fidelities.push(fidelity);
    }
    Ok(result)
}

/// `‖Π_region e^{−iHt}ψ‖²` and the normalized projection.
pub(super) fn project_evolved(
    prop: &Propagator,
    state: &SingleExcitationState,
    region: &Range<usize>,
    t: f64,
) -> (f64, SingleExcitationState) {
    let evolved = prop.evolve(state, t);
    let n = state.len();
    let mut amps = vec![Complex::new(0.0, 0.0); n];
    amps[region.clone()].copy_from_slice(&evolved.amplitudes()[region.clone()]);
    let fidelity: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    let output = SingleExcitationState::normalized(amps)
        .unwrap_or_else(|| SingleExcitationState::site(region.start, n).expect("region inside chain"));
    (fidelity.min(1.0), output)
}

/// The `|Λ_in| − 1` violated eigenvalues with the largest
/// weight-on-input × deviation, most damaging first.
pub fn worst_offenders(
    decomp: &SpectralDecomposition,
    classification: &EigenvalueClassification,
    input: &Range<usize>,
) -> Vec<usize> {
    let mut scored: Vec<(usize, f64)> = classification
        .violated
        .iter()
        .map(|&k| {
            let w: f64 = decomp.eigenvectors[k][input.clone()].iter().map(|x| x * x).sum();
            (k, w * classification.deviations[k])
        })
        .collect();
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    scored.truncate(input.len().saturating_sub(1));
    scored.into_iter().map(|(k, _)| k).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{build_hamiltonian, eigendecompose, make_pst_chain};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn example_one() -> ChainSpec {
        let s = |a: f64, b: f64| a * b.sqrt();
        ChainSpec::field_free(vec![
            s(10.0, 5.0),
            s(12.0, 14.0),
            s(37.0, 6.0),
            s(5.0, 185.0),
            s(37.0, 6.0),
            s(12.0, 14.0),
            s(10.0, 5.0),
        ])
        .unwrap()
    }

    #[test]
    fn example_one_classification() {
        let spec = example_one();
        let d = eigendecompose(&build_hamiltonian(&spec)).unwrap();
        let t0 = PI / (4.0 * 185f64.sqrt());
        let c = classify_eigenvalues(&d, t0, &ClassifyOptions::default()).unwrap();
        assert_relative_eq!(c.offset, 0.5, epsilon = 1e-10);
        assert_eq!(c.violated.len(), 2);
        for &k in &c.violated {
            assert_relative_eq!(d.eigenvalues[k].abs(), 185f64.sqrt(), max_relative = 1e-12);
        }
        assert_eq!(c.satisfied.len() + c.violated.len(), 8);
    }

    #[test]
    fn example_one_encoding() {
        let spec = example_one();
        let d = eigendecompose(&build_hamiltonian(&spec)).unwrap();
        let t0 = PI / (4.0 * 185f64.sqrt());
        let c = classify_eigenvalues(&d, t0, &ClassifyOptions::default()).unwrap();
        let p = RegionPartition::ends(8, 3, 3).unwrap();
        let e = null_space_encoding(&spec, &p, &c).unwrap();
        assert_eq!(e.null_dimension, 1);
        let a = e.inputs[0].amplitudes();
        let norm = 703f64.sqrt();
        let sign = a[0].re.signum();
        assert_relative_eq!(sign * a[0].re, 3.0 * 7f64.sqrt() / norm, epsilon = 1e-12);
        assert!(a[1].norm() < 1e-12);
        assert_relative_eq!(sign * a[2].re, 8.0 * 10f64.sqrt() / norm, epsilon = 1e-12);
        assert_relative_eq!(e.fidelities[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn perfect_ladder_has_no_violations() {
        let spec = make_pst_chain(9, 1.0).unwrap();
        let d = eigendecompose(&build_hamiltonian(&spec)).unwrap();
        let c = classify_eigenvalues(&d, PI / 2.0, &ClassifyOptions::default()).unwrap();
        assert!(c.is_perfect());
        assert!(c.deviations.iter().all(|&x| x < 1e-12));
    }

    #[test]
    fn empty_violation_set_gives_site_basis() {
        let spec = make_pst_chain(6, 1.0).unwrap();
        let d = eigendecompose(&build_hamiltonian(&spec)).unwrap();
        let c = classify_eigenvalues(&d, PI / 2.0, &ClassifyOptions::default()).unwrap();
        let p = RegionPartition::ends(6, 1, 1).unwrap();
        let e = null_space_encoding(&spec, &p, &c).unwrap();
        assert_eq!(e.null_dimension, 1);
        assert_relative_eq!(e.inputs[0].amplitudes()[0].re, 1.0);
        assert_relative_eq!(e.fidelities[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn uniform_chain_violations_sit_at_band_edges() {
        let spec = ChainSpec::uniform(40, 1.0).unwrap();
        let d = eigendecompose(&build_hamiltonian(&spec)).unwrap();
        let c = classify_eigenvalues(&d, 94.5, &ClassifyOptions::default()).unwrap();
        assert!(!c.violated.is_empty());
        let p = RegionPartition::ends(40, 3, 3).unwrap();
        let worst = worst_offenders(&d, &c, &p.input);
        assert_eq!(worst.len(), 2);
    }

    #[test]
    fn too_many_exclusions_is_an_error() {
        let spec = ChainSpec::uniform(6, 1.0).unwrap();
        let prop = Propagator::new(&spec).unwrap();
        let p = RegionPartition::ends(6, 2, 2).unwrap();
        match encode_excluding(&prop, &p, &[0, 1, 2], 1.0, DEFAULT_NULL_THRESHOLD) {
            Err(Error::EmptyNullSpace { smallest_singular }) => assert!(smallest_singular > 1e-3),
            other => panic!("expected an empty null space, got {other:?}"),
        }
    }
}
