use std::ops::Range;

use num_complex::Complex;
use serde::Serialize;

use crate::chain::ChainSpec;
use crate::error::{Error, Result};
use crate::linalg::{svd, Mat};

use super::{Propagator, SingleExcitationState};

/// Sites to be prepared (`bulk`) and the sites the preparing excitation may
/// start on (`output`, usually both chain ends).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CreationRegions {
    pub bulk: Range<usize>,
    pub output: Vec<Range<usize>>,
}

impl CreationRegions {
    pub fn new(n: usize, bulk: Range<usize>, output: Vec<Range<usize>>) -> Result<Self> {
        let r = Self { bulk, output };
        r.validate(n)?;
        Ok(r)
    }

    fn output_sites(&self) -> Vec<usize> {
        self.output.iter().flat_map(|r| r.clone()).collect()
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.bulk.is_empty() || self.output.iter().all(|r| r.is_empty()) {
            return Err(Error::InvalidPartition(
                "bulk and output regions must be nonempty".into(),
            ));
        }
        let all = std::iter::once(&self.bulk).chain(&self.output);
        if all.clone().any(|r| r.start > r.end || r.end > n) {
            return Err(Error::InvalidPartition(format!("range outside 0..{n}")));
        }
        let mut seen = vec![false; n];
        for s in self.output_sites() {
            if seen[s] {
                return Err(Error::InvalidPartition(format!(
                    "site {s} listed twice in the output region"
                )));
            }
            seen[s] = true;
        }
        Ok(())
    }
}

/// `W = ⟨bulk|e^{−iHt₀}|out⟩`; the creation operator is `W W†`.
fn window(prop: &Propagator, regions: &CreationRegions, t0: f64) -> Mat<Complex<f64>> {
    let out = regions.output_sites();
    let full = prop.block(&regions.bulk, &(0..prop.len()), t0);
    Mat::from_fn(regions.bulk.len(), out.len(), |r, c| full.get(r, out[c]))
}

/// Eigenvalues and bulk eigenvectors of `Π_bulk e^{−iHt₀} Π_out e^{iHt₀} Π_bulk`.
#[derive(Clone, Debug)]
pub struct CreationModes {
    /// Decreasing, in `[0, 1]`, one per bulk site.
    pub eigenvalues: Vec<f64>,
    pub vectors: Vec<SingleExcitationState>,
}

pub fn creation_modes(spec: &ChainSpec, regions: &CreationRegions, t0: f64) -> Result<CreationModes> {
    let prop = Propagator::new(spec)?;
    regions.validate(prop.len())?;
    let w = window(&prop, regions, t0);
    // Right singular vectors of W† are the left ones of W and span the bulk.
    let wh = Mat::from_fn(w.cols(), w.rows(), |r, c| w.get(c, r).conj());
    let dec = svd::<f64, Complex<f64>>(&wh);
    let n = prop.len();
    let mut eigenvalues = Vec::with_capacity(w.rows());
    let mut vectors = Vec::with_capacity(w.rows());
    for k in 0..w.rows() {
        let s = dec.s[k];
        eigenvalues.push((s * s).clamp(0.0, 1.0));
        let mut amps = vec![Complex::new(0.0, 0.0); n];
        amps[regions.bulk.clone()].copy_from_slice(dec.v.col(k));
        vectors.push(SingleExcitationState::normalized(amps).expect("unitary factor has unit columns"));
    }
    Ok(CreationModes { eigenvalues, vectors })
}

pub fn creation_spectrum(spec: &ChainSpec, regions: &CreationRegions, t0: f64) -> Result<Vec<f64>> {
    Ok(creation_modes(spec, regions, t0)?.eigenvalues)
}

#[derive(Clone, Debug)]
pub struct CreationState {
    /// `Π_out e^{iHt₀}|Ψ⟩`, normalized.
    pub input: SingleExcitationState,
    /// `‖Π_out e^{iHt₀}|Ψ⟩‖²`.
    pub fidelity: f64,
    /// `⟨Ψ|W W†|Ψ⟩`, the same number evaluated as a quadratic form.
    pub quadratic_form: f64,
}

/// Optimal output-region state evolving into `target` at `t₀`.
///
/// A vanishing projection is reported with fidelity 0 and the first output
/// site as input.
pub fn best_creation_state(
    spec: &ChainSpec,
    target: &SingleExcitationState,
    regions: &CreationRegions,
    t0: f64,
) -> Result<CreationState> {
    let prop = Propagator::new(spec)?;
    let n = prop.len();
    regions.validate(n)?;
    if target.len() != n {
        return Err(Error::InvalidArgument(format!(
            "target has {} amplitudes for a chain of {n} sites",
            target.len()
        )));
    }
    let off_bulk: f64 = target
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(i, _)| !regions.bulk.contains(i))
        .map(|(_, a)| a.norm_sqr())
        .sum();
    if off_bulk > 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "target has weight {off_bulk:e} outside the bulk region"
        )));
    }

    let back = prop.evolve(target, -t0);
    let out = regions.output_sites();
    let mut amps = vec![Complex::new(0.0, 0.0); n];
    for &s in &out {
        amps[s] = back.amplitudes()[s];
    }
    let fidelity: f64 = amps.iter().map(|a| a.norm_sqr()).sum();

    let w = window(&prop, regions, t0);
    let psi = &target.amplitudes()[regions.bulk.clone()];
    let quadratic_form: f64 = (0..w.cols())
        .map(|c| {
            (0..w.rows())
                .fold(Complex::new(0.0, 0.0), |acc, r| acc + psi[r].conj() * w.get(r, c))
                .norm_sqr()
        })
        .sum();

    let input = SingleExcitationState::normalized(amps)
        .unwrap_or_else(|| SingleExcitationState::site(out[0], n).expect("output site inside chain"));
    Ok(CreationState {
        input,
        fidelity: fidelity.min(1.0),
        quadratic_form,
    })
}
