//! Free evolution in the single-excitation subspace and the quantities built
//! on it: windowed transfer fidelities, eigenvalue classification against a
//! perfect-transfer ladder, null-space encodings, analytic bounds and state
//! creation.

pub mod bounds;
mod classify;
mod creation;

use std::ops::Range;

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use crate::chain::{build_hamiltonian, eigendecompose, ChainSpec, RegionPartition, SpectralDecomposition};
use crate::error::{Error, Result};
use crate::linalg::{norm2, svd, Mat};
use crate::scalar::Real;

pub use classify::{
    classify_eigenvalues, encode_excluding, null_space_encoding, worst_offenders, ClassifyOptions,
    EigenvalueClassification, EncodingResult, DEFAULT_NULL_THRESHOLD,
};
pub use creation::{
    best_creation_state, creation_modes, creation_spectrum, CreationModes, CreationRegions, CreationState,
};

/// Unit vector in the single-excitation subspace.
#[derive(Clone, Debug, PartialEq)]
pub struct SingleExcitationState<T = f64> {
    amplitudes: Vec<Complex<T>>,
}

impl<T: Real> SingleExcitationState<T> {
    /// Accepts amplitudes whose norm is one within `1e−12`.
    pub fn new(amplitudes: Vec<Complex<T>>) -> Result<Self> {
        let n = norm2::<T, Complex<T>>(&amplitudes);
        if !((n - T::one()).abs() <= T::lit(1e-12)) {
            return Err(Error::InvalidArgument(format!(
                "state norm is {}, not 1",
                n.to_f64_lossy()
            )));
        }
        Ok(Self { amplitudes })
    }

    /// Rescales to unit norm; `None` for the zero vector.
    pub fn normalized(amplitudes: Vec<Complex<T>>) -> Option<Self> {
        let n = norm2::<T, Complex<T>>(&amplitudes);
        if !(n > T::zero()) || !n.is_finite() {
            return None;
        }
        let inv = T::one() / n;
        Some(Self {
            amplitudes: amplitudes.into_iter().map(|a| a * inv).collect(),
        })
    }

    pub fn from_real(amplitudes: &[T]) -> Option<Self> {
        Self::normalized(amplitudes.iter().map(|&a| Complex::new(a, T::zero())).collect())
    }

    /// `|site⟩` in a chain of `n` sites.
    pub fn site(site: usize, n: usize) -> Result<Self> {
        if site >= n {
            return Err(Error::InvalidArgument(format!("site {site} outside a chain of {n}")));
        }
        let mut a = vec![Complex::new(T::zero(), T::zero()); n];
        a[site] = Complex::new(T::one(), T::zero());
        Ok(Self { amplitudes: a })
    }

    /// Embeds `local` (already normalized) at the start of `region`.
    fn embed(local: &[Complex<T>], region: &Range<usize>, n: usize) -> Self {
        let mut a = vec![Complex::new(T::zero(), T::zero()); n];
        a[region.clone()].copy_from_slice(local);
        Self { amplitudes: a }
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn norm(&self) -> T {
        norm2::<T, Complex<T>>(&self.amplitudes)
    }

    pub fn probabilities(&self) -> Vec<T> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `|⟨self|other⟩|²`.
    pub fn overlap(&self, other: &Self) -> T {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * b)
            .norm_sqr()
    }
}

/// `e^{−iHt}` through one eigendecomposition of `H`.
#[derive(Clone, Debug)]
pub struct Propagator<T = f64> {
    decomposition: SpectralDecomposition<T>,
}

impl<T: Real> Propagator<T> {
    pub fn new(spec: &ChainSpec<T>) -> Result<Self> {
        Ok(Self {
            decomposition: eigendecompose(&build_hamiltonian(spec))?,
        })
    }

    pub fn from_decomposition(decomposition: SpectralDecomposition<T>) -> Self {
        Self { decomposition }
    }

    pub fn decomposition(&self) -> &SpectralDecomposition<T> {
        &self.decomposition
    }

    pub fn len(&self) -> usize {
        self.decomposition.len()
    }

    pub fn is_empty(&self) -> bool {
        self.decomposition.is_empty()
    }

    fn phases(&self, t: T) -> Vec<Complex<T>> {
        self.decomposition
            .eigenvalues
            .iter()
            .map(|&l| {
                let (s, c) = (l * t).sin_cos();
                Complex::new(c, -s)
            })
            .collect()
    }

    /// `e^{−iHt}|ψ⟩`.
    pub fn evolve(&self, state: &SingleExcitationState<T>, t: T) -> SingleExcitationState<T> {
        let n = self.len();
        let phases = self.phases(t);
        let mut out = vec![Complex::new(T::zero(), T::zero()); n];
        for (v, ph) in self.decomposition.eigenvectors.iter().zip(&phases) {
            let c = v
                .iter()
                .zip(&state.amplitudes)
                .fold(Complex::new(T::zero(), T::zero()), |acc, (&vi, &a)| acc + a * vi)
                * *ph;
            for (o, &vi) in out.iter_mut().zip(v) {
                *o = *o + c * vi;
            }
        }
        SingleExcitationState { amplitudes: out }
    }

    /// Block `⟨r|e^{−iHt}|c⟩` for `r ∈ rows`, `c ∈ cols`.
    pub fn block(&self, rows: &Range<usize>, cols: &Range<usize>, t: T) -> Mat<Complex<T>> {
        let phases = self.phases(t);
        let vs = &self.decomposition.eigenvectors;
        Mat::from_fn(rows.len(), cols.len(), |r, c| {
            vs.iter()
                .zip(&phases)
                .fold(Complex::new(T::zero(), T::zero()), |acc, (v, &ph)| {
                    acc + ph * (v[rows.start + r] * v[cols.start + c])
                })
        })
    }
}

/// `e^{−iHt}|ψ⟩` for a chain.
pub fn propagate<T: Real>(
    spec: &ChainSpec<T>,
    state: &SingleExcitationState<T>,
    t: T,
) -> Result<SingleExcitationState<T>> {
    if state.len() != spec.len() {
        return Err(Error::InvalidArgument(format!(
            "state has {} amplitudes for a chain of {} sites",
            state.len(),
            spec.len()
        )));
    }
    Ok(Propagator::new(spec)?.evolve(state, t))
}

/// Optimal transfer between two regions at one time.
#[derive(Clone, Debug)]
pub struct TransferFidelity<T = f64> {
    pub fidelity: T,
    pub sigma: T,
    pub input: SingleExcitationState<T>,
    pub output: SingleExcitationState<T>,
}

impl<T: Real> Propagator<T> {
    /// Largest singular value of the output×input window of `e^{−iHt}`;
    /// the singular vectors are the optimal encoding and decoding.
    pub fn transfer(&self, partition: &RegionPartition, t: T) -> Result<TransferFidelity<T>> {
        let n = self.len();
        partition.validate(n)?;
        let w = self.block(&partition.output, &partition.input, t);
        let dec = svd::<T, Complex<T>>(&w);
        let sigma = dec.s[0].min(T::one());
        let input = dec.v.col(0).to_vec();
        // Left vector from W v / σ, which stays defined when σ is tiny.
        let mut output: Vec<Complex<T>> = (0..w.rows())
            .map(|r| {
                (0..w.cols()).fold(Complex::new(T::zero(), T::zero()), |acc, c| {
                    acc + w.get(r, c) * input[c]
                })
            })
            .collect();
        let on = norm2::<T, Complex<T>>(&output);
        if on > T::zero() {
            output.iter_mut().for_each(|x| *x = *x * (T::one() / on));
        } else {
            output = vec![Complex::new(T::zero(), T::zero()); w.rows()];
            output[0] = Complex::new(T::one(), T::zero());
        }
        Ok(TransferFidelity {
            fidelity: sigma * sigma,
            sigma,
            input: SingleExcitationState::embed(&input, &partition.input, n),
            output: SingleExcitationState::embed(&output, &partition.output, n),
        })
    }
}

pub fn transfer_fidelity<T: Real>(
    spec: &ChainSpec<T>,
    partition: &RegionPartition,
    t: T,
) -> Result<TransferFidelity<T>> {
    Propagator::new(spec)?.transfer(partition, t)
}

/// `⅓ + ⅙(1 + √F)²`, the state-transfer fidelity averaged over inputs.
pub fn average_state_fidelity(f: f64) -> f64 {
    let r = 1.0 + f.max(0.0).sqrt();
    1.0 / 3.0 + r * r / 6.0
}

#[derive(Clone, Debug, Serialize)]
pub struct TransferReport {
    pub times: Vec<f64>,
    pub fidelity: Vec<f64>,
    pub sigma: Vec<f64>,
    pub average_state_fidelity: Vec<f64>,
    #[serde(skip)]
    pub inputs: Vec<SingleExcitationState>,
    #[serde(skip)]
    pub outputs: Vec<SingleExcitationState>,
}

impl TransferReport {
    /// Index and value of the best fidelity on the grid; the earliest wins ties.
    pub fn best(&self) -> Option<(usize, f64)> {
        self.fidelity
            .iter()
            .copied()
            .enumerate()
            .fold(None, |acc, (k, f)| match acc {
                Some((_, g)) if g >= f => acc,
                _ => Some((k, f)),
            })
    }
}

/// Pointwise [`transfer_fidelity`] over a time grid, evaluated in parallel.
pub fn fidelity_sweep(spec: &ChainSpec, partition: &RegionPartition, times: &[f64]) -> Result<TransferReport> {
    let prop = Propagator::new(spec)?;
    partition.validate(prop.len())?;
    let points: Vec<TransferFidelity> = times
        .par_iter()
        .map(|&t| prop.transfer(partition, t))
        .collect::<Result<_>>()?;
    let mut report = TransferReport {
        times: times.to_vec(),
        fidelity: Vec::with_capacity(points.len()),
        sigma: Vec::with_capacity(points.len()),
        average_state_fidelity: Vec::with_capacity(points.len()),
        inputs: Vec::with_capacity(points.len()),
        outputs: Vec::with_capacity(points.len()),
    };
    for p in points {
        report.fidelity.push(p.fidelity);
        report.sigma.push(p.sigma);
        report.average_state_fidelity.push(average_state_fidelity(p.fidelity));
        report.inputs.push(p.input);
        report.outputs.push(p.output);
    }
    Ok(report)
}

/// `count` equally spaced times from `start` to `stop` inclusive.
pub fn time_grid(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => vec![],
        1 => vec![start],
        _ => (0..count)
            .map(|k| start + (stop - start) * k as f64 / (count - 1) as f64)
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{make_pst_chain, pst_transfer_time};
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn two_site_rotation() {
        let spec = ChainSpec::uniform(2, 1.0).unwrap();
        let s = SingleExcitationState::site(0, 2).unwrap();
        let out = propagate(&spec, &s, PI / 2.0).unwrap();
        assert!(out.amplitudes()[0].norm() < 1e-15);
        assert_relative_eq!(out.amplitudes()[1].im, -1.0, epsilon = 1e-15);
    }

    #[test]
    fn zero_time_is_identity() {
        let spec = ChainSpec::new(vec![0.4, 1.1, 0.8], vec![0.2, 0.0, -0.1, 0.3]).unwrap();
        let s = SingleExcitationState::from_real(&[0.3, -0.2, 0.9, 0.1]).unwrap();
        let out = propagate(&spec, &s, 0.0).unwrap();
        for (a, b) in out.amplitudes().iter().zip(s.amplitudes()) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn pst_chain_transfers_end_to_end() {
        let spec = make_pst_chain(8, 0.5).unwrap();
        let t0 = pst_transfer_time(0.5);
        let p = RegionPartition::ends(8, 1, 1).unwrap();
        let f = transfer_fidelity(&spec, &p, t0).unwrap();
        assert_relative_eq!(f.fidelity, 1.0, epsilon = 1e-12);
        let zero = transfer_fidelity(&spec, &p, 0.0).unwrap();
        assert!(zero.fidelity < 1e-28);
    }

    #[test]
    fn sweep_is_ordered_and_consistent() {
        let spec = make_pst_chain(6, 1.0).unwrap();
        let t0 = pst_transfer_time(1.0);
        let p = RegionPartition::ends(6, 1, 1).unwrap();
        let grid = [t0, 3.0 * t0, 0.5 * t0, 5.0 * t0];
        let r = fidelity_sweep(&spec, &p, &grid).unwrap();
        assert_eq!(r.times, grid);
        for (k, &f) in r.fidelity.iter().enumerate() {
            if k == 2 {
                assert!(f < 0.99);
            } else {
                assert_relative_eq!(f, 1.0, epsilon = 1e-12);
            }
            assert_relative_eq!(r.average_state_fidelity[k], average_state_fidelity(f));
        }
        assert_eq!(r.best().unwrap().0, 0);
    }

    #[test]
    fn average_fidelity_endpoints() {
        assert_relative_eq!(average_state_fidelity(1.0), 1.0);
        assert_relative_eq!(average_state_fidelity(0.0), 0.5);
    }

    #[test]
    fn grid() {
        assert_eq!(time_grid(0.0, 1.0, 3), vec![0.0, 0.5, 1.0]);
        assert_eq!(time_grid(2.0, 5.0, 1), vec![2.0]);
        assert!(time_grid(0.0, 1.0, 0).is_empty());
    }
}
