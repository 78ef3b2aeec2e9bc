//! Closed-form error estimates for encoded transfer through an engineered
//! perfect-transfer region.

use serde::Serialize;
use statrs::function::erf::erfc;
use statrs::function::factorial::ln_binomial;

use super::EigenvalueClassification;

/// `1 − 2Σ_{n∈Γ_P̄} w_n`. Can be negative; a negative value carries no
/// information.
///
/// This bounds the transfer amplitude `σ`, so `F = σ² ≥ max(F_min, 0)²`.
pub fn fmin_bound(weights: &[f64], classification: &EigenvalueClassification) -> f64 {
    fmin_from_indices(weights, &classification.violated)
}

pub fn fmin_from_indices(weights: &[f64], violated: &[usize]) -> f64 {
    1.0 - 2.0 * violated.iter().map(|&k| weights[k]).sum::<f64>()
}

/// `C(n, k) p^k (1−p)^{n−k}` for `k = 0..=n`, evaluated in log space.
pub fn binomial_pmf(n: u64, p: f64) -> Vec<f64> {
    (0..=n)
        .map(|k| {
            if p <= 0.0 {
                return if k == 0 { 1.0 } else { 0.0 };
            }
            if p >= 1.0 {
                return if k == n { 1.0 } else { 0.0 };
            }
            (ln_binomial(n, k) + k as f64 * p.ln() + (n - k) as f64 * (-p).ln_1p()).exp()
        })
        .collect()
}

/// Number of eigenvalues cut from each end of the spectrum when the central
/// `2N/3` are kept.
pub fn tail_sites(n: usize) -> usize {
    n / 3
}

/// `F_min` for an `N`-site perfect-transfer spectrum whose outer `⌊N/3⌋`
/// eigenvalues at each end fail, with the end-site weights `C(N−1,k)/2^{N−1}`.
pub fn binomial_fmin(n: usize) -> f64 {
    let w = binomial_pmf(n as u64 - 1, 0.5);
    let tail = tail_sites(n);
    let violated: Vec<usize> = (0..tail).chain(n - tail..n).collect();
    fmin_from_indices(&w, &violated)
}

/// Standard normal CDF.
fn phi(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EndToEndBound {
    /// `(8/√(2π)) ∫_{−∞}^{−√N/6} e^{−2θ²} dθ = 4Φ(−√N/3)`.
    pub integral: f64,
    /// `(12/√(2Nπ)) e^{−N/18}`.
    pub closed_form: f64,
}

/// Gaussian approximation to `1 − F_min` and its elementary majorant.
pub fn endtoend_error_bound(n: usize) -> EndToEndBound {
    let nf = n as f64;
    EndToEndBound {
        integral: 4.0 * phi(-nf.sqrt() / 3.0),
        closed_form: 12.0 / (2.0 * nf * std::f64::consts::PI).sqrt() * (-nf / 18.0).exp(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WavepacketStats {
    pub p: f64,
    pub mean: f64,
    pub spread: f64,
    /// Site occupation, site 1 first.
    pub distribution: Vec<f64>,
}

/// Ballistic wavepacket of `|1⟩` on the `N`-site perfect-transfer chain:
/// sites are binomially occupied with `p = sin²(πt/2t₀)`.
pub fn wavepacket_stats(n: usize, t: f64, t0: f64) -> WavepacketStats {
    let x = std::f64::consts::PI * t / (2.0 * t0);
    let p = x.sin().powi(2);
    let m = n.saturating_sub(1) as f64;
    WavepacketStats {
        p,
        mean: m * p + 1.0,
        spread: m.sqrt() / 2.0 * (2.0 * x).sin().abs(),
        distribution: binomial_pmf(n.saturating_sub(1) as u64, p),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EncodingTimeBound {
    pub exponent: f64,
    /// `e^{−exponent}`, bounding the weight left behind the front third.
    pub epsilon_bound: f64,
    /// `t_in/t₀` where `p(t_in) = ⅓`.
    pub t_in_fraction: f64,
    /// `1 − 2·t_in/t₀`, the encoded transfer time as a fraction of `t₀`.
    pub transfer_fraction: f64,
}

/// Chernoff bound `e^{−(N−1)p(3p−1)²/(21−9p)}` and the resulting transfer
/// time estimate.
pub fn encoding_time_bound(n: usize, p: f64) -> EncodingTimeBound {
    let exponent = n.saturating_sub(1) as f64 * p * (3.0 * p - 1.0).powi(2) / (21.0 - 9.0 * p);
    let t_in_fraction = 2.0 / std::f64::consts::PI * (1.0 / 3f64.sqrt()).asin();
    EncodingTimeBound {
        exponent,
        epsilon_bound: (-exponent).exp(),
        t_in_fraction,
        transfer_fraction: 1.0 - 2.0 * t_in_fraction,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundTable {
    pub n: usize,
    pub endtoend: EndToEndBound,
    pub binomial_fmin: f64,
    pub encoding: EncodingTimeBound,
    pub wavepacket_at_zero: WavepacketStats,
    pub wavepacket_at_half: WavepacketStats,
}

/// Every bound for one chain length; `p` feeds the Chernoff estimate.
pub fn bound_table(n: usize, p: f64) -> BoundTable {
    BoundTable {
        n,
        endtoend: endtoend_error_bound(n),
        binomial_fmin: binomial_fmin(n),
        encoding: encoding_time_bound(n, p),
        wavepacket_at_zero: wavepacket_stats(n, 0.0, 1.0),
        wavepacket_at_half: wavepacket_stats(n, 0.5, 1.0),
    }
}
