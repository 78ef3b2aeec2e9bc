//! Independent oracles shared by the integration tests and the acceptance
//! harness. Nothing here calls the crate's own numerical kernels.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use chainforge::ChainSpec;

pub type CMat = DMatrix<Complex64>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn pauli(which: char) -> CMat {
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    match which {
        'I' => CMat::from_row_slice(2, 2, &[o, z, z, o]),
        'X' => CMat::from_row_slice(2, 2, &[z, o, o, z]),
        'Y' => CMat::from_row_slice(2, 2, &[z, -i, i, z]),
        'Z' => CMat::from_row_slice(2, 2, &[o, z, z, -o]),
        _ => unreachable!(),
    }
}

/// Tensor product with `ops[k]` on site `k`, site 0 the most significant factor.
fn product(n: usize, ops: &[(usize, char)]) -> CMat {
    (0..n).fold(CMat::identity(1, 1), |acc, site| {
        let p = ops.iter().find(|(s, _)| *s == site).map_or('I', |(_, w)| *w);
        acc.kronecker(&pauli(p))
    })
}

/// `½ΣB_n Z_n + ½ΣJ_n(X_nX_{n+1} + Y_nY_{n+1})` on the full `2^N` space.
pub fn dense_xx_hamiltonian(couplings: &[f64], fields: &[f64]) -> CMat {
    let n = fields.len();
    let dim = 1usize << n;
    let mut h = CMat::zeros(dim, dim);
    for (k, &b) in fields.iter().enumerate() {
        h += product(n, &[(k, 'Z')]) * c(0.5 * b, 0.0);
    }
    for (k, &j) in couplings.iter().enumerate() {
        let xx = product(n, &[(k, 'X'), (k + 1, 'X')]);
        let yy = product(n, &[(k, 'Y'), (k + 1, 'Y')]);
        h += (xx + yy) * c(0.5 * j, 0.0);
    }
    h
}

/// Basis index of "site `k` excited": every spin in `|1⟩` except site `k`.
/// With `Z|1⟩ = −|1⟩` the excited site then carries energy `+B_k` relative to
/// the reference.
pub fn excitation_index(n: usize, k: usize) -> usize {
    let all = (1usize << n) - 1;
    all & !(1usize << (n - 1 - k))
}

/// `⟨j|H|k⟩` over single-excitation states.
pub fn single_excitation_block(h: &CMat, n: usize) -> CMat {
    CMat::from_fn(n, n, |r, col| h[(excitation_index(n, r), excitation_index(n, col))])
}

/// `e^{−iHt}ψ` by dense Hermitian diagonalization.
pub fn dense_evolve(h: &CMat, psi: &DVector<Complex64>, t: f64) -> DVector<Complex64> {
    let eig = SymmetricEigen::new(h.clone());
    let v = &eig.eigenvectors;
    let coeffs = v.adjoint() * psi;
    let phased = DVector::from_iterator(
        coeffs.len(),
        coeffs
            .iter()
            .zip(eig.eigenvalues.iter())
            .map(|(a, &l)| a * Complex64::from_polar(1.0, -l * t)),
    );
    v * phased
}

/// Real symmetric dense matrix of a chain.
pub fn dense_jacobi(couplings: &[f64], fields: &[f64]) -> DMatrix<f64> {
    let n = fields.len();
    DMatrix::from_fn(n, n, |r, col| {
        if r == col {
            fields[r]
        } else if r + 1 == col {
            couplings[r]
        } else if col + 1 == r {
            couplings[col]
        } else {
            0.0
        }
    })
}

/// Eigenvalues in decreasing order, from nalgebra.
pub fn dense_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// `exp(−iHt)` of a real symmetric matrix, dense.
pub fn dense_propagator(m: &DMatrix<f64>, t: f64) -> CMat {
    let eig = SymmetricEigen::new(m.clone());
    let v = eig.eigenvectors.map(|x| c(x, 0.0));
    let d = CMat::from_diagonal(&DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues.iter().map(|&l| Complex64::from_polar(1.0, -l * t)),
    ));
    &v * d * v.adjoint()
}

/// Largest singular value of `U[out, in]` from nalgebra's SVD.
pub fn dense_window_sigma(u: &CMat, input: std::ops::Range<usize>, output: std::ops::Range<usize>) -> f64 {
    let w = CMat::from_fn(output.len(), input.len(), |r, col| {
        u[(output.start + r, input.start + col)]
    });
    w.singular_values().iter().copied().fold(0.0, f64::max)
}

pub fn example_one() -> ChainSpec {
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

/// Mirror-symmetric chain from its left half. `hc` ends with the coupling
/// into the middle. Equal lengths give an even chain; one extra field is the
/// middle site of an odd chain.
pub fn mirror_chain(hc: &[f64], hf: &[f64]) -> ChainSpec {
    let h = hc.len();
    let mut couplings = hc.to_vec();
    let mut fields = hf.to_vec();
    if hf.len() == h {
        couplings.extend(hc[..h - 1].iter().rev());
        fields.extend(hf.iter().rev());
    } else {
        assert_eq!(hf.len(), h + 1);
        couplings.extend(hc.iter().rev());
        fields.extend(hf[..h].iter().rev());
    }
    ChainSpec::new(couplings, fields).unwrap()
}

/// Binomial probability by exact integer arithmetic in f64 (small n only).
pub fn binomial_direct(n: u64, k: u64, p: f64) -> f64 {
    let mut coeff = 1.0f64;
    for i in 0..k {
        coeff = coeff * (n - i) as f64 / (i + 1) as f64;
    }
    coeff * p.powi(k as i32) * (1.0 - p).powi((n - k) as i32)
}
