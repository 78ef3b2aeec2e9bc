mod common;

use nalgebra::DVector;
use num_complex::Complex64;
use proptest::prelude::*;

use chainforge::chain::{build_hamiltonian, char_poly_eval, eigenvalues, JacobiMatrix};
use chainforge::transfer::{propagate, SingleExcitationState};
use chainforge::ChainSpec;

use common::*;

fn chain_strategy(max_n: usize) -> impl Strategy<Value = ChainSpec> {
    (2..=max_n).prop_flat_map(|n| {
        (
            prop::collection::vec(0.2f64..2.0, n - 1),
            prop::collection::vec(-1.0f64..1.0, n),
        )
            .prop_map(|(c, f)| ChainSpec::new(c, f).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn single_excitation_block_matches_full_hamiltonian(spec in chain_strategy(7)) {
        let n = spec.len();
        let h = dense_xx_hamiltonian(spec.couplings(), spec.fields());
        let block = single_excitation_block(&h, n);
        let jac = build_hamiltonian(&spec);
        // The dropped constant is the reference energy −½ΣB.
        let offset = -0.5 * spec.fields().iter().sum::<f64>();
        for r in 0..n {
            for c in 0..n {
                let expect = jac.entry(r, c) + if r == c { offset } else { 0.0 };
                prop_assert!((block[(r, c)] - Complex64::new(expect, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn evolution_matches_full_space(spec in chain_strategy(8), t in 0.0f64..6.0, site in 0usize..8) {
        let n = spec.len();
        let site = site % n;
        let h = dense_xx_hamiltonian(spec.couplings(), spec.fields());
        let mut psi = DVector::<Complex64>::zeros(1 << n);
        psi[excitation_index(n, site)] = Complex64::new(1.0, 0.0);
        let full = dense_evolve(&h, &psi, t);
        let ours = propagate(&spec, &SingleExcitationState::site(site, n).unwrap(), t).unwrap();
        // Global phase from the dropped constant.
        let phase = Complex64::from_polar(1.0, -0.5 * spec.fields().iter().sum::<f64>() * t);
        for k in 0..n {
            let a = full[excitation_index(n, k)] * phase;
            prop_assert!((a - ours.amplitudes()[k]).norm() < 1e-10, "site {} differs: {} vs {}", k, a, ours.amplitudes()[k]);
        }
        let leaked: f64 = full.iter().map(|a| a.norm_sqr()).sum::<f64>()
            - (0..n).map(|k| full[excitation_index(n, k)].norm_sqr()).sum::<f64>();
        prop_assert!(leaked.abs() < 1e-12);
    }

    #[test]
    fn eigenvalues_match_dense_solver(spec in chain_strategy(40)) {
        let ours = eigenvalues(&build_hamiltonian(&spec)).unwrap();
        let dense = dense_eigenvalues(&dense_jacobi(spec.couplings(), spec.fields()));
        let scale = dense.iter().fold(1.0f64, |a, x| a.max(x.abs()));
        for (a, b) in ours.iter().zip(&dense) {
            prop_assert!((a - b).abs() < 1e-12 * scale);
        }
    }

    #[test]
    fn char_poly_matches_determinants(spec in chain_strategy(10), x in -3.0f64..3.0) {
        let m = build_hamiltonian(&spec);
        let (q, p) = char_poly_eval(&m, x);
        let n = spec.len();
        let full = dense_jacobi(spec.couplings(), spec.fields());
        let shifted = nalgebra::DMatrix::<f64>::identity(n, n) * x - &full;
        let q_dense = shifted.determinant();
        let p_dense = shifted.view((1, 1), (n - 1, n - 1)).into_owned().determinant();
        prop_assert!((q - q_dense).abs() < 1e-9 * q_dense.abs().max(1.0));
        prop_assert!((p - p_dense).abs() < 1e-9 * p_dense.abs().max(1.0));
    }

    #[test]
    fn coupling_signs_are_a_gauge(spec in chain_strategy(12), signs in prop::collection::vec(any::<bool>(), 11)) {
        let signed: Vec<f64> = spec
            .couplings()
            .iter()
            .zip(signs.iter().cycle())
            .map(|(&j, &s)| if s { -j } else { j })
            .collect();
        let dense = dense_eigenvalues(&dense_jacobi(&signed, spec.fields()));
        let ours = eigenvalues(&JacobiMatrix::new(spec.fields().to_vec(), spec.couplings().to_vec()).unwrap()).unwrap();
        for (a, b) in ours.iter().zip(&dense) {
            prop_assert!((a - b).abs() < 1e-12 * (1.0 + b.abs()));
        }
    }
}
