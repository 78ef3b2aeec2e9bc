mod common;

use proptest::prelude::*;

use chainforge::chain::{build_hamiltonian, char_polys, eigendecompose, eigenvalues, fold_symmetric, JacobiMatrix};
use chainforge::extension::{
    reconstruct_chain, solve_extension, ExtensionProblem, JunctionMode, RationalFunction, SolverOptions, Target,
};
use chainforge::scalar::Real;
use chainforge::{ChainSpec, DoubleDouble as Dd, Symmetry};
use num_traits::Float;

use common::*;

fn mirror_strategy(max_half: usize) -> impl Strategy<Value = ChainSpec> {
    (1..=max_half, any::<bool>(), any::<bool>()).prop_flat_map(|(h, odd, with_fields)| {
        let nf = if odd { h + 1 } else { h };
        (
            prop::collection::vec(0.1f64..3.0, h),
            prop::collection::vec(-1.5f64..1.5, nf),
        )
            .prop_map(move |(c, f)| {
                let f = if with_fields { f } else { vec![0.0; f.len()] };
                mirror_chain(&c, &f)
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn folded_spectra_reassemble_the_chain(spec in mirror_strategy(30)) {
        let (plus, minus) = fold_symmetric(&spec).unwrap();
        let mut union = eigenvalues(&plus).unwrap();
        let n_plus = union.len();
        union.extend(eigenvalues(&minus).unwrap());
        union.sort_by(|a, b| b.total_cmp(a));
        let full = dense_eigenvalues(&dense_jacobi(spec.couplings(), spec.fields()));
        prop_assert_eq!(n_plus, spec.len().div_ceil(2));
        for (a, b) in union.iter().zip(&full) {
            prop_assert!((a - b).abs() < 1e-10 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn field_free_labels_alternate(spec in mirror_strategy(30).prop_map(|s| ChainSpec::field_free(s.couplings().to_vec()).unwrap())) {
        let d = eigendecompose(&build_hamiltonian(&spec)).unwrap();
        let labels = d.symmetry_labels.unwrap();
        prop_assert_eq!(labels[0], Symmetry::Symmetric);
        for w in labels.windows(2) {
            prop_assert_ne!(w[0], w[1]);
        }
    }

    /// Monomial coefficients in f64 lose up to ~1e-6 in the couplings for
    /// weakly coupled fragments, so the round trip runs in double-double.
    #[test]
    fn reconstruction_inverts_char_polys(
        m in 1usize..=12,
        raw_c in prop::collection::vec(0.1f64..2.0, 11),
        raw_f in prop::collection::vec(-1.0f64..1.0, 12),
        fields in any::<bool>(),
        j2 in 0.2f64..3.0,
    ) {
        let diag: Vec<f64> = if fields { raw_f[..m].to_vec() } else { vec![0.0; m] };
        let off = raw_c[..m - 1].to_vec();
        prop_assert!(round_trip_error(&diag, &off, j2) <= 1e-8);
    }
}

fn round_trip_error(diag: &[f64], off: &[f64], j2: f64) -> f64 {
    let lift = |xs: &[f64]| xs.iter().map(|&x| Dd::lit(x)).collect::<Vec<_>>();
    let jac = JacobiMatrix::new(lift(diag), lift(off)).unwrap();
    let (q, p) = char_polys(&jac);
    let j2 = Dd::lit(j2);
    let f = RationalFunction {
        numerator: p.iter().map(|&c| c * j2).collect(),
        denominator: q,
    };
    let r = reconstruct_chain(&f).unwrap();
    let err = |a: &[Dd], b: &[f64]| {
        a.iter()
            .zip(b)
            .fold(0.0f64, |m, (x, &y)| m.max((x.to_f64_lossy() - y).abs()))
    };
    err(&r.fields, diag)
        .max(err(&r.couplings, off))
        .max((r.junction - j2.sqrt()).to_f64_lossy().abs())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// Hide a random extension inside a chain, hand its eigenvalues to the
    /// solver, and check that the same spectrum comes back.
    #[test]
    fn solver_recovers_hidden_extension(
        m in 1usize..=4,
        central_half in prop::collection::vec(0.5f64..1.5, 3),
        ext in prop::collection::vec(0.5f64..1.5, 4),
        junction in 0.5f64..1.5,
        pick in prop::collection::vec(any::<prop::sample::Index>(), 4),
    ) {
        let central = mirror_chain(&central_half, &[0.0; 3]);
        let mut half: Vec<f64> = ext[..m - 1].iter().rev().copied().collect();
        half.push(junction);
        half.extend_from_slice(&central_half);
        let hidden = mirror_chain(&half, &vec![0.0; half.len()]);
        let d = eigendecompose(&build_hamiltonian(&hidden)).unwrap();
        let labels = d.symmetry_labels.unwrap();
        let positive: Vec<Target> = d
            .eigenvalues
            .iter()
            .zip(&labels)
            .filter(|(l, _)| **l > 1e-9)
            .map(|(&l, &s)| Target::new(l, s))
            .collect();
        let mut chosen: Vec<Target> = Vec::new();
        for ix in &pick {
            let t = positive[ix.index(positive.len())];
            if !chosen.contains(&t) {
                chosen.push(t);
            }
        }
        prop_assume!(chosen.len() >= m);
        chosen.truncate(m);
        let problem = ExtensionProblem {
            central,
            extension_size: m,
            junction: JunctionMode::Unknown,
            targets: chosen.clone(),
            field_free: true,
        };
        let sol = solve_extension(&problem, &SolverOptions::default());
        // Other extensions may share the chosen eigenvalues; any returned
        // chain must carry them.
        if let Ok(sol) = sol {
            let got = dense_eigenvalues(&dense_jacobi(sol.assembled.couplings(), sol.assembled.fields()));
            for t in &chosen {
                let dev = got.iter().fold(f64::INFINITY, |a, &l| a.min((l - t.value).abs()));
                prop_assert!(dev < 1e-8 * (1.0 + t.value.abs()), "target {} missed by {}", t.value, dev);
            }
        }
    }
}
