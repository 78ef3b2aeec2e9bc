mod common;

use num_complex::Complex64;
use proptest::prelude::*;

use chainforge::chain::{build_hamiltonian, eigendecompose, make_pst_chain, pst_transfer_time};
use chainforge::extension::{
    positive_targets, pst_target_spectrum, solve_extension, ExtensionProblem, JunctionMode, SolverOptions,
};
use chainforge::transfer::bounds::{
    binomial_pmf, encoding_time_bound, endtoend_error_bound, fmin_bound, fmin_from_indices, wavepacket_stats,
};
use chainforge::transfer::{
    average_state_fidelity, best_creation_state, classify_eigenvalues, creation_modes, encode_excluding,
    fidelity_sweep, null_space_encoding, propagate, time_grid, worst_offenders, ClassifyOptions, CreationRegions,
    Propagator, SingleExcitationState, DEFAULT_NULL_THRESHOLD,
};
use chainforge::{ChainSpec, RegionPartition};

use common::*;

fn chain_strategy(min_n: usize, max_n: usize) -> impl Strategy<Value = ChainSpec> {
    (min_n..=max_n).prop_flat_map(|n| {
        (
            prop::collection::vec(0.2f64..2.0, n - 1),
            prop::collection::vec(-1.0f64..1.0, n),
        )
            .prop_map(|(c, f)| ChainSpec::new(c, f).unwrap())
    })
}

fn state_strategy(n: usize) -> impl Strategy<Value = SingleExcitationState> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n).prop_filter_map("zero state", |v| {
        SingleExcitationState::normalized(v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect())
    })
}

fn designed(central: usize, m: usize, delta: f64) -> ChainSpec {
    let problem = ExtensionProblem {
        central: ChainSpec::uniform(central, 1.0).unwrap(),
        extension_size: m,
        junction: JunctionMode::Unknown,
        targets: positive_targets(&pst_target_spectrum(m, delta)),
        field_free: true,
    };
    solve_extension(&problem, &SolverOptions::default()).unwrap().assembled
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn evolution_is_unitary(
        (spec, psi) in chain_strategy(2, 30).prop_flat_map(|s| { let n = s.len(); (Just(s), state_strategy(n)) }),
        t in 0.0f64..200.0,
    ) {
        let out = propagate(&spec, &psi, t).unwrap();
        prop_assert!((out.norm() - 1.0).abs() < 1e-12);
        let back = propagate(&spec, &out, -t).unwrap();
        prop_assert!((back.overlap(&psi) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn transfer_matches_dense_singular_value(
        spec in chain_strategy(4, 14),
        a in 1usize..4,
        t in 0.0f64..20.0,
    ) {
        let n = spec.len();
        prop_assume!(2 * a <= n);
        let p = RegionPartition::ends(n, a, a).unwrap();
        let r = Propagator::new(&spec).unwrap().transfer(&p, t).unwrap();
        let u = dense_propagator(&dense_jacobi(spec.couplings(), spec.fields()), t);
        let sigma = dense_window_sigma(&u, p.input.clone(), p.output.clone());
        prop_assert!((r.sigma - sigma).abs() < 1e-10);
        prop_assert!((0.0..=1.0).contains(&r.fidelity));
        prop_assert!((r.fidelity - r.sigma * r.sigma).abs() < 1e-14);
        // The returned singular pair realizes σ.
        let achieved = propagate(&spec, &r.input, t).unwrap().amplitudes()[p.output.clone()]
            .iter()
            .zip(&r.output.amplitudes()[p.output.clone()])
            .map(|(x, y)| y.conj() * x)
            .sum::<Complex64>()
            .norm();
        prop_assert!((achieved - r.sigma).abs() < 1e-10);
    }

    #[test]
    fn encodings_never_beat_the_singular_value_optimum(
        half in prop::collection::vec(0.3f64..2.0, 3..10),
        m in 2usize..4,
        t0 in 0.5f64..30.0,
    ) {
        let spec = mirror_chain(&half, &vec![0.0; half.len()]);
        let n = spec.len();
        prop_assume!(2 * m <= n);
        let p = RegionPartition::ends(n, m, m).unwrap();
        let prop = Propagator::new(&spec).unwrap();
        let class = classify_eigenvalues(prop.decomposition(), t0, &ClassifyOptions::default()).unwrap();
        let excluded = worst_offenders(prop.decomposition(), &class, &p.input);
        let enc = encode_excluding(&prop, &p, &excluded, t0, DEFAULT_NULL_THRESHOLD).unwrap();
        let best = prop.transfer(&p, t0).unwrap().fidelity;
        for f in &enc.fidelities {
            prop_assert!(*f <= best + 1e-12);
        }
    }

    #[test]
    fn creation_spectrum_bounds_every_target(
        spec in chain_strategy(8, 16),
        bulk_len in 2usize..4,
        t0 in 0.0f64..15.0,
        raw in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 3),
        k in 1usize..3,
    ) {
        let n = spec.len();
        let bulk = 0..bulk_len;
        let regions = CreationRegions::new(n, bulk.clone(), vec![n / 2..n]).unwrap();
        let modes = creation_modes(&spec, &regions, t0).unwrap();
        let ev = &modes.eigenvalues;
        prop_assert!(ev.iter().all(|&x| (0.0..=1.0).contains(&x)));
        prop_assert!(ev.windows(2).all(|w| w[0] >= w[1]));

        let top = best_creation_state(&spec, &modes.vectors[0], &regions, t0).unwrap();
        prop_assert!((top.fidelity - ev[0]).abs() < 1e-10);
        prop_assert!((top.fidelity - top.quadratic_form).abs() < 1e-12);

        let mut amps = vec![Complex64::new(0.0, 0.0); n];
        for (i, &(a, b)) in raw.iter().take(bulk_len).enumerate() {
            amps[i] = Complex64::new(a, b);
        }
        if let Some(target) = SingleExcitationState::normalized(amps) {
            let f = best_creation_state(&spec, &target, &regions, t0).unwrap().fidelity;
            prop_assert!(f <= ev[0] + 1e-12 && f >= ev[bulk_len - 1] - 1e-12);
        }

        // Mixtures of the top k modes do at least as well as mode k.
        let k = k.min(bulk_len);
        let mut mix = vec![Complex64::new(0.0, 0.0); n];
        for (j, v) in modes.vectors.iter().take(k).enumerate() {
            let c = Complex64::new(raw[j].0, raw[j].1);
            for (m, a) in mix.iter_mut().zip(v.amplitudes()) {
                *m += c * a;
            }
        }
        if let Some(target) = SingleExcitationState::normalized(mix) {
            let f = best_creation_state(&spec, &target, &regions, t0).unwrap().fidelity;
            prop_assert!(f >= ev[k - 1] - 1e-10);
        }
    }
}

#[test]
fn average_state_fidelity_follows_the_singular_value() {
    let spec = example_one();
    let p = RegionPartition::ends(8, 3, 3).unwrap();
    let report = fidelity_sweep(&spec, &p, &time_grid(0.0, 0.2, 41)).unwrap();
    for (f, a) in report.fidelity.iter().zip(&report.average_state_fidelity) {
        assert!((0.0..=1.0).contains(f));
        let direct = 1.0 / 3.0 + (1.0 + f.sqrt()).powi(2) / 6.0;
        assert!((a - direct).abs() < 1e-15);
        assert_eq!(*a, average_state_fidelity(*f));
    }
}

#[test]
fn perfect_encoding_lands_on_the_mirror_sites() {
    let spec = example_one();
    let t0 = std::f64::consts::PI / (4.0 * 185f64.sqrt());
    let p = RegionPartition::ends(8, 3, 3).unwrap();
    let prop = Propagator::new(&spec).unwrap();
    let class = classify_eigenvalues(prop.decomposition(), t0, &ClassifyOptions::default()).unwrap();
    let enc = null_space_encoding(&spec, &p, &class).unwrap();
    let inp = enc.inputs[0].amplitudes();
    let out = propagate(&spec, &enc.inputs[0], t0).unwrap();
    for i in 0..8 {
        assert!((out.amplitudes()[7 - i].norm() - inp[i].norm()).abs() < 1e-12);
    }
}

#[test]
fn designed_chains_respect_the_weight_bound() {
    let delta = std::f64::consts::PI / 94.5;
    for m in [2, 4, 6, 8] {
        let spec = designed(40, m, delta);
        let n = spec.len();
        let t0 = std::f64::consts::PI / delta;
        let d = eigendecompose(&build_hamiltonian(&spec)).unwrap();
        let class = classify_eigenvalues(&d, t0, &ClassifyOptions::default()).unwrap();
        let weights = d.site_weights(0);
        let bound = fmin_bound(&weights, &class);
        let r = Propagator::new(&spec)
            .unwrap()
            .transfer(&RegionPartition::ends(n, 1, 1).unwrap(), t0)
            .unwrap();
        // The worst-case argument bounds the overlap σ, hence F ≥ F_min².
        assert!(r.sigma >= bound - 1e-12, "N={n}: σ={} below bound {bound}", r.sigma);
        assert!(r.fidelity >= bound.max(0.0).powi(2) - 1e-12);
    }
}

#[test]
fn weight_bound_edge_cases() {
    let w = vec![0.25; 4];
    assert_eq!(fmin_from_indices(&w, &[]), 1.0);
    assert_eq!(fmin_from_indices(&w, &[0, 1, 2, 3]), -1.0);
}

#[test]
fn pst_wavepacket_is_binomial() {
    let n = 20;
    let spec = make_pst_chain(n, 1.0).unwrap();
    let t0 = pst_transfer_time(1.0);
    let start = SingleExcitationState::site(0, n).unwrap();
    for k in 0..20 {
        let t = t0 * k as f64 / 19.0;
        let probs = propagate(&spec, &start, t).unwrap().probabilities();
        let stats = wavepacket_stats(n, t, t0);
        for (site, &pr) in probs.iter().enumerate() {
            let expect = binomial_direct(19, site as u64, stats.p);
            assert!((pr - expect).abs() < 1e-10, "t={t} site={site}: {pr} vs {expect}");
        }
        let mean: f64 = probs.iter().enumerate().map(|(s, p)| (s + 1) as f64 * p).sum();
        let var: f64 = probs
            .iter()
            .enumerate()
            .map(|(s, p)| ((s + 1) as f64 - mean).powi(2) * p)
            .sum();
        assert!((stats.mean - mean).abs() < 1e-9);
        assert!((stats.spread - var.sqrt()).abs() < 1e-9);
    }
}

#[test]
fn chernoff_dominates_the_exact_tail() {
    for n in 2..=60usize {
        let bound = encoding_time_bound(n, 0.5).epsilon_bound;
        let cut = (n - 1) as f64 / 3.0;
        let tail: f64 = (0..n as u64)
            .filter(|&k| k as f64 <= cut)
            .map(|k| binomial_direct(n as u64 - 1, k, 0.5))
            .sum();
        assert!(bound >= tail, "N={n}: bound {bound} < tail {tail}");
    }
    assert_eq!(encoding_time_bound(50, 1.0 / 3.0).epsilon_bound, 1.0);
}

#[test]
fn binomial_pmf_matches_direct_products() {
    for n in [1u64, 7, 30, 60] {
        for (k, v) in binomial_pmf(n, 0.3).iter().enumerate() {
            let d = binomial_direct(n, k as u64, 0.3);
            assert!((v - d).abs() <= 1e-13 * d.max(1e-300) + 1e-300);
        }
    }
}

#[test]
fn gaussian_bound_is_below_its_majorant_and_decreasing() {
    let mut prev = endtoend_error_bound(2);
    assert!(prev.integral <= prev.closed_form);
    for n in 3..=1000 {
        let b = endtoend_error_bound(n);
        assert!(b.integral <= b.closed_form, "N={n}");
        assert!(b.integral < prev.integral && b.closed_form < prev.closed_form, "N={n}");
        prev = b;
    }
}

#[test]
fn uniform_forty_never_transfers_perfectly() {
    let spec = ChainSpec::uniform(40, 1.0).unwrap();
    let p = RegionPartition::ends(40, 1, 1).unwrap();
    let report = fidelity_sweep(&spec, &p, &time_grid(0.0, 200.0, 4001)).unwrap();
    let (_, best) = report.best().unwrap();
    assert!(best < 1.0 - 1e-3, "max F {best}");
}
