use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use chainforge::chain::{eigenvalues, fold_symmetric, mirror_symmetric};
use chainforge::extension::{solve_extension, spectral_deviations, SolverOptions};
use chainforge::io::{self, state_to_pairs};
use chainforge::transfer::{
    self, bounds, classify_eigenvalues, encode_excluding, worst_offenders, ClassifyOptions, CreationRegions,
    Propagator, SingleExcitationState, DEFAULT_NULL_THRESHOLD,
};
use chainforge::{ChainSpec, Error, Symmetry};

use crate::args::{BackendArg, Global, PrecisionArg, RangeList, RegionArgs, TimeArgs};
use crate::failure::Failure;
use crate::output::{emit, json, write_atomic};

type Outcome = Result<(), Failure>;

fn read_text(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io(path.to_path_buf(), e))
}

fn load_chain(path: &Path) -> Result<ChainSpec, Failure> {
    io::read_chain(&read_text(path)?).map_err(|e| Failure::Core(Some(path.to_path_buf()), e))
}

fn usage<E: ToString>(e: E) -> Failure {
    Failure::Usage(e.to_string())
}

pub fn extend(
    g: &Global,
    problem: &Path,
    backend: BackendArg,
    precision: PrecisionArg,
    report: Option<&Path>,
) -> Outcome {
    let p = io::read_problem(&read_text(problem)?).map_err(|e| Failure::Core(Some(problem.to_path_buf()), e))?;
    let mut opts = SolverOptions {
        backend: backend.into(),
        precision: precision.into(),
        ..SolverOptions::default()
    };
    if let Some(t) = g.tol {
        opts.spectral_tolerance = t;
    }
    let sol = solve_extension(&p, &opts)?;
    let comment = format!(
        "central {} sites, extension {} per side, junction {}",
        p.central.len(),
        p.extension_size,
        sol.junction
    );
    let report_path: Option<PathBuf> = match (report, &g.out) {
        (Some(r), _) => Some(r.to_path_buf()),
        (None, Some(o)) => Some(o.with_extension("report.json")),
        (None, None) => None,
    };
    let report_bytes = json(&sol.report);
    match &report_path {
        Some(r) => write_atomic(r, &report_bytes)?,
        None => eprint!("{}", String::from_utf8_lossy(&report_bytes)),
    }
    emit(
        g.out.as_deref(),
        io::write_chain(&sol.assembled, Some(&comment)).as_bytes(),
    )
}

pub fn spectrum(g: &Global, chain: &Path) -> Outcome {
    let spec = load_chain(chain)?;
    let d = Propagator::new(&spec)?.decomposition().clone();
    let mut s = String::from("index,eigenvalue,symmetry\n");
    for (k, l) in d.eigenvalues.iter().enumerate() {
        let label = d.symmetry_labels.as_ref().map_or("", |v| v[k].as_str());
        s.push_str(&format!("{k},{},{label}\n", io::fmt_num(*l)));
    }
    emit(g.out.as_deref(), s.as_bytes())
}

pub fn sweep(g: &Global, chain: &Path, regions: &RegionArgs) -> Outcome {
    let grid = g
        .grid
        .as_ref()
        .ok_or_else(|| usage("sweep needs --grid start:stop:count"))?;
    let spec = load_chain(chain)?;
    let partition = regions.resolve(spec.len()).map_err(Failure::Usage)?;
    let times = transfer::time_grid(grid.start, grid.stop, grid.count);
    let report = transfer::fidelity_sweep(&spec, &partition, &times)?;
    emit(g.out.as_deref(), io::sweep_csv(&report).as_bytes())
}

#[derive(Serialize)]
struct Encoding {
    fidelity: f64,
    input: Vec<[f64; 2]>,
    output: Vec<[f64; 2]>,
}

#[derive(Serialize)]
struct EncodeReport {
    t0: f64,
    delta: f64,
    offset: f64,
    phase: f64,
    tolerance: f64,
    violated: Vec<usize>,
    violated_eigenvalues: Vec<f64>,
    selection: &'static str,
    excluded: Vec<usize>,
    null_dimension: usize,
    encodings: Vec<Encoding>,
    optimal_fidelity: f64,
    /// `arg⟨Ψ_out|R|Ψ_in⟩` of the optimal pair, `R` the site reversal.
    optimal_relative_phase: f64,
}

pub fn encode(g: &Global, chain: &Path, regions: &RegionArgs, time: &TimeArgs, offset: Option<f64>) -> Outcome {
    let spec = load_chain(chain)?;
    let n = spec.len();
    let partition = regions.resolve(n).map_err(Failure::Usage)?;
    let t0 = time.resolve().map_err(Failure::Usage)?;
    let prop = Propagator::new(&spec)?;
    let opts = ClassifyOptions {
        tolerance: g.tol.unwrap_or(ClassifyOptions::default().tolerance),
        offset,
    };
    let c = classify_eigenvalues(prop.decomposition(), t0, &opts)?;

    let classified = if c.violated.len() < partition.input.len() {
        match encode_excluding(&prop, &partition, &c.violated, t0, DEFAULT_NULL_THRESHOLD) {
            Ok(e) => Some(e),
            Err(Error::EmptyNullSpace { .. }) => None,
            Err(e) => return Err(e.into()),
        }
    } else {
        None
    };
    let (selection, enc) = match classified {
        Some(e) => ("classified", e),
        None => {
            let worst = worst_offenders(prop.decomposition(), &c, &partition.input);
            (
                "worst-offenders",
                encode_excluding(&prop, &partition, &worst, t0, DEFAULT_NULL_THRESHOLD)?,
            )
        }
    };

    let opt = prop.transfer(&partition, t0)?;
    let overlap = opt
        .output
        .amplitudes()
        .iter()
        .enumerate()
        .fold(Complex64::new(0.0, 0.0), |acc, (i, a)| {
            acc + a.conj() * opt.input.amplitudes()[n - 1 - i]
        });

    let report = EncodeReport {
        t0,
        delta: c.delta,
        offset: c.offset,
        phase: c.phase,
        tolerance: c.tolerance,
        violated_eigenvalues: c
            .violated
            .iter()
            .map(|&k| prop.decomposition().eigenvalues[k])
            .collect(),
        violated: c.violated.clone(),
        selection,
        excluded: enc.excluded.clone(),
        null_dimension: enc.null_dimension,
        encodings: enc
            .inputs
            .iter()
            .zip(&enc.outputs)
            .zip(&enc.fidelities)
            .map(|((i, o), &f)| Encoding {
                fidelity: f,
                input: state_to_pairs(i),
                output: state_to_pairs(o),
            })
            .collect(),
        optimal_fidelity: opt.fidelity,
        optimal_relative_phase: overlap.arg(),
    };
    emit(g.out.as_deref(), &json(&report))
}

pub fn bounds_cmd(g: &Global, ns: &[usize], p: f64) -> Outcome {
    if let Some(&bad) = ns.iter().find(|&&n| n < 2) {
        return Err(usage(format!("chain length {bad} is below 2")));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(usage(format!("p = {p} must lie strictly between 0 and 1")));
    }
    let table: Vec<bounds::BoundTable> = ns.iter().map(|&n| bounds::bound_table(n, p)).collect();
    emit(g.out.as_deref(), &json(&table))
}

#[derive(Serialize)]
struct CreationReport {
    fidelity: f64,
    quadratic_form: f64,
    input: Vec<[f64; 2]>,
}

pub fn create(
    g: &Global,
    chain: &Path,
    bulk: &std::ops::Range<usize>,
    output: &RangeList,
    time: &TimeArgs,
    target: Option<&Path>,
) -> Outcome {
    let spec = load_chain(chain)?;
    let t0 = time.resolve().map_err(Failure::Usage)?;
    let regions = CreationRegions::new(spec.len(), bulk.clone(), output.0.clone())?;
    match target {
        None => {
            let s = transfer::creation_spectrum(&spec, &regions, t0)?;
            emit(g.out.as_deref(), io::spectrum_csv(&s).as_bytes())
        }
        Some(path) => {
            let state = io::read_state(&read_text(path)?).map_err(|e| Failure::Core(Some(path.to_path_buf()), e))?;
            let c = transfer::best_creation_state(&spec, &state, &regions, t0)?;
            let report = CreationReport {
                fidelity: c.fidelity,
                quadratic_form: c.quadratic_form,
                input: state_to_pairs(&c.input),
            };
            emit(g.out.as_deref(), &json(&report))
        }
    }
}

#[derive(Serialize)]
struct Check {
    name: &'static str,
    value: f64,
    limit: f64,
    passed: bool,
}

#[derive(Serialize)]
struct VerifyReport {
    sites: usize,
    mirror_symmetric: bool,
    seed: u64,
    checks: Vec<Check>,
    passed: bool,
}

pub fn verify(g: &Global, chain: &Path, problem: Option<&Path>, samples: usize) -> Outcome {
    let spec = load_chain(chain)?;
    let n = spec.len();
    let prop = Propagator::new(&spec)?;
    let d = prop.decomposition();
    let scale = d.eigenvalues.iter().fold(0.0f64, |a, l| a.max(l.abs())).max(1.0);
    let mut checks = Vec::new();

    let symmetric = mirror_symmetric(&spec);
    if symmetric {
        let (plus, minus) = fold_symmetric(&spec)?;
        let mut union = eigenvalues(&plus)?;
        union.extend(eigenvalues(&minus)?);
        union.sort_by(|a, b| b.total_cmp(a));
        let dev = union
            .iter()
            .zip(&d.eigenvalues)
            .fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
        checks.push(Check {
            name: "fold_union",
            value: dev,
            limit: 1e-10 * scale,
            passed: dev <= 1e-10 * scale,
        });
        let labels = d.symmetry_labels.as_deref().unwrap_or(&[]);
        let alternating = labels.windows(2).all(|w| w[0] != w[1]) && labels.first() == Some(&Symmetry::Symmetric);
        checks.push(Check {
            name: "alternating_labels",
            value: if alternating { 0.0 } else { 1.0 },
            limit: 0.0,
            passed: alternating,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
    let horizon = 4.0 * n as f64 / spec.max_coupling().max(f64::MIN_POSITIVE);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let amps: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let Some(state) = SingleExcitationState::normalized(amps) else {
            continue;
        };
        let t = rng.gen_range(0.0..horizon);
        worst = worst.max((prop.evolve(&state, t).norm() - 1.0).abs());
    }
    checks.push(Check {
        name: "unitarity",
        value: worst,
        limit: 1e-12,
        passed: worst <= 1e-12,
    });

    if let Some(path) = problem {
        let p = io::read_problem(&read_text(path)?).map_err(|e| Failure::Core(Some(path.to_path_buf()), e))?;
        let all = p.all_targets();
        let tscale = all
            .iter()
            .fold(0.0f64, |a, t| a.max(t.value.abs()))
            .max(f64::MIN_POSITIVE);
        let limit = g.tol.unwrap_or(SolverOptions::default().spectral_tolerance) * tscale;
        let dev = spectral_deviations(&spec, &all)?.into_iter().fold(0.0f64, f64::max);
        checks.push(Check {
            name: "target_spectrum",
            value: dev,
            limit,
            passed: dev <= limit,
        });
    }

    let passed = checks.iter().all(|c| c.passed);
    let report = VerifyReport {
        sites: n,
        mirror_symmetric: symmetric,
        seed: g.seed,
        checks,
        passed,
    };
    emit(g.out.as_deref(), &json(&report))?;
    if passed {
        Ok(())
    } else {
        let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
        Err(Failure::Check(failed.join(", ")))
    }
}
