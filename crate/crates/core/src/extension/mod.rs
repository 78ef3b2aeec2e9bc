//! Symmetric extensions of a fixed central chain that pin chosen eigenvalues.
//!
//! With the central chain folded into its symmetry sectors `B_σ` and the
//! extension `A` attached through a junction coupling `J`, a target `λ` in
//! sector `σ` is an eigenvalue of the assembled chain exactly when
//!
//! ```text
//! Q_A(λ)·Q_B^σ(λ) = J²·P_A(λ)·P_B^σ(λ)
//! ```
//!
//! where `Q` is a characteristic polynomial and `P` the one with the junction
//! row removed. The targets therefore fix `J²P_A/Q_A` at known points, and
//! the extension follows from that rational function by a continued-fraction
//! expansion.

mod interp;
mod polish;
mod rational;
mod reconstruct;

use serde::{Deserialize, Serialize};

use crate::chain::{
    build_hamiltonian, char_poly_eval_scaled, eigenvalues, fold_symmetric, mirror_symmetric, ChainSpec, JacobiMatrix,
    Symmetry,
};
use crate::dd::DoubleDouble;
use crate::error::{Error, Result};
use crate::scalar::Real;

pub use interp::{
    fieldfree_lift, fieldfree_reduce, interpolate_rational, thiele_interpolate, InterpolationSpec, LinearFit,
};
pub use rational::RationalFunction;
pub use reconstruct::{reconstruct_chain, Reconstruction};

/// An eigenvalue the assembled chain must have, with its mirror sector.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Target {
    pub value: f64,
    pub symmetry: Symmetry,
}

impl Target {
    pub fn new(value: f64, symmetry: Symmetry) -> Self {
        Self { value, symmetry }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", content = "value", rename_all = "lowercase")]
pub enum JunctionMode {
    Known(f64),
    Unknown,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExtensionProblem {
    pub central: ChainSpec,
    /// Sites `M` added on each side.
    pub extension_size: usize,
    pub junction: JunctionMode,
    /// In field-free mode only the positive member of each `±λ` pair is
    /// listed; its partner lies in the opposite sector.
    pub targets: Vec<Target>,
    pub field_free: bool,
}

impl ExtensionProblem {
    /// Number of targets that determine the extension exactly.
    pub fn required_targets(&self) -> usize {
        let m = self.extension_size;
        let per_pair = if self.field_free { m } else { 2 * m };
        match self.junction {
            JunctionMode::Unknown => per_pair,
            JunctionMode::Known(_) => per_pair - 1,
        }
    }

    /// All eigenvalues the assembled chain must carry, partners included.
    pub fn all_targets(&self) -> Vec<Target> {
        let mut out = self.targets.clone();
        if self.field_free {
            out.extend(self.targets.iter().map(|t| Target::new(-t.value, t.symmetry.flipped())));
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        if self.extension_size == 0 {
            return Err(Error::InvalidProblem("extension size must be at least 1".into()));
        }
        if !mirror_symmetric(&self.central) {
            return Err(Error::InvalidProblem("central chain is not mirror symmetric".into()));
        }
        if let JunctionMode::Known(j) = self.junction {
            if !(j.is_finite() && j != 0.0) {
                return Err(Error::InvalidProblem(format!(
                    "junction coupling {j} must be finite and nonzero"
                )));
            }
        }
        if self.targets.iter().any(|t| !t.value.is_finite()) {
            return Err(Error::InvalidProblem("targets must be finite".into()));
        }
        if self.field_free {
            if self.central.fields().iter().any(|&b| b != 0.0) {
                return Err(Error::InvalidProblem(
                    "field-free extension needs a field-free central chain".into(),
                ));
            }
            if self.targets.iter().any(|t| t.value <= 0.0) {
                return Err(Error::InvalidProblem(
                    "field-free targets list only the positive member of each pair".into(),
                ));
            }
        }
        let all = self.all_targets();
        for (i, a) in all.iter().enumerate() {
            if all[..i].iter().any(|b| b.value == a.value && b.symmetry == a.symmetry) {
                return Err(Error::InvalidProblem(format!("target {} listed twice", a.value)));
            }
        }
        let need = self.required_targets();
        if self.targets.len() < need {
            return Err(Error::InvalidProblem(format!(
                "{} targets given, {} needed to fix an extension of {} sites",
                self.targets.len(),
                need,
                self.extension_size
            )));
        }
        Ok(())
    }
}

/// Value of `J²P_A/Q_A` demanded at a node, or a pole (`Q_A(node) = 0`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TargetValue<T> {
    Value(T),
    Pole,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TargetNode<T> {
    pub node: T,
    pub value: TargetValue<T>,
}

/// Relative distance below which a target counts as an eigenvalue of a
/// folded central block or its junction-deleted submatrix.
pub const POLE_TOLERANCE: f64 = 1e-12;

/// Evaluates `f = Q_B^σ/P_B^σ` at every target.
///
/// A target on the spectrum of the junction-deleted block gives a pole; one
/// on both spectra leaves the constraint empty and is rejected. For a
/// one-site central chain the symmetric sector couples through `√2·J`, which
/// is folded into the value.
pub fn target_values<T: Real>(central: &ChainSpec<T>, targets: &[Target]) -> Result<Vec<TargetNode<T>>> {
    let (plus, minus) = fold_symmetric(central)?;
    let sectors = [(Symmetry::Symmetric, plus), (Symmetry::Antisymmetric, minus)].map(|(s, b)| {
        let sub = JacobiMatrix {
            diag: b.diag.get(1..).map(<[T]>::to_vec).unwrap_or_default(),
            offdiag: b.offdiag.get(1..).map(<[T]>::to_vec).unwrap_or_default(),
        };
        let spec_b = eigenvalues(&b);
        let spec_sub = eigenvalues(&sub);
        (s, b, spec_b, spec_sub)
    });
    let single_site = central.len() == 1;

    targets
        .iter()
        .map(|t| {
            let (_, block, spec_b, spec_sub) = sectors
                .iter()
                .find(|(s, ..)| *s == t.symmetry)
                .expect("both sectors present");
            let x = T::lit(t.value);
            let scale = x.abs().max(block.norm_inf()).max(T::one());
            let tol = T::lit(POLE_TOLERANCE) * scale;
            let near = |spec: &Result<Vec<T>>| -> Result<bool> {
                Ok(spec
                    .as_ref()
                    .map_err(Clone::clone)?
                    .iter()
                    .any(|&l| (l - x).abs() <= tol))
            };
            let on_b = near(spec_b)?;
            let on_sub = near(spec_sub)?;
            if on_b && on_sub {
                return Err(Error::IllPosedTarget { value: t.value });
            }
            let value = if on_sub {
                TargetValue::Pole
            } else {
                let cp = char_poly_eval_scaled(block, x);
                let mut f = cp.q / cp.p;
                if single_site && t.symmetry == Symmetry::Symmetric {
                    f = f / T::two();
                }
                TargetValue::Value(f)
            };
            Ok(TargetNode { node: x, value })
        })
        .collect()
}

/// Equally spaced ladder targets: symmetric `δ(M−2k−½)` and antisymmetric
/// `δ(M−2k−3/2)` for `k = 0..M`, symmetric ones first.
pub fn pst_target_spectrum(m: usize, delta: f64) -> Vec<Target> {
    let ladder =
        |offset: f64, s: Symmetry| (0..m).map(move |k| Target::new(delta * (m as f64 - 2.0 * k as f64 - offset), s));
    ladder(0.5, Symmetry::Symmetric)
        .chain(ladder(1.5, Symmetry::Antisymmetric))
        .collect()
}

/// Positive members of a target list, as a field-free problem lists them.
pub fn positive_targets(targets: &[Target]) -> Vec<Target> {
    let mut out: Vec<Target> = targets.iter().filter(|t| t.value > 0.0).copied().collect();
    out.sort_by(|a, b| b.value.total_cmp(&a.value));
    out
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    /// Homogeneous linear system, smallest singular direction.
    #[default]
    Linearized,
    /// Thiele continued fraction; unknown junction only.
    Thiele,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Precision {
    /// Double precision, escalating to double-double when the constraint
    /// matrix is too ill-conditioned.
    #[default]
    Auto,
    Double,
    DoubleDouble,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    pub backend: Backend,
    pub precision: Precision,
    /// Newton refinement of the f64 chain when verification misses.
    pub polish: bool,
    /// Spectral tolerance relative to the largest target.
    pub spectral_tolerance: f64,
    /// Relative residual allowed per constraint in the linear solve.
    pub residual_tolerance: f64,
    /// Condition number above which `Auto` switches to double-double.
    pub condition_limit: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            backend: Backend::Linearized,
            precision: Precision::Auto,
            polish: true,
            spectral_tolerance: 1e-8,
            residual_tolerance: 1e-8,
            condition_limit: 1e12,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetResidual {
    pub value: f64,
    pub symmetry: Symmetry,
    /// `|Q_A Q_B − J²P_A P_B| / ((|Q_A| + J|P_A|)(|Q_B| + J|P_B|))` on the
    /// returned chain.
    pub eq2_residual: f64,
    /// Distance to the nearest eigenvalue of the assembled chain's sector.
    pub spectral_deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub targets: Vec<TargetResidual>,
    pub max_eq2_residual: f64,
    pub max_spectral_deviation: f64,
    pub spectral_tolerance: f64,
    pub condition: f64,
    pub precision: Precision,
    pub backend: Backend,
    pub polished: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExtensionSolution {
    /// `M` sites, junction side first.
    pub extension: ChainSpec,
    pub junction: f64,
    pub assembled: ChainSpec,
    pub report: ResidualReport,
}

/// `reversed(extension) ⊕ J ⊕ central ⊕ J ⊕ extension`.
pub fn assemble(central: &ChainSpec, extension: &ChainSpec, junction: f64) -> Result<ChainSpec> {
    let left = extension.reversed();
    let mut couplings = left.couplings().to_vec();
    couplings.push(junction);
    couplings.extend_from_slice(central.couplings());
    couplings.push(junction);
    couplings.extend_from_slice(extension.couplings());
    let mut fields = left.fields().to_vec();
    fields.extend_from_slice(central.fields());
    fields.extend_from_slice(extension.fields());
    ChainSpec::new(couplings, fields)
}

struct Candidate {
    reconstruction: Reconstruction<f64>,
    condition: f64,
}

fn solve_in<T: Real>(problem: &ExtensionProblem, options: &SolverOptions) -> Result<Candidate> {
    let central = problem.central.map(T::lit);
    let data = target_values(&central, &problem.targets)?;
    let m = problem.extension_size;
    let (function, condition) = match options.backend {
        Backend::Linearized => {
            let spec = InterpolationSpec {
                degree: m,
                odd: problem.field_free,
                leading: match problem.junction {
                    JunctionMode::Known(j) => Some(T::lit(j) * T::lit(j)),
                    JunctionMode::Unknown => None,
                },
                tolerance: T::lit(options.residual_tolerance),
            };
            let fit = interpolate_rational(&data, &spec)?;
            (fit.function(), fit.condition)
        }
        Backend::Thiele => {
            if problem.junction != JunctionMode::Unknown {
                return Err(Error::InvalidProblem(
                    "the continued-fraction backend needs an unknown junction".into(),
                ));
            }
            if problem.targets.len() != problem.required_targets() {
                return Err(Error::InvalidProblem(
                    "the continued-fraction backend needs exactly the required number of targets".into(),
                ));
            }
            let f = if problem.field_free {
                if m % 2 != 0 {
                    return Err(Error::InvalidProblem(
                        "the field-free continued-fraction backend needs an even extension size".into(),
                    ));
                }
                fieldfree_lift(&thiele_interpolate(&fieldfree_reduce(&data)?)?)
            } else {
                thiele_interpolate(&data)?
            };
            (f, f64::NAN)
        }
    };
    let r = reconstruct_chain(&function)?;
    Ok(Candidate {
        reconstruction: Reconstruction {
            fields: r.fields.iter().map(|x| x.to_f64_lossy()).collect(),
            couplings: r.couplings.iter().map(|x| x.to_f64_lossy()).collect(),
            junction: r.junction.to_f64_lossy(),
        },
        condition,
    })
}

fn extension_spec(r: &Reconstruction<f64>, field_free: bool) -> Result<ChainSpec> {
    let fields = if field_free {
        vec![0.0; r.fields.len()]
    } else {
        r.fields.clone()
    };
    ChainSpec::new(r.couplings.clone(), fields)
}

/// Designs the extension, assembles the chain and checks its spectrum.
pub fn solve_extension(problem: &ExtensionProblem, options: &SolverOptions) -> Result<ExtensionSolution> {
    problem.validate()?;
    let (candidate, precision) = match options.precision {
        Precision::Double => (solve_in::<f64>(problem, options)?, Precision::Double),
        Precision::DoubleDouble => (solve_in::<DoubleDouble>(problem, options)?, Precision::DoubleDouble),
        Precision::Auto => match solve_in::<f64>(problem, options) {
            Ok(c) if !(c.condition > options.condition_limit) => (c, Precision::Double),
            Ok(_) | Err(Error::Degenerate { .. }) | Err(Error::Infeasible(_)) | Err(Error::Unattainable { .. }) => {
                (solve_in::<DoubleDouble>(problem, options)?, Precision::DoubleDouble)
            }
            Err(e) => return Err(e),
        },
    };

    let mut extension = extension_spec(&candidate.reconstruction, problem.field_free)?;
    let mut junction = match problem.junction {
        JunctionMode::Known(j) => j.abs(),
        JunctionMode::Unknown => candidate.reconstruction.junction,
    };
    let all = problem.all_targets();
    let scale = all
        .iter()
        .fold(0.0f64, |a, t| a.max(t.value.abs()))
        .max(f64::MIN_POSITIVE);
    let tolerance = options.spectral_tolerance * scale;

    let mut assembled = assemble(&problem.central, &extension, junction)?;
    let mut deviations = spectral_deviations(&assembled, &all)?;
    let mut polished = false;
    if options.polish && max_of(&deviations) > tolerance {
        let refined = polish::newton_polish(problem, &extension, junction, &all, tolerance)?;
        let candidate_chain = assemble(&problem.central, &refined.0, refined.1)?;
        let refined_dev = spectral_deviations(&candidate_chain, &all)?;
        if max_of(&refined_dev) < max_of(&deviations) {
            extension = refined.0;
            junction = refined.1;
            assembled = candidate_chain;
            deviations = refined_dev;
            polished = true;
        }
    }

    let worst = deviations
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, &d)| (i, d));
    if let Some((i, d)) = worst {
        if !(d <= tolerance) {
            return Err(Error::VerificationFailed {
                target: all[i].value,
                deviation: d,
                tolerance,
            });
        }
    }

    let eq2 = eq2_residuals(&problem.central, &extension, junction, &all)?;
    let targets: Vec<TargetResidual> = all
        .iter()
        .zip(&deviations)
        .zip(&eq2)
        .map(|((t, &d), &r)| TargetResidual {
            value: t.value,
            symmetry: t.symmetry,
            eq2_residual: r,
            spectral_deviation: d,
        })
        .collect();
    let report = ResidualReport {
        max_eq2_residual: max_of(&eq2),
        max_spectral_deviation: max_of(&deviations),
        spectral_tolerance: tolerance,
        condition: candidate.condition,
        precision,
        backend: options.backend,
        polished,
        targets,
    };
    Ok(ExtensionSolution {
        extension,
        junction,
        assembled,
        report,
    })
}

fn max_of(v: &[f64]) -> f64 {
    v.iter()
        .fold(0.0f64, |a, &b| if b.is_nan() { f64::NAN } else { a.max(b) })
}

/// Distance from each target to the nearest eigenvalue of its sector.
pub fn spectral_deviations(assembled: &ChainSpec, targets: &[Target]) -> Result<Vec<f64>> {
    let (plus, minus) = fold_symmetric(assembled)?;
    let ev_plus = eigenvalues(&plus)?;
    let ev_minus = eigenvalues(&minus)?;
    Ok(targets
        .iter()
        .map(|t| {
            let ev = match t.symmetry {
                Symmetry::Symmetric => &ev_plus,
                Symmetry::Antisymmetric => &ev_minus,
            };
            ev.iter().fold(f64::INFINITY, |a, &l| a.min((l - t.value).abs()))
        })
        .collect())
}

/// Relative residual of the product form of the eigenvalue condition,
/// evaluated from the chains alone.
pub fn eq2_residuals(
    central: &ChainSpec,
    extension: &ChainSpec,
    junction: f64,
    targets: &[Target],
) -> Result<Vec<f64>> {
    let a = build_hamiltonian(extension);
    let (plus, minus) = fold_symmetric(central)?;
    let single_site = central.len() == 1;
    Ok(targets
        .iter()
        .map(|t| {
            let (b, j2) = match t.symmetry {
                Symmetry::Symmetric => (&plus, junction * junction * if single_site { 2.0 } else { 1.0 }),
                Symmetry::Antisymmetric => (&minus, junction * junction),
            };
            let ca = char_poly_eval_scaled(&a, t.value);
            let cb = char_poly_eval_scaled(b, t.value);
            // Numerator and denominator share the exponent 2^(exp_a + exp_b).
            let lhs = ca.q * cb.q;
            let rhs = j2 * ca.p * cb.p;
            let j = j2.sqrt();
            let denom = (ca.q.abs() + j * ca.p.abs()) * (cb.q.abs() + j * cb.p.abs());
            if denom == 0.0 {
                0.0
            } else {
                (lhs - rhs).abs() / denom
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform(n: usize) -> ChainSpec {
        ChainSpec::uniform(n, 1.0).unwrap()
    }

    #[test]
    fn target_values_of_four_site_block() {
        let t = [
            Target::new(2.0, Symmetry::Symmetric),
            Target::new(1.0, Symmetry::Symmetric),
        ];
        let v = target_values(&uniform(4), &t).unwrap();
        assert_eq!(v[0].value, TargetValue::Value(1.0));
        assert_eq!(v[1].value, TargetValue::Pole);
    }

    #[test]
    fn target_values_of_single_pair() {
        for x in [0.3, 2.0, -1.7] {
            let v = target_values(&uniform(2), &[Target::new(x, Symmetry::Symmetric)]).unwrap();
            match v[0].value {
                TargetValue::Value(f) => assert!((f - (x - 1.0)).abs() < 1e-15),
                TargetValue::Pole => panic!("unexpected pole"),
            }
        }
    }

    #[test]
    fn block_eigenvalue_is_a_zero_value() {
        // The junction-deleted block is empty, so x = 1 is no pole: f = 0.
        let v = target_values(&uniform(2), &[Target::new(1.0, Symmetry::Symmetric)]).unwrap();
        assert_eq!(v[0].value, TargetValue::Value(0.0));
    }

    #[test]
    fn ladder_targets() {
        let t = pst_target_spectrum(2, 1.0);
        let values: Vec<f64> = t.iter().map(|t| t.value).collect();
        assert_eq!(values, vec![1.5, -0.5, 0.5, -1.5]);
        assert_eq!(t[0].symmetry, Symmetry::Symmetric);
        assert_eq!(t[2].symmetry, Symmetry::Antisymmetric);
        let mut union: Vec<f64> = pst_target_spectrum(3, 1.0).iter().map(|t| t.value).collect();
        union.sort_by(f64::total_cmp);
        assert_eq!(union, vec![-2.5, -1.5, -0.5, 0.5, 1.5, 2.5]);
    }

    #[test]
    fn example_pair_extension() {
        let problem = ExtensionProblem {
            central: uniform(4),
            extension_size: 2,
            junction: JunctionMode::Unknown,
            targets: vec![
                Target::new(1.0, Symmetry::Symmetric),
                Target::new(2.0, Symmetry::Symmetric),
            ],
            field_free: true,
        };
        for backend in [Backend::Linearized, Backend::Thiele] {
            let opts = SolverOptions {
                backend,
                ..Default::default()
            };
            let sol = solve_extension(&problem, &opts).unwrap();
            assert!((sol.junction - 1.5f64.sqrt()).abs() < 1e-12, "{backend:?}");
            assert!((sol.extension.couplings()[0] - 1.0).abs() < 1e-12);
            assert_eq!(sol.assembled.len(), 8);
            assert!(sol.report.max_eq2_residual < 1e-12);
        }
    }

    #[test]
    fn known_junction_single_site() {
        let problem = ExtensionProblem {
            central: uniform(2),
            extension_size: 1,
            junction: JunctionMode::Known(2f64.sqrt()),
            targets: vec![Target::new(2.0, Symmetry::Symmetric)],
            field_free: true,
        };
        let sol = solve_extension(&problem, &SolverOptions::default()).unwrap();
        let c = sol.assembled.couplings();
        assert_eq!(c.len(), 3);
        assert!((c[0] - 2f64.sqrt()).abs() < 1e-14 && (c[1] - 1.0).abs() < 1e-14);
        let mut ev = eigenvalues(&build_hamiltonian(&sol.assembled)).unwrap();
        ev.iter_mut().for_each(|x| *x = (*x * 1e12).round() / 1e12);
        assert_eq!(ev, vec![2.0, 1.0, -1.0, -2.0]);
    }

    #[test]
    fn too_few_targets_rejected() {
        let problem = ExtensionProblem {
            central: uniform(4),
            extension_size: 3,
            junction: JunctionMode::Unknown,
            targets: vec![Target::new(1.0, Symmetry::Symmetric)],
            field_free: true,
        };
        assert!(matches!(
            solve_extension(&problem, &SolverOptions::default()),
            Err(Error::InvalidProblem(_))
        ));
    }

    #[test]
    fn general_fields_round_trip() {
        // Build a chain with fields, then ask for its own spectrum back.
        let central = ChainSpec::new(vec![1.0, 0.8, 1.0], vec![0.1, -0.2, -0.2, 0.1]).unwrap();
        let ext = ChainSpec::new(vec![0.7, 1.1], vec![0.3, -0.1, 0.2]).unwrap();
        let chain = assemble(&central, &ext, 0.9).unwrap();
        let (plus, minus) = fold_symmetric(&chain).unwrap();
        let mut targets: Vec<Target> = eigenvalues(&plus)
            .unwrap()
            .into_iter()
            .map(|v| Target::new(v, Symmetry::Symmetric))
            .collect();
        targets.extend(
            eigenvalues(&minus)
                .unwrap()
                .into_iter()
                .map(|v| Target::new(v, Symmetry::Antisymmetric)),
        );
        targets.truncate(6);
        let problem = ExtensionProblem {
            central,
            extension_size: 3,
            junction: JunctionMode::Unknown,
            targets,
            field_free: false,
        };
        let sol = solve_extension(&problem, &SolverOptions::default()).unwrap();
        assert!((sol.junction - 0.9).abs() < 1e-9);
        for (a, b) in sol.extension.fields().iter().zip(ext.fields()) {
            assert!((a - b).abs() < 1e-9);
        }
    }
}
