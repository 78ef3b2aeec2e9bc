//! File formats: chain and problem JSON, CSV series and state arrays.
//!
//! JSON numbers use the shortest representation that round-trips the `f64`
//! exactly. CSV numbers carry 17 significant digits.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::chain::{ChainSpec, Symmetry};
use crate::error::{Error, Result};
use crate::extension::{positive_targets, pst_target_spectrum, ExtensionProblem, JunctionMode, Target};
use crate::transfer::{SingleExcitationState, TransferReport};

fn parse<'a, D: Deserialize<'a>>(text: &'a str) -> Result<D> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

/// `{"couplings": [...], "fields": [...], "comment": "..."}`. Missing fields
/// mean a field-free chain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainFile {
    pub couplings: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fields: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comment: Option<String>,
}

impl ChainFile {
    pub fn from_spec(spec: &ChainSpec, comment: Option<String>) -> Self {
        Self {
            couplings: spec.couplings().to_vec(),
            fields: Some(spec.fields().to_vec()),
            comment,
        }
    }

    pub fn to_spec(&self) -> Result<ChainSpec> {
        match &self.fields {
            Some(f) => ChainSpec::new(self.couplings.clone(), f.clone()),
            None => ChainSpec::field_free(self.couplings.clone()),
        }
    }
}

pub fn read_chain(text: &str) -> Result<ChainSpec> {
    parse::<ChainFile>(text)?.to_spec()
}

pub fn write_chain(spec: &ChainSpec, comment: Option<&str>) -> String {
    let file = ChainFile::from_spec(spec, comment.map(str::to_owned));
    let mut s = serde_json::to_string_pretty(&file).expect("chain serializes");
    s.push('\n');
    s
}

/// Extension problem as stored on disk. Without `targets` the perfect-transfer
/// ladder for `delta` is used.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub central: ChainFile,
    #[serde(rename = "M")]
    pub m: usize,
    pub junction: JunctionMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub targets: Option<Vec<(f64, Symmetry)>>,
    #[serde(default)]
    pub field_free: bool,
}

impl ProblemFile {
    pub fn to_problem(&self) -> Result<ExtensionProblem> {
        let targets = match (&self.targets, self.delta) {
            (Some(t), _) => t.iter().map(|&(v, s)| Target::new(v, s)).collect(),
            (None, Some(delta)) => {
                if !(delta > 0.0 && delta.is_finite()) {
                    return Err(Error::InvalidProblem(format!("delta must be positive, got {delta}")));
                }
                let ladder = pst_target_spectrum(self.m, delta);
                if self.field_free {
                    positive_targets(&ladder)
                } else {
                    ladder
                }
            }
            (None, None) => {
                return Err(Error::InvalidProblem("give either targets or delta".into()));
            }
        };
        let problem = ExtensionProblem {
            central: self.central.to_spec()?,
            extension_size: self.m,
            junction: self.junction,
            targets,
            field_free: self.field_free,
        };
        problem.validate()?;
        Ok(problem)
    }
}

pub fn read_problem(text: &str) -> Result<ExtensionProblem> {
    parse::<ProblemFile>(text)?.to_problem()
}

/// A state as `[[re, im], ...]`.
pub fn state_to_pairs(state: &SingleExcitationState) -> Vec<[f64; 2]> {
    state.amplitudes().iter().map(|a| [a.re, a.im]).collect()
}

/// Reads `[[re, im], ...]` or a plain real array and normalizes it.
pub fn read_state(text: &str) -> Result<SingleExcitationState> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Amps {
        Complex(Vec<[f64; 2]>),
        Real(Vec<f64>),
    }
    let amps: Vec<num_complex::Complex64> = match parse::<Amps>(text)? {
        Amps::Complex(v) => v
            .into_iter()
            .map(|[re, im]| num_complex::Complex64::new(re, im))
            .collect(),
        Amps::Real(v) => v.into_iter().map(|re| num_complex::Complex64::new(re, 0.0)).collect(),
    };
    SingleExcitationState::normalized(amps).ok_or_else(|| Error::InvalidArgument("state is zero or not finite".into()))
}

/// 17 significant digits.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn sweep_csv(report: &TransferReport) -> String {
    let mut s = String::from("time,F,sigma,avg_state_fidelity\n");
    for k in 0..report.times.len() {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            fmt_num(report.times[k]),
            fmt_num(report.fidelity[k]),
            fmt_num(report.sigma[k]),
            fmt_num(report.average_state_fidelity[k])
        );
    }
    s
}

pub fn spectrum_csv(values: &[f64]) -> String {
    let mut s = String::from("index,eigenvalue\n");
    for (k, v) in values.iter().enumerate() {
        let _ = writeln!(s, "{k},{}", fmt_num(*v));
    }
    s
}
