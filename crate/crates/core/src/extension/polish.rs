use crate::chain::{eigendecompose, fold_symmetric, ChainSpec, Symmetry};
use crate::error::Result;
use crate::linalg::{lstsq, Mat};

use super::{assemble, ExtensionProblem, JunctionMode, Target};

const MAX_STEPS: usize = 30;

struct Layout {
    m: usize,
    field_free: bool,
    free_junction: bool,
    single_site: bool,
}

impl Layout {
    fn len(&self) -> usize {
        (self.m - 1) + if self.field_free { 0 } else { self.m } + usize::from(self.free_junction)
    }

    fn pack(&self, ext: &ChainSpec, j: f64) -> Vec<f64> {
        let mut p = ext.couplings().to_vec();
        if !self.field_free {
            p.extend_from_slice(ext.fields());
        }
        if self.free_junction {
            p.push(j);
        }
        p
    }

    fn unpack(&self, p: &[f64], fixed_j: f64) -> Result<(ChainSpec, f64)> {
        let couplings = p[..self.m - 1].to_vec();
        let fields = if self.field_free {
            vec![0.0; self.m]
        } else {
            p[self.m - 1..2 * self.m - 1].to_vec()
        };
        let j = if self.free_junction { p[p.len() - 1] } else { fixed_j };
        Ok((ChainSpec::new(couplings, fields)?, j.abs()))
    }
}

/// Residuals `λ − target` for the nearest eigenvalue of each target's
/// sector, and their gradients from first-order perturbation theory
/// (`∂λ/∂H_ij = v_i v_j` for a unit eigenvector).
fn residuals(chain: &ChainSpec, targets: &[Target], layout: &Layout) -> Result<(Vec<f64>, Mat<f64>)> {
    let (plus, minus) = fold_symmetric(chain)?;
    let dec_plus = eigendecompose(&plus)?;
    let dec_minus = eigendecompose(&minus)?;
    let m = layout.m;
    let mut r = Vec::with_capacity(targets.len());
    let mut jac = Mat::from_fn(targets.len(), layout.len(), |_, _| 0.0);
    for (row, t) in targets.iter().enumerate() {
        let dec = match t.symmetry {
            Symmetry::Symmetric => &dec_plus,
            Symmetry::Antisymmetric => &dec_minus,
        };
        let k = (0..dec.len())
            .min_by(|&a, &b| {
                (dec.eigenvalues[a] - t.value)
                    .abs()
                    .total_cmp(&(dec.eigenvalues[b] - t.value).abs())
            })
            .expect("nonempty sector");
        r.push(dec.eigenvalues[k] - t.value);
        let v = &dec.eigenvectors[k];
        // Block site i holds extension site m−1−i.
        for c in 0..m - 1 {
            jac.set(row, c, 2.0 * v[m - 2 - c] * v[m - 1 - c]);
        }
        if !layout.field_free {
            for c in 0..m {
                jac.set(row, m - 1 + c, v[m - 1 - c] * v[m - 1 - c]);
            }
        }
        if layout.free_junction {
            let factor = if layout.single_site && t.symmetry == Symmetry::Symmetric {
                2f64.sqrt()
            } else {
                1.0
            };
            let col = layout.len() - 1;
            let w = if v.len() > m { v[m] } else { 0.0 };
            jac.set(row, col, 2.0 * factor * v[m - 1] * w);
        }
    }
    Ok((r, jac))
}

fn max_abs(r: &[f64]) -> f64 {
    r.iter().fold(0.0f64, |a, &b| a.max(b.abs()))
}

/// Gauss–Newton refinement of the extension against the full target list.
pub(super) fn newton_polish(
    problem: &ExtensionProblem,
    extension: &ChainSpec,
    junction: f64,
    targets: &[Target],
    tolerance: f64,
) -> Result<(ChainSpec, f64)> {
    let layout = Layout {
        m: problem.extension_size,
        field_free: problem.field_free,
        free_junction: problem.junction == JunctionMode::Unknown,
        single_site: problem.central.len() == 1,
    };
    let fixed_j = match problem.junction {
        JunctionMode::Known(j) => j.abs(),
        JunctionMode::Unknown => junction,
    };
    if layout.len() == 0 {
        return Ok((extension.clone(), junction));
    }
    let mut params = layout.pack(extension, junction);
    let (mut ext, mut j) = (extension.clone(), junction);
    let (mut r, mut jac) = residuals(&assemble(&problem.central, &ext, j)?, targets, &layout)?;
    for _ in 0..MAX_STEPS {
        let err = max_abs(&r);
        if err <= 0.1 * tolerance {
            break;
        }
        let step = lstsq(&jac, &r, 1e-12);
        let mut improved = false;
        let mut scale = 1.0;
        for _ in 0..6 {
            let trial: Vec<f64> = params.iter().zip(&step).map(|(p, d)| p - scale * d).collect();
            let Ok((trial_ext, trial_j)) = layout.unpack(&trial, fixed_j) else {
                scale *= 0.5;
                continue;
            };
            let chain = assemble(&problem.central, &trial_ext, trial_j)?;
            let (tr, tj) = residuals(&chain, targets, &layout)?;
            if max_abs(&tr) < err {
                params = trial;
                ext = trial_ext;
                j = trial_j;
                r = tr;
                jac = tj;
                improved = true;
                break;
            }
            scale *= 0.5;
        }
        if !improved {
            break;
        }
    }
    Ok((ext, j))
}
