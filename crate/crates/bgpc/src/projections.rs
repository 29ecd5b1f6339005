//! Hard sparsity projections on the x-part of the lifted vector.
//!
//! `project_columns` keeps the `s` largest-magnitude entries of one column;
//! `project_rows` keeps the `s` rows of largest l2 norm. The lifted variants
//! truncate only the `vec(X)` block of `eta` and pass the gamma block through
//! untouched. Magnitudes are compared on `|.|^2`; ties break toward the
//! smaller index so results are bit-reproducible.

use serde::{Deserialize, Serialize};

use crate::model::EtaVector;
use crate::{ComplexMatrix, Error, Result, C64};

/// Which sparsity structure the truncation enforces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum SparsityMode {
    /// Each column of `X` keeps its `s` largest-magnitude entries.
    PerColumn { s: usize },
    /// The `s` rows of `X` with largest l2 norms survive (joint sparsity).
    JointRows { s: usize },
    /// Per-column truncation while `t < switch_fraction * max_iters`, then
    /// joint-row truncation for the remaining iterations.
    Hybrid { s: usize, switch_fraction: f64 },
}

impl SparsityMode {
    pub fn s(&self) -> usize {
        match *self {
            SparsityMode::PerColumn { s }
            | SparsityMode::JointRows { s }
            | SparsityMode::Hybrid { s, .. } => s,
        }
    }

    pub fn validate(&self, m: usize) -> Result<()> {
        let s = self.s();
        if s == 0 || s > m {
            return Err(Error::SparsityOutOfRange { s, m });
        }
        if let SparsityMode::Hybrid { switch_fraction, .. } = *self {
            if !(switch_fraction > 0.0 && switch_fraction < 1.0) {
                return Err(Error::InvalidParameter {
                    field: "switch_fraction",
                    reason: format!("must lie in (0,1), got {switch_fraction}"),
                });
            }
        }
        Ok(())
    }
}

/// Indices of the `s` largest scores, ties broken toward the smaller index.
pub(crate) fn top_s_indices(scores: &[f64], s: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&i, &j| {
        scores[j]
            .partial_cmp(&scores[i])
            .expect("scores are finite")
            .then(i.cmp(&j))
    });
    idx.truncate(s);
    idx
}

/// Zero all but the `s` entries of largest magnitude.
pub fn project_columns(x: &[C64], s: usize) -> Result<Vec<C64>> {
    if s == 0 || s > x.len() {
        return Err(Error::SparsityOutOfRange { s, m: x.len() });
    }
    let scores: Vec<f64> = x.iter().map(|z| z.norm_sqr()).collect();
    let keep = top_s_indices(&scores, s);
    let mut out = vec![C64::new(0.0, 0.0); x.len()];
    for i in keep {
        out[i] = x[i];
    }
    Ok(out)
}

/// Zero all but the `s` rows of largest l2 norm.
pub fn project_rows(x: &ComplexMatrix, s: usize) -> Result<ComplexMatrix> {
    let m = x.rows();
    if s == 0 || s > m {
        return Err(Error::SparsityOutOfRange { s, m });
    }
    let scores: Vec<f64> = (0..m)
        .map(|l| (0..x.cols()).map(|j| x.get(l, j).norm_sqr()).sum())
        .collect();
    let keep = top_s_indices(&scores, s);
    let mut out = ndarray::Array2::<C64>::zeros((m, x.cols()));
    for l in keep {
        for j in 0..x.cols() {
            out[(l, j)] = x.get(l, j);
        }
    }
    ComplexMatrix::from_array(out)
}

/// Truncate the x-part of `eta` per `mode`; the gamma block is copied
/// bit-exactly. `iteration_context = (t, max_iters)` drives the hybrid switch.
pub fn project_eta(
    eta: &EtaVector,
    mode: SparsityMode,
    iteration_context: (usize, usize),
) -> Result<EtaVector> {
    let dims = eta.dims();
    mode.validate(dims.m)?;
    let effective = match mode {
        SparsityMode::Hybrid { s, switch_fraction } => {
            let (t, max_iters) = iteration_context;
            if (t as f64) < switch_fraction * (max_iters as f64) {
                SparsityMode::PerColumn { s }
            } else {
                SparsityMode::JointRows { s }
            }
        }
        other => other,
    };
    let mut data = Vec::with_capacity(dims.eta_len());
    match effective {
        SparsityMode::PerColumn { s } => {
            for j in 0..dims.snapshots {
                let col = &eta.x_part()[j * dims.m..(j + 1) * dims.m];
                data.extend(project_columns(col, s)?);
            }
        }
        SparsityMode::JointRows { s } => {
            let m = dims.m;
            let scores: Vec<f64> = (0..m)
                .map(|l| {
                    (0..dims.snapshots)
                        .map(|j| eta.x_part()[j * m + l].norm_sqr())
                        .sum()
                })
                .collect();
            let keep = top_s_indices(&scores, s);
            let mut mask = vec![false; m];
            for l in keep {
                mask[l] = true;
            }
            for j in 0..dims.snapshots {
                for l in 0..m {
                    data.push(if mask[l] {
                        eta.x_part()[j * m + l]
                    } else {
                        C64::new(0.0, 0.0)
                    });
                }
            }
        }
        SparsityMode::Hybrid { .. } => unreachable!("resolved above"),
    }
    data.extend_from_slice(eta.gamma_part());
    EtaVector::from_parts(data, dims, eta.alpha())
}
