//! Spectral initialization: support estimation from the row norms of `D^H E`
//! followed by a rank-1 SVD of the support-restricted matrix.
//!
//! Row `(j-1)m + l` of `D^H E` equals `(conj(a_kl) y_kj)_k`, so its squared
//! norm is `sum_k |a_kl|^2 |y_kj|^2` and the whole m x N score table is one
//! real matmul. Per snapshot, the `s1` rows of largest norm are kept; the
//! principal singular triple of the restricted matrix is then computed
//! matrix-free by power iteration on its Gram operator. The right singular
//! vector is paired so that the restricted matrix factors as
//! `sigma * u * v^T`; its entrywise inverse (zeros kept zero) estimates the
//! gains, and `eta0 = normalize([u; -(1./v)/n])`.

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::SplitMat;
use crate::model::{EtaVector, ProblemInstance};
use crate::projections::top_s_indices;
use crate::{Error, Result, C64};

/// Fixed seed for the SVD power-iteration start; rerun-for-rerun bit equality.
const SVD_SEED: u64 = 0x1417_9e37_79b9_7f4a;

const SVD_MAX_ITERS: usize = 500;
const SVD_TOL: f64 = 1e-9;

/// How supports are estimated from the score table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SupportMode {
    /// One support per snapshot (sparsity case).
    PerSnapshot,
    /// One shared support from scores summed over snapshots (joint case).
    JointRows,
}

/// Output of the initialization.
#[derive(Debug, Clone)]
pub struct InitReport {
    /// Unit-norm starting iterate.
    pub eta0: EtaVector,
    /// Estimated supports `T_j`, one sorted index set of size `s1` per snapshot.
    pub supports: Vec<Vec<usize>>,
    /// Principal singular value of the restricted `D^H E`.
    pub singular_value: f64,
}

/// Squared row norms of `D^H E` as an m x N table:
/// entry `(l, j) = sum_k |a_kl|^2 |y_kj|^2`. Cost `O(m*n*N)`.
pub fn dstar_e_row_norms(instance: &ProblemInstance) -> Array2<f64> {
    let a = instance.a.as_array();
    let y = instance.y.as_array();
    let a_abs2_t = Array2::from_shape_fn((a.ncols(), a.nrows()), |(l, k)| a[(k, l)].norm_sqr());
    let y_abs2 = y.map(|z| z.norm_sqr());
    a_abs2_t.dot(&y_abs2)
}

/// Run the initialization with per-snapshot supports.
pub fn initialize(instance: &ProblemInstance, s1: usize, alpha: f64) -> Result<InitReport> {
    initialize_with_mode(instance, s1, alpha, SupportMode::PerSnapshot)
}

pub fn initialize_with_mode(
    instance: &ProblemInstance,
    s1: usize,
    alpha: f64,
    mode: SupportMode,
) -> Result<InitReport> {
    let dims = instance.dims;
    if s1 == 0 || s1 > dims.m {
        return Err(Error::SparsityOutOfRange { s: s1, m: dims.m });
    }
    let scores = dstar_e_row_norms(instance);
    if scores.iter().all(|&v| v == 0.0) {
        return Err(Error::Degenerate(
            "all row norms of D^H E vanish (zero instance)".into(),
        ));
    }

    let supports: Vec<Vec<usize>> = match mode {
        SupportMode::PerSnapshot => (0..dims.snapshots)
            .map(|j| {
                let col: Vec<f64> = (0..dims.m).map(|l| scores[(l, j)]).collect();
                let mut t = top_s_indices(&col, s1);
                t.sort_unstable();
                t
            })
            .collect(),
        SupportMode::JointRows => {
            let summed: Vec<f64> = (0..dims.m)
                .map(|l| (0..dims.snapshots).map(|j| scores[(l, j)]).sum())
                .collect();
            let mut t = top_s_indices(&summed, s1);
            t.sort_unstable();
            vec![t; dims.snapshots]
        }
    };

    // mask[(l, j)] = row (j-1)m+l kept
    let mut mask = Array2::<bool>::from_elem((dims.m, dims.snapshots), false);
    for (j, t) in supports.iter().enumerate() {
        for &l in t {
            mask[(l, j)] = true;
        }
    }

    let a = instance.a.as_array();
    let y = instance.y.as_array();
    let split_a = SplitMat::from_complex(a);
    let split_a_star = SplitMat::from_complex(&a.t().map(|z| z.conj()));

    // M w  = mask .* (A^H diag(w) Y), as an m x N block
    let apply_m = |w: &[C64]| -> Array2<C64> {
        let mut dw_y = Array2::<C64>::zeros((dims.n, dims.snapshots));
        for k in 0..dims.n {
            for j in 0..dims.snapshots {
                dw_y[(k, j)] = w[k] * y[(k, j)];
            }
        }
        let mut u = split_a_star.mul(&dw_y);
        for l in 0..dims.m {
            for j in 0..dims.snapshots {
                if !mask[(l, j)] {
                    u[(l, j)] = C64::new(0.0, 0.0);
                }
            }
        }
        u
    };
    // M^H U = rowdot(conj(Y), A U)
    let apply_m_star = |u: &Array2<C64>| -> Vec<C64> {
        let au = split_a.mul(u);
        (0..dims.n)
            .map(|k| {
                (0..dims.snapshots)
                    .map(|j| y[(k, j)].conj() * au[(k, j)])
                    .sum()
            })
            .collect()
    };

    // Gram power iteration for the principal right singular vector.
    let mut rng = ChaCha8Rng::seed_from_u64(SVD_SEED);
    let mut w: Vec<C64> = (0..dims.n)
        .map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
        .collect();
    normalize(&mut w)?;
    let mut sigma_sq = 0.0;
    for _ in 0..SVD_MAX_ITERS {
        let u = apply_m(&w);
        let g = apply_m_star(&u);
        let next: f64 = u.iter().map(|z| z.norm_sqr()).sum(); // ||Mw||^2 = Rayleigh of M^H M
        let gn = g.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if gn == 0.0 {
            return Err(Error::Degenerate(
                "restricted D^H E annihilates the start vector".into(),
            ));
        }
        w = g;
        for z in &mut w {
            *z /= gn;
        }
        let done = (next - sigma_sq).abs() <= SVD_TOL * next.max(f64::MIN_POSITIVE);
        sigma_sq = next;
        if done {
            break;
        }
    }
    let u = apply_m(&w);
    let sigma = u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if sigma == 0.0 {
        return Err(Error::Degenerate("restricted D^H E is zero".into()));
    }

    // v paired so that the restricted matrix ~= sigma * u * v^T; entrywise
    // inversion of v then estimates the gains up to one global phase.
    let v: Vec<C64> = w.iter().map(|z| z.conj()).collect();
    let v_max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut data = Vec::with_capacity(dims.eta_len());
    for j in 0..dims.snapshots {
        for l in 0..dims.m {
            data.push(u[(l, j)] / sigma);
        }
    }
    let n_f = dims.n as f64;
    for &vk in &v {
        // zeros (and near-zeros) of v are kept zero rather than inverted
        if vk.norm() < 1e-12 * v_max {
            data.push(C64::new(0.0, 0.0));
        } else {
            data.push(-(C64::new(1.0, 0.0) / vk) / n_f);
        }
    }
    let eta0 = EtaVector::from_parts(data, dims, alpha)?.normalized()?;
    Ok(InitReport {
        eta0,
        supports,
        singular_value: sigma,
    })
}

fn normalize(v: &mut [C64]) -> Result<()> {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if n == 0.0 {
        return Err(Error::Degenerate("zero vector".into()));
    }
    for z in v.iter_mut() {
        *z /= n;
    }
    Ok(())
}
