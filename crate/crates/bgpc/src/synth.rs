//! Seeded generators for the synthetic measurement ensembles, plus
//! assumption-level diagnostics.
//!
//! Reproducibility contract: every draw comes from a ChaCha8 stream keyed by
//! `(seed, stream tag)` through a SplitMix64 expansion, and Gaussians use
//! Box-Muller with a fixed draw order (`u1` then `u2`, real part from the
//! cosine branch). The same `EnsembleSpec` therefore produces bit-identical
//! instances on every platform and in any parallel schedule.

use ndarray::Array2;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::model::{Dims, GroundTruth, ProblemInstance};
use crate::{ComplexMatrix, Error, Result, C64};

const TWO_PI: f64 = std::f64::consts::TAU;

/// Signal model for `X`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Signal {
    /// Dense `X` with i.i.d. CN(0, 1/(N*m)) entries (subspace case).
    DenseSubspace,
    /// Each column has a uniformly random `s0`-subset support and
    /// CN(0, 1/(N*s0)) nonzeros.
    Sparse { s0: usize },
    /// One shared `s0`-row support across all columns.
    JointSparse { s0: usize },
    /// Per-column random supports with flat magnitudes: nonzeros are
    /// `+-1/sqrt(N*s0)` with Rademacher signs, so every column has l2 norm
    /// exactly `1/sqrt(N)` and `||X||_F = 1`.
    FlatSparse { s0: usize },
}

impl Signal {
    pub fn s0(&self) -> Option<usize> {
        match *self {
            Signal::DenseSubspace => None,
            Signal::Sparse { s0 } | Signal::JointSparse { s0 } | Signal::FlatSparse { s0 } => {
                Some(s0)
            }
        }
    }
}

/// Full description of one synthetic ensemble draw.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub dims: Dims,
    /// Gain flatness: `|lambda_k|` lies on a circle of radius
    /// `sqrt(1+delta) - 1` around a point of the unit circle.
    pub delta: f64,
    /// Noise scale; entries of `W` are CN(0, sigma_w^2/(N*n)).
    pub sigma_w: f64,
    pub signal: Signal,
    pub seed: u64,
}

impl EnsembleSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidParameter {
                field: "delta",
                reason: format!("must lie in (0,1), got {}", self.delta),
            });
        }
        if !(self.sigma_w >= 0.0 && self.sigma_w.is_finite()) {
            return Err(Error::InvalidParameter {
                field: "sigma_w",
                reason: format!("must be nonnegative, got {}", self.sigma_w),
            });
        }
        if let Some(s0) = self.signal.s0() {
            if s0 == 0 || s0 > self.dims.m {
                return Err(Error::SparsityOutOfRange {
                    s: s0,
                    m: self.dims.m,
                });
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Deterministic RNG streams
// ---------------------------------------------------------------------------

/// Named sub-streams; each gets an independent ChaCha8 generator.
#[derive(Debug, Clone, Copy)]
pub enum StreamTag {
    MatrixA = 1,
    Lambda = 2,
    Signal = 3,
    Support = 4,
    Signs = 5,
    Noise = 6,
    /// Used by the harness to corrupt phase estimates.
    Corrupt = 7,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Collapse several seed components (base seed, cell index, trial index, ...)
/// into one 64-bit seed. Stable across platforms.
pub fn mix_seed(parts: &[u64]) -> u64 {
    let mut state = 0x243f6a8885a308d3; // arbitrary fixed offset
    let mut acc = 0u64;
    for &p in parts {
        state ^= p.wrapping_mul(0x9e3779b97f4a7c15);
        acc = splitmix64(&mut state) ^ acc.rotate_left(17);
    }
    acc
}

/// An independent generator for `(seed, tag)`.
pub fn stream_rng(seed: u64, tag: StreamTag) -> ChaCha8Rng {
    let mut state = seed ^ (tag as u64).wrapping_mul(0xd1b54a32d192ed03);
    let mut key = [0u8; 32];
    for chunk in key.chunks_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

/// Uniform in `[0, 1)` from 53 random bits.
fn unit_f64(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

/// Box-Muller standard normal pair; `u1` is drawn first and shifted into
/// `(0, 1]` so the logarithm is finite.
fn box_muller(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let u1 = 1.0 - unit_f64(rng);
    let u2 = unit_f64(rng);
    let r = (-2.0 * u1.ln()).sqrt();
    let theta = TWO_PI * u2;
    (r * theta.cos(), r * theta.sin())
}

/// One CN(0, sigma_sq) draw: independent real and imaginary parts with
/// variance `sigma_sq / 2` each.
fn complex_gaussian(rng: &mut ChaCha8Rng, sigma_sq: f64) -> C64 {
    let (z0, z1) = box_muller(rng);
    let s = (sigma_sq / 2.0).sqrt();
    C64::new(s * z0, s * z1)
}

/// Uniformly random `s`-subset of `0..m` via partial Fisher-Yates, returned
/// sorted ascending.
fn random_subset(rng: &mut ChaCha8Rng, m: usize, s: usize) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..m).collect();
    for i in 0..s {
        // rejection-free modulo bias is negligible for m << 2^64, but stay exact
        let j = i + (rng.next_u64() % (m - i) as u64) as usize;
        pool.swap(i, j);
    }
    let mut out = pool[..s].to_vec();
    out.sort_unstable();
    out
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

/// Draw one instance and its ground truth. Pure function of `spec`.
pub fn gen_instance(spec: &EnsembleSpec) -> Result<(ProblemInstance, GroundTruth)> {
    spec.validate()?;
    let Dims { n, m, snapshots } = spec.dims;

    // A: i.i.d. CN(0, 1/n), row-major draw order.
    let mut rng = stream_rng(spec.seed, StreamTag::MatrixA);
    let mut a = Array2::<C64>::zeros((n, m));
    for k in 0..n {
        for l in 0..m {
            a[(k, l)] = complex_gaussian(&mut rng, 1.0 / n as f64);
        }
    }

    // lambda_k on a circle of radius sqrt(1+delta)-1 around e^{i phi_k}.
    let mut rng = stream_rng(spec.seed, StreamTag::Lambda);
    let eps = (1.0 + spec.delta).sqrt() - 1.0;
    let mut lambda = Vec::with_capacity(n);
    let mut phases = Vec::with_capacity(n);
    for _ in 0..n {
        let phi = TWO_PI * unit_f64(&mut rng);
        let phi_p = TWO_PI * unit_f64(&mut rng);
        let l = C64::from_polar(1.0, phi) * (C64::new(1.0, 0.0) + C64::from_polar(eps, phi_p));
        lambda.push(l);
        phases.push(phi);
    }

    let x = gen_signal(spec)?;

    // Noise: CN(0, sigma_w^2/(N*n)); sigma_w = 0 keeps W an exact zero matrix.
    let mut w = Array2::<C64>::zeros((n, snapshots));
    if spec.sigma_w > 0.0 {
        let mut rng = stream_rng(spec.seed, StreamTag::Noise);
        let var = spec.sigma_w * spec.sigma_w / (snapshots * n) as f64;
        for k in 0..n {
            for j in 0..snapshots {
                w[(k, j)] = complex_gaussian(&mut rng, var);
            }
        }
    }

    // Y = diag(lambda) A X + W
    let ax = a.dot(x.as_array());
    let mut y = Array2::<C64>::zeros((n, snapshots));
    for k in 0..n {
        for j in 0..snapshots {
            y[(k, j)] = lambda[k] * ax[(k, j)] + w[(k, j)];
        }
    }

    let instance = ProblemInstance::new(
        ComplexMatrix::from_array(a)?,
        ComplexMatrix::from_array(y)?,
    )?;
    let truth = GroundTruth::new(
        lambda,
        x,
        ComplexMatrix::from_array(w)?,
        phases,
        (n as f64).sqrt(),
    )?;
    Ok((instance, truth))
}

fn gen_signal(spec: &EnsembleSpec) -> Result<ComplexMatrix> {
    let Dims { m, snapshots, .. } = spec.dims;
    let mut x = Array2::<C64>::zeros((m, snapshots));
    match spec.signal {
        Signal::DenseSubspace => {
            let mut rng = stream_rng(spec.seed, StreamTag::Signal);
            let var = 1.0 / (snapshots * m) as f64;
            // column-major draw order, matching vec(X)
            for j in 0..snapshots {
                for l in 0..m {
                    x[(l, j)] = complex_gaussian(&mut rng, var);
                }
            }
        }
        Signal::Sparse { s0 } => {
            let mut supp_rng = stream_rng(spec.seed, StreamTag::Support);
            let mut val_rng = stream_rng(spec.seed, StreamTag::Signal);
            let var = 1.0 / (snapshots * s0) as f64;
            for j in 0..snapshots {
                for l in random_subset(&mut supp_rng, m, s0) {
                    x[(l, j)] = complex_gaussian(&mut val_rng, var);
                }
            }
        }
        Signal::JointSparse { s0 } => {
            let mut supp_rng = stream_rng(spec.seed, StreamTag::Support);
            let mut val_rng = stream_rng(spec.seed, StreamTag::Signal);
            let var = 1.0 / (snapshots * s0) as f64;
            let rows = random_subset(&mut supp_rng, m, s0);
            for j in 0..snapshots {
                for &l in &rows {
                    x[(l, j)] = complex_gaussian(&mut val_rng, var);
                }
            }
        }
        Signal::FlatSparse { s0 } => {
            let mut supp_rng = stream_rng(spec.seed, StreamTag::Support);
            let mut sign_rng = stream_rng(spec.seed, StreamTag::Signs);
            let mag = 1.0 / ((snapshots * s0) as f64).sqrt();
            for j in 0..snapshots {
                for l in random_subset(&mut supp_rng, m, s0) {
                    let sign = if sign_rng.next_u64() & 1 == 0 { 1.0 } else { -1.0 };
                    x[(l, j)] = C64::new(sign * mag, 0.0);
                }
            }
        }
    }
    ComplexMatrix::from_array(x)
}

// ---------------------------------------------------------------------------
// Assumption diagnostics
// ---------------------------------------------------------------------------

/// Measured counterparts of the generator assumptions.
#[derive(Debug, Clone, Serialize)]
pub struct AssumptionReport {
    /// `max_k | |lambda_k|^2 - 1 |`.
    pub delta_actual: f64,
    /// `min{ ||N X*X - I_N||, ||m X X* - I_m|| }`.
    pub theta_actual: f64,
    /// Row-support-restricted variant `min{ ||N X*X - I_N||, ||s0 XX*|_T - I|| }`,
    /// reported when `X` has a proper row support.
    pub theta_joint: Option<f64>,
    /// Flatness of the smallest in-support entry: `min_j s_j min_l |x_lj|^2 / ||x_j||^2`
    /// over nonempty columns, with the exact support playing the large-entry set.
    pub omega: f64,
    /// Residual column energy outside that set; zero for exactly sparse `X`.
    pub delta_x: f64,
}

/// Spectral norm of a Hermitian matrix by power iteration on `H^2`.
fn hermitian_spectral_norm(h: &Array2<C64>) -> f64 {
    let n = h.nrows();
    let mut rng = stream_rng(0x5ec7_0001, StreamTag::Signal);
    let mut v: Vec<C64> = (0..n)
        .map(|_| complex_gaussian(&mut rng, 1.0))
        .collect();
    let mut norm_v = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in &mut v {
        *z /= norm_v;
    }
    let mut sigma_sq = 0.0;
    for _ in 0..200 {
        let hv = mat_vec(h, &v);
        let hhv = mat_vec(h, &hv);
        let next: f64 = v.iter().zip(&hhv).map(|(a, b)| (a.conj() * b).re).sum();
        norm_v = hhv.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm_v == 0.0 {
            return 0.0;
        }
        v = hhv;
        for z in &mut v {
            *z /= norm_v;
        }
        if (next - sigma_sq).abs() <= 1e-12 * next.abs().max(1e-300) {
            sigma_sq = next;
            break;
        }
        sigma_sq = next;
    }
    sigma_sq.max(0.0).sqrt()
}

fn mat_vec(h: &Array2<C64>, v: &[C64]) -> Vec<C64> {
    (0..h.nrows())
        .map(|i| (0..h.ncols()).map(|j| h[(i, j)] * v[j]).sum())
        .collect()
}

pub fn assumption_diagnostics(truth: &GroundTruth) -> AssumptionReport {
    let delta_actual = truth
        .lambda
        .iter()
        .map(|l| (l.norm_sqr() - 1.0).abs())
        .fold(0.0, f64::max);

    let x = truth.x.as_array();
    let (m, snaps) = (x.nrows(), x.ncols());
    let x_star = x.t().map(|z| z.conj());

    // N X*X - I_N
    let mut gram_n = x_star.dot(x);
    for i in 0..snaps {
        for j in 0..snaps {
            gram_n[(i, j)] *= snaps as f64;
        }
        gram_n[(i, i)] -= 1.0;
    }
    let norm_n = hermitian_spectral_norm(&gram_n);

    // m X X* - I_m
    let mut gram_m = x.dot(&x_star);
    for i in 0..m {
        for j in 0..m {
            gram_m[(i, j)] *= m as f64;
        }
        gram_m[(i, i)] -= 1.0;
    }
    let norm_m = hermitian_spectral_norm(&gram_m);
    let theta_actual = norm_n.min(norm_m);

    // joint variant on the row support
    let support: Vec<usize> = (0..m)
        .filter(|&l| (0..snaps).any(|j| x[(l, j)].norm_sqr() > 0.0))
        .collect();
    let theta_joint = if !support.is_empty() && support.len() < m {
        let s0 = support.len();
        let mut restricted = Array2::<C64>::zeros((s0, snaps));
        for (i, &l) in support.iter().enumerate() {
            for j in 0..snaps {
                restricted[(i, j)] = x[(l, j)];
            }
        }
        let r_star = restricted.t().map(|z| z.conj());
        let mut gram_s = restricted.dot(&r_star);
        for i in 0..s0 {
            for j in 0..s0 {
                gram_s[(i, j)] *= s0 as f64;
            }
            gram_s[(i, i)] -= 1.0;
        }
        Some(norm_n.min(hermitian_spectral_norm(&gram_s)))
    } else {
        None
    };

    // flatness quantities, with the exact support as the large-entry set
    let mut omega = f64::INFINITY;
    let mut delta_x = 0.0_f64;
    for j in 0..snaps {
        let col: Vec<f64> = (0..m).map(|l| x[(l, j)].norm_sqr()).collect();
        let energy: f64 = col.iter().sum();
        if energy == 0.0 {
            continue;
        }
        let nnz = col.iter().filter(|&&v| v > 0.0).count();
        let min_in = col
            .iter()
            .filter(|&&v| v > 0.0)
            .fold(f64::INFINITY, |a, &b| a.min(b));
        omega = omega.min(nnz as f64 * min_in / energy);
        delta_x = delta_x.max(0.0); // out-of-support energy of an exactly sparse column
    }
    if !omega.is_finite() {
        omega = 0.0;
    }

    AssumptionReport {
        delta_actual,
        theta_actual,
        theta_joint,
        omega,
        delta_x,
    }
}
