//! Problem containers and the lifted unknown vector `eta`.
//!
//! The bilinear measurement `Y = diag(lambda) A X + W` is linearized in
//! `(gamma, X)` with `gamma = 1 ./ lambda`. All solvers work on the stacked
//! vector `eta = [vec(X); -gamma/alpha]` of length `N*m + n`, where `vec`
//! stacks the columns of `X`.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::{ComplexMatrix, Error, Result, C64};

/// Problem dimensions: `n` sensors, signal dimension `m`, `snapshots` columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dims {
    /// Number of sensors (rows of `A` and `Y`).
    pub n: usize,
    /// Signal dimension / dictionary size (columns of `A`, rows of `X`).
    pub m: usize,
    /// Number of snapshots (columns of `X` and `Y`).
    pub snapshots: usize,
}

impl Dims {
    pub fn new(n: usize, m: usize, snapshots: usize) -> Result<Self> {
        if n == 0 || m == 0 || snapshots == 0 {
            return Err(Error::InvalidParameter {
                field: "dims",
                reason: "n, m and snapshots must all be at least 1".into(),
            });
        }
        Ok(Self { n, m, snapshots })
    }

    /// Length of the lifted vector: `N*m + n`.
    pub fn eta_len(&self) -> usize {
        self.snapshots * self.m + self.n
    }
}

/// Observed data `(A, Y)`; the input to every solver.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    pub a: ComplexMatrix,
    pub y: ComplexMatrix,
    pub dims: Dims,
}

impl ProblemInstance {
    pub fn new(a: ComplexMatrix, y: ComplexMatrix) -> Result<Self> {
        if a.rows() != y.rows() {
            return Err(Error::DimensionMismatch {
                field: "y.rows",
                expected: a.rows(),
                got: y.rows(),
            });
        }
        let dims = Dims::new(a.rows(), a.cols(), y.cols())?;
        Ok(Self { a, y, dims })
    }
}

/// The lifted unknown `eta = [vec(X); -gamma/alpha]` with packing metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct EtaVector {
    data: Vec<C64>,
    dims: Dims,
    alpha: f64,
}

impl EtaVector {
    /// Wrap raw data, checking the length against `dims`.
    pub fn from_parts(data: Vec<C64>, dims: Dims, alpha: f64) -> Result<Self> {
        if alpha <= 0.0 || !alpha.is_finite() {
            return Err(Error::InvalidParameter {
                field: "alpha",
                reason: format!("must be a positive finite real, got {alpha}"),
            });
        }
        if data.len() != dims.eta_len() {
            return Err(Error::DimensionMismatch {
                field: "eta.data",
                expected: dims.eta_len(),
                got: data.len(),
            });
        }
        Ok(Self { data, dims, alpha })
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// The `vec(X)` block (first `N*m` entries).
    pub fn x_part(&self) -> &[C64] {
        &self.data[..self.dims.snapshots * self.dims.m]
    }

    /// The `-gamma/alpha` block (trailing `n` entries).
    pub fn gamma_part(&self) -> &[C64] {
        &self.data[self.dims.snapshots * self.dims.m..]
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Scale to unit l2 norm. Errors on the zero vector.
    pub fn normalized(mut self) -> Result<Self> {
        let norm = self.norm();
        if norm == 0.0 {
            return Err(Error::Degenerate("cannot normalize the zero vector".into()));
        }
        for z in &mut self.data {
            *z /= norm;
        }
        Ok(self)
    }
}

/// Pack `X` (m x N) and `gamma` (length n) into `eta = [vec(X); -gamma/alpha]`.
///
/// `vec(X)` is the column concatenation `[x_1; x_2; ...; x_N]`. The result is
/// not normalized.
pub fn pack_eta(x: &ComplexMatrix, gamma: &[C64], alpha: f64) -> Result<EtaVector> {
    let dims = Dims::new(gamma.len(), x.rows(), x.cols())?;
    let mut data = Vec::with_capacity(dims.eta_len());
    for j in 0..dims.snapshots {
        for l in 0..dims.m {
            data.push(x.get(l, j));
        }
    }
    for &g in gamma {
        data.push(-g / alpha);
    }
    EtaVector::from_parts(data, dims, alpha)
}

/// Invert [`pack_eta`]: recover `(X, gamma)` from `eta`.
///
/// `X` is reshaped column-major from the first `N*m` entries and
/// `gamma = -alpha * (trailing n entries)`; the round trip is bit-exact.
pub fn unpack_eta(eta: &EtaVector) -> (ComplexMatrix, Vec<C64>) {
    let dims = eta.dims();
    let mut x = Array2::<C64>::zeros((dims.m, dims.snapshots));
    for j in 0..dims.snapshots {
        for l in 0..dims.m {
            x[(l, j)] = eta.data[j * dims.m + l];
        }
    }
    let gamma = eta
        .gamma_part()
        .iter()
        .map(|&t| -t * eta.alpha)
        .collect();
    (
        ComplexMatrix::from_array(x).expect("entries come from a finite eta"),
        gamma,
    )
}

/// Synthetic ground truth: the generating `(lambda, X, W)` plus the
/// normalized target vector `eta_dot` used for RSNR scoring.
#[derive(Debug, Clone)]
pub struct GroundTruth {
    /// Per-sensor complex gains.
    pub lambda: Vec<C64>,
    /// Entrywise inverse of `lambda`.
    pub gamma: Vec<C64>,
    /// True signal matrix (m x N).
    pub x: ComplexMatrix,
    /// Noise realization (n x N).
    pub w: ComplexMatrix,
    /// Unit-norm lifted target `normalize([vec(X); -gamma/alpha])`.
    pub eta_dot: EtaVector,
    /// Generator phases `phi_k` of `lambda_k` (available as side information
    /// in the phase-informed initialization experiments).
    pub phases: Vec<f64>,
}

impl GroundTruth {
    /// Build from `(lambda, X, W, phases)`, deriving `gamma` and `eta_dot`.
    pub fn new(
        lambda: Vec<C64>,
        x: ComplexMatrix,
        w: ComplexMatrix,
        phases: Vec<f64>,
        alpha: f64,
    ) -> Result<Self> {
        if lambda.iter().any(|l| l.norm_sqr() == 0.0) {
            return Err(Error::InvalidParameter {
                field: "lambda",
                reason: "gains must be nonzero".into(),
            });
        }
        if w.rows() != lambda.len() || w.cols() != x.cols() {
            return Err(Error::DimensionMismatch {
                field: "w",
                expected: lambda.len() * x.cols(),
                got: w.rows() * w.cols(),
            });
        }
        let gamma: Vec<C64> = lambda.iter().map(|&l| C64::new(1.0, 0.0) / l).collect();
        let eta_dot = pack_eta(&x, &gamma, alpha)?.normalized()?;
        Ok(Self {
            lambda,
            gamma,
            x,
            w,
            eta_dot,
            phases,
        })
    }
}
