//! Matrix-free application of the lifted operators `B` and `G = beta*I - B`.
//!
//! With `eta = [vec(X); g]` and `g` standing in for `-gamma/alpha`, the Gram
//! operator `B = [D, alpha*E]* [D, alpha*E]` acts as
//!
//! ```text
//! M            = A*Xt + alpha * diag(g) * Y          (n x N)
//! B eta (top)  = vec(A^H M)                          (N*m entries)
//! B eta (tail) = alpha * rowdot(conj(Y), M)          (n entries)
//! ```
//!
//! so one application costs `O(m*n*N)` arithmetic and never materializes the
//! `(N*m+n)^2` matrix. A dense materialization path exists for small-instance
//! testing only.

use ndarray::{Array2, ShapeBuilder};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::SplitMat;
use crate::model::{Dims, EtaVector, ProblemInstance};
use crate::{ComplexMatrix, Error, Result, C64};

/// Dense materialization refuses to build anything larger than this by default.
pub const DEFAULT_DENSE_CAP: usize = 5000;

/// Fixed seed for the `estimate_beta` starting vector; part of the
/// determinism contract (same instance -> bit-identical estimate).
const BETA_SEED: u64 = 0x42d_0bae5;

/// The lifted calibration operator for one problem instance.
///
/// Immutable after construction; `apply_b` / `apply_g` are pure and safe to
/// call concurrently.
#[derive(Debug, Clone)]
pub struct CalibrationOperator {
    a: Array2<C64>,
    split_a: SplitMat,
    split_a_star: SplitMat,
    y: Array2<C64>,
    alpha: f64,
    beta: f64,
    dims: Dims,
}

impl CalibrationOperator {
    pub fn new(instance: &ProblemInstance, alpha: f64, beta: f64) -> Result<Self> {
        if alpha <= 0.0 || !alpha.is_finite() {
            return Err(Error::InvalidParameter {
                field: "alpha",
                reason: format!("must be positive and finite, got {alpha}"),
            });
        }
        if beta <= 0.0 || !beta.is_finite() {
            return Err(Error::InvalidParameter {
                field: "beta",
                reason: format!("must be positive and finite, got {beta}"),
            });
        }
        let a = instance.a.as_array().clone();
        let a_star = a.t().map(|z| z.conj());
        Ok(Self {
            split_a: SplitMat::from_complex(&a),
            split_a_star: SplitMat::from_complex(&a_star),
            a,
            y: instance.y.as_array().clone(),
            alpha,
            beta,
            dims: instance.dims,
        })
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    fn check_eta(&self, eta: &EtaVector) -> Result<()> {
        if eta.dims() != self.dims {
            return Err(Error::DimensionMismatch {
                field: "eta",
                expected: self.dims.eta_len(),
                got: eta.dims().eta_len(),
            });
        }
        if eta.alpha() != self.alpha {
            return Err(Error::InvalidParameter {
                field: "eta.alpha",
                reason: format!("eta packed with alpha {}, operator has {}", eta.alpha(), self.alpha),
            });
        }
        Ok(())
    }

    /// `B v` on a raw slice of length `N*m + n`.
    pub fn apply_b_slice(&self, v: &[C64]) -> Vec<C64> {
        let Dims { n, m, snapshots } = self.dims;
        debug_assert_eq!(v.len(), self.dims.eta_len());
        // x-part is the column-stacked m x N block.
        let xt = Array2::from_shape_vec((m, snapshots).f(), v[..snapshots * m].to_vec())
            .expect("length checked");
        let g = &v[snapshots * m..];
        // M = A*Xt + alpha * diag(g) * Y
        let mut mid = self.split_a.mul(&xt);
        crate::linalg::count_madds(8 * (n * snapshots) as u64); // diag update + rowdot below
        for k in 0..n {
            let s = self.alpha * g[k];
            for j in 0..snapshots {
                mid[(k, j)] += s * self.y[(k, j)];
            }
        }
        let top = self.split_a_star.mul(&mid); // m x N
        let mut out = Vec::with_capacity(self.dims.eta_len());
        for j in 0..snapshots {
            for l in 0..m {
                out.push(top[(l, j)]);
            }
        }
        for k in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..snapshots {
                acc += self.y[(k, j)].conj() * mid[(k, j)];
            }
            out.push(self.alpha * acc);
        }
        out
    }

    /// `G v = beta*v - B v` on a raw slice.
    pub fn apply_g_slice(&self, v: &[C64]) -> Vec<C64> {
        let mut out = self.apply_b_slice(v);
        for (o, &x) in out.iter_mut().zip(v) {
            *o = self.beta * x - *o;
        }
        out
    }

    /// `B eta`, returned in the same packed shape as `eta`.
    pub fn apply_b(&self, eta: &EtaVector) -> Result<EtaVector> {
        self.check_eta(eta)?;
        EtaVector::from_parts(self.apply_b_slice(eta.data()), self.dims, self.alpha)
    }

    /// `G eta = beta*eta - B eta`.
    pub fn apply_g(&self, eta: &EtaVector) -> Result<EtaVector> {
        self.check_eta(eta)?;
        EtaVector::from_parts(self.apply_g_slice(eta.data()), self.dims, self.alpha)
    }

    /// Materialize `B = [D, alpha*E]* [D, alpha*E]` for small-instance testing.
    pub fn dense_b(&self) -> Result<ComplexMatrix> {
        self.dense_b_capped(DEFAULT_DENSE_CAP)
    }

    pub fn dense_b_capped(&self, cap: usize) -> Result<ComplexMatrix> {
        let size = self.dims.eta_len();
        if size > cap {
            return Err(Error::DenseCapExceeded { size, cap });
        }
        let f = self.dense_lifted();
        let f_star = f.t().map(|z| z.conj());
        ComplexMatrix::from_array(f_star.dot(&f))
    }

    /// The stacked `[D, alpha*E]` matrix (n*N rows), materialized from the
    /// definitions: row `(k-1)*N + j` holds `a_k.` in the `j`-th column block
    /// of `D` and `y_kj` in column `k` of `E`.
    fn dense_lifted(&self) -> Array2<C64> {
        let Dims { n, m, snapshots } = self.dims;
        let mut f = Array2::<C64>::zeros((n * snapshots, snapshots * m + n));
        for k in 0..n {
            for j in 0..snapshots {
                let row = k * snapshots + j;
                for l in 0..m {
                    f[(row, j * m + l)] = self.a[(k, l)];
                }
                f[(row, snapshots * m + k)] = C64::new(self.alpha, 0.0) * self.y[(k, j)];
            }
        }
        f
    }
}

/// Rayleigh-quotient estimate of `||B||` by power iteration on `B`, started
/// from a fixed-seed random unit vector. The estimate never exceeds the true
/// spectral norm, so callers pad it (the solver default multiplies by 1.01).
pub fn estimate_beta(instance: &ProblemInstance, alpha: f64, iters: usize, tol: f64) -> Result<f64> {
    if iters == 0 {
        return Err(Error::InvalidParameter {
            field: "iters",
            reason: "need at least one iteration".into(),
        });
    }
    // beta is irrelevant for apply_b; any positive placeholder works.
    let op = CalibrationOperator::new(instance, alpha, 1.0)?;
    let len = instance.dims.eta_len();
    let mut rng = ChaCha8Rng::seed_from_u64(BETA_SEED);
    let mut v: Vec<C64> = (0..len)
        .map(|_| C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
        .collect();
    normalize_in_place(&mut v)?;
    let mut rayleigh = 0.0;
    for _ in 0..iters {
        let w = op.apply_b_slice(&v);
        let next: f64 = v.iter().zip(&w).map(|(a, b)| (a.conj() * b).re).sum();
        let nw = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if nw == 0.0 {
            return Ok(0.0); // B annihilates the start vector; ||B|| estimate degenerates
        }
        let done = (next - rayleigh).abs() <= tol * next.abs().max(f64::MIN_POSITIVE);
        rayleigh = next;
        v = w;
        for z in &mut v {
            *z /= nw;
        }
        if done {
            break;
        }
    }
    Ok(rayleigh.max(0.0))
}

/// Closed form of the expected signal-part Gram matrix for `alpha = sqrt(n)`:
///
/// ```text
/// [ I_{Nm}                  (1/sqrt(n)) x lambda^T      ]
/// [ (1/sqrt(n)) conj(lambda) x^H    diag(|lambda_k|^2)  ]
/// ```
///
/// valid when `||X||_F = 1`; used as a test oracle for the eigen-gap.
pub fn expected_bs(lambda: &[C64], x: &ComplexMatrix) -> Result<ComplexMatrix> {
    let fro = x.frobenius_norm();
    if (fro - 1.0).abs() > 1e-9 {
        return Err(Error::NonUnitNorm {
            field: "x (Frobenius)",
            norm: fro,
        });
    }
    let n = lambda.len();
    let m = x.rows();
    let snapshots = x.cols();
    let nm = snapshots * m;
    let sqrt_n = (n as f64).sqrt();
    // column-stacked vec(X)
    let mut xv = Vec::with_capacity(nm);
    for j in 0..snapshots {
        for l in 0..m {
            xv.push(x.get(l, j));
        }
    }
    let mut b = Array2::<C64>::zeros((nm + n, nm + n));
    for i in 0..nm {
        b[(i, i)] = C64::new(1.0, 0.0);
    }
    for i in 0..nm {
        for k in 0..n {
            let v = xv[i] * lambda[k] / sqrt_n;
            b[(i, nm + k)] = v;
            b[(nm + k, i)] = v.conj();
        }
    }
    for k in 0..n {
        b[(nm + k, nm + k)] = C64::new(lambda[k].norm_sqr(), 0.0);
    }
    ComplexMatrix::from_array(b)
}

fn normalize_in_place(v: &mut [C64]) -> Result<()> {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if n == 0.0 {
        return Err(Error::Degenerate("zero vector".into()));
    }
    for z in v.iter_mut() {
        *z /= n;
    }
    Ok(())
}
