//! Competing solvers: constrained least squares (subspace case) and ADMM for
//! l1 / mixed l2,1 minimization (sparsity cases).
//!
//! Least squares minimizes `||diag(gamma) Y - A X||_F` subject to
//! `gamma_1 = 1`. Eliminating `X` through the orthogonal projector onto the
//! complement of `col(A)` reduces the problem to an n-dimensional Hermitian
//! system in `gamma`; `X` is recovered by a triangular solve.
//!
//! The ADMM solvers handle
//!
//! ```text
//! min ||vec(X)||_1   s.t.  diag(gamma) Y = A X,   gamma0^H gamma = n
//! ```
//!
//! (or `||X||_{2,1}` for the joint-sparse variant) by splitting on a
//! duplicated variable: one block is the Euclidean projection onto the affine
//! constraint set, the other the (group) soft-thresholding proximal map. The
//! affine projection solves `(C C^H) y = r` through the block structure
//! `C1 C1^H = (A A^H) (x) I_N + E E^H`, handled with one Cholesky of `A A^H`,
//! a Woodbury correction for the block-diagonal `E E^H`, and a scalar Schur
//! complement for the single `gamma0` constraint row. Each iteration then
//! costs `O(m n N + n^2 N)`.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::linalg::SplitMat;
use crate::model::{Dims, ProblemInstance};
use crate::{ComplexMatrix, Error, Result, C64};

// ---------------------------------------------------------------------------
// Constrained least squares
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct LeastSquaresSolution {
    pub gamma: Vec<C64>,
    pub x: ComplexMatrix,
    /// Set when the reduced system was singular and a minimum-norm
    /// pseudo-inverse solution was returned instead.
    pub rank_deficient: bool,
}

/// Minimize `||diag(gamma) Y - A X||_F` over `(gamma, X)` with `gamma_1 = 1`.
pub fn least_squares(instance: &ProblemInstance) -> Result<LeastSquaresSolution> {
    let Dims { n, m, snapshots } = instance.dims;
    if n <= m {
        return Err(Error::InvalidParameter {
            field: "instance",
            reason: format!("least squares needs a tall A (n > m), got n={n}, m={m}"),
        });
    }
    let a = to_na(instance.a.as_array());
    let y = to_na(instance.y.as_array());

    let qr = a.clone().qr();
    let q = qr.q(); // n x m, orthonormal columns
    let r = qr.r(); // m x m upper triangular

    // Gram of the projected residual map:
    // G = sum_j diag(conj(y_j)) (I - Q Q^H) diag(y_j)
    //   = diag(sum_j |y_kj|^2) - sum_j Z_j Z_j^H,   Z_j = diag(conj(y_j)) Q
    let mut g = DMatrix::<C64>::zeros(n, n);
    for k in 0..n {
        let mut acc = 0.0;
        for j in 0..snapshots {
            acc += y[(k, j)].norm_sqr();
        }
        g[(k, k)] = C64::new(acc, 0.0);
    }
    let mut z = DMatrix::<C64>::zeros(n, m);
    for j in 0..snapshots {
        for k in 0..n {
            let s = y[(k, j)].conj();
            for l in 0..m {
                z[(k, l)] = s * q[(k, l)];
            }
        }
        g -= &z * z.adjoint();
    }

    // gamma_1 = 1: solve G22 gamma_rest = -g21
    let g22 = g.view((1, 1), (n - 1, n - 1)).into_owned();
    let g21 = g.view((1, 0), (n - 1, 1)).into_owned();
    let mut rank_deficient = false;
    let gamma_rest = match Cholesky::new(g22.clone()) {
        Some(chol) => chol.solve(&(-&g21)),
        None => {
            rank_deficient = true;
            pseudo_solve(&g22, &(-g21))?
        }
    };
    let mut gamma = Vec::with_capacity(n);
    gamma.push(C64::new(1.0, 0.0));
    gamma.extend(gamma_rest.iter().copied());

    // X = R^{-1} Q^H diag(gamma) Y
    let mut dy = y.clone();
    for k in 0..n {
        for j in 0..snapshots {
            dy[(k, j)] *= gamma[k];
        }
    }
    let qhdy = q.adjoint() * dy;
    let x = match r.clone().solve_upper_triangular(&qhdy) {
        Some(x) => x,
        None => {
            rank_deficient = true;
            pseudo_solve(&r, &qhdy)?
        }
    };

    Ok(LeastSquaresSolution {
        gamma,
        x: from_na(&x)?,
        rank_deficient,
    })
}

fn pseudo_solve(
    a: &DMatrix<C64>,
    b: &DMatrix<C64>,
) -> Result<DMatrix<C64>> {
    let pinv = a
        .clone()
        .pseudo_inverse(1e-12)
        .map_err(|e| Error::SingularSystem(format!("pseudo-inverse failed: {e}")))?;
    Ok(pinv * b)
}

// ---------------------------------------------------------------------------
// ADMM for l1 / l2,1 minimization
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdmmConfig {
    /// Penalty parameter.
    pub rho: f64,
    pub max_iters: usize,
    /// Relative tolerance on the primal residual `||w - z||`.
    pub eps_primal: f64,
    /// Relative tolerance on the dual residual `rho ||z - z_prev||`.
    pub eps_dual: f64,
}

impl Default for AdmmConfig {
    fn default() -> Self {
        Self {
            rho: 1.0,
            max_iters: 2000,
            eps_primal: 1e-7,
            eps_dual: 1e-7,
        }
    }
}

impl AdmmConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0 && self.eps_primal > 0.0 && self.eps_dual > 0.0) || self.max_iters == 0
        {
            return Err(Error::InvalidParameter {
                field: "admm config",
                reason: "rho, tolerances and max_iters must all be positive".into(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct AdmmSolution {
    pub gamma: Vec<C64>,
    pub x: ComplexMatrix,
    pub iterations: usize,
    pub converged: bool,
}

/// `min ||vec(X)||_1 s.t. diag(gamma) Y = A X, gamma0^H gamma = n`.
pub fn l1_admm(
    instance: &ProblemInstance,
    gamma0: &[C64],
    cfg: &AdmmConfig,
) -> Result<AdmmSolution> {
    admm(instance, gamma0, cfg, Penalty::L1)
}

/// Same program with the mixed norm `||X||_{2,1} = sum_l ||row_l(X)||_2`.
pub fn l21_admm(
    instance: &ProblemInstance,
    gamma0: &[C64],
    cfg: &AdmmConfig,
) -> Result<AdmmSolution> {
    admm(instance, gamma0, cfg, Penalty::L21)
}

enum Penalty {
    L1,
    L21,
}

/// Complex soft threshold, preserving phase.
fn soft_threshold(z: C64, kappa: f64) -> C64 {
    let r = z.norm();
    if r <= kappa {
        C64::new(0.0, 0.0)
    } else {
        z * ((r - kappa) / r)
    }
}

/// Row-group soft threshold: rows with l2 norm below `kappa` vanish.
fn group_soft_threshold_rows(x: &mut Array2<C64>, kappa: f64) {
    for mut row in x.rows_mut() {
        let norm = row.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm <= kappa {
            row.fill(C64::new(0.0, 0.0));
        } else {
            let scale = (norm - kappa) / norm;
            for z in row.iter_mut() {
                *z *= scale;
            }
        }
    }
}

fn admm(
    instance: &ProblemInstance,
    gamma0: &[C64],
    cfg: &AdmmConfig,
    penalty: Penalty,
) -> Result<AdmmSolution> {
    cfg.validate()?;
    let Dims { n, m, snapshots } = instance.dims;
    if gamma0.len() != n {
        return Err(Error::DimensionMismatch {
            field: "gamma0",
            expected: n,
            got: gamma0.len(),
        });
    }
    let g0_norm_sq: f64 = gamma0.iter().map(|z| z.norm_sqr()).sum();
    if g0_norm_sq == 0.0 {
        return Err(Error::InvalidParameter {
            field: "gamma0",
            reason: "initial gamma estimate must be nonzero".into(),
        });
    }

    let projector = AffineProjector::new(instance, gamma0)?;

    // start on the gamma constraint plane with X = 0
    let scale0 = C64::new(n as f64 / g0_norm_sq, 0.0);
    let mut z_x = Array2::<C64>::zeros((m, snapshots));
    let mut z_g: Vec<C64> = gamma0.iter().map(|&g| g * scale0).collect();
    let mut u_x = Array2::<C64>::zeros((m, snapshots));
    let mut u_g = vec![C64::new(0.0, 0.0); n];
    let mut w_x = z_x.clone();
    let mut w_g = z_g.clone();

    let kappa = 1.0 / cfg.rho;
    let mut converged = false;
    let mut iterations = 0;
    for t in 1..=cfg.max_iters {
        iterations = t;
        // w-update: projection onto the affine constraint set
        let vx = &z_x - &u_x;
        let vg: Vec<C64> = z_g.iter().zip(&u_g).map(|(z, u)| z - u).collect();
        let (px, pg) = projector.project(&vx, &vg);
        w_x = px;
        w_g = pg;

        // z-update: proximal map on the x-part, identity on the gamma-part
        let zx_prev = z_x.clone();
        let zg_prev = z_g.clone();
        z_x = &w_x + &u_x;
        match penalty {
            Penalty::L1 => z_x.map_inplace(|z| *z = soft_threshold(*z, kappa)),
            Penalty::L21 => group_soft_threshold_rows(&mut z_x, kappa),
        }
        z_g = w_g.iter().zip(&u_g).map(|(w, u)| w + u).collect();

        // scaled dual update
        u_x = &u_x + &w_x - &z_x;
        for k in 0..n {
            u_g[k] += w_g[k] - z_g[k];
        }

        let primal = (frob_sq(&(&w_x - &z_x))
            + w_g
                .iter()
                .zip(&z_g)
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>())
        .sqrt();
        let dual = cfg.rho
            * (frob_sq(&(&z_x - &zx_prev))
                + z_g
                    .iter()
                    .zip(&zg_prev)
                    .map(|(a, b)| (a - b).norm_sqr())
                    .sum::<f64>())
            .sqrt();
        let scale_p = frob_sq(&w_x)
            .max(frob_sq(&z_x))
            .sqrt()
            .max(1.0);
        if !primal.is_finite() || primal > 1e6 * scale_p {
            return Err(Error::Diverged(format!(
                "ADMM primal residual {primal} at iteration {t}"
            )));
        }
        let scale_d = (cfg.rho * frob_sq(&u_x).sqrt()).max(1.0);
        if primal <= cfg.eps_primal * scale_p && dual <= cfg.eps_dual * scale_d {
            converged = true;
            break;
        }
    }

    Ok(AdmmSolution {
        gamma: w_g,
        x: ComplexMatrix::from_array(w_x)?,
        iterations,
        converged,
    })
}

fn frob_sq(x: &Array2<C64>) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum()
}

/// Euclidean projection onto `{(X, gamma) : A X = diag(gamma) Y, gamma0^H gamma = n}`.
struct AffineProjector {
    split_a: SplitMat,
    split_a_star: SplitMat,
    y: Array2<C64>,
    gamma0: Vec<C64>,
    n_target: f64,
    chol_k: Cholesky<C64, Dyn>,
    chol_s: Cholesky<C64, Dyn>,
    /// `q = -diag(gamma0) Y` in n x N matrix form.
    q: Array2<C64>,
    /// Precomputed `M^{-1} q`.
    m_inv_q: Array2<C64>,
    /// Schur complement of the gamma0 constraint row; real and positive.
    schur: f64,
    dims: Dims,
}

impl AffineProjector {
    fn new(instance: &ProblemInstance, gamma0: &[C64]) -> Result<Self> {
        let dims = instance.dims;
        let Dims { n, snapshots, .. } = dims;
        let a = instance.a.as_array();
        let y = instance.y.as_array().clone();
        let split_a = SplitMat::from_complex(a);
        let a_star = a.t().map(|z| z.conj());
        let split_a_star = SplitMat::from_complex(&a_star);

        // K = A A^H must be positive definite (fat, full-row-rank A)
        let aah = crate::linalg::cgemm(a, &a_star);
        let chol_k = Cholesky::new(to_na(&aah)).ok_or_else(|| {
            Error::SingularSystem(
                "A A^H is not positive definite; the l1/l2,1 solvers need a fat full-row-rank A"
                    .into(),
            )
        })?;

        // S = I_n + (A A^H)^{-1} .* conj(Y Y^H)  (Hadamard), from the Woodbury
        // identity for M = K + E E^H with E gamma = diag(gamma) Y.
        let k_inv = chol_k.inverse();
        let y_star = y.t().map(|z| z.conj());
        let yyh = crate::linalg::cgemm(&y, &y_star);
        let mut s = DMatrix::<C64>::identity(n, n);
        for k in 0..n {
            for k2 in 0..n {
                s[(k, k2)] += k_inv[(k, k2)] * yyh[(k, k2)].conj();
            }
        }
        let chol_s = Cholesky::new(s).ok_or_else(|| {
            Error::SingularSystem("Woodbury capacitance matrix is not positive definite".into())
        })?;

        let mut this = Self {
            split_a,
            split_a_star,
            y,
            gamma0: gamma0.to_vec(),
            n_target: n as f64,
            chol_k,
            chol_s,
            q: Array2::zeros((n, snapshots)),
            m_inv_q: Array2::zeros((n, snapshots)),
            schur: 0.0,
            dims,
        };
        let mut q = Array2::<C64>::zeros((n, snapshots));
        for k in 0..n {
            for j in 0..snapshots {
                q[(k, j)] = -gamma0[k] * this.y[(k, j)];
            }
        }
        let m_inv_q = this.m_solve(&q);
        let qmq: C64 = q
            .iter()
            .zip(m_inv_q.iter())
            .map(|(a, b)| a.conj() * b)
            .sum();
        let g0_norm_sq: f64 = gamma0.iter().map(|z| z.norm_sqr()).sum();
        let schur = g0_norm_sq - qmq.re;
        if schur <= 1e-12 * g0_norm_sq.max(1.0) {
            return Err(Error::SingularSystem(
                "constraint rows are (numerically) linearly dependent".into(),
            ));
        }
        this.q = q;
        this.m_inv_q = m_inv_q;
        this.schur = schur;
        Ok(this)
    }

    /// `(A A^H)^{-1} V` blockwise over snapshots.
    fn k_solve(&self, v: &Array2<C64>) -> Array2<C64> {
        let sol = self.chol_k.solve(&to_na(v));
        from_na_unchecked(&sol)
    }

    /// `(E^H V)_k = sum_j conj(y_kj) v_kj`.
    fn e_star(&self, v: &Array2<C64>) -> Vec<C64> {
        let Dims { n, snapshots, .. } = self.dims;
        (0..n)
            .map(|k| {
                (0..snapshots)
                    .map(|j| self.y[(k, j)].conj() * v[(k, j)])
                    .sum()
            })
            .collect()
    }

    /// `M^{-1} r` with `M = K + E E^H` via Woodbury.
    fn m_solve(&self, r: &Array2<C64>) -> Array2<C64> {
        let Dims { n, snapshots, .. } = self.dims;
        let p = self.k_solve(r);
        let t = self.e_star(&p);
        let s = self.chol_s.solve(&DVector::from_vec(t));
        let mut es = Array2::<C64>::zeros((n, snapshots));
        for k in 0..n {
            for j in 0..snapshots {
                es[(k, j)] = s[k] * self.y[(k, j)];
            }
        }
        &p - &self.k_solve(&es)
    }

    /// Project `(x, gamma)` onto the constraint set.
    fn project(&self, x: &Array2<C64>, gamma: &[C64]) -> (Array2<C64>, Vec<C64>) {
        let Dims { n, snapshots, .. } = self.dims;
        // residual of the affine system at (x, gamma)
        let mut r1 = self.split_a.mul(x);
        for k in 0..n {
            for j in 0..snapshots {
                r1[(k, j)] -= gamma[k] * self.y[(k, j)];
            }
        }
        let r2: C64 = self
            .gamma0
            .iter()
            .zip(gamma)
            .map(|(g0, g)| g0.conj() * g)
            .sum::<C64>()
            - C64::new(self.n_target, 0.0);

        // block solve of (C C^H) [y1; y2] = [r1; r2]
        let m_inv_r1 = self.m_solve(&r1);
        let q_h_minv_r1: C64 = self
            .q
            .iter()
            .zip(m_inv_r1.iter())
            .map(|(a, b)| a.conj() * b)
            .sum();
        let y2 = (r2 - q_h_minv_r1) / self.schur;
        let y1 = &m_inv_r1 - &self.m_inv_q.map(|v| v * y2);

        // v - C^H y
        let aty = self.split_a_star.mul(&y1);
        let out_x = x - &aty;
        let ety = self.e_star(&y1);
        let out_g: Vec<C64> = (0..n)
            .map(|k| gamma[k] + ety[k] - self.gamma0[k] * y2)
            .collect();
        (out_x, out_g)
    }
}

fn to_na(a: &Array2<C64>) -> DMatrix<C64> {
    DMatrix::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)])
}

fn from_na(a: &DMatrix<C64>) -> Result<ComplexMatrix> {
    ComplexMatrix::from_array(from_na_unchecked(a))
}

fn from_na_unchecked(a: &DMatrix<C64>) -> Array2<C64> {
    Array2::from_shape_fn((a.nrows(), a.ncols()), |(i, j)| a[(i, j)])
}
