//! Shared test oracles: explicit dense constructions of the lifted operators
//! and dense eigen/SVD routines, independent of the library's matrix-free
//! implementation paths.

#![allow(dead_code)]

use bgpc::model::{Dims, ProblemInstance};
use bgpc::synth::{gen_instance, EnsembleSpec, Signal};
use bgpc::{ComplexMatrix, C64};
use nalgebra::DMatrix;

/// Materialize `D` from its definition: block row `k` is `I_N (x) a_k.^T`,
/// i.e. row `(k,j)` carries `a_k.` in column block `j`.
pub fn dense_d(a: &ComplexMatrix, snapshots: usize) -> DMatrix<C64> {
    let (n, m) = (a.rows(), a.cols());
    let mut d = DMatrix::<C64>::zeros(n * snapshots, snapshots * m);
    for k in 0..n {
        for j in 0..snapshots {
            for l in 0..m {
                d[(k * snapshots + j, j * m + l)] = a.get(k, l);
            }
        }
    }
    d
}

/// Materialize `E`: block diagonal with the rows of `Y` as N x 1 blocks.
pub fn dense_e(y: &ComplexMatrix) -> DMatrix<C64> {
    let (n, snapshots) = (y.rows(), y.cols());
    let mut e = DMatrix::<C64>::zeros(n * snapshots, n);
    for k in 0..n {
        for j in 0..snapshots {
            e[(k * snapshots + j, k)] = y.get(k, j);
        }
    }
    e
}

/// `B = [D, alpha E]^H [D, alpha E]` built from the dense pieces.
pub fn dense_b_from_parts(instance: &ProblemInstance, alpha: f64) -> DMatrix<C64> {
    let d = dense_d(&instance.a, instance.dims.snapshots);
    let e = dense_e(&instance.y);
    let rows = d.nrows();
    let cols = d.ncols() + e.ncols();
    let mut f = DMatrix::<C64>::zeros(rows, cols);
    f.view_mut((0, 0), (rows, d.ncols())).copy_from(&d);
    let scaled = e.map(|z| z * alpha);
    f.view_mut((0, d.ncols()), (rows, e.ncols())).copy_from(&scaled);
    f.adjoint() * f
}

pub fn to_na(m: &ComplexMatrix) -> DMatrix<C64> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| m.get(i, j))
}

pub fn mat_vec(m: &DMatrix<C64>, v: &[C64]) -> Vec<C64> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)] * v[j]).sum())
        .collect()
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    let eig = m.clone().symmetric_eigen();
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    vals
}

/// Unit eigenvector for the smallest eigenvalue of a Hermitian matrix.
pub fn smallest_eigenvector(m: &DMatrix<C64>) -> Vec<C64> {
    let eig = m.clone().symmetric_eigen();
    let mut best = 0;
    for i in 1..eig.eigenvalues.len() {
        if eig.eigenvalues[i] < eig.eigenvalues[best] {
            best = i;
        }
    }
    eig.eigenvectors.column(best).iter().copied().collect()
}

/// Unit eigenvector for the largest eigenvalue of a Hermitian matrix.
pub fn largest_eigenvector(m: &DMatrix<C64>) -> Vec<C64> {
    let eig = m.clone().symmetric_eigen();
    let mut best = 0;
    for i in 1..eig.eigenvalues.len() {
        if eig.eigenvalues[i] > eig.eigenvalues[best] {
            best = i;
        }
    }
    eig.eigenvectors.column(best).iter().copied().collect()
}

/// Largest singular value of a dense complex matrix.
pub fn spectral_norm(m: &DMatrix<C64>) -> f64 {
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .fold(0.0, |a, &b| a.max(b))
}

pub fn subspace_spec(n: usize, m: usize, snapshots: usize, sigma_w: f64, seed: u64) -> EnsembleSpec {
    EnsembleSpec {
        dims: Dims::new(n, m, snapshots).unwrap(),
        delta: 0.1,
        sigma_w,
        signal: Signal::DenseSubspace,
        seed,
    }
}

pub fn sparse_spec(
    n: usize,
    m: usize,
    snapshots: usize,
    s0: usize,
    sigma_w: f64,
    seed: u64,
) -> EnsembleSpec {
    EnsembleSpec {
        dims: Dims::new(n, m, snapshots).unwrap(),
        delta: 0.1,
        sigma_w,
        signal: Signal::Sparse { s0 },
        seed,
    }
}

pub fn gen(spec: &EnsembleSpec) -> (ProblemInstance, bgpc::model::GroundTruth) {
    gen_instance(spec).unwrap()
}

pub fn overlap(a: &[C64], b: &[C64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.conj() * y)
        .sum::<C64>()
        .norm()
}
