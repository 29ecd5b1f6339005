//! Small internal helpers for complex dense products.
//!
//! Complex matmuls are split into three real `f64` products (the 3M scheme:
//! `P1 = Ar Br`, `P2 = Ai Bi`, `P3 = (Ar+Ai)(Br+Bi)`), which routes the bulk
//! of the work through `matrixmultiply`'s SIMD kernels instead of a scalar
//! complex loop. Matrices that are reused across many products (the operator's
//! `A` and `A^H`) are pre-split once.

use std::cell::Cell;

use ndarray::linalg::general_mat_mul;
use ndarray::Array2;

use crate::C64;

thread_local! {
    static REAL_MADDS: Cell<u64> = const { Cell::new(0) };
}

pub(crate) fn count_madds(n: u64) {
    REAL_MADDS.with(|c| c.set(c.get().wrapping_add(n)));
}

/// Running total of real multiply-accumulate operations issued by this
/// thread's dense products. Used to verify cost-scaling claims without
/// depending on wall-clock noise.
pub fn real_madd_count() -> u64 {
    REAL_MADDS.with(|c| c.get())
}

/// A complex matrix pre-split into real parts for repeated products.
#[derive(Debug, Clone)]
pub(crate) struct SplitMat {
    re: Array2<f64>,
    im: Array2<f64>,
    sum: Array2<f64>,
    rows: usize,
    cols: usize,
}

impl SplitMat {
    pub(crate) fn from_complex(a: &Array2<C64>) -> Self {
        let re = a.map(|z| z.re);
        let im = a.map(|z| z.im);
        let sum = &re + &im;
        Self {
            rows: a.nrows(),
            cols: a.ncols(),
            re,
            im,
            sum,
        }
    }

    /// `self * b` for a complex right factor.
    pub(crate) fn mul(&self, b: &Array2<C64>) -> Array2<C64> {
        debug_assert_eq!(self.cols, b.nrows());
        let br = b.map(|z| z.re);
        let bi = b.map(|z| z.im);
        let bsum = &br + &bi;
        let (n, p) = (self.rows, b.ncols());
        count_madds(3 * (n * self.cols * p) as u64);
        let mut p1 = Array2::<f64>::zeros((n, p));
        let mut p2 = Array2::<f64>::zeros((n, p));
        let mut p3 = Array2::<f64>::zeros((n, p));
        general_mat_mul(1.0, &self.re, &br, 0.0, &mut p1);
        general_mat_mul(1.0, &self.im, &bi, 0.0, &mut p2);
        general_mat_mul(1.0, &self.sum, &bsum, 0.0, &mut p3);
        let mut out = Array2::<C64>::zeros((n, p));
        for i in 0..n {
            for j in 0..p {
                out[(i, j)] = C64::new(p1[(i, j)] - p2[(i, j)], p3[(i, j)] - p1[(i, j)] - p2[(i, j)]);
            }
        }
        out
    }
}

/// One-off complex product; splits both factors.
pub(crate) fn cgemm(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    SplitMat::from_complex(a).mul(b)
}
