//! Real spherical-harmonic basis up to degree 2, evaluated at surface normals.
//!
//! Used by the inverse-rendering workflow: the incident-light intensity at a
//! Lambertian surface point lies (approximately) in the span of the first 9
//! real spherical harmonics of its normal, so stacking the basis rows of all
//! pixels gives the `n x 9` measurement matrix `A`.
//!
//! Convention: real SH without the Condon-Shortley sign, ordered
//! `(0,0), (1,-1), (1,0), (1,1), (2,-2), (2,-1), (2,0), (2,1), (2,2)`.
//! Input normals are unit-normalized before evaluation; all-zero rows
//! (masked pixels) produce all-zero basis rows.

use ndarray::Array2;

use crate::{ComplexMatrix, Error, Result, C64};

/// `1 / (2 sqrt(pi))`
const C0: f64 = 0.28209479177387814;
/// `sqrt(3 / (4 pi))`
const C1: f64 = 0.4886025119029199;
/// `(1/2) sqrt(15 / pi)`
const C2: f64 = 1.0925484305920792;
/// `(1/4) sqrt(5 / pi)`
const C2_0: f64 = 0.31539156525252005;
/// `(1/4) sqrt(15 / pi)`
const C2_2: f64 = 0.5462742152960396;

/// Basis row for one normal. A zero vector yields a zero row; anything else
/// is normalized to the unit sphere first.
pub fn sh_basis_row(normal: [f64; 3]) -> [f64; 9] {
    let norm = (normal[0] * normal[0] + normal[1] * normal[1] + normal[2] * normal[2]).sqrt();
    if norm == 0.0 {
        return [0.0; 9];
    }
    let x = normal[0] / norm;
    let y = normal[1] / norm;
    let z = normal[2] / norm;
    [
        C0,
        C1 * y,
        C1 * z,
        C1 * x,
        C2 * x * y,
        C2 * y * z,
        C2_0 * (3.0 * z * z - 1.0),
        C2 * x * z,
        C2_2 * (x * x - y * y),
    ]
}

/// Evaluate the basis at every row of an `n x 3` real matrix of normals
/// (imaginary parts must be zero), producing the `n x 9` matrix `A`.
pub fn sh_basis(normals: &ComplexMatrix) -> Result<ComplexMatrix> {
    if normals.cols() != 3 {
        return Err(Error::DimensionMismatch {
            field: "normals.cols",
            expected: 3,
            got: normals.cols(),
        });
    }
    if normals.as_array().iter().any(|z| z.im != 0.0) {
        return Err(Error::InvalidParameter {
            field: "normals",
            reason: "normals must be real (zero imaginary parts)".into(),
        });
    }
    let n = normals.rows();
    let mut out = Array2::<C64>::zeros((n, 9));
    for k in 0..n {
        let row = sh_basis_row([
            normals.get(k, 0).re,
            normals.get(k, 1).re,
            normals.get(k, 2).re,
        ]);
        for (c, &v) in row.iter().enumerate() {
            out[(k, c)] = C64::new(v, 0.0);
        }
    }
    ComplexMatrix::from_array(out)
}
