//! Dense linear algebra behind the transforms: Kronecker products,
//! deterministic eigendecompositions and principal fractional powers.
//!
//! Decompositions are delegated to `faer`; this module owns the conventions
//! layered on top (ordering, sign/phase fixing, diagonalizability checks,
//! branch choice) that make every downstream spectrum reproducible.

mod eigen;
mod power;

pub use eigen::{eig_general, eig_general_real, eig_sym, GeneralEigenBasis, SymmetricEigenBasis};
pub use power::{
    fractional_basis, matrix_power, matrix_power_real, principal_power, FractionalBasis,
    MatrixPower,
};

use faer::{c64, Mat, MatRef};
use ndarray::{Array2, ArrayView2, LinalgScalar};

use crate::C64;

/// Kronecker product: block `(i, j)` of the result is `a[i, j] · b`.
pub fn kron<T: LinalgScalar>(a: &Array2<T>, b: &Array2<T>) -> Array2<T> {
    let (p, q) = a.dim();
    let (r, s) = b.dim();
    let mut out = Array2::<T>::zeros((p * r, q * s));
    for ((i, j), &aij) in a.indexed_iter() {
        if aij.is_zero() {
            continue;
        }
        let mut block = out.slice_mut(ndarray::s![i * r..(i + 1) * r, j * s..(j + 1) * s]);
        block.zip_mut_with(b, |o, &bv| *o = aij * bv);
    }
    out
}

/// Real matrix promoted to complex without touching the real parts.
pub fn to_complex(a: &Array2<f64>) -> Array2<C64> {
    a.mapv(|x| C64::new(x, 0.0))
}

/// Conjugate transpose.
pub fn adjoint(a: &Array2<C64>) -> Array2<C64> {
    a.t().mapv(|z| z.conj())
}

/// Largest absolute entry, 0 for an empty matrix.
pub fn max_abs<T: Copy>(a: &Array2<T>, abs: impl Fn(T) -> f64) -> f64 {
    a.iter().fold(0.0, |m, &x| m.max(abs(x)))
}

/// `max |a·b - I|` for square complex products.
pub fn identity_defect(a: &Array2<C64>, b: &Array2<C64>) -> f64 {
    let p = a.dot(b);
    p.indexed_iter()
        .map(|((i, j), z)| if i == j { (z - C64::new(1.0, 0.0)).norm() } else { z.norm() })
        .fold(0.0, f64::max)
}

pub(crate) fn to_faer_real(a: ArrayView2<f64>) -> Mat<f64> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[[i, j]])
}

pub(crate) fn to_faer_complex(a: ArrayView2<C64>) -> Mat<c64> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[[i, j]])
}

pub(crate) fn from_faer_real(m: MatRef<'_, f64>) -> Array2<f64> {
    Array2::from_shape_fn((m.nrows(), m.ncols()), |(i, j)| m[(i, j)])
}

pub(crate) fn from_faer_complex(m: MatRef<'_, c64>) -> Array2<C64> {
    Array2::from_shape_fn((m.nrows(), m.ncols()), |(i, j)| m[(i, j)])
}
