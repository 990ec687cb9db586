use std::cmp::Ordering;

use faer::linalg::solvers::DenseSolveCore;
use faer::{c64, Mat, Side};
use ndarray::Array2;

use super::{from_faer_complex, from_faer_real, identity_defect, max_abs, to_faer_complex, to_faer_real};
use crate::{Error, Result, C64};

const SYMMETRY_TOL: f64 = 1e-10;
const SIGN_TOL: f64 = 1e-12;
const TIE_TOL: f64 = 1e-10;
const CONDITION_LIMIT: f64 = 1e10;
const GENERAL_RESIDUAL_TOL: f64 = 1e-8;
/// Reconstruction is only re-verified up to this size; beyond it the check
/// would cost as much as the decomposition itself.
const SYM_RESIDUAL_CHECK_MAX_N: usize = 256;

/// Orthonormal eigenvectors (columns of `chi`) with ascending eigenvalues.
///
/// Each column is sign-fixed so its first entry with magnitude above `1e-12`
/// is positive. Columns whose eigenvalues agree within `1e-10` (scaled) are
/// ordered by descending lexicographic order of the sign-fixed vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricEigenBasis {
    chi: Array2<f64>,
    lambdas: Vec<f64>,
}

impl SymmetricEigenBasis {
    pub fn chi(&self) -> &Array2<f64> {
        &self.chi
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn n(&self) -> usize {
        self.lambdas.len()
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambdas.last().copied().unwrap_or(0.0)
    }

    /// `chi · diag(lambdas) · chiᵀ`.
    pub fn reconstruct(&self) -> Array2<f64> {
        let mut scaled = self.chi.clone();
        for (mut col, &l) in scaled.columns_mut().into_iter().zip(&self.lambdas) {
            col *= l;
        }
        scaled.dot(&self.chi.t())
    }
}

/// Eigen-decomposition of a real symmetric matrix.
pub fn eig_sym(a: &Array2<f64>) -> Result<SymmetricEigenBasis> {
    let (rows, cols) = a.dim();
    if rows != cols || rows == 0 {
        return Err(Error::shape(format!("eig_sym needs a non-empty square matrix, got {rows}x{cols}")));
    }
    let scale = max_abs(a, f64::abs).max(1.0);
    for i in 0..rows {
        for j in (i + 1)..rows {
            if (a[[i, j]] - a[[j, i]]).abs() > SYMMETRY_TOL * scale {
                return Err(Error::shape(format!("matrix is not symmetric at ({i}, {j})")));
            }
        }
    }

    let evd = to_faer_real(a.view()).self_adjoint_eigen(Side::Lower).map_err(|e| Error::Numerical {
        message: format!("symmetric eigensolver did not converge: {e:?}"),
        residual: None,
    })?;
    let mut chi = from_faer_real(evd.U());
    let diag = evd.S().column_vector();
    let raw: Vec<f64> = (0..rows).map(|i| diag[i]).collect();

    for mut col in chi.columns_mut() {
        if let Some(&first) = col.iter().find(|x| x.abs() > SIGN_TOL) {
            if first < 0.0 {
                col.mapv_inplace(|x| -x);
            }
        }
    }

    // faer returns ascending eigenvalues; enforce it anyway, then settle ties.
    let mut order: Vec<usize> = (0..rows).collect();
    order.sort_by(|&p, &q| raw[p].total_cmp(&raw[q]));
    let lam_scale = raw.iter().fold(1.0_f64, |m, l| m.max(l.abs()));
    let mut start = 0;
    while start < rows {
        let mut end = start + 1;
        while end < rows && raw[order[end]] - raw[order[end - 1]] <= TIE_TOL * lam_scale {
            end += 1;
        }
        if end - start > 1 {
            order[start..end].sort_by(|&p, &q| lex_desc(chi.column(p).iter(), chi.column(q).iter()));
        }
        start = end;
    }

    let chi = Array2::from_shape_fn((rows, rows), |(i, k)| chi[[i, order[k]]]);
    let mut lambdas: Vec<f64> = order.iter().map(|&k| raw[k]).collect();
    // Reordering inside a tie group may leave sub-tolerance inversions.
    let mut start = 0;
    while start < rows {
        let mut end = start + 1;
        while end < rows && (lambdas[end] - lambdas[end - 1]).abs() <= TIE_TOL * lam_scale {
            end += 1;
        }
        lambdas[start..end].sort_by(f64::total_cmp);
        start = end;
    }

    let basis = SymmetricEigenBasis { chi, lambdas };
    if rows <= SYM_RESIDUAL_CHECK_MAX_N {
        let residual = max_abs(&(basis.reconstruct() - a), f64::abs);
        if residual > 1e-8 * scale {
            return Err(Error::Numerical {
                message: "symmetric eigendecomposition failed to reproduce its input".into(),
                residual: Some(residual),
            });
        }
    }
    Ok(basis)
}

fn lex_desc<'a>(a: impl Iterator<Item = &'a f64>, b: impl Iterator<Item = &'a f64>) -> Ordering {
    for (x, y) in a.zip(b) {
        match y.total_cmp(x) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}

/// `A = V · diag(j) · V⁻¹` for a diagonalizable square matrix.
///
/// Eigenvalues are ordered by descending real part, then descending imaginary
/// part. Columns of `v` have unit 2-norm and are phase-fixed so the diagonal
/// entry `v[k][k]` is real positive (falling back to the first entry above
/// `1e-12` when the diagonal entry vanishes).
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralEigenBasis {
    v: Array2<C64>,
    j: Vec<C64>,
    v_inv: Array2<C64>,
    condition: f64,
}

impl GeneralEigenBasis {
    pub fn v(&self) -> &Array2<C64> {
        &self.v
    }

    pub fn j(&self) -> &[C64] {
        &self.j
    }

    pub fn v_inv(&self) -> &Array2<C64> {
        &self.v_inv
    }

    /// 2-norm condition number of `v`.
    pub fn condition(&self) -> f64 {
        self.condition
    }

    pub fn n(&self) -> usize {
        self.j.len()
    }

    /// `V · diag(values) · V⁻¹`.
    pub fn compose(&self, values: &[C64]) -> Array2<C64> {
        let mut scaled = self.v.clone();
        for (mut col, &d) in scaled.columns_mut().into_iter().zip(values) {
            col.mapv_inplace(|z| z * d);
        }
        scaled.dot(&self.v_inv)
    }
}

/// General eigendecomposition of a complex square matrix.
pub fn eig_general(a: &Array2<C64>) -> Result<GeneralEigenBasis> {
    let (rows, cols) = a.dim();
    if rows != cols || rows == 0 {
        return Err(Error::shape(format!("eig_general needs a non-empty square matrix, got {rows}x{cols}")));
    }
    let evd = to_faer_complex(a.view()).eigen().map_err(|e| Error::Numerical {
        message: format!("eigensolver did not converge: {e:?}"),
        residual: None,
    })?;
    finish_general(a, evd.U().to_owned(), evd.S().column_vector().iter().copied().collect())
}

/// General eigendecomposition of a real square matrix (complex output).
pub fn eig_general_real(a: &Array2<f64>) -> Result<GeneralEigenBasis> {
    let (rows, cols) = a.dim();
    if rows != cols || rows == 0 {
        return Err(Error::shape(format!("eig_general needs a non-empty square matrix, got {rows}x{cols}")));
    }
    let evd = to_faer_real(a.view()).eigen().map_err(|e| Error::Numerical {
        message: format!("eigensolver did not converge: {e:?}"),
        residual: None,
    })?;
    let ac = super::to_complex(a);
    finish_general(&ac, evd.U().to_owned(), evd.S().column_vector().iter().copied().collect())
}

fn finish_general(a: &Array2<C64>, u: Mat<c64>, s: Vec<c64>) -> Result<GeneralEigenBasis> {
    let n = s.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&p, &q| s[q].re.total_cmp(&s[p].re).then(s[q].im.total_cmp(&s[p].im)));

    let raw = from_faer_complex(u.as_ref());
    let mut v = Array2::<C64>::zeros((n, n));
    let mut j = Vec::with_capacity(n);
    for (k, &src) in order.iter().enumerate() {
        let col = raw.column(src);
        let norm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::NonDiagonalizable { condition: f64::INFINITY });
        }
        let pivot = if col[k].norm() > 1e-8 * norm {
            col[k]
        } else {
            col.iter().copied().find(|z| z.norm() > SIGN_TOL * norm).unwrap_or(col[k])
        };
        let phase = pivot.conj() / (pivot.norm() * norm);
        v.column_mut(k).assign(&col.mapv(|z| z * phase));
        j.push(s[src]);
    }

    let vf = to_faer_complex(v.view());
    let sv = vf.singular_values().map_err(|e| Error::Numerical {
        message: format!("SVD of eigenvectors failed: {e:?}"),
        residual: None,
    })?;
    let (smax, smin) = (sv[0], sv[n - 1]);
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(condition <= CONDITION_LIMIT) {
        return Err(Error::NonDiagonalizable { condition });
    }
    let v_inv = from_faer_complex(vf.partial_piv_lu().inverse().as_ref());

    let basis = GeneralEigenBasis { v, j, v_inv, condition };
    let a_max = max_abs(a, |z| z.norm());
    let av = a.dot(&basis.v);
    let eig_residual = av
        .indexed_iter()
        .map(|((i, k), z)| (z - basis.v[[i, k]] * basis.j[k]).norm())
        .fold(0.0, f64::max);
    if eig_residual > GENERAL_RESIDUAL_TOL * a_max {
        return Err(Error::Numerical {
            message: "eigenpairs do not satisfy A·v = λ·v".into(),
            residual: Some(eig_residual),
        });
    }
    let inv_defect = identity_defect(&basis.v, &basis.v_inv);
    if inv_defect > GENERAL_RESIDUAL_TOL {
        return Err(Error::Numerical {
            message: "eigenvector inverse is inaccurate".into(),
            residual: Some(inv_defect),
        });
    }
    Ok(basis)
}
