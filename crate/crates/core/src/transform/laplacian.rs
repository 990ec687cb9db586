use ndarray::{Array1, ArrayView1};

use super::dense::{kron_all, kronecker_sum, DENSE_CAP};
use super::{check_dims, mode_product, ProductSignal, SpectralCoefficients, TransformKind};
use crate::graph::MultiIndex;
use crate::linalg::FractionalBasis;
use crate::{Error, Execution, Result, C64};

/// 1-D fractional transform `f̂ = κ^H f`.
pub fn sgfrft_1d(f: ArrayView1<C64>, fb: &FractionalBasis) -> Result<Array1<C64>> {
    if f.len() != fb.n() {
        return Err(Error::shape(format!("signal length {} vs basis size {}", f.len(), fb.n())));
    }
    Ok(fb.kappa_adjoint().dot(&f))
}

/// Inverse of [`sgfrft_1d`]: `f = κ f̂`.
pub fn inverse_sgfrft_1d(coef: ArrayView1<C64>, fb: &FractionalBasis) -> Result<Array1<C64>> {
    if coef.len() != fb.n() {
        return Err(Error::shape(format!("spectrum length {} vs basis size {}", coef.len(), fb.n())));
    }
    Ok(fb.kappa().dot(&coef))
}

fn common_alpha(bases: &[FractionalBasis]) -> Result<f64> {
    let first = bases.first().ok_or_else(|| Error::param("at least one factor basis is required"))?;
    if let Some(b) = bases.iter().find(|b| b.alpha() != first.alpha()) {
        return Err(Error::param(format!(
            "factor bases mix fractional orders {} and {}",
            first.alpha(),
            b.alpha()
        )));
    }
    Ok(first.alpha())
}

/// Laplacian-based multi-dimensional transform:
/// `f̂(ℓ1,…,ℓm) = Σ f(n1,…,nm) · conj(κ⁽¹⁾_{ℓ1}(n1)) ⋯ conj(κ⁽ᵐ⁾_{ℓm}(nm))`.
pub fn l_mgfrft(f: &ProductSignal, bases: &[FractionalBasis]) -> Result<SpectralCoefficients> {
    l_mgfrft_with(f, bases, Execution::default())
}

pub fn l_mgfrft_with(f: &ProductSignal, bases: &[FractionalBasis], exec: Execution) -> Result<SpectralCoefficients> {
    let alpha = common_alpha(bases)?;
    check_dims(f.dims(), bases.iter().map(FractionalBasis::n))?;
    let mut data = f.data().clone();
    for (axis, b) in bases.iter().enumerate() {
        data = mode_product(&data, &b.kappa_adjoint(), axis, exec)?;
    }
    SpectralCoefficients::new(data, alpha, TransformKind::Laplacian)
}

/// Inverse: `f(n1,…,nm) = Σ f̂(ℓ1,…,ℓm) · κ⁽¹⁾_{ℓ1}(n1) ⋯ κ⁽ᵐ⁾_{ℓm}(nm)`.
pub fn il_mgfrft(coef: &SpectralCoefficients, bases: &[FractionalBasis]) -> Result<ProductSignal> {
    il_mgfrft_with(coef, bases, Execution::default())
}

pub fn il_mgfrft_with(coef: &SpectralCoefficients, bases: &[FractionalBasis], exec: Execution) -> Result<ProductSignal> {
    if coef.kind() != TransformKind::Laplacian {
        return Err(Error::param("inverse Laplacian transform given adjacency coefficients"));
    }
    let alpha = common_alpha(bases)?;
    if alpha != coef.alpha() {
        return Err(Error::param(format!("coefficients use α = {}, bases use α = {alpha}", coef.alpha())));
    }
    check_dims(coef.dims(), bases.iter().map(FractionalBasis::n))?;
    let mut data = coef.data().clone();
    for (axis, b) in bases.iter().enumerate() {
        data = mode_product(&data, b.kappa(), axis, exec)?;
    }
    ProductSignal::from_complex(data)
}

/// `‖(⊕ L_α⁽ⁱ⁾)·v − (Σ r_{ℓi})·v‖_∞` for `v = κ⁽¹⁾_{ℓ1} ⊗ ⋯ ⊗ κ⁽ᵐ⁾_{ℓm}`,
/// with the Kronecker sum assembled densely. Capped at [`DENSE_CAP`] vertices.
pub fn check_factor_eigenrelation(bases: &[FractionalBasis], index: &MultiIndex) -> Result<f64> {
    check_factor_eigenrelation_capped(bases, index, DENSE_CAP)
}

pub fn check_factor_eigenrelation_capped(bases: &[FractionalBasis], index: &MultiIndex, cap: usize) -> Result<f64> {
    let dims: Vec<usize> = bases.iter().map(FractionalBasis::n).collect();
    index.validate(&dims)?;
    let ops: Vec<_> = bases.iter().map(FractionalBasis::operator).collect();
    let sum_op = kronecker_sum(&ops, cap)?;
    let columns: Vec<_> = bases
        .iter()
        .zip(index.as_slice())
        .map(|(b, &l)| b.kappa().column(l).to_owned().insert_axis(ndarray::Axis(1)))
        .collect();
    let v = kron_all(&columns, cap)?.remove_axis(ndarray::Axis(1));
    let eig: C64 = bases.iter().zip(index.as_slice()).map(|(b, &l)| b.r()[l]).sum();
    let lhs = sum_op.dot(&v);
    Ok(lhs.iter().zip(&v).map(|(a, b)| (a - b * eig).norm()).fold(0.0, f64::max))
}

/// One row of the flattened m-D spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumRow {
    pub index: MultiIndex,
    /// `Re(r_{ℓ1} + ⋯ + r_{ℓm})`, the position on a 1-D frequency axis.
    pub eigsum: f64,
    pub coefficient: C64,
}

/// The spectrum as a flat table sorted by eigenvalue sum, then multi-index.
///
/// Rows that share an eigenvalue sum would collapse onto one point of a
/// 1-D frequency axis; the multi-index keeps them apart.
pub fn spectrum_table(coef: &SpectralCoefficients, bases: &[FractionalBasis]) -> Result<Vec<SpectrumRow>> {
    if coef.kind() != TransformKind::Laplacian {
        return Err(Error::param("spectrum tables are defined for Laplacian coefficients"));
    }
    check_dims(coef.dims(), bases.iter().map(FractionalBasis::n))?;
    let mut rows: Vec<SpectrumRow> = coef
        .iter_indexed()
        .map(|(index, coefficient)| {
            let eigsum = bases.iter().zip(index.as_slice()).map(|(b, &l)| b.r()[l].re).sum();
            SpectrumRow { index, eigsum, coefficient }
        })
        .collect();
    rows.sort_by(|a, b| a.eigsum.total_cmp(&b.eigsum).then_with(|| a.index.cmp(&b.index)));
    Ok(rows)
}

/// Number of rows whose eigenvalue sum is shared with at least one other row
/// (values within `tol` of each other count as shared). Expects the table order
/// produced by [`spectrum_table`].
pub fn duplicated_eigsum_count(rows: &[SpectrumRow], tol: f64) -> usize {
    let mut count = 0;
    let mut start = 0;
    while start < rows.len() {
        let mut end = start + 1;
        while end < rows.len() && rows[end].eigsum - rows[end - 1].eigsum <= tol {
            end += 1;
        }
        if end - start > 1 {
            count += end - start;
        }
        start = end;
    }
    count
}
