use std::f64::consts::PI;

use ndarray::Array2;

use super::{check_dims, mode_product, ProductSignal, SpectralCoefficients, TransformKind};
use crate::linalg::{eig_general, principal_power, GeneralEigenBasis};
use crate::{Error, Execution, Result, C64};

/// Per-factor matrices of the adjacency transform.
///
/// `forward = (V⁻¹)^α` on the principal branch and `inverse` is its exact
/// inverse built from the same eigendecomposition of `V⁻¹`. Off the branch
/// cut `inverse` coincides with `V^α`. At `α = 1` they are `V⁻¹` and `V`
/// themselves.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjacencyFactor {
    forward: Array2<C64>,
    inverse: Array2<C64>,
    alpha: f64,
    /// `(min, max)` of `Arg μ` over the eigenvalues μ of `V⁻¹`; `None` at `α = 1`.
    arg_range: Option<(f64, f64)>,
    on_branch_cut: bool,
}

impl AdjacencyFactor {
    pub fn new(basis: &GeneralEigenBasis, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::param(format!("fractional order must lie in (0, 1], got {alpha}")));
        }
        if alpha == 1.0 {
            return Ok(AdjacencyFactor {
                forward: basis.v_inv().clone(),
                inverse: basis.v().clone(),
                alpha,
                arg_range: None,
                on_branch_cut: false,
            });
        }
        let inner = eig_general(basis.v_inv())?;
        let power = inner.power(alpha);
        let inverse = inner.inverse_power(alpha)?;
        let args = inner.j().iter().map(|&mu| {
            let (_, cut) = principal_power(mu, 1.0);
            if cut {
                PI
            } else {
                mu.im.atan2(mu.re)
            }
        });
        let arg_range = args.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), a| (lo.min(a), hi.max(a)));
        Ok(AdjacencyFactor {
            forward: power.matrix,
            inverse,
            alpha,
            arg_range: Some(arg_range),
            on_branch_cut: power.on_branch_cut,
        })
    }

    pub fn forward(&self) -> &Array2<C64> {
        &self.forward
    }

    pub fn inverse(&self) -> &Array2<C64> {
        &self.inverse
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn n(&self) -> usize {
        self.forward.nrows()
    }

    /// True if an eigenvalue of `V⁻¹` sat on the negative real axis.
    pub fn on_branch_cut(&self) -> bool {
        self.on_branch_cut
    }

    /// Whether the per-factor powers multiply out to the single principal
    /// power of the Kronecker product `(V1 ⊗ ⋯ ⊗ Vm)⁻¹`. This holds exactly
    /// when every sum of eigenvalue arguments stays inside `(-π, π)`.
    pub fn factorization_is_principal(factors: &[AdjacencyFactor]) -> bool {
        if factors.iter().any(|f| f.arg_range.is_none()) {
            return factors.iter().all(|f| f.arg_range.is_none());
        }
        let (lo, hi) = factors
            .iter()
            .filter_map(|f| f.arg_range)
            .fold((0.0, 0.0), |(lo, hi), (a, b)| (lo + a, hi + b));
        lo > -PI && hi < PI
    }
}

fn build_factors(bases: &[GeneralEigenBasis], alpha: f64) -> Result<Vec<AdjacencyFactor>> {
    if bases.is_empty() {
        return Err(Error::param("at least one factor basis is required"));
    }
    bases.iter().map(|b| AdjacencyFactor::new(b, alpha)).collect()
}

/// Adjacency-based transform `f̂ = ((V1 ⊗ ⋯ ⊗ Vm)⁻¹)^α f`, applied factor by factor.
pub fn a_mgfrft(f: &ProductSignal, bases: &[GeneralEigenBasis], alpha: f64) -> Result<SpectralCoefficients> {
    a_mgfrft_with(f, &build_factors(bases, alpha)?, Execution::default())
}

pub fn a_mgfrft_with(f: &ProductSignal, factors: &[AdjacencyFactor], exec: Execution) -> Result<SpectralCoefficients> {
    check_dims(f.dims(), factors.iter().map(AdjacencyFactor::n))?;
    let alpha = factors.first().map(AdjacencyFactor::alpha).ok_or_else(|| Error::param("no factors"))?;
    if factors.iter().any(|x| x.alpha != alpha) {
        return Err(Error::param("adjacency factors mix fractional orders"));
    }
    let mut data = f.data().clone();
    for (axis, factor) in factors.iter().enumerate() {
        data = mode_product(&data, &factor.forward, axis, exec)?;
    }
    SpectralCoefficients::new(data, alpha, TransformKind::Adjacency)
}

/// Inverse adjacency transform; exact inverse of [`a_mgfrft`] for the same bases and order.
pub fn ia_mgfrft(coef: &SpectralCoefficients, bases: &[GeneralEigenBasis], alpha: f64) -> Result<ProductSignal> {
    ia_mgfrft_with(coef, &build_factors(bases, alpha)?, Execution::default())
}

pub fn ia_mgfrft_with(coef: &SpectralCoefficients, factors: &[AdjacencyFactor], exec: Execution) -> Result<ProductSignal> {
    if coef.kind() != TransformKind::Adjacency {
        return Err(Error::param("inverse adjacency transform given Laplacian coefficients"));
    }
    check_dims(coef.dims(), factors.iter().map(AdjacencyFactor::n))?;
    if let Some(f) = factors.iter().find(|f| f.alpha != coef.alpha()) {
        return Err(Error::param(format!("coefficients use α = {}, factors use α = {}", coef.alpha(), f.alpha)));
    }
    let mut data = coef.data().clone();
    for (axis, factor) in factors.iter().enumerate() {
        data = mode_product(&data, &factor.inverse, axis, exec)?;
    }
    ProductSignal::from_complex(data)
}
