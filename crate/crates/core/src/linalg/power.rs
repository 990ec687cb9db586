use ndarray::Array2;

use super::{adjoint, eig_general, eig_general_real, to_complex, SymmetricEigenBasis};
use crate::{Error, Result, C64};

/// Relative size of an imaginary part below which a negative eigenvalue is
/// treated as lying on the branch cut.
const BRANCH_CUT_TOL: f64 = 1e-12;
/// Scaled size of a negative Laplacian eigenvalue that is snapped to zero.
const ZERO_SNAP_TOL: f64 = 1e-10;

/// Result of a principal matrix power.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixPower {
    pub matrix: Array2<C64>,
    /// Set when some eigenvalue sat on the negative real axis, where the
    /// principal branch `(-x)^α = x^α·e^{iπα}` was applied.
    pub on_branch_cut: bool,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::param(format!("fractional order must lie in (0, 1], got {alpha}")))
    }
}

/// `z^α = exp(α·Log z)` with `Arg z ∈ (-π, π]`; `0^α = 0`.
///
/// Negative reals whose imaginary part is within rounding of zero are moved
/// onto the upper side of the cut; the flag reports that this happened.
pub fn principal_power(z: C64, alpha: f64) -> (C64, bool) {
    let r = z.norm();
    if r == 0.0 {
        return (C64::new(0.0, 0.0), false);
    }
    let on_cut = z.re < 0.0 && z.im.abs() <= BRANCH_CUT_TOL * r;
    let theta = if on_cut { std::f64::consts::PI } else { z.im.atan2(z.re) };
    (C64::from_polar(r.powf(alpha), alpha * theta), on_cut)
}

/// Principal fractional power of a diagonalizable complex matrix.
/// At `alpha == 1` the input is returned unchanged.
pub fn matrix_power(a: &Array2<C64>, alpha: f64) -> Result<MatrixPower> {
    check_alpha(alpha)?;
    if alpha == 1.0 {
        return Ok(MatrixPower { matrix: a.clone(), on_branch_cut: false });
    }
    let basis = eig_general(a)?;
    Ok(basis.power(alpha))
}

/// [`matrix_power`] for real input.
pub fn matrix_power_real(a: &Array2<f64>, alpha: f64) -> Result<MatrixPower> {
    check_alpha(alpha)?;
    if alpha == 1.0 {
        return Ok(MatrixPower { matrix: to_complex(a), on_branch_cut: false });
    }
    let basis = eig_general_real(a)?;
    Ok(basis.power(alpha))
}

impl super::GeneralEigenBasis {
    /// `V · diag(j^α) · V⁻¹` on the principal branch.
    pub fn power(&self, alpha: f64) -> MatrixPower {
        let mut on_branch_cut = false;
        let values: Vec<C64> = self
            .j()
            .iter()
            .map(|&z| {
                let (p, cut) = principal_power(z, alpha);
                on_branch_cut |= cut;
                p
            })
            .collect();
        MatrixPower { matrix: self.compose(&values), on_branch_cut }
    }

    /// Exact inverse of [`Self::power`]: `V · diag(j^{-α}) · V⁻¹` built from the
    /// same principal values. Fails if an eigenvalue is zero.
    pub fn inverse_power(&self, alpha: f64) -> Result<Array2<C64>> {
        let values = self
            .j()
            .iter()
            .map(|&z| {
                let (p, _) = principal_power(z, alpha);
                if p.norm() == 0.0 {
                    Err(Error::Numerical {
                        message: "cannot invert a fractional power with a zero eigenvalue".into(),
                        residual: None,
                    })
                } else {
                    Ok(p.inv())
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(self.compose(&values))
    }
}

/// Fractional eigenbasis `κ = χ^α`, `r_ℓ = λ_ℓ^α` of one factor graph.
#[derive(Debug, Clone, PartialEq)]
pub struct FractionalBasis {
    kappa: Array2<C64>,
    r: Vec<C64>,
    alpha: f64,
    on_branch_cut: bool,
}

impl FractionalBasis {
    /// Columns are the fractional eigenvectors `κ_ℓ`.
    pub fn kappa(&self) -> &Array2<C64> {
        &self.kappa
    }

    pub fn r(&self) -> &[C64] {
        &self.r
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn n(&self) -> usize {
        self.r.len()
    }

    /// Whether computing `χ^α` hit the branch cut (eigenvalue −1 of `χ`).
    pub fn on_branch_cut(&self) -> bool {
        self.on_branch_cut
    }

    /// `κ^H`.
    pub fn kappa_adjoint(&self) -> Array2<C64> {
        adjoint(&self.kappa)
    }

    /// Fractional Laplacian `κ · diag(r) · κ^H`.
    pub fn operator(&self) -> Array2<C64> {
        let mut scaled = self.kappa.clone();
        for (mut col, &r) in scaled.columns_mut().into_iter().zip(&self.r) {
            col.mapv_inplace(|z| z * r);
        }
        scaled.dot(&self.kappa_adjoint())
    }
}

/// Builds `κ = χ^α` and `R = Λ^α` from a symmetric eigenbasis.
///
/// At `alpha == 1` no power is computed: `κ = χ` and `r = λ` exactly.
/// Negative eigenvalues within `1e-10` (scaled) of zero are treated as zero.
pub fn fractional_basis(basis: &SymmetricEigenBasis, alpha: f64) -> Result<FractionalBasis> {
    check_alpha(alpha)?;
    if alpha == 1.0 {
        return Ok(FractionalBasis {
            kappa: to_complex(basis.chi()),
            r: basis.lambdas().iter().map(|&l| C64::new(l, 0.0)).collect(),
            alpha,
            on_branch_cut: false,
        });
    }
    let scale = basis.lambdas().iter().fold(1.0_f64, |m, l| m.max(l.abs()));
    let r = basis
        .lambdas()
        .iter()
        .map(|&l| {
            let l = if l < 0.0 && l >= -ZERO_SNAP_TOL * scale { 0.0 } else { l };
            principal_power(C64::new(l, 0.0), alpha).0
        })
        .collect();
    let power = matrix_power_real(basis.chi(), alpha)?;
    Ok(FractionalBasis { kappa: power.matrix, r, alpha, on_branch_cut: power.on_branch_cut })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_path, laplacian, Graph};
    use crate::linalg::{eig_sym, identity_defect, max_abs};
    use ndarray::array;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn cmax(a: &Array2<C64>) -> f64 {
        max_abs(a, |z| z.norm())
    }

    // For an involution X (X² = I): X^α = (I+X)/2 + e^{iπα}(I-X)/2.
    fn involution_power(x: &Array2<f64>, alpha: f64) -> Array2<C64> {
        let n = x.nrows();
        let eye = Array2::<f64>::eye(n);
        let plus = to_complex(&((&eye + x) / 2.0));
        let minus = to_complex(&((&eye - x) / 2.0));
        let phase = C64::from_polar(1.0, std::f64::consts::PI * alpha);
        plus + minus.mapv(|z| z * phase)
    }

    #[test]
    fn power_of_identity() {
        let p = matrix_power_real(&Array2::eye(3), 0.5).unwrap();
        assert!(cmax(&(p.matrix - to_complex(&Array2::eye(3)))) < 1e-14);
        assert!(!p.on_branch_cut);
    }

    #[test]
    fn alpha_one_is_bitwise_identity() {
        let a = array![[0.3, -1.7], [2.2, 0.1]];
        assert_eq!(matrix_power_real(&a, 1.0).unwrap().matrix, to_complex(&a));
        let ac = array![[c(0.1, 0.2), c(3.0, -1.0)], [c(0.0, 0.0), c(-1.0, 5.0)]];
        assert_eq!(matrix_power(&ac, 1.0).unwrap().matrix, ac);
    }

    #[test]
    fn square_root_of_swap() {
        let x = array![[0.0, 1.0], [1.0, 0.0]];
        let p = matrix_power_real(&x, 0.5).unwrap();
        let expected = array![[c(0.5, 0.5), c(0.5, -0.5)], [c(0.5, -0.5), c(0.5, 0.5)]];
        assert!(cmax(&(&p.matrix - &expected)) < 1e-14);
        assert!(cmax(&(&p.matrix - &involution_power(&x, 0.5))) < 1e-14);
        assert!(p.on_branch_cut);
    }

    #[test]
    fn rejects_bad_alpha_and_defective_input() {
        assert!(matrix_power_real(&Array2::eye(2), 0.0).is_err());
        assert!(matrix_power_real(&Array2::eye(2), 1.5).is_err());
        assert!(matrix_power_real(&array![[2.0, 1.0], [0.0, 2.0]], 0.5).is_err());
    }

    #[test]
    fn zero_eigenvalue_maps_to_zero() {
        let (p, cut) = principal_power(c(0.0, 0.0), 0.3);
        assert_eq!(p, c(0.0, 0.0));
        assert!(!cut);
        let (p, cut) = principal_power(c(-4.0, -0.0), 0.5);
        assert!((p - c(0.0, 2.0)).norm() < 1e-15);
        assert!(cut);
    }

    #[test]
    fn psd_power_has_powered_eigenvalues() {
        let l = laplacian(&crate::graph::build_grid(2, 3).unwrap()).unwrap();
        let basis = eig_sym(&l).unwrap();
        let p = matrix_power_real(&l, 0.7).unwrap().matrix;
        // eigenvalues of a Hermitian matrix via Rayleigh quotients on the original eigenvectors
        let chi = to_complex(basis.chi());
        let d = adjoint(&chi).dot(&p).dot(&chi);
        for (k, &lam) in basis.lambdas().iter().enumerate() {
            let want = lam.max(0.0).powf(0.7);
            assert!((d[[k, k]] - c(want, 0.0)).norm() < 1e-9);
        }
    }

    #[test]
    fn fractional_basis_at_one_is_chi() {
        let b = eig_sym(&laplacian(&build_path(4).unwrap()).unwrap()).unwrap();
        let fb = fractional_basis(&b, 1.0).unwrap();
        assert_eq!(fb.kappa(), &to_complex(b.chi()));
        let lambdas: Vec<C64> = b.lambdas().iter().map(|&l| c(l, 0.0)).collect();
        assert_eq!(fb.r(), lambdas.as_slice());
    }

    #[test]
    fn fractional_basis_edgeless_graph() {
        let g = Graph::from_edges(3, false, &[]).unwrap();
        let b = eig_sym(&laplacian(&g).unwrap()).unwrap();
        let fb = fractional_basis(&b, 0.4).unwrap();
        assert!(cmax(&(fb.kappa() - to_complex(&Array2::eye(3)))) < 1e-14);
        assert!(fb.r().iter().all(|r| r.norm() == 0.0));
    }

    #[test]
    fn fractional_basis_path_two_half() {
        let b = eig_sym(&laplacian(&build_path(2).unwrap()).unwrap()).unwrap();
        let fb = fractional_basis(&b, 0.5).unwrap();
        assert!(fb.r()[0].norm() < 1e-7);
        assert!((fb.r()[1] - c(2f64.sqrt(), 0.0)).norm() < 1e-14);
        // sign-fixed χ of P2 is the reflection (1/√2)[[1,1],[1,-1]], an involution
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let chi = array![[s, s], [s, -s]];
        assert!(cmax(&(fb.kappa() - &involution_power(&chi, 0.5))) < 1e-13);
        assert!(fb.on_branch_cut());
        assert!(identity_defect(&fb.kappa_adjoint(), fb.kappa()) < 1e-13);
    }

    #[test]
    fn fractional_operator_eigenpairs() {
        let b = eig_sym(&laplacian(&build_path(5).unwrap()).unwrap()).unwrap();
        let fb = fractional_basis(&b, 0.6).unwrap();
        let op = fb.operator();
        for k in 0..5 {
            let v = fb.kappa().column(k).to_owned();
            let lhs = op.dot(&v);
            let err = lhs.iter().zip(&v).map(|(a, b)| (a - b * fb.r()[k]).norm()).fold(0.0, f64::max);
            assert!(err < 1e-10);
        }
    }

    #[test]
    fn inverse_power_is_exact_inverse() {
        let a = array![[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0]];
        let basis = crate::linalg::eig_general_real(&a).unwrap();
        let fwd = basis.power(0.35).matrix;
        let inv = basis.inverse_power(0.35).unwrap();
        assert!(identity_defect(&fwd, &inv) < 1e-12);
    }
}
