//! Quantum Fisher information of unitary families `ρ_θ = e^{-iθH} ρ e^{iθH}`,
//! the symmetric logarithmic derivative, and the classical Fisher information
//! of a fixed measurement.
//!
//! All quantities use the quarter-normalized convention, so the QFI of a pure
//! state equals the variance of the generator.

use num_complex::Complex64;

use crate::error::{invalid, shape, Error, Result};
use crate::linalg::{self, check_hermitian, eigh, CMatrix, CVector, Spectrum, I};
use crate::states::DensityMatrix;

/// Eigenvalue pairs with `pᵢ + pⱼ` at or below this are outside the support.
pub const SUPPORT_CUTOFF: f64 = 1e-12;
/// Outcome probabilities below this are treated as vanishing in `classical_fi`.
pub const PROBABILITY_FLOOR: f64 = 1e-12;
/// Derivatives below this at a vanishing outcome contribute nothing.
pub const DERIVATIVE_FLOOR: f64 = 1e-8;
pub const DEFAULT_FD_STEP: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    matrix: CMatrix,
}

impl Observable {
    pub fn new(m: CMatrix) -> Result<Self> {
        check_hermitian(&m)?;
        Ok(Self {
            matrix: linalg::hermitian_part(&m),
        })
    }

    /// Caller guarantees Hermiticity up to roundoff.
    pub(crate) fn from_hermitian(m: CMatrix) -> Self {
        Self {
            matrix: linalg::hermitian_part(&m),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: CMatrix::identity(dim, dim),
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }
}

#[derive(Debug, Clone)]
pub struct Povm {
    elements: Vec<CMatrix>,
}

impl Povm {
    pub fn new(elements: Vec<CMatrix>) -> Result<Self> {
        let d = elements
            .first()
            .ok_or_else(|| invalid("POVM has no elements"))?
            .nrows();
        let mut sum = CMatrix::zeros(d, d);
        for e in &elements {
            if e.nrows() != d || e.ncols() != d {
                return Err(shape("POVM elements must share one square shape"));
            }
            let min_eigenvalue = eigh(e)?.values.last().copied().unwrap_or(0.0);
            if min_eigenvalue < -1e-10 {
                return Err(Error::NotPositive { min_eigenvalue });
            }
            sum += e;
        }
        let residual = (sum - CMatrix::identity(d, d)).norm();
        if residual > 1e-10 {
            return Err(invalid(format!(
                "POVM elements do not sum to the identity (residual {residual:.3e})"
            )));
        }
        Ok(Self { elements })
    }

    /// Rank-one projective measurement onto an orthonormal basis.
    pub fn projective(basis: &[CVector]) -> Result<Self> {
        Self::new(basis.iter().map(linalg::projector).collect())
    }

    pub fn elements(&self) -> &[CMatrix] {
        &self.elements
    }

    pub fn dim(&self) -> usize {
        self.elements[0].nrows()
    }
}

fn check_dims(rho: &DensityMatrix, h: &Observable) -> Result<()> {
    if rho.dim() != h.dim() {
        return Err(shape(format!(
            "state has dimension {}, observable has dimension {}",
            rho.dim(),
            h.dim()
        )));
    }
    Ok(())
}

/// `Σ_{i,j} (pᵢ − pⱼ)² / (2(pᵢ + pⱼ)) |Hᵢⱼ|²` given `H` already expressed in
/// the eigenbasis of `ρ`.
pub fn qfi_in_eigenbasis(spectrum: &Spectrum, h_eig: &CMatrix) -> f64 {
    let p: Vec<f64> = spectrum.values.iter().map(|&x| x.max(0.0)).collect();
    let n = p.len();
    let mut total = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let s = p[i] + p[j];
            if s <= SUPPORT_CUTOFF {
                continue;
            }
            let d = p[i] - p[j];
            // (i, j) and (j, i) contribute equally
            total += d * d / s * h_eig[(i, j)].norm_sqr();
        }
    }
    total
}

pub fn qfi(rho: &DensityMatrix, h: &Observable) -> Result<f64> {
    check_dims(rho, h)?;
    let spectrum = rho.spectrum();
    Ok(qfi_in_eigenbasis(&spectrum, &spectrum.in_eigenbasis(h.matrix())))
}

/// `tr(ρH²) − (tr ρH)²`
pub fn variance(rho: &DensityMatrix, h: &Observable) -> Result<f64> {
    check_dims(rho, h)?;
    let rh = rho.matrix() * h.matrix();
    let mean = rh.trace().re;
    let second = (&rh * h.matrix()).trace().re;
    Ok((second - mean * mean).max(0.0))
}

/// `e^{-iθH} ρ e^{iθH}`
pub fn evolve(rho: &DensityMatrix, h: &Observable, theta: f64) -> Result<DensityMatrix> {
    check_dims(rho, h)?;
    let u = linalg::exp_i_hermitian(h.matrix(), -theta)?;
    rho.conjugate(&u)
}

/// `i[ρ, H]`, the derivative of the unitary family at θ = 0.
pub fn generator_derivative(rho: &DensityMatrix, h: &Observable) -> CMatrix {
    linalg::commutator(rho.matrix(), h.matrix()) * I
}

/// Symmetric logarithmic derivative solving `i[ρ,H] = (Lρ + ρL)/2` on the
/// support of `ρ`; components with `pᵢ + pⱼ` below the cutoff are zero.
pub fn sld(rho: &DensityMatrix, h: &Observable) -> Result<Observable> {
    check_dims(rho, h)?;
    let spectrum = rho.spectrum();
    let d_eig = spectrum.in_eigenbasis(&generator_derivative(rho, h));
    let n = spectrum.dim();
    let l_eig = CMatrix::from_fn(n, n, |j, i| {
        let s = spectrum.values[i].max(0.0) + spectrum.values[j].max(0.0);
        if s <= SUPPORT_CUTOFF {
            Complex64::new(0.0, 0.0)
        } else {
            d_eig[(j, i)] * (2.0 / s)
        }
    });
    let l = &spectrum.vectors * l_eig * spectrum.vectors.adjoint();
    Ok(Observable::from_hermitian(l))
}

/// `‖i[ρ,H] − (Lρ + ρL)/2‖` in Frobenius norm.
pub fn sld_residual(rho: &DensityMatrix, h: &Observable, l: &Observable) -> f64 {
    let lhs = generator_derivative(rho, h);
    let rhs = (l.matrix() * rho.matrix() + rho.matrix() * l.matrix()).scale(0.5);
    (lhs - rhs).norm()
}

/// `(1/4) tr(ρ L²)`
pub fn qfi_from_sld(rho: &DensityMatrix, l: &Observable) -> f64 {
    (rho.matrix() * l.matrix() * l.matrix()).trace().re / 4.0
}

/// Outcome probabilities `tr(M_x ρ)`.
pub fn outcome_probabilities(rho: &DensityMatrix, povm: &Povm) -> Vec<f64> {
    povm.elements()
        .iter()
        .map(|m| (m * rho.matrix()).trace().re)
        .collect()
}

/// `(1/4) Σ_x (∂_θ p_x)² / p_x` with central finite differences.
pub fn classical_fi(
    rho: &DensityMatrix,
    h: &Observable,
    povm: &Povm,
    theta: f64,
    step: f64,
) -> Result<f64> {
    check_dims(rho, h)?;
    if povm.dim() != rho.dim() {
        return Err(shape("POVM does not act on the state space"));
    }
    if !(step > 0.0) {
        return Err(invalid(format!("finite-difference step must be positive, got {step}")));
    }
    let p = outcome_probabilities(&evolve(rho, h, theta)?, povm);
    let plus = outcome_probabilities(&evolve(rho, h, theta + step)?, povm);
    let minus = outcome_probabilities(&evolve(rho, h, theta - step)?, povm);
    let mut total = 0.0;
    for (x, ((&px, &pp), &pm)) in p.iter().zip(&plus).zip(&minus).enumerate() {
        let dp = (pp - pm) / (2.0 * step);
        if px < PROBABILITY_FLOOR {
            if dp.abs() < DERIVATIVE_FLOOR {
                continue;
            }
            return Err(Error::DegeneratePoint { outcome: x, theta });
        }
        total += dp * dp / px;
    }
    Ok(total / 4.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{real_diag, ONE, ZERO};
    use approx::assert_abs_diff_eq;

    fn sx() -> Observable {
        Observable::new(CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])).unwrap()
    }
    fn sy() -> Observable {
        Observable::new(CMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO])).unwrap()
    }
    fn sz() -> Observable {
        Observable::new(real_diag(&[1.0, -1.0])).unwrap()
    }
    fn plus() -> DensityMatrix {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        DensityMatrix::from_pure(&CVector::from_vec(vec![Complex64::new(h, 0.0); 2])).unwrap()
    }

    #[test]
    fn qfi_maximally_mixed_is_zero() {
        let rho = DensityMatrix::maximally_mixed(3);
        let h = Observable::new(crate::random::random_hermitian(3, 1)).unwrap();
        assert_abs_diff_eq!(qfi(&rho, &h).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn qfi_diagonal_state_sigma_x() {
        // two off-diagonal terms, each (0.5)^2 / (2 * 1) * 1
        let rho = DensityMatrix::new(real_diag(&[0.75, 0.25])).unwrap();
        assert_abs_diff_eq!(qfi(&rho, &sx()).unwrap(), 0.25, epsilon = 1e-14);
    }

    #[test]
    fn variance_cases() {
        let mixed = DensityMatrix::maximally_mixed(2);
        assert_abs_diff_eq!(variance(&plus(), &Observable::identity(2)).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(variance(&plus(), &sz()).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(variance(&mixed, &sz()).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn evolve_cases() {
        let rho = crate::states::random_density(3, 3, 4).unwrap();
        let h = Observable::new(crate::random::random_hermitian(3, 5)).unwrap();
        let same = evolve(&rho, &h, 0.0).unwrap();
        assert_abs_diff_eq!((same.matrix() - rho.matrix()).norm(), 0.0, epsilon = 1e-14);

        let diag = DensityMatrix::new(real_diag(&[0.7, 0.3])).unwrap();
        let rotated = evolve(&diag, &sz(), 1.3).unwrap();
        assert_abs_diff_eq!((rotated.matrix() - diag.matrix()).norm(), 0.0, epsilon = 1e-14);

        // |0⟩ rotated about x by θ = π/4: Bloch vector (0, -sin(π/2), cos(π/2)) = (0, -1, 0)
        let zero = DensityMatrix::new(real_diag(&[1.0, 0.0])).unwrap();
        let out = evolve(&zero, &sx(), std::f64::consts::FRAC_PI_4).unwrap();
        let bloch_y = (out.matrix() * sy().matrix()).trace().re;
        assert_abs_diff_eq!(bloch_y, -1.0, epsilon = 1e-12);
        let s = out.spectrum();
        assert_abs_diff_eq!(s.values[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.values[1], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn sld_commuting_is_zero() {
        let diag = DensityMatrix::new(real_diag(&[0.7, 0.3])).unwrap();
        let l = sld(&diag, &sz()).unwrap();
        assert_abs_diff_eq!(l.matrix().norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn sld_pure_state_is_twice_derivative() {
        let rho = plus();
        let l = sld(&rho, &sz()).unwrap();
        let expected = generator_derivative(&rho, &sz()).scale(2.0);
        assert!((l.matrix() - expected).norm() <= 1e-10);
        assert!(sld_residual(&rho, &sz(), &l) <= 1e-10);
    }

    #[test]
    fn classical_fi_stationary_and_bloch() {
        let diag = DensityMatrix::new(real_diag(&[0.7, 0.3])).unwrap();
        let h = Observable::new(real_diag(&[0.3, -1.1])).unwrap();
        let povm = Povm::projective(&linalg::columns(&crate::random::haar_unitary(2, 3))).unwrap();
        assert_abs_diff_eq!(
            classical_fi(&diag, &h, &povm, 0.2, DEFAULT_FD_STEP).unwrap(),
            0.0,
            epsilon = 1e-12
        );

        // p± = (1 ∓ sin 2θ)/2 for the σ_y basis; FI = (1/4) Σ (∂p)²/p = 1 at θ = 0
        let y_basis = linalg::columns(&eigh(sy().matrix()).unwrap().vectors);
        let povm = Povm::projective(&y_basis).unwrap();
        let f = classical_fi(&plus(), &sz(), &povm, 0.0, DEFAULT_FD_STEP).unwrap();
        assert_abs_diff_eq!(f, 1.0, epsilon = 1e-7);
        assert_abs_diff_eq!(qfi(&plus(), &sz()).unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn classical_fi_degenerate_point() {
        // |0⟩ under σ_x measured in the z basis: p₁ = sin²θ vanishes at θ = 0 with ∂p₁ = 0,
        // so the zero outcome is skipped.
        let zero = DensityMatrix::new(real_diag(&[1.0, 0.0])).unwrap();
        let z_basis = vec![linalg::basis_vector(2, 0), linalg::basis_vector(2, 1)];
        let povm = Povm::projective(&z_basis).unwrap();
        let f = classical_fi(&zero, &sx(), &povm, 0.0, DEFAULT_FD_STEP).unwrap();
        assert!(f.abs() < 1e-6);
        assert!(classical_fi(&zero, &sx(), &povm, 0.0, -1.0).is_err());
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let rho = DensityMatrix::maximally_mixed(3);
        assert!(matches!(qfi(&rho, &sz()), Err(Error::Shape(_))));
        assert!(matches!(variance(&rho, &sz()), Err(Error::Shape(_))));
    }

    #[test]
    fn povm_validation() {
        assert!(Povm::new(vec![real_diag(&[1.0, 0.0])]).is_err());
        assert!(Povm::new(vec![real_diag(&[1.5, 0.0]), real_diag(&[-0.5, 1.0])]).is_err());
    }
}
