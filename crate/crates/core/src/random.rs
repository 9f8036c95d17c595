//! Seeded random ensembles for tests and sweeps.
//!
//! Every routine takes an explicit 64-bit seed and uses ChaCha8, so
//! results are identical across platforms.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{invalid, Result};
use crate::linalg::{CMatrix, CVector};

pub type Rng = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard complex Gaussian: real and imaginary parts each `N(0, 1/2)`.
pub fn complex_gaussian(rng: &mut Rng) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn ginibre(rows: usize, cols: usize, rng: &mut Rng) -> CMatrix {
    // fill row-major so the stream order is independent of storage layout
    let entries: Vec<Complex64> = (0..rows * cols).map(|_| complex_gaussian(rng)).collect();
    CMatrix::from_row_slice(rows, cols, &entries)
}

pub fn gaussian_vector(dim: usize, rng: &mut Rng) -> CVector {
    CVector::from_iterator(dim, (0..dim).map(|_| complex_gaussian(rng)))
}

pub fn unit_vector(dim: usize, rng: &mut Rng) -> CVector {
    let v = gaussian_vector(dim, rng);
    let n = v.norm();
    v.unscale(n)
}

/// Haar-distributed unitary from the QR decomposition of a Ginibre matrix,
/// with the phases of `R`'s diagonal folded back into `Q`.
pub fn haar_unitary_with(dim: usize, rng: &mut Rng) -> CMatrix {
    let qr = ginibre(dim, dim, rng).qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    q
}

pub fn haar_unitary(dim: usize, seed: u64) -> CMatrix {
    haar_unitary_with(dim, &mut rng(seed))
}

/// Haar-distributed real orthogonal matrix.
pub fn random_orthogonal_with(dim: usize, rng: &mut Rng) -> DMatrix<f64> {
    let g = DMatrix::<f64>::from_fn(dim, dim, |_, _| StandardNormal.sample(rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        if r[(j, j)] < 0.0 {
            let mut col = q.column_mut(j);
            col *= -1.0;
        }
    }
    q
}

/// Ginibre density `G G† / tr(G G†)` with `G` of shape `dim × rank`.
pub fn random_density_matrix_with(dim: usize, rank: usize, rng: &mut Rng) -> Result<CMatrix> {
    if rank == 0 || rank > dim {
        return Err(invalid(format!("rank {rank} must be in 1..={dim}")));
    }
    let g = ginibre(dim, rank, rng);
    let rho = &g * g.adjoint();
    let tr = rho.trace().re;
    Ok(rho.unscale(tr))
}

/// Random Hermitian `(G + G†)/2`.
pub fn random_hermitian_with(dim: usize, rng: &mut Rng) -> CMatrix {
    let g = ginibre(dim, dim, rng);
    (&g + g.adjoint()).scale(0.5)
}

pub fn random_hermitian(dim: usize, seed: u64) -> CMatrix {
    random_hermitian_with(dim, &mut rng(seed))
}

/// Kraus operators of a random channel from a Haar isometry `C^d → C^d ⊗ C^k`.
pub fn random_kraus_with(dim: usize, count: usize, rng: &mut Rng) -> Vec<CMatrix> {
    let u = haar_unitary_with(dim * count, rng);
    (0..count)
        .map(|k| u.view((k * dim, 0), (dim, dim)).into_owned())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eigh, unitarity_residual};

    #[test]
    fn haar_unitaries_are_unitary_and_seeded() {
        for d in 1..6 {
            assert!(unitarity_residual(&haar_unitary(d, d as u64)) <= 1e-12);
        }
        assert_eq!(haar_unitary(3, 5), haar_unitary(3, 5));
        assert_ne!(haar_unitary(3, 5), haar_unitary(3, 6));
    }

    #[test]
    fn orthogonal_matrices() {
        let q = random_orthogonal_with(5, &mut rng(1));
        assert!((q.transpose() * &q - DMatrix::identity(5, 5)).norm() <= 1e-12);
    }

    #[test]
    fn densities_have_requested_rank() {
        let m = random_density_matrix_with(4, 2, &mut rng(3)).unwrap();
        assert!((m.trace().re - 1.0).abs() <= 1e-14);
        let s = eigh(&m).unwrap();
        assert!(s.values[1] > 1e-6 && s.values[2].abs() <= 1e-12);
        assert!(random_density_matrix_with(3, 0, &mut rng(1)).is_err());
        assert!(random_density_matrix_with(3, 4, &mut rng(1)).is_err());
    }

    #[test]
    fn kraus_operators_are_complete() {
        let ks = random_kraus_with(3, 2, &mut rng(8));
        let sum = ks.iter().fold(CMatrix::zeros(3, 3), |acc, k| acc + k.adjoint() * k);
        assert!((sum - CMatrix::identity(3, 3)).norm() <= 1e-12);
    }
}
