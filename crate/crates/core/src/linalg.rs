//! Dense complex linear algebra for small operators.
//!
//! Matrices are `nalgebra` dynamic matrices of `Complex64`. Composite
//! indices follow the usual convention for `H^a ⊗ H^b`: the basis state
//! `|i⟩|r⟩` sits at row `i * N + r`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{invalid, shape, Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Hermiticity tolerance for validated inputs.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Schmidt coefficients at or below this value are dropped.
pub const SCHMIDT_CUTOFF: f64 = 1e-12;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Party {
    A,
    B,
}

/// Builds a matrix from row-major entries.
pub fn from_row_major(rows: usize, cols: usize, entries: &[Complex64]) -> Result<CMatrix> {
    if entries.len() != rows * cols {
        return Err(shape(format!(
            "{} entries for a {rows}x{cols} matrix",
            entries.len()
        )));
    }
    Ok(CMatrix::from_row_slice(rows, cols, entries))
}

pub fn real_diag(values: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_iterator(
        values.len(),
        values.iter().map(|&v| Complex64::new(v, 0.0)),
    ))
}

pub fn basis_vector(dim: usize, index: usize) -> CVector {
    let mut v = CVector::zeros(dim);
    v[index] = ONE;
    v
}

/// `|u⟩⟨v|`
pub fn outer(u: &CVector, v: &CVector) -> CMatrix {
    u * v.adjoint()
}

pub fn projector(v: &CVector) -> CMatrix {
    outer(v, v)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn kron_vec(a: &CVector, b: &CVector) -> CVector {
    a.kronecker(b)
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.trace()
}

/// Frobenius norm of `H - H†`.
pub fn hermiticity_residual(h: &CMatrix) -> f64 {
    (h - h.adjoint()).norm()
}

pub fn hermitian_part(h: &CMatrix) -> CMatrix {
    (h + h.adjoint()).scale(0.5)
}

pub fn check_square(m: &CMatrix, what: &str) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(shape(format!(
            "{what} must be square, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(m.nrows())
}

pub fn check_hermitian(h: &CMatrix) -> Result<()> {
    check_square(h, "Hermitian matrix")?;
    let residual = hermiticity_residual(h);
    if residual > HERMITIAN_TOL * h.norm().max(1.0) {
        return Err(Error::NotHermitian { residual });
    }
    Ok(())
}

/// `‖U†U − 1‖` in Frobenius norm.
pub fn unitarity_residual(u: &CMatrix) -> f64 {
    let n = u.ncols();
    (u.adjoint() * u - CMatrix::identity(n, n)).norm()
}

/// Gram-matrix residual for a set of column vectors.
pub fn orthonormality_residual(vectors: &[CVector]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, u) in vectors.iter().enumerate() {
        for (j, v) in vectors.iter().enumerate() {
            let expected = if i == j { ONE } else { ZERO };
            worst = worst.max((u.dotc(v) - expected).norm());
        }
    }
    worst
}

pub fn columns(m: &CMatrix) -> Vec<CVector> {
    m.column_iter().map(|c| c.into_owned()).collect()
}

/// Trace-orthonormal Hermitian basis built on an orthonormal set `|β_k⟩`:
/// `E_k = |β_k⟩⟨β_k|`, then for each `k < l` the pair
/// `E⁺ = (|β_k⟩⟨β_l| + |β_l⟩⟨β_k|)/√2`, `E⁻ = i(|β_k⟩⟨β_l| − |β_l⟩⟨β_k|)/√2`.
pub fn hermitian_basis_on(vectors: &[CVector]) -> Vec<CMatrix> {
    let n = vectors.len();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut out: Vec<CMatrix> = vectors.iter().map(projector).collect();
    for k in 0..n {
        for l in (k + 1)..n {
            let kl = outer(&vectors[k], &vectors[l]);
            let lk = outer(&vectors[l], &vectors[k]);
            out.push((&kl + &lk).scale(r));
            out.push((kl - lk) * Complex64::new(0.0, r));
        }
    }
    out
}

/// [`hermitian_basis_on`] the computational basis.
pub fn standard_hermitian_basis(dim: usize) -> Vec<CMatrix> {
    let vs: Vec<CVector> = (0..dim).map(|i| basis_vector(dim, i)).collect();
    hermitian_basis_on(&vs)
}

/// Eigendecomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct Spectrum {
    /// Descending.
    pub values: Vec<f64>,
    /// Column `i` is the eigenvector for `values[i]`.
    pub vectors: CMatrix,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, i: usize) -> CVector {
        self.vectors.column(i).into_owned()
    }

    pub fn reconstruct(&self) -> CMatrix {
        &self.vectors * real_diag(&self.values) * self.vectors.adjoint()
    }

    /// `V f(Λ) V†`
    pub fn map(&self, f: impl Fn(f64) -> Complex64) -> CMatrix {
        let n = self.dim();
        let d = CMatrix::from_diagonal(&CVector::from_iterator(n, self.values.iter().map(|&x| f(x))));
        &self.vectors * d * self.vectors.adjoint()
    }

    /// `V† A V`, the matrix of `A` in the eigenbasis.
    pub fn in_eigenbasis(&self, a: &CMatrix) -> CMatrix {
        self.vectors.adjoint() * a * &self.vectors
    }
}

/// Validates Hermiticity, then decomposes `(H + H†)/2`.
pub fn eigh(h: &CMatrix) -> Result<Spectrum> {
    check_hermitian(h)?;
    Ok(eigh_unchecked(h))
}

/// Decomposes the Hermitian part of `h` without validation.
pub(crate) fn eigh_unchecked(h: &CMatrix) -> Spectrum {
    let n = h.nrows();
    let eig = SymmetricEigen::new(hermitian_part(h));
    let mut order: Vec<usize> = (0..n).collect();
    // stable sort keeps the solver's order among exact ties
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Spectrum { values, vectors }
}

/// `exp(i t H)` for Hermitian `H`.
pub fn exp_i_hermitian(h: &CMatrix, t: f64) -> Result<CMatrix> {
    let s = eigh(h)?;
    Ok(s.map(|x| Complex64::from_polar(1.0, t * x)))
}

/// Partial trace of an `(M·N)×(M·N)` operator, keeping one party.
pub fn partial_trace(rho: &CMatrix, dims: (usize, usize), keep: Party) -> Result<CMatrix> {
    let (m, n) = dims;
    if rho.nrows() != m * n || rho.ncols() != m * n {
        return Err(shape(format!(
            "partial trace over dims ({m}, {n}) needs a {0}x{0} matrix, got {1}x{2}",
            m * n,
            rho.nrows(),
            rho.ncols()
        )));
    }
    let out = match keep {
        Party::A => CMatrix::from_fn(m, m, |i, j| (0..n).map(|r| rho[(i * n + r, j * n + r)]).sum()),
        Party::B => CMatrix::from_fn(n, n, |r, s| (0..m).map(|i| rho[(i * n + r, i * n + s)]).sum()),
    };
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct SchmidtDecomposition {
    /// Squared singular values, descending, summing to one.
    pub coefficients: Vec<f64>,
    pub a_vectors: Vec<CVector>,
    pub b_vectors: Vec<CVector>,
}

impl SchmidtDecomposition {
    pub fn rank(&self) -> usize {
        self.coefficients.len()
    }

    /// `Σ √sᵢ |αᵢ⟩⊗|βᵢ⟩`
    pub fn reconstruct(&self) -> CVector {
        let dim = self.a_vectors[0].len() * self.b_vectors[0].len();
        let mut psi = CVector::zeros(dim);
        for ((s, a), b) in self.coefficients.iter().zip(&self.a_vectors).zip(&self.b_vectors) {
            psi += kron_vec(a, b).scale(s.sqrt());
        }
        psi
    }

    /// `Σ sᵢ²`
    pub fn coefficient_square_sum(&self) -> f64 {
        self.coefficients.iter().map(|s| s * s).sum()
    }
}

/// Reshapes a vector on `H^a ⊗ H^b` into its `M×N` amplitude matrix.
pub fn amplitude_matrix(psi: &CVector, dims: (usize, usize)) -> Result<CMatrix> {
    let (m, n) = dims;
    if psi.len() != m * n {
        return Err(shape(format!(
            "vector of length {} does not live on dims ({m}, {n})",
            psi.len()
        )));
    }
    Ok(CMatrix::from_fn(m, n, |i, r| psi[i * n + r]))
}

pub fn schmidt(psi: &CVector, dims: (usize, usize)) -> Result<SchmidtDecomposition> {
    let amp = amplitude_matrix(psi, dims)?;
    let norm = psi.norm();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized { norm });
    }
    let svd = amp.svd(true, true);
    let u = svd.u.ok_or_else(|| invalid("SVD did not return left vectors"))?;
    let v_t = svd.v_t.ok_or_else(|| invalid("SVD did not return right vectors"))?;
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));

    let mut coefficients = Vec::new();
    let mut a_vectors = Vec::new();
    let mut b_vectors = Vec::new();
    for k in order {
        let s = svd.singular_values[k] * svd.singular_values[k];
        if s <= SCHMIDT_CUTOFF {
            continue;
        }
        coefficients.push(s);
        a_vectors.push(u.column(k).into_owned());
        // amp = Σ σ u_k v_k†, so the b-factor is the k-th row of V†
        b_vectors.push(v_t.row(k).transpose());
    }
    let total: f64 = coefficients.iter().sum();
    for s in &mut coefficients {
        *s /= total;
    }
    Ok(SchmidtDecomposition {
        coefficients,
        a_vectors,
        b_vectors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sigma_z() -> CMatrix {
        real_diag(&[1.0, -1.0])
    }

    fn bell() -> CVector {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        CVector::from_vec(vec![c(h, 0.0), ZERO, ZERO, c(h, 0.0)])
    }

    #[test]
    fn kron_identity_and_projector() {
        let i2 = CMatrix::identity(2, 2);
        assert_eq!(kron(&i2, &i2), CMatrix::identity(4, 4));
        let p = real_diag(&[1.0, 0.0]);
        assert_eq!(kron(&p, &i2), real_diag(&[1.0, 1.0, 0.0, 0.0]));
    }

    #[test]
    fn kron_matches_index_loop() {
        let a = CMatrix::from_fn(2, 2, |i, j| c(i as f64 + 0.5, j as f64 - 1.0));
        let b = CMatrix::from_fn(3, 3, |r, t| c((r * t) as f64, 0.25 * r as f64 - t as f64));
        let k = kron(&a, &b);
        for i in 0..2 {
            for j in 0..2 {
                for r in 0..3 {
                    for t in 0..3 {
                        assert_eq!(k[(i * 3 + r, j * 3 + t)], a[(i, j)] * b[(r, t)]);
                    }
                }
            }
        }
    }

    #[test]
    fn bell_marginal_is_maximally_mixed() {
        let rho = projector(&bell());
        let ra = partial_trace(&rho, (2, 2), Party::A).unwrap();
        assert_abs_diff_eq!((ra - real_diag(&[0.5, 0.5])).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn partial_trace_rejects_bad_shape() {
        let rho = CMatrix::identity(5, 5);
        assert!(matches!(partial_trace(&rho, (2, 2), Party::A), Err(Error::Shape(_))));
    }

    #[test]
    fn eigh_pauli_and_identity() {
        let s = eigh(&CMatrix::identity(2, 2)).unwrap();
        assert_eq!(s.values, vec![1.0, 1.0]);
        let s = eigh(&sigma_z()).unwrap();
        assert_abs_diff_eq!(s.values[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.values[1], -1.0, epsilon = 1e-15);
    }

    #[test]
    fn eigh_rejects_non_hermitian() {
        let m = CMatrix::from_row_slice(2, 2, &[ONE, ONE, ZERO, ONE]);
        assert!(matches!(eigh(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn exp_diagonal_phase() {
        let a = real_diag(&[std::f64::consts::PI, 0.0]);
        let u = exp_i_hermitian(&a, 1.0).unwrap();
        assert_abs_diff_eq!((u - real_diag(&[-1.0, 1.0])).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn schmidt_bell_and_product() {
        let s = schmidt(&bell(), (2, 2)).unwrap();
        assert_eq!(s.rank(), 2);
        assert_abs_diff_eq!(s.coefficients[0], 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(s.coefficients[1], 0.5, epsilon = 1e-14);

        let prod = kron_vec(&basis_vector(2, 0), &basis_vector(2, 0));
        let s = schmidt(&prod, (2, 2)).unwrap();
        assert_eq!(s.coefficients, vec![1.0]);
        assert_abs_diff_eq!((s.reconstruct() - prod).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn schmidt_rejects_unnormalized() {
        let v = CVector::from_element(4, ONE);
        assert!(matches!(schmidt(&v, (2, 2)), Err(Error::NotNormalized { .. })));
    }
}
