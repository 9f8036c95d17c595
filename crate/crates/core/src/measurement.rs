use num_complex::Complex64;

use crate::error::{invalid, shape, Result};
use crate::linalg::{self, basis_vector, kron, projector, CMatrix, CVector};
use crate::states::BipartiteState;

/// Rank-one projective measurement `{|n⟩⟨n|}` on party a, stored as the
/// orthonormal basis `|n⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct VonNeumannMeasurement {
    vectors: Vec<CVector>,
}

impl VonNeumannMeasurement {
    pub fn new(vectors: Vec<CVector>) -> Result<Self> {
        let d = vectors.len();
        if d == 0 {
            return Err(invalid("measurement has no outcomes"));
        }
        if vectors.iter().any(|v| v.len() != d) {
            return Err(shape("a complete measurement needs dim-many vectors of length dim"));
        }
        let residual = linalg::orthonormality_residual(&vectors);
        if residual > 1e-10 {
            return Err(invalid(format!(
                "measurement basis is not orthonormal (Gram residual {residual:.3e})"
            )));
        }
        Ok(Self { vectors })
    }

    /// Projectors onto the columns of a unitary.
    pub fn from_unitary(u: &CMatrix) -> Result<Self> {
        Self::new(linalg::columns(u))
    }

    pub(crate) fn from_unitary_unchecked(u: &CMatrix) -> Self {
        Self {
            vectors: linalg::columns(u),
        }
    }

    /// Qubit measurement along the Bloch direction `(θ, φ)`.
    pub fn qubit(theta: f64, phi: f64) -> Self {
        let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        let e = Complex64::from_polar(1.0, phi);
        let up = CVector::from_vec(vec![Complex64::new(c, 0.0), e * s]);
        let down = CVector::from_vec(vec![Complex64::new(-s, 0.0), e * c]);
        Self {
            vectors: vec![up, down],
        }
    }

    pub fn computational(dim: usize) -> Self {
        Self {
            vectors: (0..dim).map(|i| basis_vector(dim, i)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[CVector] {
        &self.vectors
    }

    pub fn projectors(&self) -> Vec<CMatrix> {
        self.vectors.iter().map(projector).collect()
    }

    pub fn unitary(&self) -> CMatrix {
        CMatrix::from_columns(&self.vectors)
    }
}

/// `Φ_Π(ρ) = Σₙ (Πₙ ⊗ 1) ρ (Πₙ ⊗ 1)`
pub fn dephase_a(rho: &BipartiteState, pi: &VonNeumannMeasurement) -> Result<BipartiteState> {
    if pi.dim() != rho.dim_a() {
        return Err(shape(format!(
            "measurement has {} outcomes, party a has dimension {}",
            pi.dim(),
            rho.dim_a()
        )));
    }
    let id_b = CMatrix::identity(rho.dim_b(), rho.dim_b());
    let d = rho.density().dim();
    let mut out = CMatrix::zeros(d, d);
    for p in pi.projectors() {
        let lifted = kron(&p, &id_b);
        out += &lifted * rho.matrix() * &lifted;
    }
    BipartiteState::from_matrix(out, rho.dims())
}
