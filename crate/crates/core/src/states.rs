//! Density matrices, bipartite states, and the state families used throughout
//! the crate: pure Schmidt states, CQ/CC states, the commuting-projector
//! counterexample, Werner states, random ensembles, and channels on party b.

use num_complex::Complex64;

use crate::error::{invalid, shape, Error, Result};
use crate::linalg::{
    self, basis_vector, check_hermitian, eigh_unchecked, kron, kron_vec, orthonormality_residual,
    partial_trace, projector, CMatrix, CVector, Party, Spectrum, ZERO,
};
use crate::random;

pub const TRACE_TOL: f64 = 1e-10;
pub const POSITIVITY_TOL: f64 = 1e-10;
pub const PURITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Checks Hermiticity, unit trace and positivity (in that order) and
    /// stores the Hermitian part.
    pub fn new(m: CMatrix) -> Result<Self> {
        check_hermitian(&m)?;
        let m = linalg::hermitian_part(&m);
        let trace = m.trace().re;
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(Error::Trace { trace });
        }
        let min_eigenvalue = eigh_unchecked(&m).values.last().copied().unwrap_or(0.0);
        if min_eigenvalue < -POSITIVITY_TOL {
            return Err(Error::NotPositive { min_eigenvalue });
        }
        Ok(Self { matrix: m })
    }

    pub fn from_pure(psi: &CVector) -> Result<Self> {
        let norm = psi.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self {
            matrix: linalg::hermitian_part(&projector(psi)),
        })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: CMatrix::identity(dim, dim).unscale(dim as f64),
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn spectrum(&self) -> Spectrum {
        eigh_unchecked(&self.matrix)
    }

    /// `tr ρ²`
    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn is_pure(&self) -> bool {
        (self.purity() - 1.0).abs() <= PURITY_TOL
    }

    /// Dominant eigenvector, meaningful when the state is pure.
    pub fn principal_vector(&self) -> CVector {
        self.spectrum().vector(0)
    }

    /// `U ρ U†`
    pub fn conjugate(&self, u: &CMatrix) -> Result<Self> {
        if u.nrows() != self.dim() || u.ncols() != self.dim() {
            return Err(shape("unitary does not match the state dimension"));
        }
        Self::new(u * &self.matrix * u.adjoint())
    }

    /// `(1 − p) ρ + p 1/d`
    pub fn mix_white_noise(&self, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(invalid(format!("noise fraction {p} outside [0, 1]")));
        }
        let d = self.dim();
        let m = self.matrix.scale(1.0 - p) + CMatrix::identity(d, d).scale(p / d as f64);
        Self::new(m)
    }

    /// Convex combination `Σ λₙ ρₙ`.
    pub fn mixture(weights: &[f64], states: &[DensityMatrix]) -> Result<Self> {
        if weights.len() != states.len() || states.is_empty() {
            return Err(invalid("mixture needs one weight per state"));
        }
        let d = states[0].dim();
        let mut m = CMatrix::zeros(d, d);
        for (w, s) in weights.iter().zip(states) {
            if s.dim() != d {
                return Err(shape("mixture components differ in dimension"));
            }
            m += s.matrix.scale(*w);
        }
        Self::new(m)
    }
}

/// A density matrix on `H^a ⊗ H^b` with `dim H^a = M`, `dim H^b = N`.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteState {
    state: DensityMatrix,
    dims: (usize, usize),
}

impl BipartiteState {
    pub fn new(state: DensityMatrix, dims: (usize, usize)) -> Result<Self> {
        if dims.0 == 0 || dims.1 == 0 || dims.0 * dims.1 != state.dim() {
            return Err(shape(format!(
                "dims ({}, {}) do not factor a {}-dimensional state",
                dims.0,
                dims.1,
                state.dim()
            )));
        }
        Ok(Self { state, dims })
    }

    pub fn from_matrix(m: CMatrix, dims: (usize, usize)) -> Result<Self> {
        Self::new(DensityMatrix::new(m)?, dims)
    }

    pub fn from_pure(psi: &CVector, dims: (usize, usize)) -> Result<Self> {
        Self::new(DensityMatrix::from_pure(psi)?, dims)
    }

    pub fn product(rho_a: &DensityMatrix, rho_b: &DensityMatrix) -> Self {
        Self {
            state: DensityMatrix {
                matrix: kron(rho_a.matrix(), rho_b.matrix()),
            },
            dims: (rho_a.dim(), rho_b.dim()),
        }
    }

    pub fn density(&self) -> &DensityMatrix {
        &self.state
    }

    pub fn matrix(&self) -> &CMatrix {
        self.state.matrix()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn dim_a(&self) -> usize {
        self.dims.0
    }

    pub fn dim_b(&self) -> usize {
        self.dims.1
    }

    pub fn reduced(&self, keep: Party) -> DensityMatrix {
        let m = partial_trace(self.matrix(), self.dims, keep).expect("dims validated at construction");
        DensityMatrix {
            matrix: linalg::hermitian_part(&m),
        }
    }

    pub fn is_pure(&self) -> bool {
        self.state.is_pure()
    }

    /// `(U ⊗ V) ρ (U ⊗ V)†`
    pub fn local_unitary(&self, u: &CMatrix, v: &CMatrix) -> Result<Self> {
        if u.nrows() != self.dims.0 || v.nrows() != self.dims.1 {
            return Err(shape("local unitaries do not match the party dimensions"));
        }
        Self::new(self.state.conjugate(&kron(u, v))?, self.dims)
    }

    pub fn mix_white_noise(&self, p: f64) -> Result<Self> {
        Self::new(self.state.mix_white_noise(p)?, self.dims)
    }
}

/// Trace-preserving completely positive map given by Kraus operators.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    operators: Vec<CMatrix>,
}

impl KrausChannel {
    pub fn new(operators: Vec<CMatrix>) -> Result<Self> {
        let first = operators.first().ok_or_else(|| invalid("channel has no Kraus operators"))?;
        let d = first.ncols();
        let mut sum = CMatrix::zeros(d, d);
        for k in &operators {
            if k.nrows() != d || k.ncols() != d {
                return Err(shape("Kraus operators must share one square shape"));
            }
            sum += k.adjoint() * k;
        }
        let residual = (sum - CMatrix::identity(d, d)).norm();
        if residual > 1e-10 {
            return Err(invalid(format!(
                "channel is not trace preserving (‖Σ K†K − 1‖ = {residual:.3e})"
            )));
        }
        Ok(Self { operators })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            operators: vec![CMatrix::identity(dim, dim)],
        }
    }

    /// `ρ ↦ (1 − p) ρ + p tr(ρ) 1/d`, with Kraus operators
    /// `√(1−p) 1` and `√(p/d) |i⟩⟨j|`.
    pub fn depolarizing(dim: usize, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(invalid(format!("depolarizing strength {p} outside [0, 1]")));
        }
        let mut ops = Vec::with_capacity(dim * dim + 1);
        if p < 1.0 {
            ops.push(CMatrix::identity(dim, dim).scale((1.0 - p).sqrt()));
        }
        let w = Complex64::new((p / dim as f64).sqrt(), 0.0);
        if p > 0.0 {
            for i in 0..dim {
                for j in 0..dim {
                    let mut k = CMatrix::zeros(dim, dim);
                    k[(i, j)] = w;
                    ops.push(k);
                }
            }
        }
        Self::new(ops)
    }

    pub fn random(dim: usize, kraus_count: usize, seed: u64) -> Result<Self> {
        if kraus_count == 0 {
            return Err(invalid("channel needs at least one Kraus operator"));
        }
        Self::new(random::random_kraus_with(dim, kraus_count, &mut random::rng(seed)))
    }

    pub fn operators(&self) -> &[CMatrix] {
        &self.operators
    }

    pub fn dim(&self) -> usize {
        self.operators[0].nrows()
    }
}

/// `Σ_k (1 ⊗ K_k) ρ (1 ⊗ K_k)†`
pub fn apply_channel_b(rho: &BipartiteState, channel: &KrausChannel) -> Result<BipartiteState> {
    if channel.dim() != rho.dim_b() {
        return Err(shape(format!(
            "channel acts on dimension {}, party b has dimension {}",
            channel.dim(),
            rho.dim_b()
        )));
    }
    let id_a = CMatrix::identity(rho.dim_a(), rho.dim_a());
    let d = rho.density().dim();
    let mut out = CMatrix::zeros(d, d);
    for k in channel.operators() {
        let lifted = kron(&id_a, k);
        out += &lifted * rho.matrix() * lifted.adjoint();
    }
    BipartiteState::from_matrix(out, rho.dims())
}

fn standard_basis(dim: usize) -> Vec<CVector> {
    (0..dim).map(|i| basis_vector(dim, i)).collect()
}

fn check_orthonormal(vectors: &[CVector], dim: usize, what: &str) -> Result<()> {
    if vectors.iter().any(|v| v.len() != dim) {
        return Err(shape(format!("{what} vectors must have length {dim}")));
    }
    let residual = orthonormality_residual(vectors);
    if residual > 1e-10 {
        return Err(invalid(format!(
            "{what} is not orthonormal (Gram residual {residual:.3e})"
        )));
    }
    Ok(())
}

fn check_distribution(p: &[f64], what: &str) -> Result<()> {
    if p.iter().any(|x| !x.is_finite() || *x < 0.0) {
        return Err(invalid(format!("{what} must be finite and nonnegative")));
    }
    let sum: f64 = p.iter().sum();
    if (sum - 1.0).abs() > 1e-10 {
        return Err(invalid(format!("{what} sum to {sum}, expected 1")));
    }
    Ok(())
}

/// `Σ √sᵢ |αᵢ⟩⊗|βᵢ⟩` with computational bases by default.
pub fn pure_from_schmidt(
    coeffs: &[f64],
    dims: (usize, usize),
    a_basis: Option<&[CVector]>,
    b_basis: Option<&[CVector]>,
) -> Result<BipartiteState> {
    let (m, n) = dims;
    if coeffs.is_empty() || coeffs.len() > m.min(n) {
        return Err(invalid(format!(
            "{} Schmidt coefficients do not fit dims ({m}, {n})",
            coeffs.len()
        )));
    }
    check_distribution(coeffs, "Schmidt coefficients")?;
    let a_default = standard_basis(m);
    let b_default = standard_basis(n);
    let a = a_basis.unwrap_or(&a_default);
    let b = b_basis.unwrap_or(&b_default);
    if a.len() < coeffs.len() || b.len() < coeffs.len() {
        return Err(invalid("fewer basis vectors than Schmidt coefficients"));
    }
    check_orthonormal(a, m, "party-a basis")?;
    check_orthonormal(b, n, "party-b basis")?;
    let mut psi = CVector::zeros(m * n);
    for (i, s) in coeffs.iter().enumerate() {
        psi += kron_vec(&a[i], &b[i]).scale(s.sqrt());
    }
    let norm = psi.norm();
    BipartiteState::from_pure(&psi.unscale(norm), dims)
}

/// `Σᵢ pᵢ |αᵢ⟩⟨αᵢ| ⊗ σᵢ` with pairwise orthonormal `|αᵢ⟩`.
pub fn make_cq(probs: &[f64], a_basis: &[CVector], sigmas: &[DensityMatrix]) -> Result<BipartiteState> {
    if probs.is_empty() || probs.len() != a_basis.len() || probs.len() != sigmas.len() {
        return Err(invalid("CQ state needs one basis vector and one state per probability"));
    }
    check_distribution(probs, "CQ probabilities")?;
    let m = a_basis[0].len();
    check_orthonormal(a_basis, m, "CQ party-a basis")?;
    let n = sigmas[0].dim();
    let mut rho = CMatrix::zeros(m * n, m * n);
    for ((p, alpha), sigma) in probs.iter().zip(a_basis).zip(sigmas) {
        if sigma.dim() != n {
            return Err(shape("CQ conditional states differ in dimension"));
        }
        rho += kron(&projector(alpha), sigma.matrix()).scale(*p);
    }
    BipartiteState::from_matrix(rho, (m, n))
}

/// CQ state whose conditional states are the pure, pairwise-orthogonal `|βᵢ⟩`.
pub fn make_cc(probs: &[f64], a_basis: &[CVector], b_basis: &[CVector]) -> Result<BipartiteState> {
    let n = b_basis.first().map(|v| v.len()).unwrap_or(0);
    check_orthonormal(b_basis, n, "CC party-b basis")?;
    let sigmas = b_basis
        .iter()
        .map(DensityMatrix::from_pure)
        .collect::<Result<Vec<_>>>()?;
    make_cq(probs, a_basis, &sigmas)
}

/// Parameters of the mixed state with a commuting local projector that is
/// nevertheless not classical on party a.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Example1Params {
    pub a: (f64, f64),
    pub b: (f64, f64),
    pub probs: (f64, f64, f64),
}

impl Default for Example1Params {
    fn default() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self {
            a: (h, h),
            b: (1.0, 0.0),
            probs: (1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0),
        }
    }
}

/// `Σᵢ pᵢ |ψᵢ⟩⟨ψᵢ|` with `|ψ₀⟩ = |φ₀⟩|β₀⟩`, `|ψ₁⟩ = (a₁|φ₁⟩ + a₂|φ₂⟩)|β₁⟩`,
/// `|ψ₂⟩ = (b₁|φ₁⟩ + b₂|φ₂⟩)|β₂⟩`.
///
/// `|φₙ⟩` is the computational basis of party a; `|β₀⟩ = |β₁⟩ = |0⟩` and
/// `|β₂⟩ = |1⟩` on party b. The vectors `a` and `b` must be neither
/// orthogonal nor parallel: in either case the state is classical on party a.
pub fn make_example1(params: Example1Params, dims: (usize, usize)) -> Result<BipartiteState> {
    let (m, n) = dims;
    if m < 3 || n < 2 {
        return Err(invalid(format!("example state needs M ≥ 3 and N ≥ 2, got ({m}, {n})")));
    }
    let (a1, a2) = params.a;
    let (b1, b2) = params.b;
    for (name, (x, y)) in [("a", params.a), ("b", params.b)] {
        let norm = (x * x + y * y).sqrt();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(invalid(format!("vector {name} has norm {norm}, expected 1")));
        }
    }
    let overlap = a1 * b1 + a2 * b2;
    if overlap.abs() <= 1e-12 {
        return Err(invalid("a₁b₁ + a₂b₂ must be nonzero"));
    }
    if (overlap.abs() - 1.0).abs() <= 1e-12 {
        return Err(invalid("a and b must not be parallel (the state would be CQ)"));
    }
    let (p0, p1, p2) = params.probs;
    check_distribution(&[p0, p1, p2], "example probabilities")?;

    let phi = |k: usize| basis_vector(m, k);
    let beta = |k: usize| basis_vector(n, k);
    let c = |x: f64| Complex64::new(x, 0.0);
    let psi0 = kron_vec(&phi(0), &beta(0));
    let psi1 = kron_vec(&(phi(1) * c(a1) + phi(2) * c(a2)), &beta(0));
    let psi2 = kron_vec(&(phi(1) * c(b1) + phi(2) * c(b2)), &beta(1));
    let rho = projector(&psi0).scale(p0) + projector(&psi1).scale(p1) + projector(&psi2).scale(p2);
    BipartiteState::from_matrix(rho, dims)
}

/// `Σᵢ |i⟩|i⟩ / √M`
pub fn max_entangled(m: usize) -> Result<BipartiteState> {
    if m < 2 {
        return Err(invalid(format!("maximally entangled state needs M ≥ 2, got {m}")));
    }
    pure_from_schmidt(&vec![1.0 / m as f64; m], (m, m), None, None)
}

/// Two-qubit Werner state `w |Ψ⁻⟩⟨Ψ⁻| + (1 − w) 1/4`.
pub fn werner(w: f64) -> Result<BipartiteState> {
    if !(0.0..=1.0).contains(&w) {
        return Err(invalid(format!("Werner weight {w} outside [0, 1]")));
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let singlet = CVector::from_vec(vec![ZERO, Complex64::new(h, 0.0), Complex64::new(-h, 0.0), ZERO]);
    let rho = projector(&singlet).scale(w) + CMatrix::identity(4, 4).scale((1.0 - w) / 4.0);
    BipartiteState::from_matrix(rho, (2, 2))
}

pub fn random_density(dim: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    let m = random::random_density_matrix_with(dim, rank, &mut random::rng(seed))?;
    DensityMatrix::new(m)
}

pub fn random_bipartite(dims: (usize, usize), rank: usize, seed: u64) -> Result<BipartiteState> {
    BipartiteState::new(random_density(dims.0 * dims.1, rank, seed)?, dims)
}

pub fn random_pure(dims: (usize, usize), seed: u64) -> Result<BipartiteState> {
    let psi = random::unit_vector(dims.0 * dims.1, &mut random::rng(seed));
    BipartiteState::from_pure(&psi, dims)
}

/// Random CQ state: Haar basis on a, Ginibre conditional states on b.
pub fn random_cq(dims: (usize, usize), seed: u64) -> Result<BipartiteState> {
    let (m, n) = dims;
    let mut rng = random::rng(seed);
    let u = random::haar_unitary_with(m, &mut rng);
    let weights: Vec<f64> = (0..m).map(|_| random::complex_gaussian(&mut rng).norm_sqr() + 0.05).collect();
    let total: f64 = weights.iter().sum();
    let probs: Vec<f64> = weights.iter().map(|w| w / total).collect();
    let sigmas = (0..m)
        .map(|_| DensityMatrix::new(random::random_density_matrix_with(n, n, &mut rng)?))
        .collect::<Result<Vec<_>>>()?;
    make_cq(&probs, &linalg::columns(&u), &sigmas)
}

/// Random CC state: Haar bases on both parties, `min(M, N)` terms.
pub fn random_cc(dims: (usize, usize), seed: u64) -> Result<BipartiteState> {
    let (m, n) = dims;
    let k = m.min(n);
    let mut rng = random::rng(seed);
    let ua = random::haar_unitary_with(m, &mut rng);
    let ub = random::haar_unitary_with(n, &mut rng);
    let weights: Vec<f64> = (0..k).map(|_| random::complex_gaussian(&mut rng).norm_sqr() + 0.05).collect();
    let total: f64 = weights.iter().sum();
    let probs: Vec<f64> = weights.iter().map(|w| w / total).collect();
    let a: Vec<CVector> = linalg::columns(&ua).into_iter().take(k).collect();
    let b: Vec<CVector> = linalg::columns(&ub).into_iter().take(k).collect();
    make_cc(&probs, &a, &b)
}
