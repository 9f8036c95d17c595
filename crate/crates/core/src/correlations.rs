//! Local quantum Fisher information and the two QFI-based correlation
//! quantifiers.
//!
//! * `Q_{a,H}(ρ)`: minimum over orthonormal bases `{|φₙ⟩}` of party a of
//!   `Σₙ F(ρ, |φₙ⟩⟨φₙ| ⊗ 1)`.
//! * `Q_{a,Π}(ρ)`: total local QFI on party b, `Σ_μ F(ρ, 1 ⊗ H_μ)` over an
//!   orthonormal observable basis, minus its largest value achievable by a
//!   von Neumann measurement on a followed by conditional measurements on b.
//!
//! Both vanish exactly on states that are classical on party a and equal
//! `1 − Σ sᵢ²` on pure states with Schmidt coefficients `sᵢ`.

use nalgebra::DMatrix;

use crate::error::{invalid, shape, Error, Result};
use crate::fisher::{self, qfi_in_eigenbasis, Observable};
use crate::linalg::{self, eigh_unchecked, kron, CMatrix, CVector, Spectrum};
use crate::measurement::VonNeumannMeasurement;
use crate::optimizer::{optimize, Direction, OptimizerConfig, OptimizerReport};
use crate::states::{BipartiteState, DensityMatrix};

/// Outcomes with probability at or below this are dropped from ensembles.
pub const OUTCOME_CUTOFF: f64 = 1e-12;

/// `h ⊗ 1_N`
pub fn lift_a(h: &Observable, n: usize) -> Observable {
    Observable::from_hermitian(kron(h.matrix(), &CMatrix::identity(n, n)))
}

/// `1_M ⊗ h`
pub fn lift_b(h: &Observable, m: usize) -> Observable {
    Observable::from_hermitian(kron(&CMatrix::identity(m, m), h.matrix()))
}

/// `N²` Hermitian operators with `tr(H_μ H_ν) = δ_μν`.
#[derive(Debug, Clone)]
pub struct ObservableBasis {
    observables: Vec<Observable>,
}

impl ObservableBasis {
    pub fn new(observables: Vec<Observable>) -> Result<Self> {
        let n = observables
            .first()
            .ok_or_else(|| invalid("observable basis is empty"))?
            .dim();
        if observables.len() != n * n || observables.iter().any(|h| h.dim() != n) {
            return Err(shape(format!(
                "an observable basis on dimension {n} needs {} operators of that size",
                n * n
            )));
        }
        let mut residual: f64 = 0.0;
        for (i, a) in observables.iter().enumerate() {
            for (j, b) in observables.iter().enumerate() {
                let g = (a.matrix() * b.matrix()).trace();
                let expected = if i == j { 1.0 } else { 0.0 };
                residual = residual.max((g.re - expected).abs().max(g.im.abs()));
            }
        }
        if residual > 1e-10 {
            return Err(invalid(format!(
                "observables are not trace-orthonormal (residual {residual:.3e})"
            )));
        }
        Ok(Self { observables })
    }

    /// `{E_k, E⁺_{k,l}, E⁻_{k,l}}` on an orthonormal basis `|β_k⟩` of `H^b`.
    pub fn canonical(vectors: &[CVector]) -> Result<Self> {
        let n = vectors.len();
        if n == 0 || vectors.iter().any(|v| v.len() != n) {
            return Err(shape("canonical observable basis needs a complete set of vectors"));
        }
        let residual = linalg::orthonormality_residual(vectors);
        if residual > 1e-10 {
            return Err(invalid(format!(
                "basis vectors are not orthonormal (Gram residual {residual:.3e})"
            )));
        }
        Ok(Self {
            observables: linalg::hermitian_basis_on(vectors)
                .into_iter()
                .map(Observable::from_hermitian)
                .collect(),
        })
    }

    /// Canonical basis on the computational basis.
    pub fn standard(n: usize) -> Self {
        Self {
            observables: linalg::standard_hermitian_basis(n)
                .into_iter()
                .map(Observable::from_hermitian)
                .collect(),
        }
    }

    /// `H'_ν = Σ_μ c_νμ H_μ` for a real orthogonal `c`.
    pub fn rotated(&self, c: &DMatrix<f64>) -> Result<Self> {
        let k = self.observables.len();
        if c.nrows() != k || c.ncols() != k {
            return Err(shape(format!("mixing matrix must be {k}x{k}")));
        }
        let n = self.dim();
        let mixed = (0..k)
            .map(|nu| {
                let mut m = CMatrix::zeros(n, n);
                for (mu, h) in self.observables.iter().enumerate() {
                    m += h.matrix().scale(c[(nu, mu)]);
                }
                Observable::from_hermitian(m)
            })
            .collect();
        Self::new(mixed)
    }

    pub fn observables(&self) -> &[Observable] {
        &self.observables
    }

    pub fn dim(&self) -> usize {
        self.observables[0].dim()
    }

    pub fn len(&self) -> usize {
        self.observables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observables.is_empty()
    }
}

fn check_basis_b(rho: &BipartiteState, basis: &ObservableBasis) -> Result<()> {
    if basis.dim() != rho.dim_b() {
        return Err(shape(format!(
            "observable basis acts on dimension {}, party b has dimension {}",
            basis.dim(),
            rho.dim_b()
        )));
    }
    Ok(())
}

fn check_measurement_a(rho: &BipartiteState, pi: &VonNeumannMeasurement) -> Result<()> {
    if pi.dim() != rho.dim_a() {
        return Err(shape(format!(
            "measurement has {} outcomes, party a has dimension {}",
            pi.dim(),
            rho.dim_a()
        )));
    }
    Ok(())
}

/// `Σ_μ F(ρ, 1 ⊗ H_μ)`
pub fn total_local_qfi_b(rho: &BipartiteState, basis: &ObservableBasis) -> Result<f64> {
    check_basis_b(rho, basis)?;
    let spectrum = rho.density().spectrum();
    Ok(basis
        .observables()
        .iter()
        .map(|h| {
            let lifted = lift_b(h, rho.dim_a());
            qfi_in_eigenbasis(&spectrum, &spectrum.in_eigenbasis(lifted.matrix()))
        })
        .sum())
}

#[derive(Debug, Clone)]
pub struct ConditionalEntry {
    pub outcome: usize,
    pub probability: f64,
    pub state: DensityMatrix,
}

/// States of party b conditioned on the outcomes of a measurement on a.
#[derive(Debug, Clone)]
pub struct ConditionalEnsemble {
    pub entries: Vec<ConditionalEntry>,
    /// Total probability of outcomes dropped below the cutoff.
    pub dropped_probability: f64,
}

impl ConditionalEnsemble {
    /// `Σₙ p(n) ρ^{b|n}`
    pub fn average(&self) -> CMatrix {
        let n = self.entries.first().map(|e| e.state.dim()).unwrap_or(0);
        self.entries
            .iter()
            .fold(CMatrix::zeros(n, n), |acc, e| acc + e.state.matrix().scale(e.probability))
    }
}

/// `(⟨n| ⊗ 1) ρ (|n⟩ ⊗ 1)`, the unnormalized conditional state.
pub(crate) fn conditional_block(rho: &BipartiteState, n_vec: &CVector) -> CMatrix {
    let (m, n) = rho.dims();
    let r = rho.matrix();
    CMatrix::from_fn(n, n, |s, t| {
        let mut acc = linalg::ZERO;
        for i in 0..m {
            let ci = n_vec[i].conj();
            if ci == linalg::ZERO {
                continue;
            }
            for j in 0..m {
                acc += ci * n_vec[j] * r[(i * n + s, j * n + t)];
            }
        }
        acc
    })
}

/// `ρ^{b|n} = tr_a((Πₙ ⊗ 1) ρ) / p(n)` with `p(n) = tr((Πₙ ⊗ 1) ρ)`.
pub fn conditional_states(
    rho: &BipartiteState,
    pi: &VonNeumannMeasurement,
) -> Result<ConditionalEnsemble> {
    check_measurement_a(rho, pi)?;
    let mut entries = Vec::with_capacity(pi.dim());
    let mut dropped = 0.0;
    for (outcome, v) in pi.vectors().iter().enumerate() {
        let block = conditional_block(rho, v);
        let p = block.trace().re;
        if p <= OUTCOME_CUTOFF {
            dropped += p.max(0.0);
            continue;
        }
        // near the cutoff roundoff can exceed the validation tolerances
        let state = DensityMatrix::new(block.unscale(p))
            .or_else(|_| DensityMatrix::new(project_to_density(&block.unscale(p))))?;
        entries.push(ConditionalEntry {
            outcome,
            probability: p,
            state,
        });
    }
    Ok(ConditionalEnsemble {
        entries,
        dropped_probability: dropped,
    })
}

/// Clips negative eigenvalues and renormalizes.
fn project_to_density(m: &CMatrix) -> CMatrix {
    let s = eigh_unchecked(m);
    let clipped: Vec<f64> = s.values.iter().map(|x| x.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    let spec = Spectrum {
        values: clipped.iter().map(|x| x / total).collect(),
        vectors: s.vectors,
    };
    spec.reconstruct()
}

/// `Σₙ p(n) F(ρ^{b|n}, h_b)`: the Fisher information reachable by measuring
/// a with `Π` and then b conditionally on each outcome.
pub fn mfi(rho: &BipartiteState, pi: &VonNeumannMeasurement, h_b: &Observable) -> Result<f64> {
    if h_b.dim() != rho.dim_b() {
        return Err(shape("observable does not act on party b"));
    }
    let ensemble = conditional_states(rho, pi)?;
    let mut total = 0.0;
    for e in &ensemble.entries {
        total += e.probability * fisher::qfi(&e.state, h_b)?;
    }
    Ok(total)
}

/// `Σ_μ mfi(ρ, Π, H_μ)`
pub fn total_mfi(
    rho: &BipartiteState,
    pi: &VonNeumannMeasurement,
    basis: &ObservableBasis,
) -> Result<f64> {
    check_basis_b(rho, basis)?;
    let ensemble = conditional_states(rho, pi)?;
    Ok(ensemble_total_qfi(&ensemble, basis))
}

fn ensemble_total_qfi(ensemble: &ConditionalEnsemble, basis: &ObservableBasis) -> f64 {
    ensemble
        .entries
        .iter()
        .map(|e| {
            let s = e.state.spectrum();
            let per_state: f64 = basis
                .observables()
                .iter()
                .map(|h| qfi_in_eigenbasis(&s, &s.in_eigenbasis(h.matrix())))
                .sum();
            e.probability * per_state
        })
        .sum()
}

#[derive(Debug, Clone)]
pub struct QuantifierResult {
    pub value: f64,
    /// Minimizing basis for `Q_{a,H}`, maximizing measurement for `Q_{a,Π}`.
    pub argopt: VonNeumannMeasurement,
    pub report: OptimizerReport,
}

impl QuantifierResult {
    pub fn converged(&self) -> bool {
        self.report.converged
    }
}

/// Evaluates `Σₙ F(ρ, |φₙ⟩⟨φₙ| ⊗ 1)` with the spectrum of `ρ` computed once.
pub struct LocalProjectorQfi {
    spectrum: Spectrum,
    dims: (usize, usize),
}

impl LocalProjectorQfi {
    pub fn new(rho: &BipartiteState) -> Self {
        Self {
            spectrum: rho.density().spectrum(),
            dims: rho.dims(),
        }
    }

    /// `F(ρ, |φ⟩⟨φ| ⊗ 1)`
    pub fn projector_qfi(&self, phi: &CVector) -> f64 {
        let (m, n) = self.dims;
        let dim = m * n;
        // W[r, k] = (⟨φ| ⊗ ⟨r|) |ψ_k⟩, so ⟨ψ_k| P ⊗ 1 |ψ_l⟩ = (W† W)[k, l]
        let v = &self.spectrum.vectors;
        let w = CMatrix::from_fn(n, dim, |r, k| {
            let mut acc = linalg::ZERO;
            for i in 0..m {
                acc += phi[i].conj() * v[(i * n + r, k)];
            }
            acc
        });
        qfi_in_eigenbasis(&self.spectrum, &(w.adjoint() * w))
    }

    pub fn basis_sum(&self, pi: &VonNeumannMeasurement) -> f64 {
        pi.vectors().iter().map(|phi| self.projector_qfi(phi)).sum()
    }
}

/// `Σₙ F(ρ, |φₙ⟩⟨φₙ| ⊗ 1)` for the basis of `pi`.
pub fn local_projector_qfi_sum(rho: &BipartiteState, pi: &VonNeumannMeasurement) -> Result<f64> {
    check_measurement_a(rho, pi)?;
    Ok(LocalProjectorQfi::new(rho).basis_sum(pi))
}

pub fn q_ah(rho: &BipartiteState, cfg: &OptimizerConfig) -> Result<QuantifierResult> {
    let kernel = LocalProjectorQfi::new(rho);
    let report = optimize(|pi| kernel.basis_sum(pi), rho.dim_a(), Direction::Minimize, cfg)?;
    Ok(QuantifierResult {
        value: report.best_value,
        argopt: report.best_measurement(),
        report,
    })
}

/// `Q_{a,Π}` with the canonical observable basis on the computational basis of b.
pub fn q_api(rho: &BipartiteState, cfg: &OptimizerConfig) -> Result<QuantifierResult> {
    q_api_with_basis(rho, &ObservableBasis::standard(rho.dim_b()), cfg)
}

pub fn q_api_with_basis(
    rho: &BipartiteState,
    basis: &ObservableBasis,
    cfg: &OptimizerConfig,
) -> Result<QuantifierResult> {
    check_basis_b(rho, basis)?;
    let local = total_local_qfi_b(rho, basis)?;
    let objective = |pi: &VonNeumannMeasurement| match conditional_states(rho, pi) {
        Ok(ensemble) => ensemble_total_qfi(&ensemble, basis),
        Err(_) => f64::NAN,
    };
    let report = optimize(objective, rho.dim_a(), Direction::Maximize, cfg)?;
    Ok(QuantifierResult {
        value: local - report.best_value,
        argopt: report.best_measurement(),
        report,
    })
}

fn require_pure(rho: &BipartiteState) -> Result<CVector> {
    let purity = rho.density().purity();
    if (purity - 1.0).abs() > 1e-8 {
        return Err(Error::NotPure { purity });
    }
    let psi = rho.density().principal_vector();
    let norm = psi.norm();
    Ok(psi.unscale(norm))
}

/// `1 − Σ sᵢ²` from the Schmidt decomposition of a pure state.
pub fn q_pure_closed_form(rho: &BipartiteState) -> Result<f64> {
    let psi = require_pure(rho)?;
    let sd = linalg::schmidt(&psi, rho.dims())?;
    Ok(1.0 - sd.coefficient_square_sum())
}

/// Closed-form `F(|ψ⟩⟨ψ|, 1 ⊗ H_b) = Σ sᵢ⟨βᵢ|H_b²|βᵢ⟩ − (Σ sᵢ⟨βᵢ|H_b|βᵢ⟩)²`.
pub fn pure_lqfi_b(rho: &BipartiteState, h_b: &Observable) -> Result<f64> {
    if h_b.dim() != rho.dim_b() {
        return Err(shape("observable does not act on party b"));
    }
    let psi = require_pure(rho)?;
    let sd = linalg::schmidt(&psi, rho.dims())?;
    let h = h_b.matrix();
    let h2 = h * h;
    let mut second = 0.0;
    let mut first = 0.0;
    for (s, beta) in sd.coefficients.iter().zip(&sd.b_vectors) {
        second += s * beta.dotc(&(&h2 * beta)).re;
        first += s * beta.dotc(&(h * beta)).re;
    }
    Ok(second - first * first)
}

/// Closed-form MFI of a pure state:
/// `Σᵢ sᵢ⟨βᵢ|H²|βᵢ⟩ − Σₙ (Σᵢⱼ √(sᵢsⱼ) ⟨αⱼ|n⟩⟨n|αᵢ⟩⟨βⱼ|H|βᵢ⟩)² / p(n)` with
/// `p(n) = Σᵢ sᵢ |⟨αᵢ|n⟩|²`.
pub fn pure_mfi_b(
    rho: &BipartiteState,
    pi: &VonNeumannMeasurement,
    h_b: &Observable,
) -> Result<f64> {
    check_measurement_a(rho, pi)?;
    if h_b.dim() != rho.dim_b() {
        return Err(shape("observable does not act on party b"));
    }
    let psi = require_pure(rho)?;
    let sd = linalg::schmidt(&psi, rho.dims())?;
    let h = h_b.matrix();
    let h2 = h * h;
    let l = sd.rank();
    let second: f64 = (0..l)
        .map(|i| sd.coefficients[i] * sd.b_vectors[i].dotc(&(&h2 * &sd.b_vectors[i])).re)
        .sum();
    let mut subtract = 0.0;
    for n_vec in pi.vectors() {
        // ⟨n|αᵢ⟩
        let amp: Vec<_> = sd.a_vectors.iter().map(|a| n_vec.dotc(a)).collect();
        let p: f64 = (0..l).map(|i| sd.coefficients[i] * amp[i].norm_sqr()).sum();
        if p <= OUTCOME_CUTOFF {
            continue;
        }
        let mut mean = linalg::ZERO;
        for i in 0..l {
            for j in 0..l {
                let hji = sd.b_vectors[j].dotc(&(h * &sd.b_vectors[i]));
                mean += amp[j].conj() * amp[i] * hji * (sd.coefficients[i] * sd.coefficients[j]).sqrt();
            }
        }
        subtract += mean.re * mean.re / p;
    }
    Ok(second - subtract)
}
