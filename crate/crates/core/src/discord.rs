//! Entropic and geometric discord, used as reference measures.

use crate::correlations::{conditional_block, conditional_states, q_pure_closed_form};
use crate::error::{Error, Result};
use crate::linalg::Party;
use crate::measurement::{dephase_a, VonNeumannMeasurement};
use crate::optimizer::{optimize, Direction, OptimizerConfig, OptimizerReport};
use crate::states::{BipartiteState, DensityMatrix};

/// Largest dimension of party a accepted by [`entropic_discord`].
pub const ENTROPIC_MAX_DIM_A: usize = 4;

/// `−Σ pᵢ ln pᵢ`, with `0 ln 0 = 0`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    shannon(&rho.spectrum().values)
}

fn shannon(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.ln()).sum()
}

/// `S(ρ_a) + S(ρ_b) − S(ρ)`
pub fn mutual_information(rho: &BipartiteState) -> f64 {
    von_neumann_entropy(&rho.reduced(Party::A)) + von_neumann_entropy(&rho.reduced(Party::B))
        - von_neumann_entropy(rho.density())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ClosedForm,
    Optimized,
}

#[derive(Debug, Clone)]
pub struct DiscordResult {
    pub value: f64,
    pub argopt: Option<VonNeumannMeasurement>,
    pub method: Method,
    pub report: Option<OptimizerReport>,
}

impl DiscordResult {
    pub fn converged(&self) -> bool {
        self.report.as_ref().is_none_or(|r| r.converged)
    }

    fn optimized(value: f64, report: OptimizerReport) -> Self {
        Self {
            value,
            argopt: Some(report.best_measurement()),
            method: Method::Optimized,
            report: Some(report),
        }
    }
}

/// `I(ρ) − I(Φ_Π(ρ))` evaluated literally.
pub fn mutual_information_loss(rho: &BipartiteState, pi: &VonNeumannMeasurement) -> Result<f64> {
    Ok(mutual_information(rho) - mutual_information(&dephase_a(rho, pi)?))
}

/// `Σₙ p(n) S(ρ^{b|n})`; the mutual-information loss equals this plus
/// `S(ρ_a) − S(ρ)`.
pub fn conditional_entropy(rho: &BipartiteState, pi: &VonNeumannMeasurement) -> Result<f64> {
    let ensemble = conditional_states(rho, pi)?;
    Ok(ensemble
        .entries
        .iter()
        .map(|e| e.probability * von_neumann_entropy(&e.state))
        .sum())
}

/// `min_Π {I(ρ) − I(Φ_Π(ρ))}` over rank-one projective measurements on a.
pub fn entropic_discord(rho: &BipartiteState, cfg: &OptimizerConfig) -> Result<DiscordResult> {
    if rho.dim_a() > ENTROPIC_MAX_DIM_A {
        return Err(Error::Capability(format!(
            "entropic discord is limited to dim_a <= {ENTROPIC_MAX_DIM_A}, got {}",
            rho.dim_a()
        )));
    }
    let offset = von_neumann_entropy(&rho.reduced(Party::A)) - von_neumann_entropy(rho.density());
    let report = optimize(
        |pi| conditional_entropy(rho, pi).unwrap_or(f64::NAN),
        rho.dim_a(),
        Direction::Minimize,
        cfg,
    )?;
    Ok(DiscordResult::optimized(offset + report.best_value, report))
}

/// `‖ρ − Φ_Π(ρ)‖²` in the Hilbert–Schmidt norm, evaluated literally.
pub fn dephasing_distance(rho: &BipartiteState, pi: &VonNeumannMeasurement) -> Result<f64> {
    let out = dephase_a(rho, pi)?;
    Ok((rho.matrix() - out.matrix()).norm_squared())
}

/// Since `Φ_Π` is an orthogonal projection, `‖ρ − Φ_Π(ρ)‖² = tr ρ² − Σₙ tr(ρ̃ₙ²)`
/// with `ρ̃ₙ` the unnormalized conditional states.
fn dephasing_distance_fast(rho: &BipartiteState, purity: f64, pi: &VonNeumannMeasurement) -> f64 {
    let kept: f64 = pi
        .vectors()
        .iter()
        .map(|v| conditional_block(rho, v).norm_squared())
        .sum();
    purity - kept
}

/// Geometric discord; pure inputs use the closed form `1 − Σ sᵢ²`.
pub fn geometric_discord(rho: &BipartiteState, cfg: &OptimizerConfig) -> Result<DiscordResult> {
    if rho.is_pure() {
        return Ok(DiscordResult {
            value: q_pure_closed_form(rho)?,
            argopt: None,
            method: Method::ClosedForm,
            report: None,
        });
    }
    geometric_discord_optimized(rho, cfg)
}

/// Geometric discord by direct minimization, regardless of purity.
pub fn geometric_discord_optimized(rho: &BipartiteState, cfg: &OptimizerConfig) -> Result<DiscordResult> {
    let purity = rho.density().purity();
    let report = optimize(
        |pi| dephasing_distance_fast(rho, purity, pi),
        rho.dim_a(),
        Direction::Minimize,
        cfg,
    )?;
    Ok(DiscordResult::optimized(report.best_value, report))
}
