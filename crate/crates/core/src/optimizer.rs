//! Multistart Nelder–Mead over orthonormal bases of a `d`-dimensional space.
//!
//! A basis is the column set of a unitary. Each restart draws a Haar base
//! point `U₀` and searches the local chart `p ↦ U₀ · exp(i A(p))`, where
//! `A(p) = Σ_k p_k G_k` over the standard trace-orthonormal Hermitian basis
//! `G_k`. When a simplex collapses the chart is re-centred at the best point
//! and the search resumes with a fresh simplex until it stops improving.

use num_complex::Complex64;

use crate::error::{shape, Error, Result};
use crate::linalg::{self, CMatrix};
use crate::measurement::VonNeumannMeasurement;
use crate::random;

/// Simplex diameter (max-norm) that counts as collapsed.
pub const SIMPLEX_DIAMETER_TOL: f64 = 1e-8;
const MAX_RECENTERS: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryParams(pub Vec<f64>);

impl UnitaryParams {
    pub fn zeros(d: usize) -> Self {
        Self(vec![0.0; d * d])
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }
}

/// `A(p) = Σ_k p_k G_k`
pub fn generator_from_params(p: &UnitaryParams, d: usize) -> Result<CMatrix> {
    if p.0.len() != d * d {
        return Err(shape(format!(
            "{} parameters for a {d}-dimensional unitary (need {})",
            p.0.len(),
            d * d
        )));
    }
    let mut a = CMatrix::zeros(d, d);
    for (coef, g) in p.0.iter().zip(linalg::standard_hermitian_basis(d)) {
        a += g.scale(*coef);
    }
    Ok(a)
}

/// `exp(i A(p))`
pub fn unitary_from_params(p: &UnitaryParams, d: usize) -> Result<CMatrix> {
    if !p.is_finite() {
        return Err(Error::Invalid("unitary parameters must be finite".into()));
    }
    let a = generator_from_params(p, d)?;
    linalg::exp_i_hermitian(&a, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub max_iterations: usize,
    /// Objective spread at which a simplex counts as converged.
    pub tolerance: f64,
    /// Initial simplex edge, in radians of the generator coefficients.
    pub step: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            restarts: 16,
            max_iterations: 2000,
            tolerance: 1e-6,
            step: 0.1,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::Invalid("optimizer needs at least one restart".into()));
        }
        if !(self.tolerance > 0.0) || !(self.step > 0.0) || self.max_iterations == 0 {
            return Err(Error::Invalid(
                "optimizer tolerance, step and iteration cap must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn restart_seed(&self, restart: usize) -> u64 {
        self.seed.wrapping_add(restart as u64)
    }
}

#[derive(Debug, Clone)]
pub struct RestartOutcome {
    pub seed: u64,
    /// Objective value in the caller's direction.
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone)]
pub struct OptimizerReport {
    pub direction: Direction,
    pub best_value: f64,
    /// Chart coordinates of the optimum, relative to `best_base`.
    pub best_params: UnitaryParams,
    /// Chart centre of the winning restart.
    pub best_base: CMatrix,
    /// `best_base · exp(i A(best_params))`
    pub best_unitary: CMatrix,
    pub best_restart: usize,
    pub restarts: Vec<RestartOutcome>,
    pub converged: bool,
    pub evaluations: usize,
}

impl OptimizerReport {
    pub fn best_measurement(&self) -> VonNeumannMeasurement {
        VonNeumannMeasurement::from_unitary_unchecked(&self.best_unitary)
    }

    pub fn seed(&self) -> u64 {
        self.restarts[self.best_restart].seed
    }

    pub fn iterations(&self) -> usize {
        self.restarts.iter().map(|r| r.iterations).sum()
    }

    /// Best value among the other restarts, if any.
    pub fn second_best(&self) -> Option<f64> {
        let better = |a: f64, b: f64| match self.direction {
            Direction::Minimize => a < b,
            Direction::Maximize => a > b,
        };
        self.restarts
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != self.best_restart)
            .map(|(_, r)| r.value)
            .fold(None, |acc, v| match acc {
                Some(a) if !better(v, a) => Some(a),
                _ => Some(v),
            })
    }
}

struct NelderMead {
    iterations: usize,
    converged: bool,
    best_x: Vec<f64>,
    best_f: f64,
}

/// Adaptive-coefficient Nelder–Mead minimizing `f` from `x0`.
fn nelder_mead(
    f: &mut dyn FnMut(&[f64]) -> Result<f64>,
    x0: &[f64],
    step: f64,
    max_iterations: usize,
    tolerance: f64,
) -> Result<NelderMead> {
    let n = x0.len();
    let nf = n.max(1) as f64;
    let (alpha, gamma, rho, sigma) = (1.0, 1.0 + 2.0 / nf, 0.75 - 1.0 / (2.0 * nf), 1.0 - 1.0 / nf);
    let sigma = if n <= 1 { 0.5 } else { sigma };

    let mut simplex: Vec<Vec<f64>> = vec![x0.to_vec()];
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += step;
        simplex.push(x);
    }
    let mut values = simplex.iter().map(|x| f(x)).collect::<Result<Vec<_>>>()?;

    let mut iterations = 0;
    let mut converged = false;
    loop {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let spread = values[n] - values[0];
        let diameter = simplex[1..]
            .iter()
            .flat_map(|x| x.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if spread < tolerance || diameter < SIMPLEX_DIAMETER_TOL {
            converged = true;
            break;
        }
        if iterations >= max_iterations {
            break;
        }
        iterations += 1;

        let mut centroid = vec![0.0; n];
        for x in &simplex[..n] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / nf;
            }
        }
        let towards = |coef: f64, worst: &[f64]| -> Vec<f64> {
            centroid.iter().zip(worst).map(|(c, w)| c + coef * (c - w)).collect()
        };

        let reflected = towards(alpha, &simplex[n]);
        let fr = f(&reflected)?;
        if fr < values[0] {
            let expanded = towards(alpha * gamma, &simplex[n]);
            let fe = f(&expanded)?;
            if fe < fr {
                simplex[n] = expanded;
                values[n] = fe;
            } else {
                simplex[n] = reflected;
                values[n] = fr;
            }
            continue;
        }
        if fr < values[n - 1] {
            simplex[n] = reflected;
            values[n] = fr;
            continue;
        }
        let (candidate, fc) = if fr < values[n] {
            let outside = towards(alpha * rho, &simplex[n]);
            let fo = f(&outside)?;
            (outside, fo)
        } else {
            let inside = towards(-rho, &simplex[n]);
            let fi = f(&inside)?;
            (inside, fi)
        };
        if fc < values[n].min(fr) {
            simplex[n] = candidate;
            values[n] = fc;
            continue;
        }
        // shrink towards the best vertex
        let best = simplex[0].clone();
        for i in 1..=n {
            let x: Vec<f64> = best
                .iter()
                .zip(&simplex[i])
                .map(|(b, xi)| b + sigma * (xi - b))
                .collect();
            values[i] = f(&x)?;
            simplex[i] = x;
        }
    }
    Ok(NelderMead {
        iterations,
        converged,
        best_x: simplex[0].clone(),
        best_f: values[0],
    })
}

struct RestartRun {
    outcome: RestartOutcome,
    base: CMatrix,
    params: Vec<f64>,
    evaluations: usize,
}

fn run_restart<F>(
    objective: &F,
    d: usize,
    sign: f64,
    cfg: &OptimizerConfig,
    restart: usize,
    generators: &[CMatrix],
) -> Result<RestartRun>
where
    F: Fn(&VonNeumannMeasurement) -> f64,
{
    let seed = cfg.restart_seed(restart);
    let mut base = random::haar_unitary(d, seed);
    let mut evaluations = 0usize;

    let mut last_params = vec![0.0; d * d];
    let mut best_f = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;
    for _ in 0..MAX_RECENTERS {
        let budget = cfg.max_iterations.saturating_sub(iterations);
        if budget == 0 && best_f.is_finite() {
            break;
        }
        let chart_base = base.clone();
        let mut f = |p: &[f64]| -> Result<f64> {
            evaluations += 1;
            let u = &chart_base * chart_exp(p, generators);
            let value = objective(&VonNeumannMeasurement::from_unitary_unchecked(&u));
            if !value.is_finite() {
                return Err(Error::NonFiniteObjective {
                    value,
                    evaluation: evaluations,
                });
            }
            Ok(sign * value)
        };
        let run = nelder_mead(&mut f, &vec![0.0; d * d], cfg.step, budget, cfg.tolerance)?;
        iterations += run.iterations;
        converged = run.converged;
        let improvement = best_f - run.best_f;
        if run.best_f <= best_f {
            best_f = run.best_f;
            last_params = run.best_x.clone();
        }
        if !(improvement > cfg.tolerance) {
            break;
        }
        base = &base * chart_exp(&last_params, generators);
        last_params = vec![0.0; d * d];
    }
    Ok(RestartRun {
        outcome: RestartOutcome {
            seed,
            value: sign * best_f,
            iterations,
            converged,
        },
        base,
        params: last_params,
        evaluations,
    })
}

fn chart_exp(p: &[f64], generators: &[CMatrix]) -> CMatrix {
    let d = generators[0].nrows();
    let mut a = CMatrix::zeros(d, d);
    for (coef, g) in p.iter().zip(generators) {
        if *coef != 0.0 {
            a += g.scale(*coef);
        }
    }
    linalg::eigh_unchecked(&a).map(|x| Complex64::from_polar(1.0, x))
}

/// Optimizes `objective` over rank-one von Neumann measurements on a
/// `d`-dimensional space. Deterministic for a fixed config.
pub fn optimize<F>(
    objective: F,
    d: usize,
    direction: Direction,
    cfg: &OptimizerConfig,
) -> Result<OptimizerReport>
where
    F: Fn(&VonNeumannMeasurement) -> f64,
{
    cfg.validate()?;
    if d == 0 {
        return Err(shape("cannot optimize over a zero-dimensional space"));
    }
    let sign = match direction {
        Direction::Minimize => 1.0,
        Direction::Maximize => -1.0,
    };
    let generators = linalg::standard_hermitian_basis(d);

    let mut runs = Vec::with_capacity(cfg.restarts);
    for r in 0..cfg.restarts {
        runs.push(run_restart(&objective, d, sign, cfg, r, &generators)?);
    }
    // first-found wins among equal values
    let mut best = 0;
    for (i, run) in runs.iter().enumerate() {
        if sign * run.outcome.value < sign * runs[best].outcome.value {
            best = i;
        }
    }
    let winner = &runs[best];
    let best_unitary = &winner.base * chart_exp(&winner.params, &generators);
    Ok(OptimizerReport {
        direction,
        best_value: winner.outcome.value,
        best_params: UnitaryParams(winner.params.clone()),
        best_base: winner.base.clone(),
        best_unitary,
        best_restart: best,
        converged: winner.outcome.converged,
        evaluations: runs.iter().map(|r| r.evaluations).sum(),
        restarts: runs.into_iter().map(|r| r.outcome).collect(),
    })
}
