//! Convex dual of the projection problem.
//!
//! Over the `k`-party coefficients, `f(θ) = ψ(θ) − Σ_a θ_a ⟨A_a⟩_ρ` is smooth
//! and convex, with gradient `∂f/∂θ_a = ⟨A_a⟩_{τ(θ)} − ⟨A_a⟩_ρ`. Its
//! minimiser is the information projection, and `D(ρ‖τ(θ)) = f(θ) − S(ρ)`.
//! Plain gradient descent with Armijo backtracking is enough at these sizes,
//! and shares nothing with the iterative projector beyond the basis.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::{entropy_nats, gibbs_state, LinalgError};
use crate::matrix::CMatrix;
use crate::projection::{
    check_inputs, pack_result, Iterate, ProjectionBasis, ProjectionConfig, ProjectionError,
    ProjectionResult, SweepRecord,
};
use crate::state::DensityMatrix;
use crate::symmetry::InvariantBasis;
use crate::LN_2;

/// Relative rounding error assumed for objective values.
const ROUNDOFF: f64 = 16.0 * f64::EPSILON;

#[derive(Clone, Debug, PartialEq)]
pub struct DualConfig {
    pub max_iterations: usize,
    pub initial_step: f64,
    pub backtrack: f64,
    /// Sufficient-decrease constant of the Armijo condition.
    pub armijo: f64,
    /// Line search gives up below this step length.
    pub min_step: f64,
}

impl Default for DualConfig {
    fn default() -> Self {
        Self { max_iterations: 5000, initial_step: 1.0, backtrack: 0.5, armijo: 1e-4, min_step: 1e-16 }
    }
}

/// Objective value (nats) and gradient at one `θ`.
#[derive(Clone, Debug)]
pub struct DualEvaluation {
    pub value: f64,
    pub gradient: Vec<f64>,
    pub tau: CMatrix,
    pub free_energy: f64,
}

impl DualEvaluation {
    pub fn gradient_norm_inf(&self) -> f64 {
        self.gradient.iter().map(|g| g.abs()).fold(0.0, f64::max)
    }
}

/// `f(θ) = ψ(θ) − θ·η` and `∇f = η(τ(θ)) − η`.
pub fn dual_objective(
    basis: &ProjectionBasis,
    theta: &[f64],
    target: &[f64],
) -> Result<DualEvaluation, LinalgError> {
    let h = basis.hamiltonian(theta);
    let (tau, psi) = gibbs_state(&h)?;
    let pairing: f64 = theta.iter().zip(target).map(|(t, e)| t * e).sum();
    let gradient = basis.moments(&tau).iter().zip(target).map(|(m, e)| m - e).collect();
    Ok(DualEvaluation { value: psi - pairing, gradient, tau, free_energy: psi })
}

/// Dual minimisation from `θ = 0`.
pub fn minimize_dual(
    rho: &DensityMatrix,
    k: usize,
    cfg: &ProjectionConfig,
    dual: &DualConfig,
    basis: Option<&InvariantBasis>,
) -> Result<ProjectionResult, ProjectionError> {
    let basis = match basis {
        Some(b) => ProjectionBasis::from_invariant(b),
        None => ProjectionBasis::full(rho.num_qubits(), k)?,
    };
    let start = vec![0.0; basis.len()];
    minimize_dual_from(rho, &basis, &start, cfg, dual)
}

/// Dual minimisation from an arbitrary starting point.
///
/// Only `tol` and `theta_cap` are read from `cfg`.
pub fn minimize_dual_from(
    rho: &DensityMatrix,
    basis: &ProjectionBasis,
    start: &[f64],
    cfg: &ProjectionConfig,
    dual: &DualConfig,
) -> Result<ProjectionResult, ProjectionError> {
    cfg.validate()?;
    check_inputs(rho, basis, basis.weight_bound())?;
    if start.len() != basis.len() {
        return Err(ProjectionError::InvalidConfig("starting point does not match the basis"));
    }
    let target = basis.moments(rho.matrix());
    let entropy = entropy_nats(rho.matrix());
    let mut theta = start.to_vec();
    let mut eval = dual_objective(basis, &theta, &target)?;
    let mut history = Vec::new();
    let snapshot = |theta: &[f64], eval: &DualEvaluation, at: usize| Iterate {
        theta: theta.to_vec(),
        tau: eval.tau.clone(),
        distance_nats: eval.value - entropy,
        residual: eval.gradient_norm_inf(),
        at,
    };

    let mut iterations = 0;
    let mut converged = eval.gradient_norm_inf() <= cfg.tol;
    while !converged && iterations < dual.max_iterations {
        iterations += 1;
        let g2: f64 = eval.gradient.iter().map(|g| g * g).sum();
        let mut step = dual.initial_step;
        let accepted = loop {
            let trial: Vec<f64> = theta.iter().zip(&eval.gradient).map(|(t, g)| t - step * g).collect();
            let next = dual_objective(basis, &trial, &target)?;
            let predicted = dual.armijo * step * g2;
            if next.value <= eval.value - predicted {
                break Some((trial, next));
            }
            // Once the predicted decrease is below the rounding error of f the
            // Armijo test is noise; a shrinking gradient is the usable signal.
            let roundoff = ROUNDOFF * eval.value.abs().max(1.0);
            if predicted <= roundoff
                && next.value <= eval.value + roundoff
                && next.gradient_norm_inf() < eval.gradient_norm_inf()
            {
                break Some((trial, next));
            }
            step *= dual.backtrack;
            if step < dual.min_step {
                break None;
            }
        };
        let Some((trial, next)) = accepted else { break };
        if let Some((a, &v)) = trial.iter().enumerate().find(|(_, v)| !v.is_finite() || v.abs() > cfg.theta_cap) {
            let best = pack_result(basis, snapshot(&theta, &eval, iterations - 1), iterations, false, 0, history);
            return Err(ProjectionError::Divergence {
                term: basis.terms()[a].label().into(),
                value: v,
                cap: cfg.theta_cap,
                best: alloc::boxed::Box::new(best),
            });
        }
        theta = trial;
        eval = next;
        let residual = eval.gradient_norm_inf();
        history.push(SweepRecord { residual, distance_bits: (eval.value - entropy).max(0.0) / LN_2 });
        converged = residual <= cfg.tol;
    }
    Ok(pack_result(basis, snapshot(&theta, &eval, iterations), iterations, converged, 0, history))
}
