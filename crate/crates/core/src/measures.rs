//! Complexity ladders `D_k`, irreducible interactions `C_k` and multi-information.
//!
//! `C_k` is computed three ways: `D_{k−1} − D_k`, `D(ρ̃_k‖ρ̃_{k−1})` and
//! `S(ρ̃_{k−1}) − S(ρ̃_k)`. The three agree only when each `ρ̃_k` is the exact
//! projection, so their spread is a direct quality check on the projector.
//!
//! Local invertible filtering `F_1 ⊗ ⋯ ⊗ F_n` maps the product family onto
//! itself; `D_k` for `k ≥ 2` has no such invariance. Neither fact is
//! exercised here.

use alloc::vec::Vec;

use thiserror::Error;

use crate::dual::{minimize_dual, DualConfig};
use crate::linalg::{eig_hermitian, relative_entropy, trace_distance, von_neumann_entropy, LinalgError, LOG_FLOOR};
use crate::pauli::{bloch_from_state, MultiIndex};
use crate::projection::{project, project_product, ProjectionConfig, ProjectionError, ProjectionResult};
use crate::state::DensityMatrix;
use crate::symmetry::{invariant_basis, InvariantBasis, SymmetryError, SymmetryGroup};

/// Single-qubit Bloch components above this refuse the `U^{⊗n}` shortcut.
pub const UNITARY_INVARIANCE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeasureError {
    #[error("weight bound k = {k} outside 1..={n}")]
    WeightBound { k: usize, n: usize },
    #[error("state is not U^n invariant: <{index}> = {value:e}")]
    NotUnitarilyInvariant { index: MultiIndex, value: f64 },
    #[error(transparent)]
    Projection(#[from] ProjectionError),
    #[error(transparent)]
    Symmetry(#[from] SymmetryError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Which projector produces `ρ̃_k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Method {
    Iterative,
    Dual,
    /// Run both and keep the smaller distance.
    Both,
}

/// How a single projection finished.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Outcome {
    Converged,
    NotConverged,
    /// Coefficients hit the cap; the best finite iterate is reported.
    Diverged,
    /// `k = n`, no computation needed.
    Exact,
}

/// A projection run with its outcome; divergence is folded into the outcome.
#[derive(Clone, Debug)]
pub struct ProjectorRun {
    pub result: ProjectionResult,
    pub outcome: Outcome,
    /// Present on divergence: which coefficient ran away.
    pub divergent_term: Option<alloc::string::String>,
}

impl ProjectorRun {
    fn from_result(r: Result<ProjectionResult, ProjectionError>) -> Result<Self, MeasureError> {
        match r {
            Ok(result) => {
                let outcome = if result.converged { Outcome::Converged } else { Outcome::NotConverged };
                Ok(Self { result, outcome, divergent_term: None })
            }
            Err(ProjectionError::Divergence { term, best, .. }) => {
                Ok(Self { result: *best, outcome: Outcome::Diverged, divergent_term: Some(term) })
            }
            Err(e) => Err(e.into()),
        }
    }
}

/// `D_k` with the runs that produced it.
#[derive(Clone, Debug)]
pub struct DistanceReport {
    pub k: usize,
    /// Reported `D_k` in bits (the smaller of the two when both methods ran).
    pub bits: f64,
    pub method: Method,
    /// Which projector the reported value and `tau` come from.
    pub selected: Method,
    pub outcome: Outcome,
    pub tau: DensityMatrix,
    pub iterative: Option<ProjectorRun>,
    pub dual: Option<ProjectorRun>,
    /// `|D_iterative − D_dual|` when both ran.
    pub discrepancy: Option<f64>,
    /// Trace distance between the two projections when both ran.
    pub trace_discrepancy: Option<f64>,
    /// `|D_1 − D_1(product of marginals)|` at `k = 1`.
    pub product_check: Option<f64>,
}

impl DistanceReport {
    fn exact(rho: &DensityMatrix, method: Method) -> Self {
        let k = rho.num_qubits();
        Self {
            k,
            bits: 0.0,
            method,
            selected: method,
            outcome: Outcome::Exact,
            tau: rho.clone(),
            iterative: None,
            dual: None,
            discrepancy: None,
            trace_discrepancy: None,
            product_check: None,
        }
    }

    /// Residual of the selected run (0 for `k = n`).
    pub fn residual(&self) -> f64 {
        self.selected_run().map_or(0.0, |r| r.result.residual)
    }

    /// Sweeps (or iterations) of the selected run.
    pub fn sweeps(&self) -> usize {
        self.selected_run().map_or(0, |r| r.result.sweeps)
    }

    pub fn selected_run(&self) -> Option<&ProjectorRun> {
        match self.selected {
            Method::Dual => self.dual.as_ref(),
            _ => self.iterative.as_ref(),
        }
    }
}

/// `D_k(ρ) = D(ρ‖ρ̃_k)` in bits.
///
/// With a symmetry group the basis is reduced to its invariant operators.
pub fn distance(
    rho: &DensityMatrix,
    k: usize,
    method: Method,
    cfg: &ProjectionConfig,
    group: Option<&SymmetryGroup>,
) -> Result<DistanceReport, MeasureError> {
    let n = rho.num_qubits();
    if k == 0 || k > n {
        return Err(MeasureError::WeightBound { k, n });
    }
    if k == n {
        return Ok(DistanceReport::exact(rho, method));
    }
    let basis = group.map(|g| invariant_basis(n, k, g)).transpose()?;
    run_projectors(rho, k, method, cfg, basis.as_ref())
}

/// [`distance`] over a precomputed symmetry-reduced basis.
pub fn distance_with_basis(
    rho: &DensityMatrix,
    k: usize,
    method: Method,
    cfg: &ProjectionConfig,
    basis: &InvariantBasis,
) -> Result<DistanceReport, MeasureError> {
    let n = rho.num_qubits();
    if k == 0 || k > n {
        return Err(MeasureError::WeightBound { k, n });
    }
    if k == n {
        return Ok(DistanceReport::exact(rho, method));
    }
    run_projectors(rho, k, method, cfg, Some(basis))
}

fn run_projectors(
    rho: &DensityMatrix,
    k: usize,
    method: Method,
    cfg: &ProjectionConfig,
    basis: Option<&InvariantBasis>,
) -> Result<DistanceReport, MeasureError> {
    let iterative = matches!(method, Method::Iterative | Method::Both)
        .then(|| ProjectorRun::from_result(project(rho, k, cfg, basis)))
        .transpose()?;
    let dual = matches!(method, Method::Dual | Method::Both)
        .then(|| ProjectorRun::from_result(minimize_dual(rho, k, cfg, &DualConfig::default(), basis)))
        .transpose()?;

    let selected = match (&iterative, &dual) {
        (Some(i), Some(d)) if d.result.distance_bits < i.result.distance_bits => Method::Dual,
        (Some(_), _) => Method::Iterative,
        _ => Method::Dual,
    };
    let run = if selected == Method::Dual { dual.as_ref() } else { iterative.as_ref() }
        .expect("selected run exists");
    let bits = run.result.distance_bits;
    let outcome = run.outcome;
    let tau = run.result.tau.clone();
    let (discrepancy, trace_discrepancy) = match (&iterative, &dual) {
        (Some(i), Some(d)) => (
            Some((i.result.distance_bits - d.result.distance_bits).abs()),
            Some(trace_distance(i.result.tau.matrix(), d.result.tau.matrix())?),
        ),
        _ => (None, None),
    };
    let product_check = if k == 1 {
        Some((project_product(rho)?.distance_bits - bits).abs())
    } else {
        None
    };
    Ok(DistanceReport {
        k,
        bits,
        method,
        selected,
        outcome,
        tau,
        iterative,
        dual,
        discrepancy,
        trace_discrepancy,
        product_check,
    })
}

/// `C_k` in its three forms.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct InteractionMeasure {
    pub k: usize,
    /// `D_{k−1} − D_k`.
    pub difference: f64,
    /// `D(ρ̃_k‖ρ̃_{k−1})`; absent for `k = n` when `ρ` is rank deficient.
    pub relative_entropy: Option<f64>,
    /// `S(ρ̃_{k−1}) − S(ρ̃_k)`.
    pub entropy_difference: f64,
    /// Largest pairwise gap between the available forms.
    pub spread: f64,
}

/// Full `D_k` / `C_k` ladder of one state.
#[derive(Clone, Debug)]
pub struct MeasureReport {
    pub n: usize,
    /// `D_1, …, D_n` in bits, with `D_n = 0`.
    pub distances: Vec<f64>,
    /// `C_2, …, C_n`.
    pub interactions: Vec<InteractionMeasure>,
    /// `S(ρ)` in bits.
    pub entropy: f64,
    /// `S(ρ̃_1), …, S(ρ̃_{n−1})` in bits.
    pub projection_entropies: Vec<f64>,
    pub method: Method,
    /// Per-`k` runs for `k = 1, …, n − 1`.
    pub diagnostics: Vec<DistanceReport>,
}

impl MeasureReport {
    /// `D_k` for `1 ≤ k ≤ n`.
    pub fn distance(&self, k: usize) -> f64 {
        self.distances[k - 1]
    }

    /// `C_k` for `2 ≤ k ≤ n`.
    pub fn interaction(&self, k: usize) -> &InteractionMeasure {
        &self.interactions[k - 2]
    }

    /// Total correlation `Σ_k C_k` (difference form), equal to `D_1`.
    pub fn total_interaction(&self) -> f64 {
        self.interactions.iter().map(|c| c.difference).sum()
    }

    /// Combines per-`k` runs (`k = 1, …, n − 1`, in order) into a report.
    pub fn assemble(rho: &DensityMatrix, method: Method, diagnostics: Vec<DistanceReport>) -> Result<Self, MeasureError> {
        let n = rho.num_qubits();
        debug_assert_eq!(diagnostics.len(), n - 1);
        let entropy = von_neumann_entropy(rho);
        let mut distances: Vec<f64> = diagnostics.iter().map(|d| d.bits).collect();
        distances.push(0.0);
        let projection_entropies: Vec<f64> = diagnostics.iter().map(|d| von_neumann_entropy(&d.tau)).collect();
        let full_rank = eig_hermitian(rho.matrix())?.eigenvalues()[0] > LOG_FLOOR;

        let mut interactions = Vec::with_capacity(n.saturating_sub(1));
        for k in 2..=n {
            let lower = &diagnostics[k - 2].tau;
            let lower_entropy = projection_entropies[k - 2];
            let (upper, upper_entropy) = if k < n {
                (Some(&diagnostics[k - 1].tau), projection_entropies[k - 1])
            } else {
                (full_rank.then_some(rho), entropy)
            };
            let difference = distances[k - 2] - distances[k - 1];
            let rel = upper.map(|u| relative_entropy(u, lower)).transpose()?;
            let entropy_difference = lower_entropy - upper_entropy;
            let mut forms = alloc::vec![difference, entropy_difference];
            forms.extend(rel);
            let spread = forms
                .iter()
                .flat_map(|a| forms.iter().map(move |b| (a - b).abs()))
                .fold(0.0, f64::max);
            interactions.push(InteractionMeasure { k, difference, relative_entropy: rel, entropy_difference, spread });
        }
        Ok(Self { n, distances, interactions, entropy, projection_entropies, method, diagnostics })
    }
}

/// `D_k` for every `k` and `C_k` in all three forms.
pub fn interaction_ladder(
    rho: &DensityMatrix,
    method: Method,
    cfg: &ProjectionConfig,
    group: Option<&SymmetryGroup>,
) -> Result<MeasureReport, MeasureError> {
    let n = rho.num_qubits();
    let diagnostics = (1..n)
        .map(|k| distance(rho, k, method, cfg, group))
        .collect::<Result<Vec<_>, _>>()?;
    MeasureReport::assemble(rho, method, diagnostics)
}

/// `D_1` from the product of single-qubit marginals, in bits.
pub fn multi_information(rho: &DensityMatrix) -> Result<f64, MeasureError> {
    Ok(project_product(rho)?.distance_bits)
}

/// `D_1 = n − S(ρ)` for `U^{⊗n}`-invariant states.
///
/// Only the necessary condition (vanishing single-qubit Bloch components) is
/// verified; anything else is the caller's claim.
pub fn d1_un_invariant(rho: &DensityMatrix) -> Result<f64, MeasureError> {
    let eta = bloch_from_state(rho, Some(1));
    if let Some((index, &value)) = eta
        .iter()
        .find(|(a, v)| !a.is_identity() && v.abs() > UNITARY_INVARIANCE_TOL)
    {
        return Err(MeasureError::NotUnitarilyInvariant { index: *index, value });
    }
    Ok(rho.num_qubits() as f64 - von_neumann_entropy(rho))
}
