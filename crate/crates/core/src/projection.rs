//! Iterative information projection onto the `k`-party exponential family.
//!
//! Starting from the maximally mixed state, the algorithm sweeps a fixed
//! basis `A_1, …, A_M` of `k`-party observables. For each `A` it adds
//! `ω ε A` to the current Hamiltonian, with the linearised step
//!
//! ```text
//! ε = (⟨A⟩_ρ − ⟨A⟩_τ) / (⟨A²⟩_τ − ⟨A⟩_τ²)
//! ```
//!
//! and rebuilds `τ = e^H / tr e^H` before moving to the next term. Sweeps
//! repeat until every moment matches to `tol` or the sweep budget runs out.
//! Convergence is not guaranteed, so the minimum-distance iterate is kept.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use crate::linalg::{entropy_nats, gibbs_state, LinalgError};
use crate::math;
use crate::matrix::{c, CMatrix, C64};
use crate::pauli::{add_pauli, enumerate_basis, partial_trace, trace_with, MultiIndex, PauliError};
use crate::state::DensityMatrix;
use crate::symmetry::{is_invariant_state, InvariantBasis, SymmetryGenerator};
use crate::LN_2;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProjectionError {
    /// `|θ|` exceeded the cap: the projection sits on (or near) the boundary
    /// of the family's closure. The best finite iterate is attached.
    #[error("coefficient of {term} reached {value:.3} (cap {cap}); projection approaches the closure boundary")]
    Divergence { term: String, value: f64, cap: f64, best: Box<ProjectionResult> },
    #[error("weight bound k = {k} outside 1..={n}")]
    WeightBound { k: usize, n: usize },
    #[error("basis acts on {basis} qubits with bound {basis_k}, state has {n} qubits and k = {k}")]
    BasisMismatch { basis: usize, basis_k: usize, n: usize, k: usize },
    #[error("state is not invariant under the symmetry used to reduce the basis")]
    StateNotInvariant,
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Pauli(#[from] PauliError),
}

impl ProjectionError {
    /// Best finite iterate carried by a divergence signal.
    pub fn best_iterate(&self) -> Option<&ProjectionResult> {
        match self {
            ProjectionError::Divergence { best, .. } => Some(best),
            _ => None,
        }
    }
}

/// One basis observable `A = Σ_j a_j σ_{α_j}`, with the Pauli expansion of `A²` cached.
#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    label: String,
    components: Vec<(MultiIndex, f64)>,
    square: Vec<(MultiIndex, f64)>,
}

impl Term {
    pub fn pauli(alpha: MultiIndex) -> Self {
        let id = MultiIndex::identity(alpha.num_qubits()).expect("valid size");
        Self { label: alpha.label(), components: alloc::vec![(alpha, 1.0)], square: alloc::vec![(id, 1.0)] }
    }

    /// General real combination of Pauli strings.
    pub fn combination(label: String, components: Vec<(MultiIndex, f64)>) -> Self {
        let mut acc: BTreeMap<MultiIndex, C64> = BTreeMap::new();
        for (a, ca) in &components {
            for (b, cb) in &components {
                let (k, g) = a.mul(b);
                let phase = match k {
                    0 => c(1.0, 0.0),
                    1 => c(0.0, 1.0),
                    2 => c(-1.0, 0.0),
                    _ => c(0.0, -1.0),
                };
                *acc.entry(g).or_insert(c(0.0, 0.0)) += phase * (ca * cb);
            }
        }
        let square = acc.into_iter().filter(|(_, z)| z.re.abs() > 1e-15).map(|(g, z)| (g, z.re)).collect();
        Self { label, components, square }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn components(&self) -> &[(MultiIndex, f64)] {
        &self.components
    }

    pub fn weight(&self) -> usize {
        self.components.iter().map(|(a, _)| a.weight()).max().unwrap_or(0)
    }

    /// `tr(A M)`.
    pub fn trace_with(&self, m: &CMatrix) -> f64 {
        self.components.iter().map(|(a, ca)| ca * trace_with(a, m).re).sum()
    }

    /// `tr(A² M)`.
    pub fn square_trace_with(&self, m: &CMatrix) -> f64 {
        self.square.iter().map(|(g, cg)| cg * trace_with(g, m).re).sum()
    }

    /// `H += s · A`.
    pub fn add_to(&self, h: &mut CMatrix, s: f64) {
        for (a, ca) in &self.components {
            add_pauli(h, s * ca, a);
        }
    }

    pub fn to_matrix(&self) -> CMatrix {
        let n = self.components.first().map_or(1, |(a, _)| a.num_qubits());
        let mut m = CMatrix::zeros(1 << n);
        self.add_to(&mut m, 1.0);
        m
    }
}

/// Ordered list of observables swept by the projector.
#[derive(Clone, Debug)]
pub struct ProjectionBasis {
    n: usize,
    k: usize,
    terms: Vec<Term>,
    generators: Vec<SymmetryGenerator>,
}

impl ProjectionBasis {
    /// All Pauli strings of weight `1..=k`, lexicographic.
    pub fn full(n: usize, k: usize) -> Result<Self, ProjectionError> {
        if k == 0 || k > n {
            return Err(ProjectionError::WeightBound { k, n });
        }
        let terms = enumerate_basis(n, k)?.into_iter().map(Term::pauli).collect();
        Ok(Self { n, k, terms, generators: Vec::new() })
    }

    /// Orbit-averaged elements of a symmetry-reduced basis.
    pub fn from_invariant(basis: &InvariantBasis) -> Self {
        let terms = basis
            .elements()
            .iter()
            .map(|e| {
                let coeff = e.coefficient();
                let comps = e.terms().iter().map(|t| (t.index, f64::from(t.sign) * coeff)).collect();
                if e.terms().len() == 1 && e.terms()[0].sign == 1 {
                    Term::pauli(e.terms()[0].index)
                } else {
                    Term::combination(e.label(), comps)
                }
            })
            .collect();
        Self {
            n: basis.num_qubits(),
            k: basis.weight_bound(),
            terms,
            generators: basis.generators().to_vec(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn weight_bound(&self) -> usize {
        self.k
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when the basis was reduced by a symmetry group.
    pub fn is_reduced(&self) -> bool {
        !self.generators.is_empty()
    }

    pub fn generators(&self) -> &[SymmetryGenerator] {
        &self.generators
    }

    pub fn labels(&self) -> Vec<String> {
        self.terms.iter().map(|t| t.label.clone()).collect()
    }

    /// `H(θ) = Σ_a θ_a A_a`.
    pub fn hamiltonian(&self, theta: &[f64]) -> CMatrix {
        let mut h = CMatrix::zeros(1 << self.n);
        for (t, &th) in self.terms.iter().zip(theta) {
            if th != 0.0 {
                t.add_to(&mut h, th);
            }
        }
        h
    }

    /// `⟨A_a⟩` for every term.
    pub fn moments(&self, m: &CMatrix) -> Vec<f64> {
        self.terms.iter().map(|t| t.trace_with(m)).collect()
    }
}

/// Coefficients `θ` of `H = Σ θ_a A_a`, aligned with the basis labels.
#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianCoeffs {
    pub labels: Vec<String>,
    pub theta: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProjectionConfig {
    /// Under-relaxation factor in `(0, 1]`.
    pub omega: f64,
    pub max_sweeps: usize,
    /// Target for the largest absolute moment mismatch.
    pub tol: f64,
    /// Updates whose variance falls below this are skipped.
    pub variance_floor: f64,
    /// Largest `|θ_a|` (nats) before reporting divergence.
    pub theta_cap: f64,
    pub track_best: bool,
}

impl ProjectionConfig {
    /// `ω = 0.5`, 100 sweeps for up to four qubits; `ω = 0.1`, 500 sweeps beyond.
    pub fn for_qubits(n: usize) -> Self {
        let small = n <= 4;
        Self {
            omega: if small { 0.5 } else { 0.1 },
            max_sweeps: if small { 100 } else { 500 },
            tol: 1e-8,
            variance_floor: 1e-12,
            theta_cap: 50.0,
            track_best: true,
        }
    }

    pub fn validate(&self) -> Result<(), ProjectionError> {
        if !(self.omega > 0.0 && self.omega <= 1.0) {
            return Err(ProjectionError::InvalidConfig("omega must lie in (0, 1]"));
        }
        if self.max_sweeps == 0 {
            return Err(ProjectionError::InvalidConfig("max_sweeps must be positive"));
        }
        if !(self.tol > 0.0 && self.variance_floor > 0.0 && self.theta_cap > 0.0) {
            return Err(ProjectionError::InvalidConfig("tol, variance_floor and theta_cap must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRecord {
    pub residual: f64,
    pub distance_bits: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProjectionResult {
    pub k: usize,
    pub coeffs: HamiltonianCoeffs,
    pub tau: DensityMatrix,
    /// `D(ρ‖τ)` in bits.
    pub distance_bits: f64,
    /// Largest `|⟨A⟩_τ − ⟨A⟩_ρ|` over the basis.
    pub residual: f64,
    /// Sweeps (iterative) or descent iterations (dual) performed.
    pub sweeps: usize,
    /// Sweep or iteration at which the returned iterate was produced.
    pub selected_at: usize,
    pub converged: bool,
    /// The projection is not full rank (closure of the family).
    pub boundary: bool,
    /// Updates skipped because of a vanishing variance.
    pub skipped_updates: usize,
    pub history: Vec<SweepRecord>,
}

impl ProjectionResult {
    pub fn basis_size(&self) -> usize {
        self.coeffs.theta.len()
    }
}

/// Outcome of one linearised coefficient update.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpsilonStep {
    pub value: f64,
    pub mean: f64,
    pub variance: f64,
    /// The variance fell below the floor and the step was set to zero.
    pub skipped: bool,
}

/// `ε = (target − ⟨A⟩_τ) / Δ²_τ(A)`, or 0 (flagged) when the variance is below `variance_floor`.
pub fn epsilon_step(term: &Term, target_mean: f64, tau: &DensityMatrix, variance_floor: f64) -> EpsilonStep {
    epsilon_on_matrix(term, target_mean, tau.matrix(), variance_floor)
}

fn epsilon_on_matrix(term: &Term, target: f64, tau: &CMatrix, variance_floor: f64) -> EpsilonStep {
    let mean = term.trace_with(tau);
    let variance = term.square_trace_with(tau) - mean * mean;
    if variance < variance_floor {
        return EpsilonStep { value: 0.0, mean, variance, skipped: true };
    }
    EpsilonStep { value: (target - mean) / variance, mean, variance, skipped: false }
}

/// Largest `|tr((τ − ρ) σ_α)|` over all Pauli strings of weight `1..=k`.
pub fn max_moment_mismatch(rho: &CMatrix, tau: &CMatrix, k: usize) -> Result<f64, ProjectionError> {
    let n = crate::pauli::qubits_for_dim(rho.dim())?;
    let diff = tau.sub(rho);
    Ok(enumerate_basis(n, k)?.iter().map(|a| trace_with(a, &diff).re.abs()).fold(0.0, f64::max))
}

pub(crate) struct Iterate {
    pub theta: Vec<f64>,
    pub tau: CMatrix,
    pub distance_nats: f64,
    pub residual: f64,
    pub at: usize,
}

pub(crate) fn pack_result(
    basis: &ProjectionBasis,
    it: Iterate,
    sweeps: usize,
    converged: bool,
    skipped: usize,
    history: Vec<SweepRecord>,
) -> ProjectionResult {
    ProjectionResult {
        k: basis.k,
        coeffs: HamiltonianCoeffs { labels: basis.labels(), theta: it.theta },
        tau: DensityMatrix::from_trusted(basis.n, it.tau),
        distance_bits: it.distance_nats.max(0.0) / LN_2,
        residual: it.residual,
        sweeps,
        selected_at: it.at,
        converged,
        boundary: false,
        skipped_updates: skipped,
        history,
    }
}

pub(crate) fn check_inputs(rho: &DensityMatrix, basis: &ProjectionBasis, k: usize) -> Result<(), ProjectionError> {
    let n = rho.num_qubits();
    if k == 0 || k > n {
        return Err(ProjectionError::WeightBound { k, n });
    }
    if basis.n != n || basis.k != k {
        return Err(ProjectionError::BasisMismatch { basis: basis.n, basis_k: basis.k, n, k });
    }
    if basis.is_reduced() && !is_invariant_state(rho, &basis.generators) {
        return Err(ProjectionError::StateNotInvariant);
    }
    Ok(())
}

/// Information projection of `ρ` onto the `k`-party family.
///
/// With `basis = None` the full Pauli basis of weight `1..=k` is swept;
/// otherwise the symmetry-reduced basis is used, and `ρ` must be invariant
/// under its generators.
pub fn project(
    rho: &DensityMatrix,
    k: usize,
    cfg: &ProjectionConfig,
    basis: Option<&InvariantBasis>,
) -> Result<ProjectionResult, ProjectionError> {
    let basis = match basis {
        Some(b) => ProjectionBasis::from_invariant(b),
        None => ProjectionBasis::full(rho.num_qubits(), k)?,
    };
    project_with_basis(rho, &basis, cfg)
}

/// [`project`] over an explicit basis.
pub fn project_with_basis(
    rho: &DensityMatrix,
    basis: &ProjectionBasis,
    cfg: &ProjectionConfig,
) -> Result<ProjectionResult, ProjectionError> {
    cfg.validate()?;
    check_inputs(rho, basis, basis.k)?;
    let n = rho.num_qubits();
    let dim = rho.dim();
    let targets = basis.moments(rho.matrix());
    let entropy = entropy_nats(rho.matrix());
    // D(ρ‖τ) = −S(ρ) − tr ρ ln τ with ln τ = H − ψ.
    let distance = |theta: &[f64], psi: f64| -> f64 {
        let pairing: f64 = theta.iter().zip(&targets).map(|(t, m)| t * m).sum();
        psi - pairing - entropy
    };
    let residual_of = |tau: &CMatrix| -> f64 {
        basis.terms.iter().zip(&targets).map(|(t, m)| (t.trace_with(tau) - m).abs()).fold(0.0, f64::max)
    };

    let mut theta = alloc::vec![0.0; basis.len()];
    let mut h = CMatrix::zeros(dim);
    let mut tau = CMatrix::identity(dim).scale(1.0 / dim as f64);
    let mut psi = n as f64 * LN_2;
    let mut skipped = 0;
    let mut history = Vec::new();
    let mut best = Iterate {
        theta: theta.clone(),
        tau: tau.clone(),
        distance_nats: distance(&theta, psi),
        residual: residual_of(&tau),
        at: 0,
    };

    for sweep in 1..=cfg.max_sweeps {
        for (a, term) in basis.terms.iter().enumerate() {
            let step = epsilon_on_matrix(term, targets[a], &tau, cfg.variance_floor);
            if step.skipped {
                skipped += 1;
                continue;
            }
            let delta = cfg.omega * step.value;
            if delta == 0.0 {
                continue;
            }
            let updated = theta[a] + delta;
            if !updated.is_finite() || updated.abs() > cfg.theta_cap {
                let current = Iterate {
                    theta: theta.clone(),
                    tau: tau.clone(),
                    distance_nats: distance(&theta, psi),
                    residual: residual_of(&tau),
                    at: sweep,
                };
                let chosen = if cfg.track_best && best.distance_nats <= current.distance_nats { best } else { current };
                let best = pack_result(basis, chosen, sweep, false, skipped, history);
                return Err(ProjectionError::Divergence {
                    term: term.label.clone(),
                    value: updated,
                    cap: cfg.theta_cap,
                    best: Box::new(best),
                });
            }
            theta[a] = updated;
            term.add_to(&mut h, delta);
            let (next, next_psi) = gibbs_state(&h)?;
            tau = next;
            psi = next_psi;
        }
        let residual = residual_of(&tau);
        let dist = distance(&theta, psi);
        history.push(SweepRecord { residual, distance_bits: dist.max(0.0) / LN_2 });
        let current = || Iterate { theta: theta.clone(), tau: tau.clone(), distance_nats: dist, residual, at: sweep };
        if residual <= cfg.tol {
            return Ok(pack_result(basis, current(), sweep, true, skipped, history));
        }
        if !cfg.track_best || dist < best.distance_nats {
            best = current();
        }
    }
    let sweeps = cfg.max_sweeps;
    Ok(pack_result(basis, best, sweeps, false, skipped, history))
}

/// `ρ̃_1 = ⊗_i ρ_i` from the single-qubit marginals, without iteration.
pub fn project_product(rho: &DensityMatrix) -> Result<ProjectionResult, ProjectionError> {
    let n = rho.num_qubits();
    let marginals = (0..n).map(|q| partial_trace(rho, &[q])).collect::<Result<Vec<_>, _>>()?;
    let mut tau = marginals[0].matrix().clone();
    for m in &marginals[1..] {
        tau = tau.kron(m.matrix());
    }
    let spectra = marginals
        .iter()
        .map(|m| crate::linalg::eig_hermitian(m.matrix()))
        .collect::<Result<Vec<_>, _>>()?;
    let boundary = spectra.iter().any(|s| s.eigenvalues()[0] <= crate::linalg::LOG_FLOOR);

    let basis = ProjectionBasis::full(n, 1)?;
    let theta = if boundary {
        Vec::new()
    } else {
        let logs: Vec<CMatrix> = spectra.iter().map(|s| s.map(math::ln)).collect();
        basis
            .terms
            .iter()
            .map(|t| {
                let (alpha, _) = t.components[0];
                let site = alpha.support()[0];
                let local = MultiIndex::single(1, 0, alpha.get(site)).expect("single qubit");
                0.5 * trace_with(&local, &logs[site]).re
            })
            .collect()
    };
    let labels = if boundary { Vec::new() } else { basis.labels() };
    let residual = basis
        .terms
        .iter()
        .map(|t| (t.trace_with(&tau) - t.trace_with(rho.matrix())).abs())
        .fold(0.0, f64::max);
    let tau = DensityMatrix::from_trusted(n, tau);
    let distance_bits = if boundary {
        crate::linalg::relative_entropy(rho, &tau)?
    } else {
        (entropy_nats(tau.matrix()) - entropy_nats(rho.matrix())).max(0.0) / LN_2
    };
    Ok(ProjectionResult {
        k: 1,
        coeffs: HamiltonianCoeffs { labels, theta },
        tau,
        distance_bits,
        residual,
        sweeps: 0,
        selected_at: 0,
        converged: true,
        boundary,
        skipped_updates: 0,
        history: Vec::new(),
    })
}
