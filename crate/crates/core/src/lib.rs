//! Information projections of multi-qubit density matrices onto the
//! exponential families of thermal states of k-party Hamiltonians.
//!
//! For a state `ρ` on `n` qubits and a bound `k`, the projection `ρ̃_k` is the
//! full-rank state `exp(H)/tr exp(H)` where `H` has only terms acting on at
//! most `k` qubits and `ρ̃_k` reproduces every `k`-qubit marginal of `ρ`. The
//! relative entropy `D_k = D(ρ‖ρ̃_k)` measures how much of the structure of
//! `ρ` is not explained by `k`-party interactions; the differences
//! `C_k = D_{k-1} - D_k` isolate the irreducible `k`-party part.
//!
//! Modules:
//!
//! | module | contents |
//! |--------|----------|
//! | [`pauli`] | multi-index Pauli strings, Bloch vectors, partial traces |
//! | [`matrix`] | dense complex square matrices |
//! | [`linalg`] | Hermitian eigensolver, `exp`/`log`, entropies, free energy |
//! | [`state`] | validated density matrices and benchmark families |
//! | [`symmetry`] | finite symmetry groups and invariant operator bases |
//! | [`projection`] | the iterative per-term projection algorithm |
//! | [`dual`] | convex dual minimisation, used as an independent check |
//! | [`measures`] | `D_k` ladders, `C_k` in three forms, multi-information |
//!
//! The crate is `no_std` and only needs `alloc`. IO, file formats and the
//! command-line frontend live in the `qip` crate.

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod dual;
pub mod linalg;
pub mod math;
pub mod matrix;
pub mod measures;
pub mod pauli;
pub mod projection;
#[cfg(any(test, feature = "rand"))]
pub mod random;
pub mod state;
pub mod symmetry;

pub use dual::{dual_objective, minimize_dual, minimize_dual_from, DualConfig, DualEvaluation};
pub use linalg::{
    eig_hermitian, free_energy, matrix_exp_hermitian, matrix_log_psd, relative_entropy,
    trace_distance, von_neumann_entropy, LinalgError, SpectralDecomposition,
};
pub use matrix::CMatrix;
pub use measures::{
    d1_un_invariant, distance, distance_with_basis, interaction_ladder, multi_information, DistanceReport,
    InteractionMeasure, MeasureError, MeasureReport, Method, Outcome, ProjectorRun,
};
pub use pauli::{
    basis_size, bloch_from_state, enumerate_basis, expectation, partial_trace, pauli_matrix,
    state_from_bloch, BlochVector, MultiIndex, Pauli, PauliError, MAX_QUBITS,
};
pub use projection::{
    epsilon_step, max_moment_mismatch, project, project_product, project_with_basis, EpsilonStep, HamiltonianCoeffs, ProjectionBasis,
    ProjectionConfig, ProjectionError, ProjectionResult, SweepRecord, Term,
};
pub use state::{dicke, ghz, validate_state, white_noise_mix, DensityMatrix, StateError, StateSpec};
pub use symmetry::{
    conjugate_index, generate_group, invariant_basis, is_invariant_state, GroupElement,
    InvariantBasis, InvariantElement, SignedIndex, SymmetryError, SymmetryGenerator,
    SymmetryGroup, DEFAULT_GROUP_CAP,
};

/// `ln 2`, the conversion factor between nats and bits.
pub const LN_2: f64 = core::f64::consts::LN_2;
