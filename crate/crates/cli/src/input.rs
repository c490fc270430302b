//! State specifications, symmetry specifications and configuration overrides.
//!
//! JSON arguments are given inline (anything starting with `{`) or as a path
//! to a file containing the JSON document.

use qip_core::symmetry::full_permutation_generators;
use qip_core::{
    generate_group, is_invariant_state, DensityMatrix, Method, MultiIndex, ProjectionConfig, StateSpec,
    SymmetryGenerator, SymmetryGroup, DEFAULT_GROUP_CAP,
};
use serde::Deserialize;

use crate::error::CliError;

/// Inline JSON or the contents of the named file.
pub fn json_text(arg: &str) -> Result<String, CliError> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        Ok(arg.to_owned())
    } else {
        std::fs::read_to_string(arg).map_err(|e| CliError::Spec(format!("cannot read {arg}: {e}")))
    }
}

pub fn parse_state_spec(arg: &str) -> Result<StateSpec, CliError> {
    serde_json::from_str(&json_text(arg)?).map_err(|e| CliError::Spec(format!("state spec: {e}")))
}

pub fn build_state(spec: &StateSpec) -> Result<DensityMatrix, CliError> {
    spec.build().map_err(|e| CliError::Spec(format!("state: {e}")))
}

/// `{"permutations": [[2, 1, 3]] | "all", "pauli": ["ZZI", …]}`.
///
/// Permutations are 1-based: `[2, 1, 3]` sends qubit 1 to position 2 and
/// qubit 2 to position 1. Pauli strings use `I` (or `1`), `X`, `Y`, `Z`.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymmetrySpec {
    #[serde(default)]
    pub permutations: Permutations,
    #[serde(default)]
    pub pauli: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Permutations {
    Named(String),
    Explicit(Vec<Vec<usize>>),
}

impl Default for Permutations {
    fn default() -> Self {
        Permutations::Explicit(Vec::new())
    }
}

impl SymmetrySpec {
    pub fn generators(&self, n: usize) -> Result<Vec<SymmetryGenerator>, CliError> {
        let mut gens = match &self.permutations {
            Permutations::Named(name) if name == "all" => full_permutation_generators(n),
            Permutations::Named(name) => {
                return Err(CliError::Spec(format!("permutations must be a list or \"all\", got {name:?}")))
            }
            Permutations::Explicit(list) => list
                .iter()
                .map(|perm| {
                    let mut sorted = perm.clone();
                    sorted.sort_unstable();
                    if sorted != (1..=n).collect::<Vec<_>>() {
                        return Err(CliError::Spec(format!("permutation {perm:?} is not a permutation of 1..={n}")));
                    }
                    Ok(SymmetryGenerator::QubitPermutation(perm.iter().map(|p| p - 1).collect()))
                })
                .collect::<Result<_, _>>()?,
        };
        for label in &self.pauli {
            let index = MultiIndex::parse(label).map_err(|e| CliError::Spec(format!("pauli {label:?}: {e}")))?;
            if index.num_qubits() != n {
                return Err(CliError::Spec(format!("pauli {label:?} acts on {} qubits, state has {n}", index.num_qubits())));
            }
            gens.push(SymmetryGenerator::PauliConjugation(index));
        }
        Ok(gens)
    }
}

/// `--symmetry none | auto-permutation | <json>`.
#[derive(Clone, Debug, Default, PartialEq)]
pub enum SymmetryChoice {
    #[default]
    None,
    AutoPermutation,
    Explicit(SymmetrySpec),
}

impl SymmetryChoice {
    pub fn parse(arg: &str) -> Result<Self, CliError> {
        match arg {
            "none" => Ok(SymmetryChoice::None),
            "auto-permutation" => Ok(SymmetryChoice::AutoPermutation),
            other => serde_json::from_str(&json_text(other)?)
                .map(SymmetryChoice::Explicit)
                .map_err(|e| CliError::Spec(format!("symmetry spec: {e}"))),
        }
    }

    fn source(&self) -> &'static str {
        match self {
            SymmetryChoice::None => "none",
            SymmetryChoice::AutoPermutation => "auto-permutation",
            SymmetryChoice::Explicit(_) => "explicit",
        }
    }

    /// Turns the choice into a group for `rho`.
    ///
    /// Explicit generators must all leave `rho` invariant; auto-detection
    /// tests the adjacent transpositions and uses the full permutation group
    /// only if all of them pass.
    pub fn resolve(&self, rho: &DensityMatrix) -> Result<ResolvedSymmetry, CliError> {
        let n = rho.num_qubits();
        let gens = match self {
            SymmetryChoice::None => Vec::new(),
            SymmetryChoice::AutoPermutation => {
                let gens = full_permutation_generators(n);
                if gens.iter().all(|g| is_invariant_state(rho, std::slice::from_ref(g))) {
                    gens
                } else {
                    Vec::new()
                }
            }
            SymmetryChoice::Explicit(spec) => {
                let gens = spec.generators(n)?;
                if let Some(g) = gens.iter().find(|g| !is_invariant_state(rho, std::slice::from_ref(*g))) {
                    return Err(CliError::Spec(format!("state is not invariant under generator {}", generator_label(g))));
                }
                gens
            }
        };
        let group = if gens.is_empty() {
            None
        } else {
            Some(generate_group(n, &gens, DEFAULT_GROUP_CAP).map_err(|e| CliError::Spec(format!("symmetry: {e}")))?)
        };
        Ok(ResolvedSymmetry { source: self.source(), group })
    }
}

/// Human-readable generator: `perm(2,1,3)` (1-based) or the Pauli label.
pub fn generator_label(g: &SymmetryGenerator) -> String {
    match g {
        SymmetryGenerator::QubitPermutation(p) => {
            let parts: Vec<String> = p.iter().map(|i| (i + 1).to_string()).collect();
            format!("perm({})", parts.join(","))
        }
        SymmetryGenerator::PauliConjugation(b) => b.label(),
    }
}

#[derive(Clone, Debug)]
pub struct ResolvedSymmetry {
    pub source: &'static str,
    /// `None` when no symmetry is used (including failed auto-detection).
    pub group: Option<SymmetryGroup>,
}

/// Flags that override the size-dependent projector defaults.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConfigOverrides {
    pub omega: Option<f64>,
    pub max_sweeps: Option<usize>,
    pub tol: Option<f64>,
}

impl ConfigOverrides {
    pub fn config(&self, n: usize) -> Result<ProjectionConfig, CliError> {
        let mut cfg = ProjectionConfig::for_qubits(n);
        if let Some(w) = self.omega {
            cfg.omega = w;
        }
        if let Some(s) = self.max_sweeps {
            cfg.max_sweeps = s;
        }
        if let Some(t) = self.tol {
            cfg.tol = t;
        }
        cfg.validate().map_err(CliError::spec)?;
        Ok(cfg)
    }
}

/// Settings shared by the computing subcommands.
#[derive(Clone, Debug, PartialEq)]
pub struct RunOptions {
    pub overrides: ConfigOverrides,
    pub method: Method,
    pub symmetry: SymmetryChoice,
    /// Worker threads; `None` uses all available cores.
    pub jobs: Option<usize>,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { overrides: ConfigOverrides::default(), method: Method::Iterative, symmetry: SymmetryChoice::None, jobs: None }
    }
}

pub fn parse_method(s: &str) -> Result<Method, CliError> {
    match s {
        "iterative" => Ok(Method::Iterative),
        "dual" => Ok(Method::Dual),
        "both" => Ok(Method::Both),
        other => Err(CliError::Spec(format!("unknown method {other:?}"))),
    }
}

pub fn thread_pool(jobs: Option<usize>) -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        if j == 0 {
            return Err(CliError::Spec("--jobs must be at least 1".into()));
        }
        builder = builder.num_threads(j);
    }
    builder.build().map_err(CliError::compute)
}
