//! Finite symmetry groups built from qubit permutations and Pauli-string
//! conjugations, and the operator bases they leave invariant.
//!
//! If `U ρ U† = ρ` for every element `U` of a group that maps `k`-party
//! Hamiltonians to `k`-party Hamiltonians, the projection of `ρ` shares the
//! symmetry and the optimisation can be restricted to invariant
//! Hamiltonians. Both generator kinds map Pauli strings to signed Pauli
//! strings, so orbit averages are computed exactly with `±1` bookkeeping.

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use crate::math;
use crate::matrix::CMatrix;
use crate::pauli::{enumerate_basis, MultiIndex, PauliError};
use crate::state::DensityMatrix;

pub const DEFAULT_GROUP_CAP: usize = 4096;
/// `‖U ρ U† − ρ‖_max` accepted as invariant.
pub const INVARIANCE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymmetryError {
    #[error("permutation {0:?} is not a bijection of the qubits")]
    NotAPermutation(Vec<usize>),
    #[error("generator acts on {generator} qubits, system has {system}")]
    SizeMismatch { generator: usize, system: usize },
    #[error("group exceeds {0} elements")]
    GroupTooLarge(usize),
    #[error("group size cap must be at least 1")]
    ZeroCap,
    #[error(transparent)]
    Pauli(#[from] PauliError),
}

/// One generator of a finite symmetry group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SymmetryGenerator {
    /// Qubit `i` is moved to position `perm[i]` (0-based).
    QubitPermutation(Vec<usize>),
    /// Conjugation by the Pauli string `σ_β`.
    PauliConjugation(MultiIndex),
}

impl SymmetryGenerator {
    /// Exchange of qubits `a` and `b` (0-based).
    pub fn swap(n: usize, a: usize, b: usize) -> Self {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.swap(a, b);
        SymmetryGenerator::QubitPermutation(perm)
    }

    pub fn num_qubits(&self) -> usize {
        match self {
            SymmetryGenerator::QubitPermutation(p) => p.len(),
            SymmetryGenerator::PauliConjugation(b) => b.num_qubits(),
        }
    }

    fn validate(&self, n: usize) -> Result<(), SymmetryError> {
        if self.num_qubits() != n {
            return Err(SymmetryError::SizeMismatch { generator: self.num_qubits(), system: n });
        }
        if let SymmetryGenerator::QubitPermutation(p) = self {
            let mut seen = p.clone();
            seen.sort_unstable();
            if seen.iter().enumerate().any(|(i, &v)| i != v) {
                return Err(SymmetryError::NotAPermutation(p.clone()));
            }
        }
        Ok(())
    }

    fn as_element(&self) -> GroupElement {
        match self {
            SymmetryGenerator::QubitPermutation(p) => GroupElement {
                perm: p.clone(),
                pauli: MultiIndex::identity(p.len()).expect("validated size"),
            },
            SymmetryGenerator::PauliConjugation(b) => {
                GroupElement { perm: (0..b.num_qubits()).collect(), pauli: *b }
            }
        }
    }

    /// `U ρ U†` for the generator's unitary.
    pub fn conjugate_matrix(&self, m: &CMatrix) -> CMatrix {
        self.as_element().conjugate_matrix(m)
    }
}

/// Adjacent transpositions generating the full symmetric group on `n` qubits.
pub fn full_permutation_generators(n: usize) -> Vec<SymmetryGenerator> {
    (0..n.saturating_sub(1)).map(|i| SymmetryGenerator::swap(n, i, i + 1)).collect()
}

/// `±σ_α`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct SignedIndex {
    pub index: MultiIndex,
    pub sign: i8,
}

/// Group element `U = σ_β P_π`, tracked up to a global phase (which drops
/// out of every conjugation).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct GroupElement {
    perm: Vec<usize>,
    pauli: MultiIndex,
}

impl GroupElement {
    pub fn identity(n: usize) -> Result<Self, SymmetryError> {
        Ok(Self { perm: (0..n).collect(), pauli: MultiIndex::identity(n)? })
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    pub fn pauli(&self) -> &MultiIndex {
        &self.pauli
    }

    /// `U σ_α U† = sign · σ_{α'}`.
    pub fn conjugate(&self, alpha: &MultiIndex) -> SignedIndex {
        let moved = alpha.permuted(&self.perm);
        let sign = if self.pauli.commutes_with(&moved) { 1 } else { -1 };
        SignedIndex { index: moved, sign }
    }

    /// `self ∘ other`: conjugating by the result applies `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        let perm = other.perm.iter().map(|&i| self.perm[i]).collect();
        let (_, pauli) = self.pauli.mul(&other.pauli.permuted(&self.perm));
        Self { perm, pauli }
    }

    /// `U M U†`.
    pub fn conjugate_matrix(&self, m: &CMatrix) -> CMatrix {
        let n = self.perm.len();
        let dim = m.dim();
        let permute_bits = |x: usize| -> usize {
            let mut out = 0;
            for (i, &t) in self.perm.iter().enumerate() {
                if x & (1 << (n - 1 - i)) != 0 {
                    out |= 1 << (n - 1 - t);
                }
            }
            out
        };
        let targets: Vec<usize> = (0..dim).map(permute_bits).collect();
        let mut permuted = CMatrix::zeros(dim);
        for x in 0..dim {
            for y in 0..dim {
                permuted[(targets[x], targets[y])] = m[(x, y)];
            }
        }
        if self.pauli.is_identity() {
            return permuted;
        }
        let flip = self.pauli.flip_mask();
        let phases: Vec<_> = (0..dim).map(|x| self.pauli.phase(x)).collect();
        let mut out = CMatrix::zeros(dim);
        for x in 0..dim {
            for y in 0..dim {
                out[(x ^ flip, y ^ flip)] = phases[x] * permuted[(x, y)] * phases[y].conj();
            }
        }
        out
    }
}

/// `g σ_α g†` as a signed index.
pub fn conjugate_index(g: &SymmetryGenerator, alpha: &MultiIndex) -> SignedIndex {
    match g {
        SymmetryGenerator::QubitPermutation(p) => SignedIndex { index: alpha.permuted(p), sign: 1 },
        SymmetryGenerator::PauliConjugation(b) => {
            SignedIndex { index: *alpha, sign: if b.commutes_with(alpha) { 1 } else { -1 } }
        }
    }
}

/// Closure of a generator set.
#[derive(Clone, Debug)]
pub struct SymmetryGroup {
    n: usize,
    generators: Vec<SymmetryGenerator>,
    elements: Vec<GroupElement>,
}

impl SymmetryGroup {
    pub fn trivial(n: usize) -> Result<Self, SymmetryError> {
        generate_group(n, &[], DEFAULT_GROUP_CAP)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[SymmetryGenerator] {
        &self.generators
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }
}

/// Closes `gens` under composition; fails once more than `cap` elements appear.
pub fn generate_group(
    n: usize,
    gens: &[SymmetryGenerator],
    cap: usize,
) -> Result<SymmetryGroup, SymmetryError> {
    if cap == 0 {
        return Err(SymmetryError::ZeroCap);
    }
    for g in gens {
        g.validate(n)?;
    }
    let gen_elements: Vec<GroupElement> = gens.iter().map(SymmetryGenerator::as_element).collect();
    let identity = GroupElement::identity(n)?;
    let mut seen = BTreeSet::new();
    let mut order = Vec::new();
    let mut queue = VecDeque::new();
    seen.insert(identity.clone());
    order.push(identity.clone());
    queue.push_back(identity);
    while let Some(e) = queue.pop_front() {
        for g in &gen_elements {
            let next = g.compose(&e);
            if seen.insert(next.clone()) {
                if seen.len() > cap {
                    return Err(SymmetryError::GroupTooLarge(cap));
                }
                order.push(next.clone());
                queue.push_back(next);
            }
        }
    }
    Ok(SymmetryGroup { n, generators: gens.to_vec(), elements: order })
}

/// Normalised orbit sum `(1/√m) Σ_j s_j σ_{α_j}`.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantElement {
    terms: Vec<SignedIndex>,
}

impl InvariantElement {
    pub fn terms(&self) -> &[SignedIndex] {
        &self.terms
    }

    /// Common magnitude of the coefficients, so that `tr(A²) = 2^n`.
    pub fn coefficient(&self) -> f64 {
        1.0 / math::sqrt(self.terms.len() as f64)
    }

    /// Lexicographically smallest index in the orbit.
    pub fn representative(&self) -> &MultiIndex {
        &self.terms[0].index
    }

    pub fn weight(&self) -> usize {
        self.representative().weight()
    }

    /// `ZZI` for single-term elements, `sym(XXI)` for larger orbits.
    pub fn label(&self) -> String {
        if self.terms.len() == 1 {
            self.representative().label()
        } else {
            alloc::format!("sym({})", self.representative().label())
        }
    }
}

/// Basis of the group-invariant traceless operators of weight `≤ k`.
#[derive(Clone, Debug)]
pub struct InvariantBasis {
    n: usize,
    k: usize,
    elements: Vec<InvariantElement>,
    generators: Vec<SymmetryGenerator>,
}

impl InvariantBasis {
    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn weight_bound(&self) -> usize {
        self.k
    }

    pub fn elements(&self) -> &[InvariantElement] {
        &self.elements
    }

    pub fn generators(&self) -> &[SymmetryGenerator] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Orbit-averages every Pauli string of weight `1..=k` over `group`.
///
/// An orbit in which some index occurs with both signs averages to zero and
/// is dropped. Surviving orbits are disjoint, hence mutually orthogonal.
pub fn invariant_basis(n: usize, k: usize, group: &SymmetryGroup) -> Result<InvariantBasis, SymmetryError> {
    if group.n != n {
        return Err(SymmetryError::SizeMismatch { generator: group.n, system: n });
    }
    let mut seen = BTreeSet::new();
    let mut elements = Vec::new();
    for alpha in enumerate_basis(n, k)? {
        if seen.contains(&alpha) {
            continue;
        }
        let mut orbit: BTreeMap<MultiIndex, i8> = BTreeMap::new();
        let mut cancelled = false;
        for g in &group.elements {
            let image = g.conjugate(&alpha);
            match orbit.get(&image.index) {
                Some(&s) if s != image.sign => cancelled = true,
                Some(_) => {}
                None => {
                    orbit.insert(image.index, image.sign);
                }
            }
        }
        seen.extend(orbit.keys().copied());
        if cancelled {
            continue;
        }
        let terms = orbit.into_iter().map(|(index, sign)| SignedIndex { index, sign }).collect();
        elements.push(InvariantElement { terms });
    }
    Ok(InvariantBasis { n, k, elements, generators: group.generators.clone() })
}

/// True when `‖g ρ g† − ρ‖_max ≤ 1e-9` for every generator.
pub fn is_invariant_state(rho: &DensityMatrix, gens: &[SymmetryGenerator]) -> bool {
    gens.iter().all(|g| {
        g.num_qubits() == rho.num_qubits()
            && g.validate(rho.num_qubits()).is_ok()
            && g.conjugate_matrix(rho.matrix()).sub(rho.matrix()).max_abs() <= INVARIANCE_TOL
    })
}
