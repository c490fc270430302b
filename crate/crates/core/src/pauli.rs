//! Pauli strings over `n` qubits, Bloch vectors and partial traces.
//!
//! A [`MultiIndex`] `α = (α_1, …, α_n)` with `α_i ∈ {0,1,2,3}` names the
//! operator `σ_α = σ_{α_1} ⊗ ⋯ ⊗ σ_{α_n}` (0 = identity, 1 = X, 2 = Y,
//! 3 = Z). Qubit 1 is the first tensor factor and the most significant bit
//! of a computational basis index.
//!
//! Internally an index is stored in symplectic form: two bit masks marking
//! the sites that carry an X-part and a Z-part (Y has both). Every Pauli
//! string is then a phased permutation matrix,
//! `σ_α |x⟩ = i^{#Y} (−1)^{|x ∧ z|} |x ⊕ x_mask⟩`, which is what the
//! matrix-free routines below exploit.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use thiserror::Error;

use crate::math;
use crate::matrix::{c, CMatrix, C64};
use crate::state::DensityMatrix;

/// Hard cap on the number of qubits (dense matrices of dimension `2^12`).
pub const MAX_QUBITS: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PauliError {
    #[error("system size {0} outside 1..={MAX_QUBITS}")]
    DimensionCap(usize),
    #[error("index has {index} sites but the operator acts on {system} qubits")]
    SizeMismatch { index: usize, system: usize },
    #[error("invalid Pauli label {0:?}")]
    InvalidLabel(String),
    #[error("weight bound k = {k} outside 1..={n}")]
    WeightBound { k: usize, n: usize },
    #[error("partial trace needs at least one kept qubit")]
    EmptyKeepSet,
    #[error("qubit {qubit} is not part of a {n}-qubit system")]
    QubitOutOfRange { qubit: usize, n: usize },
    #[error("dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),
}

/// Single-site Pauli operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pauli {
    I = 0,
    X = 1,
    Y = 2,
    Z = 3,
}

impl Pauli {
    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(Pauli::I),
            1 => Some(Pauli::X),
            2 => Some(Pauli::Y),
            3 => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn from_char(ch: char) -> Option<Self> {
        match ch {
            'I' | 'i' | '1' | '0' => Some(Pauli::I),
            'X' | 'x' => Some(Pauli::X),
            'Y' | 'y' => Some(Pauli::Y),
            'Z' | 'z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        ['I', 'X', 'Y', 'Z'][self as usize]
    }

    fn bits(self) -> (u16, u16) {
        match self {
            Pauli::I => (0, 0),
            Pauli::X => (1, 0),
            Pauli::Y => (1, 1),
            Pauli::Z => (0, 1),
        }
    }
}

/// Multi-index naming one Pauli string `σ_α` on `n` qubits.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    n: u8,
    x: u16,
    z: u16,
}

impl MultiIndex {
    /// The all-identity index on `n` qubits.
    pub fn identity(n: usize) -> Result<Self, PauliError> {
        check_size(n)?;
        Ok(Self { n: n as u8, x: 0, z: 0 })
    }

    pub fn new(paulis: &[Pauli]) -> Result<Self, PauliError> {
        let n = paulis.len();
        check_size(n)?;
        let mut idx = Self { n: n as u8, x: 0, z: 0 };
        for (site, &p) in paulis.iter().enumerate() {
            idx.set(site, p);
        }
        Ok(idx)
    }

    /// From codes in `{0,1,2,3}` (0 = I, 1 = X, 2 = Y, 3 = Z).
    pub fn from_codes(codes: &[u8]) -> Result<Self, PauliError> {
        let paulis = codes
            .iter()
            .map(|&cd| Pauli::from_code(cd).ok_or_else(|| PauliError::InvalidLabel(alloc::format!("{codes:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(&paulis)
    }

    /// Parses a label such as `"ZZI"` or `"XX1"`.
    pub fn parse(label: &str) -> Result<Self, PauliError> {
        let paulis = label
            .chars()
            .map(|ch| Pauli::from_char(ch).ok_or_else(|| PauliError::InvalidLabel(label.into())))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(&paulis)
    }

    /// Index acting with `p` on the single qubit `site` of an `n`-qubit system.
    pub fn single(n: usize, site: usize, p: Pauli) -> Result<Self, PauliError> {
        let mut idx = Self::identity(n)?;
        if site >= n {
            return Err(PauliError::QubitOutOfRange { qubit: site, n });
        }
        idx.set(site, p);
        Ok(idx)
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.n as usize
    }

    #[inline]
    fn bit(&self, site: usize) -> u16 {
        1 << (self.n as usize - 1 - site)
    }

    fn set(&mut self, site: usize, p: Pauli) {
        let b = self.bit(site);
        let (px, pz) = p.bits();
        self.x = (self.x & !b) | if px == 1 { b } else { 0 };
        self.z = (self.z & !b) | if pz == 1 { b } else { 0 };
    }

    /// Pauli at qubit position `site` (0-based, first tensor factor first).
    pub fn get(&self, site: usize) -> Pauli {
        let b = self.bit(site);
        match (self.x & b != 0, self.z & b != 0) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn paulis(&self) -> Vec<Pauli> {
        (0..self.num_qubits()).map(|s| self.get(s)).collect()
    }

    /// Entries as codes in `{0,1,2,3}`.
    pub fn codes(&self) -> Vec<u8> {
        self.paulis().into_iter().map(|p| p as u8).collect()
    }

    /// Number of non-identity factors.
    #[inline]
    pub fn weight(&self) -> usize {
        (self.x | self.z).count_ones() as usize
    }

    #[inline]
    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Qubit positions carrying a non-identity factor.
    pub fn support(&self) -> Vec<usize> {
        (0..self.num_qubits()).filter(|&s| self.get(s) != Pauli::I).collect()
    }

    /// Bit mask flipped by `σ_α` acting on computational basis indices.
    #[inline]
    pub fn flip_mask(&self) -> usize {
        self.x as usize
    }

    #[inline]
    pub fn phase_mask(&self) -> usize {
        self.z as usize
    }

    #[inline]
    fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    /// `σ_α |x⟩ = phase(x) · |x ⊕ flip_mask⟩`.
    #[inline]
    pub fn phase(&self, basis_state: usize) -> C64 {
        let k = self.y_count() + 2 * ((basis_state & self.z as usize).count_ones() & 1);
        i_pow(k)
    }

    /// True when `σ_α` and `σ_β` commute.
    pub fn commutes_with(&self, other: &Self) -> bool {
        ((self.x & other.z) ^ (self.z & other.x)).count_ones().is_multiple_of(2)
    }

    /// `σ_α σ_β = i^k σ_γ`, returned as `(k mod 4, γ)`.
    pub fn mul(&self, other: &Self) -> (u32, Self) {
        debug_assert_eq!(self.n, other.n);
        // σ_α = i^{y_α} X^{x_α} Z^{z_α}; moving Z^{z_α} past X^{x_β} costs (−1)^{|z_α ∧ x_β|}.
        let x = self.x ^ other.x;
        let z = self.z ^ other.z;
        let y_new = (x & z).count_ones();
        let k = self.y_count() + other.y_count() + 2 * (self.z & other.x).count_ones();
        // i^{y_α + y_β} (−1)^{..} X^x Z^z = i^{k - y_new} σ_γ
        let phase = (k + 4 * 12 - y_new) % 4;
        (phase, Self { n: self.n, x, z })
    }

    /// Index with entries moved by the qubit permutation `perm` (entry at
    /// position `i` goes to position `perm[i]`).
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut out = Self { n: self.n, x: 0, z: 0 };
        for (site, &target) in perm.iter().enumerate() {
            out.set(target, self.get(site));
        }
        out
    }

    /// Base-4 key with qubit 1 most significant; orders indices lexicographically.
    fn key(&self) -> u32 {
        (0..self.num_qubits()).fold(0u32, |acc, s| acc * 4 + self.get(s) as u32)
    }

    fn from_key(n: usize, mut key: u32) -> Self {
        let mut idx = Self { n: n as u8, x: 0, z: 0 };
        for site in (0..n).rev() {
            idx.set(site, Pauli::from_code((key % 4) as u8).unwrap_or(Pauli::I));
            key /= 4;
        }
        idx
    }

    /// Label like `"XZI"`.
    pub fn label(&self) -> String {
        self.paulis().into_iter().map(Pauli::as_char).collect()
    }
}

#[inline]
fn i_pow(k: u32) -> C64 {
    match k % 4 {
        0 => c(1.0, 0.0),
        1 => c(0.0, 1.0),
        2 => c(-1.0, 0.0),
        _ => c(0.0, -1.0),
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n.cmp(&other.n).then_with(|| self.key().cmp(&other.key()))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiIndex({})", self.label())
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

fn check_size(n: usize) -> Result<(), PauliError> {
    if n == 0 || n > MAX_QUBITS {
        Err(PauliError::DimensionCap(n))
    } else {
        Ok(())
    }
}

/// `n` such that `dim = 2^n`.
pub fn qubits_for_dim(dim: usize) -> Result<usize, PauliError> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(PauliError::NotPowerOfTwo(dim));
    }
    let n = dim.trailing_zeros() as usize;
    check_size(n)?;
    Ok(n)
}

/// Count of nonzero entries of `α`.
pub fn weight(alpha: &MultiIndex) -> usize {
    alpha.weight()
}

/// Dense `2^n × 2^n` matrix of `σ_α`.
pub fn pauli_matrix(alpha: &MultiIndex) -> CMatrix {
    let dim = 1usize << alpha.num_qubits();
    let flip = alpha.flip_mask();
    let mut m = CMatrix::zeros(dim);
    for col in 0..dim {
        m[(col ^ flip, col)] = alpha.phase(col);
    }
    m
}

/// `tr(σ_α M)` for an arbitrary operator `M`, in `O(2^n)`.
pub fn trace_with(alpha: &MultiIndex, m: &CMatrix) -> C64 {
    let flip = alpha.flip_mask();
    let mut acc = c(0.0, 0.0);
    for x in 0..m.dim() {
        acc += alpha.phase(x) * m[(x, x ^ flip)];
    }
    acc
}

/// `M += s · σ_α`, in `O(2^n)`.
pub fn add_pauli(m: &mut CMatrix, s: f64, alpha: &MultiIndex) {
    let flip = alpha.flip_mask();
    for col in 0..m.dim() {
        m[(col ^ flip, col)] += alpha.phase(col) * s;
    }
}

/// `tr(ρ σ_α)`.
///
/// Pauli strings are phased permutation matrices, so the trace is a single
/// pass over the `2^n` entries `ρ[x, x ⊕ flip]`; `σ_α` is never formed.
pub fn expectation(alpha: &MultiIndex, rho: &DensityMatrix) -> f64 {
    debug_assert_eq!(alpha.num_qubits(), rho.num_qubits());
    trace_with(alpha, rho.matrix()).re
}

/// `Σ_{j=1..k} C(n,j) 3^j`, the number of Pauli strings of weight `1..=k`.
pub fn basis_size(n: usize, k: usize) -> usize {
    (1..=k.min(n)).map(|j| math::binomial(n, j) * 3usize.pow(j as u32)).sum()
}

/// All `α` with `1 ≤ weight(α) ≤ k`, in lexicographic order of `(α_1, …, α_n)`.
pub fn enumerate_basis(n: usize, k: usize) -> Result<Vec<MultiIndex>, PauliError> {
    check_size(n)?;
    if k == 0 || k > n {
        return Err(PauliError::WeightBound { k, n });
    }
    let mut out = Vec::with_capacity(basis_size(n, k));
    for key in 1..(1u32 << (2 * n)) {
        let idx = MultiIndex::from_key(n, key);
        if idx.weight() <= k {
            out.push(idx);
        }
    }
    Ok(out)
}

/// Every Pauli string on `n` qubits, identity first.
pub fn all_indices(n: usize) -> Result<Vec<MultiIndex>, PauliError> {
    check_size(n)?;
    Ok((0..(1u32 << (2 * n))).map(|key| MultiIndex::from_key(n, key)).collect())
}

/// Real coefficients `η_α = tr(ρ σ_α)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlochVector {
    n: usize,
    coeffs: BTreeMap<MultiIndex, f64>,
}

impl BlochVector {
    /// Builds from explicit coefficients; indices absent from the map are 0.
    pub fn new(n: usize, coeffs: BTreeMap<MultiIndex, f64>) -> Result<Self, PauliError> {
        check_size(n)?;
        if let Some(bad) = coeffs.keys().find(|a| a.num_qubits() != n) {
            return Err(PauliError::SizeMismatch { index: bad.num_qubits(), system: n });
        }
        Ok(Self { n, coeffs })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn get(&self, alpha: &MultiIndex) -> f64 {
        self.coeffs.get(alpha).copied().unwrap_or(0.0)
    }

    pub fn set(&mut self, alpha: MultiIndex, value: f64) {
        self.coeffs.insert(alpha, value);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, &f64)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }
}

/// Bloch coefficients of `ρ` for every `α` with `weight(α) ≤ cutoff` (all when `None`).
pub fn bloch_from_state(rho: &DensityMatrix, cutoff: Option<usize>) -> BlochVector {
    let n = rho.num_qubits();
    let cutoff = cutoff.unwrap_or(n);
    let mut coeffs = BTreeMap::new();
    for key in 0..(1u32 << (2 * n)) {
        let idx = MultiIndex::from_key(n, key);
        if idx.weight() > cutoff {
            continue;
        }
        let eta = if idx.is_identity() { 1.0 } else { expectation(&idx, rho) };
        coeffs.insert(idx, eta);
    }
    BlochVector { n, coeffs }
}

/// `(1/2^n) Σ_α η_α σ_α`. No positivity check is made.
pub fn state_from_bloch(eta: &BlochVector) -> CMatrix {
    let dim = 1usize << eta.n;
    let mut m = CMatrix::zeros(dim);
    let scale = 1.0 / dim as f64;
    for (alpha, &value) in eta.iter() {
        if value != 0.0 {
            add_pauli(&mut m, value * scale, alpha);
        }
    }
    m
}

/// Reduced state on the qubits in `keep` (0-based positions, any order;
/// the reduced state orders them ascending).
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix, PauliError> {
    let n = rho.num_qubits();
    if keep.is_empty() {
        return Err(PauliError::EmptyKeepSet);
    }
    if let Some(&q) = keep.iter().find(|&&q| q >= n) {
        return Err(PauliError::QubitOutOfRange { qubit: q, n });
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    let traced: Vec<usize> = (0..n).filter(|q| !kept.contains(q)).collect();
    let m = kept.len();
    let bit = |q: usize| 1usize << (n - 1 - q);
    let spread = |sub: usize, qubits: &[usize]| -> usize {
        let len = qubits.len();
        qubits
            .iter()
            .enumerate()
            .filter(|(j, _)| sub & (1 << (len - 1 - j)) != 0)
            .fold(0, |acc, (_, &q)| acc | bit(q))
    };
    let kept_pos: Vec<usize> = (0..(1 << m)).map(|a| spread(a, &kept)).collect();
    let traced_pos: Vec<usize> = (0..(1 << traced.len())).map(|t| spread(t, &traced)).collect();
    let full = rho.matrix();
    let reduced = CMatrix::from_fn(1 << m, |a, b| {
        traced_pos.iter().map(|&t| full[(kept_pos[a] | t, kept_pos[b] | t)]).sum()
    });
    Ok(DensityMatrix::from_trusted(m, reduced))
}
