//! Validated density matrices and the benchmark state families.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::linalg::eig_hermitian;
use crate::math;
use crate::matrix::{c, CMatrix};
use crate::pauli::{qubits_for_dim, PauliError, MAX_QUBITS};

pub const HERMITICITY_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const NEGATIVITY_TOL: f64 = 1e-10;

/// Diagnostic naming the violated density-matrix invariant.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum StateError {
    #[error("matrix dimension {0} is not 2^n for 1 <= n <= {MAX_QUBITS}")]
    Dimension(usize),
    #[error("matrix is not Hermitian: max |M - M^dag| = {0:e}")]
    NotHermitian(f64),
    #[error("trace violation: tr = {0}")]
    Trace(f64),
    #[error("not positive semidefinite: smallest eigenvalue {0:e}")]
    NotPositive(f64),
    #[error("raw matrix is not square")]
    NotSquare,
    #[error("Dicke excitation count {e} outside 0..={n}")]
    Excitations { n: usize, e: usize },
    #[error("GHZ state needs at least 2 qubits, got {0}")]
    GhzSize(usize),
    #[error("mixing weight p = {0} outside [0, 1]")]
    MixWeight(f64),
    #[error(transparent)]
    Pauli(#[from] PauliError),
}

/// A Hermitian, unit-trace, positive semidefinite `2^n × 2^n` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Wraps a matrix already known to be a state (no checks).
    pub(crate) fn from_trusted(n: usize, matrix: CMatrix) -> Self {
        debug_assert_eq!(matrix.dim(), 1 << n);
        Self { n, matrix }
    }

    /// Validates `matrix`; see [`validate_state`].
    pub fn new(matrix: CMatrix) -> Result<Self, StateError> {
        validate_state(&matrix)
    }

    pub fn maximally_mixed(n: usize) -> Result<Self, StateError> {
        if n == 0 || n > MAX_QUBITS {
            return Err(StateError::Dimension(1 << n.min(31)));
        }
        let dim = 1usize << n;
        Ok(Self { n, matrix: CMatrix::identity(dim).scale(1.0 / dim as f64) })
    }

    /// Pure state `|ψ⟩⟨ψ|`; the vector is normalised here.
    pub fn pure(amplitudes: &[crate::matrix::C64]) -> Result<Self, StateError> {
        let n = qubits_for_dim(amplitudes.len()).map_err(|_| StateError::Dimension(amplitudes.len()))?;
        let norm = math::sqrt(amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>());
        let psi: Vec<_> = amplitudes.iter().map(|a| a / norm).collect();
        Ok(Self { n, matrix: CMatrix::outer(&psi) })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// `ρ_A ⊗ ρ_B` with `ρ_A` on the leading qubits.
    pub fn tensor(&self, other: &Self) -> Result<Self, StateError> {
        let n = self.n + other.n;
        if n > MAX_QUBITS {
            return Err(StateError::Dimension(1 << n));
        }
        Ok(Self { n, matrix: self.matrix.kron(&other.matrix) })
    }
}

/// Checks trace, Hermiticity and positivity.
///
/// Negative eigenvalues above `-1e-10` are clipped to zero (and the matrix
/// rebuilt from its clipped spectrum); a trace within `1e-10` of one is
/// renormalised. Anything beyond these tolerances is reported as the
/// violated invariant.
pub fn validate_state(m: &CMatrix) -> Result<DensityMatrix, StateError> {
    let n = qubits_for_dim(m.dim()).map_err(|_| StateError::Dimension(m.dim()))?;
    let herm = m.hermiticity_error();
    if herm > HERMITICITY_TOL {
        return Err(StateError::NotHermitian(herm));
    }
    let tr = m.trace().re;
    if (tr - 1.0).abs() > TRACE_TOL {
        return Err(StateError::Trace(tr));
    }
    let mut matrix = m.clone();
    matrix.hermitize();
    let spec = eig_hermitian(&matrix).map_err(|_| StateError::NotHermitian(herm))?;
    let min = spec.eigenvalues()[0];
    if min < -NEGATIVITY_TOL {
        return Err(StateError::NotPositive(min));
    }
    if min < 0.0 {
        let clipped: Vec<f64> = spec.eigenvalues().iter().map(|&l| l.max(0.0)).collect();
        matrix = spec.eigenvectors().conjugate_diagonal(&clipped);
    }
    let tr = matrix.trace().re;
    if tr != 1.0 {
        matrix = matrix.scale(1.0 / tr);
    }
    Ok(DensityMatrix { n, matrix })
}

/// `|D_e^n⟩⟨D_e^n|`: equal superposition of all basis states with `e` ones.
pub fn dicke(n: usize, e: usize) -> Result<DensityMatrix, StateError> {
    if n == 0 || n > MAX_QUBITS {
        return Err(StateError::Pauli(PauliError::DimensionCap(n)));
    }
    if e > n {
        return Err(StateError::Excitations { n, e });
    }
    let dim = 1usize << n;
    let amp = 1.0 / math::sqrt(math::binomial(n, e) as f64);
    let psi: Vec<_> = (0..dim)
        .map(|x| if (x as u32).count_ones() as usize == e { c(amp, 0.0) } else { c(0.0, 0.0) })
        .collect();
    Ok(DensityMatrix { n, matrix: CMatrix::outer(&psi) })
}

/// `(|0…0⟩ + |1…1⟩)/√2`.
pub fn ghz(n: usize) -> Result<DensityMatrix, StateError> {
    if n < 2 {
        return Err(StateError::GhzSize(n));
    }
    if n > MAX_QUBITS {
        return Err(StateError::Pauli(PauliError::DimensionCap(n)));
    }
    let dim = 1usize << n;
    let mut psi = vec![c(0.0, 0.0); dim];
    psi[0] = c(core::f64::consts::FRAC_1_SQRT_2, 0.0);
    psi[dim - 1] = psi[0];
    Ok(DensityMatrix { n, matrix: CMatrix::outer(&psi) })
}

/// `p · 1/2^n + (1 − p) · ρ`.
pub fn white_noise_mix(rho: &DensityMatrix, p: f64) -> Result<DensityMatrix, StateError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(StateError::MixWeight(p));
    }
    let dim = rho.dim();
    let mut matrix = rho.matrix.scale(1.0 - p);
    for i in 0..dim {
        matrix[(i, i)] += c(p / dim as f64, 0.0);
    }
    Ok(DensityMatrix { n: rho.n, matrix })
}

/// Declarative description of a state.
///
/// In JSON: `{"type": "dicke", "n": 4, "e": 2}`, `{"type": "ghz", "n": 3}`,
/// `{"type": "raw", "matrix": [[[re, im], …], …]}` (row-major) and
/// `{"type": "mix", "p": 0.5, "base": {…}}`.
#[derive(Clone, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "type", rename_all = "lowercase", deny_unknown_fields))]
pub enum StateSpec {
    Dicke { n: usize, e: usize },
    Ghz { n: usize },
    Raw { matrix: Vec<Vec<[f64; 2]>> },
    Mix { p: f64, base: Box<StateSpec> },
}

impl StateSpec {
    pub fn build(&self) -> Result<DensityMatrix, StateError> {
        match self {
            StateSpec::Dicke { n, e } => dicke(*n, *e),
            StateSpec::Ghz { n } => ghz(*n),
            StateSpec::Raw { matrix } => validate_state(&self::raw_matrix(matrix)?),
            StateSpec::Mix { p, base } => white_noise_mix(&base.build()?, *p),
        }
    }

    /// Same spec with the outermost mixing weight replaced (or added).
    pub fn with_mix(&self, p: f64) -> StateSpec {
        match self {
            StateSpec::Mix { base, .. } => StateSpec::Mix { p, base: base.clone() },
            other => StateSpec::Mix { p, base: Box::new(other.clone()) },
        }
    }
}

fn raw_matrix(rows: &[Vec<[f64; 2]>]) -> Result<CMatrix, StateError> {
    let dim = rows.len();
    if rows.iter().any(|r| r.len() != dim) {
        return Err(StateError::NotSquare);
    }
    Ok(CMatrix::from_fn(dim, |i, j| c(rows[i][j][0], rows[i][j][1])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::von_neumann_entropy;
    use crate::pauli::partial_trace;

    #[test]
    fn dicke_amplitudes() {
        let d = dicke(4, 2).unwrap();
        let m = d.matrix();
        let support: Vec<usize> = (0..16).filter(|&x| m[(x, x)].re > 0.0).collect();
        assert_eq!(support, [0b0011, 0b0101, 0b0110, 0b1001, 0b1010, 0b1100]);
        for &x in &support {
            for &y in &support {
                assert!((m[(x, y)].re - 1.0 / 6.0).abs() < 1e-15);
            }
        }
        let d6 = dicke(6, 3).unwrap();
        let count = (0..64).filter(|&x| d6.matrix()[(x, x)].re > 0.0).count();
        assert_eq!(count, 20);
        assert!((d6.matrix()[(0b000111, 0b111000)].re - 1.0 / 20.0).abs() < 1e-15);

        let d0 = dicke(2, 0).unwrap();
        assert_eq!(d0.matrix(), &CMatrix::diagonal(&[1.0, 0.0, 0.0, 0.0]));
        assert_eq!(dicke(2, 3), Err(StateError::Excitations { n: 2, e: 3 }));
    }

    #[test]
    fn dicke_marginals() {
        for (n, e) in [(4, 2), (5, 2), (3, 1), (6, 3)] {
            let d = dicke(n, e).unwrap();
            let marg = partial_trace(&d, &[0]).unwrap();
            let expected = CMatrix::diagonal(&[1.0 - e as f64 / n as f64, e as f64 / n as f64]);
            assert!(marg.matrix().sub(&expected).max_abs() < 1e-14);
        }
    }

    #[test]
    fn ghz_amplitudes() {
        let g = ghz(3).unwrap();
        let m = g.matrix();
        for (x, y) in [(0, 0), (0, 7), (7, 0), (7, 7)] {
            assert!((m[(x, y)].re - 0.5).abs() < 1e-15);
        }
        assert!((m.trace().re - 1.0).abs() < 1e-15);
        assert_eq!(ghz(1), Err(StateError::GhzSize(1)));
    }

    #[test]
    fn white_noise_endpoints() {
        let d = dicke(4, 2).unwrap();
        assert_eq!(white_noise_mix(&d, 0.0).unwrap().matrix(), d.matrix());
        let mixed = white_noise_mix(&d, 1.0).unwrap();
        assert!(mixed.matrix().sub(DensityMatrix::maximally_mixed(4).unwrap().matrix()).max_abs() < 1e-16);
        assert_eq!(white_noise_mix(&d, 1.5), Err(StateError::MixWeight(1.5)));
    }

    #[test]
    fn white_noise_half_spectrum() {
        let mixed = white_noise_mix(&dicke(4, 2).unwrap(), 0.5).unwrap();
        let ev = eig_hermitian(mixed.matrix()).unwrap();
        let ev = ev.eigenvalues();
        for &l in &ev[..15] {
            assert!((l - 1.0 / 32.0).abs() < 1e-13);
        }
        assert!((ev[15] - (1.0 / 32.0 + 0.5)).abs() < 1e-13);
    }

    #[test]
    fn entropy_nondecreasing_in_noise() {
        let d = dicke(4, 2).unwrap();
        let mut last = -1.0;
        for i in 0..=20 {
            let s = von_neumann_entropy(&white_noise_mix(&d, i as f64 / 20.0).unwrap());
            assert!(s >= last - 1e-12);
            last = s;
        }
    }

    #[test]
    fn validation_diagnostics() {
        let d = dicke(3, 1).unwrap();
        let v = validate_state(d.matrix()).unwrap();
        assert!(v.matrix().sub(d.matrix()).max_abs() < 1e-14);

        assert!(matches!(
            validate_state(&CMatrix::diagonal(&[1.5, -0.5])),
            Err(StateError::NotPositive(l)) if (l + 0.5).abs() < 1e-12
        ));
        assert!(matches!(validate_state(&CMatrix::diagonal(&[1.0, 1.0])), Err(StateError::Trace(t)) if t == 2.0));
        let mut skew = CMatrix::identity(2).scale(0.5);
        skew[(0, 1)] = c(0.1, 0.0);
        assert!(matches!(validate_state(&skew), Err(StateError::NotHermitian(_))));
        assert!(matches!(validate_state(&CMatrix::identity(3)), Err(StateError::Dimension(3))));

        let drifted = CMatrix::diagonal(&[0.5 + 1e-12, 0.5]);
        let v = validate_state(&drifted).unwrap();
        assert!((v.matrix().trace().re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn builders_pass_validation() {
        let states = [
            dicke(4, 2).unwrap(),
            dicke(5, 1).unwrap(),
            ghz(3).unwrap(),
            white_noise_mix(&ghz(4).unwrap(), 0.3).unwrap(),
            DensityMatrix::maximally_mixed(2).unwrap(),
        ];
        for s in &states {
            assert!(validate_state(s.matrix()).is_ok());
        }
    }

    #[test]
    fn spec_builds() {
        let spec = StateSpec::Mix { p: 1.0, base: Box::new(StateSpec::Dicke { n: 4, e: 2 }) };
        let rho = spec.build().unwrap();
        assert!(rho.matrix().sub(DensityMatrix::maximally_mixed(4).unwrap().matrix()).max_abs() < 1e-16);
        let raw = StateSpec::Raw { matrix: vec![vec![[0.5, 0.0], [0.0, 0.0]], vec![[0.0, 0.0], [0.5, 0.0]]] };
        assert_eq!(raw.build().unwrap().num_qubits(), 1);
        let bad = StateSpec::Raw { matrix: vec![vec![[1.0, 0.0], [0.0, 0.0]], vec![[0.0, 0.0], [1.0, 0.0]]] };
        assert!(matches!(bad.build(), Err(StateError::Trace(_))));
        assert_eq!(
            StateSpec::Ghz { n: 3 }.with_mix(0.2),
            StateSpec::Mix { p: 0.2, base: Box::new(StateSpec::Ghz { n: 3 }) }
        );
    }
}
