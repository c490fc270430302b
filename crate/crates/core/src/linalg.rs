//! Hermitian spectral calculus: eigendecomposition, `exp`, `log`, entropies,
//! relative entropy and the free energy `ψ(H) = ln tr e^H`.
//!
//! Everything is computed in natural logarithms internally; the entropy and
//! distance functions convert to bits on return.

use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::math;
use crate::matrix::{c, CMatrix};
use crate::state::DensityMatrix;
use crate::LN_2;

/// Inputs whose `max |M − M†|` exceeds this (relative to `max(1, ‖M‖_max)`) are rejected.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Largest eigenvalue accepted by [`matrix_exp_hermitian`] before signalling divergence.
pub const EXP_OVERFLOW: f64 = 700.0;
/// [`matrix_log_psd`] requires the smallest eigenvalue to exceed this.
pub const LOG_FLOOR: f64 = 1e-13;
/// Eigenvalues below this contribute nothing to the entropy.
pub const ENTROPY_FLOOR: f64 = 1e-15;
/// Weight of `ρ` outside the support of `σ` treated as nonzero.
pub const SUPPORT_TOL: f64 = 1e-10;

const MAX_QL_ITERATIONS: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix is not Hermitian: max |M - M^dag| = {0:e}")]
    NotHermitian(f64),
    #[error("matrix exponential overflows: largest eigenvalue {0} exceeds {EXP_OVERFLOW}")]
    Overflow(f64),
    #[error("logarithm of a singular matrix: smallest eigenvalue {0:e}")]
    SingularSupport(f64),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("eigenvalue iteration did not converge")]
    NoConvergence,
}

/// `M = V diag(λ) V†` with eigenvalues ascending and eigenvectors in the columns of `V`.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: CMatrix,
}

impl SpectralDecomposition {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &CMatrix {
        &self.eigenvectors
    }

    /// `V f(Λ) V†`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let w: Vec<f64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        self.eigenvectors.conjugate_diagonal(&w)
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.map(|l| l)
    }

    /// `⟨v_j| M |v_j⟩` for every eigenvector `v_j`.
    pub fn diagonal_of(&self, m: &CMatrix) -> Vec<f64> {
        let n = self.eigenvectors.dim();
        let mv = m.matmul(&self.eigenvectors);
        (0..n)
            .map(|j| (0..n).map(|i| (self.eigenvectors[(i, j)].conj() * mv[(i, j)]).re).sum())
            .collect()
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Householder reduction to a real symmetric tridiagonal matrix followed by
/// implicit QL iterations with Wilkinson-style shifts.
pub fn eig_hermitian(m: &CMatrix) -> Result<SpectralDecomposition, LinalgError> {
    let herm = m.hermiticity_error();
    if herm > HERMITIAN_TOL * m.max_abs().max(1.0) {
        return Err(LinalgError::NotHermitian(herm));
    }
    let n = m.dim();
    let mut a = m.clone();
    a.hermitize();
    let (mut diag, mut off, q) = tridiagonalize(&mut a);
    // z stored transposed: row j holds column j of the rotation matrix.
    let mut zt = vec![0.0f64; n * n];
    for i in 0..n {
        zt[i * n + i] = 1.0;
    }
    tridiagonal_ql(&mut diag, &mut off, &mut zt, n)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    let eigenvalues = order.iter().map(|&i| diag[i]).collect();
    let mut vecs = CMatrix::zeros(n);
    for r in 0..n {
        let qrow = q.row(r);
        for (col, &src) in order.iter().enumerate() {
            let zrow = &zt[src * n..(src + 1) * n];
            let mut acc = c(0.0, 0.0);
            for (qv, &zv) in qrow.iter().zip(zrow) {
                acc += qv * zv;
            }
            vecs[(r, col)] = acc;
        }
    }
    Ok(SpectralDecomposition { eigenvalues, eigenvectors: vecs })
}

/// Unitary `Q` with `Q† A Q` real tridiagonal; returns (diagonal, subdiagonal, Q).
fn tridiagonalize(a: &mut CMatrix) -> (Vec<f64>, Vec<f64>, CMatrix) {
    let n = a.dim();
    let mut q = CMatrix::identity(n);
    let mut off = vec![0.0; n];
    let mut v = vec![c(0.0, 0.0); n];
    let mut w = vec![c(0.0, 0.0); n];
    let mut qv = vec![c(0.0, 0.0); n];
    for k in 0..n.saturating_sub(1) {
        let alpha = a[(k + 1, k)];
        let xnorm2: f64 = ((k + 2)..n).map(|i| a[(i, k)].norm_sqr()).sum();
        if xnorm2 == 0.0 && alpha.im == 0.0 {
            off[k] = alpha.re;
            continue;
        }
        let norm = math::sqrt(alpha.norm_sqr() + xnorm2);
        let beta = if alpha.re >= 0.0 { -norm } else { norm };
        let tau = (c(beta, 0.0) - alpha) / beta;
        let scale = c(1.0, 0.0) / (alpha - beta);
        let lo = k + 1;
        v[lo] = c(1.0, 0.0);
        for i in (lo + 1)..n {
            v[i] = a[(i, k)] * scale;
        }
        // w = A_sub v
        for i in lo..n {
            let row = a.row(i);
            let mut acc = c(0.0, 0.0);
            for j in lo..n {
                acc += row[j] * v[j];
            }
            w[i] = acc;
        }
        let vw: f64 = (lo..n).map(|i| (v[i].conj() * w[i]).re).sum();
        let tt = tau.norm_sqr() * vw;
        let tau_c = tau.conj();
        // A_sub ← A_sub − τ w v† − τ̄ v w† + |τ|² (v†w) v v†
        for i in lo..n {
            let (vi, wi) = (v[i], w[i]);
            for j in lo..n {
                let (vj, wj) = (v[j].conj(), w[j].conj());
                a[(i, j)] -= tau * wi * vj + tau_c * vi * wj - vi * vj * tt;
            }
        }
        a[(lo, k)] = c(beta, 0.0);
        a[(k, lo)] = c(beta, 0.0);
        for i in (lo + 1)..n {
            a[(i, k)] = c(0.0, 0.0);
            a[(k, i)] = c(0.0, 0.0);
        }
        off[k] = beta;
        // Q ← Q H = Q − τ (Q v) v†
        for r in 0..n {
            let row = q.row(r);
            let mut acc = c(0.0, 0.0);
            for j in lo..n {
                acc += row[j] * v[j];
            }
            qv[r] = acc * tau;
        }
        for r in 0..n {
            for j in lo..n {
                let vj = v[j].conj();
                q[(r, j)] -= qv[r] * vj;
            }
        }
    }
    let diag = (0..n).map(|i| a[(i, i)].re).collect();
    if n > 0 {
        off[n - 1] = 0.0;
    }
    (diag, off, q)
}

/// Implicit QL on a symmetric tridiagonal matrix, accumulating rotations into `zt`.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], zt: &mut [f64], n: usize) -> Result<(), LinalgError> {
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_QL_ITERATIONS {
                return Err(LinalgError::NoConvergence);
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = math::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + if g >= 0.0 { r.abs() } else { -r.abs() });
            let (mut s, mut cs, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = cs * e[i];
                r = math::hypot(f, g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                cs = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * cs * b;
                p = s * r;
                d[i + 1] = g + p;
                g = cs * r - b;
                let (lo, hi) = zt.split_at_mut((i + 1) * n);
                let zi = &mut lo[i * n..];
                let zi1 = &mut hi[..n];
                for k in 0..n {
                    let f = zi1[k];
                    zi1[k] = s * zi[k] + cs * f;
                    zi[k] = cs * zi[k] - s * f;
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// `exp(H)` for Hermitian `H`.
pub fn matrix_exp_hermitian(h: &CMatrix) -> Result<CMatrix, LinalgError> {
    let spec = eig_hermitian(h)?;
    let top = spec.eigenvalues.last().copied().unwrap_or(0.0);
    if top > EXP_OVERFLOW {
        return Err(LinalgError::Overflow(top));
    }
    Ok(spec.map(math::exp))
}

/// Principal natural logarithm of a positive definite matrix.
pub fn matrix_log_psd(m: &CMatrix) -> Result<CMatrix, LinalgError> {
    let spec = eig_hermitian(m)?;
    let low = spec.eigenvalues.first().copied().unwrap_or(1.0);
    if low <= LOG_FLOOR {
        return Err(LinalgError::SingularSupport(low));
    }
    Ok(spec.map(math::ln))
}

/// Normalised thermal state `e^H / tr e^H` together with `ψ = ln tr e^H`.
///
/// The largest eigenvalue is factored out first, so this never overflows.
pub fn gibbs_state(h: &CMatrix) -> Result<(CMatrix, f64), LinalgError> {
    let spec = eig_hermitian(h)?;
    let top = spec.eigenvalues.last().copied().unwrap_or(0.0);
    let weights: Vec<f64> = spec.eigenvalues.iter().map(|&l| math::exp(l - top)).collect();
    let z: f64 = weights.iter().sum();
    let probs: Vec<f64> = weights.iter().map(|w| w / z).collect();
    Ok((spec.eigenvectors.conjugate_diagonal(&probs), top + math::ln(z)))
}

/// `ψ = ln tr exp(H)` in nats.
pub fn free_energy(h: &CMatrix) -> Result<f64, LinalgError> {
    let spec = eig_hermitian(h)?;
    Ok(log_sum_exp(&spec.eigenvalues))
}

pub(crate) fn log_sum_exp(values: &[f64]) -> f64 {
    let top = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    top + math::ln(values.iter().map(|&l| math::exp(l - top)).sum::<f64>())
}

fn entropy_nats_of_spectrum(eigenvalues: &[f64]) -> f64 {
    eigenvalues
        .iter()
        .filter(|&&l| l > ENTROPY_FLOOR)
        .map(|&l| -l * math::ln(l))
        .sum()
}

/// Entropy in nats of a normalised PSD matrix.
pub(crate) fn entropy_nats(m: &CMatrix) -> f64 {
    match eig_hermitian(m) {
        Ok(spec) => entropy_nats_of_spectrum(&spec.eigenvalues).max(0.0),
        Err(_) => f64::NAN,
    }
}

/// `S(ρ) = −tr ρ log₂ ρ` in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    entropy_nats(rho.matrix()) / LN_2
}

/// `D(ρ‖σ) = tr ρ (log₂ ρ − log₂ σ)` in bits.
///
/// Returns `f64::INFINITY` when `ρ` puts more than `1e-10` weight outside the
/// numerical support of `σ`.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64, LinalgError> {
    relative_entropy_nats(rho.matrix(), sigma.matrix()).map(|d| d / LN_2)
}

pub(crate) fn relative_entropy_nats(rho: &CMatrix, sigma: &CMatrix) -> Result<f64, LinalgError> {
    if rho.dim() != sigma.dim() {
        return Err(LinalgError::DimensionMismatch(rho.dim(), sigma.dim()));
    }
    let neg_entropy = -entropy_nats(rho);
    let spec = eig_hermitian(sigma)?;
    let weights = spec.diagonal_of(rho);
    let mut cross = 0.0;
    for (&mu, &w) in spec.eigenvalues.iter().zip(&weights) {
        if mu <= LOG_FLOOR {
            if w > SUPPORT_TOL {
                return Ok(f64::INFINITY);
            }
            continue;
        }
        cross += w * math::ln(mu);
    }
    Ok((neg_entropy - cross).max(0.0))
}

/// `½ ‖A − B‖₁`.
pub fn trace_distance(a: &CMatrix, b: &CMatrix) -> Result<f64, LinalgError> {
    if a.dim() != b.dim() {
        return Err(LinalgError::DimensionMismatch(a.dim(), b.dim()));
    }
    let mut diff = a.sub(b);
    diff.hermitize();
    let spec = eig_hermitian(&diff)?;
    Ok(0.5 * spec.eigenvalues.iter().map(|l| l.abs()).sum::<f64>())
}
