//! Random operators and states for tests and benchmarks.
//!
//! States are drawn with a Haar-random eigenbasis (eigenvectors of a GUE
//! matrix) and a spectrum sampled uniformly from the simplex, lifted away
//! from zero so the result is full rank.

use alloc::vec::Vec;

use rand::Rng;

use crate::math;
use crate::matrix::{c, CMatrix, C64};
use crate::linalg::eig_hermitian;
use crate::state::DensityMatrix;

/// Standard normal sample (Box–Muller).
pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen::<f64>();
    math::sqrt(-2.0 * math::ln(u1)) * math::cos(core::f64::consts::TAU * u2)
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    c(gaussian(rng), gaussian(rng))
}

/// GUE-like Hermitian matrix with entries of order `scale`.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, dim: usize, scale: f64) -> CMatrix {
    let g = CMatrix::from_fn(dim, |_, _| complex_gaussian(rng));
    let mut h = g.add(&g.adjoint()).scale(0.5 * scale);
    h.hermitize();
    h
}

/// Haar-distributed unitary (up to column phases).
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CMatrix {
    let h = random_hermitian(rng, dim, 1.0);
    eig_hermitian(&h).expect("GUE sample is Hermitian").eigenvectors().clone()
}

/// Full-rank state on `n` qubits; every eigenvalue is at least `0.01 / 2^n`.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DensityMatrix {
    let dim = 1 << n;
    let u = random_unitary(rng, dim);
    let raw: Vec<f64> = (0..dim).map(|_| -math::ln(1.0 - rng.gen::<f64>()) + 0.01).collect();
    let total: f64 = raw.iter().sum();
    let spectrum: Vec<f64> = raw.iter().map(|l| l / total).collect();
    DensityMatrix::from_trusted(n, u.conjugate_diagonal(&spectrum))
}

/// Tensor product of `n` random full-rank single-qubit states.
pub fn random_product_state<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DensityMatrix {
    let mut acc = random_state(rng, 1);
    for _ in 1..n {
        acc = acc.tensor(&random_state(rng, 1)).expect("size within cap");
    }
    acc
}

/// Random pure state on `n` qubits.
pub fn random_pure_state<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DensityMatrix {
    let psi: Vec<C64> = (0..1usize << n).map(|_| complex_gaussian(rng)).collect();
    DensityMatrix::pure(&psi).expect("dimension is a power of two")
}

/// Uniform coefficients in `[-scale, scale]`.
pub fn random_coefficients<R: Rng + ?Sized>(rng: &mut R, len: usize, scale: f64) -> Vec<f64> {
    (0..len).map(|_| scale * (2.0 * rng.gen::<f64>() - 1.0)).collect()
}
