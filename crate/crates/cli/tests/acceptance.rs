//! Acceptance checks AC1–AC8, one PASS/FAIL line each.
//!
//! Run with `cargo test -p qip --test acceptance`.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use qip::input::{ConfigOverrides, Permutations};
use qip::{run_sweep, RunOptions, SweepSpec, SymmetryChoice, SymmetrySpec};
use qip_core::linalg::gibbs_state;
use qip_core::matrix::C64;
use qip_core::random::{random_coefficients, random_state};
use qip_core::symmetry::full_permutation_generators;
use qip_core::{
    d1_un_invariant, dicke, distance, free_energy, generate_group, ghz, interaction_ladder, invariant_basis,
    minimize_dual, multi_information, project, project_product, relative_entropy, trace_distance,
    von_neumann_entropy, white_noise_mix, CMatrix, DensityMatrix, DualConfig, Method, MultiIndex, ProjectionBasis,
    ProjectionConfig, StateSpec, SymmetryGenerator, SymmetryGroup, DEFAULT_GROUP_CAP, LN_2,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A check returns a one-line summary of what it measured, or panics.
type Check = fn() -> String;

fn main() {
    let checks: [(&str, &str, Check); 8] = [
        ("AC1", "4-qubit Dicke sweep: D2 = D3", ac1_dicke4),
        ("AC2", "6-qubit Dicke sweep: D2 = D3 and D4 = D5", ac2_dicke6),
        ("AC3", "iterative and dual projections agree", ac3_oracle),
        ("AC4", "analytic anchors", ac4_anchors),
        ("AC5", "identity suite", ac5_identities),
        ("AC6", "symmetry suite", ac6_symmetry),
        ("AC7", "monotonicity and entropy suite", ac7_monotonicity),
        ("AC8", "U^n shortcut on Werner states", ac8_werner),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (tag, title, check) in checks {
        if !filter.is_empty() && !filter.iter().any(|f| tag.eq_ignore_ascii_case(f)) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(summary) => println!("{tag} PASS  {title} — {summary} [{secs:.1} s]"),
            Err(panic) => {
                failed += 1;
                let msg = panic
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                println!("{tag} FAIL  {title} — {msg} [{secs:.1} s]");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance check(s) failed");
        std::process::exit(1);
    }
}

fn ket0() -> DensityMatrix {
    DensityMatrix::new(CMatrix::diagonal(&[1.0, 0.0])).unwrap()
}

fn werner(p: f64) -> DensityMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let z = C64::new(0.0, 0.0);
    let singlet = DensityMatrix::pure(&[z, C64::new(s, 0.0), C64::new(-s, 0.0), z]).unwrap();
    white_noise_mix(&singlet, p).unwrap()
}

/// Configuration for randomised full-rank states: default step size, with
/// enough sweeps to reach the residual tolerance.
fn random_cfg(n: usize) -> ProjectionConfig {
    ProjectionConfig { max_sweeps: 5000, ..ProjectionConfig::for_qubits(n) }
}

fn ac1_dicke4() -> String {
    let spec = SweepSpec::new(StateSpec::Dicke { n: 4, e: 2 }, 0.0, 1.0, 11).with_ks(vec![1, 2, 3]);
    let table = run_sweep(&spec).unwrap();
    assert_eq!(table.rows.len(), 11);
    let mut worst: f64 = 0.0;
    for row in &table.rows {
        let d2 = table.distance(row, 2).expect("D2 computed");
        let d3 = table.distance(row, 3).expect("D3 computed");
        let gap = (d2 - d3).abs();
        assert!(gap <= 1e-4, "p = {}: |D2 − D3| = {gap:e}", row.p);
        worst = worst.max(gap);
    }
    let last = table.rows.last().unwrap();
    assert!((1..=3).all(|k| table.distance(last, k).unwrap() <= 1e-6), "p = 1 row is not zero");
    format!("11 points, max |D2 − D3| = {worst:.1e} bits")
}

fn ac2_dicke6() -> String {
    let symmetry = SymmetryChoice::Explicit(SymmetrySpec {
        permutations: Permutations::Named("all".into()),
        pauli: vec!["XXXXXX".into(), "ZZZZZZ".into()],
    });
    let options = RunOptions {
        overrides: ConfigOverrides { omega: Some(0.1), max_sweeps: Some(500), tol: None },
        symmetry,
        ..RunOptions::default()
    };
    let spec = SweepSpec::new(StateSpec::Dicke { n: 6, e: 3 }, 0.0, 1.0, 6).with_ks(vec![2, 3, 4, 5]).with_options(options);
    let table = run_sweep(&spec).unwrap();
    assert_eq!(table.rows.len(), 6);
    let (mut worst23, mut worst45): (f64, f64) = (0.0, 0.0);
    for row in &table.rows {
        let d = |k| table.distance(row, k).unwrap_or_else(|| panic!("p = {}: D{k} failed", row.p));
        let (g23, g45) = ((d(2) - d(3)).abs(), (d(4) - d(5)).abs());
        assert!(g23 <= 1e-3, "p = {}: |D2 − D3| = {g23:e}", row.p);
        assert!(g45 <= 1e-3, "p = {}: |D4 − D5| = {g45:e}", row.p);
        worst23 = worst23.max(g23);
        worst45 = worst45.max(g45);
    }
    format!("6 points, max |D2 − D3| = {worst23:.1e}, max |D4 − D5| = {worst45:.1e} bits (symmetry-reduced basis)")
}

fn ac3_oracle() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(301);
    let (mut worst_tr, mut worst_d, mut worst_prod): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for trial in 0..50 {
        let n = if trial < 25 { 2 } else { 3 };
        let rho = random_state(&mut rng, n);
        let cfg = random_cfg(n);
        for k in 1..=n {
            let r = distance(&rho, k, Method::Both, &cfg, None).unwrap();
            if k == n {
                assert_eq!(r.bits, 0.0);
                continue;
            }
            let it = r.iterative.as_ref().unwrap();
            let du = r.dual.as_ref().unwrap();
            assert!(it.result.converged && du.result.converged, "trial {trial} k = {k} did not converge");
            let (tr, dd) = (r.trace_discrepancy.unwrap(), r.discrepancy.unwrap());
            assert!(tr <= 1e-6, "trial {trial} k = {k}: trace distance {tr:e}");
            assert!(dd <= 1e-6, "trial {trial} k = {k}: |ΔD| = {dd:e}");
            worst_tr = worst_tr.max(tr);
            worst_d = worst_d.max(dd);
            if k == 1 {
                let prod = project_product(&rho).unwrap();
                for run in [&it.result, &du.result] {
                    let gap = (prod.distance_bits - run.distance_bits).abs();
                    assert!(gap <= 1e-6, "trial {trial}: product form differs by {gap:e}");
                    let tr = trace_distance(prod.tau.matrix(), run.tau.matrix()).unwrap();
                    assert!(tr <= 1e-6, "trial {trial}: product state differs by {tr:e}");
                    worst_prod = worst_prod.max(gap);
                }
            }
        }
    }
    format!("50 states, max trace distance {worst_tr:.1e}, max |ΔD| {worst_d:.1e}, max product gap {worst_prod:.1e}")
}

fn ac4_anchors() -> String {
    let cfg = ProjectionConfig::for_qubits(4);
    let bell_zero = ghz(2).unwrap().tensor(&ket0()).unwrap();
    let anchors = [("ghz(3)", ghz(3).unwrap(), 3.0), ("dicke(4,2)", dicke(4, 2).unwrap(), 4.0), ("Φ+⊗|0⟩", bell_zero, 2.0)];
    let mut parts = Vec::new();
    for (name, rho, expected) in &anchors {
        let analytic = multi_information(rho).unwrap();
        assert!((analytic - expected).abs() <= 1e-6, "{name}: analytic D1 = {analytic}");
        let iterative = distance(rho, 1, Method::Iterative, &cfg, None).unwrap().bits;
        assert!((iterative - expected).abs() <= 1e-6, "{name}: iterative D1 = {iterative}");
        parts.push(format!("{name}: {iterative:.9}"));
    }
    for n in 1..=4 {
        let mixed = DensityMatrix::maximally_mixed(n).unwrap();
        for k in 1..=n {
            for m in [Method::Iterative, Method::Dual, Method::Both] {
                let d = distance(&mixed, k, m, &ProjectionConfig::for_qubits(n), None).unwrap().bits;
                assert_eq!(d, 0.0, "D{k}(1/2^{n}) = {d:e} with {m:?}");
            }
        }
    }
    format!("{}; D_k(1/2^n) = 0 for n ≤ 4", parts.join(", "))
}

fn thermal(basis: &ProjectionBasis, theta: &[f64]) -> (DensityMatrix, f64) {
    let (tau, psi) = gibbs_state(&basis.hamiltonian(theta)).unwrap();
    (DensityMatrix::new(tau).unwrap(), psi)
}

fn random_problem(rng: &mut ChaCha8Rng) -> (usize, usize) {
    let n = rng.gen_range(2..=3);
    (n, rng.gen_range(1..n))
}

fn ac5_identities() -> String {
    const TRIALS: usize = 100;
    let mut rng = ChaCha8Rng::seed_from_u64(501);
    let (mut legendre, mut fd, mut pyth, mut spread): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    for _ in 0..TRIALS {
        // ψ(θ) + φ(η) = θ·η with φ = −S.
        let (n, k) = random_problem(&mut rng);
        let basis = ProjectionBasis::full(n, k).unwrap();
        let theta = random_coefficients(&mut rng, basis.len(), 1.5);
        let (tau, psi) = thermal(&basis, &theta);
        let eta = basis.moments(tau.matrix());
        let pairing: f64 = theta.iter().zip(&eta).map(|(t, e)| t * e).sum();
        let gap = (psi - von_neumann_entropy(&tau) * LN_2 - pairing).abs();
        assert!(gap <= 1e-10, "Legendre gap {gap:e}");
        legendre = legendre.max(gap);
    }
    for _ in 0..TRIALS {
        let (n, k) = random_problem(&mut rng);
        let basis = ProjectionBasis::full(n, k).unwrap();
        let theta = random_coefficients(&mut rng, basis.len(), 1.0);
        let eta = basis.moments(thermal(&basis, &theta).0.matrix());
        let a = rng.gen_range(0..basis.len());
        let h = 1e-5;
        let (mut up, mut down) = (theta.clone(), theta.clone());
        up[a] += h;
        down[a] -= h;
        let slope = (free_energy(&basis.hamiltonian(&up)).unwrap() - free_energy(&basis.hamiltonian(&down)).unwrap())
            / (2.0 * h);
        let gap = (slope - eta[a]).abs();
        assert!(gap <= 1e-6, "gradient vs finite difference {gap:e}");
        fd = fd.max(gap);
    }
    let tight = ProjectionConfig { tol: 1e-11, max_sweeps: 20_000, ..ProjectionConfig::for_qubits(3) };
    for _ in 0..TRIALS {
        let (n, k) = random_problem(&mut rng);
        let rho = random_state(&mut rng, n);
        let proj = project(&rho, k, &tight, None).unwrap();
        assert!(proj.converged);
        let basis = ProjectionBasis::full(n, k).unwrap();
        let (sigma, _) = thermal(&basis, &random_coefficients(&mut rng, basis.len(), 1.0));
        let lhs = relative_entropy(&rho, &sigma).unwrap();
        let rhs = proj.distance_bits + relative_entropy(&proj.tau, &sigma).unwrap();
        let gap = (lhs - rhs).abs();
        assert!(gap <= 1e-7, "Pythagoras gap {gap:e}");
        pyth = pyth.max(gap);
    }
    for trial in 0..TRIALS {
        let n = 2 + trial % 2;
        let rho = random_state(&mut rng, n);
        let report = interaction_ladder(&rho, Method::Iterative, &random_cfg(n), None).unwrap();
        for c in &report.interactions {
            assert!(c.relative_entropy.is_some());
            assert!(c.spread <= 1e-5, "C{} spread {:e}", c.k, c.spread);
            spread = spread.max(c.spread);
        }
    }
    format!(
        "{TRIALS} trials each: Legendre {legendre:.1e}, gradient {fd:.1e}, Pythagoras {pyth:.1e}, C_k spread {spread:.1e}"
    )
}

fn pauli_gen(label: &str) -> SymmetryGenerator {
    SymmetryGenerator::PauliConjugation(MultiIndex::parse(label).unwrap())
}

fn twirl(rho: &DensityMatrix, group: &SymmetryGroup) -> DensityMatrix {
    let mut acc = CMatrix::zeros(rho.dim());
    for g in group.elements() {
        acc = acc.add(&g.conjugate_matrix(rho.matrix()));
    }
    DensityMatrix::new(acc.scale(1.0 / group.order() as f64)).unwrap()
}

fn ac6_symmetry() -> String {
    let stabilizer = generate_group(3, &[pauli_gen("ZZ1"), pauli_gen("1ZZ"), pauli_gen("XXX")], DEFAULT_GROUP_CAP).unwrap();
    let mut labels: Vec<String> = invariant_basis(3, 2, &stabilizer).unwrap().elements().iter().map(|e| e.label()).collect();
    labels.sort();
    assert_eq!(labels, ["IZZ", "ZIZ", "ZZI"], "GHZ stabilizer basis");

    let mut dicke_gens = full_permutation_generators(4);
    dicke_gens.extend([pauli_gen("XXXX"), pauli_gen("ZZZZ")]);
    let dicke_group = generate_group(4, &dicke_gens, DEFAULT_GROUP_CAP).unwrap();
    assert!(invariant_basis(4, 1, &dicke_group).unwrap().is_empty(), "Dicke k = 1 basis not empty");

    let cfg = ProjectionConfig { tol: 1e-10, max_sweeps: 5000, ..ProjectionConfig::for_qubits(3) };
    let groups = [
        generate_group(3, &full_permutation_generators(3), DEFAULT_GROUP_CAP).unwrap(),
        stabilizer,
        generate_group(3, &[SymmetryGenerator::swap(3, 0, 2), pauli_gen("XIX")], DEFAULT_GROUP_CAP).unwrap(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(601);
    let (mut moved, mut agree): (f64, f64) = (0.0, 0.0);
    for group in &groups {
        for _ in 0..5 {
            let rho = twirl(&random_state(&mut rng, 3), group);
            for k in 1..=2 {
                let full = project(&rho, k, &cfg, None).unwrap();
                for g in group.elements() {
                    let d = trace_distance(&g.conjugate_matrix(full.tau.matrix()), full.tau.matrix()).unwrap();
                    assert!(d <= 1e-6, "unreduced projection not invariant: {d:e}");
                    moved = moved.max(d);
                }
                let reduced = project(&rho, k, &cfg, Some(&invariant_basis(3, k, group).unwrap())).unwrap();
                let d = trace_distance(reduced.tau.matrix(), full.tau.matrix()).unwrap();
                assert!(d <= 1e-6, "reduced and unreduced projections differ by {d:e}");
                agree = agree.max(d);
            }
        }
    }
    format!(
        "GHZ basis {{ZZ1, 1ZZ, Z1Z}}, Dicke k = 1 basis empty, invariance {moved:.1e}, reduced vs full {agree:.1e}"
    )
}

fn ac7_monotonicity() -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(701);
    let (mut rise, mut entropy_gap): (f64, f64) = (0.0, 0.0);
    for trial in 0..100 {
        let n = 2 + trial % 2;
        let rho = random_state(&mut rng, n);
        let report = interaction_ladder(&rho, Method::Iterative, &random_cfg(n), None).unwrap();
        for w in report.distances.windows(2) {
            assert!(w[1] <= w[0] + 1e-6, "ladder increases: {:?}", report.distances);
            rise = rise.max(w[1] - w[0]);
        }
        for (d, s) in report.diagnostics.iter().zip(&report.projection_entropies) {
            assert!(*s >= report.entropy - 1e-9, "S(ρ̃_{}) < S(ρ)", d.k);
            assert!(d.iterative.as_ref().unwrap().result.converged);
            let gap = (d.bits - (s - report.entropy)).abs();
            assert!(gap <= 1e-6, "D{} differs from entropy gap by {gap:e}", d.k);
            entropy_gap = entropy_gap.max(gap);
        }
    }
    format!("100 states, max rise {rise:.1e}, max |D − (S(τ) − S(ρ))| {entropy_gap:.1e}")
}

fn ac8_werner() -> String {
    let mut worst: f64 = 0.0;
    for p in [0.1, 0.3, 0.5, 0.7, 0.9] {
        let rho = werner(p);
        let expected = 2.0 - von_neumann_entropy(&rho);
        let mi = multi_information(&rho).unwrap();
        let gap = (mi - expected).abs();
        assert!(gap <= 1e-6, "p = {p}: gap {gap:e}");
        let shortcut = d1_un_invariant(&rho).unwrap();
        assert!((shortcut - mi).abs() <= 1e-8, "p = {p}: shortcut {shortcut} vs {mi}");
        worst = worst.max(gap);
    }
    let dual = minimize_dual(&werner(0.5), 1, &random_cfg(2), &DualConfig::default(), None).unwrap();
    assert!((dual.distance_bits - (2.0 - von_neumann_entropy(&werner(0.5)))).abs() <= 1e-6);
    format!("5 values of p, max gap {worst:.1e} bits")
}
