//! The four subcommands, writing their output to any [`Write`] sink.

use std::io::Write;

use qip_core::{
    distance, eig_hermitian, is_invariant_state, von_neumann_entropy, MeasureReport, Outcome, StateSpec,
};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{CliError, Status};
use crate::input::{build_state, generator_label, parse_state_spec, RunOptions, SymmetryChoice};
use crate::output::{measures_json, num, projection_json, symmetry_json};
use crate::sweep::{run_sweep, SweepSpec};

fn write_json(out: &mut dyn Write, value: &Value) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(|e| CliError::Io(e.into()))?;
    writeln!(out)?;
    Ok(())
}

/// Projection of one state onto one family; prints the coefficients, `D_k`
/// and diagnostics. Divergence still prints the best iterate.
pub fn cmd_project(state: &str, k: usize, options: &RunOptions, out: &mut dyn Write) -> Result<Status, CliError> {
    let spec = parse_state_spec(state)?;
    project_spec(&spec, k, options, out)
}

pub fn project_spec(spec: &StateSpec, k: usize, options: &RunOptions, out: &mut dyn Write) -> Result<Status, CliError> {
    let rho = build_state(spec)?;
    let n = rho.num_qubits();
    if k == 0 || k > n {
        return Err(CliError::Spec(format!("weight bound k = {k} outside 1..={n}")));
    }
    let cfg = options.overrides.config(n)?;
    let sym = options.symmetry.resolve(&rho)?;
    let report = distance(&rho, k, options.method, &cfg, sym.group.as_ref()).map_err(CliError::compute)?;
    write_json(out, &projection_json(&report, &sym))?;
    Ok(if report.outcome == Outcome::Diverged { Status::Diverged } else { Status::Success })
}

/// `D_1, …, D_n` and the three forms of every `C_k`, one worker per `k`.
pub fn cmd_measures(state: &str, options: &RunOptions, out: &mut dyn Write) -> Result<Status, CliError> {
    let spec = parse_state_spec(state)?;
    let rho = build_state(&spec)?;
    let n = rho.num_qubits();
    let cfg = options.overrides.config(n)?;
    let sym = options.symmetry.resolve(&rho)?;
    let pool = crate::input::thread_pool(options.jobs)?;
    let diagnostics = pool
        .install(|| {
            (1..n)
                .into_par_iter()
                .map(|k| distance(&rho, k, options.method, &cfg, sym.group.as_ref()))
                .collect::<Result<Vec<_>, _>>()
        })
        .map_err(CliError::compute)?;
    let diverged = diagnostics.iter().any(|d| d.outcome == Outcome::Diverged);
    let report = MeasureReport::assemble(&rho, options.method, diagnostics).map_err(CliError::compute)?;
    write_json(out, &measures_json(&report, &sym))?;
    Ok(if diverged { Status::Diverged } else { Status::Success })
}

/// CSV table of a noise sweep. Per-cell failures are reported in the status
/// column and do not stop the sweep.
pub fn cmd_sweep(spec: &SweepSpec, out: &mut dyn Write) -> Result<Status, CliError> {
    let table = run_sweep(spec)?;
    table.write_csv(out)?;
    Ok(Status::Success)
}

/// Validates a state and, optionally, its claimed symmetry.
pub fn cmd_validate(state: &str, symmetry: &SymmetryChoice, out: &mut dyn Write) -> Result<Status, CliError> {
    let spec = parse_state_spec(state)?;
    let rho = build_state(&spec)?;
    let spectrum = eig_hermitian(rho.matrix()).map_err(CliError::compute)?;
    let sym = symmetry.resolve(&rho)?;
    let auto_detected = match symmetry {
        SymmetryChoice::AutoPermutation => Some(sym.group.is_some()),
        _ => None,
    };
    let checked: Vec<Value> = sym
        .group
        .iter()
        .flat_map(|g| g.generators())
        .map(|g| json!({ "generator": generator_label(g), "invariant": is_invariant_state(&rho, std::slice::from_ref(g)) }))
        .collect();
    let value = json!({
        "valid": true,
        "n": rho.num_qubits(),
        "trace": num(rho.matrix().trace().re),
        "min_eigenvalue": num(spectrum.eigenvalues()[0]),
        "max_eigenvalue": num(*spectrum.eigenvalues().last().expect("non-empty spectrum")),
        "entropy": num(von_neumann_entropy(&rho)),
        "symmetry": symmetry_json(&sym),
        "permutation_symmetric": auto_detected,
        "generators_checked": checked,
    });
    write_json(out, &value)?;
    Ok(Status::Success)
}
