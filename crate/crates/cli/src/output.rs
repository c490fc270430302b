//! JSON reports. Every real number is rounded to 12 significant digits.

use qip_core::{DistanceReport, MeasureReport, Method, Outcome, ProjectorRun};
use serde_json::{json, Value};

use crate::input::{generator_label, ResolvedSymmetry};

/// Rounds to 12 significant digits; non-finite values pass through.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

/// JSON number with 12 significant digits; `null` for NaN and infinities.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(round12(x)).map_or(Value::Null, Value::Number)
}

fn opt_num(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

/// CSV cell with 12 significant digits.
pub fn csv_num(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{:?}", round12(x))
    }
}

pub fn method_name(m: Method) -> &'static str {
    match m {
        Method::Iterative => "iterative",
        Method::Dual => "dual",
        Method::Both => "both",
    }
}

pub fn outcome_name(o: Outcome) -> &'static str {
    match o {
        Outcome::Converged => "converged",
        Outcome::NotConverged => "not_converged",
        Outcome::Diverged => "diverged",
        Outcome::Exact => "exact",
    }
}

pub fn symmetry_json(sym: &ResolvedSymmetry) -> Value {
    match &sym.group {
        None => json!({ "source": sym.source, "group_order": 1, "generators": [] }),
        Some(g) => json!({
            "source": sym.source,
            "group_order": g.order(),
            "generators": g.generators().iter().map(generator_label).collect::<Vec<_>>(),
        }),
    }
}

fn run_json(run: &ProjectorRun) -> Value {
    let r = &run.result;
    json!({
        "status": outcome_name(run.outcome),
        "distance_bits": num(r.distance_bits),
        "residual": num(r.residual),
        "sweeps": r.sweeps,
        "converged": r.converged,
        "boundary": r.boundary,
        "selected_at": r.selected_at,
        "skipped_updates": r.skipped_updates,
        "divergent_term": run.divergent_term,
    })
}

fn checks_json(d: &DistanceReport) -> Value {
    json!({
        "discrepancy_bits": opt_num(d.discrepancy),
        "trace_distance": opt_num(d.trace_discrepancy),
        "product_check_bits": opt_num(d.product_check),
    })
}

/// Full report of one projection.
pub fn projection_json(d: &DistanceReport, sym: &ResolvedSymmetry) -> Value {
    let n = d.tau.num_qubits();
    let selected = d.selected_run();
    let (coefficients, basis, history) = match selected {
        Some(run) => {
            let c = &run.result.coeffs;
            let coefficients: Vec<Value> = c
                .labels
                .iter()
                .zip(&c.theta)
                .map(|(l, t)| json!({ "label": l, "theta": num(*t) }))
                .collect();
            let basis = json!({
                "size": c.labels.len(),
                "reduced": sym.group.is_some(),
                "labels": c.labels,
            });
            let history: Vec<Value> = run
                .result
                .history
                .iter()
                .map(|h| json!({ "residual": num(h.residual), "distance_bits": num(h.distance_bits) }))
                .collect();
            (coefficients, basis, history)
        }
        None => (Vec::new(), Value::Null, Vec::new()),
    };
    json!({
        "n": n,
        "k": d.k,
        "method": method_name(d.method),
        "selected": method_name(d.selected),
        "status": outcome_name(d.outcome),
        "distance_bits": num(d.bits),
        "residual": num(d.residual()),
        "sweeps": d.sweeps(),
        "converged": matches!(d.outcome, Outcome::Converged | Outcome::Exact),
        "coefficients": coefficients,
        "basis": basis,
        "symmetry": symmetry_json(sym),
        "runs": {
            "iterative": d.iterative.as_ref().map(run_json),
            "dual": d.dual.as_ref().map(run_json),
        },
        "checks": checks_json(d),
        "history": history,
    })
}

/// Full ladder report.
pub fn measures_json(report: &MeasureReport, sym: &ResolvedSymmetry) -> Value {
    let interactions: Vec<Value> = report
        .interactions
        .iter()
        .map(|c| {
            json!({
                "k": c.k,
                "difference": num(c.difference),
                "relative_entropy": opt_num(c.relative_entropy),
                "entropy_difference": num(c.entropy_difference),
                "spread": num(c.spread),
            })
        })
        .collect();
    let diagnostics: Vec<Value> = report
        .diagnostics
        .iter()
        .map(|d| {
            json!({
                "k": d.k,
                "distance_bits": num(d.bits),
                "selected": method_name(d.selected),
                "status": outcome_name(d.outcome),
                "residual": num(d.residual()),
                "sweeps": d.sweeps(),
                "basis_size": d.selected_run().map_or(0, |r| r.result.basis_size()),
                "runs": {
                    "iterative": d.iterative.as_ref().map(run_json),
                    "dual": d.dual.as_ref().map(run_json),
                },
                "checks": checks_json(d),
            })
        })
        .collect();
    json!({
        "n": report.n,
        "method": method_name(report.method),
        "distances": report.distances.iter().map(|&x| num(x)).collect::<Vec<_>>(),
        "interactions": interactions,
        "total_interaction": num(report.total_interaction()),
        "entropy": num(report.entropy),
        "projection_entropies": report.projection_entropies.iter().map(|&x| num(x)).collect::<Vec<_>>(),
        "symmetry": symmetry_json(sym),
        "diagnostics": diagnostics,
    })
}
