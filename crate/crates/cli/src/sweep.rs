//! Noise sweeps `ρ(p) = p·1/2^n + (1 − p)·ρ_base` written as CSV.
//!
//! Every `(p, k)` cell is an independent projection started from the
//! maximally mixed state, so rows do not depend on each other, on the worker
//! count or on scheduling order.

use qip_core::{distance, invariant_basis, DistanceReport, Outcome, StateSpec};
use rayon::prelude::*;

use crate::error::CliError;
use crate::input::{build_state, ConfigOverrides, RunOptions};
use crate::output::csv_num;

/// Parameter grid and projections of one sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    /// State being mixed with white noise; if it is itself a mixture, its
    /// outermost weight is replaced by `p`.
    pub base: StateSpec,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    /// Weight bounds; empty means `1..n`.
    pub ks: Vec<usize>,
    pub options: RunOptions,
}

impl SweepSpec {
    pub fn new(base: StateSpec, start: f64, stop: f64, count: usize) -> Self {
        Self { base, start, stop, count, ks: Vec::new(), options: RunOptions::default() }
    }

    pub fn with_ks(mut self, ks: Vec<usize>) -> Self {
        self.ks = ks;
        self
    }

    pub fn with_options(mut self, options: RunOptions) -> Self {
        self.options = options;
        self
    }

    /// Grid points in ascending order.
    pub fn grid(&self) -> Result<Vec<f64>, CliError> {
        let valid = |p: f64| (0.0..=1.0).contains(&p);
        if !valid(self.start) || !valid(self.stop) {
            return Err(CliError::Spec(format!("p grid [{}, {}] must lie within [0, 1]", self.start, self.stop)));
        }
        if self.count == 0 {
            return Err(CliError::Spec("p grid needs at least one point".into()));
        }
        let (lo, hi) = if self.start <= self.stop { (self.start, self.stop) } else { (self.stop, self.start) };
        if self.count == 1 {
            return Ok(vec![lo]);
        }
        let last = (self.count - 1) as f64;
        Ok((0..self.count).map(|i| if i + 1 == self.count { hi } else { lo + (hi - lo) * i as f64 / last }).collect())
    }
}

/// One projection cell; `Err` carries the message of a hard failure.
pub type Cell = Result<DistanceReport, String>;

#[derive(Debug)]
pub struct SweepRow {
    pub p: f64,
    /// One cell per entry of [`SweepTable::ks`].
    pub cells: Vec<Cell>,
}

#[derive(Debug)]
pub struct SweepTable {
    pub n: usize,
    pub ks: Vec<usize>,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    /// `D_k` of a row, with `D_n = 0`; `None` if `k` was not computed or failed.
    pub fn distance(&self, row: &SweepRow, k: usize) -> Option<f64> {
        if k == self.n {
            return Some(0.0);
        }
        let i = self.ks.iter().position(|&x| x == k)?;
        row.cells[i].as_ref().ok().map(|d| d.bits)
    }

    /// `k` values for which `C_k = D_{k−1} − D_k` can be formed.
    pub fn interaction_ks(&self) -> Vec<usize> {
        (2..=self.n)
            .filter(|&k| self.ks.contains(&(k - 1)) && (k == self.n || self.ks.contains(&k)))
            .collect()
    }

    pub fn header(&self) -> Vec<String> {
        let mut h = vec!["p".to_string()];
        h.extend(self.ks.iter().map(|k| format!("D{k}")));
        h.extend(self.interaction_ks().iter().map(|k| format!("C{k}")));
        h.extend(self.ks.iter().map(|k| format!("residual{k}")));
        h.extend(self.ks.iter().map(|k| format!("converged{k}")));
        h.extend(self.ks.iter().map(|k| format!("sweeps{k}")));
        h.push("status".into());
        h
    }

    pub fn record(&self, row: &SweepRow) -> Vec<String> {
        let mut r = vec![csv_num(row.p)];
        let cell_or_blank = |f: &dyn Fn(&DistanceReport) -> String| -> Vec<String> {
            row.cells.iter().map(|c| c.as_ref().map_or(String::new(), f)).collect()
        };
        r.extend(cell_or_blank(&|d| csv_num(d.bits)));
        for k in self.interaction_ks() {
            let c = self.distance(row, k - 1).zip(self.distance(row, k)).map(|(a, b)| a - b);
            r.push(c.map_or(String::new(), csv_num));
        }
        r.extend(cell_or_blank(&|d| csv_num(d.residual())));
        r.extend(cell_or_blank(&|d| matches!(d.outcome, Outcome::Converged | Outcome::Exact).to_string()));
        r.extend(cell_or_blank(&|d| d.sweeps().to_string()));
        r.push(row_status(&self.ks, row));
        r
    }

    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<(), CliError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.header()).map_err(csv_error)?;
        for row in &self.rows {
            w.write_record(self.record(row)).map_err(csv_error)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn csv_error(e: csv::Error) -> CliError {
    CliError::Io(std::io::Error::other(e))
}

/// `ok`, or `;`-separated notes such as `diverged(k=2,term=sym(ZZ))`.
fn row_status(ks: &[usize], row: &SweepRow) -> String {
    let notes: Vec<String> = ks
        .iter()
        .zip(&row.cells)
        .filter_map(|(k, cell)| match cell {
            Err(msg) => Some(format!("error(k={k}: {msg})")),
            Ok(d) => match d.outcome {
                Outcome::Converged | Outcome::Exact => None,
                Outcome::NotConverged => Some(format!("not_converged(k={k})")),
                Outcome::Diverged => {
                    let term = d.selected_run().and_then(|r| r.divergent_term.clone()).unwrap_or_default();
                    Some(format!("diverged(k={k} term={term})"))
                }
            },
        })
        .collect();
    if notes.is_empty() {
        "ok".into()
    } else {
        notes.join(";")
    }
}

fn weight_bounds(ks: &[usize], n: usize) -> Result<Vec<usize>, CliError> {
    let mut ks = if ks.is_empty() { (1..n.max(2)).collect() } else { ks.to_vec() };
    ks.sort_unstable();
    ks.dedup();
    if let Some(&bad) = ks.iter().find(|&&k| k == 0 || k > n) {
        return Err(CliError::Spec(format!("weight bound k = {bad} outside 1..={n}")));
    }
    Ok(ks)
}

/// Runs every `(p, k)` cell on a pool of `options.jobs` workers.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepTable, CliError> {
    let grid = spec.grid()?;
    let base = build_state(&spec.base)?;
    let n = base.num_qubits();
    let ks = weight_bounds(&spec.ks, n)?;
    // White noise commutes with every unitary, so a symmetry of the base
    // state is a symmetry of every grid point.
    let sym = spec.options.symmetry.resolve(&base)?;
    let bases = ks
        .iter()
        .map(|&k| match &sym.group {
            Some(g) if k < n => invariant_basis(n, k, g).map(Some).map_err(CliError::spec),
            _ => Ok(None),
        })
        .collect::<Result<Vec<_>, _>>()?;
    let states = grid
        .iter()
        .map(|&p| build_state(&spec.base.with_mix(p)))
        .collect::<Result<Vec<_>, _>>()?;
    let overrides: &ConfigOverrides = &spec.options.overrides;
    let cfg = overrides.config(n)?;
    let method = spec.options.method;

    let tasks: Vec<(usize, usize)> = (0..grid.len()).flat_map(|i| (0..ks.len()).map(move |j| (i, j))).collect();
    let pool = crate::input::thread_pool(spec.options.jobs)?;
    let cells: Vec<Cell> = pool.install(|| {
        tasks
            .par_iter()
            .map(|&(i, j)| {
                let rho = &states[i];
                let k = ks[j];
                match &bases[j] {
                    Some(b) => qip_core::measures::distance_with_basis(rho, k, method, &cfg, b),
                    None => distance(rho, k, method, &cfg, None),
                }
                .map_err(|e| e.to_string())
            })
            .collect()
    });
    let mut cells = cells.into_iter();
    let rows = grid
        .iter()
        .map(|&p| SweepRow { p, cells: cells.by_ref().take(ks.len()).collect() })
        .collect();
    Ok(SweepTable { n, ks, rows })
}
