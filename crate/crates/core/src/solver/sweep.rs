use serde::{Deserialize, Serialize};

use super::energy::energy_with;
use super::{diagnostics, el_residual, minimize, Diagnostics, EnergyBreakdown, QField, SolverConfig};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub l: f64,
    pub energy: EnergyBreakdown,
    pub el_residual: f64,
    pub diagnostics: Diagnostics,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    /// Ordered by decreasing L.
    pub rows: Vec<SweepRow>,
    /// Final field of the last successful L.
    #[serde(skip)]
    pub final_field: Option<QField>,
}

fn check_list(l_list: &[f64]) -> Result<()> {
    if l_list.is_empty() {
        return Err(Error::Domain("empty L list".into()));
    }
    if l_list.iter().any(|&l| !(l > 0.0)) || l_list.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::Domain(format!("L list must be positive and strictly decreasing: {l_list:?}")));
    }
    Ok(())
}

fn run_one(cfg: &SolverConfig, field: &QField) -> Result<(QField, SweepRow)> {
    let (out, stats) = minimize(field, cfg)?;
    let density = cfg.density()?;
    let row = SweepRow {
        l: cfg.l,
        energy: energy_with(&out, cfg, &density),
        el_residual: el_residual(&out, cfg)?,
        diagnostics: diagnostics(&out, cfg),
        iterations: stats.iterations,
        converged: stats.converged,
    };
    Ok((out, row))
}

/// Minimizes at each L in turn, warm-starting from the previous solution.
/// The first failure is returned with its L attached.
pub fn sweep_l(cfg_base: &SolverConfig, l_list: &[f64], field0: &QField) -> Result<SweepReport> {
    check_list(l_list)?;
    let mut field = field0.clone();
    let mut rows = Vec::with_capacity(l_list.len());
    for &l in l_list {
        let (out, row) = run_one(&cfg_base.with_l(l), &field).map_err(|e| Error::AtL { l, source: Box::new(e) })?;
        rows.push(row);
        field = out;
    }
    Ok(SweepReport { rows, final_field: Some(field) })
}

/// Like [`sweep_l`] but keeps going after a failed L; failed rows carry the
/// error and the next L restarts from the last good field.
pub fn sweep_l_lenient(
    cfg_base: &SolverConfig,
    l_list: &[f64],
    field0: &QField,
) -> Result<Vec<(f64, std::result::Result<SweepRow, String>)>> {
    check_list(l_list)?;
    let mut field = field0.clone();
    let mut out = Vec::with_capacity(l_list.len());
    for &l in l_list {
        match run_one(&cfg_base.with_l(l), &field) {
            Ok((f, row)) => {
                field = f;
                out.push((l, Ok(row)));
            }
            Err(e) => out.push((l, Err(e.to_string()))),
        }
    }
    Ok(out)
}
