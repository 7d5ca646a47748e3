use std::path::Path;

use ldg_core::qtensor::Coords5;
use ldg_core::sampling::Sampler;
use ldg_core::solver::{
    diagnostics, el_residual, make_hedgehog_field, minimize, read_snapshot, sweep_l_lenient, total_energy,
    write_snapshot, DensityKind, QField, SolverConfig, SweepRow,
};
use ldg_core::QTensor;
use serde::Serialize;

use crate::config::Scenario;
use crate::record::{Check, ResultRecord};
use crate::{CliError, Result, RunConfig};

pub const CSV_HEADER: [&str; 10] = [
    "L",
    "elastic_energy",
    "bulk_over_L",
    "total",
    "max_dist_uniaxial",
    "max_norm",
    "el_residual",
    "diag_gradient_penalty",
    "caccioppoli_ratio",
    "iterations",
];

/// A record plus whatever artifacts the command produced.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub record: ResultRecord,
    pub csv: Option<String>,
    pub snapshot: Option<Vec<u8>>,
}

impl Outcome {
    /// Writes `record.json` and, when present, `sweep.csv` and `field.ldgq`.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("record.json"), self.record.to_json())?;
        if let Some(csv) = &self.csv {
            std::fs::write(dir.join("sweep.csv"), csv)?;
        }
        if let Some(snap) = &self.snapshot {
            std::fs::write(dir.join("field.ldgq"), snap)?;
        }
        Ok(())
    }
}

/// The starting field: a snapshot when `solver.resume` is set, otherwise the
/// scenario field with an optional seeded interior perturbation.
pub fn initial_field(cfg: &RunConfig) -> Result<QField> {
    let mc = cfg.material()?;
    let s = mc.s_plus();
    let sv = &cfg.solver;
    if let Some(path) = &sv.resume {
        let file = std::fs::File::open(path)
            .map_err(|e| CliError::Config(format!("solver.resume: cannot open {}: {e}", path.display())))?;
        let snap = read_snapshot(std::io::BufReader::new(file))?;
        if (snap.s_plus - s).abs() > 1e-12 * s {
            return Err(CliError::Config(format!(
                "solver.resume: snapshot was written with s₊ = {}, config gives {s}",
                snap.s_plus
            )));
        }
        return Ok(snap.field);
    }
    let mut field = match sv.scenario {
        Scenario::Hedgehog => make_hedgehog_field(sv.dims, sv.h, &mc)?,
        Scenario::Adversarial => {
            let e0 = Coords5([1.0, 0.0, 0.0, 0.0, 0.0]).unpack();
            let base = QTensor::q_plus(s) * -10.0;
            QField::from_fn(sv.dims, sv.h, |x| base + e0 * (10.0 * s * x[2]))?
        }
    };
    if sv.perturbation > 0.0 {
        let mut rng = Sampler::new(cfg.sampling.seed);
        for i in 0..field.len() {
            if !field.is_boundary(i) {
                let q = field.get(i) + rng.q_tensor(sv.perturbation);
                field.set(i, &q);
            }
        }
    }
    Ok(field)
}

fn residual_bound(scfg: &SolverConfig, h: f64) -> f64 {
    10.0 * scfg.grad_tol / h.powi(3)
}

/// The strong-form residual matches the discrete gradient over h³ exactly
/// only for the one-constant density; elsewhere the two stencils differ at
/// O(h²), which is O(1) at a defect core.
fn residual_check(name: String, scfg: &SolverConfig, residual: f64, h: f64) -> Check {
    let l = scfg.elastic;
    if scfg.density_kind == DensityKind::Original && l.l2 == 0.0 && l.l3 == 0.0 && l.l4 == 0.0 {
        Check::at_most(name, residual, residual_bound(scfg, h))
    } else {
        Check::skipped(name).with_note(format!("{residual:.6e}; the bound applies to the one-constant density only"))
    }
}

fn explain(msg: String, scfg: &SolverConfig) -> String {
    if scfg.density_kind == DensityKind::Original && scfg.elastic.l4 != 0.0 {
        format!("{msg} (the original density with L4 = {} is not coercive)", scfg.elastic.l4)
    } else {
        msg
    }
}

#[derive(Debug, Serialize)]
struct RunSummary {
    iterations: usize,
    converged: bool,
    stalled: bool,
    grad_norm: f64,
    initial_energy: f64,
    final_energy: f64,
    energy_log: Vec<f64>,
}

pub fn cmd_minimize(cfg: &RunConfig) -> Result<Outcome> {
    cfg.validate()?;
    let l = cfg.single_l()?;
    let scfg = cfg.solver_config(l)?;
    let start = initial_field(cfg)?;
    let mut rec = ResultRecord::new("minimize", cfg.sampling.seed, cfg.to_toml());
    let (field, stats) = match minimize(&start, &scfg) {
        Ok(r) => r,
        Err(e) => {
            rec.push(Check::flag("minimize", false).with_note(explain(e.to_string(), &scfg)));
            return Ok(Outcome { record: rec, csv: None, snapshot: None });
        }
    };
    let energy = total_energy(&field, &scfg)?;
    let residual = el_residual(&field, &scfg)?;
    let diag = diagnostics(&field, &scfg);
    rec.push(Check::judged("converged", stats.converged, stats.grad_norm, scfg.grad_tol));
    let monotone = stats.energy_log.windows(2).all(|w| w[1] <= w[0]);
    rec.push(Check::flag("energy_monotone", monotone));
    rec.push(residual_check("el_residual".into(), &scfg, residual, field.h()));
    if scfg.density_kind == DensityKind::ModifiedCutoff {
        rec.push(Check::at_most("max_principle", diag.max_norm, scfg.cutoff_m + 1.0 + 1e-8));
    }
    rec.detail("l", l);
    rec.detail("energy", energy);
    rec.detail("el_residual", residual);
    rec.detail("diagnostics", diag);
    rec.detail(
        "minimize",
        RunSummary {
            iterations: stats.iterations,
            converged: stats.converged,
            stalled: stats.stalled,
            grad_norm: stats.grad_norm,
            initial_energy: stats.initial_energy,
            final_energy: stats.final_energy,
            energy_log: stats.energy_log,
        },
    );
    let mut snap = Vec::new();
    write_snapshot(&mut snap, &field, scfg.material.s_plus(), scfg.density_kind)?;
    Ok(Outcome { record: rec, csv: None, snapshot: Some(snap) })
}

#[derive(Debug, Serialize)]
struct SweepEntry {
    l: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    row: Option<SweepRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn csv_row(l: f64, row: Option<&SweepRow>) -> Vec<String> {
    let Some(r) = row else {
        let mut v = vec![String::new(); CSV_HEADER.len()];
        v[0] = l.to_string();
        return v;
    };
    vec![
        r.l.to_string(),
        r.energy.elastic.to_string(),
        r.energy.bulk_over_l.to_string(),
        r.energy.total.to_string(),
        r.energy.max_dist_uniaxial.to_string(),
        r.diagnostics.max_norm.to_string(),
        r.el_residual.to_string(),
        r.diagnostics.diag_gradient_penalty.to_string(),
        r.diagnostics.caccioppoli_ratio.map(|v| v.to_string()).unwrap_or_default(),
        r.iterations.to_string(),
    ]
}

pub fn cmd_sweep(cfg: &RunConfig) -> Result<Outcome> {
    cfg.validate()?;
    let ls = cfg.l_list()?;
    let scfg = cfg.solver_config(ls[0])?;
    let start = initial_field(cfg)?;
    let mut rec = ResultRecord::new("sweep", cfg.sampling.seed, cfg.to_toml());

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    let mut entries = Vec::new();
    for (l, res) in sweep_l_lenient(&scfg, &ls, &start)? {
        match res {
            Ok(row) => {
                rec.push(Check::judged(
                    format!("converged[L={l}]"),
                    row.converged,
                    row.iterations as f64,
                    scfg.max_iters as f64,
                ));
                rec.push(residual_check(format!("el_residual[L={l}]"), &scfg, row.el_residual, start.h()));
                if scfg.density_kind == DensityKind::ModifiedCutoff {
                    rec.push(Check::at_most(
                        format!("max_principle[L={l}]"),
                        row.diagnostics.max_norm,
                        scfg.cutoff_m + 1.0 + 1e-8,
                    ));
                }
                w.write_record(csv_row(l, Some(&row)))?;
                entries.push(SweepEntry { l, row: Some(row), error: None });
            }
            Err(msg) => {
                rec.push(Check::flag(format!("converged[L={l}]"), false).with_note(explain(msg.clone(), &scfg)));
                w.write_record(csv_row(l, None))?;
                entries.push(SweepEntry { l, row: None, error: Some(msg) });
            }
        }
    }
    rec.detail("sweep", entries);
    let bytes = w.into_inner().map_err(|e| CliError::Config(format!("csv buffer: {e}")))?;
    let csv = String::from_utf8(bytes).expect("csv fields are ASCII");
    Ok(Outcome { record: rec, csv: Some(csv), snapshot: None })
}
