use serde::{Deserialize, Serialize};

use super::energy::{energy_parts, gradient_sup_norm, gradient_with};
use super::{DensityKind, QField, SolverConfig};
use crate::error::{Error, Result};
use crate::qtensor::Coords5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimizeStats {
    pub iterations: usize,
    pub converged: bool,
    pub grad_norm: f64,
    pub initial_energy: f64,
    pub final_energy: f64,
    /// Energy after every accepted step, starting with the initial energy;
    /// accumulated from the term-by-term decreases.
    pub energy_log: Vec<f64>,
    /// The last line search, even along −g, found no step meeting Armijo;
    /// the gradient is then at the round-off floor of the energy.
    pub stalled: bool,
}

fn dot(a: &[Coords5], b: &[Coords5]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.0.iter().zip(&y.0).map(|(u, v)| u * v).sum::<f64>()).sum()
}

fn axpy(field: &QField, t: f64, d: &[Coords5]) -> QField {
    let mut out = field.clone();
    for (i, (x, di)) in out.data_mut().iter_mut().zip(d).enumerate() {
        if !field.is_boundary(i) {
            for a in 0..5 {
                x.0[a] += t * di.0[a];
            }
        }
    }
    out
}

/// Armijo-backtracking descent from `field0`; boundary nodes are never touched.
pub fn minimize(field0: &QField, cfg: &SolverConfig) -> Result<(QField, MinimizeStats)> {
    cfg.validate()?;
    let density = cfg.density()?;
    if cfg.density_kind == DensityKind::Original && cfg.elastic.l4 != 0.0 && !cfg.allow_noncoercive {
        return Err(Error::NonCoercive(format!(
            "original density with L4 = {} is unbounded below; set allow_noncoercive to run it anyway",
            cfg.elastic.l4
        )));
    }

    let mut field = field0.clone();
    let (mut energy, mut grad) = gradient_with(&field, cfg, &density);
    if !energy.is_finite() {
        return Err(Error::Divergence { iteration: 0, reason: format!("initial energy is {energy}") });
    }
    let mut stats = MinimizeStats {
        iterations: 0,
        converged: false,
        grad_norm: gradient_sup_norm(&grad),
        initial_energy: energy,
        final_energy: energy,
        energy_log: vec![energy],
        stalled: false,
    };
    let mut parts = energy_parts(&field, cfg, &density);
    let mut dir: Vec<Coords5> = grad.iter().map(|g| Coords5(g.0.map(|v| -v))).collect();
    let mut step = cfg.initial_step;
    let mut restarted = false;

    while stats.iterations < cfg.max_iters {
        if stats.grad_norm < cfg.grad_tol {
            stats.converged = true;
            break;
        }
        let mut slope = dot(&grad, &dir);
        if slope >= 0.0 {
            dir = grad.iter().map(|g| Coords5(g.0.map(|v| -v))).collect();
            slope = dot(&grad, &dir);
        }
        let mut t = step * 2.0;
        let accepted = loop {
            let trial = axpy(&field, t, &dir);
            let trial_parts = energy_parts(&trial, cfg, &density);
            let de: f64 = trial_parts.iter().zip(&parts).map(|(a, b)| a - b).sum();
            if de.is_nan() || de == f64::NEG_INFINITY {
                return Err(Error::Divergence {
                    iteration: stats.iterations,
                    reason: format!("energy change became {de}"),
                });
            }
            if de <= cfg.armijo_c * t * slope {
                break Some((trial, trial_parts, de, t));
            }
            t *= cfg.backtrack;
            if t * dir.iter().map(|d| d.norm()).fold(0.0, f64::max) < 1e-300 || t == 0.0 {
                break None;
            }
        };
        let Some((next, next_parts, de, t)) = accepted else {
            if restarted {
                stats.stalled = true;
                break;
            }
            // retry once along −g before giving up
            restarted = true;
            dir = grad.iter().map(|g| Coords5(g.0.map(|v| -v))).collect();
            step = cfg.initial_step;
            continue;
        };
        restarted = false;
        step = t;
        field = next;
        parts = next_parts;
        stats.iterations += 1;
        let (e, g) = gradient_with(&field, cfg, &density);
        let e = if e.is_finite() { energy + de } else { e };
        let max_norm = field.max_norm();
        if !e.is_finite() || max_norm > cfg.blowup_norm {
            return Err(Error::Divergence {
                iteration: stats.iterations,
                reason: format!("energy {e:.6e}, max |Q| = {max_norm:.6e} (blow-up threshold {:.3e})", cfg.blowup_norm),
            });
        }
        let beta = if cfg.use_ncg {
            let num = dot(&g, &g) - dot(&g, &grad);
            let den = dot(&grad, &grad);
            if den > 0.0 {
                (num / den).max(0.0)
            } else {
                0.0
            }
        } else {
            0.0
        };
        for (d, gi) in dir.iter_mut().zip(&g) {
            for a in 0..5 {
                d.0[a] = -gi.0[a] + beta * d.0[a];
            }
        }
        energy = e;
        grad = g;
        stats.grad_norm = gradient_sup_norm(&grad);
        stats.energy_log.push(energy);
    }
    if stats.grad_norm < cfg.grad_tol {
        stats.converged = true;
    }
    stats.final_energy = energy;
    Ok((field, stats))
}
