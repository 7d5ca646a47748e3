use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{QField, SolverConfig};
use crate::bulk::{bulk_gradient, bulk_shifted};
use crate::densities::{ElasticDensity, TensorGradient};
use crate::error::Result;
use crate::qtensor::{Coords5, MaterialConstants};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub elastic: f64,
    /// (1/L)∫ f̃_B.
    pub bulk_over_l: f64,
    pub total: f64,
    /// max dist(Q, S_*) over nodes outside the configured core radius.
    pub max_dist_uniaxial: f64,
    pub max_norm: f64,
}

/// Lower corners of all cells, in storage order.
fn cells(field: &QField) -> Vec<[usize; 3]> {
    let [nx, ny, nz] = field.dims();
    let mut out = Vec::with_capacity((nx - 1) * (ny - 1) * (nz - 1));
    for i in 0..nx - 1 {
        for j in 0..ny - 1 {
            for k in 0..nz - 1 {
                out.push([i, j, k]);
            }
        }
    }
    out
}

fn corner_nodes(field: &QField, c: [usize; 3]) -> [usize; 8] {
    std::array::from_fn(|b| field.index(c[0] + (b >> 2 & 1), c[1] + (b >> 1 & 1), c[2] + (b & 1)))
}

/// Bit of `axis` in a corner label b = 4·bx + 2·by + bz.
fn axis_bit(axis: usize) -> usize {
    1 << (2 - axis)
}

/// Per-corner edge gradients of one cell.
fn corner_gradient(field: &QField, nodes: &[usize; 8], b: usize) -> TensorGradient {
    let h = field.h();
    let p = std::array::from_fn(|axis| {
        let bit = axis_bit(axis);
        let hi = field.data()[nodes[b | bit]].to_matrix();
        let lo = field.data()[nodes[b & !bit]].to_matrix();
        (hi - lo) / h
    });
    TensorGradient { p }
}

/// Trapezoid weight of a node: h³ times 1/2 per axis on which it is an end node.
fn node_weight(field: &QField, idx: usize) -> f64 {
    let c = field.coords(idx);
    let dims = field.dims();
    let h = field.h();
    (0..3).fold(h * h * h, |w, a| if c[a] == 0 || c[a] == dims[a] - 1 { w * 0.5 } else { w })
}

fn elastic_parts(field: &QField, density: &ElasticDensity) -> Vec<f64> {
    let w = field.h().powi(3) / 8.0;
    cells(field)
        .par_iter()
        .map(|&c| {
            let nodes = corner_nodes(field, c);
            (0..8).map(|b| density.value(&field.get(nodes[b]), &corner_gradient(field, &nodes, b))).sum::<f64>() * w
        })
        .collect()
}

fn bulk_parts(field: &QField, mc: &MaterialConstants) -> Vec<f64> {
    (0..field.len()).into_par_iter().map(|i| node_weight(field, i) * bulk_shifted(&field.get(i), mc)).collect()
}

fn elastic_energy(field: &QField, density: &ElasticDensity) -> f64 {
    elastic_parts(field, density).iter().sum()
}

fn bulk_energy(field: &QField, mc: &MaterialConstants) -> f64 {
    bulk_parts(field, mc).iter().sum()
}

/// Per-cell elastic and per-node bulk contributions, in a fixed order. Energy
/// differences taken term by term avoid the cancellation of subtracting
/// two totals.
pub(super) fn energy_parts(field: &QField, cfg: &SolverConfig, density: &ElasticDensity) -> Vec<f64> {
    let mut parts = elastic_parts(field, density);
    parts.extend(bulk_parts(field, &cfg.material).into_iter().map(|b| b / cfg.l));
    parts
}

fn max_dist_uniaxial(field: &QField, s_plus: f64, core_radius: f64) -> f64 {
    (0..field.len())
        .filter(|&i| field.position(i).norm() >= core_radius)
        .map(|i| field.get(i).uniaxial_distance(s_plus))
        .fold(0.0, f64::max)
}

pub(super) fn energy_with(field: &QField, cfg: &SolverConfig, density: &ElasticDensity) -> EnergyBreakdown {
    let elastic = elastic_energy(field, density);
    let bulk_over_l = bulk_energy(field, &cfg.material) / cfg.l;
    EnergyBreakdown {
        elastic,
        bulk_over_l,
        total: elastic + bulk_over_l,
        max_dist_uniaxial: max_dist_uniaxial(field, cfg.material.s_plus(), cfg.core_radius),
        max_norm: field.max_norm(),
    }
}

/// Discrete E_L; see the module docs for the quadrature.
pub fn total_energy(field: &QField, cfg: &SolverConfig) -> Result<EnergyBreakdown> {
    cfg.validate()?;
    Ok(energy_with(field, cfg, &cfg.density()?))
}

/// Total energy only, without the diagnostic fields.
#[cfg(test)]
pub(super) fn total_only(field: &QField, cfg: &SolverConfig, density: &ElasticDensity) -> f64 {
    elastic_energy(field, density) + bulk_energy(field, &cfg.material) / cfg.l
}

pub(super) fn gradient_with(field: &QField, cfg: &SolverConfig, density: &ElasticDensity) -> (f64, Vec<Coords5>) {
    let h = field.h();
    let w = h.powi(3) / 8.0;
    let cell_list = cells(field);
    let parts: Vec<(f64, [usize; 8], [[f64; 5]; 8])> = cell_list
        .par_iter()
        .map(|&c| {
            let nodes = corner_nodes(field, c);
            let mut g = [[0.0; 5]; 8];
            let mut e = 0.0;
            for b in 0..8 {
                let d = density.gradient(&field.get(nodes[b]), &corner_gradient(field, &nodes, b));
                e += d.value;
                for a in 0..5 {
                    g[b][a] += w * d.dq.0[a];
                }
                for axis in 0..3 {
                    let bit = axis_bit(axis);
                    for a in 0..5 {
                        let v = w * d.dp[axis].0[a] / h;
                        g[b | bit][a] += v;
                        g[b & !bit][a] -= v;
                    }
                }
            }
            (e * w, nodes, g)
        })
        .collect();
    let mut grad = vec![Coords5([0.0; 5]); field.len()];
    let mut energy = 0.0;
    for (e, nodes, g) in &parts {
        energy += e;
        for b in 0..8 {
            for a in 0..5 {
                grad[nodes[b]].0[a] += g[b][a];
            }
        }
    }
    let mc = &cfg.material;
    let bulk: Vec<(f64, Coords5)> = (0..field.len())
        .into_par_iter()
        .map(|i| {
            let q = field.get(i);
            let wi = node_weight(field, i) / cfg.l;
            (wi * bulk_shifted(&q, mc), Coords5(bulk_gradient(&q, mc).pack5().0.map(|v| v * wi)))
        })
        .collect();
    for (i, (e, g)) in bulk.iter().enumerate() {
        energy += e;
        for a in 0..5 {
            grad[i].0[a] += g.0[a];
        }
    }
    for (i, g) in grad.iter_mut().enumerate() {
        if field.is_boundary(i) {
            *g = Coords5([0.0; 5]);
        }
    }
    (energy, grad)
}

/// Exact gradient of the discrete energy in Coords5 per node; zero on the
/// Dirichlet nodes.
pub fn energy_gradient(field: &QField, cfg: &SolverConfig) -> Result<Vec<Coords5>> {
    cfg.validate()?;
    Ok(gradient_with(field, cfg, &cfg.density()?).1)
}

/// Largest per-node Euclidean norm of a gradient.
pub fn gradient_sup_norm(grad: &[Coords5]) -> f64 {
    grad.iter().map(|g| g.norm()).fold(0.0, f64::max)
}
