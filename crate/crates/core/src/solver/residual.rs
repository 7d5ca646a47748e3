use nalgebra::Matrix3;
use rayon::prelude::*;

use super::{QField, SolverConfig};
use crate::bulk::bulk_gradient;
use crate::error::Result;
use crate::qtensor::{Coords5, MaterialConstants};

/// Sup over interior nodes of |α ΔQ + Σ_k D_k(∂V/∂p_k) − ∂V/∂Q − g_B/L|, with
/// f = α/2|p|² + V, central stencils and Coords5 norms.
pub fn el_residual(field: &QField, cfg: &SolverConfig) -> Result<f64> {
    cfg.validate()?;
    let density = cfg.density()?;
    let alpha = density.alpha_split();
    let h = field.h();
    // ∂V/∂p_k and ∂V/∂Q at every node
    let node_terms: Vec<([Coords5; 3], Coords5)> = (0..field.len())
        .into_par_iter()
        .map(|i| {
            let p = field.node_gradient(i);
            let g = density.gradient(&field.get(i), &p);
            let dv: [Coords5; 3] = std::array::from_fn(|k| {
                let pk = Coords5::pack(&p.p[k]).0;
                Coords5(std::array::from_fn(|a| g.dp[k].0[a] - alpha * pk[a]))
            });
            (dv, g.dq)
        })
        .collect();
    let res: Vec<f64> = (0..field.len())
        .into_par_iter()
        .filter(|&i| !field.is_boundary(i))
        .map(|i| {
            let lap = field.laplacian(i);
            let gb = bulk_gradient(&field.get(i), &cfg.material).pack5();
            let mut r = [0.0; 5];
            for a in 0..5 {
                r[a] = alpha * lap.0[a] - node_terms[i].1 .0[a] - gb.0[a] / cfg.l;
            }
            for k in 0..3 {
                let m = field.neighbour(i, k, false).expect("interior");
                let p = field.neighbour(i, k, true).expect("interior");
                for a in 0..5 {
                    r[a] += (node_terms[p].0[k].0[a] - node_terms[m].0[k].0[a]) / (2.0 * h);
                }
            }
            Coords5(r).norm()
        })
        .collect();
    Ok(res.into_iter().fold(0.0, f64::max))
}

/// Sup-norm of the harmonic-map system for uniaxial fields,
/// ΔQ − (2/s)∇_kQ∇_kQ + (2/s)(Q/s + I/3)|∇Q|², over interior nodes farther
/// than `r_excl` from the origin.
pub fn harmonic_residual(field: &QField, mc: &MaterialConstants, r_excl: f64) -> f64 {
    harmonic_residual_strided(field, mc, r_excl, 1)
}

/// As [`harmonic_residual`], restricted to nodes whose indices are all
/// multiples of `stride`; with stride 2 on a refined grid this samples the
/// same physical points as the grid before refinement.
pub fn harmonic_residual_strided(field: &QField, mc: &MaterialConstants, r_excl: f64, stride: usize) -> f64 {
    let s = mc.s_plus();
    let h = field.h();
    let stride = stride.max(1);
    let res: Vec<f64> = (0..field.len())
        .into_par_iter()
        .filter(|&i| {
            !field.is_boundary(i)
                && field.coords(i).iter().all(|c| c % stride == 0)
                && field.position(i).norm() > r_excl + 1e-9 * h
        })
        .map(|i| {
            let q = field.data()[i].to_matrix();
            let p = field.node_gradient(i);
            let lap = field.laplacian(i).to_matrix();
            let mut quad = Matrix3::zeros();
            let mut g2 = 0.0;
            for k in 0..3 {
                quad += p.p[k] * p.p[k];
                g2 += p.p[k].norm_squared();
            }
            let r = lap - quad * (2.0 / s) + (q / s + Matrix3::identity() / 3.0) * (2.0 / s * g2);
            r.norm()
        })
        .collect();
    res.into_iter().fold(0.0, f64::max)
}
