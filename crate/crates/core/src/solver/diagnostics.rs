use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use super::{QField, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub max_norm: f64,
    /// (1/L)∫_B |(Rᵀ∇Q R)_D|² over `cfg.diag_ball`.
    pub diag_gradient_penalty: f64,
    /// Nodes in the ball with an isotropic spectrum, where R is undefined.
    pub degenerate_skipped: usize,
    /// ∫_{B_{r/2}}|∇Q|² / ((1/r²)∫_{B_r}|Q − Q̄|²); None when the denominator vanishes.
    pub caccioppoli_ratio: Option<f64>,
}

/// Central difference of a per-node vector along `axis`; one-sided second
/// order at the ends of the axis.
fn derivative(field: &QField, values: &[Vector3<f64>], idx: usize, axis: usize) -> Vector3<f64> {
    let h = field.h();
    match (field.neighbour(idx, axis, false), field.neighbour(idx, axis, true)) {
        (Some(m), Some(p)) => (values[p] - values[m]) / (2.0 * h),
        (None, Some(p)) => {
            let pp = field.neighbour(p, axis, true).expect("at least 3 nodes per axis");
            (values[p] * 4.0 - values[idx] * 3.0 - values[pp]) / (2.0 * h)
        }
        (Some(m), None) => {
            let mm = field.neighbour(m, axis, false).expect("at least 3 nodes per axis");
            (values[idx] * 3.0 - values[m] * 4.0 + values[mm]) / (2.0 * h)
        }
        (None, None) => unreachable!("axis has at least 3 nodes"),
    }
}

pub fn diagnostics(field: &QField, cfg: &SolverConfig) -> Diagnostics {
    let h = field.h();
    let vol = h * h * h;
    let slack = 1e-9 * h;
    // (Rᵀ∂_kQ R)_D = diag(∂_kλ): differentiate the sorted eigenvalue fields.
    let eig: Vec<Vector3<f64>> = (0..field.len()).map(|i| field.get(i).eigendecompose().eigenvalues).collect();
    let mut penalty = 0.0;
    let mut skipped = 0;
    for i in 0..field.len() {
        if !cfg.diag_ball.contains(&field.position(i), slack) {
            continue;
        }
        let ev = eig[i];
        if ev[2] - ev[0] <= 1e-8 * (1.0 + field.data()[i].norm()) {
            skipped += 1;
            continue;
        }
        penalty += vol * (0..3).map(|k| derivative(field, &eig, i, k).norm_squared()).sum::<f64>();
    }

    let ball = cfg.cacc_ball;
    let half = super::Ball { radius: 0.5 * ball.radius, ..ball };
    let mut num = 0.0;
    let mut inner = Vec::new();
    for i in 0..field.len() {
        let x = field.position(i);
        if half.contains(&x, slack) {
            num += vol * field.node_gradient(i).norm_squared();
        }
        if ball.contains(&x, slack) {
            inner.push(i);
        }
    }
    let mut den = 0.0;
    if !inner.is_empty() {
        let mut mean = Matrix3::zeros();
        for &i in &inner {
            mean += field.data()[i].to_matrix();
        }
        mean /= inner.len() as f64;
        for &i in &inner {
            den += vol * (field.data()[i].to_matrix() - mean).norm_squared();
        }
        den /= ball.radius * ball.radius;
    }
    let caccioppoli_ratio = if den > 1e-300 { Some(num / den) } else { None };

    Diagnostics {
        max_norm: field.max_norm(),
        diag_gradient_penalty: penalty / cfg.l,
        degenerate_skipped: skipped,
        caccioppoli_ratio,
    }
}
