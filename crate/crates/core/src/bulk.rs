//! The bulk potential f_B, its nonnegative shift, gradient and Hessian, and
//! the comparison bounds between f̃_B and the distance to S_*.

use nalgebra::{SMatrix, Vector3};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qtensor::{Coords5, MaterialConstants, QTensor};

/// Default radius of S_δ as a fraction of s₊.
pub const DEFAULT_DELTA_FRACTION: f64 = 0.1;

pub type Hessian5 = SMatrix<f64, 5, 5>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BulkEval {
    pub value: f64,
    pub shifted_value: f64,
    pub gradient: QTensor,
    pub hessian: Hessian5,
}

pub fn bulk_eval(q: &QTensor, mc: &MaterialConstants) -> BulkEval {
    let value = bulk_value(q, mc);
    BulkEval {
        value,
        shifted_value: value - mc.bulk_min(),
        gradient: bulk_gradient(q, mc),
        hessian: bulk_hessian(q, mc),
    }
}

/// −(a/2)tr Q² − (b/3)tr Q³ + (c/4)(tr Q²)².
pub fn bulk_value(q: &QTensor, mc: &MaterialConstants) -> f64 {
    let t2 = q.trace_sq();
    -0.5 * mc.a * t2 - mc.b / 3.0 * q.trace_cube() + 0.25 * mc.c * t2 * t2
}

/// f_B − min f_B ≥ 0.
pub fn bulk_shifted(q: &QTensor, mc: &MaterialConstants) -> f64 {
    bulk_value(q, mc) - mc.bulk_min()
}

/// ∇_Q f_B restricted to S_0: −aQ − b(Q² − tr Q²/3 I) + c tr Q² Q.
pub fn bulk_gradient(q: &QTensor, mc: &MaterialConstants) -> QTensor {
    let m = q.matrix();
    let t2 = q.trace_sq();
    let mut q2 = m * m;
    for i in 0..3 {
        q2[(i, i)] -= t2 / 3.0;
    }
    QTensor::new(m * (-mc.a + mc.c * t2) - q2 * mc.b)
}

/// Second derivative of f_B in the Coords5 chart.
pub fn bulk_hessian(q: &QTensor, mc: &MaterialConstants) -> Hessian5 {
    let basis = Coords5::basis();
    let v = q.pack5().0;
    let t2 = q.trace_sq();
    let m = q.matrix();
    Hessian5::from_fn(|i, j| {
        let delta = if i == j { 1.0 } else { 0.0 };
        -mc.a * delta - 2.0 * mc.b * (m * basis[i] * basis[j]).trace() + mc.c * (2.0 * v[i] * v[j] + t2 * delta)
    })
}

fn check_neighbourhood(q: &QTensor, mc: &MaterialConstants, delta: f64) -> Result<f64> {
    let dist = q.dist_to_uniaxial(mc)?;
    if dist > delta {
        return Err(Error::OutsideNeighbourhood { dist, delta });
    }
    Ok(dist)
}

/// The bulk Hessian in Q's eigenframe applied to a traceless diagonal
/// perturbation ξ, against the bound (λ/2)Σξ_ii². Returns (lhs, rhs).
pub fn hessian_bound_check(q: &QTensor, xi: &Vector3<f64>, mc: &MaterialConstants, delta: f64) -> Result<(f64, f64)> {
    check_neighbourhood(q, mc, delta)?;
    if xi.sum().abs() > 1e-12 * (1.0 + xi.norm()) {
        return Err(Error::Domain(format!("xi must be traceless, sum = {}", xi.sum())));
    }
    let d = q.eigendecompose().eigenvalues;
    let n2 = d.norm_squared();
    let mut lhs = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            let delta_ij = if i == j { 1.0 } else { 0.0 };
            let h = -mc.a * delta_ij - 2.0 * mc.b * delta_ij * d[i] + mc.c * (delta_ij * n2 + 2.0 * d[i] * d[j]);
            lhs += h * xi[i] * xi[j];
        }
    }
    Ok((lhs, 0.5 * mc.lambda() * xi.norm_squared()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistanceBounds {
    pub shifted: f64,
    pub dist_sq: f64,
    pub grad_norm: f64,
}

pub fn distance_bounds_check(q: &QTensor, mc: &MaterialConstants, delta: f64) -> Result<DistanceBounds> {
    let dist = check_neighbourhood(q, mc, delta)?;
    Ok(DistanceBounds { shifted: bulk_shifted(q, mc), dist_sq: dist * dist, grad_norm: bulk_gradient(q, mc).norm() })
}

/// F(Q) = f̃_B(Q) + |Q − π(Q)|².
pub fn modified_f(q: &QTensor, mc: &MaterialConstants, delta: f64) -> Result<f64> {
    let dist = check_neighbourhood(q, mc, delta)?;
    Ok(bulk_shifted(q, mc) + dist * dist)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModifiedFHessian {
    /// Smallest eigenvalue on the 3-dimensional normal space of S_* at π(Q).
    pub normal_min: f64,
    /// Smallest eigenvalue over all of S_0; near zero, since F vanishes on S_*.
    pub full_min: f64,
}

/// Finite-difference Hessian of F at Q, split into its normal-space and
/// full spectra. The normal space at π(Q) is spanned by R E_k Rᵀ, k = 0, 1, 2,
/// with R the eigenframe of Q.
pub fn modified_f_hessian(q: &QTensor, mc: &MaterialConstants, delta: f64) -> Result<ModifiedFHessian> {
    check_neighbourhood(q, mc, delta)?;
    let f = |x: &QTensor| bulk_shifted(x, mc) + x.uniaxial_distance(mc.s_plus()).powi(2);
    let h = fd_hessian5(f, q, 1e-4 * (1.0 + q.norm()));
    let h = (h + h.transpose()) * 0.5;
    let r = q.eigendecompose().rotation;
    let basis = Coords5::basis();
    let n = SMatrix::<f64, 5, 3>::from_fn(|a, k| Coords5::pack(&(r * basis[k] * r.transpose())).0[a]);
    let normal = n.transpose() * h * n;
    Ok(ModifiedFHessian { normal_min: normal.symmetric_eigenvalues().min(), full_min: h.symmetric_eigenvalues().min() })
}

/// Central-difference Hessian of a scalar function in the Coords5 chart.
pub fn fd_hessian5(f: impl Fn(&QTensor) -> f64, q: &QTensor, h: f64) -> Hessian5 {
    let v = q.pack5();
    let at = |da: usize, sa: f64, db: usize, sb: f64| {
        let mut w = v;
        w.0[da] += sa * h;
        w.0[db] += sb * h;
        f(&w.unpack())
    };
    Hessian5::from_fn(|i, j| {
        (at(i, 1.0, j, 1.0) - at(i, 1.0, j, -1.0) - at(i, -1.0, j, 1.0) + at(i, -1.0, j, -1.0)) / (4.0 * h * h)
    })
}
