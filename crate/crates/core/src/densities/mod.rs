//! Elastic energy densities for Q-tensors and unit directors, the constant
//! conversions linking them, and coercivity audits.

mod coercivity;
mod constants;
mod elastic;
mod identities;
mod oseen_frank;

pub use coercivity::{estimate_alpha, non_coercivity_witness, p_hessian, CoercivityReport, Witness, WorstSample};
pub use constants::{
    check_condition_l, elastic_to_frank, frank_to_elastic, frank_to_hat, ConditionReport, ElasticConstants,
    FrankConstants, HatConstants,
};
pub use elastic::{
    cauchy_schwarz_gap, elastic_ericksen, elastic_new_minus, elastic_new_plus, elastic_original, fourth_order_term,
    third_order_term, DensityGrad, ElasticDensity,
};
pub use identities::{
    third_order_residual, verify_lemma_2_1, verify_lemma_2_1b, verify_uniaxial_equivalence, EquivalenceResiduals,
    LongaResiduals,
};
pub use oseen_frank::{oseen_frank_w, oseen_frank_w_tilde};

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::qtensor::{project_s0, Coords5};

/// Spatial gradient of a Q-tensor field: `p[k][(i, j)] = ∂Q_ij / ∂x_k`.
/// Each slice lies in S_0.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TensorGradient {
    pub p: [Matrix3<f64>; 3],
}

impl TensorGradient {
    pub fn new(p: [Matrix3<f64>; 3]) -> Self {
        Self { p: p.map(|m| project_s0(&m)) }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// p[k] = s (g_k ⊗ u + u ⊗ g_k), the gradient of s(u ⊗ u - I/3).
    pub fn from_director(dg: &DirectorGradient, s_plus: f64) -> Self {
        let p = std::array::from_fn(|k| {
            let gk = dg.g.row(k).transpose();
            (gk * dg.u.transpose() + dg.u * gk.transpose()) * s_plus
        });
        Self::new(p)
    }

    pub fn norm_squared(&self) -> f64 {
        self.p.iter().map(|m| m.norm_squared()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn scaled(&self, f: f64) -> Self {
        Self { p: self.p.map(|m| m * f) }
    }

    /// d_i = ∂_j Q_ij.
    pub fn divergence(&self) -> Vector3<f64> {
        Vector3::from_fn(|i, _| (0..3).map(|j| self.p[j][(i, j)]).sum())
    }

    /// Packed into 15 orthonormal coordinates, spatial index major.
    pub fn pack15(&self) -> [f64; 15] {
        let mut out = [0.0; 15];
        for k in 0..3 {
            out[5 * k..5 * k + 5].copy_from_slice(&Coords5::pack(&self.p[k]).0);
        }
        out
    }

    pub fn unpack15(w: &[f64; 15]) -> Self {
        let p = std::array::from_fn(|k| {
            let mut c = [0.0; 5];
            c.copy_from_slice(&w[5 * k..5 * k + 5]);
            Coords5(c).to_matrix()
        });
        Self { p }
    }
}

/// A unit director with its gradient: `g[(k, i)] = ∂u_i / ∂x_k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectorGradient {
    pub u: Vector3<f64>,
    pub g: Matrix3<f64>,
}

impl DirectorGradient {
    /// Checks |u| = 1 and tangency `g u = 0` to 1e-10.
    pub fn new(u: Vector3<f64>, g: Matrix3<f64>) -> Result<Self> {
        let n = u.norm();
        if (n - 1.0).abs() > 1e-10 {
            return Err(Error::Domain(format!("director must be a unit vector, |u| = {n}")));
        }
        let tang = (g * u).amax();
        if tang > 1e-10 * (1.0 + g.norm()) {
            return Err(Error::Domain(format!("director gradient is not tangent: |g u| = {tang:.3e}")));
        }
        Ok(Self { u, g })
    }

    /// No unit-length or tangency check; used for negative controls.
    pub fn unchecked(u: Vector3<f64>, g: Matrix3<f64>) -> Self {
        Self { u, g }
    }

    pub fn div(&self) -> f64 {
        self.g.trace()
    }

    /// (curl u)_i = ε_ijk ∂_j u_k.
    pub fn curl(&self) -> Vector3<f64> {
        let g = &self.g;
        Vector3::new(g[(1, 2)] - g[(2, 1)], g[(2, 0)] - g[(0, 2)], g[(0, 1)] - g[(1, 0)])
    }

    /// R·u with gradient R g R^T (a rigid rotation of the configuration).
    pub fn rotated(&self, r: &Matrix3<f64>) -> Self {
        Self { u: r * self.u, g: r * self.g * r.transpose() }
    }
}
