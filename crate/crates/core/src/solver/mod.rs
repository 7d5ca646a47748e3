//! Finite-difference relaxation of E_L(Q) = ∫ f(Q, ∇Q) + f̃_B(Q)/L on a box
//! lattice with Dirichlet data, plus residuals and sweep diagnostics.
//!
//! Energy quadrature: every lattice cell contributes h³/8 per corner, where
//! the corner gradient uses the cell edges through that corner. The elastic
//! part is then a sum of squared edge differences (second order, no
//! odd-even decoupling) and the bulk part is the trapezoid node sum.

mod diagnostics;
mod energy;
mod field;
mod minimize;
mod residual;
mod snapshot;
mod sweep;

pub use diagnostics::{diagnostics, Diagnostics};
pub use energy::{energy_gradient, gradient_sup_norm, total_energy, EnergyBreakdown};
pub use field::{make_hedgehog_field, make_hedgehog_field_at, QField};
pub use minimize::{minimize, MinimizeStats};
pub use residual::{el_residual, harmonic_residual, harmonic_residual_strided};
pub use snapshot::{read_snapshot, write_snapshot, Snapshot};
pub use sweep::{sweep_l, sweep_l_lenient, SweepReport, SweepRow};

use serde::{Deserialize, Serialize};

use crate::densities::{
    check_condition_l, elastic_to_frank, frank_to_hat, ElasticConstants, ElasticDensity, TensorGradient,
};
use crate::error::{Error, Result};
use crate::qtensor::{MaterialConstants, QTensor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityKind {
    Original,
    NewPlus,
    NewMinus,
    Ericksen,
    ModifiedCutoff,
}

impl DensityKind {
    pub const ALL: [DensityKind; 5] =
        [Self::Original, Self::NewPlus, Self::NewMinus, Self::Ericksen, Self::ModifiedCutoff];

    pub fn code(self) -> u8 {
        match self {
            Self::Original => 0,
            Self::NewPlus => 1,
            Self::NewMinus => 2,
            Self::Ericksen => 3,
            Self::ModifiedCutoff => 4,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.code() == code)
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Original => "original",
            Self::NewPlus => "new_plus",
            Self::NewMinus => "new_minus",
            Self::Ericksen => "ericksen",
            Self::ModifiedCutoff => "modified_cutoff",
        }
    }
}

/// A ball in physical coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub centre: [f64; 3],
    pub radius: f64,
}

impl Ball {
    pub fn contains(&self, x: &nalgebra::Vector3<f64>, slack: f64) -> bool {
        let c = nalgebra::Vector3::from(self.centre);
        (x - c).norm() <= self.radius + slack
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Relaxation parameter L > 0.
    pub l: f64,
    pub elastic: ElasticConstants,
    pub material: MaterialConstants,
    pub density_kind: DensityKind,
    /// M in the cutoff η; only read for `ModifiedCutoff`.
    pub cutoff_m: f64,
    pub max_iters: usize,
    /// Stop when the largest per-node gradient norm drops below this.
    pub grad_tol: f64,
    pub armijo_c: f64,
    pub backtrack: f64,
    pub initial_step: f64,
    /// Polak–Ribière+ conjugate directions instead of plain steepest descent.
    pub use_ncg: bool,
    /// Allow the original density with L4 ≠ 0, which is unbounded below.
    pub allow_noncoercive: bool,
    /// Divergence is declared once max |Q| exceeds this.
    pub blowup_norm: f64,
    /// Nodes closer than this to the origin are left out of max_dist_uniaxial.
    pub core_radius: f64,
    pub diag_ball: Ball,
    pub cacc_ball: Ball,
}

impl SolverConfig {
    pub fn new(l: f64, elastic: ElasticConstants, material: MaterialConstants, density_kind: DensityKind) -> Self {
        let s = material.s_plus();
        Self {
            l,
            elastic,
            material,
            density_kind,
            cutoff_m: 2.0 * s,
            max_iters: 20_000,
            grad_tol: 1e-7,
            armijo_c: 1e-4,
            backtrack: 0.5,
            initial_step: 1.0,
            use_ncg: true,
            allow_noncoercive: false,
            blowup_norm: 100.0 * s,
            core_radius: 0.0,
            diag_ball: Ball { centre: [0.5, 0.5, 0.0], radius: 0.3 },
            cacc_ball: Ball { centre: [0.5, 0.5, 0.0], radius: 0.5 },
        }
    }

    pub fn with_l(&self, l: f64) -> Self {
        Self { l, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.l > 0.0 && self.l.is_finite()) {
            return Err(Error::Domain(format!("L must be positive, got {}", self.l)));
        }
        if !(self.grad_tol > 0.0) || !(self.armijo_c > 0.0 && self.armijo_c < 1.0) {
            return Err(Error::Domain("grad_tol > 0 and 0 < armijo_c < 1 required".into()));
        }
        if !(self.backtrack > 0.0 && self.backtrack < 1.0) || !(self.initial_step > 0.0) {
            return Err(Error::Domain("0 < backtrack < 1 and initial_step > 0 required".into()));
        }
        Ok(())
    }

    /// The elastic density selected by `density_kind`, checked against its
    /// admissibility conditions.
    pub fn density(&self) -> Result<ElasticDensity> {
        let l = self.elastic;
        let s = self.material.s_plus();
        match self.density_kind {
            DensityKind::Original => Ok(ElasticDensity::original(l)),
            DensityKind::NewPlus => {
                let report = check_condition_l(&l, s);
                if !report.holds {
                    return Err(Error::Domain(format!("new_plus needs condition (L); failing: {:?}", report.failing)));
                }
                Ok(ElasticDensity::NewPlus { l, s_plus: s })
            }
            DensityKind::NewMinus => {
                if !(l.l4 < 0.0) {
                    return Err(Error::Domain(format!("new_minus needs L4 < 0, got {}", l.l4)));
                }
                Ok(ElasticDensity::NewMinus { l, s_plus: s })
            }
            DensityKind::Ericksen => ElasticDensity::ericksen(frank_to_hat(&elastic_to_frank(&l, s), s), s),
            DensityKind::ModifiedCutoff => ElasticDensity::cutoff(ElasticDensity::new_form(l, s), self.cutoff_m),
        }
    }
}

/// The cutoff density f̃_E at one point.
pub fn modified_density_eval(q: &QTensor, p: &TensorGradient, cfg: &SolverConfig) -> Result<f64> {
    if cfg.density_kind != DensityKind::ModifiedCutoff {
        return Err(Error::Domain(format!("density kind is {}, not modified_cutoff", cfg.density_kind.name())));
    }
    Ok(cfg.density()?.value(q, p))
}
