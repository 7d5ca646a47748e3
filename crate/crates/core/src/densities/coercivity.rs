use nalgebra::{Matrix3, SMatrix, SymmetricEigen};
use serde::Serialize;

use super::{check_condition_l, elastic_original, ConditionReport, ElasticConstants, ElasticDensity, TensorGradient};
use crate::error::{Error, Result};
use crate::qtensor::{Coords5, QTensor};
use crate::sampling::Sampler;

/// The 15×15 Hessian of a density in p (packed coordinates) at fixed Q.
/// Every density here is quadratic in p, so column j is the p-gradient at e_j.
pub fn p_hessian(d: &ElasticDensity, q: &QTensor) -> SMatrix<f64, 15, 15> {
    let mut h = SMatrix::<f64, 15, 15>::zeros();
    for j in 0..15 {
        let mut w = [0.0; 15];
        w[j] = 1.0;
        let g = d.gradient(q, &TensorGradient::unpack15(&w));
        for k in 0..3 {
            for a in 0..5 {
                h[(5 * k + a, j)] = g.dp[k].0[a];
            }
        }
    }
    (h + h.transpose()) * 0.5
}

fn eig_range(h: SMatrix<f64, 15, 15>) -> (f64, f64) {
    let ev = SymmetricEigen::new(h).eigenvalues;
    (ev.min(), ev.max())
}

pub(crate) fn p_hessian_min_eig(d: &ElasticDensity, q: &QTensor) -> f64 {
    eig_range(p_hessian(d, q)).0
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WorstSample {
    pub q: [f64; 5],
    pub p: [f64; 15],
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoercivityReport {
    pub conditions_hold: bool,
    pub condition: ConditionReport,
    pub density: &'static str,
    /// Smallest p-Hessian eigenvalue over sampled Q (Q = 0 included).
    pub alpha: f64,
    /// 2·min f/|p|² over random unit p, one per sampled Q.
    pub alpha_from_ratios: f64,
    /// Largest p-Hessian eigenvalue / 2: an empirical upper constant C.
    pub empirical_c: f64,
    pub negative_samples: usize,
    pub samples: usize,
    pub worst_sample: WorstSample,
}

/// Audits the new-form density (f_{E,1} or f_{E,-} by the sign of L4) over
/// `samples` tensors drawn uniformly from |Q| ≤ 2s₊, plus Q = 0.
pub fn estimate_alpha(l: &ElasticConstants, s_plus: f64, samples: usize, seed: u64) -> Result<CoercivityReport> {
    let condition = check_condition_l(l, s_plus);
    let d = ElasticDensity::new_form(*l, s_plus);
    let mut rng = Sampler::new(seed);
    let mut alpha = f64::INFINITY;
    let mut alpha_q = 0.0;
    let mut c_max: f64 = 0.0;
    let mut negative = 0;
    let mut worst = WorstSample { q: [0.0; 5], p: [0.0; 15], ratio: f64::INFINITY };
    for i in 0..=samples {
        let q = if i == 0 { QTensor::zero() } else { rng.q_tensor(2.0 * s_plus) };
        let (lo, hi) = eig_range(p_hessian(&d, &q));
        if lo < 0.0 {
            negative += 1;
        }
        if lo < alpha {
            alpha = lo;
            alpha_q = q.norm();
        }
        c_max = c_max.max(0.5 * hi);
        let p = rng.unit_tensor_gradient();
        let ratio = d.value(&q, &p) / p.norm_squared();
        if ratio < worst.ratio {
            worst = WorstSample { q: q.pack5().0, p: p.pack15(), ratio };
        }
    }
    if condition.holds && alpha <= 0.0 {
        return Err(Error::CoercivityViolated { min_eig: alpha, q_norm: alpha_q });
    }
    Ok(CoercivityReport {
        conditions_hold: condition.holds,
        condition,
        density: d.kind_name(),
        alpha,
        alpha_from_ratios: 2.0 * worst.ratio,
        empirical_c: c_max,
        negative_samples: negative,
        samples: samples + 1,
        worst_sample: worst,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub q: QTensor,
    pub p: TensorGradient,
    /// Scale applied to Q⁺.
    pub t: f64,
    pub value: f64,
    pub value_at_2t: f64,
    /// value(2t) / value(t); tends to 2 since the density is affine in t.
    pub linearity_ratio: f64,
    pub doublings: usize,
}

/// Finds (Q, p) with f_E(Q, p) < `target` for the original density by scaling
/// Q = t·Q⁺ against a fixed unit p whose only nonzero slice is ∂_3 Q = E0.
pub fn non_coercivity_witness(l: &ElasticConstants, s_plus: f64, target: f64) -> Result<Witness> {
    if l.l4 == 0.0 {
        return Err(Error::Domain("L4 = 0: the original density is coercive in this direction".into()));
    }
    let q0 = QTensor::q_plus(s_plus);
    let mut e0 = [0.0; 5];
    e0[0] = 1.0;
    let p = TensorGradient { p: [Matrix3::zeros(), Matrix3::zeros(), Coords5(e0).to_matrix()] };
    let f = |t: f64| elastic_original(&(q0 * t), &p, l);
    let mut t = -l.l4.signum();
    for doublings in 0..200 {
        let value = f(t);
        if value < target {
            let value_at_2t = f(2.0 * t);
            return Ok(Witness {
                q: q0 * t,
                p,
                t,
                value,
                value_at_2t,
                linearity_ratio: value_at_2t / value,
                doublings,
            });
        }
        t *= 2.0;
    }
    Err(Error::SearchFailed { iterations: 200 })
}
