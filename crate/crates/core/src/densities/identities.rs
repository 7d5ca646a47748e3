use nalgebra::Matrix3;
use serde::Serialize;

use super::{
    elastic_original, elastic_to_frank, fourth_order_term, frank_to_hat, oseen_frank_w, third_order_term,
    DirectorGradient, ElasticConstants, ElasticDensity, TensorGradient,
};
use crate::qtensor::QTensor;

fn induced(dg: &DirectorGradient, s_plus: f64) -> (QTensor, TensorGradient) {
    (QTensor::uniaxial(&dg.u, s_plus), TensorGradient::from_director(dg, s_plus))
}

/// |LHS − RHS| of Q_lk⟨p_l, p_k⟩ = (3/s₊)Σ_n|W_n|² − (2s₊/3)|p|² on the
/// uniaxial pair induced by (u, g).
pub fn verify_lemma_2_1(dg: &DirectorGradient, s_plus: f64) -> f64 {
    let (q, p) = induced(dg, s_plus);
    third_order_residual(&q, &p, s_plus)
}

/// The same residual for an arbitrary pair; nonzero in general off S_*.
pub fn third_order_residual(q: &QTensor, p: &TensorGradient, s_plus: f64) -> f64 {
    let lhs = third_order_term(q, p);
    let rhs = 3.0 / s_plus * fourth_order_term(q, p) - 2.0 * s_plus / 3.0 * p.norm_squared();
    (lhs - rhs).abs()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LongaResiduals {
    /// fourth-order term vs (8/5)L5 − (2/5)L6 + (2/5)L7
    pub fourth_order: f64,
    /// 4L5 − L6 vs (5s₊⁴/3)|u × curl u|²
    pub bend: f64,
    /// L7 vs (5/9)s₊⁴|∇u|²
    pub l7: f64,
    /// s₊⁴(1 + |∇u|²), the magnitude the residuals are compared against
    pub scale: f64,
}

impl LongaResiduals {
    pub fn max_relative(&self) -> f64 {
        self.fourth_order.max(self.bend).max(self.l7) / self.scale
    }
}

pub fn verify_lemma_2_1b(dg: &DirectorGradient, s_plus: f64) -> LongaResiduals {
    let (q, p) = induced(dg, s_plus);
    let q2: Matrix3<f64> = q.matrix() * q.matrix();
    let d = p.divergence();
    let mut l5 = 0.0;
    let mut l7 = 0.0;
    for a in 0..3 {
        for b in 0..3 {
            for m in 0..3 {
                l5 += q2[(a, b)] * p.p[b][(a, m)] * d[m];
                for n in 0..3 {
                    l7 += q2[(a, b)] * p.p[n][(a, m)] * p.p[n][(b, m)];
                }
            }
        }
    }
    let l6 = (d.transpose() * q2 * d)[0];
    let s4 = s_plus.powi(4);
    let g2 = dg.g.norm_squared();
    let bend = dg.u.cross(&dg.curl()).norm_squared();
    LongaResiduals {
        fourth_order: (fourth_order_term(&q, &p) - (1.6 * l5 - 0.4 * l6 + 0.4 * l7)).abs(),
        bend: (4.0 * l5 - l6 - 5.0 * s4 / 3.0 * bend).abs(),
        l7: (l7 - 5.0 / 9.0 * s4 * g2).abs(),
        scale: s4 * (1.0 + g2),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquivalenceResiduals {
    /// |f_E − W|
    pub vs_oseen_frank: f64,
    /// |f_E − f_{E,1}| (L4 ≥ 0) or |f_E − f_{E,−}| (L4 < 0)
    pub vs_new_form: f64,
    /// |f_{E,2} − W| when the strong Ericksen condition holds
    pub vs_ericksen: Option<f64>,
    /// 1 + |W|
    pub scale: f64,
}

impl EquivalenceResiduals {
    pub fn max_relative(&self) -> f64 {
        self.vs_oseen_frank.max(self.vs_new_form).max(self.vs_ericksen.unwrap_or(0.0)) / self.scale
    }
}

pub fn verify_uniaxial_equivalence(dg: &DirectorGradient, l: &ElasticConstants, s_plus: f64) -> EquivalenceResiduals {
    let (q, p) = induced(dg, s_plus);
    let k = elastic_to_frank(l, s_plus);
    let fe = elastic_original(&q, &p, l);
    let w = oseen_frank_w(&DirectorGradient::unchecked(dg.u.normalize(), dg.g), &k).unwrap_or(f64::NAN);
    let new = ElasticDensity::new_form(*l, s_plus).value(&q, &p);
    let vs_ericksen =
        ElasticDensity::ericksen(frank_to_hat(&k, s_plus), s_plus).ok().map(|d| (d.value(&q, &p) - w).abs());
    EquivalenceResiduals {
        vs_oseen_frank: (fe - w).abs(),
        vs_new_form: (fe - new).abs(),
        vs_ericksen,
        scale: 1.0 + w.abs(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densities::{frank_to_elastic, FrankConstants};
    use crate::sampling::Sampler;
    use nalgebra::Vector3;

    #[test]
    fn zero_gradient_residuals_vanish() {
        let dg = DirectorGradient::new(Vector3::z(), Matrix3::zeros()).unwrap();
        assert_eq!(verify_lemma_2_1(&dg, 1.5), 0.0);
        let r = verify_lemma_2_1b(&dg, 1.5);
        assert_eq!(r.fourth_order + r.bend + r.l7, 0.0);
    }

    #[test]
    fn identities_on_random_tangent_pairs() {
        let mut s = Sampler::new(21);
        for _ in 0..2000 {
            let sp = s.uniform(0.3, 3.0);
            let dg = s.tangent_pair(1.0);
            let (q, p) = induced(&dg, sp);
            assert!(verify_lemma_2_1(&dg, sp) <= 1e-10 * (1.0 + p.norm_squared() * q.norm()));
            assert!(verify_lemma_2_1b(&dg, sp).max_relative() <= 1e-10);
        }
    }

    #[test]
    fn curl_free_planar_sample() {
        // u = e3, ∂_1 u = e1, ∂_2 u = e2: curl u = 0 so the bend term vanishes
        let mut g = Matrix3::zeros();
        g[(0, 0)] = 1.0;
        g[(1, 1)] = 1.0;
        let dg = DirectorGradient::new(Vector3::z(), g).unwrap();
        assert_eq!(dg.curl().norm(), 0.0);
        assert!(verify_lemma_2_1b(&dg, 1.5).bend < 1e-12);
    }

    #[test]
    fn identity_fails_off_the_uniaxial_manifold() {
        // On S_*, Q² = (s₊/3)Q + (2s₊²/9)I, so the identity holds for any p;
        // it is the uniaxial structure of Q that carries it.
        let mut s = Sampler::new(22);
        let (mut biaxial, mut uniaxial): (f64, f64) = (0.0, 0.0);
        for _ in 0..50 {
            let p = s.tensor_gradient();
            biaxial = biaxial.max(third_order_residual(&s.q_tensor(1.5), &p, 1.5));
            let q = QTensor::uniaxial(&s.unit_vector(), 1.5);
            uniaxial = uniaxial.max(third_order_residual(&q, &p, 1.5) / (1.0 + p.norm_squared()));
        }
        assert!(biaxial > 1e-3);
        assert!(uniaxial < 1e-12);
    }

    #[test]
    fn densities_agree_on_uniaxial_pairs() {
        let mut s = Sampler::new(23);
        let frank =
            [FrankConstants::paa(), FrankConstants::new(3.0, 1.0, 2.0, 0.4), FrankConstants::new(2.0, 1.5, 3.0, -0.7)];
        for k in frank {
            for _ in 0..1000 {
                let sp = s.uniform(0.5, 2.5);
                let l = frank_to_elastic(&k, sp);
                let r = verify_uniaxial_equivalence(&s.tangent_pair(1.0), &l, sp);
                assert!(r.max_relative() <= 1e-9, "{k:?}: {r:?}");
                assert!(r.vs_ericksen.is_some());
            }
        }
    }
}
