use nalgebra::{Matrix3, SVector};
use num_dual::{gradient, DualNum, DualSVec64};

use super::coercivity::p_hessian_min_eig;
use super::{ElasticConstants, HatConstants, TensorGradient};
use crate::error::{Error, Result};
use crate::qtensor::{Coords5, QTensor};

/// Σ_lk Q_lk ⟨p[l], p[k]⟩.
pub fn third_order_term(q: &QTensor, p: &TensorGradient) -> f64 {
    let q = q.matrix();
    let mut t = 0.0;
    for l in 0..3 {
        for k in 0..3 {
            t += q[(l, k)] * p.p[l].dot(&p.p[k]);
        }
    }
    t
}

/// W_n = Σ_l Q_ln p[l].
fn w_slices(q: &Matrix3<f64>, p: &TensorGradient) -> [Matrix3<f64>; 3] {
    std::array::from_fn(|n| (0..3).map(|l| p.p[l] * q[(l, n)]).sum())
}

/// Σ_n |Σ_l Q_ln p[l]|², a sum of squares.
pub fn fourth_order_term(q: &QTensor, p: &TensorGradient) -> f64 {
    w_slices(q.matrix(), p).iter().map(|w| w.norm_squared()).sum()
}

/// |Q|²|p|² minus the fourth-order term; nonnegative by Cauchy–Schwarz.
pub fn cauchy_schwarz_gap(q: &QTensor, p: &TensorGradient) -> f64 {
    q.norm_squared() * p.norm_squared() - fourth_order_term(q, p)
}

/// Σ_ijk p[j]_ik p[k]_ij.
fn l3_term(p: &TensorGradient) -> f64 {
    let mut t = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                t += p.p[j][(i, k)] * p.p[k][(i, j)];
            }
        }
    }
    t
}

/// L2 and L3 parts shared by every Q-tensor density.
fn l2_l3_value(p: &TensorGradient, l: &ElasticConstants) -> f64 {
    0.5 * l.l2 * p.divergence().norm_squared() + 0.5 * l.l3 * l3_term(p)
}

fn add_l2_l3_grad(p: &TensorGradient, l: &ElasticConstants, dp: &mut [Matrix3<f64>; 3]) {
    let d = p.divergence();
    for m in 0..3 {
        for a in 0..3 {
            dp[m][(a, m)] += l.l2 * d[a];
            for b in 0..3 {
                dp[m][(a, b)] += l.l3 * p.p[b][(a, m)];
            }
        }
    }
}

pub fn elastic_original(q: &QTensor, p: &TensorGradient, l: &ElasticConstants) -> f64 {
    0.5 * l.l1 * p.norm_squared() + l2_l3_value(p, l) + 0.5 * l.l4 * third_order_term(q, p)
}

pub fn elastic_new_plus(q: &QTensor, p: &TensorGradient, l: &ElasticConstants, s_plus: f64) -> Result<f64> {
    if l.l4 < 0.0 {
        return Err(Error::Domain("L4 < 0: use elastic_new_minus".into()));
    }
    Ok(new_plus_value(q, p, l, s_plus))
}

/// The L4 < 0 form: (L1/2 + 2s₊L4/3)|p|² + L2, L3 terms − (3L4/(2s₊))·(|Q|²|p|² − Σ_n|W_n|²).
/// These coefficients make it agree with `elastic_original` on uniaxial pairs.
pub fn elastic_new_minus(q: &QTensor, p: &TensorGradient, l: &ElasticConstants, s_plus: f64) -> Result<f64> {
    if l.l4 >= 0.0 {
        return Err(Error::Domain("L4 >= 0: use elastic_new_plus".into()));
    }
    Ok(new_minus_value(q, p, l, s_plus))
}

pub fn elastic_ericksen(q: &QTensor, p: &TensorGradient, hat: &HatConstants, s_plus: f64) -> Result<f64> {
    let alpha = hat.alpha();
    if !(alpha > 0.0) {
        return Err(Error::Domain(format!("strong Ericksen condition violated: alpha = {alpha}")));
    }
    let qa = to_array(q.matrix());
    let pa = p.p.map(|m| to_array(&m));
    Ok(ericksen_generic(&qa, &pa, hat, s_plus))
}

fn new_plus_value(q: &QTensor, p: &TensorGradient, l: &ElasticConstants, s: f64) -> f64 {
    (0.5 * l.l1 - s * l.l4 / 3.0) * p.norm_squared() + l2_l3_value(p, l) + 1.5 * l.l4 / s * fourth_order_term(q, p)
}

fn new_minus_value(q: &QTensor, p: &TensorGradient, l: &ElasticConstants, s: f64) -> f64 {
    (0.5 * l.l1 + 2.0 * s * l.l4 / 3.0) * p.norm_squared() + l2_l3_value(p, l)
        - 1.5 * l.l4 / s * cauchy_schwarz_gap(q, p)
}

fn to_array(m: &Matrix3<f64>) -> [[f64; 3]; 3] {
    std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)]))
}

const EPS: [[[f64; 3]; 3]; 3] = {
    let mut e = [[[0.0; 3]; 3]; 3];
    e[0][1][2] = 1.0;
    e[1][2][0] = 1.0;
    e[2][0][1] = 1.0;
    e[0][2][1] = -1.0;
    e[2][1][0] = -1.0;
    e[1][0][2] = -1.0;
    e
};

/// The coercive Ericksen-form density, generic so it can be differentiated
/// with dual numbers.
fn ericksen_generic<T: DualNum<Primitive = f64> + Copy>(
    q: &[[T; 3]; 3],
    p: &[[[T; 3]; 3]; 3],
    hat: &HatConstants,
    s: f64,
) -> T {
    let zero = T::from(0.0);
    let alpha = hat.alpha();
    let n: [[T; 3]; 3] =
        std::array::from_fn(|i| std::array::from_fn(|j| q[i][j] * (1.0 / s) + if i == j { 1.0 / 3.0 } else { 0.0 }));
    let pm: [[T; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| -n[i][j] + if i == j { 1.0 } else { 0.0 }));

    let mut p2 = zero;
    for k in 0..3 {
        for i in 0..3 {
            for j in 0..3 {
                p2 += p[k][i][j] * p[k][i][j];
            }
        }
    }

    // splay
    let d: [T; 3] = std::array::from_fn(|j| p[0][0][j] + p[1][1][j] + p[2][2][j]);
    let mut t1 = zero;
    for i in 0..3 {
        let v = n[i][0] * d[0] + n[i][1] * d[1] + n[i][2] * d[2];
        t1 += v * v;
    }

    // cq[i][a]: curl of the i-th column
    let mut cq = [[zero; 3]; 3];
    for i in 0..3 {
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    let e = EPS[a][b][c];
                    if e != 0.0 {
                        cq[i][a] += p[b][c][i] * e;
                    }
                }
            }
        }
    }

    // bend
    let mut w = [zero; 3];
    for i in 0..3 {
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    let e = EPS[a][b][c];
                    if e != 0.0 {
                        w[a] += n[b][i] * cq[i][c] * e;
                    }
                }
            }
        }
    }
    let t2 = w[0] * w[0] + w[1] * w[1] + w[2] * w[2];

    // twist
    let mut tw = zero;
    for i in 0..3 {
        for j in 0..3 {
            tw += n[i][j] * cq[j][i];
        }
    }
    let t3 = tw * tw;

    // saddle-splay completion
    let mut bmat = [[[zero; 3]; 3]; 3];
    for m in 0..3 {
        for r in 0..3 {
            for l in 0..3 {
                for j in 0..3 {
                    bmat[m][r][l] += p[m][r][j] * n[j][l];
                }
            }
        }
    }
    let mut cmat = [[[zero; 3]; 3]; 3];
    for k in 0..3 {
        for i in 0..3 {
            for l in 0..3 {
                for m in 0..3 {
                    for r in 0..3 {
                        cmat[k][i][l] += pm[k][m] * pm[r][i] * bmat[m][r][l];
                    }
                }
            }
        }
    }
    let tau: [T; 3] = std::array::from_fn(|l| cmat[0][0][l] + cmat[1][1][l] + cmat[2][2][l]);
    let mut t4 = zero;
    for k in 0..3 {
        for i in 0..3 {
            for l in 0..3 {
                let z = (cmat[k][i][l] + cmat[i][k][l]) * 0.5 - tau[l] * pm[k][i] * 0.5;
                t4 += z * z * 2.0;
            }
        }
    }
    for i in 0..3 {
        let mut v = zero;
        for k in 0..3 {
            for j in 0..3 {
                v += n[k][j] * p[k][i][j];
            }
        }
        t4 += v * v;
    }

    p2 * (0.5 * alpha)
        + t1 * (0.5 * (hat.l1 - alpha))
        + t2 * (0.5 * (hat.l2 - alpha))
        + t3 * (0.5 * (hat.l3 - alpha))
        + t4 * (0.5 * (hat.l4 - alpha))
}

/// Value and gradient in the Coords5 chart: `dq` wrt Q, `dp[k]` wrt p[k].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityGrad {
    pub value: f64,
    pub dq: Coords5,
    pub dp: [Coords5; 3],
}

/// An elastic density with validated constants, as used by the solver.
#[derive(Debug, Clone, PartialEq)]
pub enum ElasticDensity {
    Original {
        l: ElasticConstants,
    },
    NewPlus {
        l: ElasticConstants,
        s_plus: f64,
    },
    NewMinus {
        l: ElasticConstants,
        s_plus: f64,
    },
    Ericksen {
        hat: HatConstants,
        s_plus: f64,
    },
    /// α/2|p|² + η(|Q|)(base − α/2|p|²), η = 1 on |Q| ≤ m and 0 on |Q| ≥ m + 1.
    Cutoff {
        base: Box<ElasticDensity>,
        alpha: f64,
        m: f64,
    },
}

impl ElasticDensity {
    pub fn original(l: ElasticConstants) -> Self {
        Self::Original { l }
    }

    /// f_{E,1} for L4 ≥ 0, f_{E,-} otherwise.
    pub fn new_form(l: ElasticConstants, s_plus: f64) -> Self {
        if l.l4 >= 0.0 {
            Self::NewPlus { l, s_plus }
        } else {
            Self::NewMinus { l, s_plus }
        }
    }

    pub fn ericksen(hat: HatConstants, s_plus: f64) -> Result<Self> {
        let alpha = hat.alpha();
        if !(alpha > 0.0) {
            return Err(Error::Domain(format!("strong Ericksen condition violated: alpha = {alpha}")));
        }
        Ok(Self::Ericksen { hat, s_plus })
    }

    /// Cutoff around `base`; α is the smallest p-Hessian eigenvalue of the
    /// part of `base` that survives at Q = 0 (the leading α for Ericksen).
    pub fn cutoff(base: ElasticDensity, m: f64) -> Result<Self> {
        if !(m > 0.0) {
            return Err(Error::Domain(format!("cutoff M must be positive, got {m}")));
        }
        let alpha = match &base {
            Self::Ericksen { hat, .. } => hat.alpha(),
            Self::Cutoff { .. } => return Err(Error::Domain("nested cutoff".into())),
            other => p_hessian_min_eig(other, &QTensor::zero()),
        };
        if !(alpha > 0.0) {
            return Err(Error::NonCoercive(format!("cutoff base has no positive quadratic part (alpha = {alpha})")));
        }
        Ok(Self::Cutoff { base: Box::new(base), alpha, m })
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Self::Original { .. } => "original",
            Self::NewPlus { .. } => "new_plus",
            Self::NewMinus { .. } => "new_minus",
            Self::Ericksen { .. } => "ericksen",
            Self::Cutoff { .. } => "modified_cutoff",
        }
    }

    /// Twice the coefficient of |p|² (or the cutoff α): the constant α in
    /// the split f = α/2|p|² + V.
    pub fn alpha_split(&self) -> f64 {
        match self {
            Self::Original { l } => l.l1,
            Self::NewPlus { l, s_plus } => l.l1 - 2.0 * s_plus * l.l4 / 3.0,
            Self::NewMinus { l, s_plus } => l.l1 + 4.0 * s_plus * l.l4 / 3.0,
            Self::Ericksen { hat, .. } => hat.alpha(),
            Self::Cutoff { alpha, .. } => *alpha,
        }
    }

    pub fn value(&self, q: &QTensor, p: &TensorGradient) -> f64 {
        match self {
            Self::Original { l } => elastic_original(q, p, l),
            Self::NewPlus { l, s_plus } => new_plus_value(q, p, l, *s_plus),
            Self::NewMinus { l, s_plus } => new_minus_value(q, p, l, *s_plus),
            Self::Ericksen { hat, s_plus } => {
                let qa = to_array(q.matrix());
                let pa = p.p.map(|m| to_array(&m));
                ericksen_generic(&qa, &pa, hat, *s_plus)
            }
            Self::Cutoff { base, alpha, m } => {
                let lead = 0.5 * alpha * p.norm_squared();
                let (eta, _) = eta(q.norm(), *m);
                if eta == 0.0 {
                    lead
                } else {
                    lead + eta * (base.value(q, p) - lead)
                }
            }
        }
    }

    pub fn gradient(&self, q: &QTensor, p: &TensorGradient) -> DensityGrad {
        match self {
            Self::Original { l } => {
                let mut dp = p.p.map(|m| m * l.l1);
                add_l2_l3_grad(p, l, &mut dp);
                let qm = q.matrix();
                let mut dq = Matrix3::zeros();
                for m in 0..3 {
                    for k in 0..3 {
                        dp[m] += p.p[k] * (l.l4 * qm[(m, k)]);
                        dq[(m, k)] = 0.5 * l.l4 * p.p[m].dot(&p.p[k]);
                    }
                }
                pack_grad(elastic_original(q, p, l), &dq, &dp)
            }
            Self::NewPlus { l, s_plus } => {
                let s = *s_plus;
                let c1 = 0.5 * l.l1 - s * l.l4 / 3.0;
                let c4 = 1.5 * l.l4 / s;
                let mut dp = p.p.map(|m| m * (2.0 * c1));
                add_l2_l3_grad(p, l, &mut dp);
                let qm = q.matrix();
                let w = w_slices(qm, p);
                let mut dq = Matrix3::zeros();
                for a in 0..3 {
                    for n in 0..3 {
                        dp[a] += w[n] * (2.0 * c4 * qm[(a, n)]);
                        dq[(a, n)] = 2.0 * c4 * p.p[a].dot(&w[n]);
                    }
                }
                pack_grad(new_plus_value(q, p, l, s), &dq, &dp)
            }
            Self::NewMinus { l, s_plus } => {
                let s = *s_plus;
                let c1 = 0.5 * l.l1 + 2.0 * s * l.l4 / 3.0;
                let cm = -1.5 * l.l4 / s;
                let qm = q.matrix();
                let q2 = qm.norm_squared();
                let mut dp = p.p.map(|m| m * (2.0 * c1 + 2.0 * cm * q2));
                add_l2_l3_grad(p, l, &mut dp);
                let w = w_slices(qm, p);
                let mut dq = qm * (2.0 * cm * p.norm_squared());
                for a in 0..3 {
                    for n in 0..3 {
                        dp[a] -= w[n] * (2.0 * cm * qm[(a, n)]);
                        dq[(a, n)] -= 2.0 * cm * p.p[a].dot(&w[n]);
                    }
                }
                pack_grad(new_minus_value(q, p, l, s), &dq, &dp)
            }
            Self::Ericksen { hat, s_plus } => ericksen_gradient(q, p, hat, *s_plus),
            Self::Cutoff { base, alpha, m } => {
                let lead = 0.5 * alpha * p.norm_squared();
                let r = q.norm();
                let (eta, deta) = eta(r, *m);
                let mut dp: [Coords5; 3] = std::array::from_fn(|k| Coords5::pack(&(p.p[k] * *alpha)));
                if eta == 0.0 {
                    return DensityGrad { value: lead, dq: Coords5([0.0; 5]), dp };
                }
                let g = base.gradient(q, p);
                let v = g.value - lead;
                for k in 0..3 {
                    for a in 0..5 {
                        dp[k].0[a] = (1.0 - eta) * dp[k].0[a] + eta * g.dp[k].0[a];
                    }
                }
                let qc = q.pack5();
                let mut dq = [0.0; 5];
                for a in 0..5 {
                    dq[a] = eta * g.dq.0[a];
                    if deta != 0.0 {
                        dq[a] += deta * v * qc.0[a] / r;
                    }
                }
                DensityGrad { value: lead + eta * v, dq: Coords5(dq), dp }
            }
        }
    }
}

/// η(r) and η'(r): 1 − S(t), S the C² smoothstep, t = clamp(r − m, 0, 1).
pub(crate) fn eta(r: f64, m: f64) -> (f64, f64) {
    let t = r - m;
    if t <= 0.0 {
        (1.0, 0.0)
    } else if t >= 1.0 {
        (0.0, 0.0)
    } else {
        let s = t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
        let ds = 30.0 * t * t * (1.0 - t) * (1.0 - t);
        (1.0 - s, -ds)
    }
}

fn pack_grad(value: f64, dq: &Matrix3<f64>, dp: &[Matrix3<f64>; 3]) -> DensityGrad {
    DensityGrad { value, dq: Coords5::pack(dq), dp: dp.map(|m| Coords5::pack(&m)) }
}

fn unpack_generic<T: DualNum<Primitive = f64> + Copy>(v: &[T]) -> [[T; 3]; 3] {
    let basis = Coords5::basis();
    let mut m = [[T::from(0.0); 3]; 3];
    for (a, e) in basis.iter().enumerate() {
        for i in 0..3 {
            for j in 0..3 {
                if e[(i, j)] != 0.0 {
                    m[i][j] += v[a] * e[(i, j)];
                }
            }
        }
    }
    m
}

fn ericksen_gradient(q: &QTensor, p: &TensorGradient, hat: &HatConstants, s: f64) -> DensityGrad {
    let mut x = SVector::<f64, 20>::zeros();
    x.as_mut_slice()[..5].copy_from_slice(&q.pack5().0);
    x.as_mut_slice()[5..].copy_from_slice(&p.pack15());
    let (value, g) = gradient(
        |v: SVector<DualSVec64<20>, 20>| {
            let v = v.as_slice();
            let qa = unpack_generic(&v[..5]);
            let pa: [[[DualSVec64<20>; 3]; 3]; 3] = std::array::from_fn(|k| unpack_generic(&v[5 + 5 * k..10 + 5 * k]));
            ericksen_generic(&qa, &pa, hat, s)
        },
        &x,
    );
    let c = |off: usize| Coords5(std::array::from_fn(|a| g[off + a]));
    DensityGrad { value, dq: c(0), dp: [c(5), c(10), c(15)] }
}
