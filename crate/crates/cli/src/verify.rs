use ldg_core::bulk::{bulk_gradient, bulk_hessian, distance_bounds_check, hessian_bound_check};
use ldg_core::densities::{verify_lemma_2_1, verify_lemma_2_1b, verify_uniaxial_equivalence};
use ldg_core::qtensor::Coords5;
use ldg_core::sampling::Sampler;
use ldg_core::{MaterialConstants, QTensor};
use nalgebra::{Matrix3, Vector3};
use serde::Serialize;

use crate::record::{Check, ResultRecord};
use crate::{Result, RunConfig};

/// Swappable pieces of the suite, so a test can feed in a broken build and
/// watch the suite fail.
#[derive(Clone, Copy)]
pub struct VerifyHooks {
    pub bulk_gradient: fn(&QTensor, &MaterialConstants) -> QTensor,
}

impl Default for VerifyHooks {
    fn default() -> Self {
        Self { bulk_gradient }
    }
}

#[derive(Debug, Serialize)]
struct Worst {
    lemma_2_1: f64,
    longa: f64,
    equivalence: f64,
    bulk_gradient: f64,
    bulk_hessian: f64,
    manifold_gradient: f64,
    hessian_bound_min_ratio: f64,
    projection_min_ratio: f64,
}

fn directional(f: impl Fn(&Coords5) -> f64, x: &Coords5, a: usize, h: f64) -> f64 {
    let mut p = *x;
    let mut m = *x;
    p.0[a] += h;
    m.0[a] -= h;
    (f(&p) - f(&m)) / (2.0 * h)
}

/// Directions spread evenly over the unit sphere.
pub fn fibonacci_sphere(n: usize) -> Vec<Vector3<f64>> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            let r = (1.0 - z * z).sqrt();
            let t = golden * i as f64;
            Vector3::new(r * t.cos(), r * t.sin(), z)
        })
        .collect()
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<ResultRecord> {
    cmd_verify_with(cfg, &VerifyHooks::default())
}

pub fn cmd_verify_with(cfg: &RunConfig, hooks: &VerifyHooks) -> Result<ResultRecord> {
    cfg.validate()?;
    let sm = &cfg.sampling;
    let tol = &cfg.tolerances;
    let mc = cfg.material()?;
    let s = mc.s_plus();
    let l = cfg.elastic_constants()?;
    let delta = tol.delta_fraction * s;
    let mut rec = ResultRecord::new("verify", sm.seed, cfg.to_toml());
    let mut worst = Worst {
        lemma_2_1: 0.0,
        longa: 0.0,
        equivalence: 0.0,
        bulk_gradient: 0.0,
        bulk_hessian: 0.0,
        manifold_gradient: 0.0,
        hessian_bound_min_ratio: f64::INFINITY,
        projection_min_ratio: f64::INFINITY,
    };

    // identities on unit-tangent director pairs, with a fresh material each time
    if sm.identity_samples == 0 {
        rec.warnings.push("identity_samples = 0: identity checks skipped".into());
        for name in ["lemma_2_1", "longa_identities", "uniaxial_equivalence"] {
            rec.push(Check::skipped(name));
        }
    } else {
        let mut rng = Sampler::new(sm.seed);
        for _ in 0..sm.identity_samples {
            let m = MaterialConstants::new(rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0))?;
            let sp = m.s_plus();
            let dg = rng.tangent_pair(1.0);
            let scale = sp.powi(3) * (1.0 + dg.g.norm_squared());
            worst.lemma_2_1 = worst.lemma_2_1.max(verify_lemma_2_1(&dg, sp) / scale);
            worst.longa = worst.longa.max(verify_lemma_2_1b(&dg, sp).max_relative());
            worst.equivalence = worst.equivalence.max(verify_uniaxial_equivalence(&dg, &l, sp).max_relative());
        }
        rec.push(Check::at_most("lemma_2_1", worst.lemma_2_1, tol.identity));
        rec.push(Check::at_most("longa_identities", worst.longa, tol.identity));
        rec.push(Check::at_most("uniaxial_equivalence", worst.equivalence, tol.identity));
    }

    if sm.bulk_samples == 0 {
        rec.warnings.push("bulk_samples = 0: bulk calculus checks skipped".into());
        for name in ["bulk_gradient_fd", "bulk_hessian_fd", "bulk_gradient_on_manifold"] {
            rec.push(Check::skipped(name));
        }
    } else {
        let mut rng = Sampler::new(sm.seed.wrapping_add(1));
        let value = |x: &Coords5| ldg_core::bulk::bulk_value(&x.unpack(), &mc);
        let grad = |x: &Coords5| (hooks.bulk_gradient)(&x.unpack(), &mc).pack5();
        for _ in 0..sm.bulk_samples {
            let q = rng.q_tensor(2.0 * s);
            let x = q.pack5();
            let h = 1e-5 * (1.0 + q.norm());
            let g = grad(&x);
            let fd: Vec<f64> = (0..5).map(|a| directional(value, &x, a, h)).collect();
            let err = (0..5).map(|a| (fd[a] - g.0[a]).powi(2)).sum::<f64>().sqrt();
            worst.bulk_gradient = worst.bulk_gradient.max(err / (1.0 + g.norm()));
            let hess = bulk_hessian(&q, &mc);
            let mut herr: f64 = 0.0;
            for b in 0..5 {
                let mut p = x;
                let mut m = x;
                p.0[b] += h;
                m.0[b] -= h;
                let (gp, gm) = (grad(&p), grad(&m));
                for a in 0..5 {
                    herr = herr.max(((gp.0[a] - gm.0[a]) / (2.0 * h) - hess[(a, b)]).abs());
                }
            }
            worst.bulk_hessian = worst.bulk_hessian.max(herr / (1.0 + hess.norm()));
            let r = rng.rotation();
            let on = QTensor::new(r * QTensor::q_plus(s).matrix() * r.transpose());
            worst.manifold_gradient = worst.manifold_gradient.max((hooks.bulk_gradient)(&on, &mc).norm() / s.powi(3));
        }
        rec.push(Check::at_most("bulk_gradient_fd", worst.bulk_gradient, tol.finite_difference));
        rec.push(Check::at_most("bulk_hessian_fd", worst.bulk_hessian, tol.finite_difference));
        rec.push(Check::at_most("bulk_gradient_on_manifold", worst.manifold_gradient, tol.manifold_gradient));
    }

    if sm.hessian_bound_samples == 0 {
        rec.warnings.push("hessian_bound_samples = 0: Hessian bound skipped".into());
        rec.push(Check::skipped("hessian_bound_violations"));
    } else {
        let mut rng = Sampler::new(sm.seed.wrapping_add(2));
        let mut violations = 0usize;
        for _ in 0..sm.hessian_bound_samples {
            let q = rng.q_near_uniaxial(s, delta);
            let (x, y) = (rng.normal(), rng.normal());
            let xi = Vector3::new(x, y, -x - y);
            let (lhs, rhs) = hessian_bound_check(&q, &xi, &mc, delta)?;
            if lhs < rhs - 1e-12 * (1.0 + rhs.abs()) {
                violations += 1;
            }
            worst.hessian_bound_min_ratio = worst.hessian_bound_min_ratio.min(lhs / rhs);
        }
        rec.push(Check::at_most("hessian_bound_violations", violations as f64, 0.0));
    }

    let factor = if tol.strict_projection_bound { 0.5 } else { 0.25 };
    let name =
        if tol.strict_projection_bound { "projection_bound_half_lambda" } else { "projection_bound_quarter_lambda" };
    if sm.projection_samples == 0 {
        rec.warnings.push("projection_samples = 0: projection bound skipped".into());
        rec.push(Check::skipped(name));
    } else {
        let mut rng = Sampler::new(sm.seed.wrapping_add(3));
        for _ in 0..sm.projection_samples {
            let q = rng.q_near_uniaxial(s, delta);
            let b = distance_bounds_check(&q, &mc, delta)?;
            if b.dist_sq > 1e-20 {
                worst.projection_min_ratio = worst.projection_min_ratio.min(b.shifted / (mc.lambda() * b.dist_sq));
            }
        }
        rec.push(Check::at_least(name, worst.projection_min_ratio, factor));
    }

    if sm.brute_force_samples == 0 || sm.brute_force_directions == 0 {
        rec.warnings.push("brute_force_samples = 0: projection search skipped".into());
        rec.push(Check::skipped("projection_brute_force"));
    } else {
        let (ratio, beaten) =
            brute_force_projection(&mc, sm.brute_force_samples, sm.brute_force_directions, sm.seed.wrapping_add(4));
        rec.push(
            Check::at_most("projection_brute_force", ratio, 1.0)
                .with_note(format!("search gap over sphere resolution; {beaten} samples where the search beat π")),
        );
        if beaten > 0 {
            rec.push(Check::flag("projection_not_beaten", false));
        }
    }

    rec.detail("worst", &worst);
    rec.detail("s_plus", s);
    rec.detail("lambda", mc.lambda());
    Ok(rec)
}

/// Compares π(Q) with the nearest of `n_dirs` sphere directions. For each
/// sample the squared-distance gap is bounded by 2s₊(λ₃ − λ₁)θ², θ the
/// sphere resolution; returns the largest gap over that bound and the number
/// of samples where the search found a strictly closer point than π.
pub fn brute_force_projection(mc: &MaterialConstants, samples: usize, n_dirs: usize, seed: u64) -> (f64, usize) {
    let s = mc.s_plus();
    let dirs = fibonacci_sphere(n_dirs);
    let theta = (4.0 * std::f64::consts::PI / n_dirs as f64).sqrt();
    let mut rng = Sampler::new(seed);
    let mut worst: f64 = 0.0;
    let mut beaten = 0;
    let mut done = 0;
    while done < samples {
        let q = rng.q_tensor(2.0 * s);
        let Ok(p) = q.project_uniaxial(mc) else { continue };
        done += 1;
        let d_pi = (q - p).norm_squared();
        let d_bf = dirs
            .iter()
            .map(|n| (q.matrix() - s * (n * n.transpose() - Matrix3::identity() / 3.0)).norm_squared())
            .fold(f64::INFINITY, f64::min);
        if d_bf < d_pi - 1e-12 * (1.0 + d_pi) {
            beaten += 1;
        }
        let ev = q.eigendecompose().eigenvalues;
        let bound = 2.0 * s * (ev[2] - ev[0]) * theta * theta;
        worst = worst.max((d_bf - d_pi) / bound);
    }
    (worst, beaten)
}
