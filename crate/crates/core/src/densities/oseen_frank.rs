use nalgebra::{Matrix3, Vector3};

use super::{DirectorGradient, FrankConstants};
use crate::error::{Error, Result};

/// Oseen–Frank density W(u, ∇u).
pub fn oseen_frank_w(dg: &DirectorGradient, k: &FrankConstants) -> Result<f64> {
    let n = dg.u.norm();
    if (n - 1.0).abs() > 1e-10 {
        return Err(Error::Domain(format!("director must be a unit vector, |u| = {n}")));
    }
    let div = dg.div();
    let curl = dg.curl();
    let twist = dg.u.dot(&curl);
    let bend = dg.u.cross(&curl).norm_squared();
    let saddle = (dg.g * dg.g).trace() - div * div;
    Ok(0.5 * k.k1 * div * div + 0.5 * k.k2 * twist * twist + 0.5 * k.k3 * bend + 0.5 * (k.k2 + k.k4) * saddle)
}

/// 2|T|² + |uᵀA|² with P = I − uuᵀ, M = P A P, T = sym(M) − tr(M)/2 P, and
/// A the transpose of the Jacobian. On unit tangent pairs this equals
/// |∇u|² − (div u)² − (u·curl u)² − |u×curl u|², and it is nonnegative for
/// every (u, g).
fn saddle_square(u: &Vector3<f64>, g: &Matrix3<f64>) -> f64 {
    let a = g;
    let proj = Matrix3::identity() - u * u.transpose();
    let m = proj * a * proj;
    let t = (m + m.transpose()) * 0.5 - proj * (0.5 * m.trace());
    2.0 * t.norm_squared() + (u.transpose() * a).norm_squared()
}

/// The rewritten density W̃ with explicit α̃/2|∇u|² part. Valid for any u,
/// and W̃ = W on unit tangent pairs.
pub fn oseen_frank_w_tilde(dg: &DirectorGradient, k: &FrankConstants) -> Result<f64> {
    if !k.strong_ericksen() {
        return Err(Error::Domain(format!("need k2 > |k4| and min(k1, k3) > (k2 + k4)/2, got {k:?}")));
    }
    let at = k.alpha_tilde();
    let kk = k.k2 + k.k4;
    let div = dg.div();
    let curl = dg.curl();
    let twist = dg.u.dot(&curl);
    let bend = dg.u.cross(&curl).norm_squared();
    Ok(0.5 * at * dg.g.norm_squared()
        + 0.25 * (2.0 * k.k1 - kk - at) * div * div
        + 0.25 * (k.k2 - k.k4 - at) * twist * twist
        + 0.25 * (2.0 * k.k3 - kk - at) * bend
        + 0.25 * (kk - at) * saddle_square(&dg.u, &dg.g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::Sampler;

    #[test]
    fn zero_gradient() {
        let dg = DirectorGradient::new(Vector3::z(), Matrix3::zeros()).unwrap();
        assert_eq!(oseen_frank_w(&dg, &FrankConstants::paa()).unwrap(), 0.0);
    }

    #[test]
    fn one_constant_reduction() {
        let k = FrankConstants::new(1.0, 1.0, 1.0, 0.0);
        let mut s = Sampler::new(4);
        for _ in 0..1000 {
            let dg = s.tangent_pair(1.0);
            let w = oseen_frank_w(&dg, &k).unwrap();
            let direct = 0.5 * dg.g.norm_squared();
            assert!((w - direct).abs() <= 1e-12 * (1.0 + direct));
        }
    }

    #[test]
    fn paa_nonnegative_and_frame_indifferent() {
        let k = FrankConstants::paa();
        let mut s = Sampler::new(6);
        for _ in 0..1000 {
            let dg = s.tangent_pair(2.0);
            let w = oseen_frank_w(&dg, &k).unwrap();
            assert!(w >= -1e-12);
            let r = s.rotation();
            let wr = oseen_frank_w(&dg.rotated(&r), &k).unwrap();
            assert!((w - wr).abs() <= 1e-10 * (1.0 + w.abs()));
        }
    }

    #[test]
    fn non_unit_director_rejected() {
        let dg = DirectorGradient::unchecked(Vector3::new(1.0, 1.0, 0.0), Matrix3::zeros());
        assert!(oseen_frank_w(&dg, &FrankConstants::paa()).is_err());
    }

    #[test]
    fn tilde_equals_w_on_tangent_pairs() {
        let mut s = Sampler::new(9);
        for k in
            [FrankConstants::paa(), FrankConstants::new(2.0, 1.5, 3.0, -0.7), FrankConstants::new(2.0, 1.5, 3.0, 0.9)]
        {
            for _ in 0..10_000 {
                let dg = s.tangent_pair(1.5);
                let w = oseen_frank_w(&dg, &k).unwrap();
                let wt = oseen_frank_w_tilde(&dg, &k).unwrap();
                assert!((w - wt).abs() <= 1e-10 * (1.0 + w.abs()), "{w} vs {wt}");
            }
        }
    }

    #[test]
    fn tilde_is_coercive_for_arbitrary_inputs() {
        let mut s = Sampler::new(10);
        for k in [FrankConstants::paa(), FrankConstants::new(2.0, 1.5, 3.0, -0.7)] {
            let at = k.alpha_tilde();
            for _ in 0..5000 {
                let u = Vector3::new(s.normal(), s.normal(), s.normal()) * 1.7;
                let g = Matrix3::from_fn(|_, _| s.normal());
                let dg = DirectorGradient::unchecked(u, g);
                let wt = oseen_frank_w_tilde(&dg, &k).unwrap();
                assert!(wt >= 0.5 * at * g.norm_squared() - 1e-10 * (1.0 + wt.abs()));
            }
        }
    }

    #[test]
    fn tilde_rejects_weak_constants() {
        let dg = DirectorGradient::new(Vector3::z(), Matrix3::zeros()).unwrap();
        assert!(oseen_frank_w_tilde(&dg, &FrankConstants::new(1.0, 1.0, 1.0, 1.0)).is_err());
    }
}
