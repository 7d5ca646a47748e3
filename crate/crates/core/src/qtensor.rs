//! Symmetric traceless 3x3 tensors (the space S_0), the bulk material constants
//! and the uniaxial manifold S_* built from them.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{Matrix3, SymmetricEigen, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Relative gap below which the top two eigenvalues count as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-8;

/// Bulk coefficients a, b, c > 0 together with the derived equilibrium order
/// parameter s_+ and the minimum of the bulk potential over S_0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaterialConstants {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    s_plus: f64,
    bulk_min: f64,
}

impl MaterialConstants {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        let s_plus = compute_s_plus(a, b, c)?;
        let s2 = s_plus * s_plus;
        // f_B on S_*: tr Q^2 = 2s^2/3, tr Q^3 = 2s^3/9
        let bulk_min = -a * s2 / 3.0 - 2.0 * b * s2 * s_plus / 27.0 + c * s2 * s2 / 9.0;
        Ok(Self { a, b, c, s_plus, bulk_min })
    }

    pub fn s_plus(&self) -> f64 {
        self.s_plus
    }

    /// min over S_0 of the bulk potential, attained on S_*.
    pub fn bulk_min(&self) -> f64 {
        self.bulk_min
    }

    /// λ = min{3a, s_+ b}, the curvature constant of the bulk potential across S_*.
    pub fn lambda(&self) -> f64 {
        (3.0 * self.a).min(self.s_plus * self.b)
    }
}

/// s_+ = (b + sqrt(b^2 + 24ac)) / (4c).
pub fn compute_s_plus(a: f64, b: f64, c: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0 && c > 0.0) || !(a.is_finite() && b.is_finite() && c.is_finite()) {
        return Err(Error::Domain(format!("material constants must be positive and finite, got a={a}, b={b}, c={c}")));
    }
    Ok((b + (b * b + 24.0 * a * c).sqrt()) / (4.0 * c))
}

/// An element of S_0. Construction always symmetrizes and removes the trace.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct QTensor(Matrix3<f64>);

impl QTensor {
    pub fn new(m: Matrix3<f64>) -> Self {
        Self(project_s0(&m))
    }

    pub fn zero() -> Self {
        Self(Matrix3::zeros())
    }

    /// Q^+ = diag(-s/3, -s/3, 2s/3).
    pub fn q_plus(s_plus: f64) -> Self {
        Self(Matrix3::from_diagonal(&Vector3::new(-s_plus / 3.0, -s_plus / 3.0, 2.0 * s_plus / 3.0)))
    }

    /// Q = s_+ (u ⊗ u - I/3) for a unit director u.
    pub fn from_director(u: &Vector3<f64>, s_plus: f64) -> Result<Self> {
        let n = u.norm();
        if (n - 1.0).abs() > 1e-10 {
            return Err(Error::Domain(format!("director must be a unit vector, |u| = {n}")));
        }
        Ok(Self::uniaxial(u, s_plus))
    }

    /// Uniaxial tensor without the unit-length check; `u` is normalized first.
    pub(crate) fn uniaxial(u: &Vector3<f64>, s: f64) -> Self {
        let u = u.normalize();
        let mut m = u * u.transpose() * s;
        for i in 0..3 {
            m[(i, i)] -= s / 3.0;
        }
        Self(project_s0(&m))
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn norm_squared(&self) -> f64 {
        self.0.norm_squared()
    }

    pub fn dot(&self, other: &QTensor) -> f64 {
        self.0.dot(&other.0)
    }

    pub fn trace_sq(&self) -> f64 {
        self.0.norm_squared()
    }

    pub fn trace_cube(&self) -> f64 {
        (self.0 * self.0 * self.0).trace()
    }

    pub fn pack5(&self) -> Coords5 {
        Coords5::pack(&self.0)
    }

    /// Ascending eigenvalues with a right-handed orthonormal eigenframe.
    ///
    /// Columns 0 and 1 have their largest-magnitude component positive; column 2
    /// is their cross product so that det R = +1.
    pub fn eigendecompose(&self) -> EigenSystem {
        let eig = SymmetricEigen::new(self.0);
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        let eigenvalues = Vector3::new(eig.eigenvalues[idx[0]], eig.eigenvalues[idx[1]], eig.eigenvalues[idx[2]]);
        let c0 = fix_sign(eig.eigenvectors.column(idx[0]).into_owned());
        let mut c1 = eig.eigenvectors.column(idx[1]).into_owned();
        // re-orthogonalize against c0 to keep R^T R = I at round-off level
        c1 -= c0 * c0.dot(&c1);
        let c1 = fix_sign(c1.normalize());
        let c2 = c0.cross(&c1);
        let rotation = Matrix3::from_columns(&[c0, c1, c2]);
        EigenSystem { eigenvalues, rotation }
    }

    /// Nearest uniaxial tensor s_+(v ⊗ v - I/3), v the top eigenvector.
    pub fn project_uniaxial(&self, mc: &MaterialConstants) -> Result<QTensor> {
        self.project_uniaxial_s(mc.s_plus())
    }

    pub fn project_uniaxial_s(&self, s_plus: f64) -> Result<QTensor> {
        let es = self.eigendecompose();
        let gap = es.eigenvalues[2] - es.eigenvalues[1];
        let tol = DEGENERACY_TOL * (1.0 + self.norm());
        if gap <= tol {
            return Err(Error::Ambiguous { gap, tol });
        }
        let v = es.rotation.column(2).into_owned();
        Ok(Self::uniaxial(&v, s_plus))
    }

    pub fn dist_to_uniaxial(&self, mc: &MaterialConstants) -> Result<f64> {
        let p = self.project_uniaxial(mc)?;
        Ok((*self - p).norm())
    }

    /// dist(Q, S_*) through the top eigenvalue; defined even when the nearest
    /// point is not unique.
    pub fn uniaxial_distance(&self, s_plus: f64) -> f64 {
        let es = self.eigendecompose();
        let d2 = self.norm_squared() - 2.0 * s_plus * es.eigenvalues[2] + 2.0 * s_plus * s_plus / 3.0;
        d2.max(0.0).sqrt()
    }

    /// R^T Q R for a rotation R.
    pub fn rotate_into(&self, r: &Matrix3<f64>) -> QTensor {
        QTensor::new(r.transpose() * self.0 * r)
    }

    pub fn commutator_norm(&self, other: &QTensor) -> f64 {
        (self.0 * other.0 - other.0 * self.0).norm()
    }
}

fn fix_sign(v: Vector3<f64>) -> Vector3<f64> {
    let mut k = 0;
    for i in 1..3 {
        if v[i].abs() > v[k].abs() {
            k = i;
        }
    }
    if v[k] < 0.0 {
        -v
    } else {
        v
    }
}

/// Symmetrize and subtract trace/3 · I.
pub fn project_s0(m: &Matrix3<f64>) -> Matrix3<f64> {
    let mut s = (m + m.transpose()) * 0.5;
    let t = s.trace() / 3.0;
    for i in 0..3 {
        s[(i, i)] -= t;
    }
    s
}

impl Add for QTensor {
    type Output = QTensor;
    fn add(self, rhs: QTensor) -> QTensor {
        QTensor(self.0 + rhs.0)
    }
}

impl Sub for QTensor {
    type Output = QTensor;
    fn sub(self, rhs: QTensor) -> QTensor {
        QTensor(self.0 - rhs.0)
    }
}

impl Mul<f64> for QTensor {
    type Output = QTensor;
    fn mul(self, rhs: f64) -> QTensor {
        QTensor(self.0 * rhs)
    }
}

impl Neg for QTensor {
    type Output = QTensor;
    fn neg(self) -> QTensor {
        QTensor(-self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenSystem {
    /// Ascending.
    pub eigenvalues: Vector3<f64>,
    /// Columns are eigenvectors; R^T Q R = diag(eigenvalues).
    pub rotation: Matrix3<f64>,
}

impl EigenSystem {
    pub fn reconstruct(&self) -> Matrix3<f64> {
        self.rotation * Matrix3::from_diagonal(&self.eigenvalues) * self.rotation.transpose()
    }
}

/// Orthonormal coordinates on S_0.
///
/// Basis (all unit Frobenius norm):
///
/// | index | basis tensor                     |
/// |-------|----------------------------------|
/// | 0     | diag(1, -1, 0) / √2              |
/// | 1     | diag(-1, -1, 2) / √6             |
/// | 2     | (e1 ⊗ e2 + e2 ⊗ e1) / √2         |
/// | 3     | (e1 ⊗ e3 + e3 ⊗ e1) / √2         |
/// | 4     | (e2 ⊗ e3 + e3 ⊗ e2) / √2         |
///
/// Every packed quantity in the crate (field node values, gradients with
/// respect to Q, Hessians) uses this chart.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Coords5(pub [f64; 5]);

impl Coords5 {
    pub fn basis() -> [Matrix3<f64>; 5] {
        let r2 = 1.0 / SQRT2;
        let r6 = 1.0 / 6f64.sqrt();
        let mut e = [Matrix3::zeros(); 5];
        e[0][(0, 0)] = r2;
        e[0][(1, 1)] = -r2;
        e[1][(0, 0)] = -r6;
        e[1][(1, 1)] = -r6;
        e[1][(2, 2)] = 2.0 * r6;
        e[2][(0, 1)] = r2;
        e[2][(1, 0)] = r2;
        e[3][(0, 2)] = r2;
        e[3][(2, 0)] = r2;
        e[4][(1, 2)] = r2;
        e[4][(2, 1)] = r2;
        e
    }

    /// Coordinates of the S_0 part of `m`. Equivalently the chart image of
    /// the gradient when `m` holds partial derivatives with respect to the
    /// nine raw entries.
    pub fn pack(m: &Matrix3<f64>) -> Coords5 {
        Coords5([
            (m[(0, 0)] - m[(1, 1)]) / SQRT2,
            (2.0 * m[(2, 2)] - m[(0, 0)] - m[(1, 1)]) / 6f64.sqrt(),
            (m[(0, 1)] + m[(1, 0)]) / SQRT2,
            (m[(0, 2)] + m[(2, 0)]) / SQRT2,
            (m[(1, 2)] + m[(2, 1)]) / SQRT2,
        ])
    }

    pub fn unpack(&self) -> QTensor {
        QTensor(self.to_matrix())
    }

    pub fn to_matrix(&self) -> Matrix3<f64> {
        let v = &self.0;
        let r2 = 1.0 / SQRT2;
        let r6 = 1.0 / 6f64.sqrt();
        Matrix3::new(
            v[0] * r2 - v[1] * r6,
            v[2] * r2,
            v[3] * r2,
            v[2] * r2,
            -v[0] * r2 - v[1] * r6,
            v[4] * r2,
            v[3] * r2,
            v[4] * r2,
            2.0 * v[1] * r6,
        )
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_q(seed: u64) -> QTensor {
        crate::sampling::Sampler::new(seed).q_tensor(2.0)
    }

    #[test]
    fn s_plus_unit_constants() {
        assert_eq!(compute_s_plus(1.0, 1.0, 1.0).unwrap(), 1.5);
    }

    #[test]
    fn s_plus_limit_small_a() {
        let s = compute_s_plus(1e-14, 1.0, 1.0).unwrap();
        assert!((s - 0.5).abs() < 1e-12);
    }

    #[test]
    fn s_plus_matches_bisection_root() {
        // root of 2cs^2/3 - bs/3 - a on (0, ∞), found independently
        for &(a, b, c) in &[(0.5, 2.0, 1.0), (1.0, 1.0, 1.0), (1.7, 0.6, 0.9)] {
            let f = |s: f64| 2.0 * c * s * s / 3.0 - b * s / 3.0 - a;
            let (mut lo, mut hi) = (0.0, 100.0);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if f(mid) > 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            let s = compute_s_plus(a, b, c).unwrap();
            assert!((s - lo).abs() <= 1e-12 * s, "{s} vs {lo}");
            let lhs = 2.0 * c * s * s / 3.0;
            let rhs = b * s / 3.0 + a;
            assert!((lhs - rhs).abs() <= 1e-12 * lhs);
        }
    }

    #[test]
    fn s_plus_rejects_nonpositive() {
        assert!(compute_s_plus(0.0, 1.0, 1.0).is_err());
        assert!(compute_s_plus(1.0, -1.0, 1.0).is_err());
        assert!(MaterialConstants::new(1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn director_along_z_gives_q_plus() {
        let q = QTensor::from_director(&Vector3::z(), 1.5).unwrap();
        let expect = Matrix3::from_diagonal(&Vector3::new(-0.5, -0.5, 1.0));
        assert!((q.matrix() - expect).norm() < 1e-15);
        assert_eq!(q, QTensor::q_plus(1.5));
    }

    #[test]
    fn director_sign_invariance_and_norm() {
        let u = Vector3::new(0.3, -0.4, 0.5).normalize();
        let q1 = QTensor::from_director(&u, 1.2).unwrap();
        let q2 = QTensor::from_director(&-u, 1.2).unwrap();
        assert!((q1 - q2).norm() < 1e-15);
        assert!((q1.norm() - (2.0f64 / 3.0).sqrt() * 1.2).abs() < 1e-14);
        let ev = q1.eigendecompose().eigenvalues;
        assert!((ev[0] + 0.4).abs() < 1e-14 && (ev[1] + 0.4).abs() < 1e-14 && (ev[2] - 0.8).abs() < 1e-14);
    }

    #[test]
    fn director_must_be_unit() {
        assert!(QTensor::from_director(&Vector3::new(1.0, 1.0, 0.0), 1.0).is_err());
    }

    #[test]
    fn eigen_of_zero_is_identity_frame() {
        let es = QTensor::zero().eigendecompose();
        assert_eq!(es.eigenvalues, Vector3::zeros());
        assert!((es.rotation - Matrix3::identity()).norm() < 1e-15);
    }

    #[test]
    fn eigen_of_diagonal() {
        let q = QTensor::new(Matrix3::from_diagonal(&Vector3::new(1.0, -0.5, -0.5)));
        let es = q.eigendecompose();
        assert!((es.eigenvalues - Vector3::new(-0.5, -0.5, 1.0)).norm() < 1e-15);
        assert!((es.reconstruct() - q.matrix()).norm() < 1e-14);
        assert!((es.rotation.determinant() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eigen_reconstruction_random() {
        for seed in 0..10_000 {
            let q = sample_q(seed);
            let es = q.eigendecompose();
            let scale = 1.0 + q.norm();
            assert!((es.reconstruct() - q.matrix()).norm() <= 1e-11 * scale);
            assert!((es.rotation.transpose() * es.rotation - Matrix3::identity()).norm() <= 1e-12);
            assert!((es.rotation.determinant() - 1.0).abs() <= 1e-12);
            assert!(es.eigenvalues.sum().abs() <= 1e-12 * scale);
            assert!(es.eigenvalues[0] <= es.eigenvalues[1] && es.eigenvalues[1] <= es.eigenvalues[2]);
        }
    }

    #[test]
    fn projection_identity_on_s_star_and_scaling() {
        let mc = MaterialConstants::new(1.0, 1.0, 1.0).unwrap();
        let u = Vector3::new(1.0, 2.0, -2.0).normalize();
        let q = QTensor::from_director(&u, mc.s_plus()).unwrap();
        assert!((q.project_uniaxial(&mc).unwrap() - q).norm() < 1e-13);
        assert!(q.dist_to_uniaxial(&mc).unwrap() < 1e-12);
        let qp = QTensor::q_plus(mc.s_plus());
        let scaled = qp * 1.01;
        assert!((scaled.project_uniaxial(&mc).unwrap() - qp).norm() < 1e-13);
    }

    #[test]
    fn projection_ambiguous_at_zero() {
        let mc = MaterialConstants::new(1.0, 1.0, 1.0).unwrap();
        assert!(matches!(QTensor::zero().project_uniaxial(&mc), Err(Error::Ambiguous { .. })));
        // oblate tensor: top two eigenvalues equal
        let oblate = QTensor::q_plus(1.0) * -1.0;
        assert!(oblate.dist_to_uniaxial(&mc).is_err());
    }

    #[test]
    fn distance_of_scaled_q_plus() {
        let mc = MaterialConstants::new(1.0, 1.0, 1.0).unwrap();
        let s = mc.s_plus();
        for &t in &[0.1, 0.5, 0.9, 1.3] {
            let q = QTensor::q_plus(s) * t;
            let d = q.dist_to_uniaxial(&mc).unwrap();
            assert!((d - (t - 1.0f64).abs() * (2.0f64 / 3.0).sqrt() * s).abs() < 1e-13);
        }
        let d0 = QTensor::zero().uniaxial_distance(s);
        assert!((d0 - (2.0f64 / 3.0).sqrt() * s).abs() < 1e-14);
    }

    #[test]
    fn pack_zero_and_basis_orthonormal() {
        assert_eq!(QTensor::zero().pack5(), Coords5::default());
        let e = Coords5::basis();
        for i in 0..5 {
            for j in 0..5 {
                let d = e[i].dot(&e[j]);
                assert!((d - if i == j { 1.0 } else { 0.0 }).abs() < 1e-15);
            }
            assert!(e[i].trace().abs() < 1e-15);
            let mut v = [0.0; 5];
            v[i] = 1.0;
            assert!((Coords5(v).to_matrix() - e[i]).norm() < 1e-15);
        }
    }

    #[test]
    fn construction_lands_in_s0() {
        let m = Matrix3::new(1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 10.0);
        let q = QTensor::new(m);
        let scale = 1.0 + q.norm();
        assert!((q.matrix() - q.matrix().transpose()).norm() <= 1e-14 * scale);
        assert!(q.matrix().trace().abs() <= 1e-14 * scale);
    }
}
