//! Seeded random draws used by the verification suites and tests.

use nalgebra::{Matrix3, Rotation3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::densities::{DirectorGradient, TensorGradient};
use crate::qtensor::{Coords5, QTensor};

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo..hi)
    }

    pub fn index(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    pub fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    fn normal5(&mut self) -> [f64; 5] {
        std::array::from_fn(|_| self.normal())
    }

    pub fn unit_vector(&mut self) -> Vector3<f64> {
        loop {
            let v = Vector3::new(self.normal(), self.normal(), self.normal());
            let n = v.norm();
            if n > 1e-8 {
                return v / n;
            }
        }
    }

    /// Uniform in the Frobenius ball |Q| ≤ radius of S_0.
    pub fn q_tensor(&mut self, radius: f64) -> QTensor {
        let mut v = self.normal5();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
        let r = radius * self.uniform(0.0, 1.0).powf(0.2);
        for x in &mut v {
            *x *= r / n;
        }
        Coords5(v).unpack()
    }

    /// Gaussian element of S_0 with unit expected squared norm per coordinate.
    pub fn q_gaussian(&mut self) -> QTensor {
        Coords5(self.normal5()).unpack()
    }

    /// A point within Frobenius distance `delta` of S_* (so inside S_δ).
    pub fn q_near_uniaxial(&mut self, s_plus: f64, delta: f64) -> QTensor {
        let u = self.unit_vector();
        let base = QTensor::uniaxial(&u, s_plus);
        base + self.q_tensor(delta)
    }

    pub fn tensor_gradient(&mut self) -> TensorGradient {
        TensorGradient::new([
            self.q_gaussian().matrix().to_owned(),
            self.q_gaussian().matrix().to_owned(),
            self.q_gaussian().matrix().to_owned(),
        ])
    }

    /// TensorGradient with |p| = 1.
    pub fn unit_tensor_gradient(&mut self) -> TensorGradient {
        let p = self.tensor_gradient();
        let n = p.norm();
        p.scaled(1.0 / n)
    }

    /// Unit director with a tangent gradient (rows of g orthogonal to u).
    pub fn tangent_pair(&mut self, scale: f64) -> DirectorGradient {
        let u = self.unit_vector();
        let mut g = Matrix3::from_fn(|_, _| self.normal() * scale);
        for k in 0..3 {
            let row = g.row(k).transpose();
            let proj = row - u * u.dot(&row);
            g.set_row(k, &proj.transpose());
        }
        DirectorGradient::new(u, g).expect("constructed tangent pair")
    }

    pub fn rotation(&mut self) -> Matrix3<f64> {
        let axis = self.unit_vector();
        let angle = self.uniform(0.0, std::f64::consts::PI);
        Rotation3::from_axis_angle(&nalgebra::Unit::new_unchecked(axis), angle).into_inner()
    }
}
